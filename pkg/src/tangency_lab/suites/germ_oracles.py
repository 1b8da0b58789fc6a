"""
Germ oracle suite: exact classification of the monomial germs
t^(h+1) + lambda^k and randomized agreement of the multiplicity algorithms.
"""

import logging
from typing import List

import numpy as np

from ..commands.germ_commands import germ_from_expression
from ..core.models import CriterionResult, SpeedBlock
from ..germ import classify_unfolding, lift_jacobian, multiplicity_counting, multiplicity_resultant
from ..germ.classify import JACOBIAN_TOL
from ..germ.germ import random_monomial_germ
from .base_suite import BaseSuite, Check, criterion

logger = logging.getLogger(__name__)

H_MAX = 3
K_MAX = 3
RANDOM_GERMS = 24


def _oracle_table(rng: np.random.Generator) -> List[CriterionResult]:
    lines = []
    for h in range(1, H_MAX + 1):
        for k in range(1, K_MAX + 1):
            expression = f"t**{h + 1} + lam**{k}"
            record = classify_unfolding(germ_from_expression(expression), rng=rng)
            expected = (h, h * k, [SpeedBlock.of(h, k)])
            measured = (record.h, record.m, record.blocks)
            blocks = " ".join(f"{b.size}:{b.exponent}" for b in record.blocks)
            lines.append(
                criterion(
                    expression,
                    f"h={record.h} m={record.m} blocks={blocks}",
                    f"h={h} m={h * k} blocks={h}:{k}/1",
                    measured == expected,
                )
            )
    return lines


def _random_agreement(rng: np.random.Generator) -> CriterionResult:
    shapes = [(h, k) for h in range(1, H_MAX + 1) for k in range(1, 7) if h * k <= 6]
    mismatches = []
    for i in range(RANDOM_GERMS):
        h, k = shapes[i % len(shapes)]
        germ, expected = random_monomial_germ(rng, h, k)
        by_resultant = multiplicity_resultant(germ)
        by_count = multiplicity_counting(germ, rng=rng).m
        if not by_resultant == by_count == expected:
            mismatches.append(f"h={h} k={k}: resultant {by_resultant}, count {by_count}, expected {expected}")
    return criterion(
        "multiplicity algorithms agree on random germs",
        RANDOM_GERMS - len(mismatches),
        RANDOM_GERMS,
        not mismatches,
        "; ".join(mismatches),
    )


def _transversality(rng: np.random.Generator) -> CriterionResult:
    contradictions = 0
    for k in range(1, 7):
        germ, _ = random_monomial_germ(rng, 1, k)
        nonsingular = abs(np.linalg.det(lift_jacobian(germ))) > JACOBIAN_TOL * germ.scale**2
        if nonsingular != (multiplicity_resultant(germ) == 1):
            contradictions += 1
    return criterion("h = 1: nonsingular lift iff m = 1", contradictions, 0, contradictions == 0)


class GermOraclesSuite(BaseSuite):
    """Exact-integer checks of order, multiplicity and speed blocks."""

    name = "germ-oracles"
    description = "Oracle table for t^(h+1) + lambda^k and multiplicity cross-checks"

    def checks(self) -> List[Check]:
        return [
            ("oracle table", _oracle_table),
            ("random multiplicities", _random_agreement),
            ("transversality", _transversality),
        ]


__all__ = ["GermOraclesSuite"]
