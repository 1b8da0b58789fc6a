"""Truncated power series, compositions and root utilities."""

from .roots import (
    RootCluster,
    multiplicity_at,
    polynomial_roots,
    root_clusters,
    roots_in_disk,
    winding_count,
    winding_number,
)
from .truncated import (
    TruncatedSeries,
    TruncatedSeries1,
    TruncatedSeries2,
    compose1,
    compose2,
    invert_map,
    linear_part,
    reversion,
    series_arith,
    series_from_json,
    solve_homological,
    substitute,
)

__all__ = [
    "TruncatedSeries",
    "TruncatedSeries1",
    "TruncatedSeries2",
    "series_arith",
    "compose1",
    "compose2",
    "reversion",
    "solve_homological",
    "substitute",
    "invert_map",
    "linear_part",
    "series_from_json",
    "RootCluster",
    "polynomial_roots",
    "root_clusters",
    "roots_in_disk",
    "multiplicity_at",
    "winding_count",
    "winding_number",
]
