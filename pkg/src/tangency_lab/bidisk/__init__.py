"""Graphs in the bidisk, tangency counts, graph transforms and horseshoes."""

from .graphs import (
    GraphInBidisk,
    HorizontalManifold,
    Intersection,
    RHCheck,
    horizontal_degree,
    intersect_graphs,
    random_rh_trial,
    rh_check,
    split_tangency,
    tangency_count,
    vertical_tangencies,
)
from .horseshoe import (
    BidiskFrame,
    CrossingCertificate,
    HorseshoeFamily,
    crossing_certificate,
    horseshoe_census,
    horseshoe_stable_graphs,
    pairwise_gaps,
)
from .transform import (
    TransformHistory,
    branch_anchors,
    collocation_step,
    graph_transform_n,
    henon_pull_back,
    series_step,
    swapped_inverse_germ,
)

__all__ = [
    "GraphInBidisk",
    "HorizontalManifold",
    "Intersection",
    "RHCheck",
    "horizontal_degree",
    "vertical_tangencies",
    "intersect_graphs",
    "tangency_count",
    "rh_check",
    "split_tangency",
    "random_rh_trial",
    "TransformHistory",
    "graph_transform_n",
    "series_step",
    "collocation_step",
    "henon_pull_back",
    "branch_anchors",
    "swapped_inverse_germ",
    "BidiskFrame",
    "CrossingCertificate",
    "HorseshoeFamily",
    "crossing_certificate",
    "horseshoe_stable_graphs",
    "horseshoe_census",
    "pairwise_gaps",
]
