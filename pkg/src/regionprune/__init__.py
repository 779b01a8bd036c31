"""Exact POMDP value iteration with region-based cross-sum pruning."""

from ._kernels import BACKEND
from .algorithms import ALGORITHMS, PrunerConfig, gip_prune, ibip_prune, naive_prune, prune_cross_sum, rbip_prune
from .geometry import AlphaVector, Belief, RegionConstraintSet, VectorSet, best, cross_sum, dot, lex_less, pointwise_dominate
from .lp import LpNumericalError, LpStats, lp_dominate, lp_dominate_region, lp_intersect
from .prune import pr, pr_region, region

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "AlphaVector",
    "BACKEND",
    "Belief",
    "LpNumericalError",
    "LpStats",
    "PrunerConfig",
    "RegionConstraintSet",
    "VectorSet",
    "best",
    "cross_sum",
    "dot",
    "gip_prune",
    "ibip_prune",
    "lex_less",
    "lp_dominate",
    "lp_dominate_region",
    "lp_intersect",
    "naive_prune",
    "pointwise_dominate",
    "pr",
    "pr_region",
    "prune_cross_sum",
    "rbip_prune",
    "region",
]
