"""Invasion percolation crossings and tranche resampling experiments."""

from ._core import (
    __version__,
    build_tranche,
    correlation_length,
    count_crossings,
    derive_seed,
    edge_weight,
    estimate_arm_probability,
    estimate_conditional_variance,
    estimate_mismatch,
    estimate_rectangle_crossing,
    invade,
    min_defect_count,
)

__all__ = [
    "__version__",
    "build_tranche",
    "correlation_length",
    "count_crossings",
    "derive_seed",
    "edge_weight",
    "estimate_arm_probability",
    "estimate_conditional_variance",
    "estimate_mismatch",
    "estimate_rectangle_crossing",
    "invade",
    "min_defect_count",
]
