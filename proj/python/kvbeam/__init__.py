"""Damped cantilever simulation and boundary-source recovery."""

from ._core import (
    add_noise,
    c_st,
    default_stability_rows,
    discrete_seminorm,
    evaluate_constants,
    kappa0_lower_bound,
    project_consistency,
    reconstruct,
    simulate,
    sobolev_norm,
    stability_table,
)

__all__ = [
    "add_noise",
    "c_st",
    "default_stability_rows",
    "discrete_seminorm",
    "evaluate_constants",
    "kappa0_lower_bound",
    "project_consistency",
    "reconstruct",
    "simulate",
    "sobolev_norm",
    "stability_table",
]
