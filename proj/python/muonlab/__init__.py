"""Muon optimizer toolkit.

Thin wrapper over the C++ core: polar-factor orthogonalization (exact SVD
and Newton-Schulz), Muon training runs on synthetic problems with exact
constants, and the closed-form convergence-bound and critical-batch-size
calculators.
"""

from ._core import (
    audit_problem,
    critical_batch,
    muon_step,
    nuclear_norm,
    ns_scalar_iterate,
    orthogonalize,
    param_norm_bound,
    predict_cbs,
    run_training,
    singular_values,
    steps_needed,
    theorem_bound,
)

__all__ = [
    "audit_problem",
    "critical_batch",
    "muon_step",
    "nuclear_norm",
    "ns_scalar_iterate",
    "orthogonalize",
    "param_norm_bound",
    "predict_cbs",
    "run_training",
    "singular_values",
    "steps_needed",
    "theorem_bound",
]
