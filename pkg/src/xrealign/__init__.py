"""Realignment-based entanglement detection for two-qubit X-states."""

from .criteria import (
    Branch,
    Criterion,
    CriterionReport,
    Verdict,
    all_reports,
    ccn_verdict,
    concurrence,
    corollary1_threshold,
    derivation_diagnostics,
    partial_transpose,
    ppt_spectrum,
    ppt_verdict,
    realign,
    realignment_breakdown,
    theorem1_threshold,
    theorem1_verdict,
)
from .numerics import DEFAULT_TOL, Tolerance, hermitian_eigenvalues, singular_values, trace_norm
from .states import XState, from_matrix, rho1_family, to_matrix, validate, werner

__version__ = "0.1.0"
