"""Entanglement criteria for two-qubit X-states.

Three verdicts are computed from closed forms:

* PPT, which is exact for two qubits and serves as ground truth;
* the computable cross norm (realignment) test ``||R(rho)||_1 > 1``;
* the state-dependent realignment bound
  ``||R(rho)||_1 >= 2 (l_a l_b)^(1/4) (l_c + l_d)^(1/2)`` whose eigenvalue
  pairing is picked by which partially transposed eigenvalue is negative,
  in eigenvalue form and in matrix-element form.

Concurrence (closed form and the general Wootters construction) is an
independent oracle for the PPT verdict.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchUndefined, InvalidState, NegativeEigenvalue, NumericalClamp, TraceViolation
from .numerics import DEFAULT_TOL, Tolerance, as_matrix, hermitian_eigenvalues, hermitian_eigh
from .states import XState, validate

__all__ = [
    "Branch",
    "Criterion",
    "Verdict",
    "PptSpectrum",
    "RealignmentBreakdown",
    "CriterionReport",
    "Check",
    "DerivationReport",
    "partial_transpose",
    "realign",
    "ppt_spectrum",
    "ppt_verdict",
    "realignment_breakdown",
    "ccn_verdict",
    "theorem1_threshold",
    "theorem1_verdict",
    "corollary1_threshold",
    "corollary1_verdict",
    "concurrence",
    "concurrence_report",
    "wootters_concurrence",
    "derivation_diagnostics",
    "all_reports",
]

_CLAMP_FLOOR = -1e-12
_SQRT2 = math.sqrt(2.0)


def _num_out(v: float):
    # JSON has no NaN; undefined values travel as null.
    return None if math.isnan(v) else v


def _num_in(v) -> float:
    return math.nan if v is None else float(v)


class Branch(str, enum.Enum):
    NONE = "None"
    LAMBDA1_NEGATIVE = "Lambda1Negative"
    LAMBDA3_NEGATIVE = "Lambda3Negative"


class Criterion(str, enum.Enum):
    PPT = "PPT"
    CCN = "CCN"
    THEOREM1 = "Theorem1"
    COROLLARY1 = "Corollary1"
    CONCURRENCE = "Concurrence"


class Verdict(str, enum.Enum):
    ENTANGLED = "Entangled"
    SEPARABLE = "Separable"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class PptSpectrum:
    """Closed-form eigenvalues of the partial transpose.

    ``lambda1 <= lambda2`` come from the (1, 4) block and involve ``|r23|``;
    ``lambda3 <= lambda4`` come from the (2, 3) block and involve ``|r14|``.
    """

    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float
    negative_branch: Branch

    @property
    def values(self) -> tuple[float, float, float, float]:
        return (self.lambda1, self.lambda2, self.lambda3, self.lambda4)

    @property
    def minimum(self) -> float:
        return min(self.lambda1, self.lambda3)


@dataclass(frozen=True)
class RealignmentBreakdown:
    s1: float
    s2: float
    s3: float
    s4: float
    f: float
    g: float
    trace_norm: float

    @property
    def values(self) -> tuple[float, float, float, float]:
        return (self.s1, self.s2, self.s3, self.s4)


@dataclass(frozen=True)
class CriterionReport:
    criterion: Criterion
    verdict: Verdict
    lhs: float
    rhs: float
    margin: float
    branch: Branch

    @classmethod
    def build(cls, criterion, verdict, lhs, rhs, branch=Branch.NONE) -> CriterionReport:
        lhs, rhs = float(lhs), float(rhs)
        return cls(Criterion(criterion), Verdict(verdict), lhs, rhs, lhs - rhs, Branch(branch))

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "verdict": self.verdict.value,
            "lhs": _num_out(self.lhs),
            "rhs": _num_out(self.rhs),
            "margin": _num_out(self.margin),
            "branch": self.branch.value,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> CriterionReport:
        return cls(
            Criterion(obj["criterion"]),
            Verdict(obj["verdict"]),
            _num_in(obj["lhs"]),
            _num_in(obj["rhs"]),
            _num_in(obj["margin"]),
            Branch(obj["branch"]),
        )


@dataclass(frozen=True)
class Check:
    """One inequality ``lhs >= rhs`` (or ``lhs <= rhs`` for the product bound)."""

    eq: str
    lhs: float
    rhs: float
    holds: bool
    applicable: bool = True

    def to_dict(self) -> dict:
        return {
            "eq": self.eq,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "applicable": self.applicable,
        }


@dataclass(frozen=True)
class DerivationReport:
    P: float
    Q: float
    S: float
    branch: Branch
    checks: list[Check] = field(default_factory=list)

    def check(self, eq: str) -> Check:
        for c in self.checks:
            if c.eq == eq:
                return c
        raise KeyError(eq)

    @property
    def failed(self) -> list[str]:
        return [c.eq for c in self.checks if not c.holds]

    def to_dict(self) -> dict:
        return {
            "P": self.P,
            "Q": self.Q,
            "S": self.S,
            "branch": self.branch.value,
            "checks": [c.to_dict() for c in self.checks],
        }


# ---------------------------------------------------------------------------
# Matrix operations


def partial_transpose(m) -> np.ndarray:
    """Transpose every 2x2 block of a 4x4 matrix in place (transpose on qubit B)."""
    a = as_matrix(m)
    return a.reshape(a.shape[:-2] + (2, 2, 2, 2)).swapaxes(-1, -3).reshape(a.shape)


def realign(m) -> np.ndarray:
    """Realignment: row ``2i + j`` is the row-stacked ``(i, j)`` block of ``m``."""
    a = as_matrix(m)
    return a.reshape(a.shape[:-2] + (2, 2, 2, 2)).swapaxes(-2, -3).reshape(a.shape)


# ---------------------------------------------------------------------------
# Closed forms


def _require_valid(s: XState, tol: Tolerance) -> None:
    try:
        validate(s, tol)
    except (TraceViolation, NegativeEigenvalue) as exc:
        raise InvalidState(str(exc)) from exc


def _branch(s: XState, tol: Tolerance) -> Branch:
    gap3 = abs(s.rho14) ** 2 - s.rho22 * s.rho33
    gap1 = abs(s.rho23) ** 2 - s.rho11 * s.rho44
    neg3 = gap3 > tol.eps_psd
    neg1 = gap1 > tol.eps_psd
    if neg3 and neg1:
        # Only reachable inside the tolerance band of a valid state.
        return Branch.LAMBDA3_NEGATIVE if gap3 >= gap1 else Branch.LAMBDA1_NEGATIVE
    if neg3:
        return Branch.LAMBDA3_NEGATIVE
    if neg1:
        return Branch.LAMBDA1_NEGATIVE
    return Branch.NONE


def ppt_spectrum(s: XState, tol: Tolerance = DEFAULT_TOL) -> PptSpectrum:
    _require_valid(s, tol)
    d1 = math.sqrt((s.rho11 - s.rho44) ** 2 + 4 * abs(s.rho23) ** 2)
    d2 = math.sqrt((s.rho22 - s.rho33) ** 2 + 4 * abs(s.rho14) ** 2)
    a = s.rho11 + s.rho44
    b = s.rho22 + s.rho33
    return PptSpectrum(
        0.5 * (a - d1), 0.5 * (a + d1), 0.5 * (b - d2), 0.5 * (b + d2), _branch(s, tol)
    )


def ppt_verdict(s: XState, tol: Tolerance = DEFAULT_TOL) -> CriterionReport:
    """Exact two-qubit verdict. ``lhs``/``rhs`` are the coherence-squared vs population product."""
    spec = ppt_spectrum(s, tol)
    pair3 = (abs(s.rho14) ** 2, s.rho22 * s.rho33)
    pair1 = (abs(s.rho23) ** 2, s.rho11 * s.rho44)
    if spec.negative_branch is Branch.LAMBDA3_NEGATIVE:
        lhs, rhs = pair3
    elif spec.negative_branch is Branch.LAMBDA1_NEGATIVE:
        lhs, rhs = pair1
    else:
        lhs, rhs = max(pair3, pair1, key=lambda p: p[0] - p[1])
    verdict = Verdict.SEPARABLE if spec.negative_branch is Branch.NONE else Verdict.ENTANGLED
    return CriterionReport.build(Criterion.PPT, verdict, lhs, rhs, spec.negative_branch)


def _clamped_sqrt(value: float, what: str) -> float:
    if value < 0.0:
        if value < _CLAMP_FLOOR:
            raise FloatingPointError(f"{what} radicand {value:.3e} is negative beyond rounding")
        warnings.warn(f"clamped {what} radicand {value:.3e} to zero", NumericalClamp, stacklevel=3)
        return 0.0
    return math.sqrt(value)


def _block_singular_values(total: float, det: float, what: str) -> tuple[float, float]:
    """Singular values of a 2x2 block from its squared Frobenius norm and |det|.

    The larger value follows ``sqrt((t + sqrt((t - 2d)(t + 2d))) / 2)``; the
    smaller is taken as ``|d| / s_max``, the same quantity without the
    cancellation in ``t - sqrt(...)``.
    """
    inner = _clamped_sqrt((total - 2 * det) * (total + 2 * det), what)
    big = math.sqrt(0.5 * (total + inner))
    small = abs(det) / big if big > 0.0 else 0.0
    return big, small


def realignment_breakdown(s: XState, tol: Tolerance = DEFAULT_TOL) -> RealignmentBreakdown:
    _require_valid(s, tol)
    a2, b2 = abs(s.rho14) ** 2, abs(s.rho23) ** 2
    f = s.rho11**2 + s.rho22**2 + s.rho33**2 + s.rho44**2
    g = 2 * a2 + 2 * b2
    s1, s2 = _block_singular_values(f, s.rho11 * s.rho44 - s.rho22 * s.rho33, "population block")
    s3, s4 = _block_singular_values(g, a2 - b2, "coherence block")
    return RealignmentBreakdown(s1, s2, s3, s4, f, g, s1 + s2 + s3 + s4)


def ccn_verdict(s: XState, tol: Tolerance = DEFAULT_TOL) -> CriterionReport:
    norm = realignment_breakdown(s, tol).trace_norm
    verdict = Verdict.ENTANGLED if norm > 1.0 + tol.eps_psd else Verdict.SEPARABLE
    return CriterionReport.build(Criterion.CCN, verdict, norm, 1.0, _branch(s, tol))


def _fourth_root(product: float, tol: Tolerance) -> float:
    if product < 0.0:
        if product < -tol.eps_psd:
            raise ValueError(f"eigenvalue product {product:.3e} is negative; branch is inconsistent")
        return 0.0
    return math.sqrt(math.sqrt(product))


def theorem1_threshold(spec: PptSpectrum, tol: Tolerance = DEFAULT_TOL) -> float:
    """Right-hand side of the modified realignment bound in eigenvalue form."""
    if spec.negative_branch is Branch.LAMBDA3_NEGATIVE:
        return 2 * _fourth_root(spec.lambda1 * spec.lambda2, tol) * math.sqrt(spec.lambda3 + spec.lambda4)
    if spec.negative_branch is Branch.LAMBDA1_NEGATIVE:
        return 2 * _fourth_root(spec.lambda3 * spec.lambda4, tol) * math.sqrt(spec.lambda1 + spec.lambda2)
    raise BranchUndefined("no negative partially transposed eigenvalue; threshold undefined")


def corollary1_threshold(s: XState, branch: Branch, tol: Tolerance = DEFAULT_TOL) -> float:
    """The same bound written directly in the matrix elements."""
    branch = Branch(branch)
    if branch is Branch.LAMBDA3_NEGATIVE:
        delta = math.sqrt((s.rho11 - s.rho44) ** 2 + 4 * abs(s.rho23) ** 2)
        half = 0.5 * (s.rho11 + s.rho44)
        product = (half - 0.5 * delta) * (half + 0.5 * delta)
        return 2 * _fourth_root(product, tol) * math.sqrt(s.rho22 + s.rho33)
    if branch is Branch.LAMBDA1_NEGATIVE:
        delta = math.sqrt((s.rho22 - s.rho33) ** 2 + 4 * abs(s.rho14) ** 2)
        half = 0.5 * (s.rho22 + s.rho33)
        product = (half - 0.5 * delta) * (half + 0.5 * delta)
        return 2 * _fourth_root(product, tol) * math.sqrt(s.rho11 + s.rho44)
    raise BranchUndefined("no negative partially transposed eigenvalue; threshold undefined")


def _bound_verdict(criterion, norm, threshold, branch, tol) -> CriterionReport:
    if branch is Branch.NONE:
        return CriterionReport(criterion, Verdict.NOT_APPLICABLE, norm, math.nan, math.nan, branch)
    verdict = Verdict.ENTANGLED if norm >= threshold - tol.eps_psd else Verdict.SEPARABLE
    return CriterionReport.build(criterion, verdict, norm, threshold, branch)


def theorem1_verdict(s: XState, tol: Tolerance = DEFAULT_TOL) -> CriterionReport:
    """Modified realignment verdict.

    Returns ``NotApplicable`` (with ``rhs`` and ``margin`` NaN) when the
    partial transpose has no negative eigenvalue, since the bound is only
    defined once a negative eigenvalue has been identified.
    """
    spec = ppt_spectrum(s, tol)
    norm = realignment_breakdown(s, tol).trace_norm
    branch = spec.negative_branch
    threshold = math.nan if branch is Branch.NONE else theorem1_threshold(spec, tol)
    return _bound_verdict(Criterion.THEOREM1, norm, threshold, branch, tol)


def corollary1_verdict(s: XState, tol: Tolerance = DEFAULT_TOL) -> CriterionReport:
    branch = ppt_spectrum(s, tol).negative_branch
    norm = realignment_breakdown(s, tol).trace_norm
    threshold = math.nan if branch is Branch.NONE else corollary1_threshold(s, branch, tol)
    return _bound_verdict(Criterion.COROLLARY1, norm, threshold, branch, tol)


def concurrence(s: XState, tol: Tolerance = DEFAULT_TOL) -> float:
    _require_valid(s, tol)
    c14 = abs(s.rho14) - math.sqrt(max(s.rho22 * s.rho33, 0.0))
    c23 = abs(s.rho23) - math.sqrt(max(s.rho11 * s.rho44, 0.0))
    return 2 * max(0.0, c14, c23)


def concurrence_report(s: XState, tol: Tolerance = DEFAULT_TOL) -> CriterionReport:
    c = concurrence(s, tol)
    verdict = Verdict.ENTANGLED if c > tol.eps_psd else Verdict.SEPARABLE
    return CriterionReport.build(Criterion.CONCURRENCE, verdict, c, 0.0, _branch(s, tol))


_SIGMA_YY = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))


def wootters_concurrence(m, tol: Tolerance = DEFAULT_TOL) -> float:
    """Concurrence of an arbitrary two-qubit density matrix.

    Uses the decreasing square roots ``l_i`` of the eigenvalues of
    ``sqrt(rho) rho~ sqrt(rho)`` with ``rho~ = (Y x Y) rho* (Y x Y)``, and
    returns ``max(0, l_1 - l_2 - l_3 - l_4)``.
    """
    w, v = hermitian_eigh(m, tol)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    flipped = _SIGMA_YY @ np.conj(as_matrix(m)) @ _SIGMA_YY
    inner = root @ flipped @ root
    mu = hermitian_eigenvalues(0.5 * (inner + inner.conj().T), tol)
    lam = np.sqrt(np.clip(mu, 0.0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


# ---------------------------------------------------------------------------
# Derivation chain


def derivation_diagnostics(s: XState, tol: Tolerance = DEFAULT_TOL) -> DerivationReport:
    """Evaluate each step of the chain that leads to the modified realignment bound.

    The chain is written for a negative third eigenvalue. States whose first
    eigenvalue is negative are bit-flipped on qubit B first, which swaps the
    eigenvalue pairs and leaves every singular value unchanged. Checks that
    need a negative eigenvalue are still evaluated when none exists but are
    flagged ``applicable=False``.
    """
    branch = ppt_spectrum(s, tol).negative_branch
    work = s.flip_b() if branch is Branch.LAMBDA1_NEGATIVE else s
    spec = ppt_spectrum(work, tol)
    rb = realignment_breakdown(work, tol)
    P, Q, S = rb.s1 + rb.s2, rb.s3 + rb.s4, rb.trace_norm
    l1, l2, l3, l4 = spec.values
    slack = tol.eps_psd
    has_branch = branch is not Branch.NONE

    def ge(eq, lhs, rhs, applicable=True):
        return Check(eq, lhs, rhs, lhs >= rhs - slack, applicable)

    gm12 = math.sqrt(max(l1 * l2, 0.0))
    checks = [
        ge("17", P, math.sqrt(rb.f)),
        ge("20", P, (work.rho11 + work.rho44) / _SQRT2),
        ge("21", Q, (work.rho22 + work.rho33) / _SQRT2),
        ge("22", P, (l1 + l2) / _SQRT2, has_branch),
        ge("22-amgm", (l1 + l2) / _SQRT2, _SQRT2 * gm12, has_branch),
        ge("23", Q, (l3 + l4) / _SQRT2, has_branch),
        ge("24", P * Q, gm12 * (l3 + l4), has_branch),
        Check("25", P * Q, S * S / 4, P * Q <= S * S / 4 + slack),
        ge("26", S, 2 * math.sqrt(gm12) * math.sqrt(max(l3 + l4, 0.0)), has_branch),
    ]
    return DerivationReport(P, Q, S, branch, checks)


def all_reports(s: XState, tol: Tolerance = DEFAULT_TOL) -> list[CriterionReport]:
    """PPT, CCN, Theorem1, Corollary1 and Concurrence reports for one state."""
    return [
        ppt_verdict(s, tol),
        ccn_verdict(s, tol),
        theorem1_verdict(s, tol),
        corollary1_verdict(s, tol),
        concurrence_report(s, tol),
    ]
