"""Grid scans of two-parameter state families and boundary estimation."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .criteria import (
    Branch,
    Criterion,
    CriterionReport,
    Verdict,
    ccn_verdict,
    concurrence,
    corollary1_threshold,
    ppt_spectrum,
    ppt_verdict,
    realignment_breakdown,
    theorem1_verdict,
)
from .errors import DomainError, GridTooLarge, NoTransition, UnknownCriterion, UnknownFamily
from .numerics import DEFAULT_TOL, Tolerance
from .states import FamilyPoint, XState, is_valid, rho1_family

__all__ = [
    "Family",
    "FAMILIES",
    "register_family",
    "GridSpec",
    "ScanRecord",
    "Boundary",
    "RegionSummary",
    "CRITERIA",
    "scan",
    "records_to_csv",
    "write_csv",
    "boundary_estimate",
    "bisect_boundary",
    "region_summary",
    "threshold_curve",
]

MAX_STEPS_PER_AXIS = 10**7
CSV_COLUMNS = (
    "x",
    "y",
    "valid",
    "ppt_verdict",
    "ppt_min_eigenvalue",
    "ccn_trace_norm",
    "ccn_verdict",
    "thm1_threshold",
    "thm1_verdict",
    "concurrence",
)


@dataclass(frozen=True)
class Family:
    name: str
    build: Callable[[float, float], XState]
    # Branch assumed when the modified bound is evaluated on its own,
    # without the PPT pre-test deciding it.
    bound_branch: Branch


FAMILIES: dict[str, Family] = {}


def register_family(family: Family) -> None:
    FAMILIES[family.name] = family


register_family(Family("rho1", rho1_family, Branch.LAMBDA1_NEGATIVE))


def get_family(name: str) -> Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise UnknownFamily(f"unknown family {name!r}; known: {sorted(FAMILIES)}") from None


@dataclass(frozen=True)
class GridSpec:
    """Inclusive rectangular grid. ``x_min == x_max`` (or ``y``) scans a single line."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    step: float

    def __post_init__(self):
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ValueError(f"step must be positive, got {self.step!r}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError("grid bounds must satisfy min <= max on both axes")
        for lo, hi in ((self.x_min, self.x_max), (self.y_min, self.y_max)):
            if (hi - lo) / self.step > MAX_STEPS_PER_AXIS:
                raise GridTooLarge(
                    f"axis span {hi - lo!r} at step {self.step!r} exceeds {MAX_STEPS_PER_AXIS} steps"
                )

    @staticmethod
    def _axis(lo: float, hi: float, step: float) -> list[float]:
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + i * step for i in range(n)]

    @property
    def xs(self) -> list[float]:
        return self._axis(self.x_min, self.x_max, self.step)

    @property
    def ys(self) -> list[float]:
        return self._axis(self.y_min, self.y_max, self.step)

    def __len__(self) -> int:
        return len(self.xs) * len(self.ys)


@dataclass(frozen=True)
class ScanRecord:
    point: FamilyPoint
    valid: bool
    reports: dict[Criterion, CriterionReport] = field(default_factory=dict)
    concurrence: float = math.nan
    ppt_min_eigenvalue: float = math.nan
    bound_holds: bool | None = None

    def verdict(self, criterion: Criterion) -> Verdict:
        return self.reports[criterion].verdict


def evaluate_point(family: Family, x: float, y: float, tol: Tolerance = DEFAULT_TOL) -> ScanRecord:
    s = family.build(x, y)
    point = FamilyPoint(x, y)
    if not is_valid(s, tol):
        return ScanRecord(point, False)
    reports = {
        Criterion.PPT: ppt_verdict(s, tol),
        Criterion.CCN: ccn_verdict(s, tol),
        Criterion.THEOREM1: theorem1_verdict(s, tol),
    }
    norm = reports[Criterion.CCN].lhs
    return ScanRecord(
        point,
        True,
        reports,
        concurrence(s, tol),
        ppt_spectrum(s, tol).minimum,
        _bound_holds(family, s, norm, tol),
    )


def _bound_holds(family: Family, s: XState, norm: float, tol: Tolerance) -> bool | None:
    try:
        threshold = corollary1_threshold(s, family.bound_branch, tol)
    except ValueError:
        return None
    return norm >= threshold - tol.eps_psd


def _scan_row(args) -> list[ScanRecord]:
    name, x, ys, tol = args
    family = get_family(name)
    return [evaluate_point(family, x, y, tol) for y in ys]


def scan(
    family: str, grid: GridSpec, tol: Tolerance = DEFAULT_TOL, workers: int = 1
) -> list[ScanRecord]:
    """Classify every grid point; records come back row-major in x then y.

    ``workers > 1`` farms x-rows out to processes; the merged order is the
    same as the serial one.
    """
    get_family(family)
    xs, ys = grid.xs, grid.ys
    jobs = [(family, x, ys, tol) for x in xs]
    if workers <= 1 or len(xs) < 2:
        rows = map(_scan_row, jobs)
        return [r for row in rows for r in row]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(_scan_row, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [r for row in rows for r in row]


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return f"{v:.10g}"


def _csv_row(r: ScanRecord) -> list[str]:
    if not r.valid:
        return [_fmt(r.point.x), _fmt(r.point.y), "false"] + [""] * 7
    ppt = r.reports[Criterion.PPT]
    ccn = r.reports[Criterion.CCN]
    thm = r.reports[Criterion.THEOREM1]
    return [
        _fmt(r.point.x),
        _fmt(r.point.y),
        "true",
        ppt.verdict.value,
        _fmt(r.ppt_min_eigenvalue),
        _fmt(ccn.lhs),
        ccn.verdict.value,
        _fmt(thm.rhs),
        thm.verdict.value,
        _fmt(r.concurrence),
    ]


def records_to_csv(records: Iterable[ScanRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(_csv_row(r))
    return buf.getvalue()


def write_csv(records: Iterable[ScanRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))


# ---------------------------------------------------------------------------
# Boundaries

# Predicates usable for boundary estimation. "valid" tracks the physical
# region; "bound" is the modified realignment inequality evaluated with the
# family's branch and no PPT pre-test.
CRITERIA = ("valid", "ppt", "ccn", "thm1", "bound")


def _predicate(criterion: str) -> Callable[[ScanRecord], bool | None]:
    key = criterion.lower()
    if key == "valid":
        return lambda r: r.valid
    if key == "bound":
        return lambda r: r.bound_holds if r.valid else None
    lookup = {"ppt": Criterion.PPT, "ccn": Criterion.CCN, "thm1": Criterion.THEOREM1, "theorem1": Criterion.THEOREM1}
    if key not in lookup:
        raise UnknownCriterion(f"unknown criterion {criterion!r}; choose from {CRITERIA}")
    crit = lookup[key]
    return lambda r: (r.verdict(crit) is Verdict.ENTANGLED) if r.valid else None


@dataclass(frozen=True)
class Boundary:
    """Transition located between two adjacent grid points ``lo`` and ``hi``."""

    criterion: str
    axis: str
    fixed: float
    lo: float
    hi: float

    @property
    def value(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return abs(self.hi - self.lo)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "axis": self.axis,
            "fixed": self.fixed,
            "value": self.value,
            "bracket": [self.lo, self.hi],
        }


def boundary_estimate(
    records: Iterable[ScanRecord], criterion: str, axis: str, fixed: float, atol: float = 1e-12
) -> Boundary:
    """Bracket the first change of the criterion's verdict along ``axis``.

    Only records whose other coordinate equals ``fixed`` (within ``atol``)
    are used. Points where the predicate is undefined (non-physical points
    for verdict criteria) are skipped.
    """
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    pred = _predicate(criterion)
    other = "y" if axis == "x" else "x"
    line = sorted(
        (getattr(r.point, axis), pred(r))
        for r in records
        if abs(getattr(r.point, other) - fixed) <= atol
    )
    line = [(t, v) for t, v in line if v is not None]
    for (t0, v0), (t1, v1) in zip(line, line[1:]):
        if v0 != v1:
            return Boundary(criterion, axis, fixed, t0, t1)
    raise NoTransition(f"{criterion} verdict is constant along {axis} at {other}={fixed}")


def bisect_boundary(
    family: str,
    criterion: str,
    axis: str,
    fixed: float,
    lo: float,
    hi: float,
    iterations: int = 20,
    tol: Tolerance = DEFAULT_TOL,
) -> Boundary:
    """Refine a bracket by bisecting the verdict predicate ``iterations`` times.

    The predicate must differ at ``lo`` and ``hi``. Points where it is
    undefined (non-physical) are treated as ``False``.
    """
    fam = get_family(family)
    pred = _predicate(criterion)

    def at(t: float) -> bool:
        x, y = (t, fixed) if axis == "x" else (fixed, t)
        return bool(pred(evaluate_point(fam, x, y, tol)))

    p_lo, p_hi = at(lo), at(hi)
    if p_lo == p_hi:
        raise NoTransition(f"{criterion} verdict agrees at both ends of [{lo}, {hi}]")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if at(mid) == p_lo:
            lo = mid
        else:
            hi = mid
    return Boundary(criterion, axis, fixed, lo, hi)


@dataclass(frozen=True)
class RegionSummary:
    criterion: str
    boundary_estimates: list[Boundary]
    counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "counts": dict(self.counts),
            "boundary_estimates": [b.to_dict() for b in self.boundary_estimates],
        }


def region_summary(records: list[ScanRecord], criterion: str) -> RegionSummary:
    """Verdict counts over all records plus a boundary estimate on every grid line that has one.

    For ``"valid"`` physical points count as separable; for ``"bound"`` a
    satisfied inequality counts as entangled.
    """
    key = criterion.lower()
    counts = {"entangled": 0, "separable": 0, "invalid": 0, "not_applicable": 0}
    if key in ("valid", "bound"):
        pred = _predicate(key)
        for r in records:
            if not r.valid:
                counts["invalid"] += 1
            elif key == "valid" or pred(r):
                counts["entangled" if key == "bound" else "separable"] += 1
            else:
                counts["separable"] += 1
    else:
        crit = {"ppt": Criterion.PPT, "ccn": Criterion.CCN, "thm1": Criterion.THEOREM1}.get(key)
        if crit is None:
            raise UnknownCriterion(f"unknown criterion {criterion!r}; choose from {CRITERIA}")
        names = {
            Verdict.ENTANGLED: "entangled",
            Verdict.SEPARABLE: "separable",
            Verdict.NOT_APPLICABLE: "not_applicable",
        }
        for r in records:
            if r.valid:
                counts[names[r.verdict(crit)]] += 1
            else:
                counts["invalid"] += 1

    xs = sorted({r.point.x for r in records})
    ys = sorted({r.point.y for r in records})
    estimates = []
    for axis, fixed_values in (("y", xs), ("x", ys)):
        for fixed in fixed_values:
            try:
                estimates.append(boundary_estimate(records, criterion, axis, fixed))
            except NoTransition:
                pass
    return RegionSummary(criterion, estimates, counts)


def threshold_curve(family: str, x_min: float, x_max: float, step: float) -> list[tuple[float, float]]:
    """Smallest ``y`` satisfying the modified bound at each ``x``, in the region ``y > x``.

    For a family whose realigned trace norm is ``2y + S_diag`` when
    ``y > x``, the bound reads ``2y + S_diag >= T(x)`` and the curve is
    ``(T(x) - S_diag) / 2``. ``S_diag`` is the population-block part of the
    trace norm; ``T`` is the matrix-element threshold for the family's
    branch.
    """
    if family != "rho1":
        raise UnknownFamily(f"threshold curve is only defined for 'rho1', got {family!r}")
    fam = get_family(family)
    if max(abs(x_min), abs(x_max)) >= 0.25:
        raise DomainError(f"threshold curve needs |x| < 0.25, got [{x_min!r}, {x_max!r}]")
    # The population block of the realigned matrix does not involve the coherences.
    rb = realignment_breakdown(fam.build(0.0, 0.0))
    s_diag = rb.s1 + rb.s2
    out = []
    for x in GridSpec._axis(x_min, x_max, step):
        threshold = corollary1_threshold(fam.build(x, 0.0), fam.bound_branch)
        out.append((x, 0.5 * (threshold - s_diag)))
    return out
