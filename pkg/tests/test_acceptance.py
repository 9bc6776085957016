"""Acceptance criteria, one test each, at their stated tolerances.

Every test appends a PASS/FAIL line to the session log, printed in the
"acceptance criteria" section of the terminal summary.
"""

import math
import time

import numpy as np
import pytest

from conftest import ENSEMBLE_SEED, ENSEMBLE_SIZE
from xrealign.audit import run_audit
from xrealign.criteria import Criterion, Verdict, partial_transpose, ppt_spectrum, realign, realignment_breakdown
from xrealign.numerics import hermitian_eigenvalues, singular_values
from xrealign.scanner import GridSpec, bisect_boundary, scan, threshold_curve
from xrealign.states import sample_x_states, to_matrix

PSD_BOUND = 0.229129
CCN_BOUND = 0.230739


def _log(log, number, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    log.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def ensemble_audit():
    start = time.perf_counter()
    summary = run_audit(ENSEMBLE_SIZE, ENSEMBLE_SEED)
    return summary, time.perf_counter() - start


def test_criterion_01_psd_bound(acceptance_log):
    start = time.perf_counter()
    b = bisect_boundary("rho1", "valid", "x", 0.0, 0.0, 0.25, iterations=40)
    elapsed = time.perf_counter() - start
    ok = abs(b.value - PSD_BOUND) <= 1e-5 and elapsed < 1.0
    _log(acceptance_log, 1, ok, f"validity edge x = {b.value:.8f} (exact {math.sqrt(0.0525):.8f}), {elapsed:.3f} s")
    assert ok


def test_criterion_02_ppt_boundary(acceptance_log):
    start = time.perf_counter()
    values = [bisect_boundary("rho1", "ppt", "y", x, 0.0, 0.25, iterations=40).value for x in (0.01, 0.1, 0.2, 0.229)]
    elapsed = time.perf_counter() - start
    worst = max(abs(v - PSD_BOUND) for v in values)
    ok = worst <= 1e-5 and elapsed < 1.0
    _log(acceptance_log, 2, ok, f"PPT edge y at x in (0.01, 0.1, 0.2, 0.229): max |dev| = {worst:.2e}, {elapsed:.3f} s")
    assert ok


def test_criterion_03_ccn_boundary(acceptance_log):
    start = time.perf_counter()
    b = bisect_boundary("rho1", "ccn", "y", 0.1, 0.1, 0.25, iterations=40)
    elapsed = time.perf_counter() - start
    ok = abs(b.value - CCN_BOUND) <= 1e-5 and elapsed < 1.0
    _log(acceptance_log, 3, ok, f"CCN edge y = {b.value:.8f} (exact {0.5 - math.sqrt(0.0725):.8f}), {elapsed:.3f} s")
    assert ok


def test_criterion_04_threshold_curve(acceptance_log):
    (_, f0), = threshold_curve("rho1", 1e-9, 1e-9, 1.0)
    values = [f for _, f in threshold_curve("rho1", 1e-3, 0.229, 1e-3)]
    decreasing = all(b < a for a, b in zip(values, values[1:]))
    ok = abs(f0 - 0.08430) <= 5e-5 and decreasing
    _log(acceptance_log, 4, ok, f"f(1e-9) = {f0:.8f}; strictly decreasing on {len(values)} points: {decreasing}")
    assert ok


def test_criterion_05_detection_gap(acceptance_log):
    records = scan("rho1", GridSpec(1e-4, 0.229, 0.2292, 0.2306, 1e-4))
    exceptions = [
        r.point
        for r in records
        if not (
            r.valid
            and r.verdict(Criterion.PPT) is Verdict.ENTANGLED
            and r.verdict(Criterion.CCN) is Verdict.SEPARABLE
            and r.verdict(Criterion.THEOREM1) is Verdict.ENTANGLED
        )
    ]
    ok = not exceptions and len(records) > 0
    _log(acceptance_log, 5, ok, f"{len(records)} grid points, {len(exceptions)} exceptions")
    assert ok, exceptions[:5]


def test_criterion_06_closed_form_vs_oracle(acceptance_log):
    start = time.perf_counter()
    states = sample_x_states(10_000, ENSEMBLE_SEED + 6)
    mats = np.array([to_matrix(s) for s in states])
    pt_oracle = hermitian_eigenvalues(partial_transpose(mats))
    sv_oracle = singular_values(realign(mats))
    pt_closed = np.sort(np.array([ppt_spectrum(s).values for s in states]), axis=-1)
    sv_closed = -np.sort(-np.array([realignment_breakdown(s).values for s in states]), axis=-1)
    elapsed = time.perf_counter() - start
    dev_pt = float(np.max(np.abs(pt_closed - pt_oracle)))
    dev_sv = float(np.max(np.abs(sv_closed - sv_oracle)))
    ok = max(dev_pt, dev_sv) <= 1e-9 and elapsed < 10.0
    _log(acceptance_log, 6, ok, f"max |dev| spectrum {dev_pt:.2e}, singular values {dev_sv:.2e}, {elapsed:.2f} s")
    assert ok


def test_criterion_07_concordance(acceptance_log, ensemble_audit):
    summary, elapsed = ensemble_audit
    ok = summary.concurrence_mismatches == 0 and summary.ccn_necessity_violations == 0 and elapsed < 60.0
    _log(
        acceptance_log,
        7,
        ok,
        f"{summary.samples} samples: {summary.concurrence_mismatches} PPT/concurrence disagreements, "
        f"{summary.ccn_necessity_violations} separable samples above 1 + 1e-10, audit {elapsed:.1f} s",
    )
    assert ok


def test_criterion_08_necessity_audit(acceptance_log, ensemble_audit):
    summary, _ = ensemble_audit
    again = run_audit(ENSEMBLE_SIZE, ENSEMBLE_SEED)
    reproducible = summary.to_json() == again.to_json() and summary.disagreements == again.disagreements
    dumps_complete = all("diag" in d["state"] and "threshold" in d for d in summary.disagreements)
    ok = reproducible and dumps_complete
    _log(
        acceptance_log,
        8,
        ok,
        f"{summary.ppt_entangled} PPT-entangled, {len(summary.disagreements)} violations (reported), "
        f"reproducible: {reproducible}",
    )
    assert ok


def test_criterion_09_corollary_identity(acceptance_log, ensemble_audit):
    summary, _ = ensemble_audit
    ok = summary.corollary_max_gap <= 1e-12
    _log(acceptance_log, 9, ok, f"max |corollary - theorem| = {summary.corollary_max_gap:.2e}")
    assert ok


def test_criterion_10_derivation_chain(acceptance_log, ensemble_audit):
    summary, _ = ensemble_audit
    required = ("17", "20", "21", "22", "24", "25", "26")
    failures = {eq: summary.derivation_failures.get(eq, 0) for eq in required}
    ok = not any(failures.values())
    detail = ", ".join(f"({eq}) {n}" for eq, n in failures.items())
    extra = ", ".join(
        f"({eq}) {summary.derivation_failures.get(eq, 0)}" for eq in ("22-amgm", "23")
    )
    _log(
        acceptance_log,
        10,
        ok,
        f"failures among {summary.ppt_entangled} PPT-entangled: {detail}; recorded only: {extra}",
    )
    assert ok, {eq: summary.derivation_examples.get(eq) for eq, n in failures.items() if n}
