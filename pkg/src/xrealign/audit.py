"""Random-ensemble audit comparing every criterion against the PPT ground truth."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .criteria import (
    Branch,
    Verdict,
    ccn_verdict,
    concurrence,
    corollary1_threshold,
    derivation_diagnostics,
    ppt_spectrum,
    realignment_breakdown,
    theorem1_threshold,
)
from .numerics import DEFAULT_TOL, Tolerance
from .states import sample_x_states, state_to_dict

__all__ = ["AuditSummary", "run_audit"]


@dataclass
class AuditSummary:
    samples: int
    seed: int
    ppt_entangled: int = 0
    ccn_detected: int = 0
    thm1_detected: int = 0
    ccn_missed_but_thm1_caught: int = 0
    # PPT-entangled samples where the modified bound fails.
    disagreements: list[dict] = field(default_factory=list)
    # PPT verdict vs concurrence > eps_psd.
    concurrence_mismatches: int = 0
    # PPT-separable samples with realigned trace norm above 1 + eps_psd.
    ccn_necessity_violations: int = 0
    multiple_negative: int = 0
    corollary_max_gap: float = 0.0
    # Per chain step: failures among PPT-entangled samples.
    derivation_failures: dict[str, int] = field(default_factory=dict)
    derivation_examples: dict[str, dict] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "ppt_entangled": self.ppt_entangled,
            "ccn_detected": self.ccn_detected,
            "thm1_detected": self.thm1_detected,
            "ccn_missed_but_thm1_caught": self.ccn_missed_but_thm1_caught,
            "disagreements": len(self.disagreements),
            "concurrence_mismatches": self.concurrence_mismatches,
            "ccn_necessity_violations": self.ccn_necessity_violations,
            "multiple_negative": self.multiple_negative,
            "corollary_max_gap": self.corollary_max_gap,
            "derivation_failures": dict(sorted(self.derivation_failures.items())),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _dump(s, **extra) -> dict:
    return {"state": state_to_dict(s), **extra}


def run_audit(samples: int, seed: int, tol: Tolerance = DEFAULT_TOL) -> AuditSummary:
    """Classify ``samples`` seeded random X-states and tally agreement with PPT."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    summary = AuditSummary(samples, seed)
    failures: Counter[str] = Counter()
    for index, s in enumerate(sample_x_states(samples, seed)):
        spec = ppt_spectrum(s, tol)
        norm = realignment_breakdown(s, tol).trace_norm
        ccn = ccn_verdict(s, tol).verdict is Verdict.ENTANGLED
        entangled = spec.negative_branch is not Branch.NONE
        if (spec.lambda1 < -tol.eps_psd) and (spec.lambda3 < -tol.eps_psd):
            summary.multiple_negative += 1
        if entangled != (concurrence(s, tol) > tol.eps_psd):
            summary.concurrence_mismatches += 1
        summary.ccn_detected += ccn

        if not entangled:
            if norm > 1.0 + tol.eps_psd:
                summary.ccn_necessity_violations += 1
            continue

        summary.ppt_entangled += 1
        threshold = theorem1_threshold(spec, tol)
        gap = abs(corollary1_threshold(s, spec.negative_branch, tol) - threshold)
        summary.corollary_max_gap = max(summary.corollary_max_gap, gap)
        detected = norm >= threshold - tol.eps_psd
        if detected:
            summary.thm1_detected += 1
            if not ccn:
                summary.ccn_missed_but_thm1_caught += 1
        else:
            summary.disagreements.append(
                _dump(s, index=index, trace_norm=norm, threshold=threshold, margin=norm - threshold)
            )

        report = derivation_diagnostics(s, tol)
        for check in report.checks:
            if not check.holds:
                failures[check.eq] += 1
                if check.eq not in summary.derivation_examples:
                    summary.derivation_examples[check.eq] = _dump(
                        s, index=index, lhs=check.lhs, rhs=check.rhs
                    )
    summary.derivation_failures = dict(failures)
    return summary
