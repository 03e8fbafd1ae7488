"""Decision pipeline: cheap closed-form rules first, then the exact circulant
test, then the SDP. Every decision carries the certificate that justifies it.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .certificates import (
    VERIFY_TOL,
    Decision,
    certificate_to_json,
    make_circulant_witness,
    make_sum_ip_witness,
    verify_witness,
)
from .criteria import (
    BoundVerdict,
    Rule,
    build_lambda_certificate,
    closed_form_verdicts,
    decide_circulant_exact,
)
from .exceptions import ValidationError
from .gram import as_gram, circulant_profile, make_equiangular
from .linalg import eigvalsh_desc
from .sdp import ZERO_TOL, SolverConfig, decide_by_sdp

METHODS = ("auto", "bounds", "circulant", "sdp")
SDP = "SDP"


@dataclass
class AnalysisReport:
    n: int
    decision: Decision
    decided_by: str | None
    margins: dict
    boundary_rules: list = field(default_factory=list)
    sdp_value: float | None = None
    sdp_converged: bool | None = None
    sdp_iterations: int | None = None
    certificate: object | None = None
    timings: dict = field(default_factory=dict)

    @property
    def error_probability(self) -> float | None:
        return None if self.sdp_value is None else self.sdp_value / self.n

    def to_json(self, timings: bool = True) -> dict:
        out = {
            "n": self.n,
            "decision": self.decision.value,
            "decided_by": self.decided_by,
            "margins": dict(self.margins),
            "boundary_rules": list(self.boundary_rules),
            "sdp_value": self.sdp_value,
            "error_probability": self.error_probability,
            "sdp_converged": self.sdp_converged,
            "sdp_iterations": self.sdp_iterations,
            "certificate": None if self.certificate is None else certificate_to_json(self.certificate),
        }
        if timings:
            out["timings"] = dict(self.timings)
        return out


def _certificate_for(g, verdict: BoundVerdict, profile=None):
    """The certificate backing a definitive closed-form verdict, or None."""
    if verdict.antidistinguishable:
        lam = profile.eigenvalues if profile is not None else eigvalsh_desc(g)
        try:
            return build_lambda_certificate(lam)
        except ValidationError:
            return None
    if verdict.rule is Rule.CIRCULANT_EXACT:
        # tiny margins give witnesses too shallow to verify; leave those to the SDP
        w = make_circulant_witness(profile)
        return w if verify_witness(g, w).accepted else None
    return make_sum_ip_witness(g)


class _Clock:
    def __init__(self):
        self.timings = {}

    def stage(self, name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        self.timings[name] = round(1000 * (time.perf_counter() - t0), 3)
        return out


def analyze(
    g,
    method: str = "auto",
    cfg: SolverConfig | None = None,
    zero_tol: float = ZERO_TOL,
    tol: float = VERIFY_TOL,
) -> AnalysisReport:
    """Decide antidistinguishability of the states behind Gram matrix ``g``.

    ``auto`` stops at the first rule that fires with a margin above the
    floating-point boundary; ``bounds`` uses only the closed-form rules;
    ``circulant`` the exact circulant test (``g`` must be circulant); ``sdp``
    always runs the solver. All rule margins are recorded regardless.
    """
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}; expected one of {METHODS}")
    clock = _Clock()
    g = clock.stage("validate", as_gram, g)
    n = g.shape[0]
    verdicts = clock.stage("bounds", closed_form_verdicts, g)
    profile = clock.stage("circulant_profile", circulant_profile, g)
    if profile.is_circulant:
        verdicts.append(decide_circulant_exact(profile))
    elif method == "circulant":
        raise ValidationError(
            f"Gram matrix is not circulant (deviation {profile.deviation:.3e})"
        )
    margins = {v.rule.value: v.margin for v in verdicts}
    boundary = [v.rule.value for v in verdicts if v.boundary]

    def report(decision, decided_by, certificate=None, **extra):
        return AnalysisReport(
            n=n,
            decision=decision,
            decided_by=decided_by,
            margins=margins,
            boundary_rules=boundary,
            certificate=certificate,
            timings=clock.timings,
            **extra,
        )

    if method != "sdp":
        for v in verdicts:
            if method == "circulant" and v.rule is not Rule.CIRCULANT_EXACT:
                continue
            if v.antidistinguishable is None or v.boundary:
                continue
            circ = profile if v.rule is Rule.CIRCULANT_EXACT else None
            cert = clock.stage("certificate", _certificate_for, g, v, circ)
            if cert is None:
                continue
            decision = Decision.ANTIDISTINGUISHABLE if v.antidistinguishable else Decision.NOT_ANTIDISTINGUISHABLE
            return report(decision, v.rule.value, cert)
        if method != "auto":
            return report(Decision.BOUNDARY if boundary else Decision.UNDECIDED, None)

    res = clock.stage("sdp", decide_by_sdp, g, cfg, zero_tol, tol)
    decision = res.decision
    if decision is Decision.UNDECIDED and boundary:
        decision = Decision.BOUNDARY
    return report(
        decision,
        SDP if res.certificate is not None else None,
        res.certificate,
        sdp_value=res.solution.value,
        sdp_converged=res.solution.converged,
        sdp_iterations=res.solution.iterations,
    )


# --- parameter sweeps -------------------------------------------------------------


def thread_count(default: int | None = None) -> int:
    """Worker threads, capped by ``ANTIDIST_THREADS`` when set."""
    n = default or os.cpu_count() or 1
    env = os.environ.get("ANTIDIST_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ValidationError(f"ANTIDIST_THREADS must be an integer, got {env!r}") from exc
        if cap < 1:
            raise ValidationError("ANTIDIST_THREADS must be >= 1")
        n = min(n, cap)
    return max(1, n)


def gamma_grid(start: float, stop: float, step: float) -> list[float]:
    """``start, start + step, ...`` up to ``stop`` inclusive, rounded to 12 decimals."""
    if not step > 0:
        raise ValidationError(f"grid step must be positive, got {step}")
    if stop < start:
        raise ValidationError(f"empty grid: stop {stop} < start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


SWEEP_COLUMNS = ("n", "gamma", "sdp_value", "error_probability", "antidistinguishable", "converged")

_DECISION_CELL = {
    Decision.ANTIDISTINGUISHABLE: "true",
    Decision.NOT_ANTIDISTINGUISHABLE: "false",
    Decision.BOUNDARY: "boundary",
    Decision.UNDECIDED: "undecided",
}


def sweep_row(n: int, gamma: float, cfg: SolverConfig | None = None, zero_tol: float = ZERO_TOL) -> dict:
    res = decide_by_sdp(make_equiangular(n, gamma), cfg, zero_tol)
    value = res.solution.value
    return {
        "n": n,
        "gamma": gamma,
        "sdp_value": value,
        "error_probability": value / n,
        "antidistinguishable": _DECISION_CELL[res.decision],
        "converged": res.solution.converged,
    }


def sweep_equiangular(
    ns,
    gammas,
    cfg: SolverConfig | None = None,
    zero_tol: float = ZERO_TOL,
    threads: int | None = None,
) -> list[dict]:
    """One row per ``(n, gamma)`` in that order, solved in parallel."""
    jobs = [(int(n), float(gm)) for n in ns for gm in gammas]
    for n, _ in jobs:
        if n < 2:
            raise ValidationError("n must be >= 2")
    workers = thread_count(threads)
    if workers == 1:
        return [sweep_row(n, gm, cfg, zero_tol) for n, gm in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: sweep_row(*job, cfg, zero_tol), jobs))
