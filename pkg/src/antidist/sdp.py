"""The state-exclusion SDP in Gram form, solved by an operator splitting method.

Primal: minimize ``sum_i <i|F_i|i>`` over PSD ``F_0..F_{n-1}`` with
``sum_i F_i = G``. Dual: maximize ``Tr(X G)`` subject to ``X <= |i><i|`` for
every ``i``. The optimal value divided by ``n`` is the smallest error
probability of state exclusion, and it is zero exactly when the states are
antidistinguishable.

The solver is ADMM on the consensus form: one step projects every block onto
the PSD cone, the other projects onto ``{sum F_i = G}`` with the linear
objective folded in. Both projections are exact. Blocks are expressed in an
orthonormal basis of ``range(G)``: every feasible ``F_i`` lives there, and
dropping the null space makes the dual attained even for singular ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .certificates import (
    VERIFY_TOL,
    Decision,
    IncoherenceDecomposition,
    LocallyPsdWitness,
    round_decomposition,
    round_witness,
)
from .exceptions import CertificateError, ValidationError
from .gram import CIRCULANT_TOL, StateSet, as_gram, gram_from_states
from .linalg import eig_hermitian, project_psd_stack, pseudoinverse, shift_deviation

RANK_TOL = 1e-10
ZERO_TOL = 1e-6
CHECK_EVERY = 10
ADAPT_EVERY = 100
RHO_MIN, RHO_MAX = 1e-4, 1e4


@dataclass(frozen=True)
class SolverConfig:
    """ADMM parameters.

    ``adaptive_rho`` rebalances the step size when the primal and dual
    residuals drift more than a factor of ten apart, and shrinks it when the
    primal is feasible but the duality gap stays open.
    """

    step_rho: float = 1.0
    max_iter: int = 50000
    eps_abs: float = 1e-9
    eps_rel: float = 1e-7
    over_relaxation: float = 1.6
    adaptive_rho: bool = True

    def __post_init__(self):
        if not self.step_rho > 0:
            raise ValidationError(f"step_rho must be positive, got {self.step_rho}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValidationError(f"max_iter must be a positive integer, got {self.max_iter}")
        if not (self.eps_abs > 0 and self.eps_rel > 0):
            raise ValidationError("eps_abs and eps_rel must be positive")
        if self.eps_abs > self.eps_rel:
            raise ValidationError(f"eps_abs={self.eps_abs} exceeds eps_rel={self.eps_rel}")
        if not 1.0 <= self.over_relaxation <= 1.8:
            raise ValidationError(f"over_relaxation must lie in [1, 1.8], got {self.over_relaxation}")


@dataclass(frozen=True)
class SdpSolution:
    """Solver output.

    ``dual`` is a dual-feasible ``X`` (shifted so every ``X - |i><i|`` is
    negative semidefinite); ``dual_bound = Tr(X G)`` is therefore a valid
    lower bound on the optimum. ``dual_residual`` is the size of that shift.
    """

    value: float
    blocks: np.ndarray
    dual: np.ndarray
    dual_bound: float
    primal_residual: float
    dual_residual: float
    iterations: int
    converged: bool

    @property
    def n(self) -> int:
        return self.blocks.shape[0]

    @property
    def error_probability(self) -> float:
        return self.value / self.n

    @property
    def gap(self) -> float:
        return self.value - self.dual_bound


@dataclass(frozen=True)
class Povm:
    """Effects ``M_0..M_{n-1}`` on ``C^d`` stacked as an ``(n, d, d)`` array."""

    effects: np.ndarray

    def __post_init__(self):
        m = np.array(self.effects, dtype=complex)
        if m.ndim != 3 or m.shape[1] != m.shape[2]:
            raise ValidationError(f"effects must have shape (n, d, d), got {m.shape}")
        object.__setattr__(self, "effects", m)

    @property
    def n(self) -> int:
        return self.effects.shape[0]

    @property
    def d(self) -> int:
        return self.effects.shape[1]

    def completeness_error(self) -> float:
        return float(np.abs(self.effects.sum(axis=0) - np.eye(self.d)).max())

    def min_eig(self) -> float:
        herm = 0.5 * (self.effects + self.effects.conj().transpose(0, 2, 1))
        return float(np.linalg.eigvalsh(herm).min())

    def exclusion_errors(self, s: StateSet) -> np.ndarray:
        """``<psi_i|M_i|psi_i>`` for every ``i``."""
        w = s.vectors
        return np.einsum("ai,iab,bi->i", w.conj(), self.effects, w).real


Monitor = Callable[[int, float, float, float], bool]


def _range_basis(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    eigs = eig_hermitian(g)
    lam = eigs.eigenvalues
    keep = lam > RANK_TOL * max(float(lam[0]), 1e-300)
    return eigs.eigenvectors[:, keep], lam[keep]


def _lift_dual(g: np.ndarray, q: np.ndarray, x_r: np.ndarray) -> tuple[np.ndarray, float]:
    """Extend a reduced dual to ``C^n`` and shift it to feasibility.

    The null-space part ``-t (I - Q Q*)`` costs only ``t`` times the
    discarded eigenvalue mass of ``G``; ``t`` is picked from a fixed grid to
    give the best bound ``Tr(X G)`` after the feasibility shift.
    """
    n = q.shape[0]
    eye = np.eye(n)
    x0 = q @ x_r @ q.conj().T
    x0 = 0.5 * (x0 + x0.conj().T)
    units = eye[:, :, None] * eye[:, None, :]
    if q.shape[1] == n:
        candidates = [x0]
    else:
        null = eye - q @ q.conj().T
        candidates = [x0] + [x0 - t * null for t in np.geomspace(1.0, 1e8, 33)]
    best, best_shift, best_bound = None, 0.0, -np.inf
    for x in candidates:
        shift = max(0.0, float(np.linalg.eigvalsh(x[None] - units).max()))
        bound = float(np.trace(x @ g).real) - shift * n
        if bound > best_bound:
            best, best_shift, best_bound = x, shift, bound
    return best - best_shift * eye, best_shift


def solve_exclusion_sdp(g, cfg: SolverConfig | None = None, monitor: Monitor | None = None) -> SdpSolution:
    """Solve the exclusion SDP for Gram matrix ``g``.

    Stops once ``||sum F_i - G||_F <= eps_abs + eps_rel ||G||_F`` and the
    primal value and a feasible dual bound agree to
    ``10 (eps_abs + eps_rel |value|)``. Otherwise returns the iterate with
    the smallest combined residual and ``converged=False``. ``monitor`` is
    called at every check with ``(iteration, value, dual_bound,
    primal_residual)`` and may return True to stop early.
    """
    cfg = cfg or SolverConfig()
    g = as_gram(g)
    n = g.shape[0]
    q, lam = _range_basis(g)
    r = lam.size
    ell = np.diag(lam).astype(complex)
    # objective matrices Q* |i><i| Q in the reduced basis
    c = np.einsum("ia,ib->iab", q.conj(), q)
    eye_r = np.eye(r)
    rho = cfg.step_rho
    alpha = cfg.over_relaxation
    gnorm = float(np.linalg.norm(g))
    lam_sum = float(lam.sum())
    feas_tol = cfg.eps_abs + cfg.eps_rel * gnorm

    z = np.repeat(ell[None] / n, n, axis=0)
    u = np.zeros_like(z)
    best = None
    it = 0
    converged = False
    for it in range(1, cfg.max_iter + 1):
        v = z - u
        w = v - c / rho
        f = w - (w.sum(axis=0) - ell) / n
        fh = alpha * f + (1 - alpha) * z
        z_prev = z
        z = project_psd_stack(fh + u)
        u = u + fh - z
        if it % CHECK_EVERY and it != cfg.max_iter:
            continue
        x_r = (eye_r - rho * (v.sum(axis=0) - ell)) / n
        value = float(np.einsum("iab,iba->", c, z).real)
        pres = float(np.linalg.norm(z.sum(axis=0) - ell))
        shift = max(0.0, float(np.linalg.eigvalsh(x_r[None] - c).max()))
        dual_bound = float(np.trace(x_r @ ell).real) - shift * lam_sum
        gap = abs(value - dual_bound)
        gap_tol = 10 * (cfg.eps_abs + cfg.eps_rel * abs(value))
        score = max(pres / feas_tol, gap / gap_tol)
        if best is None or score <= best[0]:
            best = (score, it, z.copy(), x_r)
        if pres <= feas_tol and gap <= gap_tol:
            # confirm with the full-space bound that is actually returned
            x, _ = _lift_dual(g, q, x_r)
            if value - float(np.trace(x @ g).real) <= gap_tol:
                converged = True
                break
        if monitor is not None and monitor(it, value, dual_bound, pres):
            break
        if cfg.adaptive_rho:
            pr = np.linalg.norm(f - z)
            dr = rho * np.linalg.norm(z - z_prev)
            if pr > 10 * dr and rho < RHO_MAX:
                rho *= 2.0
                u /= 2.0
            elif (dr > 10 * pr or (it % ADAPT_EVERY == 0 and pres <= feas_tol)) and rho > RHO_MIN:
                # a feasible primal with an open gap means the dual is lagging
                rho /= 2.0
                u *= 2.0

    _, best_it, z, x_r = best
    blocks = np.einsum("ab,ibc,dc->iad", q, z, q.conj())
    blocks = 0.5 * (blocks + blocks.conj().transpose(0, 2, 1))
    value = float(sum(blocks[i, i, i].real for i in range(n)))
    x, shift = _lift_dual(g, q, x_r)
    return SdpSolution(
        value=value,
        blocks=blocks,
        dual=x,
        dual_bound=float(np.trace(x @ g).real),
        primal_residual=float(np.linalg.norm(blocks.sum(axis=0) - g)),
        dual_residual=shift,
        iterations=it if converged else best_it,
        converged=converged,
    )


@dataclass(frozen=True)
class SdpDecision:
    decision: Decision
    certificate: IncoherenceDecomposition | LocallyPsdWitness | None
    solution: SdpSolution
    diagnostics: dict = field(default_factory=dict)


def decide_by_sdp(
    g,
    cfg: SolverConfig | None = None,
    zero_tol: float = ZERO_TOL,
    tol: float = VERIFY_TOL,
    monitor: Monitor | None = None,
) -> SdpDecision:
    """Solve, then let a verified certificate decide.

    The solver value only picks which rounding to try first: the blocks
    when ``value <= zero_tol``, the negated dual otherwise. If neither
    certificate verifies the result is ``BOUNDARY`` for a converged value
    within ``100 zero_tol`` of zero and ``UNDECIDED`` otherwise.
    """
    g = as_gram(g)
    sol = solve_exclusion_sdp(g, cfg, monitor)
    circ = shift_deviation(g) <= CIRCULANT_TOL

    def try_decomposition():
        return round_decomposition(g, sol.blocks, tol)

    def try_witness():
        return round_witness(g, -sol.dual, circulant=circ, tol=tol)

    attempts = [try_decomposition, try_witness]
    if sol.value > zero_tol:
        attempts.reverse()
    failures = {}
    for attempt in attempts:
        try:
            cert = attempt()
        except CertificateError as exc:
            failures[attempt.__name__] = str(exc)
            continue
        decision = (
            Decision.ANTIDISTINGUISHABLE
            if isinstance(cert, IncoherenceDecomposition)
            else Decision.NOT_ANTIDISTINGUISHABLE
        )
        return SdpDecision(decision, cert, sol, {"failures": failures})
    near_zero = sol.converged and sol.value <= 100 * zero_tol
    decision = Decision.BOUNDARY if near_zero else Decision.UNDECIDED
    return SdpDecision(decision, None, sol, {"failures": failures})


def reconstruct_povm(s: StateSet, blocks, tol: float = VERIFY_TOL) -> Povm:
    """``M_i = (W^+)* F_i W^+ + (I - W W^+)/n`` for ``W`` the state matrix of ``s``."""
    w = s.vectors
    n = s.n
    f = np.asarray(blocks, dtype=complex)
    if f.shape != (n, n, n):
        raise ValidationError(f"blocks have shape {f.shape}, expected ({n}, {n}, {n})")
    g = gram_from_states(s)
    resid = float(np.linalg.norm(f.sum(axis=0) - g))
    if resid > tol * n:
        raise ValidationError(f"blocks do not sum to the Gram matrix (residual {resid:.3e})")
    herm = 0.5 * (f + f.conj().transpose(0, 2, 1))
    if float(np.linalg.eigvalsh(herm).min()) < -tol:
        raise ValidationError("blocks are not PSD")
    # project onto range(G) so the effects sum to the identity on range(W)
    q, _ = _range_basis(g)
    proj = q @ q.conj().T
    herm = proj[None] @ herm @ proj[None]
    herm = herm + (g - herm.sum(axis=0))[None] / n
    wp = pseudoinverse(w)
    comp = (np.eye(s.d) - w @ wp) / n
    m = np.einsum("ba,ibc,cd->iad", wp.conj(), herm, wp) + comp[None]
    m = 0.5 * (m + m.conj().transpose(0, 2, 1))
    return Povm(m)


def gram_blocks_from_povm(s: StateSet, m: Povm) -> np.ndarray:
    """``F_i = W* M_i W``."""
    if m.d != s.d:
        raise ValidationError(f"POVM acts on dimension {m.d}, states live in {s.d}")
    if m.n != s.n:
        raise ValidationError(f"POVM has {m.n} effects for {s.n} states")
    w = s.vectors
    f = np.einsum("ba,ibc,cd->iad", w.conj(), m.effects, w)
    return 0.5 * (f + f.conj().transpose(0, 2, 1))
