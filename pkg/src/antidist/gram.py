"""State sets, Gram matrices and circulant structure.

A Gram matrix is represented as a validated ``(n, n)`` complex array (see
:func:`as_gram`); a set of states as a :class:`StateSet` whose columns are the
states, i.e. the ``d x n`` matrix ``W`` with ``G = W* W``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .linalg import (
    circulant,
    eig_hermitian,
    hermitian,
    shift_deviation,
)

NORM_TOL = 1e-10
DIAG_TOL = 1e-10
PSD_TOL = 1e-8
CIRCULANT_TOL = 1e-9


@dataclass(frozen=True)
class StateSet:
    """``n >= 2`` unit vectors in ``C^d`` stored as the columns of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        w = np.array(self.vectors, dtype=complex)
        if w.ndim != 2:
            raise ValidationError(f"state matrix must be 2-D (d x n), got {w.shape}")
        if w.shape[1] < 2:
            raise ValidationError("a state set needs at least 2 states")
        if not np.all(np.isfinite(w)):
            raise ValidationError("states have non-finite entries")
        norms = np.linalg.norm(w, axis=0)
        bad = [int(i) for i in np.flatnonzero(np.abs(norms - 1.0) > NORM_TOL)]
        if bad:
            raise ValidationError(f"states {bad} are not normalized (norms {norms[bad].tolist()})")
        w.setflags(write=False)
        object.__setattr__(self, "vectors", w)

    @classmethod
    def from_states(cls, states) -> StateSet:
        """Build from a sequence of ``n`` state vectors."""
        return cls(np.array([np.asarray(s, dtype=complex) for s in states]).T)

    @property
    def d(self) -> int:
        return self.vectors.shape[0]

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    def state(self, i: int) -> np.ndarray:
        return self.vectors[:, i]

    def rotated(self, unitary) -> StateSet:
        """The set ``{U|psi_i>}``."""
        return StateSet(np.asarray(unitary) @ self.vectors)


def as_gram(g, *, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Validate a Gram matrix and return it as a Hermitian array.

    Requires a unit diagonal (to ``1e-10``; it is then set to exactly 1),
    off-diagonal moduli at most ``1 + 1e-10`` and smallest eigenvalue at
    least ``-psd_tol * n``.
    """
    h = hermitian(g, name="Gram matrix")
    n = h.shape[0]
    diag_err = float(np.abs(h.diagonal() - 1.0).max())
    if diag_err > DIAG_TOL:
        raise ValidationError(f"Gram matrix diagonal deviates from 1 by {diag_err:.3e}")
    h[np.diag_indices(n)] = 1.0
    if float(np.abs(h).max()) > 1.0 + DIAG_TOL:
        raise ValidationError("Gram matrix has an entry of modulus > 1")
    lam_min = float(np.linalg.eigvalsh(h)[0])
    if lam_min < -psd_tol * n:
        raise ValidationError(f"Gram matrix is not PSD (min eigenvalue {lam_min:.3e})")
    return h


def gram_from_states(s: StateSet) -> np.ndarray:
    """``G = W* W``, i.e. ``G[i, j] = <psi_i|psi_j>``."""
    w = s.vectors
    g = w.conj().T @ w
    g = 0.5 * (g + g.conj().T)
    g[np.diag_indices(s.n)] = 1.0
    return g


def states_from_gram(g, rank_tol: float | None = None) -> StateSet:
    """A minimal-dimension state set with Gram matrix ``g``.

    Uses ``W = Lambda^{1/2} Q*`` over the eigenvalues above ``rank_tol``
    (default ``1e-10`` times the largest), so ``d`` is the numerical rank.
    Columns are renormalized to absorb the discarded eigenvalue mass.
    """
    g = as_gram(g)
    eigs = eig_hermitian(g)
    lam = eigs.eigenvalues
    if rank_tol is None:
        rank_tol = 1e-10 * lam[0]
    keep = lam > rank_tol
    w = np.sqrt(lam[keep])[:, None] * eigs.eigenvectors[:, keep].conj().T
    w = w / np.linalg.norm(w, axis=0)
    return StateSet(w)


@dataclass(frozen=True)
class CirculantProfile:
    """Result of testing ``G`` for cyclic shift invariance.

    ``dft_eigenvalues[k] = sum_j g_j omega^(j k)`` keeps the Fourier ordering
    (so ``G = F diag(dft_eigenvalues) F*``); ``eigenvalues`` is the same list
    sorted descending.
    """

    is_circulant: bool
    first_row: np.ndarray
    deviation: float
    eigenvalues: np.ndarray
    dft_eigenvalues: np.ndarray
    imag_residue: float
    tol: float = field(default=CIRCULANT_TOL)

    @property
    def n(self) -> int:
        return self.first_row.shape[0]


def dft_spectrum(first_row) -> np.ndarray:
    """Complex eigenvalues ``sum_j g_j omega^(j k)`` of the circulant with that first row."""
    g = np.asarray(first_row, dtype=complex)
    return g.shape[0] * np.fft.ifft(g)


def circulant_profile(g, tol: float = CIRCULANT_TOL) -> CirculantProfile:
    g = as_gram(g)
    deviation = shift_deviation(g)
    first_row = g[0].copy()
    lam = dft_spectrum(first_row)
    return CirculantProfile(
        is_circulant=deviation <= tol,
        first_row=first_row,
        deviation=deviation,
        eigenvalues=np.sort(lam.real)[::-1],
        dft_eigenvalues=lam.real,
        imag_residue=float(np.abs(lam.imag).max()),
        tol=tol,
    )


def circulant_from_eigenvalues(lams) -> np.ndarray:
    """The circulant Gram matrix ``F diag(lams) F*``.

    ``lams`` must be non-negative and sum to ``n`` (within ``1e-8``); they are
    rescaled to sum to exactly ``n`` so the diagonal is exactly one.
    """
    lam = np.asarray(lams, dtype=float)
    n = lam.shape[0]
    if lam.ndim != 1 or n < 2:
        raise ValidationError("need at least two eigenvalues")
    if np.any(lam < 0):
        raise ValidationError(f"eigenvalues must be non-negative, got {lam.tolist()}")
    total = float(lam.sum())
    if abs(total - n) > 1e-8:
        raise ValidationError(f"eigenvalues must sum to n={n}, got {total!r}")
    lam = lam * (n / total)
    first_row = np.fft.fft(lam) / n
    first_row[0] = 1.0
    return as_gram(circulant(first_row))


def symmetric_generator(g) -> tuple[np.ndarray, np.ndarray]:
    """Fiducial state and phases generating a circulant Gram matrix.

    Returns ``(psi, phases)`` with ``psi[j] = sqrt(lambda_j / n) >= 0`` (DFT
    order) and ``phases[j] = omega^(-j)``; the states ``U^k psi`` with
    ``U = diag(phases)`` have Gram matrix ``g``.
    """
    prof = circulant_profile(g)
    if not prof.is_circulant:
        raise ValidationError(f"Gram matrix is not circulant (deviation {prof.deviation:.3e})")
    n = prof.n
    psi = np.sqrt(np.clip(prof.dft_eigenvalues, 0.0, None) / n)
    psi = psi / np.linalg.norm(psi)
    phases = np.exp(-2j * np.pi * np.arange(n) / n)
    return psi, phases


def generated_states(psi, phases) -> StateSet:
    """The orbit ``{U^k psi : k = 0..n-1}`` with ``U = diag(phases)``."""
    psi = np.asarray(psi, dtype=complex)
    phases = np.asarray(phases, dtype=complex)
    n = phases.shape[0]
    return StateSet(np.stack([phases**k * psi for k in range(n)], axis=1))


def make_equiangular(n: int, gamma: float) -> np.ndarray:
    """``I + gamma (11^T - I)``."""
    if n < 2:
        raise ValidationError("n must be >= 2")
    if not 0.0 <= gamma <= 1.0:
        raise ValidationError(f"gamma must lie in [0, 1], got {gamma}")
    g = np.full((n, n), gamma, dtype=complex)
    g[np.diag_indices(n)] = 1.0
    return g


def make_trine() -> StateSet:
    """The three real qubit states at mutual angle 120 degrees."""
    s3 = np.sqrt(3.0)
    return StateSet.from_states([[1.0, 0.0], [-0.5, -0.5 * s3], [-0.5, 0.5 * s3]])


D4_EPS_MAX = 0.1


def make_d4_example(eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Four states with all inner-product moduli ``1/sqrt(3)`` and a perturbation.

    Returns ``(G, G_eps)`` where
    ``G_eps = (G + eps (v v* + w w* - 3 I)) / (1 - 2 eps)`` with
    ``v = [1, (-sqrt3 + i)/2, (-sqrt3 - i)/2, 0]`` and ``w = e_3``.
    Both are PSD with unit diagonal for ``0 <= eps < 1/10``.
    """
    if not 0.0 <= eps < D4_EPS_MAX:
        raise ValidationError(f"eps must lie in [0, 0.1), got {eps}")
    s3 = np.sqrt(3.0)
    c = 1.0 / s3
    g = np.array(
        [
            [1, c, c, c],
            [c, 1, 1j * c, (1 + 1j * c) / 2],
            [c, -1j * c, 1, (1 - 1j * c) / 2],
            [c, (1 - 1j * c) / 2, (1 + 1j * c) / 2, 1],
        ],
        dtype=complex,
    )
    if eps == 0.0:
        return g, g.copy()
    v = np.array([1, (-s3 + 1j) / 2, (-s3 - 1j) / 2, 0], dtype=complex)
    w = np.array([0, 0, 0, 1], dtype=complex)
    g_eps = (g + eps * (np.outer(v, v.conj()) + np.outer(w, w.conj()) - 3 * np.eye(4))) / (
        1 - 2 * eps
    )
    g_eps = 0.5 * (g_eps + g_eps.conj().T)
    g_eps[np.diag_indices(4)] = 1.0
    return g, g_eps
