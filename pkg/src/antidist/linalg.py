"""Dense complex Hermitian linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The helpers here
validate, symmetrize and decompose them; nothing keeps state between calls.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import EigenvalueError, ValidationError

HERMITIAN_ATOL = 1e-8


def as_matrix(a, *, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array (a copy)."""
    arr = np.array(a, dtype=complex)
    if arr.ndim != 2:
        raise ValidationError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def hermitian(a, *, atol: float = HERMITIAN_ATOL, name: str = "matrix") -> np.ndarray:
    """Symmetrize ``a`` as ``(A + A*)/2``.

    Asymmetry up to ``atol`` (scaled by the largest entry when that exceeds 1)
    is treated as I/O roundoff and averaged away; anything larger is an error.
    The returned diagonal has exactly zero imaginary part.
    """
    arr = as_matrix(a, name=name)
    n, m = arr.shape
    if n != m:
        raise ValidationError(f"{name} must be square, got shape {arr.shape}")
    if n == 0:
        raise ValidationError(f"{name} must be non-empty")
    scale = max(1.0, float(np.abs(arr).max()))
    asym = float(np.abs(arr - arr.conj().T).max())
    if asym > atol * scale:
        raise ValidationError(f"{name} is not Hermitian (max |A - A*| = {asym:.3e})")
    out = 0.5 * (arr + arr.conj().T)
    out[np.diag_indices(n)] = out.diagonal().real
    return out


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending, with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None

    def reconstruct(self) -> np.ndarray:
        if self.eigenvectors is None:
            raise ValueError("spectrum was computed without eigenvectors")
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.conj().T


def eig_hermitian(a, *, vectors: bool = True) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Ties keep LAPACK's output order (stable sort), so identical input gives
    identical output.
    """
    h = hermitian(a)
    try:
        if vectors:
            w, q = np.linalg.eigh(h)
        else:
            w, q = np.linalg.eigvalsh(h), None
    except np.linalg.LinAlgError as exc:
        raise EigenvalueError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(-w, kind="stable")
    w = w[order]
    if q is None:
        return Spectrum(w)
    q = q[:, order]
    n = h.shape[0]
    norm = np.linalg.norm(h)
    residual = float(np.linalg.norm((q * w) @ q.conj().T - h))
    if residual > 1e-10 * n * max(norm, 1e-300) and residual > 1e-300:
        raise EigenvalueError(
            f"eigendecomposition residual {residual:.3e} exceeds bound", residual
        )
    return Spectrum(w, q)


def eigvalsh_desc(a) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, sorted descending."""
    return eig_hermitian(a, vectors=False).eigenvalues


def min_eig(a) -> float:
    """Smallest eigenvalue of a Hermitian matrix (no symmetry check)."""
    return float(np.linalg.eigvalsh(a)[0])


def project_psd(a) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm: clip negative eigenvalues to 0."""
    eigs = eig_hermitian(a)
    w = np.clip(eigs.eigenvalues, 0.0, None)
    q = eigs.eigenvectors
    out = (q * w) @ q.conj().T
    return 0.5 * (out + out.conj().T)


def project_psd_stack(blocks: np.ndarray) -> np.ndarray:
    """``project_psd`` applied to each matrix of an ``(m, k, k)`` stack.

    The stack is decomposed in one batched LAPACK call; no symmetry check
    is done, callers pass Hermitian stacks.
    """
    w, v = np.linalg.eigh(blocks)
    np.clip(w, 0.0, None, out=w)
    return (v * w[:, None, :]) @ v.conj().transpose(0, 2, 1)


def pseudoinverse(w, rank_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse via the SVD.

    Singular values at or below ``rank_tol`` (default ``1e-10`` times the
    largest singular value) are treated as zero.
    """
    a = as_matrix(w, name="W")
    if a.size == 0:
        return np.zeros(a.shape[::-1], dtype=complex)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    if rank_tol is None:
        rank_tol = 1e-10 * (s[0] if s.size else 0.0)
    if rank_tol < 0:
        raise ValidationError("rank_tol must be non-negative")
    keep = s > rank_tol
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (vh.conj().T * s_inv) @ u.conj().T


def principal_submatrix(a, drop_index: int) -> np.ndarray:
    """Remove row and column ``drop_index``."""
    arr = np.asarray(a)
    n = arr.shape[0]
    if n < 2:
        raise ValidationError("principal_submatrix needs n >= 2")
    if not 0 <= drop_index < n:
        raise ValidationError(f"drop_index {drop_index} out of range for n={n}")
    keep = [k for k in range(n) if k != drop_index]
    return arr[np.ix_(keep, keep)]


def submatrix_min_eigs(a) -> np.ndarray:
    """Minimum eigenvalue of each (n-1)x(n-1) principal submatrix, in index order."""
    arr = np.asarray(a)
    n = arr.shape[0]
    if n == 1:
        return np.zeros(1)
    stack = np.stack([principal_submatrix(arr, i) for i in range(n)])
    return np.linalg.eigvalsh(stack)[:, 0]


def fourier_matrix(n: int) -> np.ndarray:
    """Unitary DFT matrix ``F[j, k] = omega**(j*k) / sqrt(n)``, ``omega = exp(2 pi i / n)``."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * jk / n) / np.sqrt(n)


def shift_matrix(n: int) -> np.ndarray:
    """Cyclic permutation ``P`` with ones on the superdiagonal and at ``(n-1, 0)``."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    return np.roll(np.eye(n), 1, axis=1).astype(complex)


def circulant_twirl(a) -> np.ndarray:
    """Average of ``P^j A P^j*`` over all cyclic shifts.

    This is the orthogonal projection onto circulant matrices: entry ``(i, j)``
    of the result is the mean of ``A`` along the wrapped diagonal ``j - i``.
    """
    h = hermitian(a)
    n = h.shape[0]
    rows = np.arange(n)
    first_row = np.array([h[rows, (rows + k) % n].mean() for k in range(n)])
    return circulant(first_row)


def circulant(first_row) -> np.ndarray:
    """Circulant matrix with ``C[i, j] = first_row[(j - i) mod n]``."""
    g = np.asarray(first_row, dtype=complex)
    n = g.shape[0]
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return g[idx]


def shift_deviation(a) -> float:
    """Largest ``|A[i, j] - A[i+1, j+1]|`` with indices taken mod n."""
    arr = np.asarray(a)
    return float(np.abs(arr - np.roll(arr, -1, axis=(0, 1))).max())
