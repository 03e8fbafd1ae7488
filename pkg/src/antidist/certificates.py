"""Certificates for both outcomes, their verifiers, and constructors.

A set is antidistinguishable iff its Gram matrix splits as ``G = sum_i F_i``
with every ``F_i`` PSD and zero in row/column ``i``
(:class:`IncoherenceDecomposition`). It is not iff some Hermitian ``Y``
whose ``(n-1) x (n-1)`` principal submatrices are all PSD has
``Tr(Y G) < 0`` (:class:`LocallyPsdWitness`). Verifiers only trust these
objects, never solver output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .criteria import LambdaCertificate, build_lambda_certificate
from .exceptions import CertificateError, ValidationError
from .formats import matrix_from_json, matrix_to_json
from .gram import CirculantProfile, make_d4_example, make_equiangular
from .linalg import (
    circulant,
    circulant_twirl,
    eigvalsh_desc,
    hermitian,
    principal_submatrix,
    project_psd,
    shift_deviation,
    submatrix_min_eigs,
)

VERIFY_TOL = 1e-7


class Decision(str, Enum):
    ANTIDISTINGUISHABLE = "Antidistinguishable"
    NOT_ANTIDISTINGUISHABLE = "NotAntidistinguishable"
    BOUNDARY = "Boundary"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class IncoherenceDecomposition:
    """Blocks ``F_0..F_{n-1}`` stacked as an ``(n, n, n)`` array."""

    blocks: np.ndarray
    sum_residual: float = float("nan")
    min_block_eig: float = float("nan")

    @property
    def n(self) -> int:
        return self.blocks.shape[0]


@dataclass(frozen=True)
class LocallyPsdWitness:
    Y: np.ndarray
    min_submatrix_eig: float = float("nan")
    trace_product: float = float("nan")

    @property
    def n(self) -> int:
        return self.Y.shape[0]


@dataclass(frozen=True)
class VerificationReport:
    accepted: bool
    kind: str
    margins: dict = field(default_factory=dict)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.accepted


def _check_dims(n: int, m: int, what: str) -> None:
    if n != m:
        raise ValidationError(f"{what} has dimension {m}, Gram matrix has {n}")


def verify_decomposition(g, dec: IncoherenceDecomposition, tol: float = VERIFY_TOL) -> VerificationReport:
    """Accept iff rows/columns ``i`` of ``F_i`` are exactly zero, every block
    is PSD to ``-tol`` and ``||sum F_i - G||_F <= tol * n``.

    ``g`` may be any Hermitian matrix, not only a Gram matrix.
    """
    g = hermitian(g, name="G")
    n = g.shape[0]
    blocks = np.asarray(dec.blocks, dtype=complex)
    if blocks.ndim != 3 or blocks.shape[1:] != (n, n):
        raise ValidationError(f"blocks have shape {blocks.shape}, expected ({n}, {n}, {n})")
    _check_dims(n, blocks.shape[0], "decomposition")
    zero_rows = all(
        not np.any(blocks[i, i, :]) and not np.any(blocks[i, :, i]) for i in range(n)
    )
    asym = float(np.abs(blocks - blocks.conj().transpose(0, 2, 1)).max())
    sub_min = min(
        float(np.linalg.eigvalsh(principal_submatrix(0.5 * (b + b.conj().T), i))[0]) if n > 1 else 0.0
        for i, b in enumerate(blocks)
    )
    residual = float(np.linalg.norm(blocks.sum(axis=0) - g))
    margins = {
        "zero_rows": zero_rows,
        "min_block_eig": sub_min,
        "sum_residual": residual,
        "asymmetry": asym,
    }
    reasons = []
    if not zero_rows:
        reasons.append("block i has nonzero entries in row/column i")
    if asym > tol:
        reasons.append(f"blocks not Hermitian ({asym:.3e})")
    if sub_min < -tol:
        reasons.append(f"block not PSD (min eigenvalue {sub_min:.3e})")
    if residual > tol * n:
        reasons.append(f"blocks do not sum to G (residual {residual:.3e})")
    return VerificationReport(not reasons, "decomposition", margins, "; ".join(reasons))


def verify_witness(g, w: LocallyPsdWitness, tol: float = VERIFY_TOL) -> VerificationReport:
    """Accept iff every ``(n-1) x (n-1)`` principal submatrix of ``Y`` has
    smallest eigenvalue ``>= -tol`` and ``Tr(Y G) <= -10 tol ||G||_F``."""
    g = hermitian(g, name="G")
    n = g.shape[0]
    y = hermitian(w.Y, name="Y")
    _check_dims(n, y.shape[0], "witness")
    sub_min = float(submatrix_min_eigs(y).min())
    trace = float(np.trace(y @ g).real)
    bound = -10.0 * tol * float(np.linalg.norm(g))
    margins = {"min_submatrix_eig": sub_min, "trace_product": trace, "trace_bound": bound}
    reasons = []
    if sub_min < -tol:
        reasons.append(f"Y is not locally PSD (min submatrix eigenvalue {sub_min:.3e})")
    if trace > bound:
        reasons.append(f"Tr(YG) = {trace:.3e} is not below {bound:.3e}")
    return VerificationReport(not reasons, "witness", margins, "; ".join(reasons))


def verify_lambda(g, cert: LambdaCertificate, tol: float = 1e-9) -> VerificationReport:
    """Check a rank-one Lambda certificate against the spectrum of ``g``."""
    g = hermitian(g, name="G")
    lam = np.clip(eigvalsh_desc(g), 0.0, None)
    if lam.shape != cert.eigenvalues.shape:
        raise ValidationError("certificate dimension does not match G")
    spec_err = float(np.abs(lam - cert.eigenvalues).max()) / max(1.0, float(lam[0]))
    r0, r1 = cert.residuals()
    margins = {"spectrum_error": spec_err, "residual_lambda0": r0, "residual_diag": r1}
    reasons = []
    if spec_err > tol * g.shape[0]:
        reasons.append(f"eigenvalues differ from G's by {spec_err:.3e}")
    if max(r0, r1) > tol:
        reasons.append(f"Lambda equalities violated ({max(r0, r1):.3e})")
    return VerificationReport(not reasons, "lambda", margins, "; ".join(reasons))


def bind(g, w: LocallyPsdWitness) -> LocallyPsdWitness:
    """Witness with ``min_submatrix_eig`` and ``trace_product`` filled in for ``g``."""
    y = hermitian(w.Y, name="Y")
    return replace(
        w,
        Y=y,
        min_submatrix_eig=float(submatrix_min_eigs(y).min()),
        trace_product=float(np.trace(y @ np.asarray(g)).real),
    )


def _with_stats(g, dec: IncoherenceDecomposition) -> IncoherenceDecomposition:
    rep = verify_decomposition(g, dec)
    return replace(
        dec,
        sum_residual=rep.margins["sum_residual"],
        min_block_eig=rep.margins["min_block_eig"],
    )


# --- closed-form constructors ---------------------------------------------------


def make_equiangular_decomposition(n: int, gamma: float) -> IncoherenceDecomposition:
    """Blocks ``a (I - |i><i|) + b (1 - e_i)(1 - e_i)^T`` with
    ``a = 1/(n-1) - gamma/(n-2)`` and ``b = gamma/(n-2)``.

    Valid for ``gamma <= (n-2)/(n-1)``. For ``n = 2`` only ``gamma = 0`` is
    antidistinguishable and the blocks reduce to ``I - |i><i|``.
    """
    if n < 2:
        raise ValidationError("n must be >= 2")
    threshold = (n - 2) / (n - 1)
    if not 0.0 <= gamma <= threshold:
        raise ValidationError(f"gamma={gamma} outside [0, {threshold}]")
    eye = np.eye(n)
    if n == 2:
        a, b = 1.0, 0.0
    else:
        b = gamma / (n - 2)
        a = 1.0 / (n - 1) - b
        if a < 0:
            # only reachable through roundoff at the threshold itself
            a = 0.0
    blocks = np.empty((n, n, n), dtype=complex)
    for i in range(n):
        u = np.ones(n)
        u[i] = 0.0
        blocks[i] = a * (eye - np.outer(eye[i], eye[i])) + b * np.outer(u, u)
    return _with_stats(make_equiangular(n, gamma), IncoherenceDecomposition(blocks))


def make_sum_ip_witness(g) -> LocallyPsdWitness:
    """``Y = (n-1) I - E`` where ``E_ij`` has modulus one and the phase of ``G_ij``.

    Zero entries of ``G`` get phase 0. Every principal submatrix of ``Y`` of
    size ``n-1`` is diagonally dominant, and ``Tr(Y G) = n(n-2) - sum_{i!=j} |G_ij|``.
    """
    g = hermitian(g, name="G")
    n = g.shape[0]
    mod = np.abs(g)
    e = np.ones_like(g)
    nz = mod > 0
    e[nz] = g[nz] / mod[nz]
    y = (n - 1) * np.eye(n) - e
    return bind(g, LocallyPsdWitness(y))


def d4_witness_parts(eps: float) -> tuple[np.ndarray, np.ndarray]:
    """The two matrices whose combination ``Y + delta Z`` separates ``G_eps``."""
    s3 = math.sqrt(3.0)
    i = 1j
    y = np.array(
        [
            [2, -s3 - i, -s3 + i, 0],
            [-s3 + i, 2, 1 - s3 * i, 0],
            [-s3 - i, 1 + s3 * i, 2, 0],
            [0, 0, 0, 0],
        ],
        dtype=complex,
    )
    z = np.array(
        [
            [0, 1 + s3 * i, 1 - s3 * i, -2],
            [1 - s3 * i, 0, -s3 + i, -s3 - i],
            [1 + s3 * i, -s3 - i, 0, -s3 + i],
            [-2, -s3 + i, -s3 - i, 2 * s3 * (1 + 5 * eps)],
        ],
        dtype=complex,
    )
    return y, z


def d4_delta_max(eps: float) -> float:
    return 5 * math.sqrt(3.0) * eps / (1 + 5 * eps)


def make_d4_witness(eps: float, delta: float | None = None) -> LocallyPsdWitness:
    """``X = Y + delta Z`` bound to ``G_eps``; ``delta`` defaults to its largest valid value."""
    if not 0.0 < eps < 0.1:
        raise ValidationError(f"eps must lie in (0, 0.1), got {eps}")
    dmax = d4_delta_max(eps)
    if delta is None:
        delta = dmax
    if not 0.0 < delta <= dmax * (1 + 1e-15):
        raise ValidationError(f"delta must lie in (0, {dmax}], got {delta}")
    y, z = d4_witness_parts(eps)
    _, g_eps = make_d4_example(eps)
    return bind(g_eps, LocallyPsdWitness(y + delta * z))


def small_incoherent_example() -> tuple[np.ndarray, IncoherenceDecomposition]:
    """A 3x3 PSD matrix with an explicit three-block decomposition."""
    g = np.array([[2, 1, 2], [1, 2, -1], [2, -1, 5]], dtype=complex)
    blocks = np.array(
        [
            [[0, 0, 0], [0, 1, -1], [0, -1, 1]],
            [[1, 0, 2], [0, 0, 0], [2, 0, 4]],
            [[1, 1, 0], [1, 1, 0], [0, 0, 0]],
        ],
        dtype=complex,
    )
    return g, IncoherenceDecomposition(blocks)


def all_ones_witness_example() -> tuple[np.ndarray, LocallyPsdWitness]:
    """The 3x3 all-ones matrix and a locally PSD ``Y`` with ``Tr(XY) = -3``."""
    x = np.ones((3, 3), dtype=complex)
    y = np.array([[1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=complex)
    return x, LocallyPsdWitness(y)


# --- circulant witnesses --------------------------------------------------------


def elementary_symmetric(d) -> np.ndarray:
    """``[S_0, S_1, ..., S_n]`` of the entries of ``d``: coefficients of ``prod_j (1 + d_j x)``."""
    d = np.asarray(d, dtype=float)
    e = np.zeros(d.size + 1)
    e[0] = 1.0
    for k, dj in enumerate(d, start=1):
        e[1 : k + 1] = e[1 : k + 1] + dj * e[0:k]
    return e


def circulant_locally_psd_check(y, tol: float = 1e-9) -> tuple[bool, np.ndarray]:
    """Decide local positivity of a circulant Hermitian ``Y`` from its spectrum.

    Returns ``(flag, S)`` with ``S[k-1] = S_k(d)`` for ``k = 1..n-1`` where ``d``
    are the DFT eigenvalues of ``Y``; the flag requires each ``S_k`` to be at
    least ``-tol`` times ``C(n, k) max|d|^k``.
    """
    y = hermitian(y, name="Y")
    n = y.shape[0]
    scale = max(1.0, float(np.abs(y).max()))
    dev = shift_deviation(y)
    if dev > tol * scale:
        raise ValidationError(f"Y is not circulant (deviation {dev:.3e})")
    d = (n * np.fft.ifft(y[0])).real
    s = elementary_symmetric(d)[1:n]
    dmax = max(float(np.abs(d).max()), 1e-300)
    bounds = np.array([math.comb(n, k) * dmax**k for k in range(1, n)])
    return bool(np.all(s >= -tol * bounds)), s


def make_circulant_witness(profile: CirculantProfile) -> LocallyPsdWitness:
    """Circulant witness for a circulant ``G`` failing the eigenvalue condition.

    With ``lambda_0`` the largest DFT eigenvalue (index ``k0``) and
    ``mu_j = max(lambda_j, tau)`` for the others, the witness has DFT
    eigenvalues ``d_j = sum_l sqrt(mu_l) / sqrt(mu_j)`` and ``d_k0 = -1``.
    Then ``S_k(d) >= 0`` for ``k < n`` (with ``S_{n-1} = 0``) and
    ``Tr(Y G) <= -gap sqrt(lambda_0)`` where ``gap`` is the amount by which
    the eigenvalue condition fails.
    """
    if not profile.is_circulant:
        raise ValidationError("profile is not circulant")
    lam = np.clip(profile.dft_eigenvalues, 0.0, None)
    n = lam.size
    k0 = int(np.argmax(lam))
    rest = np.delete(lam, k0)
    q = float(np.sqrt(rest).sum())
    gap = math.sqrt(lam[k0]) - q
    if gap <= 0:
        raise CertificateError("eigenvalue condition holds; G is antidistinguishable")
    tau = (gap / (2 * (n - 1))) ** 2
    roots = np.sqrt(np.maximum(rest, tau))
    d = np.empty(n)
    d[np.arange(n) != k0] = roots.sum() / roots
    d[k0] = -1.0
    y = circulant(np.fft.fft(d) / n)
    return bind(circulant(profile.first_row), LocallyPsdWitness(y))


# --- rounding approximate solver output -------------------------------------------


def _forbidden_masks(n: int) -> np.ndarray:
    """``mask[i, a, b] = 1`` iff block ``i`` may hold entry ``(a, b)``."""
    mask = np.ones((n, n, n))
    for i in range(n):
        mask[i, i, :] = 0.0
        mask[i, :, i] = 0.0
    return mask


def round_decomposition(g, blocks, tol: float = VERIFY_TOL, rounds: int = 3) -> IncoherenceDecomposition:
    """Turn near-feasible solver blocks into a verified decomposition.

    Each round projects the allowed principal submatrix of every block onto
    the PSD cone, then spreads the residual ``G - sum F_i`` evenly over the
    blocks allowed to hold each entry. Raises :class:`CertificateError` when
    no round verifies.
    """
    g = hermitian(g, name="G")
    n = g.shape[0]
    f = np.array(blocks, dtype=complex)
    if f.shape != (n, n, n):
        raise ValidationError(f"blocks have shape {f.shape}, expected ({n}, {n}, {n})")
    mask = _forbidden_masks(n)
    count = mask.sum(axis=0)
    share = np.divide(1.0, count, out=np.zeros_like(count), where=count > 0)
    f = 0.5 * (f + f.conj().transpose(0, 2, 1)) * mask
    rep = None
    for _ in range(max(1, rounds)):
        for i in range(n):
            keep = [k for k in range(n) if k != i]
            f[i][np.ix_(keep, keep)] = project_psd(f[i][np.ix_(keep, keep)])
        resid = g - f.sum(axis=0)
        f = f + mask * (resid * share)[None, :, :]
        f = 0.5 * (f + f.conj().transpose(0, 2, 1))
        f *= mask
        dec = IncoherenceDecomposition(f.copy())
        rep = verify_decomposition(g, dec, tol)
        if rep.accepted:
            return replace(
                dec,
                sum_residual=rep.margins["sum_residual"],
                min_block_eig=rep.margins["min_block_eig"],
            )
    raise CertificateError(f"rounded decomposition failed: {rep.reason}", rep.margins)


def round_witness(g, candidate, circulant: bool = False, tol: float = VERIFY_TOL) -> LocallyPsdWitness:
    """Turn an approximate witness into a verified one.

    For circulant ``G`` the candidate is first twirled onto the circulant
    subspace (this keeps local positivity and ``Tr(YG)``). Then
    ``eta * I`` is added, ``eta`` being the worst negative submatrix
    eigenvalue, and the result must still pass :func:`verify_witness`.
    """
    g = hermitian(g, name="G")
    y = hermitian(candidate, name="witness candidate")
    if y.shape != g.shape:
        raise ValidationError(f"witness has shape {y.shape}, G has {g.shape}")
    if circulant:
        y = circulant_twirl(y)
    eta = max(0.0, -float(submatrix_min_eigs(y).min()))
    if eta > 0:
        y = y + eta * np.eye(y.shape[0])
    w = bind(g, LocallyPsdWitness(y))
    rep = verify_witness(g, w, tol)
    if not rep.accepted:
        raise CertificateError(f"rounded witness failed: {rep.reason}", {**rep.margins, "eta": eta})
    return w


# --- serialization -------------------------------------------------------------------


def certificate_to_json(cert) -> dict:
    if isinstance(cert, IncoherenceDecomposition):
        return {
            "kind": "decomposition",
            "n": cert.n,
            "blocks": [matrix_to_json(b) for b in cert.blocks],
            "claims": {
                "residuals": {
                    "sum_residual": cert.sum_residual,
                    "min_block_eig": cert.min_block_eig,
                }
            },
        }
    if isinstance(cert, LocallyPsdWitness):
        return {
            "kind": "witness",
            "n": cert.n,
            "Y": matrix_to_json(cert.Y),
            "claims": {
                "residuals": {
                    "min_submatrix_eig": cert.min_submatrix_eig,
                    "trace_product": cert.trace_product,
                }
            },
        }
    if isinstance(cert, LambdaCertificate):
        r0, r1 = cert.residuals()
        return {
            "kind": "lambda",
            "n": int(cert.v.size),
            "v": cert.v.tolist(),
            "q": cert.q,
            "eigenvalues": cert.eigenvalues.tolist(),
            "claims": {"residuals": {"residual_lambda0": r0, "residual_diag": r1}},
        }
    raise TypeError(f"not a certificate: {type(cert).__name__}")


def _nan_if_none(x) -> float:
    return float("nan") if x is None else float(x)


def certificate_from_json(obj):
    kind = obj.get("kind")
    claims = obj.get("claims", {}).get("residuals", {})
    if kind == "decomposition":
        blocks = np.stack([matrix_from_json(b, name="block") for b in obj["blocks"]])
        return IncoherenceDecomposition(
            blocks,
            sum_residual=_nan_if_none(claims.get("sum_residual")),
            min_block_eig=_nan_if_none(claims.get("min_block_eig")),
        )
    if kind == "witness":
        return LocallyPsdWitness(
            matrix_from_json(obj["Y"], name="Y"),
            min_submatrix_eig=_nan_if_none(claims.get("min_submatrix_eig")),
            trace_product=_nan_if_none(claims.get("trace_product")),
        )
    if kind == "lambda":
        return LambdaCertificate(
            v=np.array(obj["v"], dtype=float),
            q=float(obj["q"]),
            eigenvalues=np.array(obj["eigenvalues"], dtype=float),
        )
    raise ValidationError(f"unknown certificate kind {kind!r}")


def verify_certificate(g, cert, tol: float = VERIFY_TOL) -> VerificationReport:
    """Dispatch to the verifier matching the certificate type."""
    if isinstance(cert, IncoherenceDecomposition):
        return verify_decomposition(g, cert, tol)
    if isinstance(cert, LocallyPsdWitness):
        return verify_witness(g, cert, tol)
    if isinstance(cert, LambdaCertificate):
        return verify_lambda(g, cert)
    raise TypeError(f"not a certificate: {type(cert).__name__}")


__all__ = [
    "Decision",
    "IncoherenceDecomposition",
    "LambdaCertificate",
    "LocallyPsdWitness",
    "VerificationReport",
    "all_ones_witness_example",
    "build_lambda_certificate",
    "certificate_from_json",
    "certificate_to_json",
    "circulant_locally_psd_check",
    "d4_delta_max",
    "d4_witness_parts",
    "elementary_symmetric",
    "make_circulant_witness",
    "make_d4_witness",
    "make_equiangular_decomposition",
    "make_sum_ip_witness",
    "round_decomposition",
    "round_witness",
    "small_incoherent_example",
    "verify_certificate",
    "verify_decomposition",
    "verify_lambda",
    "verify_witness",
]
