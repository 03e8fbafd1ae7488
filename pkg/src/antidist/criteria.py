"""Closed-form tests for antidistinguishability.

Every check returns a :class:`BoundVerdict` whose ``margin`` is the signed
distance to the rule's threshold, positive when the rule fires. Rules that
prove non-antidistinguishability use strict inequalities; rules that prove
antidistinguishability use non-strict ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import ValidationError
from .gram import CirculantProfile, as_gram
from .linalg import eigvalsh_desc

BOUNDARY_TOL = 1e-9
# margins within this many ulps of the compared quantities count as exact ties
TIE_ULPS = 8
# eigenvalues below this fraction of the largest are roundoff; sqrt would amplify them
EIG_DUST = 1e-13


class Rule(str, Enum):
    SUM_IP_NOT_ANTI = "SumIP_NotAnti"
    PAIRWISE_IP_NOT_ANTI = "PairwiseIP_NotAnti"
    EIGENVALUE_ANTI = "Eigenvalue_Anti"
    FROBENIUS_ANTI = "Frobenius_Anti"
    PAIRWISE_IP_ANTI = "PairwiseIP_Anti"
    CIRCULANT_EXACT = "CirculantExact"

    @property
    def proves_anti(self) -> bool:
        return self in (Rule.EIGENVALUE_ANTI, Rule.FROBENIUS_ANTI, Rule.PAIRWISE_IP_ANTI)

    @property
    def proves_not_anti(self) -> bool:
        return self in (Rule.SUM_IP_NOT_ANTI, Rule.PAIRWISE_IP_NOT_ANTI)


@dataclass(frozen=True)
class BoundVerdict:
    rule: Rule
    applies: bool
    margin: float
    detail: dict = field(default_factory=dict)

    @property
    def boundary(self) -> bool:
        """Margin too small for floating point to settle the inequality."""
        return abs(self.margin) < BOUNDARY_TOL

    @property
    def antidistinguishable(self) -> bool | None:
        """What this verdict proves, or None when the rule is silent.

        ``CirculantExact`` always decides; the one-sided rules only speak
        when they apply.
        """
        if self.rule is Rule.CIRCULANT_EXACT:
            return self.applies
        if not self.applies:
            return None
        return self.rule.proves_anti


def _verdict(rule: Rule, margin: float, strict: bool, scale: float = 1.0, **detail) -> BoundVerdict:
    if abs(margin) <= TIE_ULPS * np.finfo(float).eps * max(1.0, scale):
        margin = 0.0
    applies = margin > 0 if strict else margin >= 0
    detail["boundary"] = abs(margin) < BOUNDARY_TOL
    return BoundVerdict(rule, bool(applies), float(margin), detail)


def _off_diagonal_moduli(g: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    return np.abs(g[~np.eye(n, dtype=bool)])


def check_sum_ip(g) -> BoundVerdict:
    """Not antidistinguishable if ``sum_{i != j} |G_ij| > n (n - 2)``."""
    g = as_gram(g)
    n = g.shape[0]
    total = float(_off_diagonal_moduli(g).sum())
    return _verdict(
        Rule.SUM_IP_NOT_ANTI, total - n * (n - 2), strict=True, scale=n * n, sum_moduli=total
    )


def check_pairwise_ip_large(g) -> BoundVerdict:
    """Not antidistinguishable if every ``|G_ij| > (n - 2)/(n - 1)``."""
    g = as_gram(g)
    n = g.shape[0]
    threshold = (n - 2) / (n - 1)
    smallest = float(_off_diagonal_moduli(g).min())
    return _verdict(
        Rule.PAIRWISE_IP_NOT_ANTI,
        smallest - threshold,
        strict=True,
        min_modulus=smallest,
        threshold=threshold,
    )


def check_pairwise_ip_small(g) -> BoundVerdict:
    """Antidistinguishable if every ``|G_ij| <= sqrt((n - 2)/(2n - 2))``."""
    g = as_gram(g)
    n = g.shape[0]
    threshold = math.sqrt((n - 2) / (2 * n - 2))
    largest = float(_off_diagonal_moduli(g).max())
    return _verdict(
        Rule.PAIRWISE_IP_ANTI,
        threshold - largest,
        strict=False,
        max_modulus=largest,
        threshold=threshold,
    )


def check_frobenius(g) -> BoundVerdict:
    """Antidistinguishable if ``||G||_F <= n / sqrt(2)``."""
    g = as_gram(g)
    n = g.shape[0]
    fro = float(np.linalg.norm(g))
    return _verdict(Rule.FROBENIUS_ANTI, n / math.sqrt(2) - fro, strict=False, scale=n, frobenius=fro)


@dataclass(frozen=True)
class LambdaCertificate:
    """Rank-one ``Lambda = v v^T`` witnessing the eigenvalue condition.

    ``eigenvalues`` are the (clipped, descending) Gram eigenvalues the
    certificate was built for.
    """

    v: np.ndarray
    q: float
    eigenvalues: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        return np.outer(self.v, self.v)

    def residuals(self) -> tuple[float, float]:
        """Relative errors of the two defining equalities.

        First: ``lambda_0 = -Lambda_00 - sum_i (Lambda_0i + Lambda_i0)``.
        Second: ``max_j |lambda_j - Lambda_jj|`` for ``j >= 1``.
        """
        lam = self.eigenvalues
        big = self.matrix
        first = -big[0, 0] - 2.0 * big[0, 1:].sum()
        scale = max(1.0, float(np.abs(lam).max()))
        r0 = abs(first - lam[0]) / scale
        r1 = float(np.abs(np.diag(big)[1:] - lam[1:]).max()) / scale if lam.size > 1 else 0.0
        return float(r0), float(r1)


def _clean_spectrum(lam) -> np.ndarray:
    """Clip negative eigenvalues and zero out roundoff-sized ones."""
    lam = np.clip(np.asarray(lam, dtype=float), 0.0, None)
    if lam.size:
        lam[lam < EIG_DUST * lam.max()] = 0.0
    return lam


def _clipped_spectrum(g) -> np.ndarray:
    return _clean_spectrum(eigvalsh_desc(g))


def build_lambda_certificate(lams) -> LambdaCertificate:
    """``v_0 = -q - sqrt(q^2 - lambda_0)``, ``v_j = sqrt(lambda_j)`` with ``q = sum_{j>=1} sqrt(lambda_j)``.

    ``lams`` must be sorted descending and satisfy ``sqrt(lambda_0) <= q``.
    A negative discriminant at roundoff level is clipped to zero.
    """
    lam = np.asarray(lams, dtype=float)
    if lam.ndim != 1 or lam.size < 2:
        raise ValidationError("need at least two eigenvalues")
    if np.any(np.diff(lam) > 1e-12 * max(1.0, lam[0])):
        raise ValidationError("eigenvalues must be sorted descending")
    lam = _clean_spectrum(lam)
    roots = np.sqrt(lam[1:])
    q = float(roots.sum())
    disc = q * q - lam[0]
    if disc < -1e-12 * max(1.0, lam[0]):
        raise ValidationError(
            f"eigenvalue condition fails: sqrt(lambda_0)={math.sqrt(lam[0]):.6g} > q={q:.6g}"
        )
    v = np.empty_like(lam)
    v[0] = -q - math.sqrt(max(disc, 0.0))
    v[1:] = roots
    return LambdaCertificate(v=v, q=q, eigenvalues=lam)


def _eigen_verdict(rule: Rule, lam: np.ndarray) -> BoundVerdict:
    margin = float(np.sqrt(lam[1:]).sum() - math.sqrt(lam[0]))
    scale = float(np.sqrt(lam).sum())
    return _verdict(rule, margin, strict=False, scale=scale, eigenvalues=lam.tolist())


def check_eigenvalue_sufficient(g) -> tuple[BoundVerdict, LambdaCertificate | None]:
    """Antidistinguishable if ``sqrt(lambda_0) <= sum_{j>=1} sqrt(lambda_j)``."""
    lam = _clipped_spectrum(g)
    verdict = _eigen_verdict(Rule.EIGENVALUE_ANTI, lam)
    cert = build_lambda_certificate(lam) if verdict.applies else None
    return verdict, cert


def decide_circulant_exact(profile: CirculantProfile) -> BoundVerdict:
    """Exact decision for circulant Gram matrices.

    ``applies`` is the answer itself: True means antidistinguishable, False
    means not, both definitive.
    """
    if not profile.is_circulant:
        raise ValidationError(
            f"profile is not circulant (deviation {profile.deviation:.3e} > {profile.tol:.1e})"
        )
    return _eigen_verdict(Rule.CIRCULANT_EXACT, _clean_spectrum(profile.eigenvalues))


def closed_form_verdicts(g) -> list[BoundVerdict]:
    """All one-sided rules, cheapest first (the order the pipeline consults them)."""
    g = as_gram(g)
    eig_verdict, _ = check_eigenvalue_sufficient(g)
    return [
        check_pairwise_ip_small(g),
        check_pairwise_ip_large(g),
        check_frobenius(g),
        check_sum_ip(g),
        eig_verdict,
    ]


def phase_boundaries(ns) -> list[dict]:
    """Inner-product thresholds per ``n``.

    ``anti_at_or_below``: all moduli at or below this imply antidistinguishable.
    ``not_anti_above``: all moduli strictly above this imply not.
    """
    rows = []
    for n in ns:
        if n < 2:
            raise ValidationError("n must be >= 2")
        rows.append(
            {
                "n": int(n),
                "anti_at_or_below": math.sqrt((n - 2) / (2 * n - 2)),
                "not_anti_above": (n - 2) / (n - 1),
            }
        )
    return rows
