import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from randgram import random_gram

from antidist.criteria import (
    BOUNDARY_TOL,
    Rule,
    build_lambda_certificate,
    check_eigenvalue_sufficient,
    check_frobenius,
    check_pairwise_ip_large,
    check_pairwise_ip_small,
    check_sum_ip,
    closed_form_verdicts,
    decide_circulant_exact,
    phase_boundaries,
)
from antidist.exceptions import ValidationError
from antidist.gram import (
    circulant_from_eigenvalues,
    circulant_profile,
    gram_from_states,
    make_d4_example,
    make_equiangular,
    make_trine,
)

TRINE = gram_from_states(make_trine())
seeds = st.integers(0, 2**32 - 1)


class TestSumIp:
    def test_fires(self):
        v = check_sum_ip(make_equiangular(4, 0.7))
        assert v.applies
        assert v.margin == pytest.approx(0.4, abs=1e-12)
        assert v.antidistinguishable is False

    @pytest.mark.parametrize("n", [3, 4, 7])
    def test_strict_at_threshold(self, n):
        v = check_sum_ip(make_equiangular(n, (n - 2) / (n - 1)))
        assert abs(v.margin) < BOUNDARY_TOL
        assert v.detail["boundary"]

    def test_identity(self):
        v = check_sum_ip(np.eye(4))
        assert not v.applies
        assert v.antidistinguishable is None

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_invariant_under_diagonal_phases(self, seed):
        rng = np.random.default_rng(seed)
        g = random_gram(rng)
        d = np.diag(np.exp(2j * np.pi * rng.random(g.shape[0])))
        assert check_sum_ip(d @ g @ d.conj().T).margin == pytest.approx(check_sum_ip(g).margin, abs=1e-12)


class TestPairwise:
    def test_large_fires(self):
        assert check_pairwise_ip_large(make_equiangular(4, 0.7)).applies

    def test_large_strict_on_trine(self):
        v = check_pairwise_ip_large(TRINE)
        assert not v.applies
        assert v.boundary

    def test_large_identity(self):
        assert not check_pairwise_ip_large(np.eye(3)).applies

    def test_small_four_state_example(self):
        g, _ = make_d4_example(0.0)
        v = check_pairwise_ip_small(g)
        assert v.applies
        assert abs(v.margin) <= 1e-12

    def test_small_two_states(self):
        assert check_pairwise_ip_small(np.eye(2)).applies
        assert not check_pairwise_ip_small(make_equiangular(2, 0.01)).applies

    def test_small_equiangular(self):
        v = check_pairwise_ip_small(make_equiangular(4, 0.6))
        assert not v.applies
        assert v.margin == pytest.approx(1 / math.sqrt(3) - 0.6)


class TestFrobenius:
    def test_boundary_equiangular(self):
        v = check_frobenius(make_equiangular(4, 1 / math.sqrt(3)))
        assert v.applies
        assert abs(v.margin) <= 1e-12

    def test_identity(self):
        assert check_frobenius(np.eye(5)).applies

    def test_all_ones(self):
        assert not check_frobenius(np.ones((4, 4))).applies


class TestEigenvalue:
    def test_trine_boundary(self):
        v, cert = check_eigenvalue_sufficient(TRINE)
        assert v.applies
        assert abs(v.margin) <= 1e-12
        assert cert is not None

    def test_tightness_spectrum(self):
        v, cert = check_eigenvalue_sufficient(circulant_from_eigenvalues([2.1, 1.9, 0, 0]))
        assert not v.applies
        assert v.margin == pytest.approx(math.sqrt(1.9) - math.sqrt(2.1), abs=1e-9)
        assert cert is None

    def test_identity(self):
        v, cert = check_eigenvalue_sufficient(np.eye(4))
        assert v.applies
        assert v.margin == pytest.approx(2.0)


class TestLambdaCertificate:
    def test_pair(self):
        cert = build_lambda_certificate([1.0, 1.0])
        assert np.allclose(cert.v, [-1.0, 1.0])
        assert max(cert.residuals()) <= 1e-12

    def test_trine(self):
        cert = build_lambda_certificate([1.5, 1.5, 0.0])
        assert cert.v[0] == pytest.approx(-math.sqrt(1.5))
        assert max(cert.residuals()) <= 1e-9

    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_flat(self, n):
        cert = build_lambda_certificate(np.ones(n))
        assert cert.v[0] == pytest.approx(-(n - 1) - math.sqrt((n - 1) ** 2 - 1))
        assert max(cert.residuals()) <= 1e-9

    def test_rejects_failing_condition(self):
        with pytest.raises(ValidationError):
            build_lambda_certificate([2.1, 1.9, 0, 0])

    def test_rejects_unsorted(self):
        with pytest.raises(ValidationError):
            build_lambda_certificate([1.0, 2.0])

    @settings(max_examples=60, deadline=None)
    @given(seeds)
    def test_equalities_hold(self, seed):
        g = random_gram(np.random.default_rng(seed), n_max=10)
        v, cert = check_eigenvalue_sufficient(g)
        if v.applies:
            assert max(cert.residuals()) <= 1e-9


class TestCirculantExact:
    @pytest.mark.parametrize("n", [3, 4, 6, 9])
    def test_equiangular_threshold(self, n):
        threshold = (n - 2) / (n - 1)
        for gamma in (threshold - 0.01, threshold + 0.01):
            v = decide_circulant_exact(circulant_profile(make_equiangular(n, gamma)))
            assert v.applies == (gamma <= threshold)
            assert v.antidistinguishable == (gamma <= threshold)

    def test_tightness(self):
        v = decide_circulant_exact(circulant_profile(circulant_from_eigenvalues([2.05, 1.95, 0, 0])))
        assert v.antidistinguishable is False

    def test_identity(self):
        assert decide_circulant_exact(circulant_profile(np.eye(5))).applies

    def test_rejects_non_circulant(self):
        with pytest.raises(ValidationError):
            decide_circulant_exact(circulant_profile(make_d4_example(0.0)[0]))


@settings(max_examples=500, deadline=None)
@given(seeds)
def test_implication_chain_and_exclusion(seed):
    g = random_gram(np.random.default_rng(seed), n_max=10)
    small, large, frob, sum_ip, eig = closed_form_verdicts(g)
    if small.applies:
        assert frob.applies
    if frob.applies:
        assert eig.applies
    assert not ((large.applies or sum_ip.applies) and (small.applies or frob.applies or eig.applies))


def test_rule_kinds():
    assert {r for r in Rule if r.proves_anti} == {Rule.EIGENVALUE_ANTI, Rule.FROBENIUS_ANTI, Rule.PAIRWISE_IP_ANTI}
    assert {r for r in Rule if r.proves_not_anti} == {Rule.SUM_IP_NOT_ANTI, Rule.PAIRWISE_IP_NOT_ANTI}


def test_phase_boundaries():
    rows = phase_boundaries([2, 4])
    assert rows[0] == {"n": 2, "anti_at_or_below": 0.0, "not_anti_above": 0.0}
    assert rows[1]["anti_at_or_below"] == pytest.approx(1 / math.sqrt(3))
    assert rows[1]["not_anti_above"] == pytest.approx(2 / 3)
    assert phase_boundaries([3])[0]["anti_at_or_below"] == pytest.approx(0.5)
    for n in range(4, 20):
        row = phase_boundaries([n])[0]
        assert row["anti_at_or_below"] < row["not_anti_above"]
