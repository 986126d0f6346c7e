import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from compoundkit.errors import DimensionError, HorizonError, PreconditionError
from compoundkit.hankel import (
    HankelSystem,
    ImpulseResponse,
    difference,
    first_order_lag,
    hankel_block,
    hankel_compound_ir,
    hankel_k_positive_verdict,
    hankel_operator_apply,
    impulse_response,
    operator_svdp_batch,
    parallel,
    parallel_lags,
    realization_block,
)
from compoundkit.sign_tools import s_minus, s_minus_batch


def random_stable(rng, n, rho=0.8):
    A = rng.standard_normal((n, n))
    A *= rho / np.max(np.abs(np.linalg.eigvals(A)))
    return HankelSystem(A, rng.standard_normal(n), rng.standard_normal(n))


class TestImpulse:
    def test_lag(self):
        g = impulse_response(first_order_lag(0.5, 2.0), 10)
        assert_allclose(g.samples, 2.0 * 0.5 ** np.arange(10))
        assert g(1) == 2.0 and g(3) == 0.5

    def test_lag_zero_pole(self):
        g = impulse_response(first_order_lag(0.0, 3.0), 5)
        assert_allclose(g.samples, [3, 0, 0, 0, 0])

    def test_two_poles(self):
        g = impulse_response(parallel_lags([0.5, -0.3], [1.0, 2.0]), 8)
        j = np.arange(8)
        assert_allclose(g.samples, 0.5 ** j + 2 * (-0.3) ** j, atol=1e-15)

    def test_parallel_matches_sum(self, rng):
        s1, s2 = random_stable(rng, 2), random_stable(rng, 3)
        g = impulse_response(parallel(s1, s2), 30)
        g12 = impulse_response(s1, 30) + impulse_response(s2, 30)
        assert_allclose(g.samples, g12.samples, atol=1e-13)

    def test_matrix_power_oracle(self, rng):
        sys = random_stable(rng, 4)
        g = impulse_response(sys, 12)
        for j in range(1, 13):
            assert g(j) == pytest.approx(sys.c @ np.linalg.matrix_power(sys.A, j - 1) @ sys.b,
                                         abs=1e-12)

    def test_out_of_horizon(self):
        with pytest.raises(HorizonError):
            impulse_response(first_order_lag(0.5, 1.0), 3)(4)


class TestBlocks:
    def test_q1(self):
        g = impulse_response(first_order_lag(0.5, 2.0), 10)
        assert hankel_block(g, 3, 1)[0, 0] == g(3)

    def test_lag_rank_one(self):
        g = impulse_response(first_order_lag(0.7, 1.5), 20)
        for p in range(1, 10):
            assert abs(np.linalg.det(hankel_block(g, p, 2))) < 1e-14

    def test_factorization(self, rng):
        sys = random_stable(rng, 3)
        g = impulse_response(sys, 20)
        assert_allclose(hankel_block(g, 2, 3), realization_block(sys, 2, 3), atol=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_factorization_random(self, n, p, q, seed):
        sys = random_stable(np.random.default_rng(seed), n)
        g = impulse_response(sys, p + 2 * q)
        assert_allclose(hankel_block(g, p, q), realization_block(sys, p, q), atol=1e-9)

    def test_horizon(self):
        g = impulse_response(first_order_lag(0.5, 1.0), 5)
        with pytest.raises(HorizonError):
            hankel_block(g, 3, 3)


class TestCompoundIR:
    def test_k1(self, rng):
        g = impulse_response(random_stable(rng, 3), 15)
        assert_allclose(hankel_compound_ir(g, 1).samples, g.samples)

    def test_k2_formula(self, rng):
        g = impulse_response(random_stable(rng, 3), 15)
        s = g.samples
        assert_allclose(hankel_compound_ir(g, 2).samples, s[:-2] * s[2:] - s[1:-1] ** 2,
                        atol=1e-14)

    def test_lag_zero(self):
        g = impulse_response(first_order_lag(0.8, 2.0), 40)
        assert np.max(np.abs(hankel_compound_ir(g, 2).samples)) < 1e-14

    def test_length(self):
        g = ImpulseResponse(np.arange(1.0, 11.0))
        assert hankel_compound_ir(g, 3).N == 10 - 4
        with pytest.raises(HorizonError):
            hankel_compound_ir(g, 3, 8)


class TestVerdict:
    def test_positive_lag(self):
        v = hankel_k_positive_verdict(first_order_lag(0.5, 1.0), 1)
        assert v.passed and v.witness["tail_bound"] < 1e-9

    def test_lag_k2_boundary(self):
        assert hankel_k_positive_verdict(first_order_lag(0.5, 1.0), 2).passed

    def test_alternating_lag(self):
        v = hankel_k_positive_verdict(first_order_lag(-0.5, 1.0), 1)
        assert not v.passed
        assert v.witness["orders"][1]["argmin_j"] == 2

    def test_relaxation(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 5))
            sys = parallel_lags(rng.uniform(0.05, 0.8, n), rng.uniform(0.1, 2.0, n))
            for k in range(1, n + 1):
                assert hankel_k_positive_verdict(sys, k).passed

    def test_parallel_closure(self, rng):
        for _ in range(10):
            s1 = parallel_lags(rng.uniform(0.1, 0.7, 2), rng.uniform(0.1, 2, 2))
            s2 = parallel_lags(rng.uniform(0.1, 0.7, 2), rng.uniform(0.1, 2, 2))
            k = 2
            assert hankel_k_positive_verdict(s1, k).passed
            assert hankel_k_positive_verdict(s2, k).passed
            assert hankel_k_positive_verdict(parallel(s1, s2), k).passed
            g = impulse_response(s1) + impulse_response(s2)
            assert hankel_k_positive_verdict(g, k).passed

    def test_unstable(self):
        with pytest.raises(PreconditionError):
            hankel_k_positive_verdict(first_order_lag(1.0, 1.0), 1)

    def test_tail_too_large(self):
        with pytest.raises(HorizonError):
            hankel_k_positive_verdict(first_order_lag(0.95, 1.0), 1)
        assert hankel_k_positive_verdict(first_order_lag(0.95, 1.0), 1, N=600).passed

    def test_explicit_sequence(self):
        v = hankel_k_positive_verdict(ImpulseResponse([1.0, 0.5, 0.25]), 2)
        assert v.passed and "no tail" in v.notes[0]


class TestOperator:
    def test_pulse(self, rng):
        g = impulse_response(random_stable(rng, 3), 30)
        y = hankel_operator_apply(g, [1.0], 10)
        assert_allclose(y, g.samples[0:11])  # y(j) = g(j + 1)

    def test_matrix_form(self, rng):
        g = impulse_response(random_stable(rng, 3), 40)
        u = rng.standard_normal(6)
        H = np.array([[g(i + j) for j in range(1, 7)] for i in range(0, 11)])
        assert_allclose(hankel_operator_apply(g, u, 10), H @ u, atol=1e-13)

    def test_horizon(self):
        g = ImpulseResponse(np.ones(5))
        with pytest.raises(HorizonError):
            hankel_operator_apply(g, np.ones(3), 3)

    def test_unimodal(self, rng):
        sys = parallel_lags([0.3, 0.6, 0.85], [1.0, 0.5, 2.0], N=400)
        assert hankel_k_positive_verdict(sys, 2).passed
        g = impulse_response(sys)
        for _ in range(200):
            T = int(rng.integers(3, 15))
            peak = int(rng.integers(0, T))
            up = np.sort(rng.uniform(0, 1, peak + 1))
            down = np.sort(rng.uniform(0, 1, T - peak - 1))[::-1] * up[-1]
            u = np.concatenate([up, down, [0.0]])
            assert s_minus(difference(u)) <= 1
            y = hankel_operator_apply(g, u, 60)
            dy = difference(y)
            dy[np.abs(dy) <= 1e-12 * np.abs(dy).max()] = 0.0
            assert s_minus(dy) <= 1

    def test_svdp_fuzz(self, rng):
        k = 3
        sys = parallel_lags([0.2, 0.5, 0.8], [1.0, 1.5, 0.7], N=400)
        assert hankel_k_positive_verdict(sys, k).passed
        g = impulse_response(sys)
        U = rng.standard_normal((5000, 8))
        U[rng.random(U.shape) < 0.3] = 0.0
        U = U[(s_minus_batch(U) <= k - 1) & np.any(U != 0, axis=1)][:1000]
        assert len(U) == 1000
        su, sy, ok = operator_svdp_batch(g, U, 40)
        assert np.all(ok)
        assert np.all(sy <= su)


class TestDifference:
    def test_constant(self):
        assert_allclose(difference(np.full(6, 3.0)), 0.0)

    def test_delta(self):
        d = np.zeros(7)
        d[3] = 1.0
        D = difference(d)
        assert D[2] == 1.0 and D[3] == -1.0
        assert s_minus(D) == 1

    def test_compose(self, rng):
        s = rng.standard_normal(12)
        assert_allclose(difference(s, 2), difference(difference(s)))

    def test_too_short(self):
        with pytest.raises(DimensionError):
            difference([1.0, 2.0], 2)
