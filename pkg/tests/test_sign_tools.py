import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compoundkit.compound import mult_compound
from compoundkit.errors import DimensionError, PreconditionError, SingularMatrixError
from compoundkit.sign_tools import (
    alternating_signs,
    classify_sign_regularity,
    contiguous_minors,
    duality_check,
    end_signs_plus,
    initial_minors,
    s_minus,
    s_minus_batch,
    s_plus,
    s_plus_batch,
    sign_stats,
    svdp_check,
    svdp_tp_batch,
    tp_recognize_fast,
)

from conftest import brute_compound, random_tp


def brute_s_minus(x):
    nz = [v for v in x if v != 0]
    return sum(1 for a, b in zip(nz, nz[1:]) if np.sign(a) != np.sign(b))


def brute_s_plus_with_ends(x):
    """Enumerate all +/-1 fillings of the zeros; return the best count and
    the set of (first, last) signs achieving it."""
    zeros = [i for i, v in enumerate(x) if v == 0]
    best, ends = -1, set()
    for fill in itertools.product((-1, 1), repeat=len(zeros)):
        y = np.sign(np.array(x, dtype=float))
        y[zeros] = fill
        c = int(np.sum(y[1:] != y[:-1]))
        if c > best:
            best, ends = c, {(y[0], y[-1])}
        elif c == best:
            ends.add((y[0], y[-1]))
    return best, ends


def brute_tp_order(A, tol=1e-10):
    r = 0
    for k in range(1, min(A.shape) + 1):
        if np.all(brute_compound(A, k) > tol):
            r = k
        else:
            break
    return r


vectors = st.lists(st.sampled_from([-2.0, -1.0, 0.0, 0.0, 1.0, 3.0]), min_size=1, max_size=9)


class TestCounts:
    def test_example(self):
        x = [-1, 0, 0, 2, -3]
        assert s_minus(x) == 2
        assert s_plus(x) == 4

    def test_zero_vector(self):
        assert s_minus(np.zeros(5)) == 0
        assert s_plus(np.zeros(5)) == 4

    def test_tolerance(self):
        x = [1.0, 1e-14, -1.0]
        assert s_plus(x) == 1
        assert s_plus(x, tol=1e-12) == 1
        assert s_minus([1.0, -1e-14, 1.0], tol=1e-12) == 0
        assert s_plus([1.0, 1e-14, 1.0], tol=1e-12) == 2
        assert s_plus([1.0, 1e-14, 1.0]) == 0

    @settings(max_examples=300, deadline=None)
    @given(vectors)
    def test_against_brute(self, x):
        assert s_minus(x) == brute_s_minus(x)
        best, ends = brute_s_plus_with_ends(x)
        assert s_plus(x) == best
        assert 0 <= s_minus(x) <= s_plus(x) <= len(x) - 1
        if any(v != 0 for v in x):
            f, l = end_signs_plus(np.array(x))
            assert (f[0], l[0]) in ends
            # the ends of a maximizing filling are forced
            assert len(ends) == 1

    def test_batch_matches_scalar(self, rng):
        X = rng.integers(-1, 2, size=(200, 7)).astype(float)
        assert np.array_equal(s_minus_batch(X), [s_minus(x) for x in X])
        assert np.array_equal(s_plus_batch(X), [s_plus(x) for x in X])

    def test_stats(self):
        st_ = sign_stats([0, -1, 0, 2, 0])
        assert (st_.s_minus, st_.s_plus) == (1, 3)
        assert (st_.first_nonzero_sign, st_.last_nonzero_sign) == (-1, 1)


class TestDuality:
    def test_ones(self):
        v = duality_check([1, 1, 1])
        assert v.passed
        assert v.witness["s_minus_x"] == 0 and v.witness["s_plus_Dx"] == 2

    def test_example(self):
        v = duality_check([-1, 0, 0, 2, -3])
        assert v.passed
        assert v.witness["s_plus_Dx"] == 2

    @pytest.mark.parametrize("n", range(1, 7))
    def test_exhaustive(self, n):
        X = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=n)))
        X = X[np.any(X != 0, axis=1)]
        D = alternating_signs(n)
        assert np.all(s_minus_batch(X) + s_plus_batch(X * D) == n - 1)


class TestClassify:
    def test_2x2(self):
        sr = classify_sign_regularity([[1, 2], [3, 4]])
        assert sr.per_order[1] == "SSR(+1)"
        assert sr.per_order[2] == "SSR(-1)"
        assert sr.max_tp_order == 1

    def test_tp_2x3(self):
        A = np.array([[2.0, 1, 1], [1, 3, 4]])
        sr = classify_sign_regularity(A)
        assert np.allclose(mult_compound(A, 2), [[5, 7, 1]])
        assert sr.max_tp_order == 2 and sr.max_tn_order == 2

    def test_not_tn2(self):
        sr = classify_sign_regularity([[2, 1, 1], [1, 2, 1], [1, 1, 2]])
        assert sr.max_tn_order == 1
        assert sr.minor_range[2][0] == pytest.approx(-1.0)

    def test_zero_level(self):
        sr = classify_sign_regularity(np.zeros((2, 2)))
        assert sr.per_order[1] == "SR(0)"

    def test_identity_sr(self):
        sr = classify_sign_regularity(np.eye(3))
        assert sr.per_order[1] == "SR(+1)"
        assert sr.max_tn_order == 3 and sr.max_tp_order == 0

    def test_bad_max_k(self):
        with pytest.raises(DimensionError):
            classify_sign_regularity(np.eye(3), 4)

    def test_implications(self, rng):
        for _ in range(50):
            A = rng.standard_normal((4, 4)) if rng.random() < 0.5 else random_tp(rng, 4)
            sr = classify_sign_regularity(A)
            for k in sr.per_order:
                if sr.is_ssr(k):
                    assert sr.is_sr(k)
            assert sr.max_tp_order <= sr.max_tn_order

    def test_against_brute(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 5))
            A = random_tp(rng, n) if rng.random() < 0.5 else rng.uniform(-0.2, 1, (n, n))
            assert classify_sign_regularity(A).max_tp_order == brute_tp_order(A)

    def test_product_closure(self, rng):
        for _ in range(20):
            A, B = random_tp(rng, 4), random_tp(rng, 4)
            assert classify_sign_regularity(A @ B).max_tp_order == 4


class TestFastTP:
    def test_example(self):
        A = np.array([[3.0, 1, 2], [2, 1, 3], [1, 3, 10]])
        vals, pairs = contiguous_minors(A, 2)
        assert np.allclose(sorted(vals), [1, 1, 1, 5])
        assert tp_recognize_fast(A, 2).passed
        assert np.all(mult_compound(A, 2) > 0)

    def test_identity(self):
        v = tp_recognize_fast(np.eye(3), 2)
        assert not v.passed

    def test_initial_minor_count(self):
        vals, _ = initial_minors(np.ones((3, 3)), 1)
        assert len(vals) == 5

    def test_random_tp(self, rng):
        A = random_tp(rng, 5)
        assert tp_recognize_fast(A, 3).passed
        assert classify_sign_regularity(A, 3).max_tp_order >= 3

    def test_agreement_500(self, rng):
        agree = 0
        seen = {True: 0, False: 0}
        for i in range(500):
            n = int(rng.integers(2, 7))
            kind = i % 4
            if kind == 0:
                A = random_tp(rng, n)
            elif kind == 1:
                A = random_tp(rng, n) * (1 + 0.3 * rng.standard_normal((n, n)))
            elif kind == 2:
                A = rng.uniform(0.0, 1.0, (n, n))
            else:
                A = random_tp(rng, n) + rng.uniform(-0.05, 0.05) * np.eye(n)[::-1]
            k = int(rng.integers(1, n + 1))
            fast = tp_recognize_fast(A, k).passed
            full = classify_sign_regularity(A, k).max_tp_order >= k
            seen[full] += 1
            agree += fast == full
        assert agree == 500
        assert seen[True] > 50 and seen[False] > 50


class TestSVDP:
    def test_2x2_cases(self, rng):
        for _ in range(100):
            b, c = rng.uniform(0.1, 2, 2)
            d = b * c + rng.uniform(0.01, 2)
            A = np.array([[1, b], [c, d]])
            x = rng.standard_normal(2)
            v = svdp_check(A, x, "TP")
            assert v.passed
            assert v.witness["s_plus_Ax"] <= v.witness["s_minus_x"]

    def test_sr2_example(self, rng):
        A = np.array([[3.0, 2, -1], [3, 5, -1], [3, 5, 0]])
        sr = classify_sign_regularity(A, 2)
        assert sr.is_sr(2)
        n_tested = 0
        while n_tested < 500:
            x = rng.standard_normal(3)
            if s_minus(x) > 1:
                continue
            n_tested += 1
            v = svdp_check(A, x, "SR", k=2)
            assert v.passed and v.witness["s_minus_Ax"] <= 1

    def test_identity(self, rng):
        for _ in range(50):
            x = rng.integers(-2, 3, 6).astype(float)
            if not np.any(x):
                continue
            assert svdp_check(np.eye(6), x, "TP").witness["s_minus_Ax"] == s_minus(x)

    def test_vacuous(self):
        v = svdp_check(np.eye(3), [1, -1, 1], "SSR", k=2)
        assert v.passed and "vacuous" in v.notes[0]

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            svdp_check(np.ones((2, 2)), [1, 1], "SR", k=1)

    def test_needs_k(self):
        with pytest.raises(PreconditionError):
            svdp_check(np.eye(2), [1, 1], "SR")

    def test_orientation_failure(self):
        # s+(Ax) = s-(x) = 0 but the sign flips: -I is not TP
        v = svdp_check(-np.eye(2), [1.0, 1.0], "TP")
        assert not v.passed and not v.witness["orientation_ok"]

    def test_batch_matches_single(self, rng):
        A = random_tp(rng, 4)
        X = rng.standard_normal((100, 4))
        ok, _ = svdp_tp_batch(A, X)
        assert all(ok[i] == svdp_check(A, X[i], "TP").passed for i in range(100))

    def test_corollary_fuzz(self, rng):
        n = 4
        J = np.eye(n)[::-1]
        for base in range(3):
            T = random_tp(rng, n)
            for A in (T, T @ J, J @ T):
                sr = classify_sign_regularity(A)
                assert all(sr.is_ssr(j) for j in range(1, n + 1))
                X = rng.standard_normal((10_000, n))
                X[rng.random(X.shape) < 0.2] = 0.0
                X = X[np.any(X != 0, axis=1)]
                Y = X @ A.T
                sm = s_minus_batch(X)
                assert np.all(s_minus_batch(Y) <= sm)
                assert np.all(s_plus_batch(Y) <= sm)
