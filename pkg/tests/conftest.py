import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def laplace_det(M):
    """Recursive cofactor expansion along the first row."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    if n == 1:
        return M[0, 0]
    total = 0.0
    for j in range(n):
        sub = np.delete(M[1:], j, axis=1)
        total += (-1) ** j * M[0, j] * laplace_det(sub)
    return total


def brute_compound(A, k):
    """Compound by enumerating index sets with itertools and Laplace dets."""
    A = np.asarray(A, dtype=float)
    rows = list(itertools.combinations(range(A.shape[0]), k))
    cols = list(itertools.combinations(range(A.shape[1]), k))
    return np.array([[laplace_det(A[np.ix_(r, c)]) for c in cols] for r in rows])


def random_tp(rng, n, low=0.2, high=1.5):
    """Totally positive matrix as a product of elementary bidiagonal
    factors with positive parameters and a positive diagonal."""
    M = np.diag(rng.uniform(0.5, 2.0, n))
    for i in range(n - 1, 0, -1):
        for j in range(i, n):
            L = np.eye(n)
            L[j, j - 1] = rng.uniform(low, high)
            U = np.eye(n)
            U[j - 1, j] = rng.uniform(low, high)
            M = L @ M @ U
    return M
