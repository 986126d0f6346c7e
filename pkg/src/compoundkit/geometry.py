"""Parallelotope volumes from Gram determinants and compound vectors."""
from __future__ import annotations

import numpy as np

from .compound import as_matrix, mult_compound
from .errors import DimensionError

_DEGENERATE = 1e-14


def _generators(X) -> np.ndarray:
    X = as_matrix(X, "X")
    if X.shape[1] > X.shape[0]:
        raise DimensionError(f"need k <= n generators, got shape {X.shape}")
    return X


def gram(X) -> np.ndarray:
    X = _generators(X)
    return X.T @ X


def _hadamard(X) -> float:
    return float(np.prod(np.linalg.norm(X, axis=0)))


def volume(X) -> float:
    """Volume of the parallelotope spanned by the columns of X, as the
    Euclidean norm of the compound vector X^(k)."""
    X = _generators(X)
    v = float(np.linalg.norm(mult_compound(X, X.shape[1])[:, 0]))
    return 0.0 if v <= _DEGENERATE * _hadamard(X) else v


def volume_with_check(X) -> dict:
    """Both routes (compound norm and sqrt det Gram) and their discrepancy."""
    X = _generators(X)
    v1 = volume(X)
    g = float(np.linalg.det(gram(X)))
    v2 = float(np.sqrt(max(g, 0.0)))
    if v2 <= _DEGENERATE * _hadamard(X):
        v2 = 0.0
    return {"volume": v1, "volume_gram": v2, "discrepancy": abs(v1 - v2)}


def volume_recursive(X) -> float:
    """Base-times-altitude recursion; altitudes via least squares."""
    X = _generators(X)
    vol = float(np.linalg.norm(X[:, 0]))
    for j in range(1, X.shape[1]):
        base = X[:, :j]
        coef = np.linalg.lstsq(base, X[:, j], rcond=None)[0]
        vol *= float(np.linalg.norm(X[:, j] - base @ coef))
    return vol
