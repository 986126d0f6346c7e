"""Lexicographic enumeration and ranking of the index sets Q(k, n).

Index-set elements are 1-based (``(1, 2, 3)`` is the first element of
Q(3, 4)); ranks are 0-based positions in lexicographic order.
"""
from __future__ import annotations

import itertools
import os
from functools import lru_cache
from math import comb

from .errors import DimensionError, GuardrailError, IndexSetError

IndexSet = tuple[int, ...]

MAX_N = 64
DEFAULT_MAX_COUNT = 10**6


def max_count() -> int:
    """Cap on C(n, k) per call; ``COMPOUNDKIT_MAX_DIM`` overrides it."""
    raw = os.environ.get("COMPOUNDKIT_MAX_DIM")
    if raw is None:
        return DEFAULT_MAX_COUNT
    try:
        value = int(float(raw))
    except ValueError as exc:
        raise GuardrailError(f"COMPOUNDKIT_MAX_DIM is not a number: {raw!r}") from exc
    if value < 1:
        raise GuardrailError("COMPOUNDKIT_MAX_DIM must be positive")
    return value


def check_order(k: int, n: int) -> int:
    """Validate 1 <= k <= n <= 64 and the C(n, k) guardrail; return C(n, k)."""
    if int(k) != k or int(n) != n:
        raise DimensionError(f"k and n must be integers, got k={k!r}, n={n!r}")
    k, n = int(k), int(n)
    if n < 1 or k < 1 or k > n:
        raise DimensionError(f"need 1 <= k <= n, got k={k}, n={n}")
    if n > MAX_N:
        raise GuardrailError(f"n={n} exceeds the limit n <= {MAX_N}")
    count = comb(n, k)
    limit = max_count()
    if count > limit:
        raise GuardrailError(f"C({n},{k}) = {count} exceeds the limit {limit}")
    return count


def enumerate_index_sets(k: int, n: int) -> tuple[IndexSet, ...]:
    """All of Q(k, n) in lexicographic order."""
    check_order(k, n)
    return _enumerate(int(k), int(n))


@lru_cache(maxsize=256)
def _enumerate(k: int, n: int) -> tuple[IndexSet, ...]:
    return tuple(itertools.combinations(range(1, n + 1), k))


@lru_cache(maxsize=256)
def rank_table(k: int, n: int) -> dict[IndexSet, int]:
    check_order(k, n)
    return {s: r for r, s in enumerate(_enumerate(k, n))}


def validate(s, n: int) -> IndexSet:
    s = tuple(int(v) for v in s)
    if not s:
        raise IndexSetError("index set is empty")
    if any(b <= a for a, b in zip(s, s[1:])):
        raise IndexSetError(f"index set {s} is not strictly increasing")
    if s[0] < 1 or s[-1] > n:
        raise IndexSetError(f"index set {s} not contained in 1..{n}")
    return s


def rank(s, n: int) -> int:
    """0-based lexicographic position of ``s`` within Q(len(s), n)."""
    s = validate(s, n)
    k = len(s)
    r = 0
    prev = 0
    for i, c in enumerate(s, start=1):
        # sets that agree on the first i-1 entries but have a smaller i-th entry
        for j in range(prev + 1, c):
            r += comb(n - j, k - i)
        prev = c
    return r


def unrank(r: int, k: int, n: int) -> IndexSet:
    total = comb(n, k) if 1 <= k <= n else 0
    if total == 0:
        raise DimensionError(f"need 1 <= k <= n, got k={k}, n={n}")
    if int(r) != r or not 0 <= r < total:
        raise IndexSetError(f"rank {r} out of range [0, {total})")
    r = int(r)
    out = []
    c = 0
    for i in range(1, k + 1):
        c += 1
        while True:
            block = comb(n - c, k - i)
            if r < block:
                break
            r -= block
            c += 1
        out.append(c)
    return tuple(out)


def is_contiguous(s) -> bool:
    return all(b == a + 1 for a, b in zip(s, s[1:]))


def contiguous_sets(k: int, n: int) -> tuple[IndexSet, ...]:
    return tuple(tuple(range(p, p + k)) for p in range(1, n - k + 2))


def label(s) -> str:
    return "(" + ",".join(str(v) for v in s) + ")"
