"""Exact integer combinatorics behind the weight formulas.

Compositions ``Omega(d, m)`` are tuples of ``m + 1`` non-negative integers
summing to ``d``, ranked from 1 in *descending* lexicographic order, so rank 1
is ``(d, 0, ..., 0)`` and the last rank ``C(m+d, d)`` is ``(0, ..., 0, d)``.

All boundary conventions live here and nowhere else:

* ``binom(n, k) == 0`` unless ``0 <= k <= n``;
* ``pi(m, q) == 0`` for ``m < 0``;
* ``H(0, d, m, q) == q**m`` and ``H(r, d, m, q) == 0`` for ``r > C(m+d, d)``.
"""

from __future__ import annotations

import functools
import math
from typing import Iterator


def binom(n: int, k: int) -> int:
    """Binomial coefficient, total: 0 whenever k < 0, n < 0 or k > n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


def pi(m: int, q: int) -> int:
    """Number of points of P^m(F_q): 1 + q + ... + q^m, and 0 for m < 0."""
    if m < 0:
        return 0
    return (q ** (m + 1) - 1) // (q - 1)


def gaussian_binom(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def omega_size(d: int, m: int) -> int:
    """|Omega(d, m)| = C(m+d, d)."""
    return binom(m + d, d)


def compositions(d: int, m: int) -> Iterator[tuple[int, ...]]:
    """All of Omega(d, m) in descending lexicographic order, by direct recursion.

    Materialises nothing beyond the current prefix; used as the brute-force
    cross-check for :func:`omega_unrank`.
    """
    if m == 0:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in compositions(d - first, m - 1):
            yield (first,) + rest


@functools.lru_cache(maxsize=65536)
def omega_unrank(d: int, m: int, r: int) -> tuple[int, ...]:
    """The r-th largest element of Omega(d, m), 1-indexed.

    Greedy: at each coordinate try values from the remaining budget downwards
    and skip over the block of completions that precede the target.
    """
    total = omega_size(d, m)
    if not 1 <= r <= total:
        raise ValueError(f"rank r={r} outside 1..{total} for Omega({d}, {m})")
    out = []
    remaining = d
    skip = r - 1
    for k in range(m):
        slots = m - k  # coordinates after this one
        for v in range(remaining, -1, -1):
            block = binom(remaining - v + slots - 1, slots - 1)
            if skip < block:
                out.append(v)
                remaining -= v
                break
            skip -= block
    out.append(remaining)
    return tuple(out)


def omega_rank(w) -> int:
    """Rank of a composition: ``1 + sum_k C(m-k+d-(a_1+..+a_k), m-k+1)``."""
    w = tuple(w)
    if any(a < 0 for a in w) or not w:
        raise ValueError(f"{w} is not a composition")
    m = len(w) - 1
    d = sum(w)
    r = 1
    prefix = 0
    for k in range(1, m + 1):
        prefix += w[k - 1]
        r += binom(m - k + d - prefix, m - k + 1)
    return r


def weight_of(beta, q: int) -> int:
    """sum_{i=1}^{m} beta_i q^{m-i}; the last coordinate does not contribute."""
    m = len(beta) - 1
    return sum(b * q ** (m - 1 - i) for i, b in enumerate(beta[:m]))


def H(r: int, d: int, m: int, q: int) -> int:
    """H_r(d, m) evaluated at the integer q."""
    if r < 0:
        raise ValueError(f"H_r needs r >= 0, got {r}")
    if r == 0:
        return q**m
    if r > omega_size(d, m):
        return 0
    return weight_of(omega_unrank(d, m, r), q)


def h_decompose(r: int, d: int, m: int) -> tuple[int, ...]:
    """Exponents a_1 <= ... <= a_d in [-1, m-1] with H_r(d, m) = sum floor(q^{a_j}).

    Coordinate ``i`` (1-based, i <= m) of omega_r(d, m) contributes ``beta_i``
    copies of ``m - i``; the last coordinate contributes copies of -1.
    """
    beta = omega_unrank(d, m, r)
    exps = []
    for i, b in enumerate(beta[:m], start=1):
        exps.extend([m - i] * b)
    exps.extend([-1] * beta[m])
    return tuple(sorted(exps))


def floor_power_sum(exponents, q: int) -> int:
    """sum floor(q^a) with floor(q^-1) == 0."""
    return sum(q**a for a in exponents if a >= 0)


def rank_from_exponents(exponents, d: int, m: int) -> int:
    """C(m+d, d) - sum_j C(a_j + j, j) over the ascending exponent list."""
    return omega_size(d, m) - sum(binom(a + j, j) for j, a in enumerate(exponents, start=1))
