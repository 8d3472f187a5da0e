"""Closed-form evaluators for e_r(d, m), its ranges, thresholds and point bounds.

Every quantity is computed in exact integer or rational arithmetic.  Fractional
powers go through integer k-th roots rounded outward, so comparisons such as
``q >= threshold`` are never decided by floating point.

The evaluators are total: bound functions return their value together with a
flag saying whether the hypotheses of the underlying result hold, and callers
decide what to assert.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .weight_combinatorics import H, binom, omega_size, omega_unrank, pi


class RangeError(ValueError):
    pass


def iroot_floor(n: int, k: int) -> int:
    """Largest t >= 0 with t**k <= n."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2:
        return n
    t = 1 << ((n.bit_length() + k - 1) // k)  # t**k > n
    while True:
        u = ((k - 1) * t + n // t ** (k - 1)) // k
        if u >= t:
            break
        t = u
    while t**k > n:
        t -= 1
    while (t + 1) ** k <= n:
        t += 1
    return t


def iroot_ceil(n: int, k: int) -> int:
    """Least t >= 0 with t**k >= n."""
    t = iroot_floor(n, k)
    return t if t**k == n else t + 1


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _check_r(d: int, m: int, r: int) -> int:
    total = omega_size(d, m)
    if not 1 <= r <= total:
        raise RangeError(f"r={r} outside 1..{total} for d={d}, m={m}")
    return total


# -- range arithmetic -----------------------------------------------------------

@dataclass(frozen=True)
class RangeParams:
    l: int
    c: int | None
    j: int


def block_start(d: int, m: int, l: int) -> int:
    """C(m+d, d) - C(m+d+1-l, d): the r-range of block l is (block_start(l), block_start(l+1)]."""
    return omega_size(d, m) - binom(m + d + 1 - l, d)


def range_l(d: int, m: int, r: int) -> int:
    """The unique l in [1, m+1] whose block contains r."""
    total = _check_r(d, m, r)
    for l in range(1, m + 2):
        if block_start(d, m, l) < r <= total - binom(m + d - l, d):
            return l
    raise RangeError(f"no block contains r={r}")  # unreachable: blocks partition 1..total


def c_interval(d: int, m: int, l: int, c: int) -> tuple[int, int]:
    """Half-open (lower, upper] r-interval of the (l, c) cell."""
    base = block_start(d, m, l)
    return base + binom(m + d - l - c, d - c - 1), base + binom(m + d + 1 - l - c, d - c)


def range_lc(d: int, m: int, r: int) -> RangeParams:
    """(l, c, j) for r.  c is None when l = m + 1, i.e. r = C(m+d, d)."""
    l = range_l(d, m, r)
    j = r - block_start(d, m, l)
    if l == m + 1:
        return RangeParams(l, None, j)
    for c in range(d, 0, -1):
        lo, hi = c_interval(d, m, l, c)
        if lo < r <= hi:
            return RangeParams(l, c, j)
    raise RangeError(f"no c for r={r}")  # unreachable


# -- e_r formulas ---------------------------------------------------------------

def bdg_terms(d: int, m: int, r: int, q: int) -> tuple[int, int]:
    """(H_j(d-1, m-l+1), pi_{m-l}) for the r-th range."""
    l = range_l(d, m, r)
    j = r - block_start(d, m, l)
    return H(j, d - 1, m - l + 1, q), pi(m - l, q)


def e_bdg(d: int, m: int, r: int, q: int) -> int:
    """H_j(d-1, m-l+1) + pi_{m-l}."""
    h, p = bdg_terms(d, m, r, q)
    return h + p


def e_bt(d: int, m: int, r: int, q: int) -> int:
    """sum_{i=l}^m beta_i (pi_{m-i} - pi_{m-i-l}) + pi_{m-2l}, l the first nonzero position."""
    _check_r(d, m, r)
    beta = omega_unrank(d, m, r)
    l = next(i for i, b in enumerate(beta, start=1) if b)
    total = sum(beta[i - 1] * (pi(m - i, q) - pi(m - i - l, q)) for i in range(l, m + 1))
    return total + pi(m - 2 * l, q)


def e_affine(d: int, m: int, r: int, q: int) -> int:
    _check_r(d, m, r)
    return H(r, d, m, q)


# -- thresholds -----------------------------------------------------------------

def q_threshold_lc(d: int, m: int, l: int, c: int) -> int:
    """Least integer q0 with q >= max{2(m-l+1)c^2 + 1, 8 d^{l+1} / c, 164 c^{14/3}} for all q >= q0."""
    t1 = 2 * (m - l + 1) * c * c + 1
    t2 = ceil_div(8 * d ** (l + 1), c)
    t3 = iroot_ceil(164**3 * c**14, 3)
    return max(t1, t2, t3)


def q_threshold_main(d: int, m: int, r: int) -> int:
    p = range_lc(d, m, r)
    if p.c is None:
        raise RangeError(f"r={r} is the top index; no (l, c) cell applies")
    return q_threshold_lc(d, m, p.l, p.c)


def q_threshold_l1(d: int, e: int) -> Fraction:
    """max{d + e + (e^2 - 1)/(d - e - 1), d - 1 + e^2 - e} as an exact rational."""
    if d < 2 or not 0 <= e <= d - 2:
        raise RangeError(f"need d >= 2 and 0 <= e <= d-2 (got d={d}, e={e})")
    return max(d + e + Fraction(e * e - 1, d - e - 1), Fraction(d - 1 + e * e - e))


def l1_threshold_holds(q: int, d: int, e: int) -> bool:
    """q >= q_threshold_l1(d, e) decided by cross-multiplication only."""
    if d < 2 or not 0 <= e <= d - 2:
        raise RangeError(f"need d >= 2 and 0 <= e <= d-2 (got d={d}, e={e})")
    den = d - e - 1
    return (q - d - e) * den >= e * e - 1 and q >= d - 1 + e * e - e


def l1_exponent(m: int, r: int, d: int) -> int | None:
    """The e in [0, d-2] with C(m+e, e) < r <= C(m+e+1, e+1), if any."""
    for e in range(0, d - 1):
        if binom(m + e, e) < r <= binom(m + e + 1, e + 1):
            return e
    return None


# -- predicted geometry and point bounds ----------------------------------------

def predicted_dim_bound(d: int, m: int, r: int) -> int:
    """m - l; -1 (empty vanishing set) in the top block."""
    return m - range_l(d, m, r)


def predicted_deg_bound(d: int, m: int, r: int) -> int:
    p = range_lc(d, m, r)
    if p.c is None:
        raise RangeError("degree bound needs 1 <= l <= m")
    return p.c


class Bound(NamedTuple):
    value: int
    hypothesis: bool


class Interval(NamedTuple):
    lower: int
    upper: int
    hypothesis: bool


def low_dim_point_bound(d: int, m: int, k: int, q: int) -> Bound:
    """d^{m-k} pi_k: points on components of dimension <= k (needs q >= d)."""
    return Bound(d ** (m - k) * pi(k, q), 0 <= k <= m and q >= d)


def irreducible_count_interval(k: int, delta: int, q: int) -> Interval:
    """Integer interval containing every count within 3.2 delta^{13/3} q^{k-1/2} of q^k.

    The half-width is bounded above via (3.2 delta^{13/3} q^{k-1/2})^6 =
    (16/5)^6 delta^26 q^{6k-3}, so the interval is only ever widened.
    Bounds are inclusive.  k must be non-negative.
    """
    if k < 0:
        raise ValueError("dimension k must be >= 0")
    centre = q**k
    # sixth power of the half-width: (16/5)^6 delta^26 q^(6k-3); 6k-3 is odd, never 0
    num, den = 16**6 * delta**26, 5**6
    if k >= 1:
        num *= q ** (6 * k - 3)
    else:
        den *= q ** (3 - 6 * k)
    width = iroot_ceil(ceil_div(num, den), 6)
    ok = k > 0 and delta >= 2 and q > 2 * (k + 1) * delta * delta
    return Interval(centre - width, centre + width, ok)


def nonirreducible_bound(k: int, delta: int, q: int) -> Bound:
    """Exclusive upper bound delta^2/2 q^{k-1}, rounded up to an integer."""
    if k >= 1:
        value = ceil_div(delta * delta * q ** (k - 1), 2)
    else:
        value = ceil_div(delta * delta, 2 * q ** (1 - k))
    return Bound(value, k >= 0 and delta >= 1)


def no_linear_factor_bound(d: int, m: int, q: int) -> Bound:
    """(d-1) q^{m-1} + d q^{m-2} + pi_{m-3} for a form without linear factors."""
    exact = (d - 1) * Fraction(q) ** (m - 1) + d * Fraction(q) ** (m - 2) + pi(m - 3, q)
    value = exact.numerator // exact.denominator
    if exact.denominator != 1:
        value += 1
    return Bound(value, d >= 2 and m >= 1)


def hyperplane_product_bound(a: int, q: int, whole_space: bool = True) -> int:
    """a q + 1, or a q when the set is known to be a proper subset of P^m(F_q)."""
    return a * q + (1 if whole_space else 0)


# names used by the operation list
cafure_matera_interval = irreducible_count_interval
homma_kim_bound = no_linear_factor_bound
