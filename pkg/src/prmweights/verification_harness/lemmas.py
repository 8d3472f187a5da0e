"""Property suites for the combinatorial and geometric lemmas.

A grid is a dict mapping parameter names to value lists (or ``"a..b"``
inclusive ranges), or a list of such dicts whose expansions are concatenated.
``q`` entries may be integers or offsets from d such as ``"d"`` or ``"d+1"``.

Each grid point expands into the inner tuples the lemma quantifies over
(all r, all e, all s-tuples, ...), and every inner tuple is one check in the
report.  A grid point outside a lemma's hypotheses raises
:class:`HypothesisError` instead of being skipped.  A conditional lemma
whose premise fails for a tuple reports it as ``premise_not_met`` in the notes
rather than as a pass.
"""

from __future__ import annotations

import itertools
import random
import re
import time
from dataclasses import dataclass
from typing import Callable, Iterator

from ..conjecture_formulas import block_start, e_bdg, range_l
from ..finite_field import FieldError, field_of_order, prime_power
from ..point_geometry import (
    HOMOGENEOUS,
    PROJECTIVE,
    monomial_basis,
    move_linear_subspace_to_standard,
    projective_transform,
    standard_table,
)
from ..search_oracle import (
    contains_linear_subspace,
    hyperplane_section_max,
    iter_rref_forms,
    splitting_profile,
    subspace_zero_mask,
)
from ..weight_combinatorics import (
    H,
    binom,
    compositions,
    floor_power_sum,
    h_decompose,
    omega_rank,
    omega_size,
    omega_unrank,
    pi,
    rank_from_exponents,
)
from .report import SweepReport


class HypothesisError(ValueError):
    """A grid point violates the hypotheses of the lemma being checked."""


class UnknownLemma(KeyError):
    pass


# -- grids -------------------------------------------------------------------------

_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")
_QEXPR = re.compile(r"^\s*d\s*(?:([+-])\s*(\d+))?\s*$")


def _values(v) -> list:
    if isinstance(v, str):
        mo = _RANGE.match(v)
        if mo:
            return list(range(int(mo.group(1)), int(mo.group(2)) + 1))
        return [v]
    if isinstance(v, (list, tuple)):
        out = []
        for x in v:
            out.extend(_values(x) if isinstance(x, str) and _RANGE.match(x) else [x])
        return out
    return [v]


def resolve_q(spec, point: dict) -> int:
    if isinstance(spec, int):
        return spec
    mo = _QEXPR.match(str(spec))
    if not mo:
        raise ValueError(f"cannot read q specification {spec!r}")
    if "d" not in point:
        raise ValueError(f"q={spec!r} refers to d, which the grid does not set")
    off = int(mo.group(2) or 0)
    return point["d"] + (off if mo.group(1) != "-" else -off)


def expand_grid(grid) -> list[dict]:
    if isinstance(grid, (list, tuple)):
        return [pt for g in grid for pt in expand_grid(g)]
    keys = sorted(k for k in grid if k != "q")
    out = []
    for combo in itertools.product(*(_values(grid[k]) for k in keys)):
        base = dict(zip(keys, combo))
        if "q" in grid:
            seen = []
            for qs in _values(grid["q"]):
                q = resolve_q(qs, base)
                if q not in seen:  # "d+1" and 11 may coincide
                    seen.append(q)
                    out.append({**base, "q": q})
        else:
            out.append(base)
    return out


# -- lemma registry -------------------------------------------------------------------

Check = tuple  # (ok, params, detail)


@dataclass(frozen=True)
class Lemma:
    id: str
    summary: str
    default_grid: object
    hypothesis: Callable[[dict], str | None]
    checks: Callable[[dict], Iterator[Check]]


def _need(cond: bool, msg: str) -> str | None:
    return None if cond else msg


def _field_q(pt) -> str | None:
    return _need(pt.get("q", 2) >= 2, "q must be >= 2")


def _prime_power_q(pt) -> str | None:
    try:
        prime_power(pt["q"])
    except FieldError:
        return f"q={pt['q']} is not a prime power"
    return None


# r-from-decomposition ---------------------------------------------------------------

def _hyp_decomp(pt):
    return _field_q(pt) or _need(pt["d"] >= 1 and pt["m"] >= 1, "need d, m >= 1") \
        or _need(pt["q"] > pt["d"], "needs q > d")


def _chk_decomp(pt):
    d, m, q = pt["d"], pt["m"], pt["q"]
    for r in range(1, omega_size(d, m) + 1):
        a = h_decompose(r, d, m)
        shape = len(a) == d and all(-1 <= x <= m - 1 for x in a) and list(a) == sorted(a)
        value = floor_power_sum(a, q)
        back = rank_from_exponents(a, d, m)
        yield (shape and value == H(r, d, m, q) and back == r,
               {"d": d, "m": m, "q": q, "r": r},
               {"exponents": list(a), "lhs": value, "rhs": H(r, d, m, q), "rank": back})


# special-value ------------------------------------------------------------------------

def _hyp_special(pt):
    return _field_q(pt) or _need(pt["m"] >= 1 and pt["d"] >= 0, "need m >= 1, d >= 0")


def _chk_special(pt):
    d, m, q = pt["d"], pt["m"], pt["q"]
    for e in range(0, d + 1):
        lhs = H(binom(m + e, e), d, m, q)
        rhs = (d - e) * q ** (m - 1)
        yield lhs == rhs, {"d": d, "m": m, "q": q, "e": e}, {"lhs": lhs, "rhs": rhs}


# rank-formula -------------------------------------------------------------------------

def _hyp_rank(pt):
    return _need(pt["d"] >= 0 and pt["m"] >= 0, "need d, m >= 0")


def _chk_rank(pt):
    d, m = pt["d"], pt["m"]
    for r, w in enumerate(compositions(d, m), start=1):
        u = omega_unrank(d, m, r)
        back = omega_rank(u)
        yield u == w and back == r, {"d": d, "m": m, "r": r}, {"unrank": list(u), "enumerated": list(w),
                                                               "rank": back}


# binomial-inequality -------------------------------------------------------------------

def _hyp_binom(pt):
    return _need(pt["n"] >= 1 and pt["M"] >= 0, "need n >= 1, M >= 0")


def _chk_binom(pt):
    M, n = pt["M"], pt["n"]
    for a in range(0, M + 1):
        for b in range(0, M + 1):
            lhs = binom(M - a, n) + binom(M - b, n)
            rhs = binom(M - a - b, n) + binom(M, n)
            yield lhs <= rhs, {"M": M, "n": n, "a": a, "b": b}, {"lhs": lhs, "rhs": rhs}


# sum-Hsk ------------------------------------------------------------------------------

def _hyp_sum_hsk(pt):
    return _field_q(pt) or _need(pt["l"] >= 1, "need l >= 1") or _need(pt["q"] >= pt["d"] + 1, "needs q >= d+1")


def _chk_sum_hsk(pt):
    d, m, q, l = pt["d"], pt["m"], pt["q"], pt["l"]
    top = omega_size(d, m)
    for s in itertools.product(range(1, top + 1), repeat=l):
        if sum(s) <= (l - 1) * top:
            continue
        r = sum(s) - (l - 1) * top
        lhs = sum(H(x, d, m, q) for x in s)
        rhs = H(r, d, m, q)
        yield lhs <= rhs, {"d": d, "m": m, "q": q, "l": l, "s": list(s)}, {"lhs": lhs, "rhs": rhs}


# sum-Hrk -------------------------------------------------------------------------------

def _hyp_sum_hrk(pt):
    return _field_q(pt) or _need(2 <= pt["l"] <= pt["m"], "needs 2 <= l <= m") \
        or _need(pt["d"] >= 1, "need d >= 1") or _need(pt["q"] >= pt["d"], "needs q >= d")


def _chk_sum_hrk(pt):
    d, m, q, l = pt["d"], pt["m"], pt["q"], pt["l"]
    lo = omega_size(d, m) - binom(m + d + 1 - l, d)
    hi = omega_size(d, m) - binom(m + d - l, d)
    ranges = [range(0, binom(m + d - k, d - 1) + 1) for k in range(1, l + 1)]
    for rs in itertools.product(*ranges):
        r = sum(rs)
        if not lo < r <= hi:
            continue
        rp = r - lo
        lhs = sum(H(x, d - 1, m - k + 1, q) for k, x in enumerate(rs, start=1))
        rhs = H(rp, d - 1, m - l + 1, q)
        yield lhs <= rhs, {"d": d, "m": m, "q": q, "l": l, "r_k": list(rs)}, {"lhs": lhs, "rhs": rhs}


# layer-inequality ------------------------------------------------------------------------

def _hyp_layer(pt):
    return _field_q(pt) or _need(pt["d"] >= 2 and pt["m"] >= 1, "need d >= 2, m >= 1") \
        or _need(pt["q"] >= pt["d"], "needs q >= d")


def _chk_layer(pt):
    d, m, q = pt["d"], pt["m"], pt["q"]
    for e in range(0, d - 1):
        for r in range(binom(m + e, e) + 1, binom(m + d - 1, d - 1) + 1):
            for t in range(0, binom(m + e - 1, e - 1) + 1):
                lhs = H(r, d - 1, m, q)
                rhs = q * H(r - t, d - 1, m - 1, q)
                yield lhs >= rhs, {"d": d, "m": m, "q": q, "e": e, "r": r, "t": t}, {"lhs": lhs, "rhs": rhs}


# relation-Hr ----------------------------------------------------------------------------------

def _hyp_relation(pt):
    return _field_q(pt) or _need(pt["d"] >= 2 and pt["m"] >= 2, "need d >= 2, m >= 2")


def _chk_relation(pt):
    d, m, q = pt["d"], pt["m"], pt["q"]
    for e in range(0, d - 1):
        for r in range(binom(m + e, e) + 1, binom(m + e + 1, e + 1) + 1):
            lhs = H(r, d - 1, m, q) - H(r - binom(m + e, e), d - 1, m - 1, q)
            rhs = (d - 2 - e) * q ** (m - 2) * (q - 1)
            yield lhs == rhs, {"d": d, "m": m, "q": q, "e": e, "r": r}, {"lhs": lhs, "rhs": rhs}


# d-c-shift ---------------------------------------------------------------------------------------

def _hyp_shift(pt):
    return _field_q(pt) or _need(pt["d"] >= 2 and pt["m"] >= 1, "need d >= 2, m >= 1") \
        or _need(pt["q"] >= pt["d"], "needs q >= d")


def _chk_shift(pt):
    d, m, q = pt["d"], pt["m"], pt["q"]
    for c in range(1, d):
        for r in range(1, binom(m + d - c, d - c) + 1):
            lhs = H(r, d - c, m, q) + c * q ** (m - 1)
            rhs = H(r, d, m, q)
            yield lhs <= rhs, {"d": d, "m": m, "q": q, "c": c, "r": r}, {"lhs": lhs, "rhs": rhs}


# beta1-bound --------------------------------------------------------------------------------------

def _hyp_beta1(pt):
    return _need(pt["d"] >= 1 and pt["m"] >= 0, "need d >= 1, m >= 0")


def _chk_beta1(pt):
    d, m = pt["d"], pt["m"]
    for r in range(1, omega_size(d - 1, m) + 1):
        b1 = omega_unrank(d - 1, m, r)[0]
        for k in range(0, d + 1):
            left = b1 >= k
            right = r <= binom(m + d - 1 - k, d - 1 - k)
            yield left == right, {"d": d, "m": m, "r": r, "k": k}, {"beta1": b1, "lhs": left, "rhs": right}


# leading-term --------------------------------------------------------------------------------------

def _hyp_leading(pt):
    return _field_q(pt) or _need(pt["d"] >= 1 and pt["m"] >= 1, "need d, m >= 1") \
        or _need(pt["q"] >= pt["d"], "needs q >= d")


def _chk_leading(pt):
    d, m, q = pt["d"], pt["m"], pt["q"]
    for l in range(1, m + 1):
        base = block_start(d, m, l)
        for c in range(1, d + 1):
            for r in range(base + 1, base + binom(m + d + 1 - l - c, d - c) + 1):
                lhs = c * q ** (m - l)
                rhs = e_bdg(d, m, r, q)
                yield lhs < rhs, {"d": d, "m": m, "q": q, "l": l, "c": c, "r": r}, {"lhs": lhs, "rhs": rhs}


def _chk_leading_weak(pt):
    """c q^{m-l} <= e_bdg on every cell, strictly when l < m.

    At l = m the strict form breaks: the cell value is exactly c.
    """
    for ok, params, detail in _chk_leading(pt):
        if params["l"] == params["m"]:
            ok = detail["lhs"] <= detail["rhs"]
        yield ok, params, detail


# any-hyperplane ---------------------------------------------------------------------------------------

ANY_HYPERPLANE_EXHAUSTIVE_LIMIT = 15  # exhaust all subsets up to 2^15 of them


def _hyp_hyperplane(pt):
    return _need(pt["m"] >= 1, "need m >= 1") or _prime_power_q(pt)


def _chk_hyperplane(pt):
    m, q = pt["m"], pt["q"]
    F = field_of_order(q)
    n = pi(m, q)
    full = (1 << n) - 1
    if n <= ANY_HYPERPLANE_EXHAUSTIVE_LIMIT:
        subsets = range(1 << n)
    else:
        rng = random.Random(pt.get("seed", 0))
        count = pt.get("samples", 2000)
        subsets = [full, 0] + [rng.getrandbits(n) for _ in range(count)]
    for X in subsets:
        a = hyperplane_section_max(X, m, F)
        size = X.bit_count()
        ok = size <= a * q + 1 and (X == full or size <= a * q)
        yield ok, {"m": m, "q": q, "X": X}, {"size": size, "a": a}


# splitting-5.1 ------------------------------------------------------------------------------------------

def _hyp_splitting(pt):
    d, m, q, r = pt["d"], pt["m"], pt["q"], pt["r"]
    return _prime_power_q(pt) or _need(d >= 1 and m >= 1, "need d, m >= 1") or _need(q > d, "needs q > d") \
        or _need(1 <= r < omega_size(d, m), "needs 1 <= r < C(m+d, d) so that l <= m")


def _chk_splitting(pt):
    d, m, q, r = pt["d"], pt["m"], pt["q"], pt["r"]
    F = field_of_order(q)
    table = standard_table(d, m, F, PROJECTIVE)
    basis = monomial_basis(m, d, HOMOGENEOUS)
    l = range_l(d, m, r)
    k = m - l
    for W in iter_rref_forms(table.N, r, q):
        zmask = subspace_zero_mask(W, table)
        L = contains_linear_subspace(W, k, d, m, F, zero_mask=zmask)
        if L is None:
            yield None, {}, {}
            continue
        count = zmask.bit_count()
        change = move_linear_subspace_to_standard(L.rows, m, F)
        W2 = projective_transform(W, change, basis, F)
        moved = subspace_zero_mask(W2, table).bit_count()
        prof = splitting_profile(W2, l, d, m, F)
        bound = prof.bound(d, m, q)
        caps = all(0 <= x <= binom(m + d - i, d - 1) for i, x in enumerate(prof.r_i, start=1))
        ok = moved == count and sum(prof.r_i) == r and caps and count <= bound
        yield ok, {"d": d, "m": m, "q": q, "r": r, "W": [list(x) for x in W.rows]}, \
            {"zeros": count, "bound": bound, "profile": list(prof.r_i), "moved_zeros": moved,
             "line": [list(x) for x in L.rows]}


LEMMAS: dict[str, Lemma] = {}


def _register(*lemmas: Lemma) -> None:
    for lem in lemmas:
        LEMMAS[lem.id] = lem


_register(
    Lemma("r-from-decomposition", "H_r = sum floor(q^a_j) and r = C(m+d,d) - sum C(a_j+j, j)",
          {"d": "1..6", "m": "1..6", "q": ["d+1", "d+2", 11]}, _hyp_decomp, _chk_decomp),
    Lemma("special-value", "H_{C(m+e,e)}(d,m) = (d-e) q^{m-1}",
          {"d": "0..6", "m": "1..6", "q": [3, 4, 5, 7]}, _hyp_special, _chk_special),
    Lemma("rank-formula", "omega_rank inverts omega_unrank, which matches the enumerated order",
          {"d": "0..6", "m": "0..6"}, _hyp_rank, _chk_rank),
    Lemma("binomial-inequality", "C(M-a,n) + C(M-b,n) <= C(M-a-b,n) + C(M,n)",
          {"M": "0..12", "n": "1..12"}, _hyp_binom, _chk_binom),
    Lemma("sum-Hsk", "sum_k H_{s_k}(d,m) <= H_r(d,m), r = sum s_k - (l-1) C(m+d,d)",
          {"d": "1..3", "m": "1..3", "l": "1..3", "q": ["d+1", "d+2"]}, _hyp_sum_hsk, _chk_sum_hsk),
    Lemma("sum-Hrk", "sum_k H_{r_k}(d-1,m-k+1) <= H_{r'}(d-1,m-l+1)",
          [{"d": [1], "m": [2], "l": [2], "q": [2, 3]},
           {"d": [1], "m": [3], "l": "2..3", "q": [2, 3]},
           {"d": "2..3", "m": [2], "l": [2], "q": ["d", "d+1", "d+2"]},
           {"d": "2..3", "m": [3], "l": "2..3", "q": ["d", "d+1", "d+2"]}],
          _hyp_sum_hrk, _chk_sum_hrk),
    Lemma("layer-inequality", "H_r(d-1,m) >= q H_{r-t}(d-1,m-1)",
          {"d": "2..5", "m": "1..4", "q": ["d", "d+1", 7]}, _hyp_layer, _chk_layer),
    Lemma("relation-Hr", "H_r(d-1,m) - H_{r-C(m+e,e)}(d-1,m-1) = (d-2-e) q^{m-2} (q-1)",
          {"d": "2..5", "m": "2..4", "q": ["d", "d+1", 7]}, _hyp_relation, _chk_relation),
    Lemma("d-c-shift", "H_r(d-c,m) + c q^{m-1} <= H_r(d,m)",
          {"d": "2..6", "m": "1..5", "q": ["d", "d+1", 7]}, _hyp_shift, _chk_shift),
    Lemma("beta1-bound", "beta_1(omega_r(d-1,m)) >= k iff r <= C(m+d-1-k, d-1-k)",
          {"d": "1..7", "m": "0..6"}, _hyp_beta1, _chk_beta1),
    Lemma("leading-term", "c q^{m-l} < e_bdg(d,m,r,q) on the (l, c) cells",
          {"d": "1..5", "m": "1..4", "q": ["d+1", "d+2", 7]}, _hyp_leading, _chk_leading),
    Lemma("leading-term-weak", "c q^{m-l} <= e_bdg on the (l, c) cells, strict for l < m",
          {"d": "1..5", "m": "1..4", "q": ["d+1", "d+2", 7]}, _hyp_leading, _chk_leading_weak),
    Lemma("any-hyperplane", "|X| <= a q + 1, and |X| <= a q unless X is all of P^m(F_q)",
          [{"m": [1], "q": [2, 3, 4, 5, 7, 8, 9, 11, 13]}, {"m": [2], "q": [2, 3, 4]},
           {"m": [3], "q": [2]}], _hyp_hyperplane, _chk_hyperplane),
    Lemma("splitting-5.1", "|V(W)| <= sum_i H_{r_i}(d-1,m+1-i) + pi_{m-l} when V(W) contains an (m-l)-flat",
          [{"d": [2], "m": [2], "q": [3], "r": "1..5"},
           {"d": [2], "m": [1], "q": [4, 5], "r": "1..2"},
           {"d": [3], "m": [1], "q": [4, 5], "r": "1..3"},
           {"d": [2], "m": [2], "q": [4], "r": [1, 5]}],
          _hyp_splitting, _chk_splitting),
)

LEMMA_IDS = tuple(LEMMAS)


def run_lemma_suite(lemma_id: str, grid=None, max_failures: int = 100) -> SweepReport:
    """Evaluate a lemma at every inner tuple of the grid.

    Raises :class:`UnknownLemma` for an unknown id and :class:`HypothesisError`
    when any grid point falls outside the lemma's hypotheses.  At most
    ``max_failures`` failing tuples are kept in full; the total is in
    ``notes["failures_total"]``.
    """
    if lemma_id not in LEMMAS:
        raise UnknownLemma(f"unknown lemma id {lemma_id!r}; known: {', '.join(LEMMA_IDS)}")
    lem = LEMMAS[lemma_id]
    grid = lem.default_grid if grid is None else grid
    points = expand_grid(grid)
    for pt in points:
        msg = lem.hypothesis(pt)
        if msg:
            raise HypothesisError(f"{lemma_id}: grid point {pt} violates the hypothesis: {msg}")
    start = time.perf_counter()
    report = SweepReport(target=lemma_id, params={"grid": grid}, exhaustive=True)
    failed = vacuous = 0
    for pt in points:
        for ok, params, detail in lem.checks(pt):
            if ok is None:  # conditional lemma whose premise fails here
                vacuous += 1
                continue
            if ok:
                report.grid_size += 1
                report.passes += 1
            else:
                failed += 1
                if len(report.failures) < max_failures:
                    report.record(False, params, **detail)
                else:
                    report.grid_size += 1
    report.notes["failures_total"] = failed
    report.notes["grid_points"] = len(points)
    report.notes["premise_not_met"] = vacuous
    report.wall_time = time.perf_counter() - start
    return report
