"""Exhaustive and sampled search for e_r, e_r^A, generalized Hamming weights
and the geometric invariants used by the lemma checks.

Subspaces of F_q^N are visited as canonical RREF forms.  Pivot sets run in
colexicographic order; within a pivot set the free entries run as an
odometer, row 0 most significant and, inside a row, the rightmost free
column fastest.  Every search result is the *first* optimum in this order,
which is what makes parallel runs reproduce serial ones exactly.

Search keeps one zero bitset per coefficient vector (looked up from a table
of all q^N vectors when that fits) and descends row by row, abandoning a
prefix as soon as its running intersection can no longer beat the best value
found so far.  Abandoned subtrees still count as visited.
"""

from __future__ import annotations

import functools
import itertools
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .finite_field import FieldSpec, field_new
from .point_geometry import (
    AFFINE,
    HOMOGENEOUS,
    PROJECTIVE,
    MAX_MASK_TABLE,
    EvaluationTable,
    GeometryError,
    MonomialBasis,
    SubspaceBasis,
    enumerate_points,
    intersect,
    linear_span_points,
    monomial_basis,
    rank,
    rref,
    span_sum,
    standard_table,
)
from .weight_combinatorics import H, gaussian_binom, omega_size, pi

DEFAULT_MAX_SUBSPACES = 10**8
WORKERS_ENV = "PRMWEIGHTS_WORKERS"
EXHAUSTIVE = "exhaustive"
SAMPLE = "sample"


class CapExceeded(RuntimeError):
    """The requested enumeration is larger than the feasibility cap."""


def default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError(f"{WORKERS_ENV} must be a positive integer")
    return n


def check_cap(N: int, r: int, q: int, max_subspaces: int | None) -> int:
    total = gaussian_binom(N, r, q)
    cap = DEFAULT_MAX_SUBSPACES if max_subspaces is None else max_subspaces
    if total > cap:
        raise CapExceeded(
            f"{total} subspaces of dimension {r} in F_{q}^{N} exceed the cap {cap}; "
            "raise --max-subspaces or use sample mode"
        )
    return total


# -- canonical enumeration -------------------------------------------------------

def pivot_sets(N: int, r: int) -> list[tuple[int, ...]]:
    """All r-subsets of range(N) in colexicographic order."""
    return sorted(itertools.combinations(range(N), r), key=lambda c: c[::-1])


def free_columns(pivots: tuple[int, ...], N: int) -> list[list[int]]:
    taken = set(pivots)
    return [[c for c in range(p + 1, N) if c not in taken] for p in pivots]


def _row_choices(pivots, N: int, q: int) -> list[list[int]]:
    """Per row, the codes (first coordinate most significant) of all admissible rows in odometer order."""
    out = []
    for p, cols in zip(pivots, free_columns(pivots, N)):
        base = q ** (N - 1 - p)
        weights = [q ** (N - 1 - c) for c in cols]
        out.append([base + sum(a * w for a, w in zip(entries, weights))
                    for entries in itertools.product(range(q), repeat=len(cols))])
    return out


def decode_row(code: int, N: int, q: int) -> tuple[int, ...]:
    out = [0] * N
    for i in range(N - 1, -1, -1):
        code, out[i] = divmod(code, q)
    return tuple(out)


def iter_rref_forms(N: int, r: int, q: int):
    """Yield every r-dimensional subspace of F_q^N as a SubspaceBasis, in canonical order."""
    for piv in pivot_sets(N, r):
        choices = _row_choices(piv, N, q)
        for codes in itertools.product(*choices):
            yield SubspaceBasis(N, tuple(decode_row(c, N, q) for c in codes), piv)


def enumerate_subspaces(N: int, r: int, q: int, visitor=None, max_subspaces: int | None = None) -> int:
    """Call ``visitor`` on each r-dimensional subspace of F_q^N; return the number visited."""
    check_cap(N, r, q, max_subspaces)
    count = 0
    for sub in iter_rref_forms(N, r, q):
        if visitor is not None:
            visitor(sub)
        count += 1
    return count


# -- mask tables -------------------------------------------------------------------

class _LazyMasks:
    """Memoised per-vector zero masks when the full table would be too large."""

    def __init__(self, table: EvaluationTable):
        self.table = table
        self.cache: dict[int, int] = {}

    def __getitem__(self, code: int) -> int:
        mask = self.cache.get(code)
        if mask is None:
            mask = self.table.zero_mask(decode_row(code, self.table.N, self.table.field.q))
            self.cache[code] = mask
        return mask


def span_masks(rows, field: FieldSpec, npoints: int, zero: bool = True) -> list[int]:
    """Masks of u @ rows for every u in F_q^k (u coded first coordinate most significant).

    ``zero=True`` gives zero masks, otherwise support masks.
    """
    F = field
    evals = [[0] * npoints]
    for row in rows:
        scaled = [[F.mul(c, v) for v in row] for c in range(F.q)]
        nxt = []
        for ev in evals:
            nxt.append(ev)
            for c in range(1, F.q):
                nxt.append([F.add(a, b) for a, b in zip(ev, scaled[c])])
        evals = nxt
    out = []
    for ev in evals:
        mask = 0
        for j, v in enumerate(ev):
            if (v == 0) == zero:
                mask |= 1 << j
        out.append(mask)
    return out


def _masks_for_table(table: EvaluationTable):
    if table.field.q ** table.N <= MAX_MASK_TABLE:
        return table.vector_masks()
    return _LazyMasks(table)


@functools.lru_cache(maxsize=32)
def _generator_basis(d: int, m: int, p: int, e: int) -> tuple[tuple[int, ...], ...]:
    """RREF of the PRM generator matrix (rows = evaluated monomials)."""
    F = field_new(p, e)
    table = standard_table(d, m, F, PROJECTIVE)
    return rref(table.values, F, table.npoints).rows


@functools.lru_cache(maxsize=32)
def _problem(problem: tuple):
    """(masks, N, npoints) for a search problem; cached per process."""
    what, d, m, p, e, kind = problem
    F = field_new(p, e)
    if what == "zeros":
        table = standard_table(d, m, F, kind)
        return _masks_for_table(table), table.N, table.npoints
    if what == "support":
        gen = _generator_basis(d, m, p, e)
        npoints = pi(m, F.q)
        if F.q ** len(gen) > MAX_MASK_TABLE:
            raise CapExceeded("message space too large for a support-mask table")
        return span_masks(gen, F, npoints, zero=False), len(gen), npoints
    raise ValueError(f"unknown search problem {what!r}")


# -- branch and bound --------------------------------------------------------------

def _scan_pivot_set(pivots, N, q, masks, npoints, maximize, best):
    """Search one pivot set; return (best, codes or None, visited).

    ``codes`` is set only if a value strictly better than the incoming ``best`` was found.
    """
    r = len(pivots)
    choices = _row_choices(pivots, N, q)
    below = [1] * r
    for i in range(r - 2, -1, -1):
        below[i] = below[i + 1] * len(choices[i + 1])
    state = {"best": best, "codes": None, "visited": 0}
    prefix = [0] * r
    full = (1 << npoints) - 1

    def descend(i, acc):
        sub = below[i]
        last = i == r - 1
        for code in choices[i]:
            if maximize:
                cur = acc & masks[code]
                cnt = cur.bit_count()
                hopeless = cnt <= state["best"]
            else:
                cur = acc | masks[code]
                cnt = cur.bit_count()
                hopeless = cnt >= state["best"]
            if hopeless:
                state["visited"] += sub
                continue
            prefix[i] = code
            if last:
                state["visited"] += 1
                state["best"] = cnt
                state["codes"] = tuple(prefix)
            else:
                descend(i + 1, cur)

    if r == 0:
        cnt = npoints if maximize else 0
        state["visited"] = 1
        if (maximize and cnt > best) or (not maximize and cnt < best):
            return cnt, (), 1
        return best, None, 1
    descend(0, full if maximize else 0)
    return state["best"], state["codes"], state["visited"]


def _scan_chunk(problem, r, piv_indices, maximize, initial):
    masks, N, npoints = _problem(problem)
    q = field_new(problem[3], problem[4]).q
    allp = _pivot_list(N, r)
    best = initial
    found = []
    visited = 0
    for idx in piv_indices:
        best, codes, v = _scan_pivot_set(allp[idx], N, q, masks, npoints, maximize, best)
        visited += v
        if codes is not None:
            found.append((idx, best, codes))
    return found, visited


@functools.lru_cache(maxsize=64)
def _pivot_list(N: int, r: int):
    return tuple(pivot_sets(N, r))


def _run_exhaustive(problem, N, r, q, npoints, maximize, workers):
    """Deterministic search; returns (value, pivots, codes, visited) for any worker count."""
    initial = -1 if maximize else npoints + 1
    npiv = len(_pivot_list(N, r))
    if workers <= 1 or npiv < 2:
        chunks = [list(range(npiv))]
        results = [_scan_chunk(problem, r, chunks[0], maximize, initial)]
    else:
        nchunks = min(npiv, 4 * workers)
        chunks = [list(range(i, npiv, nchunks)) for i in range(nchunks)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_scan_chunk, problem, r, ch, maximize, initial) for ch in chunks]
            results = [f.result() for f in futures]
    visited = sum(v for _, v in results)
    candidates = [item for found, _ in results for item in found]
    if not candidates:
        raise RuntimeError("search found no subspace")  # unreachable: at least one exists
    if maximize:
        idx, value, codes = min(candidates, key=lambda t: (-t[1], t[0]))
    else:
        idx, value, codes = min(candidates, key=lambda t: (t[1], t[0]))
    return value, _pivot_list(N, r)[idx], codes, visited


# -- public searches -----------------------------------------------------------------

@dataclass(frozen=True)
class OracleResult:
    value: int
    witness: SubspaceBasis
    exhaustive: bool
    subspaces_visited: int
    wall_time: float

    def to_json(self, field: FieldSpec | None = None, basis: MonomialBasis | None = None,
                timing: bool = False) -> dict:
        out = {
            "value": self.value,
            "witness": self.witness.to_json(field, basis),
            "witness_digest": self.witness.digest(),
            "exhaustive": self.exhaustive,
            "subspaces_visited": self.subspaces_visited,
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out


def _witness(N, q, pivots, codes) -> SubspaceBasis:
    return SubspaceBasis(N, tuple(decode_row(c, N, q) for c in codes), tuple(pivots))


def _sample(masks, N, r, q, npoints, maximize, seed, samples, field):
    """Seeded random r x N matrices (MT19937 via random.Random, entries row-major), rank-deficient draws rejected."""
    rng = random.Random(seed)
    best = -1 if maximize else npoints + 1
    witness = None
    accepted = 0
    attempts = 0
    limit = 1000 * samples + 1000
    while accepted < samples:
        attempts += 1
        if attempts > limit:
            raise RuntimeError("sampling keeps drawing rank-deficient matrices")
        mat = [[rng.randrange(q) for _ in range(N)] for _ in range(r)]
        sub = rref(mat, field, N)
        if sub.r < r:
            continue
        accepted += 1
        if maximize:
            acc = (1 << npoints) - 1
            for row in sub.rows:
                acc &= masks[_code(row, q)]
        else:
            acc = 0
            for row in sub.rows:
                acc |= masks[_code(row, q)]
        cnt = acc.bit_count()
        if (maximize and cnt > best) or (not maximize and cnt < best):
            best, witness = cnt, sub
    return best, witness, accepted


def _code(row, q: int) -> int:
    code = 0
    for x in row:
        code = code * q + x
    return code


def max_common_zeros(d: int, m: int, r: int, field: FieldSpec, kind: str = PROJECTIVE,
                     mode: str = EXHAUSTIVE, seed: int = 0, samples: int = 1000,
                     max_subspaces: int | None = None, workers: int | None = None) -> OracleResult:
    """e_r(d, m) (projective) or e_r^A(d, m) (affine) by search, with a witness subspace.

    Sample mode returns a lower bound labelled non-exhaustive.
    """
    if kind not in (PROJECTIVE, AFFINE):
        raise GeometryError(f"unknown kind {kind!r}")
    N = omega_size(d, m)
    if not 1 <= r <= N:
        raise ValueError(f"r={r} outside 1..{N}")
    start = time.perf_counter()
    problem = ("zeros", d, m, field.p, field.e, kind)
    if mode == EXHAUSTIVE:
        check_cap(N, r, field.q, max_subspaces)
        _, _, npoints = _problem(problem)
        value, piv, codes, visited = _run_exhaustive(
            problem, N, r, field.q, npoints, True, workers or default_workers())
        witness = _witness(N, field.q, piv, codes)
        exhaustive = True
    elif mode == SAMPLE:
        masks, _, npoints = _problem(problem)
        value, witness, visited = _sample(masks, N, r, field.q, npoints, True, seed, samples, field)
        exhaustive = False
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return OracleResult(value, witness, exhaustive, visited, time.perf_counter() - start)


def ghw_search(d: int, m: int, r: int, field: FieldSpec, mode: str = EXHAUSTIVE, seed: int = 0,
               samples: int = 1000, max_subspaces: int | None = None,
               workers: int | None = None) -> OracleResult:
    """r-th generalized Hamming weight of PRM_q(d, m) by direct support minimisation.

    Subcodes are enumerated as subspaces of the message space of an RREF
    generator matrix, so this path never consults the zero-set search.  The
    witness lives in that message space.  Sample mode gives an upper bound.
    """
    gen = _generator_basis(d, m, field.p, field.e)
    k = len(gen)
    if not 1 <= r <= k:
        raise ValueError(f"r={r} outside 1..{k} (code dimension)")
    start = time.perf_counter()
    problem = ("support", d, m, field.p, field.e, PROJECTIVE)
    if mode == EXHAUSTIVE:
        check_cap(k, r, field.q, max_subspaces)
        _, _, npoints = _problem(problem)
        value, piv, codes, visited = _run_exhaustive(
            problem, k, r, field.q, npoints, False, workers or default_workers())
        witness = _witness(k, field.q, piv, codes)
        exhaustive = True
    elif mode == SAMPLE:
        masks, _, npoints = _problem(problem)
        value, witness, visited = _sample(masks, k, r, field.q, npoints, False, seed, samples, field)
        exhaustive = False
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return OracleResult(value, witness, exhaustive, visited, time.perf_counter() - start)


def ghw(d: int, m: int, r: int, field: FieldSpec, **kwargs) -> int:
    return ghw_search(d, m, r, field, **kwargs).value


def code_dimension(d: int, m: int, field: FieldSpec) -> int:
    return len(_generator_basis(d, m, field.p, field.e))


# -- invariants of a fixed W ------------------------------------------------------------

def multiple_space(L, d: int, m: int, field: FieldSpec) -> SubspaceBasis:
    """Coefficient subspace L * S_{d-1}(m) inside S_d(m)."""
    basis = monomial_basis(m, d, HOMOGENEOUS)
    lower = monomial_basis(m, d - 1, HOMOGENEOUS)
    rows = []
    for mono in lower.monomials:
        row = [0] * len(basis)
        for i, c in enumerate(L):
            if c:
                e = list(mono)
                e[i] += 1
                k = basis.index(e)
                row[k] = field.add(row[k], c)
        rows.append(row)
    return rref(rows, field, len(basis))


def t_invariant(W: SubspaceBasis, d: int, m: int, field: FieldSpec) -> tuple[int, tuple[int, ...]]:
    """(t_W, L): the largest dim(W ∩ L S_{d-1}(m)) over linear forms L, first maximiser in point order."""
    if d < 1:
        raise ValueError("t_W needs d >= 1")
    best, arg = -1, None
    for L in enumerate_points(PROJECTIVE, m, field.q).points:
        U = multiple_space(L, d, m, field)
        t = W.r + U.r - span_sum(W, U, field).r
        if t > best:
            best, arg = t, L
    return best, arg


@functools.lru_cache(maxsize=64)
def linear_subspace_masks(m: int, k: int, p: int, e: int) -> tuple[tuple[SubspaceBasis, int], ...]:
    """Every k-dimensional linear subspace of P^m(F_q), canonical order, with its point mask."""
    F = field_new(p, e)
    pts = enumerate_points(PROJECTIVE, m, F.q)
    out = []
    for sub in iter_rref_forms(m + 1, k + 1, F.q):
        mask = 0
        for pt in linear_span_points(sub.rows, F):
            mask |= 1 << pts.index(pt)
        out.append((sub, mask))
    return tuple(out)


def contains_linear_subspace(W: SubspaceBasis, k: int, d: int, m: int, field: FieldSpec,
                             zero_mask: int | None = None,
                             max_subspaces: int | None = None) -> SubspaceBasis | None:
    """First k-dimensional F_q-linear subspace all of whose F_q-points are common zeros of W.

    For q > d, vanishing on the F_q-points of a linear space is the same as
    vanishing on the whole linear space.  Returns None when there is none.
    """
    if not 0 <= k <= m:
        raise ValueError(f"k={k} outside 0..{m}")
    check_cap(m + 1, k + 1, field.q, max_subspaces)
    if zero_mask is None:
        table = standard_table(d, m, field, PROJECTIVE)
        zero_mask = table.full_mask
        masks = _masks_for_table(table)
        for row in W.rows:
            zero_mask &= masks[_code(row, field.q)]
    for sub, mask in linear_subspace_masks(m, k, field.p, field.e):
        if mask & ~zero_mask == 0:
            return sub
    return None


@dataclass(frozen=True)
class SplittingProfile:
    r_i: tuple[int, ...]
    l: int

    def bound(self, d: int, m: int, q: int) -> int:
        """sum_i H_{r_i}(d-1, m+1-i) + pi_{m-l}."""
        return sum(H(ri, d - 1, m + 1 - i, q) for i, ri in enumerate(self.r_i, start=1)) + pi(m - self.l, q)


def ideal_part(i: int, d: int, m: int, field: FieldSpec) -> SubspaceBasis:
    """Degree-d part of the ideal (x_0, ..., x_{i-1}) as a coefficient subspace."""
    basis = monomial_basis(m, d, HOMOGENEOUS)
    N = len(basis)
    rows = []
    for k, mono in enumerate(basis.monomials):
        if any(mono[:i]):
            rows.append(tuple(int(j == k) for j in range(N)))
    return rref(rows, field, N)


def splitting_profile(W: SubspaceBasis, l: int, d: int, m: int, field: FieldSpec) -> SplittingProfile:
    """Dimension jumps of W_i = W ∩ (x_0, ..., x_{i-1})_d for i = 1..l."""
    if not 1 <= l <= m + 1:
        raise ValueError(f"l={l} outside 1..{m + 1}")
    dims = [0]
    for i in range(1, l + 1):
        dims.append(intersect(W, ideal_part(i, d, m, field), field).r)
    if dims[-1] != W.r:
        raise GeometryError(f"W is not contained in the ideal (x_0, ..., x_{l - 1})")
    return SplittingProfile(tuple(b - a for a, b in zip(dims, dims[1:])), l)


@functools.lru_cache(maxsize=64)
def hyperplane_masks(m: int, p: int, e: int) -> tuple[int, ...]:
    """Point mask of every hyperplane L = 0, L running over the canonical point order."""
    F = field_new(p, e)
    pts = enumerate_points(PROJECTIVE, m, F.q).points
    out = []
    for L in pts:
        mask = 0
        for j, x in enumerate(pts):
            acc = 0
            for a, b in zip(L, x):
                if a and b:
                    acc = F.add(acc, F.mul(a, b))
            if acc == 0:
                mask |= 1 << j
        out.append(mask)
    return tuple(out)


def hyperplane_section_max(zero_bitset: int, m: int, field: FieldSpec) -> int:
    """max over hyperplanes of |X ∩ H| for the point set X given as a bitset."""
    return max((zero_bitset & h).bit_count() for h in hyperplane_masks(m, field.p, field.e))


def subspace_zero_mask(W: SubspaceBasis, table: EvaluationTable) -> int:
    masks = _masks_for_table(table)
    acc = table.full_mask
    for row in W.rows:
        acc &= masks[_code(row, table.field.q)]
    return acc


def is_independent(rows, field: FieldSpec, ncols: int) -> bool:
    return rank(rows, field, ncols) == len(rows)
