"""Point sets, monomial bases, evaluation tables and linear algebra over F_q.

Orderings fixed here are a bit-exact contract: every zero bitset in the
package indexes points by their position in :func:`enumerate_points`.

* Projective points are canonical representatives whose first nonzero
  coordinate is 1; affine points are all of F_q^m.  Both are listed in
  ascending lexicographic order of the coordinate tuple.
* Monomials are exponent tuples in graded-lexicographic descending order:
  higher total degree first, then lexicographically larger exponent tuple
  first.  For homogeneous degree-d monomials this is the order of
  ``Omega(d, m)``, so monomial index ``i`` is ``omega_{i+1}(d, m)``.
* Bit ``j`` of a zero mask is set iff the polynomial vanishes at point ``j``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .finite_field import FieldSpec, field_new
from .weight_combinatorics import compositions, binom

HOMOGENEOUS = "homogeneous"
AFFINE = "affine"
PROJECTIVE = "projective"

MAX_POINTS = 1 << 22
MAX_MASK_TABLE = 1 << 18

TABLE_SCHEMA = "prmweights.evaluation_table/1"
SUBSPACE_SCHEMA = "prmweights.subspace/1"
MONOMIAL_ORDER = "graded-lex-descending"
POINT_ORDER = "lex-ascending; projective representatives have first nonzero coordinate 1"


class GeometryError(ValueError):
    pass


# -- monomials and points ------------------------------------------------------

@dataclass(frozen=True)
class MonomialBasis:
    m: int
    d: int
    kind: str
    monomials: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.monomials)

    @property
    def nvars(self) -> int:
        return self.m + 1 if self.kind == HOMOGENEOUS else self.m

    def index(self, exponent) -> int:
        return _monomial_index(self)[tuple(exponent)]


_INDEX_CACHE: dict[MonomialBasis, dict] = {}


def _monomial_index(basis: MonomialBasis) -> dict:
    idx = _INDEX_CACHE.get(basis)
    if idx is None:
        idx = {mono: i for i, mono in enumerate(basis.monomials)}
        _INDEX_CACHE[basis] = idx
    return idx


def monomial_basis(m: int, d: int, kind: str = HOMOGENEOUS) -> MonomialBasis:
    """Degree-d forms in m+1 variables, or polynomials of degree <= d in m variables."""
    if m < 0 or d < 0:
        raise GeometryError(f"need m, d >= 0 (got m={m}, d={d})")
    if binom(m + d, d) > MAX_POINTS:
        raise GeometryError("monomial basis too large")
    if kind == HOMOGENEOUS:
        monos = tuple(compositions(d, m))
    elif kind == AFFINE:
        if m == 0:
            monos = ((),)
        else:
            # compositions(t, m-1) are length-m tuples summing to t
            monos = tuple(c for t in range(d, -1, -1) for c in compositions(t, m - 1))
    else:
        raise GeometryError(f"unknown monomial kind {kind!r}")
    return MonomialBasis(m, d, kind, monos)


@dataclass(frozen=True)
class PointSet:
    kind: str
    m: int
    q: int
    points: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.points)

    def index(self, point) -> int:
        idx = _POINT_INDEX.get(self)
        if idx is None:
            idx = {p: i for i, p in enumerate(self.points)}
            _POINT_INDEX[self] = idx
        return idx[tuple(point)]


_POINT_INDEX: dict[PointSet, dict] = {}


def enumerate_points(kind: str, m: int, q: int) -> PointSet:
    if m < 0:
        raise GeometryError(f"m={m} must be >= 0")
    if kind == PROJECTIVE:
        count = (q ** (m + 1) - 1) // (q - 1)
        if count > MAX_POINTS:
            raise GeometryError(f"P^{m}(F_{q}) has {count} points, above the limit {MAX_POINTS}")
        pts = []
        for lead in range(m, -1, -1):
            head = (0,) * lead + (1,)
            for tail in itertools.product(range(q), repeat=m - lead):
                pts.append(head + tail)
    elif kind == AFFINE:
        if q**m > MAX_POINTS:
            raise GeometryError(f"A^{m}(F_{q}) has {q**m} points, above the limit {MAX_POINTS}")
        pts = list(itertools.product(range(q), repeat=m))
    else:
        raise GeometryError(f"unknown point kind {kind!r}")
    return PointSet(kind, m, q, tuple(pts))


def normalize_projective(vec, field: FieldSpec) -> tuple[int, ...]:
    """Scale a nonzero vector so that its first nonzero entry is 1."""
    for x in vec:
        if x:
            s = field.inv(x)
            return tuple(field.mul(s, y) for y in vec)
    raise GeometryError("the zero vector is not a projective point")


# -- evaluation tables -----------------------------------------------------------

@dataclass
class EvaluationTable:
    """values[i][j] = monomial i evaluated at point j (0**0 == 1)."""

    basis: MonomialBasis
    points: PointSet
    field: FieldSpec
    values: tuple[tuple[int, ...], ...]
    zero_masks: list | None = dc_field(default=None, repr=False, compare=False)

    @property
    def N(self) -> int:
        return len(self.basis)

    @property
    def npoints(self) -> int:
        return len(self.points)

    @property
    def full_mask(self) -> int:
        return (1 << self.npoints) - 1

    def evaluate(self, coeffs: Sequence[int]) -> list[int]:
        """Values of the polynomial with the given basis coefficients at every point."""
        F = self.field
        out = [0] * self.npoints
        for c, row in zip(coeffs, self.values):
            if c:
                for j, v in enumerate(row):
                    if v:
                        out[j] = F.add(out[j], F.mul(c, v))
        return out

    def zero_mask(self, coeffs: Sequence[int]) -> int:
        mask = 0
        for j, v in enumerate(self.evaluate(coeffs)):
            if v == 0:
                mask |= 1 << j
        return mask

    def vector_code(self, vec: Sequence[int]) -> int:
        """Index of a coefficient vector in :meth:`vector_masks` (first coordinate most significant)."""
        code = 0
        q = self.field.q
        for x in vec:
            code = code * q + x
        return code

    def vector_masks(self) -> list[int]:
        """Zero masks of all q^N coefficient vectors, indexed by :meth:`vector_code`.

        Built once by extending evaluation vectors one coordinate at a time.
        """
        if self.zero_masks is not None:
            return self.zero_masks
        q, N = self.field.q, self.N
        if q**N > MAX_MASK_TABLE:
            raise GeometryError(f"q^N = {q**N} coefficient vectors exceed the mask-table limit")
        F = self.field
        P = self.npoints
        evals = [[0] * P]
        for i in range(N):
            row = self.values[i]
            scaled = [[F.mul(c, v) for v in row] for c in range(q)]
            nxt = []
            for ev in evals:
                for c in range(q):
                    sc = scaled[c]
                    nxt.append([F.add(a, b) for a, b in zip(ev, sc)] if c else ev)
            evals = nxt
        masks = []
        for ev in evals:
            mask = 0
            for j, v in enumerate(ev):
                if v == 0:
                    mask |= 1 << j
            masks.append(mask)
        self.zero_masks = masks
        return masks

    def to_json(self) -> dict:
        return {
            "schema": TABLE_SCHEMA,
            "field": self.field.to_json(),
            "kind": self.basis.kind,
            "m": self.basis.m,
            "d": self.basis.d,
            "monomial_order": MONOMIAL_ORDER,
            "monomials": [list(x) for x in self.basis.monomials],
            "point_kind": self.points.kind,
            "point_order": POINT_ORDER,
            "points": [list(x) for x in self.points.points],
            "values": [list(r) for r in self.values],
        }


def evaluation_table(basis: MonomialBasis, point_set: PointSet, field: FieldSpec) -> EvaluationTable:
    if point_set.q != field.q:
        raise GeometryError("point set and field disagree on q")
    if basis.nvars != len(point_set.points[0]):
        raise GeometryError("monomial basis and points have different numbers of variables")
    F = field
    powers = [[F.pow(x, k) for k in range(basis.d + 1)] for x in range(F.q)]
    values = []
    for mono in basis.monomials:
        row = []
        for pt in point_set.points:
            v = 1
            for x, a in zip(pt, mono):
                if a:
                    v = F.mul(v, powers[x][a])
                    if not v:
                        break
            row.append(v)
        values.append(tuple(row))
    return EvaluationTable(basis, point_set, field, tuple(values))


_TABLE_CACHE: dict = {}


def standard_table(d: int, m: int, field: FieldSpec, kind: str = PROJECTIVE) -> EvaluationTable:
    """Cached evaluation table of S_d(m) on P^m(F_q) (or T_{<=d}(m) on A^m(F_q))."""
    key = (d, m, field.p, field.e, kind)
    tab = _TABLE_CACHE.get(key)
    if tab is None:
        if kind == PROJECTIVE:
            tab = evaluation_table(monomial_basis(m, d, HOMOGENEOUS), enumerate_points(PROJECTIVE, m, field.q), field)
        elif kind == AFFINE:
            tab = evaluation_table(monomial_basis(m, d, AFFINE), enumerate_points(AFFINE, m, field.q), field)
        else:
            raise GeometryError(f"unknown kind {kind!r}")
        _TABLE_CACHE[key] = tab
    return tab


def table_from_json(data: dict) -> EvaluationTable:
    if data.get("schema") != TABLE_SCHEMA:
        raise GeometryError(f"unsupported table schema {data.get('schema')!r}")
    F = field_new(data["field"]["p"], data["field"]["e"])
    basis = MonomialBasis(data["m"], data["d"], data["kind"], tuple(tuple(x) for x in data["monomials"]))
    pts = PointSet(data["point_kind"], data["m"], F.q, tuple(tuple(x) for x in data["points"]))
    return EvaluationTable(basis, pts, F, tuple(tuple(r) for r in data["values"]))


# -- subspaces and linear algebra ------------------------------------------------

@dataclass(frozen=True)
class SubspaceBasis:
    """Reduced row-echelon basis of a subspace of F_q^N; equal subspaces compare equal."""

    N: int
    rows: tuple[tuple[int, ...], ...]
    pivot_columns: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.rows)

    def to_json(self, field: FieldSpec | None = None, basis: MonomialBasis | None = None) -> dict:
        out = {
            "schema": SUBSPACE_SCHEMA,
            "N": self.N,
            "r": self.r,
            "rows": [list(x) for x in self.rows],
            "pivot_columns": list(self.pivot_columns),
        }
        if field is not None:
            out["field"] = field.to_json()
        if basis is not None:
            out.update(kind=basis.kind, m=basis.m, d=basis.d, monomial_order=MONOMIAL_ORDER,
                       monomials=[list(x) for x in basis.monomials])
        return out

    def digest(self) -> str:
        payload = json.dumps([self.N, [list(x) for x in self.rows]], separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def subspace_from_json(data: dict) -> SubspaceBasis:
    if data.get("schema") != SUBSPACE_SCHEMA:
        raise GeometryError(f"unsupported subspace schema {data.get('schema')!r}")
    return SubspaceBasis(data["N"], tuple(tuple(x) for x in data["rows"]), tuple(data["pivot_columns"]))


def _rref_rows(matrix, field: FieldSpec, ncols: int) -> tuple[list[list[int]], list[int]]:
    F = field
    rows = [list(r) for r in matrix]
    for r in rows:
        if len(r) != ncols:
            raise GeometryError(f"row of length {len(r)} in a matrix with {ncols} columns")
    pivots = []
    lead = 0
    for col in range(ncols):
        sel = next((i for i in range(lead, len(rows)) if rows[i][col]), None)
        if sel is None:
            continue
        rows[lead], rows[sel] = rows[sel], rows[lead]
        s = F.inv(rows[lead][col])
        prow = [F.mul(s, x) for x in rows[lead]]
        rows[lead] = prow
        for i in range(len(rows)):
            if i != lead and rows[i][col]:
                f = rows[i][col]
                rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], prow)]
        pivots.append(col)
        lead += 1
        if lead == len(rows):
            break
    return rows[:lead], pivots


def rref(matrix, field: FieldSpec, ncols: int | None = None) -> SubspaceBasis:
    """Canonical reduced row-echelon basis of the row space (zero rows dropped)."""
    matrix = [tuple(r) for r in matrix]
    if ncols is None:
        if not matrix:
            raise GeometryError("ncols is required for an empty matrix")
        ncols = len(matrix[0])
    rows, pivots = _rref_rows(matrix, field, ncols)
    return SubspaceBasis(ncols, tuple(tuple(r) for r in rows), tuple(pivots))


def rank(matrix, field: FieldSpec, ncols: int | None = None) -> int:
    matrix = [tuple(r) for r in matrix]
    if not matrix:
        return 0
    return rref(matrix, field, ncols).r


def span_sum(a: SubspaceBasis, b: SubspaceBasis, field: FieldSpec) -> SubspaceBasis:
    if a.N != b.N:
        raise GeometryError("dimension mismatch")
    return rref(a.rows + b.rows, field, a.N)


def intersect(a: SubspaceBasis, b: SubspaceBasis, field: FieldSpec) -> SubspaceBasis:
    """A ∩ B by the Zassenhaus block elimination."""
    if a.N != b.N:
        raise GeometryError("dimension mismatch")
    N = a.N
    zero = (0,) * N
    block = [r + r for r in a.rows] + [r + zero for r in b.rows]
    if not block:
        return SubspaceBasis(N, (), ())
    rows, _ = _rref_rows(block, field, 2 * N)
    inter = [r[N:] for r in rows if not any(r[:N])]
    return rref(inter, field, N)


def contains_vector(sub: SubspaceBasis, vec, field: FieldSpec) -> bool:
    return rank(sub.rows + (tuple(vec),), field, sub.N) == sub.r


def matmul(a, b, field: FieldSpec) -> list[list[int]]:
    F = field
    bt = list(zip(*b))
    out = []
    for row in a:
        out_row = []
        for col in bt:
            acc = 0
            for x, y in zip(row, col):
                if x and y:
                    acc = F.add(acc, F.mul(x, y))
            out_row.append(acc)
        out.append(out_row)
    return out


def mat_vec(a, v, field: FieldSpec) -> tuple[int, ...]:
    return tuple(r[0] for r in matmul(a, [[x] for x in v], field))


def mat_inverse(a, field: FieldSpec) -> list[list[int]]:
    n = len(a)
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    rows, pivots = _rref_rows([list(r) + ident[i] for i, r in enumerate(a)], field, 2 * n)
    if len(pivots) < n or pivots[n - 1] != n - 1:
        raise GeometryError("singular matrix")
    return [r[n:] for r in rows]


def zero_count(subspace: SubspaceBasis, table: EvaluationTable) -> int:
    """Number of points where every basis row vanishes."""
    return common_zero_mask(subspace, table).bit_count()


def common_zero_mask(subspace: SubspaceBasis, table: EvaluationTable) -> int:
    if subspace.N != table.N:
        raise GeometryError("subspace and table have different coefficient dimensions")
    mask = table.full_mask
    for row in subspace.rows:
        mask &= table.zero_mask(row)
    return mask


# -- coordinate changes ----------------------------------------------------------

def _poly_mul(a: dict, b: dict, field: FieldSpec) -> dict:
    F = field
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = F.add(out.get(e, 0), F.mul(ca, cb))
    return {e: c for e, c in out.items() if c}


def substitution_matrix(basis: MonomialBasis, sub, field: FieldSpec) -> list[list[int]]:
    """Row k = coefficients of monomial k after x_i -> sum_j sub[i][j] x_j."""
    if basis.kind != HOMOGENEOUS:
        raise GeometryError("coordinate changes act on homogeneous forms only")
    n = basis.m + 1
    unit = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    forms = [{unit[j]: sub[i][j] for j in range(n) if sub[i][j]} for i in range(n)]
    one = {(0,) * n: 1}
    idx = _monomial_index(basis)
    out = []
    for mono in basis.monomials:
        poly = one
        for i, a in enumerate(mono):
            for _ in range(a):
                poly = _poly_mul(poly, forms[i], field)
        row = [0] * len(basis)
        for e, c in poly.items():
            row[idx[e]] = c
        out.append(row)
    return out


def projective_transform(subspace: SubspaceBasis, change, basis: MonomialBasis, field: FieldSpec) -> SubspaceBasis:
    """Image of W under the point map x -> change @ x.

    Each F in W becomes F(change^{-1} x), so the zero set of the result is
    ``change`` applied to the zero set of W.
    """
    n = basis.m + 1
    if len(change) != n or any(len(r) != n for r in change):
        raise GeometryError(f"coordinate change must be {n}x{n}")
    inverse = mat_inverse(change, field)
    T = substitution_matrix(basis, inverse, field)
    if not subspace.rows:
        return subspace
    return rref(matmul(subspace.rows, T, field), field, len(basis))


def move_linear_subspace_to_standard(vectors, m: int, field: FieldSpec) -> list[list[int]]:
    """Invertible A with A @ v in span(e_{m-k}, ..., e_m) for every v in L = span(vectors).

    The k-dimensional projective subspace L is thereby carried onto
    V(x_0, ..., x_{m-k-1}).
    """
    vectors = [tuple(v) for v in vectors]
    n = m + 1
    if not vectors or any(len(v) != n for v in vectors):
        raise GeometryError(f"need nonempty vectors of length {n}")
    if rank(vectors, field, n) != len(vectors):
        raise GeometryError("spanning vectors are not linearly independent")
    complement = []
    current = list(vectors)
    for i in range(n):
        e = tuple(int(i == j) for j in range(n))
        if rank(current + [e], field, n) > len(current):
            current.append(e)
            complement.append(e)
    cols = complement + vectors  # B e_i = cols[i]
    B = [[cols[j][i] for j in range(n)] for i in range(n)]
    return mat_inverse(B, field)


def linear_span_points(vectors, field: FieldSpec) -> list[tuple[int, ...]]:
    """Canonical projective representatives of the points of P(span(vectors))."""
    k = len(vectors)
    n = len(vectors[0])
    seen = set()
    F = field
    for coeffs in itertools.product(range(F.q), repeat=k):
        if not any(coeffs):
            continue
        v = [0] * n
        for c, vec in zip(coeffs, vectors):
            if c:
                v = [F.add(a, F.mul(c, b)) for a, b in zip(v, vec)]
        seen.add(normalize_projective(v, F))
    return sorted(seen)
