import itertools

import pytest

from prmweights.finite_field import field_new, field_of_order
from prmweights.point_geometry import (
    AFFINE,
    PROJECTIVE,
    GeometryError,
    enumerate_points,
    monomial_basis,
    rank,
    rref,
    standard_table,
    zero_count,
)
from prmweights.search_oracle import (
    SAMPLE,
    CapExceeded,
    check_cap,
    code_dimension,
    contains_linear_subspace,
    enumerate_subspaces,
    ghw,
    ghw_search,
    hyperplane_section_max,
    iter_rref_forms,
    max_common_zeros,
    multiple_space,
    splitting_profile,
    subspace_zero_mask,
    t_invariant,
)
from prmweights.weight_combinatorics import gaussian_binom, omega_size, pi


def _brute_max_zeros(d, m, r, F, kind):
    """Every full-rank r x N matrix, no pruning, no RREF enumeration."""
    t = standard_table(d, m, F, kind)
    masks = [t.zero_mask(v) for v in itertools.product(range(F.q), repeat=t.N)]
    codes = range(F.q ** t.N)
    best = -1
    for combo in itertools.combinations(codes, r):
        rows = [_decode(c, t.N, F.q) for c in combo]
        if rank(rows, F, t.N) < r:
            continue
        acc = t.full_mask
        for c in combo:
            acc &= masks[c]
        best = max(best, acc.bit_count())
    return best


def _decode(code, N, q):
    out = []
    for _ in range(N):
        code, x = divmod(code, q)
        out.append(x)
    return out[::-1]


def _mono_row(basis, *exps):
    row = [0] * len(basis)
    for e in exps:
        row[basis.index(e)] = 1
    return row


@pytest.mark.parametrize("N,r,q", [(6, 1, 3), (6, 3, 3), (4, 2, 2), (5, 0, 4), (3, 3, 5), (4, 2, 4)])
def test_enumeration_counts(N, r, q):
    assert enumerate_subspaces(N, r, q) == gaussian_binom(N, r, q)


def test_enumeration_is_duplicate_free_rref():
    F = field_new(3)
    seen = set()
    for sub in iter_rref_forms(4, 2, 3):
        assert rref(sub.rows, F, 4) == sub
        seen.add(sub)
    assert len(seen) == gaussian_binom(4, 2, 3)


def test_visitor_sees_every_subspace():
    got = []
    n = enumerate_subspaces(3, 1, 2, visitor=got.append)
    assert n == len(got) == 7


def test_cap_checked_before_start():
    assert check_cap(6, 3, 3, None) == 33880
    with pytest.raises(CapExceeded):
        check_cap(6, 3, 3, 1000)
    with pytest.raises(CapExceeded):
        max_common_zeros(2, 2, 3, field_new(3), max_subspaces=1000)


def test_projective_golden_values():
    F = field_new(3)
    assert [max_common_zeros(2, 2, r, F).value for r in range(1, 7)] == [7, 5, 4, 2, 1, 0]


def test_affine_golden_values():
    F = field_new(3)
    assert [max_common_zeros(2, 2, r, F, kind=AFFINE).value for r in range(1, 7)] == [6, 4, 3, 2, 1, 0]


@pytest.mark.parametrize("d,m,q,kind", [(2, 1, 3, PROJECTIVE), (1, 2, 3, PROJECTIVE), (2, 2, 2, PROJECTIVE),
                                        (1, 2, 2, AFFINE), (2, 1, 3, AFFINE), (2, 1, 4, PROJECTIVE)])
def test_pruned_search_matches_brute_force(d, m, q, kind):
    F = field_of_order(q)
    N = len(standard_table(d, m, F, kind).basis)
    for r in range(1, min(N, 3) + 1):
        if q ** (N * r) > 3 * 10**5:
            continue
        assert max_common_zeros(d, m, r, F, kind=kind).value == _brute_max_zeros(d, m, r, F, kind)


def test_witnesses_reproduce_values():
    for d, m, q in [(2, 2, 3), (3, 1, 4), (2, 1, 5)]:
        F = field_of_order(q)
        t = standard_table(d, m, F)
        for r in range(1, omega_size(d, m) + 1):
            res = max_common_zeros(d, m, r, F)
            assert res.exhaustive
            assert res.witness.r == r
            assert zero_count(res.witness, t) == res.value


def test_first_witness_is_two_lines():
    # one form with 7 zeros on P^2(F_3): a product of two distinct linear forms
    F = field_new(3)
    res = max_common_zeros(2, 2, 1, F)
    assert res.subspaces_visited == 364
    t = standard_table(2, 2, F)
    mask = subspace_zero_mask(res.witness, t)
    assert mask.bit_count() == 7
    assert hyperplane_section_max(mask, 2, F) == 4


def test_parallel_matches_serial():
    F = field_new(3)
    for r in (2, 3):
        a = max_common_zeros(2, 2, r, F, workers=1)
        b = max_common_zeros(2, 2, r, F, workers=3)
        assert a.to_json() == b.to_json()


def test_sample_mode_is_seeded_lower_bound():
    F = field_new(3)
    a = max_common_zeros(2, 2, 2, F, mode=SAMPLE, seed=5, samples=200)
    b = max_common_zeros(2, 2, 2, F, mode=SAMPLE, seed=5, samples=200)
    assert a.to_json() == b.to_json()
    assert not a.exhaustive and a.subspaces_visited == 200
    assert a.value <= 5
    assert zero_count(a.witness, standard_table(2, 2, F)) == a.value
    with pytest.raises(ValueError):
        max_common_zeros(2, 2, 2, F, mode="bogus")


def test_ghw_golden_and_duality():
    F = field_new(3)
    vals = [ghw(2, 2, r, F) for r in range(1, 7)]
    assert vals == [6, 8, 9, 11, 12, 13]
    assert vals[0] == (3 - 2 + 1) * 3
    assert all(a < b for a, b in zip(vals, vals[1:]))
    for d, m, q in [(3, 1, 4), (2, 1, 5), (1, 2, 3), (2, 2, 4)]:
        F = field_of_order(q)
        for r in range(1, min(code_dimension(d, m, F), 3) + 1):
            assert ghw(d, m, r, F) + max_common_zeros(d, m, r, F).value == pi(m, q)


def test_code_dimension_drops_when_q_small():
    # x0^2 x1 - x0 x1^2 vanishes on P^1(F_2), so the evaluation map is not injective
    assert code_dimension(3, 1, field_new(2)) == 3
    assert code_dimension(3, 1, field_new(5)) == 4
    with pytest.raises(ValueError):
        ghw_search(3, 1, 4, field_new(2))


def test_t_invariant_examples():
    F = field_new(3)
    b = monomial_basis(1, 2)
    W = rref([_mono_row(b, (2, 0)), _mono_row(b, (0, 2))], F, 3)
    t, L = t_invariant(W, 2, 1, F)
    assert t == 1 and L in ((1, 0), (0, 1))
    full = multiple_space((1, 0, 0), 2, 2, F)
    assert t_invariant(full, 2, 2, F) == (full.r, (1, 0, 0))
    b2 = monomial_basis(2, 2)
    W = rref([_mono_row(b2, (1, 1, 0))], F, 6)
    assert t_invariant(W, 2, 2, F)[0] == 1


def test_contains_linear_subspace_examples():
    F = field_new(3)
    b = monomial_basis(2, 2)
    W = rref([_mono_row(b, (2, 0, 0))], F, 6)
    line = contains_linear_subspace(W, 1, 2, 2, F)
    assert line is not None
    assert all(row[0] == 0 for row in line.rows)
    full = rref([[int(i == j) for j in range(6)] for i in range(6)], F, 6)
    assert contains_linear_subspace(full, 0, 2, 2, F) is None
    W = rref([_mono_row(b, e) for e in ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1))], F, 6)
    pt = contains_linear_subspace(W, 0, 2, 2, F)
    assert pt.rows[0] in ((0, 0, 1), (0, 1, 0))


def test_splitting_profile_examples():
    F = field_new(3)
    full = multiple_space((1, 0, 0), 2, 2, F)
    assert splitting_profile(full, 1, 2, 2, F).r_i == (full.r,)
    b = monomial_basis(2, 2)
    W = rref([_mono_row(b, (2, 0, 0)), _mono_row(b, (0, 2, 0))], F, 6)
    assert splitting_profile(W, 2, 2, 2, F).r_i == (1, 1)
    with pytest.raises(GeometryError):
        splitting_profile(W, 1, 2, 2, F)


def test_hyperplane_section_examples():
    F = field_new(3)
    pts = enumerate_points(PROJECTIVE, 2, 3).points
    everything = (1 << len(pts)) - 1
    assert hyperplane_section_max(everything, 2, F) == 4
    assert hyperplane_section_max(1, 2, F) == 1
    line = sum(1 << j for j, p in enumerate(pts) if p[0] == 0)
    assert hyperplane_section_max(line, 2, F) == 4
