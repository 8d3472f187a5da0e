import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prmweights.weight_combinatorics import (
    H,
    binom,
    compositions,
    floor_power_sum,
    gaussian_binom,
    h_decompose,
    omega_rank,
    omega_size,
    omega_unrank,
    pi,
    rank_from_exponents,
    weight_of,
)


def _brute_subspace_count(n, k, q):
    # count k-subsets of nonzero vectors of F_q^n spanning independent sets, up to GL_k
    ordered = 1
    for i in range(k):
        ordered *= q**n - q**i
    per_space = 1
    for i in range(k):
        per_space *= q**k - q**i
    return ordered // per_space


def test_binom_is_total():
    assert binom(5, 2) == 10
    assert binom(5, 6) == 0
    assert binom(5, -1) == 0
    assert binom(-1, 0) == 0
    assert binom(0, 0) == 1


def test_pi_values():
    assert [pi(m, 3) for m in range(-2, 4)] == [0, 0, 1, 4, 13, 40]
    assert pi(2, 4) == 21


def test_gaussian_binom_known():
    assert gaussian_binom(6, 3, 3) == 33880
    assert gaussian_binom(6, 1, 3) == 364
    assert gaussian_binom(4, 2, 2) == 35
    assert gaussian_binom(3, 4, 2) == 0
    for n, k, q in itertools.product(range(6), range(6), (2, 3, 4, 5)):
        if k <= n:
            assert gaussian_binom(n, k, q) == _brute_subspace_count(n, k, q)


def test_compositions_order_and_count():
    comps = list(compositions(2, 2))
    assert comps == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    for d, m in itertools.product(range(5), range(5)):
        got = list(compositions(d, m))
        assert len(got) == omega_size(d, m)
        assert got == sorted(got, reverse=True)
        brute = sorted((c for c in itertools.product(range(d + 1), repeat=m + 1) if sum(c) == d),
                       reverse=True)
        assert got == brute


@pytest.mark.parametrize("d,m", [(d, m) for d in range(6) for m in range(6)])
def test_unrank_rank_roundtrip(d, m):
    for r, w in enumerate(compositions(d, m), start=1):
        assert omega_unrank(d, m, r) == w
        assert omega_rank(w) == r


def test_unrank_out_of_range():
    with pytest.raises(ValueError):
        omega_unrank(2, 2, 0)
    with pytest.raises(ValueError):
        omega_unrank(2, 2, 7)


def test_H_values_and_boundaries():
    assert [H(r, 2, 2, 3) for r in range(0, 8)] == [9, 6, 4, 3, 2, 1, 0, 0]
    assert H(0, 3, 4, 5) == 5**4
    assert H(1, 3, 1, 7) == 3
    with pytest.raises(ValueError):
        H(-1, 2, 2, 3)


def test_weight_ignores_last_coordinate():
    assert weight_of((1, 0, 5), 3) == 3
    assert weight_of((0, 2, 1), 4) == 2


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(2, 13), st.data())
def test_decomposition_reproduces_H_and_rank(d, m, q, data):
    r = data.draw(st.integers(1, omega_size(d, m)))
    exps = h_decompose(r, d, m)
    assert len(exps) == d
    assert list(exps) == sorted(exps)
    assert all(-1 <= a <= m - 1 for a in exps)
    assert floor_power_sum(exps, q) == H(r, d, m, q)
    assert rank_from_exponents(exps, d, m) == r


def test_H_is_non_increasing_in_r_when_q_at_least_d():
    for d, m, q in itertools.product(range(1, 5), range(1, 4), (2, 3, 5)):
        if q < d:
            continue
        vals = [H(r, d, m, q) for r in range(1, omega_size(d, m) + 2)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
