import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolsketch.errors import DimensionMismatch
from boolsketch.fourier import (
    SparsePolynomial,
    brute_force_wht,
    eval_parity,
    eval_poly,
    has_unique_sign_property,
    is_general_position,
    is_mu_separated,
    parity_indices,
    parity_mask,
    q_inv,
    q_map,
    realizable_patterns,
    truth_table,
)
from boolsketch.gf2 import linearly_independent


def P(*idx):
    return parity_mask(idx)


def all_points(n):
    return np.array(list(itertools.product((1, -1), repeat=n)), dtype=np.int8)


def naive_wht(f_values, points):
    """Direct O(4^n) transform: c_S = mean over x of f(x) chi_S(x)."""
    n = points.shape[1]
    out = {}
    for S in range(1 << n):
        chi = np.array([eval_parity(S, x) for x in points])
        c = float(np.mean(f_values * chi))
        if abs(c) > 1e-12:
            out[S] = c
    return out


def min_comb_enum(c):
    """Oracle: enumerate all 3^s - 1 nonzero {0,+-1} vectors."""
    best = np.inf
    for b in itertools.product((0, 1, -1), repeat=len(c)):
        if any(b):
            best = min(best, abs(float(np.dot(b, c))))
    return best


# -- parities ----------------------------------------------------------------


def test_eval_parity_examples():
    x = np.array([-1, 1, -1])
    assert eval_parity(0, x) == 1
    assert eval_parity(P(1, 3), x) == 1
    assert eval_parity(P(2), x) == 1
    assert eval_parity(P(1), x) == -1


def test_eval_parity_dimension_checks():
    with pytest.raises(DimensionMismatch):
        eval_parity(P(4), np.array([1, 1, 1]))
    with pytest.raises(ValueError):
        eval_parity(P(1), np.array([0, 1]))


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, 2**n - 1), st.integers(0, 2**n - 1),
    st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n))))
def test_character_property(args):
    n, S, T, x = args
    x = np.array(x)
    assert eval_parity(S, x) * eval_parity(T, x) == eval_parity(S ^ T, x)


def test_mask_roundtrip():
    assert parity_indices(P(1, 3, 7), one_based=True) == (1, 3, 7)
    assert parity_mask([0, 2], one_based=False) == 0b101
    with pytest.raises(ValueError):
        parity_mask([0])


# -- polynomials -------------------------------------------------------------


def test_eval_poly_examples():
    f = SparsePolynomial(2, {P(1): 2.0, P(2): 1.0})
    assert eval_poly(f, [1, 1]) == 3
    assert eval_poly(f, [-1, 1]) == -1
    const = SparsePolynomial(4, {0: 5.0})
    assert eval_poly(const, [1, -1, -1, 1]) == 5


def test_zero_terms_dropped_and_sorted():
    f = SparsePolynomial(3, {P(3): 1.0, P(1, 2): 0.0, P(1): -2.0})
    assert f.support == (P(1), P(3))
    assert f.sparsity == 2


def test_eval_poly_dimension_mismatch():
    f = SparsePolynomial(3, {P(1): 1.0})
    with pytest.raises(DimensionMismatch):
        eval_poly(f, [1, 1])
    with pytest.raises(DimensionMismatch):
        SparsePolynomial(2, {P(3): 1.0})


def test_evaluate_matches_eval_poly_bitwise():
    rng = np.random.default_rng(0)
    f = SparsePolynomial(8, {int(S): c for S, c in zip(rng.integers(0, 256, 6), rng.normal(size=6))})
    X = all_points(8)
    batch = f.evaluate(X)
    single = np.array([eval_poly(f, x) for x in X])
    assert np.array_equal(batch, single)


def test_json_roundtrip():
    f = SparsePolynomial(5, {0: 1.5, P(2, 5): -0.25, P(1): 3.0})
    obj = f.to_json()
    assert obj["terms"][0] == {"set": [], "coeff": 1.5}
    assert [t["set"] for t in obj["terms"]] == [[], [1], [2, 5]]
    assert SparsePolynomial.from_json(obj) == f


# -- q-map -------------------------------------------------------------------


def test_q_map_examples():
    assert q_map(np.array([1, -1])).tolist() == [0, 1]
    assert q_inv(np.array([0, 0])).tolist() == [1, 1]
    with pytest.raises(ValueError):
        q_map(np.array([0, 1]))


@given(st.integers(1, 6), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_q_inverse(m, n, seed):
    X = np.random.default_rng(seed).choice(np.array([-1, 1], dtype=np.int8), size=(m, n))
    assert np.array_equal(q_inv(q_map(X)), X)


# -- Walsh-Hadamard oracle ---------------------------------------------------


def test_wht_examples():
    # table index i: bit j set iff x_{j+1} = -1
    assert brute_force_wht([1.0, -1.0]).terms == {P(1): 1.0}
    assert brute_force_wht([7.0] * 8).terms == {0: 7.0}
    g = brute_force_wht([1.0, 0.0, 0.0, 1.0])  # (1 + x1 x2) / 2
    assert g.terms == {0: 0.5, P(1, 2): 0.5}


def test_wht_rejects_bad_length():
    with pytest.raises(ValueError):
        brute_force_wht([1.0, 2.0, 3.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_wht_matches_direct_transform(n, seed):
    rng = np.random.default_rng(seed)
    table = rng.normal(size=1 << n)
    # table order -> explicit points
    idx = np.arange(1 << n)[:, None]
    points = (1 - 2 * ((idx >> np.arange(n)) & 1)).astype(np.int8)
    fast = brute_force_wht(table)
    slow = naive_wht(table, points)
    assert set(fast.terms) == set(slow)
    for S, c in slow.items():
        assert abs(fast.terms[S] - c) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_wht_reproduces_table(n, seed):
    rng = np.random.default_rng(seed)
    table = rng.normal(size=1 << n)
    f = brute_force_wht(table)
    assert np.max(np.abs(truth_table(f) - table)) < 1e-9


# -- general position / separation -------------------------------------------


def test_general_position_examples():
    assert is_general_position([1.0, 2.0])
    assert not is_general_position([1.0, 1.0])
    assert not is_general_position([1.0, 2.0, 3.0])


def test_mu_separation_examples():
    assert is_mu_separated([10.0, 1.0], 0.5)
    assert not is_mu_separated([1.0, 1.0], 0.5)
    assert is_mu_separated([4.0], 3.0)


def test_separation_guard():
    with pytest.raises(ValueError):
        is_general_position(np.ones(21))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=1, max_size=6), st.floats(0, 3))
def test_min_combination_matches_enumeration(c, mu):
    c = np.array(c, dtype=float)
    brute = min_comb_enum(c)
    assert is_mu_separated(c, mu) == (brute > mu)
    assert is_general_position(c) == (brute > 1e-9)


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=6), st.floats(0, 1), st.floats(0, 1))
def test_separation_monotone(c, a, b):
    lo, hi = sorted((a, b))
    if is_mu_separated(c, hi):
        assert is_mu_separated(c, lo)
    if is_general_position(c, tol=hi):
        assert is_mu_separated(c, hi)


# -- unique sign property ----------------------------------------------------


def patterns_by_enumeration(masks, n):
    return {tuple(eval_parity(S, x) for S in masks) for x in all_points(n)}


def test_realizable_patterns_match_enumeration():
    masks = [P(1), P(2), P(1, 2), P(3)]
    got = {tuple(r) for r in realizable_patterns(masks)}
    assert got == patterns_by_enumeration(masks, 3)
    assert len(got) == 8


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.integers(1, 2**n - 1), min_size=1, max_size=6, unique=True))))
def test_realizable_patterns_property(args):
    n, masks = args
    rows = realizable_patterns(masks)
    got = {tuple(r) for r in rows}
    assert len(got) == rows.shape[0]
    assert got == patterns_by_enumeration(masks, n)


def test_unique_sign_examples():
    assert has_unique_sign_property(SparsePolynomial(2, {P(1): 2.0, P(2): 3.0}))
    f = SparsePolynomial(2, {P(1): 1.0, P(2): 1.0, P(1, 2): -1.0})
    values = sorted((realizable_patterns(list(f.terms)) @ f.coefficients).tolist())
    assert values == [-3.0, 1.0, 1.0, 1.0]
    assert not has_unique_sign_property(f)


def brute_unique_sign(f):
    vals = f.evaluate(all_points(f.n))
    top = vals.max()
    pts = all_points(f.n)[np.abs(vals - top) <= 1e-9]
    pats = {tuple(eval_parity(S, x) for S in f.terms) for x in pts}
    return len(pats) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(1, 5), st.integers(0, 2**32 - 1), st.sampled_from(["gp", "pos", "ind"]))
def test_sufficient_conditions_imply_unique_sign(n, s, seed, case):
    rng = np.random.default_rng(seed)
    s = min(s, 2**n - 1)
    masks = [int(S) for S in rng.choice(np.arange(1, 2**n), size=s, replace=False)]
    if case == "gp":
        coeffs = rng.normal(size=s)
        if not is_general_position(coeffs):
            return
    elif case == "pos":
        coeffs = rng.uniform(0.1, 3, size=s)
    else:
        if not linearly_independent(masks):
            return
        coeffs = rng.choice([-2.0, -1.0, 1.0, 2.0], size=s)
    f = SparsePolynomial(n, dict(zip(masks, coeffs)))
    assert has_unique_sign_property(f)
    assert brute_unique_sign(f)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_unique_sign_matches_brute_force(n, seed):
    rng = np.random.default_rng(seed)
    s = int(rng.integers(1, min(5, 2**n - 1) + 1))
    masks = rng.choice(np.arange(1, 2**n), size=s, replace=False)
    f = SparsePolynomial(n, {int(S): float(c) for S, c in zip(masks, rng.integers(-2, 3, size=s)) if c})
    if f.sparsity:
        assert has_unique_sign_property(f) == brute_unique_sign(f)
