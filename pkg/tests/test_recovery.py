import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boolsketch.errors import DimensionMismatch, Infeasible
from boolsketch.fourier import SparsePolynomial, parity_mask
from boolsketch.generators import random_parities
from boolsketch.recovery import CandidateSet, basis_pursuit, bpdn, build_design
from boolsketch.sampling import SampleBatch, uniform_points

cp = pytest.importorskip("cvxpy")


def P(*idx):
    return parity_mask(idx)


def random_design(seed, m, n, k):
    rng = np.random.default_rng(seed)
    X = uniform_points(rng, m, n)
    sets = [0] + random_parities(rng, n, k - 1)
    return X, CandidateSet(n, sets), build_design(X, sets), rng


def cvx_bpdn(A, y, delta):
    m, p = A.shape
    b = cp.Variable(p)
    prob = cp.Problem(cp.Minimize(cp.norm1(b)), [cp.norm2(A @ b - y) <= np.sqrt(m) * delta])
    prob.solve(solver=cp.CLARABEL)
    return b.value, prob.value


# -- design ------------------------------------------------------------------


def test_design_examples():
    X = uniform_points(np.random.default_rng(0), 20, 4)
    assert np.all(build_design(X, [0]) == 1)
    x = np.array([[-1, 1, 1, 1]], dtype=np.int8)
    assert build_design(x, [P(1)])[0, 0] == -1


def test_design_character_property():
    X = uniform_points(np.random.default_rng(1), 200, 6)
    S, T = P(1, 2, 5), P(2, 3)
    A = build_design(X, [S, T, S ^ T])
    assert np.array_equal(A[:, 0] * A[:, 1], A[:, 2])


def test_design_dimension_check():
    X = uniform_points(np.random.default_rng(1), 5, 3)
    with pytest.raises(DimensionMismatch):
        build_design(SampleBatch(X, np.zeros(5)), CandidateSet(4, [P(4)]))


def test_candidate_set_rules():
    with pytest.raises(ValueError):
        CandidateSet(3, [P(1), P(1)])
    c = CandidateSet.canonical(3, [P(3), P(1), P(1), 0])
    assert c.sets == (0, P(1), P(3))
    assert c.to_json() == [[], [1], [3]]


# -- basis pursuit -----------------------------------------------------------


def exhaustive_min_l1(A, y, max_support=3):
    """Oracle: smallest L1 among exact solutions on supports up to max_support."""
    best = np.inf
    p = A.shape[1]
    for k in range(1, max_support + 1):
        for T in itertools.combinations(range(p), k):
            sub = A[:, T]
            b, *_ = np.linalg.lstsq(sub, y, rcond=None)
            if np.linalg.norm(sub @ b - y) < 1e-9:
                best = min(best, np.abs(b).sum())
    return best


def test_basis_pursuit_single_column():
    X, cands, A, _ = random_design(0, 60, 10, 8)
    y = 3 * A[:, 3]
    res = basis_pursuit(A, y)
    expect = np.zeros(8)
    expect[3] = 3
    assert np.max(np.abs(res.beta - expect)) <= 1e-9
    assert res.objective == pytest.approx(exhaustive_min_l1(A, y), abs=1e-9)
    assert res.status == "feasible" and res.residual <= res.tolerance


def test_basis_pursuit_zero_and_infeasible():
    _, _, A, _ = random_design(1, 30, 6, 5)
    assert np.all(basis_pursuit(A, np.zeros(30)).beta == 0)
    with pytest.raises(Infeasible):
        basis_pursuit(np.ones((2, 1)), np.array([1.0, -1.0]))


def test_basis_pursuit_rejects_empty():
    with pytest.raises(ValueError):
        basis_pursuit(np.zeros((3, 0)), np.zeros(3))
    with pytest.raises(DimensionMismatch):
        basis_pursuit(np.ones((3, 2)), np.zeros(4))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_truth_is_feasible_so_objective_bounded(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(2, 10))
    A = rng.choice([-1.0, 1.0], size=(int(rng.integers(1, 3 * p)), p))
    c = rng.normal(size=p) * (rng.random(p) < 0.5)
    res = basis_pursuit(A, A @ c)
    assert res.objective <= np.abs(c).sum() * (1 + 1e-8) + 1e-9
    assert np.linalg.norm(A @ res.beta - A @ c) <= 1e-8 * (1 + np.linalg.norm(A @ c))


def test_basis_pursuit_exact_recovery_rate():
    # n=20, s=3, |S|=16 with the sample count scaled far below 4096 n s^2
    hits = 0
    for t in range(40):
        X, cands, A, rng = random_design(100 + t, 160, 20, 16)
        true = np.zeros(16)
        idx = rng.choice(16, size=3, replace=False)
        true[idx] = rng.choice([-1, 1], 3) * rng.uniform(0.5, 2, 3)
        res = basis_pursuit(A, A @ true)
        hits += np.max(np.abs(res.beta - true)) <= 1e-6
    assert hits / 40 >= 0.95


# -- denoising ---------------------------------------------------------------


def test_bpdn_large_delta_gives_zero():
    _, _, A, rng = random_design(2, 50, 8, 6)
    y = rng.normal(size=50)
    res = bpdn(A, y, np.linalg.norm(y) / np.sqrt(50) + 1e-9)
    assert np.all(res.beta == 0)


def test_bpdn_zero_delta_is_basis_pursuit():
    _, _, A, rng = random_design(3, 50, 8, 6)
    y = A @ np.array([0, 1.5, 0, 0, -2, 0])
    a, b = bpdn(A, y, 0.0), basis_pursuit(A, y)
    assert np.allclose(a.beta, b.beta)
    with pytest.raises(ValueError):
        bpdn(A, y, -1.0)


def test_bpdn_infeasible_radius():
    A = np.ones((4, 1))
    y = np.array([1.0, -1.0, 1.0, -1.0])
    with pytest.raises(Infeasible):
        bpdn(A, y, 0.5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.5))
def test_bpdn_matches_reference_solver(seed, delta):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(2, 64))
    m = int(rng.integers(p, 3 * p + 5))
    A = rng.choice([-1.0, 1.0], size=(m, p))
    c = np.zeros(p)
    k = min(p, 3)
    c[rng.choice(p, k, replace=False)] = rng.normal(0, 2, k)
    y = A @ c + rng.uniform(-delta, delta, m)
    res = bpdn(A, y, delta)
    assert res.residual <= delta * (1 + 1e-6)
    _, ref = cvx_bpdn(A, y, delta)
    assert res.objective <= ref * (1 + 1e-6) + 1e-9
    assert res.objective >= ref * (1 - 1e-6) - 1e-9
    # any feasible point, the truth included, is no better
    if np.linalg.norm(A @ c - y) / np.sqrt(m) <= delta:
        assert res.objective <= np.abs(c).sum() * (1 + 1e-6)


def test_bpdn_error_bound_instance():
    # ||beta - c_S||_2 <= 4 delta + 8 (n/m)^(1/4) ||c outside I, inside S||_1
    n, m, delta = 12, 2000, 0.1
    X, cands, A, rng = random_design(9, m, n, 10)
    c = np.zeros(10)
    c[[1, 4]] = [10.0, -20.0]
    c[[6, 7]] = [0.02, -0.02]
    y = A @ c + rng.uniform(-0.05, 0.05, m)
    res = bpdn(A, y, delta)
    bound = 4 * delta + 8 * (n / m) ** 0.25 * 0.04
    assert np.linalg.norm(res.beta - c) <= bound


def test_recovery_result_polynomial():
    X, cands, A, _ = random_design(4, 40, 6, 4)
    true = np.array([0.0, 2.0, 0.0, -1.0])
    res = basis_pursuit(A, A @ true)
    f = res.polynomial(cands, threshold=1e-7)
    assert f == SparsePolynomial(6, {cands.sets[1]: 2.0, cands.sets[3]: -1.0})
    obj = res.to_json(cands)
    assert obj["solver"] == "highs-lp" and len(obj["candidates"]) == 4
