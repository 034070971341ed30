import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from coreset_smi.errors import InputError, NumericError
from coreset_smi.numerics import LpProblem, LpStatus, linsolve, lp_solve, sym_eig_min, sym_eigvals

CUBE_A = np.vstack([np.eye(3), -np.eye(3)])
CUBE_B = np.ones(6)


def test_lp_cube_vertex():
    res = lp_solve(LpProblem([-1.0, 0.0, 0.0], CUBE_A, CUBE_B))
    assert res.status is LpStatus.OPTIMAL
    assert res.value == pytest.approx(-1.0, abs=1e-12)
    assert res.optimizer[0] == pytest.approx(1.0)


def test_lp_infeasible():
    res = lp_solve(LpProblem([1.0], [[1.0], [-1.0]], [-1.0, -2.0]))
    assert res.status is LpStatus.INFEASIBLE
    assert res.optimizer is None and res.value is None


def test_lp_unbounded():
    res = lp_solve(LpProblem([-1.0, 0.0], [[0.0, 1.0]], [1.0]))
    assert res.status is LpStatus.UNBOUNDED


@pytest.mark.parametrize("c, A, b", [
    ([1.0, 2.0], [[1.0, 2.0, 3.0]], [1.0]),
    ([1.0], [[1.0]], [1.0, 2.0]),
    ([np.nan], [[1.0]], [1.0]),
])
def test_lp_rejects_malformed(c, A, b):
    with pytest.raises(InputError):
        LpProblem(c, A, b)


def test_lp_iteration_cap_is_not_infeasible():
    rng = np.random.default_rng(3)
    A = np.vstack([rng.standard_normal((30, 5)), np.eye(5), -np.eye(5)])
    b = np.concatenate([rng.random(30) + 0.1, np.ones(10)])
    with pytest.raises(NumericError):
        lp_solve(LpProblem(rng.standard_normal(5), A, b), max_iter=1)


def _random_bounded_lp(rng, n, m):
    A = np.vstack([rng.standard_normal((m, n)), np.eye(n), -np.eye(n)])
    x0 = rng.uniform(-1, 1, n)
    b = A @ x0 + rng.uniform(0.0, 2.0, A.shape[0])
    return rng.standard_normal(n), A, b


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(0, 24))
def test_lp_matches_reference_and_dual_certificate(seed, n, m):
    rng = np.random.default_rng(seed)
    c, A, b = _random_bounded_lp(rng, n, m)
    res = lp_solve(LpProblem(c, A, b))
    assert res.status is LpStatus.OPTIMAL
    assert np.all(A @ res.optimizer <= b + 1e-8 * (1 + np.abs(b)))
    ref = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
    assert res.value == pytest.approx(ref.fun, abs=1e-7 * (1 + abs(ref.fun)))
    y = res.dual
    assert np.all(y >= -1e-9)
    assert np.allclose(A.T @ y, -c, atol=1e-7)
    assert -b @ y == pytest.approx(res.value, abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 32))
def test_lp_infeasible_classified(seed, n, m):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((m, n))
    h = rng.standard_normal(n)
    A = np.vstack([A, h, -h])
    b = np.concatenate([np.abs(rng.standard_normal(m)) + 1.0, [-1.0, -1.0]])  # h.x <= -1 and h.x >= 1
    assert lp_solve(LpProblem(rng.standard_normal(n), A, b)).status is LpStatus.INFEASIBLE


def test_lp_deterministic():
    rng = np.random.default_rng(11)
    c, A, b = _random_bounded_lp(rng, 6, 30)
    first = lp_solve(LpProblem(c, A, b))
    for _ in range(5):
        again = lp_solve(LpProblem(c, A, b))
        assert again.status is first.status
        assert again.value == first.value
        assert np.array_equal(again.optimizer, first.optimizer)


def test_lp_degenerate_cycling_example():
    # Beale's example, which cycles under Dantzig pricing without a safeguard
    c = np.array([-0.75, 150.0, -0.02, 6.0])
    A = np.array([[0.25, -60.0, -0.04, 9.0], [0.5, -90.0, -0.02, 3.0], [0.0, 0.0, 1.0, 0.0]])
    b = np.array([0.0, 0.0, 1.0])
    A = np.vstack([A, -np.eye(4)])
    b = np.concatenate([b, np.zeros(4)])
    res = lp_solve(LpProblem(c, A, b))
    assert res.status is LpStatus.OPTIMAL
    assert res.value == pytest.approx(-0.05, abs=1e-9)


@pytest.mark.parametrize("S, expected", [
    (np.diag([2.0, 5.0, 1.0]), 1.0),
    ([[2.0, 1.0], [1.0, 2.0]], 1.0),
    (np.eye(4), 1.0),
])
def test_sym_eig_min_examples(S, expected):
    assert sym_eig_min(S) == pytest.approx(expected, rel=1e-12)


def test_sym_eig_min_rejects_non_square():
    with pytest.raises(InputError):
        sym_eig_min(np.ones((2, 3)))


def test_sym_eig_symmetrizes():
    S = np.array([[2.0, 1.0 + 1e-11], [1.0, 2.0]])
    assert sym_eig_min(S) == pytest.approx(1.0 - 5e-12, abs=1e-12)


def _gram_schmidt(V):
    Q = np.zeros_like(V)
    for j in range(V.shape[1]):
        q = V[:, j] - Q[:, :j] @ (Q[:, :j].T @ V[:, j])
        Q[:, j] = q / np.linalg.norm(q)
    return Q


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_sym_eig_min_similarity(seed, n):
    rng = np.random.default_rng(seed)
    Q = _gram_schmidt(rng.standard_normal((n, n)))
    d = rng.uniform(-5, 5, n)
    S = Q @ np.diag(d) @ Q.T
    assert sym_eig_min(S) == pytest.approx(d.min(), abs=1e-8 * max(1.0, np.abs(d).max()))
    assert np.allclose(sym_eigvals(S), np.sort(d), atol=1e-8 * max(1.0, np.abs(d).max()))


@pytest.mark.parametrize("A, b, x", [
    (np.eye(3), [1.0, 2.0, 3.0], [1.0, 2.0, 3.0]),
    ([[2.0, 0.0], [0.0, 4.0]], [2.0, 8.0], [1.0, 2.0]),
])
def test_linsolve_examples(A, b, x):
    assert np.allclose(linsolve(A, b), x, atol=1e-12)


def test_linsolve_singular():
    assert linsolve([[1.0, 1.0], [1.0, 1.0]], [1.0, 0.0]) is None


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 10))
def test_linsolve_residual(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n)) + n * np.eye(n)
    b = rng.standard_normal(n)
    x = linsolve(A, b)
    assert np.max(np.abs(A @ x - b)) <= 1e-9 * (1 + np.max(np.abs(b)))
