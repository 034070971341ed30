"""The compiled kernels and the numpy fallback must agree."""
import numpy as np
import pytest

from coreset_smi import kernels

try:
    COMPILED = kernels.implementation("compiled")
except ImportError:  # extension not built
    COMPILED = None
PY = kernels.implementation("python")

needs_ext = pytest.mark.skipif(COMPILED is None, reason="compiled kernels not built")


def _lp(seed, n, m, infeasible=False):
    rng = np.random.default_rng(seed)
    A = np.vstack([rng.standard_normal((m, n)), np.eye(n), -np.eye(n)])
    b = A @ rng.uniform(-1, 1, n) + rng.uniform(-0.2, 2.0, A.shape[0])
    if infeasible:
        A = np.vstack([A, A[0], -A[0]])
        b = np.concatenate([b, [-1.0, -1.0]])
    return A, b, rng.standard_normal(n)


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


@needs_ext
@pytest.mark.parametrize("seed", range(40))
def test_lp_backends_agree(seed):
    A, b, c = _lp(seed, 1 + seed % 6, 3 + seed, infeasible=seed % 7 == 0)
    r1 = COMPILED.lp_simplex(A, b, c, 10_000)
    r2 = PY.lp_simplex(A, b, c, 10_000)
    assert r1[0] == r2[0]
    assert r1[4] == r2[4]  # same pivot count
    if r1[0] == kernels.OPTIMAL:
        assert r1[2] == pytest.approx(r2[2], abs=1e-12)
        assert np.allclose(r1[1], r2[1], atol=1e-10)
        assert np.allclose(r1[3], r2[3], atol=1e-10)


@needs_ext
def test_jacobi_backends_agree():
    rng = np.random.default_rng(0)
    S = rng.standard_normal((7, 7))
    S = S + S.T
    assert np.allclose(np.sort(COMPILED.jacobi_eigenvalues(S, 1e-15, 100)),
                       np.sort(PY.jacobi_eigenvalues(S, 1e-15, 100)), atol=1e-12)


@needs_ext
def test_hit_and_run_backends_agree():
    rng = np.random.default_rng(1)
    H = np.vstack([np.eye(3), -np.eye(3), [[1.0, 1.0, 1.0]]])
    c = np.array([1.0, 1, 1, 1, 1, 1, 1.5])
    dirs = rng.standard_normal((2, 300, 3))
    us = rng.random((2, 300))
    starts = np.zeros((2, 3))
    a = COMPILED.hit_and_run(H, c, starts, dirs, us, 50)
    b = PY.hit_and_run(H, c, starts, dirs, us, 50)
    assert np.allclose(a, b, atol=1e-10)


@pytest.mark.parametrize("impl", [PY] + ([COMPILED] if COMPILED else []), ids=lambda m: m.__name__)
def test_hit_and_run_unbounded_chord(impl):
    H = np.array([[1.0, 0.0]])
    with pytest.raises(ValueError):
        impl.hit_and_run(H, np.ones(1), np.zeros((1, 2)), np.ones((1, 5, 2)), np.full((1, 5), 0.5), 0)


@needs_ext
def test_hildreth_backends_agree():
    H = np.vstack([np.eye(3), -np.eye(3)])
    c = np.full(6, 0.5)
    v = np.array([2.0, -3.0, 0.1])
    x1, n1, ok1 = COMPILED.hildreth_project(H, c, v, 1e-12, 10_000)
    x2, n2, ok2 = PY.hildreth_project(H, c, v, 1e-12, 10_000)
    assert ok1 and ok2 and n1 == n2
    assert np.allclose(x1, [0.5, -0.5, 0.1]) and np.allclose(x1, x2, atol=1e-12)


def test_hildreth_reports_non_convergence():
    H = np.array([[1.0, 0.2], [1.0, -0.2]])
    x, sweeps, ok = PY.hildreth_project(H, np.zeros(2), np.array([5.0, 1.0]), 1e-12, 1)
    assert not ok and sweeps == 1
    x, sweeps, ok = PY.hildreth_project(H, np.zeros(2), np.array([5.0, 1.0]), 1e-12, 100)
    assert ok and np.allclose(x, 0.0)
