"""Dense linear algebra and linear programming substrate.

Problem sizes here are tiny (a handful of variables, at most a few hundred
constraints), so everything is dense and deterministic.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import kernels
from .errors import InputError, NumericError

TAU_FEAS = 1e-8
TAU_OPT = 1e-8
TAU_PIVOT = 1e-11


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


_STATUS = {
    kernels.OPTIMAL: LpStatus.OPTIMAL,
    kernels.INFEASIBLE: LpStatus.INFEASIBLE,
    kernels.UNBOUNDED: LpStatus.UNBOUNDED,
}


@dataclass(frozen=True)
class LpProblem:
    """minimize ``objective . x`` subject to ``constraints @ x <= rhs``."""

    objective: np.ndarray
    constraints: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float)
        A = np.asarray(self.constraints, dtype=float)
        b = np.asarray(self.rhs, dtype=float)
        if A.ndim != 2 or c.ndim != 1 or b.ndim != 1:
            raise InputError("LP expects a 1-D objective, 2-D constraint matrix and 1-D rhs")
        m, n = A.shape
        if m < 1 or n < 1:
            raise InputError("LP needs at least one constraint and one variable")
        if c.shape[0] != n or b.shape[0] != m:
            raise InputError(f"LP dimension mismatch: objective {c.shape}, constraints {A.shape}, rhs {b.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise InputError("LP data must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", A)
        object.__setattr__(self, "rhs", b)


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    optimizer: Optional[np.ndarray] = None
    value: Optional[float] = None
    dual: Optional[np.ndarray] = None
    iterations: int = 0

    @property
    def optimal(self):
        return self.status is LpStatus.OPTIMAL


def lp_solve(p: LpProblem, max_iter: Optional[int] = None) -> LpResult:
    """Solve a small dense LP with the two-phase simplex method.

    Dantzig pricing with lowest-index tie breaking; Bland's rule takes over
    after a run of degenerate pivots, which rules out cycling.

    Raises
    ------
    NumericError
        If the iteration cap is hit. This is never reported as infeasible.
    """
    m, n = p.constraints.shape
    if max_iter is None:
        max_iter = 50 * (m + 2 * n) + 100
    status, x, value, dual, iters = kernels.lp_simplex(p.constraints, p.rhs, p.objective, max_iter)
    if status == kernels.ITERATION_LIMIT:
        raise NumericError(f"simplex iteration cap ({max_iter}) exceeded")
    st = _STATUS[status]
    if st is not LpStatus.OPTIMAL:
        return LpResult(st, iterations=int(iters))
    return LpResult(st, np.asarray(x, dtype=float), float(value), np.asarray(dual, dtype=float), int(iters))


def minimize(c, A, b) -> LpResult:
    return lp_solve(LpProblem(c, A, b))


def _square(S, what):
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InputError(f"{what} must be a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InputError(f"{what} must be finite")
    return S


def sym_eigvals(S) -> np.ndarray:
    """All eigenvalues of a symmetric matrix (ascending), via cyclic Jacobi."""
    S = _square(S, "S")
    S = 0.5 * (S + S.T)
    return np.sort(kernels.jacobi_eigenvalues(S, 1e-15, 100))


def sym_eig_min(S) -> float:
    """Smallest eigenvalue of a symmetric matrix.

    Input that is only approximately symmetric is symmetrized by averaging.
    """
    return float(sym_eigvals(S)[0])


def linsolve(A, b) -> Optional[np.ndarray]:
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    Returns None when a pivot falls below ``TAU_PIVOT`` relative to the
    largest entry of ``A``, i.e. the system is numerically singular.
    """
    A = _square(A, "A")
    b = np.asarray(b, dtype=float)
    n = A.shape[0]
    if b.shape != (n,):
        raise InputError(f"rhs has shape {b.shape}, expected ({n},)")
    M = np.hstack([A, b[:, None]])
    scale = max(np.max(np.abs(A)), 1e-300)
    for k in range(n):
        p = k + int(np.argmax(np.abs(M[k:, k])))
        if abs(M[p, k]) < TAU_PIVOT * scale:
            return None
        if p != k:
            M[[k, p]] = M[[p, k]]
        M[k + 1:, k:] -= np.outer(M[k + 1:, k] / M[k, k], M[k, k:])
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (M[k, n] - M[k, k + 1:n] @ x[k + 1:]) / M[k, k]
    return x
