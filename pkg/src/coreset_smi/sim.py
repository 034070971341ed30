"""Simulation of bounded-disturbance systems and excitation diagnostics.

Randomness comes from counter-based Philox streams keyed by ``(seed,
stream_id)``, so each purpose (disturbance, input, measurement noise) draws
from its own reproducible stream.
"""
import csv
from dataclasses import dataclass
import logging
from typing import Optional, Tuple

import numpy as np

from .errors import DivergenceError, InputError
from .numerics import sym_eig_min

log = logging.getLogger(__name__)

DISTURBANCE_STREAM = 1
INPUT_STREAM = 2
NOISE_STREAM = 3
DIVERGENCE_LIMIT = 1e12
PROBE_SAMPLES = 100_000


def stream(seed: int, stream_id: int) -> np.random.Generator:
    """Philox generator for one purpose of one run."""
    return np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), stream_id]))


# ---------------------------------------------------------------------------
# Disturbance and input laws


@dataclass(frozen=True)
class HypercubeUniform:
    """Uniform on the box ``[-w_bar, w_bar]``."""

    w_bar: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.w_bar, dtype=float))
        if np.any(w <= 0):
            raise InputError("hypercube half-widths must be positive")
        object.__setattr__(self, "w_bar", w)

    @property
    def dim(self):
        return self.w_bar.shape[0]

    @property
    def bound(self):
        return self.w_bar

    def sample(self, rng, size):
        return (2.0 * rng.random((size, self.dim)) - 1.0) * self.w_bar


@dataclass(frozen=True)
class BallUniform:
    """Uniform on the solid Euclidean ball of the given radius."""

    radius: float
    n: int

    def __post_init__(self):
        if self.radius <= 0 or self.n < 1:
            raise InputError("ball needs positive radius and dimension")

    @property
    def dim(self):
        return self.n

    @property
    def bound(self):
        return np.full(self.n, float(self.radius))

    def sample(self, rng, size):
        return _ball(rng, self.radius, self.n, size)


@dataclass(frozen=True)
class ZeroDisturbance:
    n: int

    @property
    def dim(self):
        return self.n

    @property
    def bound(self):
        return np.zeros(self.n)

    def sample(self, rng, size):
        return np.zeros((size, self.n))


@dataclass(frozen=True)
class GaussianInput:
    """i.i.d. ``N(mean, cov)`` inputs. ``cov`` is a covariance, not a standard deviation."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.asarray(self.cov, dtype=float)
        n = mean.shape[0]
        if cov.size != n * n or (n and cov.ndim != 2):
            raise InputError(f"input covariance shape {cov.shape} does not match mean length {n}")
        cov = cov.reshape(n, n)
        if mean.shape[0] and (not np.allclose(cov, cov.T) or np.min(np.linalg.eigvalsh(cov)) < -1e-12):
            raise InputError("input covariance must be symmetric positive semidefinite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self):
        return self.mean.shape[0]

    def sample(self, rng, size):
        if self.dim == 0:
            return np.zeros((size, 0))
        w, V = np.linalg.eigh(self.cov)
        L = V * np.sqrt(np.clip(w, 0.0, None))
        return self.mean + rng.standard_normal((size, self.dim)) @ L.T


@dataclass(frozen=True)
class ConstantInput:
    value: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "value", np.atleast_1d(np.asarray(self.value, dtype=float)))

    @property
    def dim(self):
        return self.value.shape[0]

    def sample(self, rng, size):
        return np.tile(self.value, (size, 1))


def _ball(rng, radius, n, size):
    d = rng.standard_normal((size, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = radius * rng.random(size) ** (1.0 / n)
    return d * r[:, None]


def sample_ball_uniform(radius: float, n: int, seed: int, size: Optional[int] = None) -> np.ndarray:
    """Uniform draw(s) from the solid ball ``{||w||_2 <= radius}`` in R^n.

    Direction from a normalized Gaussian, radius scaled by ``U**(1/n)``.
    """
    if radius <= 0:
        raise InputError("radius must be positive")
    out = _ball(stream(seed, DISTURBANCE_STREAM), radius, n, 1 if size is None else size)
    return out[0] if size is None else out


# ---------------------------------------------------------------------------
# Regressor maps


@dataclass(frozen=True)
class MonomialBasis:
    """Monomials ``prod_j z_j**e_j`` given as exponent tuples, total degree <= 2.

    ``MonomialBasis(((0, 0), (1, 0), (0, 1), (1, 1)))`` is ``{1, z1, z2, z1 z2}``.
    """

    exponents: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        E = np.asarray(self.exponents, dtype=int)
        if E.ndim != 2 or E.shape[0] == 0:
            raise InputError("basis needs a non-empty list of equal-length exponent tuples")
        if np.any(E < 0) or np.any(E.sum(axis=1) > 2):
            raise InputError("basis exponents must be non-negative with total degree <= 2")
        object.__setattr__(self, "exponents", tuple(tuple(int(v) for v in row) for row in E))

    @property
    def arity(self):
        return len(self.exponents[0])

    @property
    def size(self):
        return len(self.exponents)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != self.arity:
            raise InputError(f"basis expects {self.arity} inputs, got {z.shape[-1]}")
        E = np.asarray(self.exponents)
        return np.prod(z[..., None, :] ** E, axis=-1)


# ---------------------------------------------------------------------------
# Systems and trajectories


@dataclass(frozen=True)
class SystemSpec:
    """``x+ = Theta phi(z) + w`` with ``z = [x; u]``.

    Linear systems use ``phi = identity`` and ``Theta = [A B]``. The
    disturbance support is probed at construction against its declared bound.
    """

    theta: np.ndarray
    n_x: int
    n_u: int
    disturbance: object
    inputs: object
    x0: np.ndarray
    basis: Optional[MonomialBasis] = None
    noise_bound: Optional[np.ndarray] = None

    def __post_init__(self):
        theta = np.atleast_2d(np.asarray(self.theta, dtype=float))
        x0 = np.atleast_1d(np.asarray(self.x0, dtype=float))
        n_phi = self.n_z if self.basis is None else self.basis.size
        if theta.shape != (self.n_x, n_phi):
            raise InputError(f"parameter matrix has shape {theta.shape}, expected ({self.n_x}, {n_phi})")
        if self.basis is not None and self.basis.arity != self.n_z:
            raise InputError(f"basis arity {self.basis.arity} does not match n_x + n_u = {self.n_z}")
        if x0.shape != (self.n_x,):
            raise InputError(f"x0 has shape {x0.shape}, expected ({self.n_x},)")
        if self.disturbance.dim != self.n_x:
            raise InputError("disturbance dimension must equal n_x")
        if self.inputs.dim != self.n_u:
            raise InputError("input dimension must equal n_u")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "x0", x0)
        if self.noise_bound is not None:
            v = np.atleast_1d(np.asarray(self.noise_bound, dtype=float))
            if v.shape != (self.n_z,) or np.any(v < 0):
                raise InputError(f"measurement-noise bound must be a non-negative vector of length {self.n_z}")
            object.__setattr__(self, "noise_bound", v)
        probe = self.disturbance.sample(np.random.Generator(np.random.Philox(key=[0, 99])), PROBE_SAMPLES)
        if np.any(np.abs(probe) > self.disturbance.bound * (1 + 1e-12)):
            raise InputError("disturbance sampler exceeds its declared bound")

    @classmethod
    def linear(cls, A, B, disturbance, inputs, x0, noise_bound=None):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        B = np.asarray(B, dtype=float).reshape(A.shape[0], -1)
        return cls(np.hstack([A, B]), A.shape[0], B.shape[1], disturbance, inputs, x0, None, noise_bound)

    @classmethod
    def nonlinear(cls, basis, theta, n_x, n_u, disturbance, inputs, x0):
        return cls(theta, n_x, n_u, disturbance, inputs, x0, basis, None)

    @property
    def n_z(self):
        return self.n_x + self.n_u

    @property
    def w_bar(self):
        return self.disturbance.bound

    def regressor(self, z):
        return z if self.basis is None else self.basis(z)


@dataclass(frozen=True)
class Trajectory:
    """One simulated run. ``z[k] = [x[k]; u[k]]`` drives ``x[k+1]``."""

    states: np.ndarray
    inputs: np.ndarray
    disturbances: np.ndarray
    z: np.ndarray
    phi: np.ndarray
    noise: Optional[np.ndarray] = None

    @property
    def K(self):
        return self.z.shape[0]

    @property
    def z_noisy(self):
        """Measured regressors ``z[k] + v[k]`` (equal to ``z`` without noise)."""
        return self.z if self.noise is None else self.z + self.noise[:-1]

    @property
    def x_noisy(self):
        """Measured states ``x[k] + v[k][:n_x]``."""
        if self.noise is None:
            return self.states
        return self.states + self.noise[:, : self.states.shape[1]]

    def to_csv(self, path):
        n_x = self.states.shape[1]
        n_u = self.inputs.shape[1]
        n_z = self.z.shape[1]
        header = (["step"] + [f"x{j + 1}" for j in range(n_x)] + [f"u{j + 1}" for j in range(n_u)]
                  + [f"w{j + 1}" for j in range(n_x)] + [f"z{j + 1}" for j in range(n_z)])
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for k in range(self.K + 1):
                row = [k] + [repr(float(v)) for v in self.states[k]]
                if k < self.K:
                    row += [repr(float(v)) for v in np.concatenate([self.inputs[k], self.disturbances[k], self.z[k]])]
                else:
                    row += [""] * (n_u + n_x + n_z)
                w.writerow(row)


def simulate(sys: SystemSpec, K: int, seed: int) -> Trajectory:
    """Simulate ``K`` steps; returns ``K + 1`` states.

    Raises
    ------
    DivergenceError
        If any state entry exceeds ``1e12`` in magnitude.
    """
    if K < 0:
        raise InputError("horizon must be non-negative")
    W = sys.disturbance.sample(stream(seed, DISTURBANCE_STREAM), K)
    if np.any(np.abs(W) > sys.w_bar):
        raise InputError("disturbance draw outside its bound")
    U = sys.inputs.sample(stream(seed, INPUT_STREAM), K)
    X = np.empty((K + 1, sys.n_x))
    Z = np.empty((K, sys.n_z))
    Phi = np.empty((K, sys.theta.shape[1]))
    X[0] = sys.x0
    for k in range(K):
        Z[k, : sys.n_x] = X[k]
        Z[k, sys.n_x:] = U[k]
        Phi[k] = sys.regressor(Z[k])
        X[k + 1] = sys.theta @ Phi[k] + W[k]
        if not np.all(np.abs(X[k + 1]) <= DIVERGENCE_LIMIT):
            raise DivergenceError(f"state diverged at step {k + 1}")
    noise = None
    if sys.noise_bound is not None:
        noise = (2.0 * stream(seed, NOISE_STREAM).random((K + 1, sys.n_z)) - 1.0) * sys.noise_bound
    return Trajectory(X, U, W, Z, Phi, noise)


# ---------------------------------------------------------------------------
# Diagnostics


@dataclass(frozen=True)
class PEReport:
    window_starts: np.ndarray
    lambda_min: np.ndarray
    beta_sq: float
    b_z: float

    @property
    def passed(self) -> bool:
        return bool(np.all(self.lambda_min >= self.beta_sq))

    @property
    def worst(self) -> float:
        return float(np.min(self.lambda_min))


def pe_check(traj, N_u: int, beta_sq: float) -> PEReport:
    """Sliding-window excitation test on the regressors.

    Window ``s`` covers ``z[s:s+N_u]``; its level is the smallest eigenvalue
    of ``(1/N_u) sum z z^T``. Accepts a :class:`Trajectory` (uses ``phi``) or
    an array of regressors.
    """
    Z = traj.phi if isinstance(traj, Trajectory) else np.atleast_2d(np.asarray(traj, dtype=float))
    K = Z.shape[0]
    if N_u < 1 or K < N_u:
        raise InputError(f"need at least N_u = {N_u} regressors, got {K}")
    outer = Z[:, :, None] * Z[:, None, :]
    csum = np.concatenate([np.zeros((1,) + outer.shape[1:]), np.cumsum(outer, axis=0)])
    starts = np.arange(K - N_u + 1)
    lam = np.array([sym_eig_min((csum[s + N_u] - csum[s]) / N_u) for s in starts])
    return PEReport(starts, lam, float(beta_sq), float(np.max(np.linalg.norm(Z, axis=1))))


def tightness_q_uniform(w_bar_i: float, eps: float) -> float:
    """Mass of the two boundary bands of width ``eps`` under U[-w_bar, w_bar]."""
    if w_bar_i <= 0 or eps < 0:
        raise InputError("need w_bar > 0 and eps >= 0")
    return min(1.0, eps / w_bar_i)


@dataclass(frozen=True)
class SignConditionReport:
    window_starts: np.ndarray
    satisfied: np.ndarray  # windows x probes
    degenerate: np.ndarray  # windows

    @property
    def fraction_satisfied(self) -> float:
        return float(self.satisfied.mean()) if self.satisfied.size else float("nan")


def sign_condition_diagnostic(z, centroids, theta_true, beta, delta, N_G, probes=32, seed=0):
    """Check the sign/excitation condition window by window.

    For window start ``k0`` and probe ``v`` on the sphere of radius ``delta``,
    the window passes if some ``k`` in ``k0+1 .. k0+N_G`` has
    ``|z_k.v| >= beta*delta`` and ``sgn(z_k.v) = -sgn(z_k.(g_k - theta))``.
    ``centroids[k]`` is the centroid after step ``k``. A window whose
    centroid offsets all vanish along ``z`` is flagged degenerate.
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    G = np.atleast_2d(np.asarray(centroids, dtype=float))
    theta = np.asarray(theta_true, dtype=float)
    K, n = z.shape
    if G.shape[0] < K:
        raise InputError("need one centroid per regressor")
    rng = stream(seed, 4)
    V = rng.standard_normal((probes, n))
    V *= delta / np.linalg.norm(V, axis=1, keepdims=True)
    zv = z @ V.T  # K x probes
    zg = np.einsum("kj,kj->k", z, G[:K] - theta)
    tiny = 1e-12 * (1.0 + np.abs(z).max())
    strong = np.abs(zv) >= beta * delta
    opposite = np.sign(zv) == -np.sign(zg)[:, None]
    ok = strong & opposite & (np.abs(zg) > tiny)[:, None]
    starts = np.arange(0, max(K - N_G, 0))
    sat = np.array([ok[s + 1:s + 1 + N_G].any(axis=0) for s in starts]).reshape(len(starts), probes)
    degen = np.array([np.all(np.abs(zg[s + 1:s + 1 + N_G]) <= tiny) for s in starts], dtype=bool)
    return SignConditionReport(starts, sat, degen)
