"""Closed-form bounds on volume decay, trigger gaps and coreset size.

Every evaluator here is a pure function; the empirical validators compare
them with quantities recorded in a :class:`~coreset_smi.learner.RunLog`.
"""
from dataclasses import dataclass
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InputError


def grunbaum_C(alpha0: float, n_z: int) -> float:
    """Guaranteed fraction of volume kept by a cut at normalized offset ``alpha0``.

    ``C = 1 - (n (alpha0 + 1) / (n + 1))**n``. Decreases from 1 at
    ``alpha0 = -1`` (tangent cut) to ``1 - (n/(n+1))**n`` at a central cut.
    """
    if not (-1.0 <= alpha0 <= 0.0):
        raise InputError(f"alpha0 must lie in [-1, 0], got {alpha0}")
    if n_z < 1:
        raise InputError("n_z must be at least 1")
    return 1.0 - (n_z * (alpha0 + 1.0) / (n_z + 1.0)) ** n_z


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


@dataclass(frozen=True)
class BoundParams:
    """Constants entering the bounds.

    ``mu0`` holds the prior volumes per component, ``kappa`` the shape
    constant (radius over inradius), ``C_Q`` and ``p`` the tightness envelope
    ``Q(eps) <= C_Q eps**p``. ``delta_seq`` defaults to all zeros.
    """

    alpha0: float
    n_z: int
    mu0: Sequence[float]
    beta: float = 1.0
    N_u: int = 1
    b_z: float = 1.0
    kappa: float = 1.0
    C_Q: float = 1.0
    p: float = 1.0
    delta_seq: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.beta <= 0 or self.b_z <= 0:
            raise InputError("beta and b_z must be positive")
        if self.kappa < 1:
            raise InputError("kappa must be at least 1")
        object.__setattr__(self, "mu0", np.atleast_1d(np.asarray(self.mu0, dtype=float)))

    def delta_sum(self, K):
        if self.delta_seq is None:
            return 0.0
        return float(np.sum(np.asarray(self.delta_seq, dtype=float)[:K]))


@dataclass(frozen=True)
class DerivedConstants:
    C: float
    eta: float
    rho: float
    B: np.ndarray
    v_nz: float


def derived_constants(params: BoundParams) -> DerivedConstants:
    C = grunbaum_C(params.alpha0, params.n_z)
    eta = C ** (1.0 / params.n_z)
    v = unit_ball_volume(params.n_z)
    B = params.b_z * params.kappa * (params.mu0 / v) ** (1.0 / params.n_z)
    return DerivedConstants(C, eta, eta ** params.p, B, v)


def volume_bound_from(mu0, C, n_sel) -> np.ndarray:
    return np.asarray(mu0, dtype=float) * float(C) ** np.asarray(n_sel, dtype=float)


def volume_bound(params: BoundParams, n_sel) -> np.ndarray:
    """Per-component volume bound ``mu0 * C**n_sel``; its max bounds the worst-case volume."""
    n_sel = np.asarray(n_sel)
    if np.any(n_sel < 0):
        raise InputError("selection counts must be non-negative")
    return volume_bound_from(params.mu0, grunbaum_C(params.alpha0, params.n_z), n_sel)


def trigger_gap_bound(params: BoundParams, q_fn: Callable[[float], float], delta: float, p_eps: float) -> float:
    """High-probability bound on the wait for the next trigger, in PE windows.

    ``ln(p_eps) / ln(1 - q((-alpha0) beta delta / n_z))``; infinite when ``q``
    vanishes at the argument and zero when it equals one.
    """
    if not (0.0 < p_eps < 1.0):
        raise InputError("p_eps must lie in (0, 1)")
    q = float(q_fn((-params.alpha0) * params.beta * delta / params.n_z))
    if q <= 0.0:
        return math.inf
    if q >= 1.0:
        return 0.0
    return math.log(p_eps) / math.log1p(-q)


@dataclass(frozen=True)
class SeriesBound:
    value: float
    truncation_error: float
    terms: int
    capped: bool


def expected_selection_bound_general(params: BoundParams, Q_fn, K: int, component: int = 0, tail_tol: float = 1e-9,
                                     max_terms: int = 100_000, B: Optional[float] = None,
                                     eta: Optional[float] = None) -> SeriesBound:
    """Series bound on the expected number of selections up to ``K``.

    ``sum_k min(1, K / S(k))`` with ``S(k) = sum_{t<k} 1/q_t`` and
    ``q_t = min(1, Q(B eta**t))``. Summation stops once a term drops below
    ``tail_tol``; the reported truncation error extrapolates the tail
    geometrically from the last term ratio. If the tail does not decay the
    trivial bound ``K`` is returned with ``capped=True``. ``B`` and ``eta``
    override the values derived from ``params``.
    """
    if K < 0:
        raise InputError("K must be non-negative")
    dc = derived_constants(params)
    B = float(dc.B[component]) if B is None else float(B)
    eta = dc.eta if eta is None else float(eta)
    extra = params.delta_sum(K)
    if K == 0:
        return SeriesBound(extra, 0.0, 0, False)
    total = 0.0
    S = 0.0
    prev = None
    ratio = 1.0
    for k in range(1, max_terms + 1):
        q = min(1.0, float(Q_fn(B * eta ** (k - 1))))
        if q <= 0.0:
            # S is infinite from here on: every later term is zero
            return SeriesBound(min(total, K) + extra, 0.0, k - 1, total > K)
        S += 1.0 / q
        term = min(1.0, K / S)
        total += term
        if prev is not None and prev > 0:
            ratio = term / prev
        prev = term
        if total > K:
            return SeriesBound(K + extra, 0.0, k, True)
        if term < tail_tol:
            err = term * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
            if math.isinf(err):
                return SeriesBound(K + extra, 0.0, k, True)
            return SeriesBound(min(total + err, K) + extra, err, k, False)
    return SeriesBound(K + extra, 0.0, max_terms, True)


def power_bound(C: float, rho: float, K: int) -> float:
    """``ln(1 + C (1/rho - 1) K) / ln(1/rho)``."""
    if not (0.0 < rho < 1.0):
        raise InputError(f"rho must lie in (0, 1), got {rho}")
    return math.log1p(C * (1.0 / rho - 1.0) * K) / -math.log(rho)


def expected_selection_bound_power(params: BoundParams, K: int, component: int = 0) -> float:
    """Logarithmic coreset-size bound when ``Q(eps) <= C_Q eps**p``."""
    if params.C_Q <= 0 or params.p <= 0:
        raise InputError("C_Q and p must be positive")
    dc = derived_constants(params)
    if dc.rho >= 1.0:
        raise InputError("rho >= 1: the threshold gives no volume contraction")
    C = params.C_Q * float(dc.B[component]) ** params.p
    return power_bound(C, dc.rho, K) + params.delta_sum(K)


def shape_ratio(radius: float, inradius: float) -> float:
    return math.inf if inradius <= 0.0 else radius / inradius


@dataclass(frozen=True)
class ShapeReport:
    ratio: np.ndarray  # steps x components
    kappa_hat: np.ndarray  # per component, after burn-in


def shape_ratio_monitor(runlog, burn_in: int = 0) -> ShapeReport:
    """Radius-to-inradius ratio about the true parameters at every step.

    A zero inradius (truth on the boundary) gives an infinite ratio.
    """
    R = np.asarray(runlog.radius, dtype=float)
    r = np.asarray(runlog.inradius, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(r > 0, R / np.where(r > 0, r, 1.0), np.inf)
    return ShapeReport(ratio, np.max(ratio[burn_in:], axis=0))
