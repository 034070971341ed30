"""Online coreset selection for set-membership identification.

Each state component ``i`` keeps a polytope ``P^i`` of parameter vectors
consistent with the selected data. A new pair ``(z, x_i)`` contributes the
slab ``|x_i - z.theta| <= w_i``; it is selected only when one of its two
halfspaces cuts deep enough relative to the centroid, as measured by the
normalized offsets.
"""
from dataclasses import dataclass, field, replace
import csv
import logging
import time
from typing import List, Optional, Tuple

import numpy as np

from . import polytope as pt
from .errors import (
    CapacityError,
    DegenerateGeometryError,
    EmptyPolytopeError,
    InputError,
    ModelFalsifiedError,
)
from .polytope import HPolytope
from .sim import MonomialBasis, SystemSpec, Trajectory, simulate

log = logging.getLogger(__name__)

POLICIES = ("exact", "sampled", "auto")
TAU_DEGENERATE = 1e-12


@dataclass(frozen=True)
class LearnerConfig:
    """Learner settings.

    Parameters
    ----------
    alpha0 : float
        Selection threshold in ``[-1, 0)``; -1 keeps every informative pair.
    w_bound : array_like
        Disturbance bound used in the constraints (may exceed the true one).
    v_bound : array_like, optional
        Element-wise measurement-noise bound on ``z``; enables the noisy variant.
    regressor_map : MonomialBasis, optional
        Feature map applied to ``z``; ``None`` is the identity.
    update_policy : {"exact", "sampled", "auto"}
        Exact vertex/centroid updates, LP reduction plus Hit-and-Run, or exact
        whenever the enumeration caps allow.
    """

    alpha0: float
    w_bound: np.ndarray
    v_bound: Optional[np.ndarray] = None
    regressor_map: Optional[MonomialBasis] = None
    update_policy: str = "auto"
    initial_radius: float = 1.0
    hitrun_chains: int = 8
    hitrun_steps: int = 2000
    hitrun_burn: float = 0.25
    mc_samples: int = 20_000
    seed: int = 0

    def __post_init__(self):
        if not (-1.0 <= self.alpha0 < 0.0):
            raise InputError(f"alpha0 must lie in [-1, 0), got {self.alpha0}")
        w = np.atleast_1d(np.asarray(self.w_bound, dtype=float))
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise InputError("w_bound must be positive and finite")
        object.__setattr__(self, "w_bound", w)
        if self.v_bound is not None:
            v = np.atleast_1d(np.asarray(self.v_bound, dtype=float))
            if np.any(v < 0):
                raise InputError("v_bound must be non-negative")
            object.__setattr__(self, "v_bound", v)
        if self.update_policy not in POLICIES:
            raise InputError(f"update_policy must be one of {POLICIES}")
        if self.initial_radius <= 0:
            raise InputError("initial_radius must be positive")


@dataclass(frozen=True)
class DataPoint:
    z_prev: np.ndarray
    x_next: np.ndarray
    step: int


@dataclass(frozen=True)
class ComponentState:
    """Feasible set of one state equation plus its selection history.

    ``vertices`` is kept only on the exact path. ``discarded`` holds the
    ``(step, h, c)`` rows of pairs this component declined to select.
    """

    i: int
    P: HPolytope
    g: np.ndarray
    volume: float
    vertices: Optional[np.ndarray] = None
    interior: Optional[np.ndarray] = None
    n_sel: int = 0
    trigger_times: Tuple[int, ...] = ()
    hbar: float = 0.0
    discarded: Tuple[Tuple[int, np.ndarray, float], ...] = ()
    policy: str = "exact"

    def support(self, xi):
        if self.vertices is not None:
            return float(np.max(self.vertices @ xi))
        return pt.support(self.P, xi, self.interior)

    def centered_support(self, xi):
        return self.support(xi) - float(xi @ self.g)


@dataclass(frozen=True)
class StackedFeasibleSet:
    components: Tuple[ComponentState, ...]

    @property
    def worst_case_volume(self) -> float:
        return max(c.volume for c in self.components)

    def contains(self, Theta) -> bool:
        return all(c.P.contains(row) for c, row in zip(self.components, np.atleast_2d(Theta)))


# ---------------------------------------------------------------------------
# Elementary operations


def apply_regressor_map(regressor_map, z_raw) -> np.ndarray:
    """Evaluate the feature map; ``None`` (identity) returns the input."""
    z = np.asarray(z_raw, dtype=float)
    if regressor_map is None:
        return z
    return regressor_map(z)


def offsets(comp: ComponentState, z, x_i: float, w_i: float):
    """Normalized offsets ``(alpha_plus, alpha_minus)`` of the pair's two halfspaces.

    Raises
    ------
    DegenerateGeometryError
        When the set is flat along ``z`` (a centered support value is zero).
    """
    z = np.asarray(z, dtype=float)
    if w_i <= 0:
        raise InputError("w_i must be positive")
    hp = comp.centered_support(z)
    hm = comp.centered_support(-z)
    if hp <= TAU_DEGENERATE or hm <= TAU_DEGENERATE:
        raise DegenerateGeometryError(f"centered support vanished along z (h+={hp:.3g}, h-={hm:.3g})")
    zg = float(z @ comp.g)
    return (-x_i - w_i + zg) / hp, (x_i - w_i - zg) / hm


def sub_trigger(alpha_plus: float, alpha_minus: float, alpha0: float) -> bool:
    return max(alpha_plus, alpha_minus) >= alpha0


def noisy_bound(comp: ComponentState, v_bound, base_w_i: float, v_i: float) -> float:
    """Constraint half-width under measurement noise.

    ``base_w_i + v_i + zeta`` with ``zeta = sum_j v_bound[j] * sup_P |theta_j|``.
    """
    v_bound = np.asarray(v_bound, dtype=float)
    if np.any(v_bound < 0):
        raise InputError("v_bound must be non-negative")
    n = comp.P.dim
    zeta = 0.0
    for j in np.nonzero(v_bound)[0]:
        e = np.zeros(n)
        e[j] = 1.0
        zeta += v_bound[j] * max(comp.support(e), comp.support(-e))
    return base_w_i + v_i + zeta


def _resolve_policy(policy, P: HPolytope, extra_rows=0):
    if policy != "auto":
        return policy
    ok = P.dim <= pt.MAX_VERTEX_DIM and P.n_rows + extra_rows <= pt.MAX_VERTEX_ROWS
    return "exact" if ok else "sampled"


def _sub_seed(seed, k, i):
    return (int(seed) * 1_000_003 + int(k) * 131 + int(i)) % (2**63)


def initial_component(i: int, P0: HPolytope, cfg: LearnerConfig) -> ComponentState:
    """State for the prior set; exact geometry whenever the caps allow."""
    P0 = pt.reduce(P0)
    policy = _resolve_policy(cfg.update_policy, P0)
    try:
        V = pt.vertices(P0).vertices
        vol, g = pt.volume_centroid_from_vertices(P0.H, P0.c, V)
    except CapacityError:
        V = None
    interior, _ = pt.chebyshev_center(P0)
    if V is None:
        g = pt.centroid_hitrun(P0, interior, cfg.hitrun_chains, cfg.hitrun_steps, _sub_seed(cfg.seed, 0, i),
                               cfg.hitrun_burn)
        vol = pt.volume_mc(P0, cfg.mc_samples, _sub_seed(cfg.seed, 0, i), interior).volume
    return ComponentState(i, P0, np.asarray(g), float(vol), V if policy == "exact" else None, interior,
                          policy=policy)


def _update_exact(comp, rows, rhs, k):
    H, c = comp.P.H, comp.P.c
    V = comp.vertices if comp.vertices is not None else pt.vertices(comp.P).vertices
    for a, b in zip(rows, rhs):
        V = pt._cut(H, c, V, a, b)
        if V.shape[0] == 0:
            raise ModelFalsifiedError(k, comp.i)
        H = np.vstack([H, a])
        c = np.append(c, b)
    scale = 1.0 + np.max(np.abs(V))
    if pt._affine_rank(V, scale) == V.shape[1]:
        keep = pt.facet_rows(H, c, V)
        H, c = H[keep], c[keep]
    vol, g = pt.volume_centroid_from_vertices(H, c, V)
    return replace(comp, P=HPolytope(H, c), g=np.asarray(g), volume=float(vol), vertices=V,
                   interior=None, policy="exact")


def _update_sampled(comp, rows, rhs, k, cfg):
    P = comp.P.intersect(rows, rhs)
    try:
        center, radius = pt.chebyshev_center(P)
    except EmptyPolytopeError:
        raise ModelFalsifiedError(k, comp.i) from None
    if radius < -1e-12:
        raise ModelFalsifiedError(k, comp.i)
    P = pt.reduce(P)
    seed = _sub_seed(cfg.seed, k, comp.i)
    g = pt.centroid_hitrun(P, center, cfg.hitrun_chains, cfg.hitrun_steps, seed, cfg.hitrun_burn)
    return replace(comp, P=P, g=g, vertices=None, interior=center if radius > 1e-12 else None,
                   volume=float("nan"), policy="sampled")


def update_component(comp: ComponentState, rows, rhs, k: int, cfg: LearnerConfig) -> ComponentState:
    """Intersect with the selected halfspaces and refresh centroid and cached geometry."""
    policy = _resolve_policy(cfg.update_policy, comp.P, len(rhs))
    if policy == "exact":
        return _update_exact(comp, rows, rhs, k)
    new = _update_sampled(comp, rows, rhs, k, cfg)
    vol = pt.volume_mc(new.P, cfg.mc_samples, _sub_seed(cfg.seed, k, comp.i), new.interior).volume
    return replace(new, volume=vol)


@dataclass(frozen=True)
class StepResult:
    gamma: bool
    gamma_i: Tuple[bool, ...]
    alpha_plus: Tuple[float, ...]
    alpha_minus: Tuple[float, ...]
    select_us: float
    update_us: float


def step(S: StackedFeasibleSet, d: DataPoint, cfg: LearnerConfig):
    """Process one data point. Returns ``(S', StepResult)``.

    Only components whose own trigger fired are updated; ``hbar`` is refreshed
    for every component on every step.
    """
    z = np.asarray(d.z_prev, dtype=float)
    x = np.atleast_1d(np.asarray(d.x_next, dtype=float))
    n_x = len(S.components)
    if x.shape != (n_x,):
        raise InputError(f"x_next has {x.shape[0]} entries for {n_x} components")
    t0 = time.perf_counter()
    decisions = []
    for comp in S.components:
        i = comp.i
        w_i = float(cfg.w_bound[i])
        if cfg.v_bound is not None:
            w_i = noisy_bound(comp, cfg.v_bound, w_i, float(cfg.v_bound[i]))
        hp = comp.centered_support(z)
        hm = comp.centered_support(-z)
        hbar = max(comp.hbar, hp, hm)
        try:
            ap, am = offsets(comp, z, x[i], w_i)
            fire = sub_trigger(ap, am, cfg.alpha0)
        except DegenerateGeometryError:
            ap = am = float("nan")
            fire = True
        decisions.append((fire, ap, am, w_i, hbar))
    t1 = time.perf_counter()
    new = []
    for comp, (fire, ap, am, w_i, hbar) in zip(S.components, decisions):
        rows = np.vstack([z, -z])
        rhs = np.array([x[comp.i] + w_i, -x[comp.i] + w_i])
        if fire:
            comp = update_component(comp, rows, rhs, d.step, cfg)
            comp = replace(comp, n_sel=comp.n_sel + 1, trigger_times=comp.trigger_times + (d.step,), hbar=hbar)
        else:
            gone = tuple((d.step, rows[j], float(rhs[j])) for j in range(2))
            comp = replace(comp, hbar=hbar, discarded=comp.discarded + gone)
        new.append(comp)
    t2 = time.perf_counter()
    fired = tuple(dec[0] for dec in decisions)
    res = StepResult(any(fired), fired, tuple(dec[1] for dec in decisions), tuple(dec[2] for dec in decisions),
                     (t1 - t0) * 1e6, (t2 - t1) * 1e6)
    return StackedFeasibleSet(tuple(new)), res


# ---------------------------------------------------------------------------
# Full runs


@dataclass
class RunLog:
    """Per-step record of one run. Index 0 of the state arrays is the prior."""

    alpha0: float
    theta_true: np.ndarray
    gamma: np.ndarray
    gamma_i: np.ndarray
    alpha_plus: np.ndarray
    alpha_minus: np.ndarray
    n_sel: np.ndarray
    volume: np.ndarray
    radius: np.ndarray
    inradius: np.ndarray
    centroid: np.ndarray
    hbar: np.ndarray
    select_us: np.ndarray
    update_us: np.ndarray
    policy: List[str]
    initial: StackedFeasibleSet
    final: StackedFeasibleSet
    trajectory: Trajectory
    membership_violations: int = 0
    nesting_violations: int = 0
    snapshots: dict = field(default_factory=dict)

    @property
    def K(self):
        return self.gamma.shape[0]

    @property
    def n_x(self):
        return self.n_sel.shape[1]

    def header(self, timings=False):
        cols = ["step", "gamma"]
        for i in range(1, self.n_x + 1):
            cols += [f"gamma_{i}", f"alpha_plus_{i}", f"alpha_minus_{i}", f"n_sel_{i}", f"volume_{i}", f"radius_{i}"]
        if timings:
            cols += ["select_us", "update_us"]
        return cols

    def rows(self, timings=False):
        for k in range(1, self.K + 1):
            row = [k, int(self.gamma[k - 1])]
            for i in range(self.n_x):
                row += [int(self.gamma_i[k - 1, i]), _fmt(self.alpha_plus[k - 1, i]),
                        _fmt(self.alpha_minus[k - 1, i]), int(self.n_sel[k, i]), _fmt(self.volume[k, i]),
                        _fmt(self.radius[k, i])]
            if timings:
                row += [_fmt(self.select_us[k - 1]), _fmt(self.update_us[k - 1])]
            yield row

    def to_csv(self, path, timings=False):
        """Write one row per step; timing columns only on request (they are not reproducible)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.header(timings))
            w.writerows(self.rows(timings))

    def timings_to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "select_us", "update_us"])
            for k in range(self.K):
                w.writerow([k + 1, _fmt(self.select_us[k]), _fmt(self.update_us[k])])


def _fmt(v):
    return repr(float(v))


def default_initial_sets(n_x, n_theta, radius):
    return [HPolytope.box(n_theta, radius) for _ in range(n_x)]


def data_stream(sys: SystemSpec, traj: Trajectory, cfg: LearnerConfig):
    """Learner inputs ``(regressor, next state)`` as the learner sees them."""
    if cfg.v_bound is not None:
        if cfg.regressor_map is not None:
            raise InputError("measurement noise is supported for linear regressors only")
        Z, X = traj.z_noisy, traj.x_noisy
    else:
        Z, X = traj.z, traj.states
    if cfg.regressor_map is not None:
        Z = cfg.regressor_map(Z)
    return Z, X[1:]


def run(sys: SystemSpec, cfg: LearnerConfig, K: int, seed: int, initial_sets=None, snapshot_steps=(),
        check=True) -> RunLog:
    """Simulate ``K`` steps and learn online.

    With ``check`` the true parameters are tested for membership after every
    step and each updated set is tested for nesting in its predecessor.
    """
    traj = simulate(sys, K, seed)
    Z, Xn = data_stream(sys, traj, cfg)
    theta = sys.theta
    n_x, n_t = theta.shape
    if cfg.w_bound.shape != (n_x,):
        raise InputError(f"w_bound has {cfg.w_bound.shape[0]} entries, system has {n_x} states")
    if Z.shape[1] != n_t:
        raise InputError(f"regressor length {Z.shape[1]} does not match parameter length {n_t}")
    if initial_sets is None:
        initial_sets = default_initial_sets(n_x, n_t, cfg.initial_radius)
    cfg = replace(cfg, seed=seed)
    S = StackedFeasibleSet(tuple(initial_component(i, P0, cfg) for i, P0 in enumerate(initial_sets)))
    S0 = S

    gamma = np.zeros(K, dtype=bool)
    gamma_i = np.zeros((K, n_x), dtype=bool)
    ap = np.zeros((K, n_x))
    am = np.zeros((K, n_x))
    n_sel = np.zeros((K + 1, n_x), dtype=int)
    vol = np.zeros((K + 1, n_x))
    rad = np.zeros((K + 1, n_x))
    inr = np.zeros((K + 1, n_x))
    cen = np.zeros((K + 1, n_x, n_t))
    hbar = np.zeros((K + 1, n_x))
    sel_us = np.zeros(K)
    upd_us = np.zeros(K)
    policy = []
    member_bad = 0
    nest_bad = 0
    snaps = {}

    def record(k, S):
        for c in S.components:
            vol[k, c.i] = c.volume
            cen[k, c.i] = c.g
            hbar[k, c.i] = c.hbar
            n_sel[k, c.i] = c.n_sel
            rad[k, c.i] = (np.max(np.linalg.norm(c.vertices - theta[c.i], axis=1))
                           if c.vertices is not None else np.nan)
            inr[k, c.i] = _inradius(c.P, theta[c.i])

    record(0, S)
    for k in range(1, K + 1):
        S_new, res = step(S, DataPoint(Z[k - 1], Xn[k - 1], k), cfg)
        gamma[k - 1] = res.gamma
        gamma_i[k - 1] = res.gamma_i
        ap[k - 1] = res.alpha_plus
        am[k - 1] = res.alpha_minus
        sel_us[k - 1] = res.select_us
        upd_us[k - 1] = res.update_us
        if check:
            for old, c in zip(S.components, S_new.components):
                if not c.P.contains(theta[c.i]):
                    member_bad += 1
                if c is not old and c.vertices is not None:
                    tol = 1e-7 * (1.0 + np.abs(old.P.c))
                    if not np.all(c.vertices @ old.P.H.T <= old.P.c + tol):
                        nest_bad += 1
        S = S_new
        policy.append("/".join(c.policy for c in S.components))
        record(k, S)
        if k in snapshot_steps:
            snaps[k] = S
    log.debug("run seed=%d alpha0=%g selections=%s", seed, cfg.alpha0, n_sel[-1].tolist())
    return RunLog(cfg.alpha0, theta, gamma, gamma_i, ap, am, n_sel, vol, rad, inr, cen, hbar, sel_us, upd_us,
                  policy, S0, S, traj, member_bad, nest_bad, snaps)


def _inradius(P, theta):
    d = P.slacks(theta) / np.linalg.norm(P.H, axis=1)
    return float(max(0.0, np.min(d)))


# ---------------------------------------------------------------------------
# Reference sets and invariant checks


def full_data_polytope(P0: HPolytope, Z, x_i, w_i, upto=None) -> HPolytope:
    """Prior set cut by every data pair, then reduced."""
    Z = np.asarray(Z, dtype=float)[:upto]
    x_i = np.asarray(x_i, dtype=float)[:upto]
    H = np.vstack([P0.H, Z, -Z])
    c = np.concatenate([P0.c, x_i + w_i, -x_i + w_i])
    return pt.reduce(HPolytope(H, c))


def residual_margin(comp: ComponentState, alpha0: float) -> float:
    """Slack of the discarded-constraint residual inequality (>= 0 means it holds).

    Every vertex ``v`` of the current set may violate each discarded row
    ``(h, c)`` by at most ``(alpha0 + 1) * hbar``.
    """
    if not comp.discarded:
        return float("inf")
    V = comp.vertices if comp.vertices is not None else pt.vertices(comp.P).vertices
    Hd = np.array([h for _, h, _ in comp.discarded])
    cd = np.array([c for _, _, c in comp.discarded])
    worst = float(np.max(np.maximum(V @ Hd.T - cd, 0.0)))
    return (alpha0 + 1.0) * comp.hbar + 1e-7 - worst
