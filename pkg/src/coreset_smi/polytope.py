"""Bounded convex polytopes in H-representation.

Support functions, redundancy removal, vertex enumeration, exact and sampled
centroids and volumes, radii and Hausdorff distances. All routines treat
polytopes as immutable values; samplers take explicit seeds.
"""
from dataclasses import dataclass
from itertools import combinations
import math
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import (
    CapacityError,
    EmptyPolytopeError,
    InputError,
    NumericError,
    UnboundedError,
)
from .numerics import TAU_FEAS, LpStatus, lp_solve, LpProblem

TAU_GEO = 1e-7
TAU_RED = 1e-9
TAU_DEDUP = 1e-7
MAX_VERTEX_DIM = 7
MAX_VERTEX_ROWS = 48
SAMPLER_STREAM = 4


@dataclass(frozen=True, eq=False)
class HPolytope:
    """The set ``{x : H x <= c}``."""

    H: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        H = np.array(self.H, dtype=float, ndmin=2)
        c = np.array(self.c, dtype=float).reshape(-1)
        if H.ndim != 2 or H.shape[0] != c.shape[0]:
            raise InputError(f"H has shape {H.shape} but c has {c.shape[0]} entries")
        if H.shape[0] == 0 or H.shape[1] == 0:
            raise InputError("a polytope needs at least one constraint and one dimension")
        if not (np.all(np.isfinite(H)) and np.all(np.isfinite(c))):
            raise InputError("polytope data must be finite")
        if np.any(np.linalg.norm(H, axis=1) == 0.0):
            raise InputError("constraint rows must be non-zero")
        H.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.H.shape[1]

    @property
    def n_rows(self) -> int:
        return self.H.shape[0]

    @classmethod
    def box(cls, n, radius=1.0, center=None):
        """Axis-aligned cube ``{x : |x - center|_inf <= radius}`` as ``[I; -I] x <= ...``."""
        center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
        I = np.eye(n)
        return cls(np.vstack([I, -I]), np.concatenate([center + radius, radius - center]))

    def slacks(self, x):
        return self.c - self.H @ np.asarray(x, dtype=float)

    def contains(self, x, tol=TAU_FEAS) -> bool:
        scale = np.linalg.norm(self.H, axis=1) * (1.0 + np.max(np.abs(x))) + np.abs(self.c)
        return bool(np.all(self.slacks(x) >= -tol * np.maximum(scale, 1.0)))

    def intersect(self, H, c) -> "HPolytope":
        H = np.array(H, dtype=float, ndmin=2)
        return HPolytope(np.vstack([self.H, H]), np.concatenate([self.c, np.atleast_1d(c)]))

    def without_row(self, j) -> "HPolytope":
        keep = np.arange(self.n_rows) != j
        return HPolytope(self.H[keep], self.c[keep])

    def to_json(self) -> dict:
        return {"H": self.H.tolist(), "c": self.c.tolist()}

    @classmethod
    def from_json(cls, obj) -> "HPolytope":
        try:
            return cls(obj["H"], obj["c"])
        except (KeyError, TypeError) as exc:
            raise InputError(f"polytope JSON needs 'H' and 'c': {exc}") from None


@dataclass(frozen=True)
class VRep:
    """Vertex list of a bounded polytope (rays are always empty here)."""

    vertices: np.ndarray

    def __len__(self):
        return self.vertices.shape[0]


class MCVolume(NamedTuple):
    volume: float
    stderr: float


class HausdorffResult(NamedTuple):
    value: float
    exact: bool


# ---------------------------------------------------------------------------
# LP-based primitives


def _maximize(P: HPolytope, xi, interior=None):
    """max xi.x over P; returns (value, argmax). Shifts by ``interior`` when given."""
    xi = np.asarray(xi, dtype=float)
    if interior is None:
        res = lp_solve(LpProblem(-xi, P.H, P.c))
        shift = 0.0
    else:
        b = P.c - P.H @ interior
        res = lp_solve(LpProblem(-xi, P.H, b))
        shift = float(xi @ interior)
    if res.status is LpStatus.UNBOUNDED:
        raise UnboundedError(f"polytope unbounded in direction {xi}")
    if res.status is LpStatus.INFEASIBLE:
        raise EmptyPolytopeError("polytope is empty")
    x = res.optimizer if interior is None else res.optimizer + interior
    return -res.value + shift, x


def support(P: HPolytope, xi, interior=None) -> float:
    """Support function ``max_{x in P} <x, xi>`` computed with one LP."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (P.dim,):
        raise InputError(f"direction has shape {xi.shape}, expected ({P.dim},)")
    return _maximize(P, xi, interior)[0]


def centered_support(P: HPolytope, g, xi, interior=None) -> float:
    """Support function of ``P - g``. ``g`` must lie in ``P``."""
    g = np.asarray(g, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if not P.contains(g):
        raise InputError("centering point lies outside the polytope")
    if not np.any(xi):
        return 0.0
    return support(P, xi, interior) - float(xi @ g)


def chebyshev_center(P: HPolytope):
    """Center and radius of the largest inscribed Euclidean ball."""
    n = P.dim
    norms = np.linalg.norm(P.H, axis=1)
    A = np.vstack([np.hstack([P.H, norms[:, None]]), np.hstack([np.zeros(n), -1.0])])
    b = np.concatenate([P.c, [0.0]])
    obj = np.zeros(n + 1)
    obj[-1] = -1.0
    res = lp_solve(LpProblem(obj, A, b))
    if res.status is LpStatus.INFEASIBLE:
        raise EmptyPolytopeError("polytope is empty")
    if res.status is LpStatus.UNBOUNDED:
        raise UnboundedError("polytope contains balls of unbounded radius")
    return res.optimizer[:n], float(res.optimizer[n])


def is_bounded(P: HPolytope) -> bool:
    try:
        for i in range(P.dim):
            e = np.zeros(P.dim)
            e[i] = 1.0
            support(P, e)
            support(P, -e)
    except UnboundedError:
        return False
    return True


def is_redundant(P: HPolytope, j: int, interior=None) -> bool:
    """True iff dropping row ``j`` leaves the point set unchanged.

    Decided by ``max h_j.x`` over the remaining rows: the row is redundant
    when that maximum does not exceed ``c_j`` by more than ``TAU_RED``.
    """
    if not (0 <= j < P.n_rows):
        raise InputError(f"row index {j} out of range for {P.n_rows} rows")
    if P.n_rows == 1:
        return False
    rest = P.without_row(j)
    try:
        value, _ = _maximize(rest, P.H[j], interior)
    except UnboundedError:
        return False
    return bool(value <= P.c[j] + TAU_RED * max(1.0, abs(P.c[j])))


def reduce(P: HPolytope) -> HPolytope:
    """Remove redundant rows one at a time, testing each against the rows still kept."""
    center, radius = chebyshev_center(P)
    if radius < 0:
        raise EmptyPolytopeError("polytope is empty")
    interior = center if radius > 1e-12 else None
    keep = np.ones(P.n_rows, dtype=bool)
    for j in range(P.n_rows):
        others = keep.copy()
        others[j] = False
        if not others.any():
            continue
        rest = HPolytope(P.H[others], P.c[others])
        try:
            value, _ = _maximize(rest, P.H[j], interior)
        except UnboundedError:
            continue
        if value <= P.c[j] + TAU_RED * max(1.0, abs(P.c[j])):
            keep[j] = False
    return HPolytope(P.H[keep], P.c[keep])


def bounding_box(P: HPolytope, interior=None):
    n = P.dim
    lo = np.empty(n)
    hi = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        hi[i] = support(P, e, interior)
        lo[i] = -support(P, -e, interior)
    return lo, hi


# ---------------------------------------------------------------------------
# Vertex machinery


def _row_tol(H, V):
    R = 1.0 + (np.max(np.abs(V)) if V.size else 0.0)
    return 1e-9 * np.maximum(1.0, np.linalg.norm(H, axis=1) * R)


def incidence(H, c, V):
    """Boolean matrix ``[vertex, row]``: which rows are tight at which vertex."""
    if V.shape[0] == 0:
        return np.zeros((0, H.shape[0]), dtype=bool)
    return np.abs(V @ H.T - c) <= _row_tol(H, V)


def _affine_rank(points, scale):
    if points.shape[0] <= 1:
        return 0
    D = points[1:] - points[0]
    s = np.linalg.svd(D, compute_uv=False)
    return int(np.sum(s > 1e-9 * max(scale, 1.0)))


def _dedup(V, scale):
    if V.shape[0] <= 1:
        return V
    tol = TAU_DEDUP * max(scale, 1.0)
    keep = []
    for i in range(V.shape[0]):
        if all(np.max(np.abs(V[i] - V[k])) > tol for k in keep):
            keep.append(i)
    return V[keep]


def _cut(H, c, V, a, b):
    """Vertices of ``conv(V) ∩ {a.x <= b}`` where V are the vertices of ``{H x <= c}``.

    New vertices appear where edges cross the cutting hyperplane. Two
    vertices span an edge iff the rows tight at both have rank n-1.
    """
    n = V.shape[1]
    R = 1.0 + np.max(np.abs(V))
    tol = 1e-9 * max(1.0, np.linalg.norm(a) * R)
    s = V @ a - b
    out = s > tol
    if not out.any():
        return V
    if out.all():
        return V[:0]
    inside = s < -tol
    inc = incidence(H, c, V)
    iu = np.nonzero(inside)[0]
    io = np.nonzero(out)[0]
    counts = inc[iu].astype(np.int32) @ inc[io].T.astype(np.int32)
    new = []
    for p, q in zip(*np.nonzero(counts >= n - 1)):
        u, v = iu[p], io[q]
        common = inc[u] & inc[v]
        Hc = H[common]
        if Hc.size and np.linalg.matrix_rank(Hc, tol=1e-9 * max(1.0, np.max(np.abs(Hc)))) != n - 1:
            continue
        t = s[u] / (s[u] - s[v])
        x = V[u] + t * (V[v] - V[u])
        # polish on the n tight rows to limit drift across many cuts
        A = np.vstack([Hc, a])
        rhs = np.concatenate([c[common], [b]])
        sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        if np.max(np.abs(sol - x)) < 1e-6 * R:
            x = sol
        new.append(x)
    kept = V[~out]
    if new:
        kept = np.vstack([kept, np.array(new)])
    return _dedup(kept, R)


def _check_caps(P: HPolytope):
    if P.dim > MAX_VERTEX_DIM or P.n_rows > MAX_VERTEX_ROWS:
        raise CapacityError(
            f"exact vertex enumeration limited to n <= {MAX_VERTEX_DIM}, m <= {MAX_VERTEX_ROWS} "
            f"(got n={P.dim}, m={P.n_rows}); use volume_mc / centroid_hitrun instead"
        )


def _vertices_by_cutting(P: HPolytope):
    lo, hi = bounding_box(P)
    width = np.max(hi - lo)
    pad = 1.0 + width
    box = HPolytope.box(P.dim, 1.0, None)
    Hb = box.H
    cb = np.concatenate([hi + pad, -(lo - pad)])
    corners = np.array(list(np.ndindex(*([2] * P.dim))), dtype=float)
    V = (lo - pad) + corners * ((hi + pad) - (lo - pad))
    H, c = Hb, cb
    for j in range(P.n_rows):
        V = _cut(H, c, V, P.H[j], P.c[j])
        if V.shape[0] == 0:
            raise EmptyPolytopeError("polytope is empty")
        H = np.vstack([H, P.H[j]])
        c = np.append(c, P.c[j])
    return V


def vertices(P: HPolytope) -> VRep:
    """All vertices of a bounded polytope (``n <= 7``, ``m <= 48``)."""
    _check_caps(P)
    V = _vertices_by_cutting(P)
    if V.shape[0] and not np.all(P.H @ V.T <= (P.c + _row_tol(P.H, V))[:, None]):
        raise NumericError("vertex enumeration produced an infeasible point")
    return VRep(V)


def vertices_bruteforce(P: HPolytope, max_subsets=2_000_000) -> VRep:
    """Basic feasible points of every n-row subset; an independent check on :func:`vertices`."""
    n, m = P.dim, P.n_rows
    if math.comb(m, n) > max_subsets:
        raise CapacityError(f"C({m},{n}) subsets exceeds {max_subsets}")
    idx = np.array(list(combinations(range(m), n)), dtype=np.intp)
    A = P.H[idx]
    b = P.c[idx]
    det = np.linalg.det(A)
    scale = np.max(np.abs(P.H)) ** n
    ok = np.abs(det) > 1e-10 * scale
    pts = np.linalg.solve(A[ok], b[ok][..., None])[..., 0]
    tol = _row_tol(P.H, pts if pts.size else np.zeros((1, n)))
    feas = np.all(pts @ P.H.T <= P.c + tol, axis=1)
    pts = pts[feas]
    R = 1.0 + (np.max(np.abs(pts)) if pts.size else 0.0)
    return VRep(_dedup(pts, R))


# ---------------------------------------------------------------------------
# Exact volume and centroid via a pulling triangulation


def triangulate(V, inc):
    """Pulling triangulation of ``conv(V)`` from the vertex/row incidence.

    Returns an integer array of simplices (rows of n+1 vertex indices).
    """
    p, n = V.shape
    scale = 1.0 + np.max(np.abs(V))
    simplices = []

    def rec(face, d, prefix):
        if len(face) == d + 1:
            simplices.append(prefix + face)
            return
        apex = face[0]
        seen = set()
        for j in range(inc.shape[1]):
            sub = tuple(v for v in face if inc[v, j])
            if len(sub) < d or len(sub) == len(face) or apex in sub or sub in seen:
                continue
            seen.add(sub)
            if _affine_rank(V[list(sub)], scale) == d - 1:
                rec(sub, d - 1, prefix + (apex,))

    allv = tuple(range(p))
    if _affine_rank(V, scale) < n:
        return np.zeros((0, n + 1), dtype=np.intp)
    rec(allv, n, ())
    return np.array(simplices, dtype=np.intp).reshape(-1, n + 1)


def simplex_decomposition(V, inc):
    """Per-simplex volumes and centroids of a triangulation of ``conv(V)``."""
    n = V.shape[1]
    S = triangulate(V, inc)
    if S.shape[0] == 0:
        return np.zeros(0), np.zeros((0, n))
    P = V[S]
    E = P[:, 1:, :] - P[:, :1, :]
    vols = np.abs(np.linalg.det(E)) / math.factorial(n)
    return vols, P.mean(axis=1)


def volume_centroid_from_vertices(H, c, V):
    """Exact (volume, centroid) of ``conv(V)``; centroid is the vertex mean if flat."""
    inc = incidence(H, c, V)
    vols, cents = simplex_decomposition(V, inc)
    total = float(vols.sum())
    if total <= 0.0:
        return 0.0, V.mean(axis=0)
    return total, (vols[:, None] * cents).sum(axis=0) / total


def volume_exact(P: HPolytope) -> float:
    """Lebesgue volume from a simplicial decomposition of the vertex hull."""
    V = vertices(P).vertices
    return volume_centroid_from_vertices(P.H, P.c, V)[0]


def centroid_exact(P: HPolytope) -> np.ndarray:
    """Centroid: volume-weighted mean of the simplex centroids."""
    V = vertices(P).vertices
    return volume_centroid_from_vertices(P.H, P.c, V)[1]


def facet_rows(H, c, V):
    """Mask of rows that support a facet (their tight vertices span n-1 dimensions)."""
    n = V.shape[1]
    inc = incidence(H, c, V)
    scale = 1.0 + np.max(np.abs(V))
    mask = np.zeros(H.shape[0], dtype=bool)
    for j in range(H.shape[0]):
        idx = np.nonzero(inc[:, j])[0]
        if idx.size >= n and _affine_rank(V[idx], scale) == n - 1:
            mask[j] = True
    # duplicated facets: keep the first copy only
    seen = set()
    for j in np.nonzero(mask)[0]:
        key = tuple(np.nonzero(inc[:, j])[0])
        if key in seen:
            mask[j] = False
        seen.add(key)
    return mask


# ---------------------------------------------------------------------------
# Sampling


def _rng(seed, stream=SAMPLER_STREAM):
    return np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), stream]))


def volume_mc(P: HPolytope, samples: int = 100_000, seed: int = 0, interior=None) -> MCVolume:
    """Rejection estimate of the volume over the bounding box, with standard error."""
    lo, hi = bounding_box(P, interior)
    width = hi - lo
    if np.any(width <= 1e-15):
        return MCVolume(0.0, 0.0)
    box_vol = float(np.prod(width))
    rng = _rng(seed)
    hits = 0
    done = 0
    chunk = 65536
    while done < samples:
        k = min(chunk, samples - done)
        X = lo + rng.random((k, P.dim)) * width
        hits += int(np.count_nonzero(np.all(X @ P.H.T <= P.c, axis=1)))
        done += k
    p = hits / samples
    return MCVolume(box_vol * p, box_vol * math.sqrt(p * (1.0 - p) / samples))


def centroid_hitrun(P: HPolytope, g0=None, chains=8, steps=2000, seed=0, burn_frac=0.25) -> np.ndarray:
    """Mean of post-burn-in Hit-and-Run samples started at ``g0``.

    ``g0`` defaults to the Chebyshev center. Chord extents come exactly
    from the H-representation.
    """
    if g0 is None:
        g0, _ = chebyshev_center(P)
    g0 = np.asarray(g0, dtype=float)
    if g0.shape != (P.dim,) or not P.contains(g0):
        raise InputError("hit-and-run start must be a point of the polytope")
    rng = _rng(seed)
    dirs = rng.standard_normal((chains, steps, P.dim))
    us = rng.random((chains, steps))
    starts = np.tile(g0, (chains, 1))
    burn = int(burn_frac * steps)
    return np.asarray(kernels.hit_and_run(P.H, P.c, starts, dirs, us, burn))


# ---------------------------------------------------------------------------
# Radii and distances


def radius_at(P: HPolytope, theta) -> float:
    """``max_{x in P} ||theta - x||``, attained at a vertex."""
    V = vertices(P).vertices
    return float(np.max(np.linalg.norm(V - np.asarray(theta, dtype=float), axis=1)))


def inradius_at(P: HPolytope, theta) -> float:
    """Radius of the largest ball centered at ``theta`` inside ``P``."""
    theta = np.asarray(theta, dtype=float)
    if not P.contains(theta):
        raise InputError("inradius center lies outside the polytope")
    d = P.slacks(theta) / np.linalg.norm(P.H, axis=1)
    return float(max(0.0, np.min(d)))


def distance_to(P: HPolytope, v, tol=1e-10, max_iter=100_000) -> float:
    """Euclidean distance from ``v`` to ``P`` (Hildreth projection)."""
    v = np.asarray(v, dtype=float)
    if np.all(P.H @ v <= P.c):
        return 0.0
    x, _, ok = kernels.hildreth_project(P.H, P.c, v, tol, max_iter)
    if not ok:
        raise NumericError("projection onto polytope did not converge")
    return float(np.linalg.norm(np.asarray(x) - v))


def hausdorff_nested(P_outer: HPolytope, P_inner: HPolytope, directions=256, seed=0) -> HausdorffResult:
    """Hausdorff distance between nested polytopes ``P_inner ⊆ P_outer``.

    Exact (max over outer vertices of the distance to the inner set) when
    vertex enumeration is within caps; otherwise a lower bound from support
    gaps over sampled unit directions, flagged ``exact=False``.
    """
    try:
        Vi = vertices(P_inner).vertices
        Vo = vertices(P_outer).vertices
    except CapacityError:
        rng = _rng(seed)
        U = rng.standard_normal((directions, P_outer.dim))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        gaps = [support(P_outer, u) - support(P_inner, u) for u in U]
        if min(gaps) < -TAU_GEO:
            raise InputError("inner polytope is not contained in the outer one")
        return HausdorffResult(max(0.0, max(gaps)), False)
    tol = _row_tol(P_outer.H, Vi)
    if not np.all(Vi @ P_outer.H.T <= P_outer.c + np.maximum(tol, TAU_GEO)):
        raise InputError("inner polytope is not contained in the outer one")
    return HausdorffResult(max(distance_to(P_inner, v) for v in Vo), True)
