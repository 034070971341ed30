"""Pure-Python (numpy) implementations of the hot kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
The two are kept arithmetic-for-arithmetic aligned so that, on platforms
without fused multiply-add contraction, both backends follow the same pivot
sequence and return the same numbers.
"""
import numpy as np

# Status codes shared with the compiled backend.
OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_LIMIT = 3

_EPS_PIVOT = 1e-9
_EPS_COST = 1e-9
_BLAND_AFTER = 50


def _pivot(T, r, j):
    T[r, :] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r, :])


def _iterate(T, basis, ncols, max_iter, iters):
    """Primal simplex on tableau ``T`` (last row = reduced costs, last column = rhs).

    Only the first ``ncols`` columns may enter. Dantzig pricing with lowest
    index tie-breaking; switches to Bland's rule after a run of degenerate
    pivots. Returns (status, iterations used so far).
    """
    m = T.shape[0] - 1
    rhs = T.shape[1] - 1
    bland = False
    streak = 0
    while True:
        d = T[m, :ncols]
        if bland:
            cand = np.nonzero(d < -_EPS_COST)[0]
            if cand.size == 0:
                return OPTIMAL, iters
            j = int(cand[0])
        else:
            j = int(np.argmin(d))
            if d[j] >= -_EPS_COST:
                return OPTIMAL, iters
        if iters >= max_iter:
            return ITERATION_LIMIT, iters
        colj = T[:m, j]
        rows = np.nonzero(colj > _EPS_PIVOT)[0]
        if rows.size == 0:
            return UNBOUNDED, iters
        r = -1
        best = 0.0
        for i in rows:
            ratio = T[i, rhs] / colj[i]
            if r < 0 or ratio < best or (ratio == best and basis[i] < basis[r]):
                r = int(i)
                best = ratio
        if best <= _EPS_PIVOT:
            streak += 1
            if streak > _BLAND_AFTER:
                bland = True
        else:
            streak = 0
        _pivot(T, r, j)
        basis[r] = j
        iters += 1


def lp_simplex(A, b, c, max_iter):
    """Minimize c.x subject to A x <= b with x free.

    Returns ``(status, x, value, dual, iterations)``. ``dual`` holds the
    multipliers y >= 0 with A^T y = -c and value = -b.y at the optimum.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m, n = A.shape
    neg = b < 0
    k = int(neg.sum())
    ncols = 2 * n + m
    T = np.zeros((m + 1, ncols + k + 1))
    basis = np.zeros(m, dtype=np.int64)
    a = 0
    for i in range(m):
        sgn = -1.0 if neg[i] else 1.0
        T[i, :n] = sgn * A[i]
        T[i, n:2 * n] = -sgn * A[i]
        T[i, 2 * n + i] = sgn
        T[i, -1] = sgn * b[i]
        if neg[i]:
            T[i, ncols + a] = 1.0
            basis[i] = ncols + a
            a += 1
        else:
            basis[i] = 2 * n + i
    iters = 0
    scale = 1.0 + (np.max(np.abs(b)) if m else 0.0)
    if k:
        for i in range(m):
            if neg[i]:
                T[m, :] -= T[i, :]
        T[m, ncols:ncols + k] = 0.0
        status, iters = _iterate(T, basis, ncols + k, max_iter, iters)
        if status == ITERATION_LIMIT:
            return status, None, np.nan, None, iters
        if -T[m, -1] > 1e-8 * scale:
            return INFEASIBLE, None, np.nan, None, iters
        for i in range(m):
            if basis[i] >= ncols:
                nz = np.nonzero(np.abs(T[i, :ncols]) > _EPS_PIVOT)[0]
                if nz.size:
                    j = int(nz[0])
                    _pivot(T, i, j)
                    basis[i] = j
    cost = np.zeros(ncols + k)
    cost[:n] = c
    cost[n:2 * n] = -c
    T[m, :] = 0.0
    T[m, :ncols + k] = cost
    for i in range(m):
        cb = cost[basis[i]]
        if cb != 0.0:
            T[m, :] -= cb * T[i, :]
    status, iters = _iterate(T, basis, ncols, max_iter, iters)
    if status != OPTIMAL:
        return status, None, np.nan, None, iters
    z = np.zeros(ncols + k)
    z[basis] = T[:m, -1]
    x = z[:n] - z[n:2 * n]
    dual = T[m, 2 * n:2 * n + m].copy()
    return OPTIMAL, x, float(c @ x), dual, iters


def jacobi_eigenvalues(S, tol, max_sweeps):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    M = np.array(S, dtype=np.float64)
    n = M.shape[0]
    scale = np.sqrt(np.sum(M * M))
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(M * M) - np.sum(np.diag(M) ** 2))
        if off <= tol * scale or off == 0.0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = M[p, q]
                if apq == 0.0:
                    continue
                theta = (M[q, q] - M[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                cs = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * cs
                mp = M[:, p].copy()
                mq = M[:, q].copy()
                M[:, p] = cs * mp - sn * mq
                M[:, q] = sn * mp + cs * mq
                mp = M[p, :].copy()
                mq = M[q, :].copy()
                M[p, :] = cs * mp - sn * mq
                M[q, :] = sn * mp + cs * mq
                M[p, q] = 0.0
                M[q, p] = 0.0
    return np.diag(M).copy()


def hit_and_run(H, c, starts, dirs, us, burn):
    """Run Hit-and-Run chains inside {x : H x <= c}; return the mean of kept samples."""
    H = np.asarray(H, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    nchains, nsteps, n = dirs.shape
    total = np.zeros(n)
    kept = 0
    for ch in range(nchains):
        x = np.array(starts[ch], dtype=np.float64)
        r = c - H @ x
        for s in range(nsteps):
            d = dirs[ch, s]
            hd = H @ d
            lo = -np.inf
            hi = np.inf
            pos = hd > 1e-14
            negm = hd < -1e-14
            if pos.any():
                hi = np.min(np.maximum(r[pos], 0.0) / hd[pos])
            if negm.any():
                lo = np.max(np.maximum(r[negm], 0.0) / hd[negm])
            if not np.isfinite(lo) or not np.isfinite(hi):
                raise ValueError("unbounded chord in hit-and-run")
            t = lo + us[ch, s] * (hi - lo)
            x = x + t * d
            r = r - t * hd
            if s >= burn:
                total += x
                kept += 1
    return total / kept


def hildreth_project(H, c, v, tol, max_iter):
    """Euclidean projection of ``v`` onto {x : H x <= c} by Hildreth's dual iteration.

    Returns ``(x, sweeps, converged)``.
    """
    H = np.asarray(H, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m = H.shape[0]
    nrm2 = np.sum(H * H, axis=1)
    lam = np.zeros(m)
    x = np.array(v, dtype=np.float64)
    for sweep in range(max_iter):
        step = 0.0
        for i in range(m):
            viol = H[i] @ x - c[i]
            delta = viol / nrm2[i]
            if delta < -lam[i]:
                delta = -lam[i]
            if delta != 0.0:
                lam[i] += delta
                x -= delta * H[i]
                a = abs(delta) * np.sqrt(nrm2[i])
                if a > step:
                    step = a
        if step <= tol:
            return x, sweep + 1, True
    return x, max_iter, False
