# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``_pykernels`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, INFINITY

cnp.import_array()

cdef double EPS_PIVOT = 1e-9
cdef double EPS_COST = 1e-9
cdef int BLAND_AFTER = 50

cdef enum Status:
    ST_OPTIMAL = 0
    ST_INFEASIBLE = 1
    ST_UNBOUNDED = 2
    ST_ITERATION_LIMIT = 3

OPTIMAL = ST_OPTIMAL
INFEASIBLE = ST_INFEASIBLE
UNBOUNDED = ST_UNBOUNDED
ITERATION_LIMIT = ST_ITERATION_LIMIT


cdef void _pivot(double[:, ::1] T, Py_ssize_t r, Py_ssize_t j) noexcept nogil:
    cdef Py_ssize_t rows = T.shape[0], cols = T.shape[1], i, k
    cdef double piv = T[r, j], f
    for k in range(cols):
        T[r, k] = T[r, k] / piv
    for i in range(rows):
        if i == r:
            continue
        f = T[i, j]
        if f == 0.0:
            continue
        for k in range(cols):
            T[i, k] = T[i, k] - f * T[r, k]


cdef int _iterate(double[:, ::1] T, long long[::1] basis, Py_ssize_t ncols,
                  long long max_iter, long long* iters) noexcept nogil:
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef bint bland = False
    cdef int streak = 0
    cdef Py_ssize_t j, i, r
    cdef double dmin, ratio, best
    while True:
        j = -1
        if bland:
            for i in range(ncols):
                if T[m, i] < -EPS_COST:
                    j = i
                    break
            if j < 0:
                return ST_OPTIMAL
        else:
            dmin = T[m, 0]
            j = 0
            for i in range(1, ncols):
                if T[m, i] < dmin:
                    dmin = T[m, i]
                    j = i
            if dmin >= -EPS_COST:
                return ST_OPTIMAL
        if iters[0] >= max_iter:
            return ST_ITERATION_LIMIT
        r = -1
        best = 0.0
        for i in range(m):
            if T[i, j] > EPS_PIVOT:
                ratio = T[i, rhs] / T[i, j]
                if r < 0 or ratio < best or (ratio == best and basis[i] < basis[r]):
                    r = i
                    best = ratio
        if r < 0:
            return ST_UNBOUNDED
        if best <= EPS_PIVOT:
            streak += 1
            if streak > BLAND_AFTER:
                bland = True
        else:
            streak = 0
        _pivot(T, r, j)
        basis[r] = j
        iters[0] += 1


def lp_simplex(A, b, c, long long max_iter):
    """Minimize c.x subject to A x <= b with x free. See ``_pykernels.lp_simplex``."""
    cdef const double[:, ::1] Av = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t m = Av.shape[0], n = Av.shape[1]
    cdef Py_ssize_t i, jj, a = 0, k = 0, ncols = 2 * n + m
    cdef double sgn, scale = 1.0, amax = 0.0, cb
    cdef long long iters = 0
    cdef int status
    for i in range(m):
        if bv[i] < 0:
            k += 1
        if fabs(bv[i]) > amax:
            amax = fabs(bv[i])
    scale += amax
    Tarr = np.zeros((m + 1, ncols + k + 1))
    cdef double[:, ::1] T = Tarr
    basis_arr = np.zeros(m, dtype=np.int64)
    cdef long long[::1] basis = basis_arr
    cdef Py_ssize_t last = ncols + k
    for i in range(m):
        sgn = -1.0 if bv[i] < 0 else 1.0
        for jj in range(n):
            T[i, jj] = sgn * Av[i, jj]
            T[i, n + jj] = -sgn * Av[i, jj]
        T[i, 2 * n + i] = sgn
        T[i, last] = sgn * bv[i]
        if bv[i] < 0:
            T[i, ncols + a] = 1.0
            basis[i] = ncols + a
            a += 1
        else:
            basis[i] = 2 * n + i
    if k:
        for i in range(m):
            if bv[i] < 0:
                for jj in range(last + 1):
                    T[m, jj] = T[m, jj] - T[i, jj]
        for jj in range(ncols, ncols + k):
            T[m, jj] = 0.0
        with nogil:
            status = _iterate(T, basis, ncols + k, max_iter, &iters)
        if status == ITERATION_LIMIT:
            return status, None, np.nan, None, iters
        if -T[m, last] > 1e-8 * scale:
            return INFEASIBLE, None, np.nan, None, iters
        for i in range(m):
            if basis[i] >= ncols:
                for jj in range(ncols):
                    if fabs(T[i, jj]) > EPS_PIVOT:
                        _pivot(T, i, jj)
                        basis[i] = jj
                        break
    cost_arr = np.zeros(ncols + k)
    cdef double[::1] cost = cost_arr
    for jj in range(n):
        cost[jj] = cv[jj]
        cost[n + jj] = -cv[jj]
    for jj in range(last + 1):
        T[m, jj] = 0.0
    for jj in range(ncols + k):
        T[m, jj] = cost[jj]
    for i in range(m):
        cb = cost[basis[i]]
        if cb != 0.0:
            for jj in range(last + 1):
                T[m, jj] = T[m, jj] - cb * T[i, jj]
    with nogil:
        status = _iterate(T, basis, ncols, max_iter, &iters)
    if status != OPTIMAL:
        return status, None, np.nan, None, iters
    z = np.zeros(ncols + k)
    for i in range(m):
        z[basis[i]] = T[i, last]
    x = z[:n] - z[n:2 * n]
    dual = np.asarray(Tarr[m, 2 * n:2 * n + m]).copy()
    return OPTIMAL, x, float(np.dot(cv, x)), dual, iters


def jacobi_eigenvalues(S, double tol, int max_sweeps):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations."""
    Marr = np.array(S, dtype=np.float64, order="C")
    cdef double[:, ::1] M = Marr
    cdef Py_ssize_t n = M.shape[0], p, q, r
    cdef double scale = 0.0, off, diag, apq, theta, t, cs, sn, mp, mq
    cdef int sweep
    for p in range(n):
        for q in range(n):
            scale += M[p, q] * M[p, q]
    scale = sqrt(scale)
    for sweep in range(max_sweeps):
        off = 0.0
        diag = 0.0
        for p in range(n):
            for q in range(n):
                off += M[p, q] * M[p, q]
            diag += M[p, p] * M[p, p]
        off = sqrt(off - diag) if off > diag else 0.0
        if off <= tol * scale or off == 0.0:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = M[p, q]
                if apq == 0.0:
                    continue
                theta = (M[q, q] - M[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (fabs(theta) + sqrt(theta * theta + 1.0))
                cs = 1.0 / sqrt(t * t + 1.0)
                sn = t * cs
                for r in range(n):
                    mp = M[r, p]
                    mq = M[r, q]
                    M[r, p] = cs * mp - sn * mq
                    M[r, q] = sn * mp + cs * mq
                for r in range(n):
                    mp = M[p, r]
                    mq = M[q, r]
                    M[p, r] = cs * mp - sn * mq
                    M[q, r] = sn * mp + cs * mq
                M[p, q] = 0.0
                M[q, p] = 0.0
    return np.diag(Marr).copy()


def hit_and_run(H, c, starts, dirs, us, Py_ssize_t burn):
    """Run Hit-and-Run chains inside {x : H x <= c}; return the mean of kept samples."""
    cdef const double[:, ::1] Hv = np.ascontiguousarray(H, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef const double[:, ::1] st = np.ascontiguousarray(starts, dtype=np.float64)
    cdef const double[:, :, ::1] dv = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef const double[:, ::1] uv = np.ascontiguousarray(us, dtype=np.float64)
    cdef Py_ssize_t nchains = dv.shape[0], nsteps = dv.shape[1], n = dv.shape[2]
    cdef Py_ssize_t m = Hv.shape[0], ch, s, i, j
    total_arr = np.zeros(n)
    cdef double[::1] total = total_arr
    cdef double[::1] x = np.zeros(n)
    cdef double[::1] r = np.zeros(m)
    cdef double[::1] hd = np.zeros(m)
    cdef double lo, hi, t, acc, ri
    cdef long long kept = 0
    cdef bint bad = False
    with nogil:
        for ch in range(nchains):
            for j in range(n):
                x[j] = st[ch, j]
            for i in range(m):
                acc = 0.0
                for j in range(n):
                    acc = acc + Hv[i, j] * x[j]
                r[i] = cv[i] - acc
            for s in range(nsteps):
                lo = -INFINITY
                hi = INFINITY
                for i in range(m):
                    acc = 0.0
                    for j in range(n):
                        acc = acc + Hv[i, j] * dv[ch, s, j]
                    hd[i] = acc
                    ri = r[i] if r[i] > 0.0 else 0.0
                    if acc > 1e-14:
                        if ri / acc < hi:
                            hi = ri / acc
                    elif acc < -1e-14:
                        if ri / acc > lo:
                            lo = ri / acc
                if lo == -INFINITY or hi == INFINITY:
                    bad = True
                    break
                t = lo + uv[ch, s] * (hi - lo)
                for j in range(n):
                    x[j] = x[j] + t * dv[ch, s, j]
                for i in range(m):
                    r[i] = r[i] - t * hd[i]
                if s >= burn:
                    for j in range(n):
                        total[j] += x[j]
                    kept += 1
            if bad:
                break
    if bad:
        raise ValueError("unbounded chord in hit-and-run")
    return total_arr / kept


def hildreth_project(H, c, v, double tol, long long max_iter):
    """Projection of ``v`` onto {x : H x <= c} by Hildreth's dual iteration."""
    cdef const double[:, ::1] Hv = np.ascontiguousarray(H, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t m = Hv.shape[0], n = Hv.shape[1], i, j
    x_arr = np.array(v, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double[::1] nrm2 = np.zeros(m)
    cdef double[::1] lam = np.zeros(m)
    cdef double viol, delta, step, a
    cdef long long sweep, used = max_iter
    cdef bint done = False
    for i in range(m):
        a = 0.0
        for j in range(n):
            a += Hv[i, j] * Hv[i, j]
        nrm2[i] = a
    with nogil:
        for sweep in range(max_iter):
            step = 0.0
            for i in range(m):
                viol = 0.0
                for j in range(n):
                    viol = viol + Hv[i, j] * x[j]
                viol = viol - cv[i]
                delta = viol / nrm2[i]
                if delta < -lam[i]:
                    delta = -lam[i]
                if delta != 0.0:
                    lam[i] += delta
                    for j in range(n):
                        x[j] -= delta * Hv[i, j]
                    a = fabs(delta) * sqrt(nrm2[i])
                    if a > step:
                        step = a
            if step <= tol:
                used = sweep + 1
                done = True
                break
    return x_arr, used, bool(done)
