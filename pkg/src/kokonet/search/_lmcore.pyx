# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled search kernel: squared and signed residual systems plus the
damped Gauss-Newton loop, operation-for-operation identical to
``_lmcore_py``."""

from libc.math cimport fabs, sqrt, INFINITY

BACKEND_NAME = "cython"

cdef double _DEN_GUARD = 1e-12
cdef double _PENALTY = 1e6

cdef int[4] _XI = [1, 1, 2, 2]
cdef int[4] _YI = [3, 4, 4, 3]
cdef int[4] _ZI = [5, 6, 7, 8]


cdef void _residuals(double* p, double* consts, double* r) nogil:
    cdef double u = p[0]
    cdef double x, y, z, den, yzu, xzu, xyu, ng, nh, pen
    cdef double overshoot = 0.0
    cdef bint bad = 0
    cdef int i, k
    for k in range(9):
        r[k] = 0.0
    for i in range(4):
        x = p[_XI[i]]
        y = p[_YI[i]]
        z = p[_ZI[i]]
        den = 4.0 * x * y * u * (1.0 + z) * (1.0 + u * z)
        if fabs(den) < _DEN_GUARD:
            bad = 1
            overshoot += (_DEN_GUARD - fabs(den)) / _DEN_GUARD
            continue
        yzu = y * z * u
        xzu = x * z * u
        xyu = x * y * u
        ng = 1.0 - yzu - xzu + xyu
        r[i] = consts[6 * i] - ng * ng / den
        nh = consts[6 * i + 2] + consts[6 * i + 3] * yzu \
            + consts[6 * i + 4] * xzu + consts[6 * i + 5] * xyu
        r[4 + i] = consts[6 * i + 1] - nh * nh / den
    if bad:
        pen = _PENALTY * (1.0 + overshoot)
        for k in range(8):
            r[k] = pen


cdef void _residuals_signed(double* p, double* consts, int* eps, double* r) nogil:
    cdef double u = p[0]
    cdef double x, y, z, rad, den, yzu, xzu, xyu, ng, nh, pen
    cdef double overshoot = 0.0
    cdef bint bad = 0
    cdef int i, k
    for k in range(9):
        r[k] = 0.0
    for i in range(4):
        x = p[_XI[i]]
        y = p[_YI[i]]
        z = p[_ZI[i]]
        rad = x * y * u * (1.0 + z) * (1.0 + u * z)
        if rad < _DEN_GUARD:
            bad = 1
            overshoot += (_DEN_GUARD - rad) / _DEN_GUARD
            continue
        den = 2.0 * sqrt(rad)
        yzu = y * z * u
        xzu = x * z * u
        xyu = x * y * u
        ng = 1.0 - yzu - xzu + xyu
        r[2 * i] = consts[6 * i] - eps[i] * ng / den
        nh = consts[6 * i + 2] + consts[6 * i + 3] * yzu \
            + consts[6 * i + 4] * xzu + consts[6 * i + 5] * xyu
        r[2 * i + 1] = consts[6 * i + 1] - eps[i] * nh / den
    if bad:
        pen = _PENALTY * (1.0 + overshoot)
        for k in range(8):
            r[k] = pen


cdef int _eps_heuristic(double* p, double* consts, int* eps) nogil:
    """1 on success; 0 when some radicand is outside the domain."""
    cdef double u = p[0]
    cdef double x, y, z, rad, yzu, xzu, xyu, ng, nh
    cdef int i
    for i in range(4):
        x = p[_XI[i]]
        y = p[_YI[i]]
        z = p[_ZI[i]]
        rad = x * y * u * (1.0 + z) * (1.0 + u * z)
        if rad < _DEN_GUARD:
            return 0
        yzu = y * z * u
        xzu = x * z * u
        xyu = x * y * u
        ng = 1.0 - yzu - xzu + xyu
        nh = consts[6 * i + 2] + consts[6 * i + 3] * yzu \
            + consts[6 * i + 4] * xzu + consts[6 * i + 5] * xyu
        if fabs(consts[6 * i]) > 0.1:
            eps[i] = 1 if consts[6 * i] * ng > 0.0 else -1
        else:
            eps[i] = 1 if consts[6 * i + 1] * nh > 0.0 else -1
    return 1


cdef int _solve9(double* a, double* b, double* x) nogil:
    """Gaussian elimination with partial pivoting on a 9x9 copy; 1 on success."""
    cdef double A[81]
    cdef double v, best, inv, f, s
    cdef int n = 9, col, row, k, piv
    for k in range(81):
        A[k] = a[k]
    for k in range(n):
        x[k] = b[k]
    for col in range(n):
        piv = col
        best = fabs(A[col * n + col])
        for row in range(col + 1, n):
            v = fabs(A[row * n + col])
            if v > best:
                best = v
                piv = row
        if best < 1e-300:
            return 0
        if piv != col:
            for k in range(n):
                v = A[col * n + k]
                A[col * n + k] = A[piv * n + k]
                A[piv * n + k] = v
            v = x[col]
            x[col] = x[piv]
            x[piv] = v
        inv = 1.0 / A[col * n + col]
        for row in range(col + 1, n):
            f = A[row * n + col] * inv
            if f == 0.0:
                continue
            for k in range(col, n):
                A[row * n + k] -= f * A[col * n + k]
            x[row] -= f * x[col]
    for col in range(n - 1, -1, -1):
        s = x[col]
        for k in range(col + 1, n):
            s -= A[col * n + k] * x[k]
        x[col] = s / A[col * n + col]
    return 1


cdef (double, int, bint) _lm_loop(double* p, double* consts, int* eps, bint signed_mode,
                                  int max_iter, double tol) nogil:
    cdef int n = 9
    cdef double r[9]
    cdef double rp[9]
    cdef double rm[9]
    cdef double rtry[9]
    cdef double ptry[9]
    cdef double J[81]
    cdef double H[81]
    cdef double A[81]
    cdef double g[9]
    cdef double step[9]
    cdef double cost, maxres, lam, h, pj, inv2h, s, diag, ctry
    cdef int it = 0, j, k, a, b, inner
    cdef bint improved

    if signed_mode:
        _residuals_signed(p, consts, eps, r)
    else:
        _residuals(p, consts, r)
    cost = 0.0
    maxres = 0.0
    for k in range(n):
        cost += r[k] * r[k]
        if fabs(r[k]) > maxres:
            maxres = fabs(r[k])
    lam = 1e-3

    while it < max_iter:
        it += 1
        if maxres <= tol:
            return maxres, it, 1

        for j in range(n):
            h = 1e-7 * (1.0 + fabs(p[j]))
            pj = p[j]
            p[j] = pj + h
            if signed_mode:
                _residuals_signed(p, consts, eps, rp)
            else:
                _residuals(p, consts, rp)
            p[j] = pj - h
            if signed_mode:
                _residuals_signed(p, consts, eps, rm)
            else:
                _residuals(p, consts, rm)
            p[j] = pj
            inv2h = 1.0 / (2.0 * h)
            for k in range(n):
                J[k * n + j] = (rp[k] - rm[k]) * inv2h

        for a in range(n):
            for b in range(a, n):
                s = 0.0
                for k in range(n):
                    s += J[k * n + a] * J[k * n + b]
                H[a * n + b] = s
                H[b * n + a] = s
            s = 0.0
            for k in range(n):
                s += J[k * n + a] * r[k]
            g[a] = s

        improved = 0
        for inner in range(40):
            for k in range(81):
                A[k] = H[k]
            for j in range(n):
                diag = H[j * n + j]
                if diag < 1e-12:
                    diag = 1e-12
                A[j * n + j] = H[j * n + j] + lam * diag
            if not _solve9(A, g, step):
                lam *= 3.0
                if lam > 1e14:
                    break
                continue
            for k in range(n):
                ptry[k] = p[k] - step[k]
            if signed_mode:
                _residuals_signed(ptry, consts, eps, rtry)
            else:
                _residuals(ptry, consts, rtry)
            ctry = 0.0
            for k in range(n):
                ctry += rtry[k] * rtry[k]
            if ctry < cost:
                for k in range(n):
                    p[k] = ptry[k]
                    r[k] = rtry[k]
                cost = ctry
                maxres = 0.0
                for k in range(n):
                    if fabs(r[k]) > maxres:
                        maxres = fabs(r[k])
                lam *= 0.33
                if lam < 1e-14:
                    lam = 1e-14
                improved = 1
                break
            lam *= 3.0
            if lam > 1e14:
                break
        if not improved:
            break

    return maxres, it, maxres <= tol


def residuals(p, consts):
    """The nine squared-system residuals (last one identically zero)."""
    cdef double cp[9]
    cdef double cc[24]
    cdef double cr[9]
    cdef int k
    for k in range(9):
        cp[k] = p[k]
    for k in range(24):
        cc[k] = consts[k]
    _residuals(cp, cc, cr)
    return [cr[k] for k in range(9)]


def residuals_signed(p, consts, eps):
    """The original (unsquared) equations for a fixed sign assignment."""
    cdef double cp[9]
    cdef double cc[24]
    cdef double cr[9]
    cdef int ce[4]
    cdef int k
    for k in range(9):
        cp[k] = p[k]
    for k in range(24):
        cc[k] = consts[k]
    for k in range(4):
        ce[k] = eps[k]
    _residuals_signed(cp, cc, ce, cr)
    return [cr[k] for k in range(9)]


def eps_heuristic(p, consts):
    """Sign assignment suggested by the structure at p, or None off-domain."""
    cdef double cp[9]
    cdef double cc[24]
    cdef int ce[4]
    cdef int k
    for k in range(9):
        cp[k] = p[k]
    for k in range(24):
        cc[k] = consts[k]
    if not _eps_heuristic(cp, cc, ce):
        return None
    return (ce[0], ce[1], ce[2], ce[3])


def jacobian_signed(p, consts, eps):
    """Flat 8x9 central-difference Jacobian of the signed system."""
    cdef double cp[9]
    cdef double cc[24]
    cdef double rp[9]
    cdef double rm[9]
    cdef int ce[4]
    cdef double h, pj, inv2h
    cdef int j, k
    for k in range(9):
        cp[k] = p[k]
    for k in range(24):
        cc[k] = consts[k]
    for k in range(4):
        ce[k] = eps[k]
    out = [0.0] * 72
    for j in range(9):
        h = 1e-7 * (1.0 + fabs(cp[j]))
        pj = cp[j]
        cp[j] = pj + h
        _residuals_signed(cp, cc, ce, rp)
        cp[j] = pj - h
        _residuals_signed(cp, cc, ce, rm)
        cp[j] = pj
        inv2h = 1.0 / (2.0 * h)
        for k in range(8):
            out[k * 9 + j] = (rp[k] - rm[k]) * inv2h
    return out


def lm_solve(p0, consts, int max_iter, double tol):
    """Squared-system solve; returns (params, max_abs_residual, iters, ok)."""
    cdef double cp[9]
    cdef double cc[24]
    cdef int ce[4]
    cdef int k
    for k in range(9):
        cp[k] = p0[k]
    for k in range(24):
        cc[k] = consts[k]
    cdef double maxres
    cdef int it
    cdef bint ok
    maxres, it, ok = _lm_loop(cp, cc, ce, 0, max_iter, tol)
    return [cp[k] for k in range(9)], maxres, it, bool(ok)


def lm_solve_signed(p0, consts, eps, int max_iter, double tol):
    """Signed-system solve for a fixed sign assignment."""
    cdef double cp[9]
    cdef double cc[24]
    cdef int ce[4]
    cdef int k
    for k in range(9):
        cp[k] = p0[k]
    for k in range(24):
        cc[k] = consts[k]
    for k in range(4):
        ce[k] = eps[k]
    cdef double maxres
    cdef int it
    cdef bint ok
    maxres, it, ok = _lm_loop(cp, cc, ce, 1, max_iter, tol)
    return [cp[k] for k in range(9)], maxres, it, bool(ok)


def solve_batch(seeds, consts, int max_iter, double tol):
    """lm_solve over a list of seeds; returns list of (params, maxres, ok)."""
    cdef double cp[9]
    cdef double cc[24]
    cdef int ce[4]
    cdef int k
    cdef double maxres
    cdef int it
    cdef bint ok
    for k in range(24):
        cc[k] = consts[k]
    out = []
    for s in seeds:
        for k in range(9):
            cp[k] = s[k]
        maxres, it, ok = _lm_loop(cp, cc, ce, 0, max_iter, tol)
        out.append(([cp[k] for k in range(9)], maxres, bool(ok)))
    return out


def solve_batch_signed(seeds, consts, int max_iter, double tol):
    """Signed solve per seed with the heuristic sign assignment."""
    cdef double cp[9]
    cdef double cc[24]
    cdef int ce[4]
    cdef int k
    cdef double maxres
    cdef int it
    cdef bint ok
    for k in range(24):
        cc[k] = consts[k]
    out = []
    for s in seeds:
        for k in range(9):
            cp[k] = s[k]
        if not _eps_heuristic(cp, cc, ce):
            out.append((list(s), INFINITY, False, None))
            continue
        maxres, it, ok = _lm_loop(cp, cc, ce, 1, max_iter, tol)
        out.append(([cp[k] for k in range(9)], maxres, bool(ok),
                    (ce[0], ce[1], ce[2], ce[3])))
    return out
