"""Pure-Python twin of the compiled search kernel.

Operation-for-operation mirror of ``_lmcore.pyx``: the residual systems, the
central-difference Jacobians and the damped Gauss-Newton loop are written in
the same order so both backends follow the same trajectories.

Parameter layout: p = [u, x1, x3, y1, y2, z1, z2, z3, z4].

Squared-system constants, per vertex i = 1..4 (6 doubles each):
    [cos^2(delta_i), (sin(theta_i) sin(theta_{i-1}))^2, A_i1, A_i2, A_i3, A_i4]
Signed-system constants use cos(delta_i) and sin(theta_i) sin(theta_{i-1})
unsquared in the first two slots.
"""
from __future__ import annotations

import math

BACKEND_NAME = "python"

_DEN_GUARD = 1e-12
_PENALTY = 1e6

# per-vertex index maps into the parameter vector
_XI = (1, 1, 2, 2)
_YI = (3, 4, 4, 3)
_ZI = (5, 6, 7, 8)


def residuals(p, consts):
    """The nine squared-system residuals (last one identically zero)."""
    u = p[0]
    r = [0.0] * 9
    overshoot = 0.0
    bad = False
    for i in range(4):
        x = p[_XI[i]]
        y = p[_YI[i]]
        z = p[_ZI[i]]
        den = 4.0 * x * y * u * (1.0 + z) * (1.0 + u * z)
        if abs(den) < _DEN_GUARD:
            bad = True
            overshoot += (_DEN_GUARD - abs(den)) / _DEN_GUARD
            continue
        c = consts[6 * i:6 * i + 6]
        yzu = y * z * u
        xzu = x * z * u
        xyu = x * y * u
        ng = 1.0 - yzu - xzu + xyu
        r[i] = c[0] - ng * ng / den
        nh = c[2] + c[3] * yzu + c[4] * xzu + c[5] * xyu
        r[4 + i] = c[1] - nh * nh / den
    if bad:
        pen = _PENALTY * (1.0 + overshoot)
        for k in range(8):
            r[k] = pen
    return r


def residuals_signed(p, consts, eps):
    """The original (unsquared) equations for a fixed sign assignment.

    Penalty residuals are returned when a radicand leaves the positive
    domain, keeping the solver total.
    """
    u = p[0]
    r = [0.0] * 9
    overshoot = 0.0
    bad = False
    for i in range(4):
        x = p[_XI[i]]
        y = p[_YI[i]]
        z = p[_ZI[i]]
        rad = x * y * u * (1.0 + z) * (1.0 + u * z)
        if rad < _DEN_GUARD:
            bad = True
            overshoot += (_DEN_GUARD - rad) / _DEN_GUARD
            continue
        c = consts[6 * i:6 * i + 6]
        den = 2.0 * math.sqrt(rad)
        e = eps[i]
        yzu = y * z * u
        xzu = x * z * u
        xyu = x * y * u
        ng = 1.0 - yzu - xzu + xyu
        r[2 * i] = c[0] - e * ng / den
        nh = c[2] + c[3] * yzu + c[4] * xzu + c[5] * xyu
        r[2 * i + 1] = c[1] - e * nh / den
    if bad:
        pen = _PENALTY * (1.0 + overshoot)
        for k in range(8):
            r[k] = pen
    return r


def eps_heuristic(p, consts):
    """Sign assignment suggested by the structure at p, or None off-domain.

    eps_i must make the delta relation hold with the right sign; when
    cos(delta_i) is too small to vote, the dihedral relation decides.
    """
    u = p[0]
    eps = []
    for i in range(4):
        x = p[_XI[i]]
        y = p[_YI[i]]
        z = p[_ZI[i]]
        rad = x * y * u * (1.0 + z) * (1.0 + u * z)
        if rad < _DEN_GUARD:
            return None
        c = consts[6 * i:6 * i + 6]
        yzu = y * z * u
        xzu = x * z * u
        xyu = x * y * u
        ng = 1.0 - yzu - xzu + xyu
        nh = c[2] + c[3] * yzu + c[4] * xzu + c[5] * xyu
        if abs(c[0]) > 0.1:
            e = 1 if c[0] * ng > 0.0 else -1
        else:
            e = 1 if c[1] * nh > 0.0 else -1
        eps.append(e)
    return tuple(eps)


def _jacobian(fn, p, n):
    """Central-difference Jacobian of fn (9 components) at p, step 1e-7*(1+|p|)."""
    J = [[0.0] * n for _ in range(9)]
    for j in range(n):
        h = 1e-7 * (1.0 + abs(p[j]))
        pj = p[j]
        p[j] = pj + h
        rp = fn(p)
        p[j] = pj - h
        rm = fn(p)
        p[j] = pj
        inv2h = 1.0 / (2.0 * h)
        for k in range(9):
            J[k][j] = (rp[k] - rm[k]) * inv2h
    return J


def jacobian_signed(p, consts, eps):
    """Flat 8x9 central-difference Jacobian of the signed system."""
    p = [float(v) for v in p]
    J = _jacobian(lambda q: residuals_signed(q, consts, eps), p, 9)
    return [J[k][j] for k in range(8) for j in range(9)]


def _solve9(a, b):
    """In-place Gaussian elimination with partial pivoting; returns x or None."""
    n = 9
    A = [row[:] for row in a]
    x = b[:]
    for col in range(n):
        piv = col
        best = abs(A[col][col])
        for row in range(col + 1, n):
            v = abs(A[row][col])
            if v > best:
                best = v
                piv = row
        if best < 1e-300:
            return None
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            x[col], x[piv] = x[piv], x[col]
        inv = 1.0 / A[col][col]
        for row in range(col + 1, n):
            f = A[row][col] * inv
            if f == 0.0:
                continue
            for k in range(col, n):
                A[row][k] -= f * A[col][k]
            x[row] -= f * x[col]
    for col in range(n - 1, -1, -1):
        s = x[col]
        for k in range(col + 1, n):
            s -= A[col][k] * x[k]
        x[col] = s / A[col][col]
    return x


def _lm_loop(fn, p, max_iter, tol):
    """Damped Gauss-Newton on a 9-component residual function."""
    n = 9
    r = fn(p)
    cost = sum(v * v for v in r)
    maxres = max(abs(v) for v in r)
    lam = 1e-3

    it = 0
    while it < max_iter:
        it += 1
        if maxres <= tol:
            return p, maxres, it, True

        J = _jacobian(fn, p, n)
        H = [[0.0] * n for _ in range(n)]
        g = [0.0] * n
        for a in range(n):
            for b in range(a, n):
                s = 0.0
                for k in range(n):
                    s += J[k][a] * J[k][b]
                H[a][b] = s
                H[b][a] = s
            s = 0.0
            for k in range(n):
                s += J[k][a] * r[k]
            g[a] = s

        improved = False
        for _ in range(40):
            A = [row[:] for row in H]
            for d in range(n):
                diag = H[d][d]
                if diag < 1e-12:
                    diag = 1e-12
                A[d][d] = H[d][d] + lam * diag
            step = _solve9(A, g)
            if step is None:
                lam *= 3.0
                if lam > 1e14:
                    break
                continue
            ptry = [p[k] - step[k] for k in range(n)]
            rtry = fn(ptry)
            ctry = sum(v * v for v in rtry)
            if ctry < cost:
                p, r, cost = ptry, rtry, ctry
                maxres = max(abs(v) for v in r)
                lam *= 0.33
                if lam < 1e-14:
                    lam = 1e-14
                improved = True
                break
            lam *= 3.0
            if lam > 1e14:
                break
        if not improved:
            break

    return p, maxres, it, maxres <= tol


def lm_solve(p0, consts, max_iter, tol):
    """Squared-system solve; returns (params, max_abs_residual, iters, ok)."""
    p = [float(v) for v in p0]
    return _lm_loop(lambda q: residuals(q, consts), p, max_iter, tol)


def lm_solve_signed(p0, consts, eps, max_iter, tol):
    """Signed-system solve for a fixed sign assignment."""
    p = [float(v) for v in p0]
    return _lm_loop(lambda q: residuals_signed(q, consts, eps), p, max_iter, tol)


def solve_batch(seeds, consts, max_iter, tol):
    """lm_solve over a list of seeds; returns list of (params, maxres, ok)."""
    out = []
    for s in seeds:
        p, maxres, _, ok = lm_solve(s, consts, max_iter, tol)
        out.append((p, maxres, ok))
    return out


def solve_batch_signed(seeds, consts, max_iter, tol):
    """Signed solve per seed with the heuristic sign assignment.

    Returns a list of (params, maxres, ok, eps); seeds whose sign structure
    is undefined are reported as not converged with eps = None.
    """
    out = []
    for s in seeds:
        eps = eps_heuristic(s, consts)
        if eps is None:
            out.append((list(s), math.inf, False, None))
            continue
        p, maxres, _, ok = lm_solve_signed(s, consts, eps, max_iter, tol)
        out.append((p, maxres, ok, eps))
    return out
