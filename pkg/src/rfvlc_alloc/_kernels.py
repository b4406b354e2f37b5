"""Compiled inner loops for the fixed-``y`` power subproblems.

Same algorithm as :func:`rfvlc_alloc.power.maximize_concave` (spectral
projected gradient with Armijo backtracking) wrapped in the same
augmented-Lagrangian multiplier loop, specialised to the transformed-rate
objective so that it runs without Python overhead per iteration.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_LN2 = math.log(2.0)


@njit(cache=True)
def _project(q, group, budget, out, sq):
    sq[:] = 0.0
    for i in range(q.size):
        v = q[i] if q[i] > 0.0 else 0.0
        out[i] = v
        sq[group[i]] += v * v
    for i in range(q.size):
        g = group[i]
        if sq[g] > budget[g]:
            out[i] *= math.sqrt(budget[g] / sq[g])


@njit(cache=True)
def _evaluate(q, ys, y2, c, w, noise, B, has_interf, user, act, inv_t, alpha, beta,
              inv_scale, eps, mult, rho, arg, weights, per_user, user_w):
    L = q.size
    for l in range(L):
        s = noise[l]
        if has_interf:
            for o in range(L):
                if B[l, o] != 0.0:
                    s += B[l, o] * q[o] * q[o]
        a = 1.0 + c[l] * (2.0 * ys[l] * q[l] - y2[l] * s)
        if not a > 0.0:
            return -np.inf
        arg[l] = a
    per_user[:] = 0.0
    user_w[:] = 0.0
    total = 0.0
    qq = 0.0
    for l in range(L):
        r = w[l] * math.log(arg[l]) / _LN2
        total += r
        per_user[user[l]] += r
        qq += q[l] * q[l]
    value = alpha * total * inv_scale - beta * qq
    pen = 0.0
    shared = 0.0
    k = 0
    if eps > 0.0:
        h = total / eps - 1.0
        v = mult[0] - rho * h
        v = v if v > 0.0 else 0.0
        pen += v * v - mult[0] * mult[0]
        shared = v / eps
        k = 1
    for i in range(act.size):
        u = act[i]
        h = per_user[u] * inv_t[u] - 1.0
        v = mult[k + i] - rho * h
        v = v if v > 0.0 else 0.0
        pen += v * v - mult[k + i] * mult[k + i]
        user_w[u] = v * inv_t[u]
    value -= pen / (2.0 * rho)
    for l in range(L):
        weights[l] = alpha * inv_scale + shared + user_w[user[l]]
    return value


@njit(cache=True)
def _gradient(q, ys, y2, cw, B, has_interf, beta, arg, weights, d, g):
    L = q.size
    for l in range(L):
        d[l] = weights[l] * cw[l] / arg[l]
    for l in range(L):
        acc = 0.0
        if has_interf:
            for o in range(L):
                if B[o, l] != 0.0:
                    acc += B[o, l] * d[o] * y2[o]
        g[l] = 2.0 * d[l] * ys[l] - 2.0 * beta * q[l] - 2.0 * q[l] * acc


@njit(cache=True)
def _margins(per_user, total, act, inv_t, eps, h):
    k = 0
    if eps > 0.0:
        h[0] = total / eps - 1.0
        k = 1
    for i in range(act.size):
        u = act[i]
        h[k + i] = per_user[u] * inv_t[u] - 1.0


@njit(cache=True)
def solve_subproblem(q0, ys, y2, c, w, cw, noise, B, has_interf, user, act, inv_t, n_users,
                     group, budget, alpha, beta, inv_scale, eps, mult, rho,
                     tol, feas_tol, max_iter, max_outer):
    """Augmented-Lagrangian / spectral-projected-gradient solve in ``q``.

    Returns ``(q, mult, rho, total_iterations)``.
    """
    L = q0.size
    n_cons = mult.size
    arg = np.empty(L)
    weights = np.empty(L)
    per_user = np.empty(n_users)
    user_w = np.empty(n_users)
    d = np.empty(L)
    g = np.empty(L)
    gn = np.empty(L)
    xp = np.empty(L)
    dirn = np.empty(L)
    xn = np.empty(L)
    sq = np.empty(budget.size)
    h = np.empty(n_cons)
    x = np.empty(L)
    _project(q0, group, budget, x, sq)
    total_it = 0
    prev_viol = np.inf
    outer_loops = max_outer if n_cons > 0 else 1
    for _outer in range(outer_loops):
        f = _evaluate(x, ys, y2, c, w, noise, B, has_interf, user, act, inv_t, alpha, beta,
                      inv_scale, eps, mult, rho, arg, weights, per_user, user_w)
        if not np.isfinite(f):
            break
        _gradient(x, ys, y2, cw, B, has_interf, beta, arg, weights, d, g)
        alpha_s = 1.0
        for i in range(L):
            xp[i] = x[i] + g[i]
        _project(xp, group, budget, xn, sq)
        res = 0.0
        for i in range(L):
            res = max(res, abs(xn[i] - x[i]))
        it = 0
        while res > tol and it < max_iter:
            it += 1
            for i in range(L):
                xp[i] = x[i] + alpha_s * g[i]
            _project(xp, group, budget, dirn, sq)
            slope = 0.0
            for i in range(L):
                dirn[i] -= x[i]
                slope += g[i] * dirn[i]
            if slope <= 0.0:
                for i in range(L):
                    xp[i] = x[i] + g[i]
                _project(xp, group, budget, dirn, sq)
                slope = 0.0
                for i in range(L):
                    dirn[i] -= x[i]
                    slope += g[i] * dirn[i]
                if slope <= 0.0:
                    break
            t = 1.0
            ok = False
            fn = f
            while t >= 1e-14:
                for i in range(L):
                    xn[i] = x[i] + t * dirn[i]
                fn = _evaluate(xn, ys, y2, c, w, noise, B, has_interf, user, act, inv_t, alpha,
                               beta, inv_scale, eps, mult, rho, arg, weights, per_user, user_w)
                if fn >= f + 1e-4 * t * slope:
                    ok = True
                    break
                t *= 0.5
            if not ok:
                # restore caches for x before leaving
                f = _evaluate(x, ys, y2, c, w, noise, B, has_interf, user, act, inv_t, alpha,
                              beta, inv_scale, eps, mult, rho, arg, weights, per_user, user_w)
                break
            _gradient(xn, ys, y2, cw, B, has_interf, beta, arg, weights, d, gn)
            ss = 0.0
            sy = 0.0
            for i in range(L):
                si = xn[i] - x[i]
                ss += si * si
                sy += si * (g[i] - gn[i])
            if sy > 0.0:
                alpha_s = min(max(ss / sy, 1e-12), 1e12)
            else:
                alpha_s = 1e12
            for i in range(L):
                x[i] = xn[i]
                g[i] = gn[i]
            f = fn
            for i in range(L):
                xp[i] = x[i] + g[i]
            _project(xp, group, budget, xn, sq)
            res = 0.0
            for i in range(L):
                res = max(res, abs(xn[i] - x[i]))
        total_it += it
        if n_cons == 0:
            break
        # multiplier update at the sub-solution
        total = 0.0
        per_user[:] = 0.0
        finite = True
        for l in range(L):
            s = noise[l]
            if has_interf:
                for o in range(L):
                    if B[l, o] != 0.0:
                        s += B[l, o] * x[o] * x[o]
            a = 1.0 + c[l] * (2.0 * ys[l] * x[l] - y2[l] * s)
            if not a > 0.0:
                finite = False
                break
            r = w[l] * math.log(a) / _LN2
            total += r
            per_user[user[l]] += r
        if not finite:
            break
        _margins(per_user, total, act, inv_t, eps, h)
        viol = 0.0
        for i in range(n_cons):
            m = mult[i] - rho * h[i]
            mult[i] = m if m > 0.0 else 0.0
            if -h[i] > viol:
                viol = -h[i]
        if viol <= feas_tol:
            break
        if viol > 0.25 * prev_viol:
            rho *= 10.0
        prev_viol = viol
    return x, mult, rho, total_it
