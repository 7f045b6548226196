"""Numba kernels for the hot numerical loops.

Everything here is internal.  The public contracts live in `logopt`,
`market` and `strategies`; these kernels only make them fast enough for
the 1e5-step experiment panels.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def bisect_right(a, x):
    # insertion point to the right of equal elements, same convention as
    # np.searchsorted(a, x, side="right")
    lo = 0
    hi = a.shape[0]
    while lo < hi:
        mid = (lo + hi) // 2
        if x < a[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


@njit(cache=True)
def _objective(atoms, w, b):
    K, m = atoms.shape
    f = 0.0
    for j in range(K):
        s = 0.0
        for i in range(m):
            s += b[i] * atoms[j, i]
        f += w[j] * np.log(s)
    return f


@njit(cache=True)
def _residuals_into(atoms, w, b, r):
    # r_i = sum_j w_j atoms[j, i] / <b, atoms[j]>; returns max residual
    K, m = atoms.shape
    for i in range(m):
        r[i] = 0.0
    for j in range(K):
        if w[j] == 0.0:
            continue
        s = 0.0
        for i in range(m):
            s += b[i] * atoms[j, i]
        c = w[j] / s
        for i in range(m):
            r[i] += c * atoms[j, i]
    mx = r[0]
    for i in range(1, m):
        if r[i] > mx:
            mx = r[i]
    return mx


@njit(cache=True)
def _clamped_gap(r, mx, m, eps):
    # duality gap over the eps-clamped simplex: the best feasible ascent
    # direction is the clamped vertex of the largest residual, so
    #   f(b_opt) - f(b) <= log((1-(m-1)eps) r_max + eps (sum r - r_max))
    # and log(x) <= x - 1 gives the bound below (sum_i b_i r_i = 1).
    s = 0.0
    for i in range(m):
        s += r[i]
    return (1.0 - (m - 1) * eps) * mx + eps * (s - mx) - 1.0


@njit(cache=True)
def _project_clamped(v, m, eps):
    # normalize, clamp to the eps-interior, renormalize: the second pass
    # can shave at most ~m*eps relative, keeping entries >= eps(1 - m*eps)
    tot = 0.0
    for i in range(m):
        tot += v[i]
    if not (tot > 0.0) or not np.isfinite(tot):
        return False
    clamped = 0.0
    for i in range(m):
        v[i] /= tot
        if v[i] < eps:
            v[i] = eps
        clamped += v[i]
    for i in range(m):
        v[i] /= clamped
    return True


@njit(cache=True)
def solve_simplex(atoms, w, b0, tol, obj_tol, max_iter, eps, eq_tol=1e18):
    """Multiplicative fixed-point iteration b <- b * residuals(b).

    The Kuhn-Tucker point is the unique fixed point; iteration is made
    practical by a safeguarded log-space extrapolation that never moves
    unless it improves the objective.  Stops once the max residual is
    within `tol` of 1, the clamped-simplex duality gap is below `obj_tol`
    and (when `eq_tol` is finite) every coordinate either meets the
    residual-equality band or sits at the clamp.  Returns
    (b, max_residual, iters).
    """
    K, m = atoms.shape
    b = b0.copy()
    r = np.empty(m)
    r_tmp = np.empty(m)
    cand = np.empty(m)
    ext = np.empty(m)
    prev_excess = np.inf
    band_floor = 5.0 * eps
    mx = _residuals_into(atoms, w, b, r)
    it = 0
    while it < max_iter:
        excess = mx - 1.0
        if excess <= tol and _clamped_gap(r, mx, m, eps) <= obj_tol:
            settled = True
            if eq_tol < 1.0:
                # residual-equality band: every coordinate holding weight
                # must sit within eq_tol of residual 1
                for i in range(m):
                    if r[i] < 1.0 - eq_tol and b[i] > band_floor:
                        settled = False
                        break
            if settled:
                return b, mx, it
        # plain multiplicative step, projected to the open simplex
        for i in range(m):
            cand[i] = b[i] * r[i]
        _project_clamped(cand, m, eps)
        # geometric-rate extrapolation with backtracking; accept the longest
        # jump that loses neither objective nor residual excess against the
        # plain step (ties in objective alone would wander near the optimum)
        if prev_excess < np.inf and 0.0 < excess < prev_excess:
            rho = excess / prev_excess
            gamma = 1.0 / (1.0 - rho)
            if gamma > 1.5:
                if gamma > 1e6:
                    gamma = 1e6
                f_plain = _objective(atoms, w, cand)
                mx_plain = _residuals_into(atoms, w, cand, r_tmp)
                accepted = False
                for _ in range(6):
                    ok = True
                    for i in range(m):
                        ext[i] = b[i] * r[i] ** gamma
                        if not np.isfinite(ext[i]):
                            ok = False
                            break
                    if ok and _project_clamped(ext, m, eps):
                        if (_objective(atoms, w, ext) >= f_plain
                                and _residuals_into(atoms, w, ext, r_tmp) <= mx_plain):
                            for i in range(m):
                                cand[i] = ext[i]
                            prev_excess = np.inf
                            accepted = True
                            break
                    gamma = 1.0 + (gamma - 1.0) * 0.25
                    if gamma <= 1.5:
                        break
                if not accepted:
                    prev_excess = excess
            else:
                prev_excess = excess
        else:
            prev_excess = excess
        for i in range(m):
            b[i] = cand[i]
        mx = _residuals_into(atoms, w, b, r)
        it += 1
    return b, mx, it


@njit(cache=True)
def kernel_levels(ctx_mat, counts, atoms, theta, widths, starts, tol, obj_tol, max_iter, eps):
    """One kernel-strategy step: match, aggregate and solve all width levels.

    ctx_mat: (C, d) distinct context vectors; counts: (C, U) next-return
    counts per context; atoms: (U, m) distinct normalized returns;
    theta: (d,) current context; widths: (L,) match radii (c/l);
    starts: (L, m) warm starts.  Returns (portfolios (L, m),
    weights (L, U) rows summing to 1, empty flags (L,)).
    """
    C, d = ctx_mat.shape
    U, m = atoms.shape
    L = widths.shape[0]
    dvec = np.empty(C)
    for ci in range(C):
        s = 0.0
        for j in range(d):
            diff = ctx_mat[ci, j] - theta[j]
            s += diff * diff
        dvec[ci] = np.sqrt(s)
    out = np.empty((L, m))
    weights = np.zeros((L, U))
    empty = np.ones(L, dtype=np.bool_)
    for l in range(L):
        w = widths[l]
        total = 0.0
        for ci in range(C):
            if dvec[ci] <= w:
                for ui in range(U):
                    weights[l, ui] += counts[ci, ui]
        for ui in range(U):
            total += weights[l, ui]
        if total > 0.0:
            empty[l] = False
            for ui in range(U):
                weights[l, ui] /= total
            b, _, _ = solve_simplex(atoms, weights[l], starts[l], tol, obj_tol, max_iter, eps)
            for i in range(m):
                out[l, i] = b[i]
        else:
            for i in range(m):
                out[l, i] = 1.0 / m
    return out, weights, empty


@njit(cache=True)
def markov_sample(state_cdf, succ, init_cdf, u, out_atoms):
    """Sample a Markov path by inverse-CDF lookups.

    state_cdf: (S, K) per-state cumulative next-atom probabilities.
    succ:      (S, K) successor state index (-1 where the row is zero).
    init_cdf:  (S,) cumulative distribution over latent initial states.
    u:         (n+1,) uniforms; u[0] picks the initial state.
    """
    S, K = state_cdf.shape
    n = out_atoms.shape[0]
    s = bisect_right(init_cdf, u[0])
    if s > S - 1:
        s = S - 1
    for t in range(n):
        a = bisect_right(state_cdf[s], u[t + 1])
        if a > K - 1:
            a = K - 1
        out_atoms[t] = a
        nxt = succ[s, a]
        if nxt >= 0:
            s = nxt
    return out_atoms
