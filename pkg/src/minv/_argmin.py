"""Batched derivative-free argmin machinery for the pointwise maps.

Everything here runs a whole batch of independent queries through the same
iteration with per-row bookkeeping, so pulling thousands of data points back
through a map costs a few hundred vectorized evaluations instead of
thousands of scalar solves.

Two refiners are provided:

* cyclic coordinate descent with golden-section line minimization inside the
  domain (unconstrained objectives over a box/ball domain);
* an alternating feasibility/tangent-descent scheme with finite-difference
  Jacobians for norm minimization restricted to a fiber {G(x) = y}.
"""

import numpy as np

from .domains import Ball, Box, Intersection

_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def clamp_to_domain(x, theta):
    """Pull points into the domain (boxes clip per axis, balls clip radially)."""
    x = np.array(x, dtype=float)
    if theta is None:
        return x
    if isinstance(theta, Box):
        return np.clip(x, theta.lows, theta.highs)
    if isinstance(theta, Ball):
        c = np.asarray(theta.center)
        d = x - c
        norm = np.linalg.norm(d, axis=-1, keepdims=True)
        factor = np.where(norm > theta.radius, theta.radius / np.where(norm > 0, norm, 1.0), 1.0)
        return c + d * factor
    if isinstance(theta, Intersection):
        for _ in range(4):
            x = clamp_to_domain(clamp_to_domain(x, theta.box), theta.ball)
        return x
    raise TypeError(f"unsupported domain {type(theta).__name__}")


def axis_interval(theta, x, j):
    """Feasible interval of coordinate j through each point of the batch."""
    q = x.shape[0]
    if isinstance(theta, Box):
        lo = np.full(q, theta.lows[j])
        hi = np.full(q, theta.highs[j])
        return lo, hi
    if isinstance(theta, Ball):
        c = np.asarray(theta.center)
        off = np.sum((np.delete(x, j, axis=1) - np.delete(c, j)) ** 2, axis=1)
        half = np.sqrt(np.maximum(theta.radius**2 - off, 0.0))
        return c[j] - half, c[j] + half
    if isinstance(theta, Intersection):
        lo1, hi1 = axis_interval(theta.box, x, j)
        lo2, hi2 = axis_interval(theta.ball, x, j)
        lo, hi = np.maximum(lo1, lo2), np.minimum(hi1, hi2)
        return lo, np.maximum(hi, lo)
    raise TypeError(f"unsupported domain {type(theta).__name__}")


def golden_sweep_batch(objective, x0, theta, sweeps=50, iters=60, xtol=1e-13):
    """Cyclic coordinate descent; each 1-D step is a golden-section search
    over the coordinate's feasible interval with explicit endpoint checks.

    objective maps an (q, m) batch to (q,) values, row by row.
    """
    x = np.array(x0, dtype=float)
    q, m = x.shape
    scale = 1.0
    if isinstance(theta, (Box, Ball, Intersection)):
        bb = theta.bounding_box()
        scale = float(np.max(bb.widths))
    for _ in range(sweeps):
        max_move = 0.0
        for j in range(m):
            lo, hi = axis_interval(theta, x, j)
            a, b = lo.copy(), hi.copy()

            def f_at(t):
                xc = x.copy()
                xc[:, j] = t
                return np.asarray(objective(xc), dtype=float)

            for _ in range(iters):
                c = b - _INVPHI * (b - a)
                d = a + _INVPHI * (b - a)
                shrink_right = f_at(c) < f_at(d)
                b = np.where(shrink_right, d, b)
                a = np.where(shrink_right, a, c)
            mid = 0.5 * (a + b)
            cands = np.stack([mid, lo, hi, x[:, j]], axis=0)
            vals = np.stack([f_at(t) for t in cands], axis=0)
            best = cands[np.argmin(vals, axis=0), np.arange(q)]
            max_move = max(max_move, float(np.max(np.abs(best - x[:, j]))))
            x[:, j] = best
        if max_move < xtol * scale:
            break
    return x


def coarse_grid(theta, per_axis=41):
    """Cell-center lattice of the domain's bounding box, masked to the domain."""
    box = theta.bounding_box()
    axes = [
        lo + (np.arange(per_axis) + 0.5) * (hi - lo) / per_axis
        for lo, hi in zip(box.lows, box.highs)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    return pts[theta.contains(pts)]


def best_starts(values, queries, k=4, chunk=256):
    """Indices of the k grid points whose map values are closest to each query.

    values: (n_grid, out); queries: (q, out). Distances are computed in
    chunks to bound memory.
    """
    q = queries.shape[0]
    k = min(k, values.shape[0])
    out = np.empty((q, k), dtype=np.int64)
    for s in range(0, q, chunk):
        block = queries[s : s + chunk]
        d2 = np.sum((values[None, :, :] - block[:, None, :]) ** 2, axis=2)
        out[s : s + chunk] = np.argpartition(d2, k - 1, axis=1)[:, :k]
    return out


def fd_jacobian_batch(fmap, x, h=1e-7):
    """Central-difference Jacobians, stacked as (q, out_dim, in_dim)."""
    q, m = x.shape
    jac = np.empty((q, fmap.out_dim, m))
    for j in range(m):
        e = np.zeros(m)
        e[j] = h
        jac[:, :, j] = (fmap(x + e) - fmap(x - e)) / (2.0 * h)
    return jac


def project_to_fiber_batch(fmap, y, x, theta, iters=25, tol=1e-12):
    """Gauss-Newton pullback of each row onto its fiber {G(x) = y_row}."""
    x = np.array(x, dtype=float)
    for _ in range(iters):
        resid = fmap(x) - y
        rnorm = np.linalg.norm(resid, axis=1)
        active = rnorm > tol
        if not active.any():
            break
        jac = fd_jacobian_batch(fmap, x[active])
        step = np.linalg.pinv(jac) @ resid[active][:, :, None]
        x[active] = clamp_to_domain(x[active] - step[:, :, 0], theta)
    return x


def least_norm_refine_batch(fmap, y, x0, theta, outer=50, fiber_tol=1e-10):
    """Minimize |x|^2 over the fiber {G(x) = y_row}, starting near the fiber.

    Alternates exact re-projection onto the fiber with a descent step along
    the fiber tangent (norm gradient projected out of the Jacobian row
    space), using backtracking on the norm. Rows that stop improving or
    reach a stationary tangent are frozen.
    """
    x = project_to_fiber_batch(fmap, y, np.array(x0, dtype=float), theta)
    q = x.shape[0]
    active = np.ones(q, dtype=bool)
    for _ in range(outer):
        if not active.any():
            break
        xa = x[active]
        jac = fd_jacobian_batch(fmap, xa)
        pinv = np.linalg.pinv(jac)
        tangent = -(xa - (pinv @ (jac @ xa[:, :, None]))[:, :, 0])
        tnorm = np.linalg.norm(tangent, axis=1)
        live = tnorm > 1e-12
        base = np.sum(xa**2, axis=1)
        improved = np.zeros(xa.shape[0], dtype=bool)
        step = np.ones(xa.shape[0])
        best = xa.copy()
        for _ in range(25):
            trial = live & ~improved
            if not trial.any():
                break
            cand = xa[trial] + step[trial, None] * tangent[trial]
            cand = project_to_fiber_batch(
                fmap, y[active][trial], clamp_to_domain(cand, theta), theta
            )
            ok_fiber = (
                np.linalg.norm(fmap(cand) - y[active][trial], axis=1) <= fiber_tol
            )
            gain = base[trial] - np.sum(cand**2, axis=1)
            ok = ok_fiber & (gain > 1e-16 * (1.0 + base[trial]))
            idx = np.flatnonzero(trial)
            best[idx[ok]] = cand[ok]
            improved[idx[ok]] = True
            step[idx[~ok]] *= 0.5
        x[active] = best
        still = improved & live
        sel = np.flatnonzero(active)
        active[sel[~still]] = False
    return x
