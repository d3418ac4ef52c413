"""The six reconstruction solvers, their pointwise maps, and the error bound
for linear Tikhonov-type regularization.

Overdetermined data (mass off the range):
  conditional_reconstruction — divergence matching; recovers the data
      conditioned on the range, optimal by the Jensen certificate.
  marginal_reconstruction — transport matching; recovers the data projected
      onto the range through the nearest-preimage inversion map.

Underdetermined data (fibers with many preimages):
  entropy_solution — entropy-minimal feasible density, uniform on fibers.
  moment_solution — second-moment-minimal choice, the least-norm map's image.

Regularized:
  reg_entropy_solution — divergence matching plus divergence-to-prior; the
      density-to-prior ratio is constant on fibers.
  reg_wp_solution — transport matching plus moment penalty; image of the
      penalized inversion map.

Grid solvers quantize map values to the data grid's cells, so a "fiber" is
the set of parameter cells landing in one data cell. This makes the computed
solution exactly piecewise constant (or prior-proportional) per fiber and
makes its pushforward reproduce the data masses identically, at the price of
evaluating the closed forms at cell centers.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _argmin
from .divergences import PhiKind, jensen_lower_bound, kl, phi_divergence
from .errors import (
    EmptyFiber,
    EmptyRangeMass,
    PriorVanishes,
    RangeMismatch,
    ZeroMass,
)
from .maps import augment, pseudoinverse
from .measures import (
    GridMeasure,
    ParticleMeasure,
    condition,
    entropy,
    moment,
    normalize,
    pushforward_grid,
)
from .transport import cost_matrix, exact_ot

METHODS = ("conditional", "marginal", "entropy", "moment", "reg-entropy", "reg-wp")


@dataclass(frozen=True)
class SolveReport:
    """Solver output: the optimizer, its pushforward, and how it was found.

    ``floor_flags`` (grid methods only) marks parameter cells whose fiber was
    too small for the band estimator, where the reported density sits on the
    volume floor rather than the raw quotient.
    """

    optimizer: ParticleMeasure | GridMeasure
    pushforward_of_optimizer: ParticleMeasure | GridMeasure
    objective: float
    method: str
    diagnostics: dict = field(default_factory=dict)
    floor_flags: np.ndarray | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not np.isfinite(self.objective):
            raise ValueError("objective must be finite")

    def validate(self) -> None:
        self.optimizer.validate()
        self.pushforward_of_optimizer.validate()


@dataclass(frozen=True)
class RegularizationConfig:
    """Penalty weight, moment/transport order, and optional prior density."""

    alpha: float
    p: float = 2.0
    prior: GridMeasure | None = None

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.prior is not None:
            self.prior.validate(atol=1e-8)


# ---------------------------------------------------------------------------
# Pointwise maps: inversion, projection, least-norm, penalized inversion
# ---------------------------------------------------------------------------


def _as_queries(y, out_dim):
    arr = np.asarray(y, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size == out_dim else arr.reshape(-1, 1)
    return arr


def _require_theta(fmap):
    if fmap.theta is None:
        raise ValueError(
            "map has an unbounded parameter domain; grid-based argmin needs theta"
        )
    return fmap.theta


def _lex_pick(cands, vals, atol=1e-9):
    """Per-query winner: smallest value, ties by lexicographic point order."""
    q, k, m = cands.shape
    out = np.empty((q, m))
    vmin = vals.min(axis=1)
    for i in range(q):
        tied = np.flatnonzero(vals[i] <= vmin[i] + atol)
        order = np.lexsort(cands[i, tied, ::-1].T)
        out[i] = cands[i, tied[order[0]]]
    return out


def inversion_map_batch(fmap, ys, starts=4, coarse=41, sweeps=50):
    """Nearest-preimage points: rows x* minimizing |G(x) - y| over theta."""
    ys = _as_queries(ys, fmap.out_dim)
    if fmap.kind == "linear":
        return ys @ pseudoinverse(fmap.params["matrix"]).T
    theta = _require_theta(fmap)
    grid = _argmin.coarse_grid(theta, coarse)
    idx = _argmin.best_starts(fmap(grid), ys, k=starts)
    q, k = idx.shape
    x0 = grid[idx.ravel()]
    yrep = np.repeat(ys, k, axis=0)

    def obj(x):
        return np.linalg.norm(fmap(x) - yrep, axis=1)

    xr = _argmin.golden_sweep_batch(obj, x0, theta, sweeps=sweeps)
    vals = obj(xr).reshape(q, k)
    return _lex_pick(xr.reshape(q, k, -1), vals)


def inversion_map(fmap, y, metric_p: float = 2.0, **kwargs):
    """Single-point inversion; the metric order does not move the argmin."""
    del metric_p
    return inversion_map_batch(fmap, _as_queries(y, fmap.out_dim), **kwargs)[0]


def projection_batch(fmap, ys, **kwargs):
    return fmap(inversion_map_batch(fmap, ys, **kwargs))


def projection(fmap, y, metric_p: float = 2.0, **kwargs):
    """Metric projection of y onto the range: G applied to the inversion."""
    del metric_p
    return projection_batch(fmap, _as_queries(y, fmap.out_dim), **kwargs)[0]


def _fiber_tolerance(fmap, grid, per_axis):
    # Twice the map variation across one coarse cell, from sampled Jacobians.
    bb = fmap.theta.bounding_box()
    diag = float(np.linalg.norm(bb.widths / per_axis))
    sample = grid[:: max(1, grid.shape[0] // 200)]
    jac = _argmin.fd_jacobian_batch(fmap, sample)
    lip = float(np.max(np.linalg.norm(jac, axis=(1, 2))))
    return 2.0 * max(lip, 1e-12) * diag


def least_norm_map_batch(fmap, ys, fiber_tol=None, starts=6, coarse=61, outer=50):
    """Minimum-norm preimages: rows minimizing |x|^2 subject to G(x) = y.

    Coarse fiber candidates (grid points within the fiber tolerance of y)
    seed a feasibility/tangent refinement that lands on the fiber to solver
    precision. Raises EmptyFiber for data points whose fiber tolerance
    captures no grid point.
    """
    ys = _as_queries(ys, fmap.out_dim)
    if fmap.kind == "linear":
        return ys @ pseudoinverse(fmap.params["matrix"]).T
    theta = _require_theta(fmap)
    grid = _argmin.coarse_grid(theta, coarse)
    gv = fmap(grid)
    if fiber_tol is None:
        fiber_tol = _fiber_tolerance(fmap, grid, coarse)
    norms = np.sum(grid**2, axis=1)
    q = ys.shape[0]
    starts = min(starts, grid.shape[0])
    x0 = np.empty((q, starts, grid.shape[1]))
    for i in range(q):
        members = np.flatnonzero(np.linalg.norm(gv - ys[i], axis=1) <= fiber_tol)
        if members.size == 0:
            raise EmptyFiber(
                f"no grid point within {fiber_tol:.3g} of data point {ys[i]}"
            )
        best = members[np.argsort(norms[members])[:starts]]
        x0[i] = grid[best[np.arange(starts) % best.size]]
    xr = _argmin.least_norm_refine_batch(
        fmap,
        np.repeat(ys, starts, axis=0),
        x0.reshape(q * starts, -1),
        theta,
        outer=outer,
    )
    vals = np.sum(xr**2, axis=1).reshape(q, starts)
    return _lex_pick(xr.reshape(q, starts, -1), vals)


def least_norm_map(fmap, y, **kwargs):
    return least_norm_map_batch(fmap, _as_queries(y, fmap.out_dim), **kwargs)[0]


def reg_inversion_map_batch(fmap, ys, cfg: RegularizationConfig, starts=4, coarse=41, sweeps=50):
    """Penalized inversions: rows minimizing |G(x) - y|^p + alpha |x|^p.

    At alpha = 0 this returns the vanishing-penalty limit: the minimum-norm
    point among the nearest preimages (the projection's least-norm pullback),
    which the closed forms of the penalized maps converge to.
    """
    ys = _as_queries(ys, fmap.out_dim)
    alpha, p = cfg.alpha, cfg.p
    if alpha == 0:
        proj = projection_batch(fmap, ys, starts=starts, coarse=coarse, sweeps=sweeps)
        return least_norm_map_batch(fmap, proj, coarse=max(coarse, 61))
    if fmap.kind == "linear" and p == 2.0:
        a = fmap.params["matrix"]
        t = np.linalg.solve(a.T @ a + alpha * np.eye(a.shape[1]), a.T)
        return ys @ t.T
    theta = _require_theta(fmap)
    grid = _argmin.coarse_grid(theta, coarse)
    gv = fmap(grid)
    pen = alpha * np.linalg.norm(grid, axis=1) ** p
    q = ys.shape[0]
    k = min(starts, grid.shape[0])
    idx = np.empty((q, k), dtype=np.int64)
    for s in range(0, q, 256):
        block = ys[s : s + 256]
        f = np.linalg.norm(gv[None, :, :] - block[:, None, :], axis=2) ** p + pen[None, :]
        idx[s : s + 256] = np.argpartition(f, k - 1, axis=1)[:, :k]
    x0 = grid[idx.ravel()]
    yrep = np.repeat(ys, k, axis=0)

    def obj(x):
        fit = np.linalg.norm(fmap(x) - yrep, axis=1) ** p
        return fit + alpha * np.linalg.norm(x, axis=1) ** p

    xr = _argmin.golden_sweep_batch(obj, x0, theta, sweeps=sweeps)
    vals = obj(xr).reshape(q, k)
    return _lex_pick(xr.reshape(q, k, -1), vals)


def reg_inversion_map(fmap, y, cfg: RegularizationConfig, **kwargs):
    return reg_inversion_map_batch(fmap, _as_queries(y, fmap.out_dim), cfg, **kwargs)[0]


# ---------------------------------------------------------------------------
# Overdetermined solvers
# ---------------------------------------------------------------------------


def conditional_reconstruction(
    fmap,
    rho_y,
    range_indicator,
    kind: PhiKind | None = None,
    pullback_per_axis: int = 41,
    pullback_sweeps: int = 8,
) -> SolveReport:
    """Divergence-matching reconstruction.

    The optimizer's pushforward is the data conditioned on the range, and the
    attained divergence equals the Jensen lower bound at the range mass — the
    optimality certificate. The parameter-space optimizer is one preimage
    representative (pulled back through the inversion map at the stated
    refinement effort); it is not unique and nothing downstream depends on
    which representative is returned.
    """
    kind = kind or kl()
    if isinstance(rho_y, ParticleMeasure):
        inside = range_indicator.contains(rho_y.points) if hasattr(
            range_indicator, "contains"
        ) else range_indicator(rho_y.points)
        nu1 = float(np.sum(rho_y.weights[np.asarray(inside, dtype=bool)]))
    else:
        centers = rho_y.cell_centers()
        inside = range_indicator.contains(centers) if hasattr(
            range_indicator, "contains"
        ) else range_indicator(centers)
        nu1 = float(np.sum(rho_y.cell_masses()[np.asarray(inside, dtype=bool)]))
    if nu1 <= 0:
        raise EmptyRangeMass("data has no mass on the range")
    try:
        cond = condition(rho_y, range_indicator)
    except ZeroMass as exc:
        raise EmptyRangeMass(str(exc)) from exc
    objective = jensen_lower_bound(kind, nu1)

    if isinstance(cond, ParticleMeasure):
        pts = cond.points[cond.weights > 0]
        w = cond.weights[cond.weights > 0]
    else:
        masses = cond.cell_masses()
        sel = masses > 0
        pts = cond.cell_centers()[sel]
        w = masses[sel]
    x = inversion_map_batch(
        fmap, pts, starts=1, coarse=pullback_per_axis, sweeps=pullback_sweeps
    )
    optimizer = normalize(ParticleMeasure(x, w))
    diagnostics = {
        "range_mass": nu1,
        "n_pullback_points": float(pts.shape[0]),
        "pullback_per_axis": float(pullback_per_axis),
    }
    return SolveReport(optimizer, cond, objective, "conditional", diagnostics)


def marginal_reconstruction(fmap, rho_y: ParticleMeasure, p: float = 2.0, **argmin_kwargs) -> SolveReport:
    """Transport-matching reconstruction: pull every data point back through
    the inversion map; the pushforward is the data projected onto the range.

    The objective is the p-Wasserstein distance between the projected data
    and the data, which the per-point projection coupling attains exactly.
    """
    x = inversion_map_batch(fmap, rho_y.points, **argmin_kwargs)
    optimizer = ParticleMeasure(x, rho_y.weights)
    push = ParticleMeasure(fmap(x), rho_y.weights)
    resid = np.linalg.norm(push.points - rho_y.points, axis=1)
    objective = float(np.sum(rho_y.weights * resid**p) ** (1.0 / p))
    diagnostics = {
        "max_projection_move": float(resid.max() if resid.size else 0.0),
        "order_p": p,
    }
    return SolveReport(optimizer, push, objective, "marginal", diagnostics)


# ---------------------------------------------------------------------------
# Fiber statistics shared by the grid solvers
# ---------------------------------------------------------------------------


def level_set_mass(fmap, grid: GridMeasure, y, h: float, weight: GridMeasure | None = None) -> float:
    """Band estimator of the fiber mass: (weighted volume of the set of
    parameter points whose image lies within h/2 of y) divided by h.

    The result is floored so collapsed fibers (smaller than about one grid
    cell across the band) cannot blow up downstream quotients; see
    :func:`_floor_value`.
    """
    if h <= 0:
        raise ValueError("bandwidth h must be positive")
    sel = grid.mask_flat()
    centers = grid.cell_centers()[sel]
    gv = np.atleast_2d(fmap(centers))
    yq = np.asarray(y, dtype=float).reshape(1, -1)
    band = np.linalg.norm(gv - yq, axis=1) < h / 2.0
    dens = np.ones(centers.shape[0])
    if weight is not None:
        _check_same_geometry(grid, weight, "weight")
        dens = weight.values.ravel()[sel]
    vol = float(np.sum(dens[band]) * grid.cell_volume)
    return max(vol, _floor_volume(grid, h)) / h


def _floor_volume(grid: GridMeasure, h: float) -> float:
    # Smallest band volume the grid can resolve: one cell, padded to the
    # cell diagonal relative to the bandwidth.
    diag = float(np.linalg.norm(grid.cell_widths))
    return grid.cell_volume * diag / h


def _check_same_geometry(a: GridMeasure, b: GridMeasure, name: str):
    if a.box != b.box or a.shape != b.shape:
        raise ValueError(f"{name} grid must share the parameter grid geometry")


def _fiber_partition(fmap, theta_grid: GridMeasure, rho_y: GridMeasure):
    """Assign each masked parameter cell to the data cell holding its image.

    Returns (masked cell indices, fiber id per masked cell with -1 for cells
    mapping off the data grid, data masses, per-fiber cell counts).
    """
    sel = np.flatnonzero(theta_grid.mask_flat())
    centers = theta_grid.cell_centers()[sel]
    gv = np.atleast_2d(fmap(centers))
    if gv.shape[1] != rho_y.dim:
        raise ValueError("map output dimension does not match the data grid")
    fib = rho_y.point_bins(gv)
    target = rho_y.cell_masses()
    counts = np.bincount(fib[fib >= 0], minlength=target.size).astype(float)
    return sel, fib, target, counts


def entropy_solution(fmap, theta_grid: GridMeasure, rho_y: GridMeasure) -> SolveReport:
    """Entropy-minimal density matching the data grid.

    Each data cell's mass is spread uniformly over the parameter cells whose
    image falls in it, which is simultaneously the discrete closed form
    data(G(x)) / fiber-volume evaluated at cell centers and the exact
    solution of the fiber-constrained entropy program.
    """
    sel, fib, target, counts = _fiber_partition(fmap, theta_grid, rho_y)
    missing = float(target[counts == 0].sum())
    if missing > 0.01:
        raise RangeMismatch(
            f"{missing:.3f} of the data mass lies outside the image of the grid"
        )
    vol = theta_grid.cell_volume
    h = float(np.max(rho_y.cell_widths))
    fiber_vol = counts * vol
    floor = _floor_volume(theta_grid, h)
    eff_vol = np.maximum(fiber_vol, floor)
    flagged_bins = (fiber_vol < floor) & (target > 0) & (counts > 0)

    dens = np.zeros(theta_grid.values.size)
    owned = fib >= 0
    dens[sel[owned]] = target[fib[owned]] / eff_vol[fib[owned]]
    vals = dens.reshape(theta_grid.shape)
    optimizer = normalize(
        GridMeasure(theta_grid.box, vals, theta_grid.mask, theta_grid.domain)
    )

    flags = np.zeros(theta_grid.values.size, dtype=bool)
    flags[sel[owned]] = flagged_bins[fib[owned]]
    push = pushforward_grid(fmap, optimizer, rho_y.box, rho_y.shape)
    residual = float(np.abs(push.cell_masses() - target).sum())
    diagnostics = {
        "floor_hits": float(flagged_bins.sum()),
        "missing_mass": missing,
        "constraint_residual_l1": residual,
        "n_fibers": float((counts > 0).sum()),
    }
    return SolveReport(
        optimizer,
        push,
        entropy(optimizer),
        "entropy",
        diagnostics,
        floor_flags=flags.reshape(theta_grid.shape),
    )


def reg_entropy_solution(
    fmap, theta_grid: GridMeasure, rho_y: GridMeasure, cfg: RegularizationConfig
) -> SolveReport:
    """Divergence-to-data plus divergence-to-prior reconstruction.

    Cell values follow prior(x) * (data(G(x)) / prior-weighted fiber
    mass)^(1/(1+alpha)), normalized at the end; the density-to-prior ratio is
    constant on every fiber. With alpha = 0 and a uniform prior this equals
    :func:`entropy_solution` cell for cell.
    """
    if cfg.prior is None:
        raise ValueError("reg_entropy_solution requires a prior in the config")
    _check_same_geometry(theta_grid, cfg.prior, "prior")
    sel, fib, target, counts = _fiber_partition(fmap, theta_grid, rho_y)
    missing = float(target[counts == 0].sum())
    if missing > 0.01:
        raise RangeMismatch(
            f"{missing:.3f} of the data mass lies outside the image of the grid"
        )
    vol = theta_grid.cell_volume
    prior_dens = cfg.prior.values.ravel()[sel]
    owned = fib >= 0
    weighted = np.bincount(
        fib[owned], weights=prior_dens[owned] * vol, minlength=target.size
    )
    starved = (target > 0) & (counts > 0) & (weighted <= 0)
    if np.any(starved):
        raise PriorVanishes(
            f"prior carries no mass on {int(starved.sum())} fibers that need it"
        )

    h = float(np.max(rho_y.cell_widths))
    fiber_vol = counts * vol
    floor = _floor_volume(theta_grid, h)
    flagged_bins = (fiber_vol < floor) & (target > 0) & (counts > 0)
    # Floor the geometric volume only, scaled by the fiber's mean prior
    # density, so a uniform prior reproduces the unregularized floors.
    with np.errstate(divide="ignore", invalid="ignore"):
        eff_weighted = np.where(
            fiber_vol > 0, weighted * np.maximum(1.0, floor / np.where(fiber_vol > 0, fiber_vol, 1.0)), 0.0
        )
        bracket = np.where(eff_weighted > 0, target / np.where(eff_weighted > 0, eff_weighted, 1.0), 0.0)

    dens = np.zeros(theta_grid.values.size)
    dens[sel[owned]] = prior_dens[owned] * bracket[fib[owned]] ** (1.0 / (1.0 + cfg.alpha))
    vals = dens.reshape(theta_grid.shape)
    optimizer = normalize(
        GridMeasure(theta_grid.box, vals, theta_grid.mask, theta_grid.domain)
    )

    flags = np.zeros(theta_grid.values.size, dtype=bool)
    flags[sel[owned]] = flagged_bins[fib[owned]]
    push = pushforward_grid(fmap, optimizer, rho_y.box, rho_y.shape)
    objective = phi_divergence(push, rho_y, kl()) + cfg.alpha * _kl_masses(
        optimizer.cell_masses(), cfg.prior.cell_masses()
    )
    diagnostics = {
        "floor_hits": float(flagged_bins.sum()),
        "missing_mass": missing,
        "n_fibers": float((counts > 0).sum()),
        "alpha": cfg.alpha,
    }
    return SolveReport(
        optimizer,
        push,
        float(objective),
        "reg-entropy",
        diagnostics,
        floor_flags=flags.reshape(theta_grid.shape),
    )


def _kl_masses(p, q):
    pos = p > 0
    if np.any(pos & (q <= 0)):
        return np.inf
    return float(np.sum(p[pos] * np.log(p[pos] / q[pos])))


# ---------------------------------------------------------------------------
# Underdetermined / regularized transport solvers
# ---------------------------------------------------------------------------


def moment_solution(fmap, rho_y: ParticleMeasure, **argmin_kwargs) -> SolveReport:
    """Second-moment-minimal feasible measure: least-norm map pushforward."""
    x = least_norm_map_batch(fmap, rho_y.points, **argmin_kwargs)
    optimizer = ParticleMeasure(x, rho_y.weights)
    push = ParticleMeasure(fmap(x), rho_y.weights)
    resid = np.linalg.norm(push.points - rho_y.points, axis=1)
    diagnostics = {"max_fiber_residual": float(resid.max() if resid.size else 0.0)}
    return SolveReport(optimizer, push, moment(optimizer, 2.0), "moment", diagnostics)


def reg_wp_solution(
    fmap, rho_y: ParticleMeasure, cfg: RegularizationConfig, **argmin_kwargs
) -> SolveReport:
    """Transport-matching with a p-th moment penalty: penalized-inversion
    pushforward of the data.

    The objective (transport cost of the pushforward to the data, plus alpha
    times the optimizer's p-th moment) is evaluated through the per-point
    coupling, which is optimal for the zero-padded augmented matching
    problem, so no transport program needs to be solved.
    """
    if cfg.alpha <= 0:
        raise ValueError("reg_wp_solution needs alpha > 0; use moment_solution at 0")
    x = reg_inversion_map_batch(fmap, rho_y.points, cfg, **argmin_kwargs)
    optimizer = ParticleMeasure(x, rho_y.weights)
    push = ParticleMeasure(fmap(x), rho_y.weights)
    fit = np.sum(
        rho_y.weights * np.linalg.norm(push.points - rho_y.points, axis=1) ** cfg.p
    )
    pen = moment(optimizer, cfg.p)
    diagnostics = {
        "transport_term": float(fit),
        "moment_term": float(pen),
        "alpha": cfg.alpha,
        "order_p": cfg.p,
    }
    return SolveReport(
        optimizer, push, float(fit + cfg.alpha * pen), "reg-wp", diagnostics
    )


def augmented_objective_identity_check(
    fmap, rho_x: ParticleMeasure, rho_y: ParticleMeasure, cfg: RegularizationConfig
):
    """Both sides of the augmented-matching identity, computed independently.

    Left: exact transport cost between the augmented map's image of rho_x and
    the zero-padded data. Right: exact transport cost for the plain matching
    plus alpha times rho_x's p-th moment. The augmented ground cost combines
    blocks as |du|^p + |dv|^p, which coincides with the Euclidean p-cost at
    p = 2. Returns (lhs, rhs).
    """
    alpha, p = cfg.alpha, cfg.p
    base_cost = cost_matrix(fmap(rho_x.points), rho_y.points, p)
    if alpha == 0:
        _, lhs = exact_ot(rho_x, rho_y, base_cost)
        return lhs, lhs
    gtil = augment(fmap, alpha, p)
    image = gtil(rho_x.points)
    zeros = np.zeros((rho_y.n_points, fmap.in_dim))
    aug_cost = cost_matrix(image[:, : fmap.out_dim], rho_y.points, p) + cost_matrix(
        image[:, fmap.out_dim :], zeros, p
    )
    _, lhs = exact_ot(rho_x, rho_y, aug_cost)
    _, fit = exact_ot(rho_x, rho_y, base_cost)
    rhs = fit + alpha * moment(rho_x, p)
    return float(lhs), float(rhs)


def tikhonov_bound(a, alpha: float, w2_noise: float, second_moment_true: float):
    """Reconstruction-error bounds for the linear penalized transport solver.

    Returns (bound_full, bound_simplified): the operator-norm bound
    |T| w2 + |T - pinv| sqrt(m2) with T = (A^T A + alpha I)^-1 A^T, and its
    singular-value relaxation with leading coefficient 1/(2 sqrt(alpha)).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if w2_noise < 0 or second_moment_true < 0:
        raise ValueError("noise level and moment must be nonnegative")
    a = np.atleast_2d(np.asarray(a, dtype=float))
    pinv = pseudoinverse(a)
    t = np.linalg.solve(a.T @ a + alpha * np.eye(a.shape[1]), a.T)
    op_t = float(np.linalg.svd(t, compute_uv=False)[0])
    op_gap = float(np.linalg.svd(t - pinv, compute_uv=False)[0])
    bound_full = op_t * w2_noise + op_gap * np.sqrt(second_moment_true)
    sigma_min = float(np.linalg.svd(a, compute_uv=False)[-1])
    bound_simplified = w2_noise / (2.0 * np.sqrt(alpha)) + (
        alpha / (sigma_min * (sigma_min**2 + alpha))
    ) * np.sqrt(second_moment_true)
    return float(bound_full), float(bound_simplified)
