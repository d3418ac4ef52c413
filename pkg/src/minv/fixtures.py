"""Worked problem instances with explicit solutions, for regression tests,
validation, and figure data.

Each fixture bundles a forward map, data in particle and/or grid form, and
the closed-form answers the solvers must reproduce. Ring components are laid
out at equiangular points so projections have exact analytic images and
equality-style checks carry no sampling noise.
"""

from dataclasses import dataclass, field

import numpy as np

from .domains import Ball, Box, Domain
from .errors import UnsupportedData
from .maps import ForwardMap, linear_map, offset_polar_map, polar_map
from .measures import GridMeasure, ParticleMeasure, normalize, uniform_grid
from .oracles import bessel_i0
from .solvers import RegularizationConfig
from .util import named_rng

DEFAULT_SEED = 20240601
_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class Fixture:
    """A (map, data, analytic answers) bundle under a stable CLI name."""

    name: str
    forward_map: ForwardMap
    data_particles: ParticleMeasure | None = None
    data_grid: GridMeasure | None = None
    range_indicator: Domain | None = None
    theta_grid: GridMeasure | None = None
    mu_r: GridMeasure | None = None
    reg: RegularizationConfig | None = None
    analytic: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Overdetermined polar disc + outer ring
# ---------------------------------------------------------------------------


def polar_overdetermined(
    n_samples: int = 4096,
    grid_shape=(200, 200),
    seed: int = DEFAULT_SEED,
) -> Fixture:
    """Half the data uniform on the unit disc (in range), half on a radius-2
    ring (outside). Conditioning keeps the disc at density 1/pi; projection
    sends the ring to the unit circle."""
    fmap = polar_map()
    n_disc = n_samples // 2
    n_ring = n_samples - n_disc
    rng = named_rng(seed, "polar-over:disc")
    r = np.sqrt(rng.uniform(0.0, 1.0, n_disc))
    th = rng.uniform(0.0, 2.0 * np.pi, n_disc)
    disc = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    ang = 2.0 * np.pi * (np.arange(n_ring) + 0.5) / n_ring
    ring = 2.0 * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    particles = ParticleMeasure(
        np.concatenate([disc, ring]), np.full(n_samples, 1.0 / n_samples)
    )

    box = Box((-2.5, -2.5), (2.5, 2.5))
    shape = tuple(int(k) for k in np.atleast_1d(grid_shape))
    carrier = GridMeasure(box, np.zeros(shape))
    centers = carrier.cell_centers()
    inside = (np.sum(centers**2, axis=1) < 1.0).reshape(shape)
    vals = np.zeros(shape)
    vals[inside] = 0.5 / (inside.sum() * carrier.cell_volume)
    # The ring's half of the mass lands in the cells an equiangular sweep
    # hits; only its total matters to conditioning and divergences.
    n_dep = 16384
    sweep = 2.0 * np.pi * (np.arange(n_dep) + 0.5) / n_dep
    ring_pts = 2.0 * np.stack([np.cos(sweep), np.sin(sweep)], axis=1)
    flat = carrier.point_bins(ring_pts)
    acc = np.bincount(flat, minlength=vals.size).astype(float)
    vals += (0.5 / n_dep) * acc.reshape(shape) / carrier.cell_volume
    grid = GridMeasure(box, vals)

    return Fixture(
        name="polar-over",
        forward_map=fmap,
        data_particles=particles,
        data_grid=grid,
        range_indicator=Ball((0.0, 0.0), 1.0),
        analytic={
            "conditional_density": 1.0 / np.pi,
            "range_mass": 0.5,
            "projected_radius": 1.0,
            "kl_objective": np.log(2.0),
        },
        tolerances={"conditional_l1": 0.02, "objective": 1e-3, "projection": 1e-9},
    )


# ---------------------------------------------------------------------------
# Underdetermined offset-radius map on a shifted ball
# ---------------------------------------------------------------------------


def _uniform_mu_r(n_bins: int) -> GridMeasure:
    return GridMeasure(Box((0.0,), (1.0,)), np.ones(n_bins))


def _mu_r_density(mu_r: GridMeasure):
    def dens(r):
        r = np.asarray(r, dtype=float).reshape(-1, 1)
        flat = mu_r.point_bins(r)
        out = np.zeros(r.shape[0])
        ok = flat >= 0
        out[ok] = mu_r.values.ravel()[flat[ok]]
        return out

    return dens


def offset_polar_underdetermined(
    mu_r: GridMeasure | None = None,
    n_samples: int = 2048,
    theta_shape=(200, 200),
    n_r_bins: int = 100,
) -> Fixture:
    """Radial data on [0,1] under x -> |x - (1,1)| on the unit ball at (1,1).

    Fibers are circles around (1,1); the entropy answer spreads each radius
    bin uniformly over its ring (density mu(r) / (2 pi r)), the least-norm
    answer collapses each ring to its point nearest the origin, on the
    diagonal."""
    if mu_r is None:
        mu_r = normalize(_uniform_mu_r(n_r_bins))
    if mu_r.dim != 1 or mu_r.box.lows[0] < -1e-12 or mu_r.box.highs[0] > 1 + 1e-12:
        raise UnsupportedData("radial data must live on [0, 1]")
    fmap = offset_polar_map()
    theta_grid = uniform_grid(fmap.theta, theta_shape)

    # Stratified radial atoms make the particle data deterministic.
    cdf = np.cumsum(mu_r.cell_masses())
    targets = (np.arange(n_samples) + 0.5) / n_samples
    edges = mu_r.box.lows[0] + np.arange(mu_r.shape[0] + 1) * mu_r.cell_widths[0]
    idx = np.searchsorted(cdf, targets, side="left")
    prev = np.concatenate([[0.0], cdf])[idx]
    frac = (targets - prev) / np.maximum(cdf[idx] - prev, 1e-300)
    radii = edges[idx] + frac * mu_r.cell_widths[0]
    particles = ParticleMeasure(radii.reshape(-1, 1), np.full(n_samples, 1.0 / n_samples))

    mu_dens = _mu_r_density(mu_r)

    def entropy_density(points):
        pts = np.atleast_2d(points)
        r = np.linalg.norm(pts - np.array([1.0, 1.0]), axis=1)
        with np.errstate(divide="ignore"):
            out = mu_dens(r) / (2.0 * np.pi * r)
        return np.where(r > 0, out, np.inf)

    def least_norm(r):
        r = np.asarray(r, dtype=float)
        coord = 1.0 - r / _SQRT2
        return np.stack([coord, coord], axis=-1)

    def reg_w2_map(r, alpha):
        r = np.asarray(r, dtype=float)
        coord = (1.0 - (_SQRT2 / 2.0) * r) / (1.0 + alpha)
        return np.stack([coord, coord], axis=-1)

    return Fixture(
        name="offset-polar-under",
        forward_map=fmap,
        data_particles=particles,
        theta_grid=theta_grid,
        mu_r=mu_r,
        analytic={
            "entropy_density": entropy_density,
            "least_norm": least_norm,
            "reg_w2_map": reg_w2_map,
        },
        tolerances={"entropy_l1": 0.05, "map": 2e-3},
    )


def gaussian_prior_on_ball(theta_grid: GridMeasure) -> GridMeasure:
    """exp(-|x|^2 / 2) restricted to the masked cells and renormalized."""
    centers = theta_grid.cell_centers()
    vals = np.exp(-0.5 * np.sum(centers**2, axis=1)).reshape(theta_grid.shape)
    vals = np.where(
        theta_grid.mask if theta_grid.mask is not None else True, vals, 0.0
    )
    return normalize(GridMeasure(theta_grid.box, vals, theta_grid.mask, theta_grid.domain))


def offset_polar_reg_kl(
    alpha: float = 1.0,
    theta_shape=(200, 200),
    n_r_bins: int = 100,
    n_samples: int = 2048,
) -> Fixture:
    """Offset-polar data with a centered Gaussian prior and divergence
    regularization; the optimizer has an explicit form through the
    order-zero modified Bessel function."""
    base = offset_polar_underdetermined(
        n_samples=n_samples, theta_shape=theta_shape, n_r_bins=n_r_bins
    )
    prior = gaussian_prior_on_ball(base.theta_grid)
    mu_dens = _mu_r_density(base.mu_r)
    i0 = np.vectorize(bessel_i0)

    def reg_kl_density(points, alpha_=alpha):
        pts = np.atleast_2d(points)
        r = np.linalg.norm(pts - np.array([1.0, 1.0]), axis=1)
        ringmass = 2.0 * np.pi * r * np.exp(-0.5 * (2.0 + r**2)) * i0(_SQRT2 * r)
        with np.errstate(divide="ignore", invalid="ignore"):
            bracket = np.where(ringmass > 0, mu_dens(r) / np.where(ringmass > 0, ringmass, 1.0), np.inf)
        gauss = np.exp(-0.5 * np.sum(pts**2, axis=1))
        return gauss * bracket ** (1.0 / (1.0 + alpha_))

    return Fixture(
        name="offset-polar-reg-kl",
        forward_map=base.forward_map,
        data_particles=base.data_particles,
        theta_grid=base.theta_grid,
        mu_r=base.mu_r,
        reg=RegularizationConfig(alpha=alpha, p=2.0, prior=prior),
        analytic={**base.analytic, "reg_kl_density": reg_kl_density},
        tolerances={"reg_kl_l1": 0.05, "alpha_zero_cellwise": 1e-8},
    )


def offset_polar_reg_w2(
    alpha: float = 1.0, n_samples: int = 2048, n_r_bins: int = 100
) -> Fixture:
    """Offset-polar data with moment-penalized transport matching; the
    penalized inversion map contracts the diagonal by 1/(1+alpha)."""
    base = offset_polar_underdetermined(n_samples=n_samples, n_r_bins=n_r_bins)
    return Fixture(
        name="offset-polar-reg-w2",
        forward_map=base.forward_map,
        data_particles=base.data_particles,
        theta_grid=base.theta_grid,
        mu_r=base.mu_r,
        reg=RegularizationConfig(alpha=alpha, p=2.0),
        analytic=base.analytic,
        tolerances={"map": 2e-3},
    )


# ---------------------------------------------------------------------------
# Linear maps
# ---------------------------------------------------------------------------


def linear_fixture(
    a=None,
    regime: str = "over",
    data: ParticleMeasure | None = None,
    alpha: float = 1.0,
    n_samples: int = 512,
    seed: int = DEFAULT_SEED,
) -> Fixture:
    """Full-rank linear map with pseudoinverse / ridge-inverse answers.

    regime "over": tall A, data scattered off the range (embedding default).
    regime "under": wide A, data always in range.
    """
    from .maps import pseudoinverse

    if a is None:
        a = {
            "over": np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]),
            "under": np.array([[1.0, 1.0]]),
            "reg": np.array([[2.0, 0.0], [0.0, 1.0], [1.0, 1.0]]),
        }[regime]
    a = np.atleast_2d(np.asarray(a, dtype=float))
    fmap = linear_map(a)
    if data is None:
        rng = named_rng(seed, f"linear-{regime}:data")
        pts = rng.standard_normal((n_samples, a.shape[0]))
        data = ParticleMeasure(pts, np.full(n_samples, 1.0 / n_samples))
    pinv = pseudoinverse(a)
    ridge = np.linalg.solve(a.T @ a + alpha * np.eye(a.shape[1]), a.T)
    return Fixture(
        name=f"linear-{regime}",
        forward_map=fmap,
        data_particles=data,
        reg=RegularizationConfig(alpha=alpha, p=2.0) if regime == "reg" else None,
        analytic={"pinv": pinv, "ridge": ridge, "matrix": a},
        tolerances={"samplewise": 1e-10},
    )


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

FIXTURE_NAMES = (
    "polar-over",
    "offset-polar-under",
    "linear-over",
    "linear-under",
    "linear-reg",
    "offset-polar-reg-kl",
    "offset-polar-reg-w2",
)


def build_fixture(name: str, **kwargs) -> Fixture:
    """Construct a fixture by its stable CLI name."""
    builders = {
        "polar-over": polar_overdetermined,
        "offset-polar-under": offset_polar_underdetermined,
        "offset-polar-reg-kl": offset_polar_reg_kl,
        "offset-polar-reg-w2": offset_polar_reg_w2,
        "linear-over": lambda **kw: linear_fixture(regime="over", **kw),
        "linear-under": lambda **kw: linear_fixture(regime="under", **kw),
        "linear-reg": lambda **kw: linear_fixture(regime="reg", **kw),
    }
    if name not in builders:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURE_NAMES)}")
    return builders[name](**kwargs)
