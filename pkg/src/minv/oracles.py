"""Independent cross-check routines.

These are deliberately dumb and separate from the production solvers: a
permutation scan for transport, an iterative simplex optimizer for the
constrained entropy/KL problems, a dense argmin scan for pointwise maps, and
a dual-route Bessel evaluation. Derived expectations in the test suite come
from these, never from the code paths they certify.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from .domains import Domain
from .errors import NotConverged, TooLarge
from .measures import ParticleMeasure


# ---------------------------------------------------------------------------
# Constrained simplex optimization by mirror descent
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimplexProblem:
    """Fiber-constrained objective over cell masses.

    ``fiber_ids[i]`` is the data bin owning parameter cell i (every cell
    belongs to exactly one bin, the binary constraint matrix in vector form),
    ``target[b]`` the data mass bin b must receive. The objective is either
    ("entropy", volumes) — continuous entropy sum p log(p/vol) — or
    ("kl_to_prior", prior_masses, alpha).
    """

    fiber_ids: np.ndarray
    n_fibers: int
    target: np.ndarray
    objective: tuple

    def __post_init__(self):
        fid = np.asarray(self.fiber_ids, dtype=np.int64)
        t = np.asarray(self.target, dtype=float)
        object.__setattr__(self, "fiber_ids", fid)
        object.__setattr__(self, "target", t)
        if fid.min() < 0 or fid.max() >= self.n_fibers:
            raise ValueError("fiber ids out of range")
        if abs(t.sum() - 1.0) > 1e-9:
            raise ValueError("target masses must sum to 1")
        occupied = np.bincount(fid, minlength=self.n_fibers) > 0
        if np.any((t > 0) & ~occupied):
            raise ValueError("a bin with positive target has no cells")


def _fiber_rescale(p, fiber_ids, n_fibers, target):
    sums = np.bincount(fiber_ids, weights=p, minlength=n_fibers)
    factor = np.where(sums > 0, target / np.where(sums > 0, sums, 1.0), 0.0)
    return p * factor[fiber_ids]


def mirror_descent_simplex(
    prob: SimplexProblem,
    iters: int = 500,
    step: float = 0.5,
    seed: int = 0,
    tol: float = 1e-13,
) -> np.ndarray:
    """Multiplicative-update optimizer for a SimplexProblem.

    Iterates p <- p * exp(-step * grad) followed by the exact per-fiber mass
    rescale (the KL projection onto the constraint set), starting from a
    seeded random positive point so the fiber structure of the optimum is a
    genuine outcome, not the initialization.
    """
    fid, nb, t = prob.fiber_ids, prob.n_fibers, prob.target
    kind = prob.objective[0]
    if kind == "entropy":
        vols = np.asarray(prob.objective[1], dtype=float)
        ref = vols
        scale = 1.0
    elif kind == "kl_to_prior":
        ref = np.asarray(prob.objective[1], dtype=float)
        alpha = float(prob.objective[2])
        scale = max(alpha, 1e-12)
    else:
        raise ValueError(f"unknown objective {kind!r}")
    if np.any(ref <= 0):
        raise ValueError("reference masses/volumes must be positive")

    rng = np.random.default_rng(seed)
    p = ref * np.exp(rng.uniform(-0.5, 0.5, size=ref.shape))
    p = _fiber_rescale(p, fid, nb, t)
    eta = step / scale
    for _ in range(iters):
        live = p > 0
        grad = np.zeros_like(p)
        grad[live] = scale * (np.log(p[live] / ref[live]) + 1.0)
        new = p * np.exp(-eta * grad)
        new = _fiber_rescale(new, fid, nb, t)
        delta = float(np.max(np.abs(new - p)))
        p = new
        if delta < tol:
            break
    else:
        raise NotConverged(
            f"mirror descent change {delta:.2e} above {tol:.2e} after {iters} iterations",
            residual=delta,
        )
    return p


# ---------------------------------------------------------------------------
# Brute-force transport
# ---------------------------------------------------------------------------


def brute_force_ot(mu: ParticleMeasure, nu: ParticleMeasure, cost: np.ndarray):
    """Minimum over all permutation matchings of equal-weight measures.

    Only valid (and only accepted) for equal counts and uniform weights with
    n <= 7, where permutation matrices are the vertices of the coupling
    polytope; returns (plan, objective).
    """
    n = mu.n_points
    if n != nu.n_points or n > 7:
        raise TooLarge("brute force needs equal counts with n <= 7")
    w = 1.0 / n
    if np.max(np.abs(mu.weights - w)) > 1e-12 or np.max(np.abs(nu.weights - w)) > 1e-12:
        raise TooLarge("brute force needs uniform weights")
    best, best_perm = np.inf, None
    rows = np.arange(n)
    for perm in itertools.permutations(range(n)):
        val = cost[rows, perm].sum() * w
        if val < best:
            best, best_perm = val, perm
    plan = np.zeros((n, n))
    plan[rows, list(best_perm)] = w
    return plan, float(best)


# ---------------------------------------------------------------------------
# Dense argmin scan
# ---------------------------------------------------------------------------


def grid_argmin_oracle(objective, theta: Domain, resolution: int) -> np.ndarray:
    """Exhaustive minimizer over a dense grid of the domain.

    ``objective`` maps (n, d) point batches to (n,) values. Ties resolve to
    the lexicographically smallest grid point (row-major scan order). The
    result is within one grid cell of the true minimizer for continuous
    objectives, which bounds the suboptimality of any refined argmin it is
    checking.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2 per axis")
    box = theta.bounding_box()
    axes = [
        lo + (np.arange(resolution) + 0.5) * (hi - lo) / resolution
        for lo, hi in zip(box.lows, box.highs)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    inside = theta.contains(pts)
    pts = pts[inside]
    vals = np.asarray(objective(pts), dtype=float)
    return pts[int(np.argmin(vals))]


# ---------------------------------------------------------------------------
# Modified Bessel function of order zero, two independent routes
# ---------------------------------------------------------------------------


def bessel_i0(a: float) -> float:
    """Power series sum_k (a^2/4)^k / (k!)^2, summed to relative 1e-15."""
    if a < 0:
        raise ValueError("argument must be nonnegative")
    if a > 700:
        raise OverflowError("bessel_i0 overflows double precision above a = 700")
    x = a * a / 4.0
    term, total = 1.0, 1.0
    k = 1
    while True:
        term *= x / (k * k)
        total += term
        if term < 1e-15 * total:
            return total
        k += 1


def bessel_i0_quad(a: float, n: int = 512) -> float:
    """Trapezoid rule on the defining periodic integral (spectral accuracy)."""
    theta = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return float(np.mean(np.exp(a * np.cos(theta))))
