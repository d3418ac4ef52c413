"""phi-divergences on a shared discrete support, and the attainable lower
bound for measures constrained to a sub-region.

A divergence kind is the convex function phi with phi(1) = 0 plus its two
boundary behaviors: the value phi(0) (mass present in Q but absent in P) and
the slope at infinity lim phi(t)/t (mass present in P where Q vanishes).
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InfiniteBound, SupportMismatch
from .measures import GridMeasure, ParticleMeasure


@dataclass(frozen=True)
class PhiKind:
    name: str
    phi: Callable[[np.ndarray], np.ndarray]
    phi_zero: float
    slope_inf: float

    def __post_init__(self):
        v = float(self.phi(np.asarray([1.0]))[0])
        if abs(v) > 1e-12:
            raise ValueError(f"phi(1) must be 0, got {v}")


def kl() -> PhiKind:
    # phi(t) = t log t, continuously extended by phi(0) = 0.
    def phi(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = t[pos] * np.log(t[pos])
        return out

    return PhiKind("kl", phi, 0.0, np.inf)


def chi_squared() -> PhiKind:
    return PhiKind("chi2", lambda t: (np.asarray(t, dtype=float) - 1.0) ** 2, 1.0, np.inf)


def total_variation() -> PhiKind:
    # Normalized so that disjoint supports give exactly 1.
    return PhiKind("tv", lambda t: 0.5 * np.abs(np.asarray(t, dtype=float) - 1.0), 0.5, 0.5)


def custom_phi(phi, phi_zero: float, slope_inf: float = np.inf, name: str = "custom") -> PhiKind:
    return PhiKind(name, phi, float(phi_zero), slope_inf)


_KINDS = {"kl": kl, "chi2": chi_squared, "tv": total_variation}


def phi_kind(name: str) -> PhiKind:
    try:
        return _KINDS[name]()
    except KeyError:
        raise ValueError(f"unknown divergence kind {name!r}") from None


def _common_masses(p_measure, q_measure):
    if isinstance(p_measure, ParticleMeasure) and isinstance(q_measure, ParticleMeasure):
        if p_measure.points.shape != q_measure.points.shape or not np.array_equal(
            p_measure.points, q_measure.points
        ):
            raise SupportMismatch("particle measures live on different point sets")
        return p_measure.weights, q_measure.weights
    if isinstance(p_measure, GridMeasure) and isinstance(q_measure, GridMeasure):
        if p_measure.box != q_measure.box or p_measure.shape != q_measure.shape:
            raise SupportMismatch("grid measures live on different grids")
        return p_measure.cell_masses(), q_measure.cell_masses()
    raise SupportMismatch("measures must share a representation and support")


def phi_divergence(p_measure, q_measure, kind: PhiKind) -> float:
    """Divergence sum of phi(p_i/q_i) q_i over the common support.

    P-mass on cells where Q vanishes contributes at the divergence's slope at
    infinity: +inf for KL and chi-squared, a saturating 1/2 per unit mass for
    total variation (so fully disjoint supports score exactly 1).
    """
    p, q = _common_masses(p_measure, q_measure)
    pos = q > 0
    total = float(np.sum(q[pos] * kind.phi(p[pos] / q[pos])))
    escaped = float(np.sum(p[~pos]))
    if escaped > 0:
        if not np.isfinite(kind.slope_inf):
            return np.inf
        total += escaped * kind.slope_inf
    return total


def jensen_lower_bound(kind: PhiKind, nu1: float) -> float:
    """Smallest divergence to Q achievable by measures supported where Q has
    mass fraction ``nu1``.

    Equals nu1 * phi(1/nu1) + (1 - nu1) * phi(0) and is attained by the
    conditional of Q on the region, which makes it an optimality certificate
    for conditioning-type reconstructions.
    """
    if not 0 < nu1 <= 1 + 1e-12:
        raise ValueError(f"region mass fraction must be in (0, 1], got {nu1}")
    nu1 = min(float(nu1), 1.0)
    if nu1 == 1.0:
        return 0.0
    if not np.isfinite(kind.phi_zero):
        raise InfiniteBound(
            "phi(0) is infinite and the region misses mass: the bound is +inf"
        )
    inside = nu1 * float(kind.phi(np.asarray([1.0 / nu1]))[0])
    return inside + (1.0 - nu1) * kind.phi_zero
