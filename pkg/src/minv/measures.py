"""Measure representations and the operations shared by every solver.

Two concrete forms are supported:

* :class:`ParticleMeasure` — a weighted point cloud. Handles empirical data
  and singular objects (rings, point masses) exactly.
* :class:`GridMeasure` — a nonnegative density on a regular rectangular grid
  with an optional membership mask for non-box domains. All integrals use
  cell centers and midpoint quadrature, so grid operations are first-order
  consistent with each other.

Mixed singular/absolutely-continuous measures are only represented in
particle form; grid comparisons against singular references should be made
in transport metrics rather than cell-wise.
"""

import io
from dataclasses import dataclass, field

import numpy as np

from .domains import Box, Domain
from .errors import DimensionMismatch, RangeEscape, ZeroMass
from .util import fmt_float

_MASS_EPS = 1e-300


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParticleMeasure:
    """Weighted point cloud in R^d.

    Parameters
    ----------
    points : ndarray, shape (n, d)
        Support points.
    weights : ndarray, shape (n,)
        Nonnegative masses. A probability measure has total mass 1; use
        :func:`normalize` to rescale and :meth:`validate` to assert it.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if pts.shape[0] != w.shape[0]:
            raise ValueError("points and weights length mismatch")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(w)):
            raise ValueError("points and weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def total_mass(self) -> float:
        return float(self.weights.sum())

    def validate(self, atol: float = 1e-12) -> None:
        if abs(self.total_mass() - 1.0) > atol:
            raise ValueError(f"total mass {self.total_mass()} is not 1")

    def with_weights(self, weights) -> "ParticleMeasure":
        return ParticleMeasure(self.points, weights)


@dataclass(frozen=True)
class GridMeasure:
    """Density on a regular rectangular grid.

    Parameters
    ----------
    box : Box
        Bounding box of the grid.
    values : ndarray
        Density per cell (probability per unit volume), shape = per-axis
        cell counts. Must vanish on unmasked cells.
    mask : ndarray of bool, optional
        Cell membership in the domain (a cell belongs iff its center does).
        ``None`` means every cell belongs.
    domain : Domain, optional
        The domain the mask was built from, kept for provenance.
    """

    box: Box
    values: np.ndarray
    mask: np.ndarray | None = None
    domain: Domain | None = field(default=None, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != self.box.dim:
            raise ValueError("values ndim must match box dimension")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("densities must be finite and nonnegative")
        mask = self.mask
        if mask is not None:
            mask = np.asarray(mask, dtype=bool)
            if mask.shape != vals.shape:
                raise ValueError("mask shape must match values shape")
            if np.any(vals[~mask] != 0):
                raise ValueError("density must be zero on unmasked cells")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mask", mask)

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @property
    def dim(self) -> int:
        return self.box.dim

    @property
    def cell_widths(self) -> np.ndarray:
        return self.box.widths / np.asarray(self.shape)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.cell_widths))

    def axis_centers(self, axis: int) -> np.ndarray:
        lo, hi = self.box.lows[axis], self.box.highs[axis]
        k = self.shape[axis]
        return lo + (np.arange(k) + 0.5) * (hi - lo) / k

    def cell_centers(self) -> np.ndarray:
        """Centers of all cells, row-major, shape (prod(shape), dim)."""
        axes = [self.axis_centers(j) for j in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def mask_flat(self) -> np.ndarray:
        if self.mask is None:
            return np.ones(self.values.size, dtype=bool)
        return self.mask.ravel()

    def total_mass(self) -> float:
        return float(self.values.sum() * self.cell_volume)

    def cell_masses(self) -> np.ndarray:
        return self.values.ravel() * self.cell_volume

    def validate(self, atol: float = 1e-10) -> None:
        if abs(self.total_mass() - 1.0) > atol:
            raise ValueError(f"total mass {self.total_mass()} is not 1")

    def with_values(self, values) -> "GridMeasure":
        return GridMeasure(self.box, values, self.mask, self.domain)

    def point_bins(self, points: np.ndarray):
        """Flat cell index for each point; -1 where a point escapes the box.

        Points exactly on the upper face are clipped into the last cell.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise DimensionMismatch(
                f"points have dim {pts.shape[1]}, grid has dim {self.dim}"
            )
        lo = np.asarray(self.box.lows)
        w = self.cell_widths
        idx = np.floor((pts - lo) / w).astype(np.int64)
        shape = np.asarray(self.shape)
        hi_edge = np.isclose(pts, np.asarray(self.box.highs), rtol=0, atol=1e-12)
        idx = np.where(hi_edge & (idx >= shape), shape - 1, idx)
        inside = np.all((idx >= 0) & (idx < shape), axis=1)
        flat = np.full(pts.shape[0], -1, dtype=np.int64)
        if np.any(inside):
            flat[inside] = np.ravel_multi_index(
                tuple(idx[inside].T), self.shape, mode="raise"
            )
        return flat


def uniform_grid(domain: Domain, shape) -> GridMeasure:
    """Uniform probability density on the masked cells of a domain grid."""
    shape = tuple(int(k) for k in np.atleast_1d(shape))
    box = domain.bounding_box()
    gm = GridMeasure(box, np.zeros(shape))
    mask = domain.contains(gm.cell_centers()).reshape(shape)
    if not mask.any():
        raise ZeroMass("domain mask is empty at this resolution")
    vals = np.zeros(shape)
    vals[mask] = 1.0
    out = GridMeasure(box, vals, mask, domain)
    return normalize(out)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def normalize(m):
    """Rescale to total mass one, preserving proportions."""
    total = m.total_mass()
    if total <= _MASS_EPS:
        raise ZeroMass(f"cannot normalize measure with total mass {total}")
    if isinstance(m, ParticleMeasure):
        return m.with_weights(m.weights / total)
    return m.with_values(m.values / total)


def pushforward(forward_map, m: ParticleMeasure) -> ParticleMeasure:
    """Image of a particle measure under a map: move points, keep weights."""
    if m.dim != forward_map.in_dim:
        raise DimensionMismatch(
            f"measure dim {m.dim} != map input dim {forward_map.in_dim}"
        )
    return ParticleMeasure(forward_map(m.points), m.weights)


def pushforward_grid(
    forward_map,
    m: GridMeasure,
    out_box: Box,
    out_shape,
    escape_tol: float = 1e-9,
) -> GridMeasure:
    """Histogram image of a grid measure under a map.

    Each source cell's mass is deposited into the output cell containing the
    image of its center. Mass mapped outside the output box is clipped to the
    nearest boundary cell if it totals at most ``escape_tol``, otherwise
    :class:`RangeEscape` is raised.
    """
    out_shape = tuple(int(k) for k in np.atleast_1d(out_shape))
    sel = m.mask_flat() & (m.values.ravel() > 0)
    centers = m.cell_centers()[sel]
    masses = m.cell_masses()[sel]
    target = GridMeasure(out_box, np.zeros(out_shape))
    if centers.shape[0]:
        images = forward_map(centers)
        flat = target.point_bins(images)
        lost = float(masses[flat < 0].sum())
        if lost > escape_tol:
            raise RangeEscape(
                f"{lost:.3e} of pushforward mass maps outside the output box"
            )
        if np.any(flat < 0):
            lo = np.asarray(out_box.lows)
            w = target.cell_widths
            idx = np.floor((images - lo) / w).astype(np.int64)
            idx = np.clip(idx, 0, np.asarray(out_shape) - 1)
            flat = np.ravel_multi_index(tuple(idx.T), out_shape)
        acc = np.bincount(flat, weights=masses, minlength=int(np.prod(out_shape)))
    else:
        raise ZeroMass("grid measure has no mass to push forward")
    vals = acc.reshape(out_shape) / target.cell_volume
    return normalize(GridMeasure(out_box, vals))


def _indicator_mask(indicator, points: np.ndarray) -> np.ndarray:
    if hasattr(indicator, "contains"):
        return np.asarray(indicator.contains(points), dtype=bool)
    return np.asarray(indicator(points), dtype=bool)


def condition(m, indicator):
    """Restrict to a region and renormalize: out(B) = m(B & R) / m(R).

    The support is kept so conditioned and original measures stay directly
    comparable; weights/values outside the region become exactly zero.
    ``indicator`` is a Domain or a predicate over point batches. Region
    membership is closed: boundary points count as inside.
    """
    if isinstance(m, ParticleMeasure):
        inside = _indicator_mask(indicator, m.points)
        w = np.where(inside, m.weights, 0.0)
        total = w.sum()
        if total <= _MASS_EPS:
            raise ZeroMass("conditioning region carries no mass")
        return m.with_weights(w / total)
    inside = _indicator_mask(indicator, m.cell_centers()).reshape(m.shape)
    vals = np.where(inside, m.values, 0.0)
    total = vals.sum() * m.cell_volume
    if total <= _MASS_EPS:
        raise ZeroMass("conditioning region carries no mass")
    return m.with_values(vals / total)


def entropy(m: GridMeasure) -> float:
    """Differential entropy integral of the density, with 0*log(0) = 0."""
    v = m.values.ravel()[m.mask_flat()]
    pos = v > 0
    return float(np.sum(v[pos] * np.log(v[pos])) * m.cell_volume)


def moment(m, p: float) -> float:
    """p-th radial moment: the integral of |x|^p against the measure."""
    if p < 1:
        raise ValueError("moment order must be >= 1")
    if isinstance(m, ParticleMeasure):
        r = np.linalg.norm(m.points, axis=1)
        return float(np.sum(m.weights * r**p))
    r = np.linalg.norm(m.cell_centers(), axis=1)
    return float(np.sum(m.cell_masses() * r**p))


def grid_to_particles(m: GridMeasure) -> ParticleMeasure:
    """Masked cells as particles at cell centers carrying the cell masses."""
    sel = m.mask_flat()
    return ParticleMeasure(m.cell_centers()[sel], m.cell_masses()[sel])


def particles_to_grid(m: ParticleMeasure, box: Box, shape) -> GridMeasure:
    """Histogram a particle measure onto a grid (inverse of grid_to_particles
    when the points are cell centers)."""
    shape = tuple(int(k) for k in np.atleast_1d(shape))
    target = GridMeasure(box, np.zeros(shape))
    flat = target.point_bins(m.points)
    if np.any((flat < 0) & (m.weights > 0)):
        raise RangeEscape("particles with mass fall outside the grid box")
    acc = np.bincount(
        flat[flat >= 0],
        weights=m.weights[flat >= 0],
        minlength=int(np.prod(shape)),
    )
    return GridMeasure(box, acc.reshape(shape) / target.cell_volume)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def grid_to_text(m: GridMeasure) -> str:
    """Grid text format: one header line, then densities row-major."""
    shape = ",".join(str(k) for k in m.shape)
    box = ";".join(
        f"{fmt_float(lo)},{fmt_float(hi)}"
        for lo, hi in zip(m.box.lows, m.box.highs)
    )
    out = io.StringIO()
    out.write(f"grid d={m.dim} shape={shape} box={box}\n")
    for v in m.values.ravel():
        out.write(fmt_float(v) + "\n")
    return out.getvalue()


def grid_from_text(text: str) -> GridMeasure:
    lines = text.strip().splitlines()
    header = lines[0].split()
    if header[0] != "grid":
        raise ValueError("not a grid file: missing 'grid' header")
    fields = dict(part.split("=", 1) for part in header[1:])
    dim = int(fields["d"])
    shape = tuple(int(k) for k in fields["shape"].split(","))
    if len(shape) != dim:
        raise ValueError("grid header dimension mismatch")
    lows, highs = [], []
    for pair in fields["box"].split(";"):
        lo, hi = pair.split(",")
        lows.append(float(lo))
        highs.append(float(hi))
    values = np.array([float(s) for s in lines[1:]], dtype=float)
    if values.size != int(np.prod(shape)):
        raise ValueError("grid value count does not match shape")
    return GridMeasure(Box(tuple(lows), tuple(highs)), values.reshape(shape))


def particles_to_csv(m: ParticleMeasure) -> str:
    """CSV with header x1,...,xd,w and one particle per row."""
    cols = [f"x{j + 1}" for j in range(m.dim)] + ["w"]
    out = io.StringIO()
    out.write(",".join(cols) + "\n")
    for pt, w in zip(m.points, m.weights):
        out.write(",".join(fmt_float(v) for v in pt) + "," + fmt_float(w) + "\n")
    return out.getvalue()


def particles_from_csv(text: str) -> ParticleMeasure:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    header = [c.strip() for c in lines[0].split(",")]
    if header[-1] != "w" or not header[0].startswith("x"):
        raise ValueError("not a particle CSV: expected header x1,...,xd,w")
    rows = np.array(
        [[float(v) for v in ln.split(",")] for ln in lines[1:]], dtype=float
    )
    return ParticleMeasure(rows[:, :-1], rows[:, -1])
