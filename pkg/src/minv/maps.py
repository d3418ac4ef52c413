"""Forward maps and the built-in families used by the fixtures and CLI.

A ForwardMap evaluates batches of points: input (n, in_dim) -> (n, out_dim).
Calling it with a single point returns a single image point.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domains import Ball, Box, Domain
from .errors import DimensionMismatch, RankDeficient

_RANK_RTOL = 1e-12


@dataclass(frozen=True)
class ForwardMap:
    """Evaluatable map G from a parameter domain into data space.

    ``theta`` is the parameter domain; ``None`` stands for all of R^in_dim
    (linear maps). ``kind`` tags the family so solvers can use closed forms
    where they exist; ``params`` carries family data (e.g. the matrix).
    """

    in_dim: int
    out_dim: int
    fn: Callable[[np.ndarray], np.ndarray]
    theta: Domain | None = None
    kind: str = "custom"
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1
        pts = arr.reshape(1, -1) if single else np.atleast_2d(arr)
        if pts.shape[1] != self.in_dim:
            raise DimensionMismatch(
                f"map expects dim {self.in_dim}, got {pts.shape[1]}"
            )
        out = np.atleast_2d(np.asarray(self.fn(pts), dtype=float))
        if out.shape != (pts.shape[0], self.out_dim):
            out = out.reshape(pts.shape[0], self.out_dim)
        return out[0] if single else out


def _check_full_rank(a: np.ndarray) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    sv = np.linalg.svd(a, compute_uv=False)
    if sv.size == 0 or sv[-1] <= _RANK_RTOL * sv[0]:
        raise RankDeficient(f"matrix of shape {a.shape} is rank deficient")
    return a


def linear_map(a, theta: Domain | None = None) -> ForwardMap:
    """G(x) = A x for a full-rank matrix A (checked by singular values)."""
    a = _check_full_rank(a)
    out_dim, in_dim = a.shape

    def fn(pts, _a=a):
        return pts @ _a.T

    return ForwardMap(in_dim, out_dim, fn, theta, kind="linear", params={"matrix": a})


def pseudoinverse(a) -> np.ndarray:
    """Left inverse (rows >= cols) or right inverse (cols > rows) of A."""
    a = _check_full_rank(a)
    n, m = a.shape
    if n >= m:
        return np.linalg.solve(a.T @ a, a.T)
    return a.T @ np.linalg.inv(a @ a.T)


def polar_map() -> ForwardMap:
    """(r, angle) -> (r cos angle, r sin angle) on [0,1] x [0,2pi].

    The image is the closed unit disc; the segment r = 0 collapses to the
    origin.
    """
    theta = Box((0.0, 0.0), (1.0, 2.0 * np.pi))

    def fn(pts):
        r, t = pts[:, 0], pts[:, 1]
        return np.stack([r * np.cos(t), r * np.sin(t)], axis=1)

    return ForwardMap(2, 2, fn, theta, kind="polar")


def offset_polar_map() -> ForwardMap:
    """x -> |x - (1,1)| on the closed unit ball around (1,1); image [0,1]."""
    theta = Ball((1.0, 1.0), 1.0)

    def fn(pts):
        d = pts - np.array([1.0, 1.0])
        return np.sqrt(np.sum(d * d, axis=1, keepdims=True))

    return ForwardMap(2, 1, fn, theta, kind="offset_polar")


def augment(base: ForwardMap, alpha: float, p: float) -> ForwardMap:
    """Stack the identity block under G: x -> (G(x), alpha^(1/p) x).

    Matching a zero-padded data measure with this map reproduces transport
    matching of G plus alpha times the p-th moment penalty.
    """
    if alpha <= 0:
        raise ValueError("augmentation weight alpha must be positive")
    if p < 1:
        raise ValueError("order p must be >= 1")
    scale = alpha ** (1.0 / p)

    def fn(pts, _base=base, _scale=scale):
        return np.concatenate([_base(pts), _scale * pts], axis=1)

    return ForwardMap(
        base.in_dim,
        base.out_dim + base.in_dim,
        fn,
        base.theta,
        kind="augmented",
        params={"base": base, "alpha": float(alpha), "p": float(p)},
    )


def expression_map(exprs, in_dim: int, theta: Domain | None = None) -> ForwardMap:
    """Compile component expressions in variables x1..x<in_dim> to a map.

    Expressions use sympy syntax (sin, cos, sqrt, exp, ...); evaluation is
    vectorized over point batches.
    """
    import sympy

    if isinstance(exprs, str):
        exprs = [part.strip() for part in exprs.split(",")]
    symbols = sympy.symbols(f"x1:{in_dim + 1}")
    parsed = [sympy.sympify(e, locals={str(s): s for s in symbols}) for e in exprs]
    funcs = [sympy.lambdify(symbols, e, modules="numpy") for e in parsed]

    def fn(pts):
        cols = [pts[:, j] for j in range(in_dim)]
        out = np.empty((pts.shape[0], len(funcs)))
        for k, f in enumerate(funcs):
            out[:, k] = np.broadcast_to(f(*cols), (pts.shape[0],))
        return out

    return ForwardMap(
        in_dim, len(funcs), fn, theta, kind="custom",
        params={"exprs": [str(e) for e in parsed]},
    )
