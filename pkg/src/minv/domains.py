"""Parameter domains: boxes, balls, and their intersections.

A domain answers membership queries for batches of points and exposes a
bounding box, which is all the grid builders and argmin searches need.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Box:
    lows: tuple
    highs: tuple

    def __post_init__(self):
        lows = tuple(float(v) for v in np.atleast_1d(self.lows))
        highs = tuple(float(v) for v in np.atleast_1d(self.highs))
        object.__setattr__(self, "lows", lows)
        object.__setattr__(self, "highs", highs)
        if len(lows) != len(highs):
            raise ValueError("box bounds must have equal length")
        if not all(lo < hi for lo, hi in zip(lows, highs)):
            raise ValueError("box bounds must be strictly ordered per axis")

    @property
    def dim(self) -> int:
        return len(self.lows)

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.highs) - np.asarray(self.lows)

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        lo = np.asarray(self.lows)
        hi = np.asarray(self.highs)
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def bounding_box(self) -> "Box":
        return self


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        center = tuple(float(v) for v in np.atleast_1d(self.center))
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    def contains(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d2 = np.sum((pts - np.asarray(self.center)) ** 2, axis=1)
        return d2 <= self.radius**2

    def bounding_box(self) -> Box:
        c = np.asarray(self.center)
        return Box(tuple(c - self.radius), tuple(c + self.radius))


@dataclass(frozen=True)
class Intersection:
    box: Box
    ball: Ball

    def __post_init__(self):
        if self.box.dim != self.ball.dim:
            raise ValueError("box and ball must share a dimension")

    @property
    def dim(self) -> int:
        return self.box.dim

    def contains(self, points) -> np.ndarray:
        return self.box.contains(points) & self.ball.contains(points)

    def bounding_box(self) -> Box:
        bb = self.ball.bounding_box()
        lo = np.maximum(self.box.lows, bb.lows)
        hi = np.minimum(self.box.highs, bb.highs)
        return Box(tuple(lo), tuple(hi))


# Any of the three kinds; all expose dim, contains, bounding_box.
Domain = Box | Ball | Intersection
