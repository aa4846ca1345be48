"""Sample grids with quadrature weights over intervals, rectangles and boxes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError

_DIMS = {"interval": 1, "rectangle": 2, "box": 3}


@dataclass(frozen=True)
class Region:
    """Axis-aligned region spanning ``origin + [0, extent]`` along each axis."""

    kind: str
    extents: tuple[float, ...]
    origin: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in _DIMS:
            raise InvalidArgumentError(f"unknown region kind {self.kind!r}")
        extents = tuple(float(e) for e in np.atleast_1d(self.extents))
        if len(extents) != _DIMS[self.kind]:
            raise InvalidArgumentError(
                f"{self.kind} needs {_DIMS[self.kind]} extents, got {len(extents)}")
        if not all(e > 0 and math.isfinite(e) for e in extents):
            raise InvalidArgumentError("all extents must be > 0")
        origin = (0.0,) * len(extents) if self.origin is None else tuple(
            float(o) for o in np.atleast_1d(self.origin))
        if len(origin) != len(extents):
            raise InvalidArgumentError("origin dimension does not match region")
        object.__setattr__(self, "extents", extents)
        object.__setattr__(self, "origin", origin)

    @classmethod
    def centered(cls, kind: str, extents) -> "Region":
        ext = np.atleast_1d(np.asarray(extents, dtype=float))
        return cls(kind, tuple(ext), tuple(-ext / 2))

    @property
    def dim(self) -> int:
        return len(self.extents)

    @property
    def measure(self) -> float:
        return math.prod(self.extents)

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.origin) + np.asarray(self.extents) / 2

    def contains(self, points: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        lo = np.asarray(self.origin)
        hi = lo + np.asarray(self.extents)
        pts = np.atleast_2d(points)
        slack = tol * np.maximum(1.0, np.abs(hi))
        return np.all((pts >= lo - slack) & (pts <= hi + slack), axis=1)


def interval(length: float, origin: float | None = None) -> Region:
    return Region("interval", (length,), None if origin is None else (origin,))


def rectangle(lx: float, ly: float, origin=None) -> Region:
    return Region("rectangle", (lx, ly), origin)


def box(lx: float, ly: float, lz: float, origin=None) -> Region:
    return Region("box", (lx, ly, lz), origin)


@dataclass(frozen=True, eq=False)
class Quadrature:
    """Sample points (n, d) with positive weights summing to the region measure."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if points.shape[0] != weights.shape[0]:
            raise InvalidArgumentError("points and weights differ in length")
        if not np.all(weights > 0):
            raise InvalidArgumentError("quadrature weights must be positive")
        points.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def total_weight(self) -> float:
        return float(math.fsum(self.weights))

    def embed(self, offset=(0.0, 0.0, 0.0)) -> np.ndarray:
        """Points lifted into 3-space (missing axes set to zero), then shifted."""
        return lift3d(self.points) + np.asarray(offset, dtype=float)


def lift3d(points: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] > 3:
        raise InvalidArgumentError("points have more than 3 coordinates")
    out = np.zeros((pts.shape[0], 3))
    out[:, : pts.shape[1]] = pts
    return out


def uniform_grid(region: Region, counts: int | Sequence[int]) -> Quadrature:
    """Midpoint-rule tensor grid; every point carries the cell measure as weight.

    Points are ordered lexicographically with the last axis varying fastest.
    """
    counts = np.broadcast_to(np.atleast_1d(counts), (region.dim,))
    if np.any(np.asarray(counts) != np.floor(counts)) or np.any(np.asarray(counts) < 1):
        raise InvalidArgumentError(f"grid counts must be positive integers, got {list(counts)}")
    counts = [int(c) for c in counts]
    axes = []
    for lo, ext, n in zip(region.origin, region.extents, counts):
        axes.append(lo + (np.arange(n) + 0.5) * (ext / n))
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.reshape(-1) for m in mesh], axis=1)
    cell = math.prod(ext / n for ext, n in zip(region.extents, counts))
    return Quadrature(points, np.full(points.shape[0], cell))


def halfwavelength_count(region: Region, wavelength: float) -> int:
    """Number of lambda/2-spaced grid points covering the region, endpoints included."""
    if not wavelength > 0:
        raise InvalidArgumentError("wavelength must be > 0")
    total = 1
    for ext in region.extents:
        steps = 2.0 * ext / wavelength
        # absorb rounding in e.g. 2*0.02/0.01
        total *= int(math.floor(steps * (1 + 1e-12))) + 1
    return total


def grid_per_halfwave(region: Region, wavelength: float, points_per_halfwave: float) -> Quadrature:
    """Uniform grid with at least ``points_per_halfwave`` samples per lambda/2 per axis."""
    counts = [max(1, math.ceil(points_per_halfwave * 2.0 * ext / wavelength - 1e-9))
              for ext in region.extents]
    return uniform_grid(region, counts)
