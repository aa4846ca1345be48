"""Fourier plane-wave Gaussian random fields on the k0-sphere."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .geometry import Quadrature, lift3d


@dataclass(frozen=True, eq=False)
class PlanewaveField:
    grid: Quadrature
    values: np.ndarray
    k0: float
    n_waves: int
    seed: int

    def __post_init__(self):
        if self.values.shape != (len(self.grid),):
            raise InvalidArgumentError("one field value per grid point is required")
        if not np.all(np.isfinite(self.values)):
            raise InvalidArgumentError("field values must be finite")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def draw_waves(k0: float, n_waves: int, rng: np.random.Generator):
    """Wavevectors uniform on the sphere of radius k0 and unit-variance circular amplitudes."""
    dirs = rng.standard_normal((n_waves, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    amps = (rng.standard_normal(n_waves) + 1j * rng.standard_normal(n_waves)) / math.sqrt(2)
    return k0 * dirs, amps


def superpose(points: np.ndarray, wavevectors: np.ndarray, amplitudes: np.ndarray) -> np.ndarray:
    phase = lift3d(points) @ wavevectors.T
    return np.exp(1j * phase) @ amplitudes / math.sqrt(len(amplitudes))


def sample_planewave_field(grid: Quadrature, k0: float, n_waves: int, seed=0) -> PlanewaveField:
    """h(r) = M^-1/2 sum_m a_m exp(j kappa_m . r) with isotropic kappa_m on the k0-sphere."""
    if n_waves < 1:
        raise InvalidArgumentError("n_waves must be >= 1")
    if not k0 > 0:
        raise InvalidArgumentError("k0 must be > 0")
    kv, amps = draw_waves(k0, n_waves, _rng(seed))
    return PlanewaveField(grid, superpose(grid.points, kv, amps), k0, n_waves, seed)


def sample_ensemble(points, k0: float, n_waves: int, realizations: int, seed=0) -> np.ndarray:
    """Independent realizations, shape (realizations, n_points).

    Realization i draws from the stream keyed by (seed, i), so any subset or
    reordering of realizations reproduces the same values.
    """
    out = np.empty((realizations, len(np.atleast_2d(points))), dtype=complex)
    for i in range(realizations):
        kv, amps = draw_waves(k0, n_waves, _rng([int(seed), i]))
        out[i] = superpose(points, kv, amps)
    return out


def isotropic_correlation(k0: float, distance) -> np.ndarray:
    """sin(k0 D) / (k0 D), the autocorrelation of an isotropic field on the k0-sphere."""
    return np.sinc(k0 * np.asarray(distance, dtype=float) / math.pi)


def _lattice_shape(points: np.ndarray, spacing: float):
    pts = lift3d(points)
    shape = []
    for axis in range(3):
        coords = np.unique(np.round(pts[:, axis] / spacing, 6))
        if coords.size > 1 and not np.allclose(np.diff(coords), 1.0, atol=1e-6):
            raise InvalidArgumentError("grid is not a uniform lattice with the given spacing")
        shape.append(coords.size)
    if math.prod(shape) != pts.shape[0]:
        raise InvalidArgumentError("grid is not a complete tensor lattice")
    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0]))
    if any(s < 3 for s in shape):
        raise InvalidArgumentError("lattice needs at least 3 points per axis")
    return tuple(shape), order


def helmholtz_residual(field: PlanewaveField, spacing: float) -> float:
    """||lap h + k0^2 h|| / ||k0^2 h|| on interior points, 7-point finite-difference Laplacian."""
    if not spacing > 0:
        raise InvalidArgumentError("spacing must be > 0")
    if spacing > (2 * math.pi / field.k0) / 8 * (1 + 1e-9):
        raise InvalidArgumentError("spacing must not exceed lambda/8")
    shape, order = _lattice_shape(field.grid.points, spacing)
    h = field.values[order].reshape(shape)
    c = h[1:-1, 1:-1, 1:-1]
    lap = (h[2:, 1:-1, 1:-1] + h[:-2, 1:-1, 1:-1]
           + h[1:-1, 2:, 1:-1] + h[1:-1, :-2, 1:-1]
           + h[1:-1, 1:-1, 2:] + h[1:-1, 1:-1, :-2] - 6 * c) / spacing**2
    k2 = field.k0**2
    return float(np.linalg.norm(lap + k2 * c) / np.linalg.norm(k2 * c))
