"""Far-field and near-field steering vectors of a uniform linear array, LDMA sweeps.

The array lies on the x axis centred at the origin. A user at polar position
(r, theta) sits at (-r sin(theta), r cos(theta)): theta is measured from
broadside, and this orientation makes the exact spherical-wave vector tend to
the far-field vector exp(-j k x_n sin(theta)) as r grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import GeometryError, InvalidArgumentError


@dataclass(frozen=True)
class UniformLinearArray:
    n_elements: int
    spacing: float

    def __post_init__(self):
        if int(self.n_elements) < 1:
            raise InvalidArgumentError("n_elements must be >= 1")
        if not self.spacing > 0:
            raise InvalidArgumentError("spacing must be > 0")

    @classmethod
    def half_wavelength(cls, n_elements: int, wavelength: float) -> "UniformLinearArray":
        return cls(n_elements, wavelength / 2)

    @property
    def positions(self) -> np.ndarray:
        n = np.arange(self.n_elements)
        return (n - (self.n_elements - 1) / 2) * self.spacing

    @property
    def aperture(self) -> float:
        return (self.n_elements - 1) * self.spacing

    def rayleigh_distance(self, wavelength: float) -> float:
        return 2 * self.aperture**2 / wavelength


def user_position(r: float, theta: float) -> np.ndarray:
    return np.array([-r * math.sin(theta), r * math.cos(theta)])


def farfield_steering(array: UniformLinearArray, k: float, theta: float) -> np.ndarray:
    if not abs(theta) < math.pi / 2:
        raise InvalidArgumentError("|theta| must be < pi/2")
    x = array.positions
    return np.exp(-1j * k * x * math.sin(theta)) / math.sqrt(array.n_elements)


def nearfield_steering(array: UniformLinearArray, k: float, user, fresnel: bool = False
                       ) -> np.ndarray:
    """Spherical-wave steering toward ``user = (r, theta)``.

    With ``fresnel=True`` the distance is replaced by its second-order expansion
    r + x sin(theta) + x^2 cos^2(theta) / (2 r).
    """
    r, theta = float(user[0]), float(user[1])
    if not r > 0:
        raise InvalidArgumentError("user distance must be > 0")
    x = array.positions
    if fresnel:
        dist = r + x * math.sin(theta) + x**2 * math.cos(theta) ** 2 / (2 * r)
    else:
        p = user_position(r, theta)
        dist = np.hypot(p[0] - x, p[1])
    if np.any(dist <= 1e-9 * array.spacing):
        raise GeometryError("user coincides with an array element")
    return np.exp(-1j * k * dist) / math.sqrt(array.n_elements)


def beam_correlation(v1, v2) -> float:
    """|v1^H v2| / (||v1|| ||v2||)."""
    a = np.asarray(v1).reshape(-1)
    b = np.asarray(v2).reshape(-1)
    if a.shape != b.shape:
        raise InvalidArgumentError("vectors differ in length")
    na2, nb2 = np.vdot(a, a).real, np.vdot(b, b).real
    if na2 == 0 or nb2 == 0:
        raise InvalidArgumentError("zero vector has no direction")
    # sqrt of the product keeps corr(v, v) exactly 1
    return float(min(1.0, abs(np.vdot(a, b)) / math.sqrt(na2 * nb2)))


@dataclass(frozen=True)
class LdmaCurve:
    sizes: tuple
    correlations: tuple
    farfield_correlations: tuple
    inside_rayleigh: tuple


def ldma_sweep(sizes: Sequence[int], k: float, theta: float, r1: float, r2: float,
               spacing: Optional[float] = None) -> LdmaCurve:
    """Correlation between near-field beams toward (r1, theta) and (r2, theta) versus array size.

    ``inside_rayleigh`` flags whether both users lie within 2 D^2 / lambda for that size.
    """
    wavelength = 2 * math.pi / k
    spacing = wavelength / 2 if spacing is None else spacing
    corr, far, inside = [], [], []
    for n in sizes:
        array = UniformLinearArray(int(n), spacing)
        corr.append(beam_correlation(nearfield_steering(array, k, (r1, theta)),
                                     nearfield_steering(array, k, (r2, theta))))
        ff = farfield_steering(array, k, theta)
        far.append(beam_correlation(ff, ff))
        inside.append(max(r1, r2) <= array.rayleigh_distance(wavelength))
    return LdmaCurve(tuple(int(n) for n in sizes), tuple(corr), tuple(far), tuple(inside))
