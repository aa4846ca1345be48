"""Two-point kernels: sinc bandlimiter, free-space Green's functions, noise correlations.

Time-harmonic convention is exp(+j w t); the outgoing Green's function is
exp(-j k R) / (4 pi R).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgumentError, SingularityError, UnsupportedOperationError

KINDS = ("sinc_bandlimit", "scalar_green", "dyadic_green", "noise_white", "noise_sinc",
         "custom_autocorrelation")


@dataclass(frozen=True)
class WaveParams:
    wavelength: float

    def __post_init__(self):
        if not self.wavelength > 0:
            raise InvalidArgumentError("wavelength must be > 0")

    @classmethod
    def from_wavenumber(cls, k: float) -> "WaveParams":
        return cls(2 * math.pi / k)

    @property
    def k(self) -> float:
        return 2 * math.pi / self.wavelength

    beta = k


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus its parameters. Use the classmethod constructors."""

    kind: str
    W: Optional[float] = None
    k: Optional[float] = None
    n0_half: Optional[float] = None
    variance: Optional[float] = None
    func: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown kernel kind {self.kind!r}")
        required = {
            "sinc_bandlimit": ("W",),
            "scalar_green": ("k",),
            "dyadic_green": ("k",),
            "noise_white": ("n0_half",),
            "noise_sinc": ("k", "variance"),
            "custom_autocorrelation": (),
        }[self.kind]
        for name in required:
            value = getattr(self, name)
            if value is None or not value > 0:
                raise InvalidArgumentError(f"{name} must be > 0")
        if self.kind == "noise_sinc" and self.n0_half is not None and self.n0_half < 0:
            raise InvalidArgumentError("n0_half must be >= 0")
        if self.kind == "custom_autocorrelation" and self.func is None:
            raise InvalidArgumentError("custom kernel needs a callable")

    @classmethod
    def sinc_bandlimit(cls, W):
        return cls("sinc_bandlimit", W=W)

    @classmethod
    def scalar_green(cls, k):
        return cls("scalar_green", k=k)

    @classmethod
    def dyadic_green(cls, k):
        return cls("dyadic_green", k=k)

    @classmethod
    def noise_white(cls, n0_half):
        return cls("noise_white", n0_half=n0_half)

    @classmethod
    def noise_sinc(cls, k, variance, n0_half=None):
        """Correlated noise variance*sinc(kD); ``n0_half`` adds a white floor of that density."""
        return cls("noise_sinc", k=k, variance=variance, n0_half=n0_half)

    @classmethod
    def custom(cls, func):
        """``func(x, y)`` receives point arrays (n, d), (m, d) and returns (n, m)."""
        return cls("custom_autocorrelation", func=func)

    @property
    def output_rank(self) -> int:
        return 3 if self.kind == "dyadic_green" else 1

    @property
    def is_green(self) -> bool:
        return self.kind in ("scalar_green", "dyadic_green")

    def matrix(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Unweighted kernel values on all point pairs; dyadic kernels give (3n, 3m)."""
        if self.kind == "sinc_bandlimit":
            return sinc_matrix(self.W, x, y)
        if self.kind == "scalar_green":
            return scalar_green_matrix(self.k, x, y)
        if self.kind == "dyadic_green":
            return dyadic_green_matrix(self.k, x, y)
        if self.kind == "noise_sinc":
            return self.variance * np.sinc(self.k * _distances(x, y) / math.pi)
        if self.kind == "custom_autocorrelation":
            return np.asarray(self.func(_as_points(x), _as_points(y)))
        raise UnsupportedOperationError(
            "white noise has no pointwise value; discretize it instead")


def _as_points(x) -> np.ndarray:
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return pts


def _separations(x, y) -> np.ndarray:
    x, y = _as_points(x), _as_points(y)
    if x.shape[1] != y.shape[1]:
        raise InvalidArgumentError("point sets differ in dimension")
    return x[:, None, :] - y[None, :, :]


def _distances(x, y) -> np.ndarray:
    return np.linalg.norm(_separations(x, y), axis=-1)


def sinc_kernel(W: float, t: float, t_prime: float) -> float:
    """sin(2 pi W (t - t')) / (pi (t - t')), equal to 2W on the diagonal."""
    if not W > 0:
        raise InvalidArgumentError("W must be > 0")
    return float(2 * W * np.sinc(2 * W * (t - t_prime)))


def sinc_matrix(W: float, t, s) -> np.ndarray:
    t = np.asarray(t, dtype=float).reshape(-1)
    s = np.asarray(s, dtype=float).reshape(-1)
    return 2 * W * np.sinc(2 * W * (t[:, None] - s[None, :]))


def scalar_green(k: float, r, s) -> complex:
    R = float(np.linalg.norm(np.asarray(r, dtype=float) - np.asarray(s, dtype=float)))
    if R == 0.0:
        raise SingularityError("Green's function evaluated at coincident points")
    return complex(np.exp(-1j * k * R) / (4 * math.pi * R))


def scalar_green_matrix(k: float, x, y) -> np.ndarray:
    R = _distances(x, y)
    if np.any(R == 0.0):
        raise SingularityError("Green's function evaluated at coincident points")
    return np.exp(-1j * k * R) / (4 * math.pi * R)


def _dyadic_blocks(k: float, sep: np.ndarray) -> np.ndarray:
    R = np.linalg.norm(sep, axis=-1)
    if np.any(R == 0.0):
        raise SingularityError("Green's function evaluated at coincident points")
    g = np.exp(-1j * k * R) / (4 * math.pi * R)
    x = k * R
    a = 1 - 1j / x - 1 / x**2
    b = -1 + 3j / x + 3 / x**2
    rhat = sep / R[..., None]
    outer = rhat[..., :, None] * rhat[..., None, :]
    return g[..., None, None] * (a[..., None, None] * np.eye(3) + b[..., None, None] * outer)


def dyadic_green(k: float, r, s) -> np.ndarray:
    """3x3 dyadic Green's function (I + grad grad / k^2) g."""
    sep = np.asarray(r, dtype=float) - np.asarray(s, dtype=float)
    if sep.shape != (3,):
        raise InvalidArgumentError("dyadic Green's function needs 3-D points")
    return _dyadic_blocks(k, sep[None])[0]


def dyadic_green_matrix(k: float, x, y) -> np.ndarray:
    """Polarization-blocked (3n, 3m) matrix; polarization index varies fastest."""
    sep = _separations(x, y)
    if sep.shape[-1] != 3:
        raise InvalidArgumentError("dyadic Green's function needs 3-D points")
    blocks = _dyadic_blocks(k, sep)  # (n, m, 3, 3)
    n, m = blocks.shape[:2]
    return blocks.transpose(0, 2, 1, 3).reshape(3 * n, 3 * m)


def noise_kernel(model: KernelSpec, r, r_prime) -> float:
    if model.kind == "noise_white":
        raise UnsupportedOperationError(
            "white noise is distributional; it only exists after discretization")
    if model.kind != "noise_sinc":
        raise InvalidArgumentError(f"{model.kind} is not a noise model")
    D = float(np.linalg.norm(np.atleast_1d(np.asarray(r, dtype=float) - np.asarray(r_prime, dtype=float))))
    return float(model.variance * np.sinc(model.k * D / math.pi))
