"""Functional and channel degrees of freedom.

Counts are relative-threshold counts over a spectrum: the number of values
at or above ``threshold * max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateSpectrumError, GeometryError, InvalidArgumentError, ResolutionError
from .geometry import Quadrature, Region, grid_per_halfwave, uniform_grid
from .kernels import KernelSpec, WaveParams, scalar_green_matrix
from .operators import SpectralResult, discretize, eig_hermitian, svd_operator

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True, eq=False)
class DofReport:
    count: int
    threshold: float
    spectrum: SpectralResult
    prediction: Optional[float] = None


def _count(values: np.ndarray, threshold: float) -> int:
    if not 0 < threshold < 1:
        raise InvalidArgumentError("threshold must lie in (0, 1)")
    values = np.asarray(values, dtype=float)
    if values.size == 0 or not np.max(values) > 0:
        raise DegenerateSpectrumError("spectrum has no positive value")
    return int(np.count_nonzero(values >= threshold * np.max(values)))


def functional_dof(spectrum: SpectralResult, threshold: float = DEFAULT_THRESHOLD,
                   prediction: Optional[float] = None) -> DofReport:
    return DofReport(_count(spectrum.values, threshold), threshold, spectrum, prediction)


def pswf_modes(T: float, W: float, grid_n: int = 512) -> SpectralResult:
    """Discrete prolate spheroidal modes of the time-truncated bandlimiting operator.

    The sinc kernel is discretized on [-T/2, T/2]; eigenvalues are the energy
    concentration ratios of the corresponding bandlimited functions. Mode
    vectors are orthonormal in weighted coordinates.
    """
    if not (T > 0 and W > 0):
        raise InvalidArgumentError("T and W must be > 0")
    if grid_n < 64:
        raise ResolutionError(f"grid_n must be >= 64, got {grid_n}")
    if grid_n < 2 * (2 * W * T):
        raise ResolutionError(f"grid_n={grid_n} is below twice the expected DoF 2WT={2 * W * T:g}")
    grid = uniform_grid(Region("interval", (T,), (-T / 2,)), grid_n)
    return eig_hermitian(discretize(KernelSpec.sinc_bandlimit(W), grid))


def spatial_bandwidth_bound(beta: float, a: float) -> float:
    """Upper bound sqrt(2) * beta * a on the spatial bandwidth of sources in a radius-a sphere."""
    if beta <= 0 or a < 0:
        raise InvalidArgumentError("beta must be > 0 and a >= 0")
    return math.sqrt(2.0) * beta * a


def paraxial_prediction(tx: Region, rx: Region, separation: float, wavelength: float) -> float:
    return tx.measure * rx.measure / (wavelength * separation) ** 2


def los_channel_dof(tx: Region, rx: Region, separation: float, wave: WaveParams,
                    points_per_halfwave: float = 4, threshold: float = DEFAULT_THRESHOLD,
                    dyadic: bool = False) -> DofReport:
    """DoF of the Green's operator between coaxial parallel apertures.

    The transmit aperture is centred at the origin in the z = 0 plane, the receive
    aperture at (0, 0, separation). Singular values sigma_n are the channel gains and
    are counted against ``threshold * sigma_0``.
    """
    if points_per_halfwave < 4:
        raise ResolutionError("need at least 4 points per half wavelength per axis")
    if tx.dim == 3 or rx.dim == 3:
        raise GeometryError("apertures must be intervals or rectangles")
    if separation <= 1e-3 * max(max(tx.extents), max(rx.extents)):
        raise GeometryError("apertures overlap; separation must be positive")
    tx_q = grid_per_halfwave(tx, wave.wavelength, points_per_halfwave)
    rx_q = grid_per_halfwave(rx, wave.wavelength, points_per_halfwave)
    # centre each aperture on the optical axis
    tx_pts = tx_q.embed(-_lift(tx.center))
    rx_pts = rx_q.embed(-_lift(rx.center) + np.array([0.0, 0.0, separation]))
    kernel = KernelSpec.dyadic_green(wave.k) if dyadic else KernelSpec.scalar_green(wave.k)
    op = discretize(kernel, Quadrature(rx_pts, rx_q.weights), Quadrature(tx_pts, tx_q.weights))
    spectrum = svd_operator(op)
    pred = paraxial_prediction(tx, rx, separation, wave.wavelength)
    return DofReport(_count(spectrum.values, threshold), threshold, spectrum, pred)


def _lift(v) -> np.ndarray:
    out = np.zeros(3)
    v = np.atleast_1d(v)
    out[: v.size] = v
    return out


@dataclass(frozen=True)
class VmfScatterers:
    mean_direction: tuple = (0.0, 1.0, 0.0)
    kappa: float = 1.0
    cluster_count: int = 1

    def __post_init__(self):
        mu = np.asarray(self.mean_direction, dtype=float)
        if mu.shape != (3,) or not np.isfinite(mu).all() or np.linalg.norm(mu) == 0:
            raise InvalidArgumentError("mean_direction must be a nonzero 3-vector")
        object.__setattr__(self, "mean_direction", tuple(mu / np.linalg.norm(mu)))
        if not self.kappa >= 0:
            raise InvalidArgumentError("kappa must be >= 0")
        if int(self.cluster_count) < 1:
            raise InvalidArgumentError("cluster_count must be >= 1")


def _tangent_basis(mu: np.ndarray) -> np.ndarray:
    # any vector not parallel to mu seeds the basis
    seed = np.eye(3)[np.argmin(np.abs(mu))]
    e1 = np.cross(mu, seed)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(mu, e1)
    return np.stack([e1, e2])


def _sample_cosines(kappa: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Cosine to the mean direction by Wood's rejection scheme on the 2-sphere."""
    dim = 2.0  # sphere S^2 sits in R^3
    b = dim / (math.sqrt(4.0 * kappa**2 + dim**2) + 2.0 * kappa)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + dim * math.log(1.0 - x0**2)
    out = np.empty(n)
    filled = 0
    while filled < n:
        m = n - filled
        z = rng.beta(dim / 2, dim / 2, size=m)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.uniform(size=m)
        ok = kappa * w + dim * np.log1p(-x0 * w) - c >= np.log(u)
        take = w[ok]
        out[filled:filled + take.size] = take
        filled += take.size
    return np.clip(out, -1.0, 1.0)


def vmf_sample(scatterers: VmfScatterers, n: int, seed=0) -> np.ndarray:
    """i.i.d. unit vectors from vMF(mean_direction, kappa), shape (n, 3).

    ``kappa = inf`` returns the mean direction itself.
    """
    if n < 1:
        raise InvalidArgumentError("n must be >= 1")
    mu = np.asarray(scatterers.mean_direction)
    if math.isinf(scatterers.kappa):
        return np.tile(mu, (n, 1))
    rng = np.random.default_rng(seed)
    w = _sample_cosines(scatterers.kappa, n, rng)
    phi = rng.uniform(0.0, 2 * math.pi, size=n)
    e1, e2 = _tangent_basis(mu)
    s = np.sqrt(np.clip(1.0 - w**2, 0.0, None))
    v = w[:, None] * mu + s[:, None] * (np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2)
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def vmf_mean_resultant_length(kappa: float) -> float:
    """E[<x, mu>] = coth(kappa) - 1/kappa for the 3-D vMF law."""
    if kappa == 0:
        return 0.0
    if kappa < 1e-4:
        return kappa / 3.0
    return 1.0 / math.tanh(kappa) - 1.0 / kappa


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    """Per-trial stream keyed by (seed, trial), independent of worker layout."""
    return np.random.SeedSequence([int(seed), int(trial)])


def nlos_trial_dof(scatterers: VmfScatterers, tx_points, tx_weights, rx_points, rx_weights,
                   k: float, radius: float, rx_center, threshold: float, seed) -> int:
    dirs = vmf_sample(scatterers, scatterers.cluster_count, seed)
    positions = np.asarray(rx_center) + radius * dirs
    # two hops with unit scatterer gains
    A = np.sqrt(rx_weights)[:, None] * scalar_green_matrix(k, rx_points, positions)
    B = scalar_green_matrix(k, positions, tx_points) * np.sqrt(tx_weights)[None, :]
    s = np.linalg.svd(A @ B, compute_uv=False)
    return _count(s, threshold)


def nlos_dof_mc(scatterers: VmfScatterers, tx: Region, rx: Region, wave: WaveParams,
                trials: int = 100, threshold: float = DEFAULT_THRESHOLD, seed: int = 0,
                separation: Optional[float] = None, radius: Optional[float] = None,
                points_per_halfwave: float = 2, return_counts: bool = False):
    """Expected DoF of a two-hop scattering channel averaged over vMF scatterer draws.

    Tx is centred at the origin, rx at (0, 0, separation) (default 20 wavelengths).
    Scatterers sit at distance ``radius`` (default 10 wavelengths) from the rx centre
    along directions drawn from the vMF law.
    """
    if trials < 1:
        raise InvalidArgumentError("trials must be >= 1")
    lam = wave.wavelength
    separation = 20 * lam if separation is None else separation
    radius = 10 * lam if radius is None else radius
    tx_q = grid_per_halfwave(tx, lam, points_per_halfwave)
    rx_q = grid_per_halfwave(rx, lam, points_per_halfwave)
    rx_center = np.array([0.0, 0.0, separation])
    tx_pts = tx_q.embed(-_lift(tx.center))
    rx_pts = rx_q.embed(-_lift(rx.center) + rx_center)
    counts = np.array([
        nlos_trial_dof(scatterers, tx_pts, tx_q.weights, rx_pts, rx_q.weights, wave.k,
                       radius, rx_center, threshold, trial_seed(seed, t))
        for t in range(trials)])
    mean = float(np.mean(counts))
    return (mean, counts) if return_counts else mean


def slepian_mode_correlation(tx_length: float, rx_length: float, separation: float,
                             wave: WaveParams, n_modes: int, points_per_halfwave: float = 4
                             ) -> np.ndarray:
    """|<tx singular mode, PSWF>| for the leading modes of a coaxial line-segment link.

    Under the paraxial approximation the tx-side singular functions, once the
    quadratic phase exp(+j k x^2 / 2D) is removed, are the prolate functions of
    duration ``tx_length`` and bandwidth ``rx_length / (2 lambda D)``.
    """
    lam = wave.wavelength
    tx = Region.centered("interval", tx_length)
    rx = Region.centered("interval", rx_length)
    tx_q = grid_per_halfwave(tx, lam, points_per_halfwave)
    rx_q = grid_per_halfwave(rx, lam, points_per_halfwave)
    tx_pts = tx_q.embed()
    rx_pts = rx_q.embed((0.0, 0.0, separation))
    op = discretize(KernelSpec.scalar_green(wave.k),
                    Quadrature(rx_pts, rx_q.weights), Quadrature(tx_pts, tx_q.weights))
    modes = svd_operator(op).right_modes[:, :n_modes]
    x = tx_q.points[:, 0]
    modes = modes * np.exp(-1j * wave.k * x**2 / (2 * separation))[:, None]
    W = rx_length / (2 * lam * separation)
    prolates = eig_hermitian(discretize(KernelSpec.sinc_bandlimit(W), tx_q)).left_modes[:, :n_modes]
    return np.abs(np.sum(np.conj(modes) * prolates, axis=0))
