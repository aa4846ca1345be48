"""Mutual information of discrete MIMO and continuous (Fredholm) Gaussian channels.

All information quantities are in bits.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg

from .errors import (IllConditionedNoiseError, InvalidArgumentError, NoChannelError,
                     ResolutionWarning, SizeError)
from .geometry import Quadrature, Region, halfwavelength_count, uniform_grid
from .kernels import KernelSpec, WaveParams, scalar_green_matrix
from .operators import LOG2, DiscretizedOperator, discretize, fredholm_logdet

MAX_SAMPLES = 4096


@dataclass(frozen=True, eq=False)
class GaussianSignalModel:
    """Gaussian source through a linear channel, observed in Gaussian noise.

    ``source_autocorrelation`` is either a kernel or the covariance sampled at the
    tx quadrature points (unweighted); it is scaled by ``power_budget``. ``channel``
    is a kernel discretized from ``tx_quadrature`` onto the receive grid, or an
    already discretized operator whose rows are the receive grid.
    """

    source_autocorrelation: Union[KernelSpec, np.ndarray]
    channel: Union[KernelSpec, DiscretizedOperator]
    noise: Union[KernelSpec, np.ndarray]
    tx_quadrature: Optional[Quadrature] = None
    power_budget: float = 1.0

    def __post_init__(self):
        if not self.power_budget > 0:
            raise InvalidArgumentError("power budget must be > 0")
        if self.tx_quadrature is None:
            if not isinstance(self.channel, DiscretizedOperator) or self.channel.col_quadrature is None:
                raise InvalidArgumentError("tx_quadrature is required")
            object.__setattr__(self, "tx_quadrature", self.channel.col_quadrature)

    def source_covariance(self) -> np.ndarray:
        """Source covariance in weighted tx coordinates, power included."""
        q = self.tx_quadrature
        if isinstance(self.source_autocorrelation, KernelSpec):
            return self.power_budget * discretize(self.source_autocorrelation, q).matrix
        R = np.asarray(self.source_autocorrelation)
        sw = np.sqrt(q.weights)
        if R.shape != (len(q), len(q)):
            raise InvalidArgumentError("source covariance does not match tx quadrature")
        return self.power_budget * (sw[:, None] * R * sw[None, :])

    def channel_matrix(self, rx: Quadrature) -> np.ndarray:
        if isinstance(self.channel, DiscretizedOperator):
            if self.channel.row_quadrature is not None and self.channel.row_quadrature is not rx:
                if not np.array_equal(self.channel.row_quadrature.points, rx.points):
                    raise InvalidArgumentError("channel rows do not match the receive grid")
            return self.channel.matrix
        return discretize(self.channel, rx, self.tx_quadrature).matrix

    def noise_operator(self, rx: Quadrature) -> np.ndarray:
        if isinstance(self.noise, KernelSpec):
            return discretize(self.noise, rx).matrix
        return np.asarray(self.noise)


@dataclass(frozen=True)
class ConvergenceCurve:
    sample_counts: tuple
    mi_values: tuple
    reference_mi: float = float("nan")

    def __post_init__(self):
        if len(self.sample_counts) != len(self.mi_values):
            raise InvalidArgumentError("curve lists differ in length")
        if any(b <= a for a, b in zip(self.sample_counts, self.sample_counts[1:])):
            raise InvalidArgumentError("sample counts must be strictly increasing")


def mimo_mi(H, Rx, Rn) -> float:
    """log2 det(I + Rn^-1/2 H Rx H^H Rn^-1/2) via a Cholesky whitening of the noise."""
    H = np.atleast_2d(np.asarray(H))
    Rx = np.atleast_2d(np.asarray(Rx))
    Rn = np.atleast_2d(np.asarray(Rn))
    if Rx.shape != (H.shape[1], H.shape[1]) or Rn.shape != (H.shape[0], H.shape[0]):
        raise InvalidArgumentError(
            f"inconsistent shapes H{H.shape}, Rx{Rx.shape}, Rn{Rn.shape}")
    try:
        L = linalg.cholesky((Rn + Rn.conj().T) / 2, lower=True)
    except linalg.LinAlgError as exc:
        raise IllConditionedNoiseError("noise covariance is not positive definite") from exc
    diag = np.abs(np.diag(L)) ** 2
    if diag.min() <= 1e-12 * diag.max():
        raise IllConditionedNoiseError("noise covariance is numerically singular")
    X = linalg.solve_triangular(L, H, lower=True)
    M = X @ Rx @ X.conj().T
    mu = np.linalg.eigvalsh((M + M.conj().T) / 2)
    return float(np.sum(np.log1p(np.maximum(mu, 0.0))) / LOG2)


def _wavenumber(kernel) -> Optional[float]:
    return kernel.k if isinstance(kernel, KernelSpec) and kernel.k is not None else None


def _check_resolution(rx: Quadrature, k: float, min_per_halfwave: float = 2.0) -> bool:
    lam = 2 * math.pi / k
    pts = rx.points
    for axis in range(pts.shape[1]):
        coords = np.unique(np.round(pts[:, axis], 12))
        if coords.size < 2:
            continue
        step = np.max(np.diff(coords))
        if step > lam / (2 * min_per_halfwave) * (1 + 1e-9):
            return False
    return True


def eit_mi(model: GaussianSignalModel, rx_quadrature: Quadrature) -> float:
    """Fredholm mutual information of the received field on ``rx_quadrature``.

    Emits a ``ResolutionWarning`` if the grid has fewer than two points per
    half wavelength along some axis.
    """
    k = _wavenumber(model.channel) if isinstance(model.channel, KernelSpec) else None
    if k is not None and len(rx_quadrature) > 1 and not _check_resolution(rx_quadrature, k):
        warnings.warn("receive grid under-resolves the field (< 2 points per half wavelength)",
                      ResolutionWarning, stacklevel=2)
    T = model.channel_matrix(rx_quadrature)
    T_E = T @ model.source_covariance() @ T.conj().T
    T_N = model.noise_operator(rx_quadrature)
    return fredholm_logdet((T_E + T_E.conj().T) / 2, T_N)


def waterfill(gains: Sequence[float], noise_powers: Union[float, Sequence[float]], P: float):
    """Water-filling over parallel Gaussian subchannels.

    Returns ``(allocation, capacity_bits)`` with p_n = max(0, mu - nu_n / sigma_n^2)
    and sum(p_n) = P.
    """
    g = np.asarray(gains, dtype=float).reshape(-1)
    nu = np.broadcast_to(np.asarray(noise_powers, dtype=float), g.shape).astype(float)
    if not P > 0:
        raise InvalidArgumentError("power budget must be > 0")
    if np.any(g < 0) or np.any(nu <= 0):
        raise InvalidArgumentError("gains must be >= 0 and noise powers > 0")
    if not np.any(g > 0):
        raise NoChannelError("all channel gains are zero")
    floor = np.full(g.shape, np.inf)
    live = g**2 > 0
    floor[live] = nu[live] / g[live] ** 2
    order = np.argsort(floor, kind="stable")
    sorted_floor = floor[order]
    n_live = int(np.count_nonzero(live))
    m = n_live
    for m in range(n_live, 0, -1):
        level = (P + math.fsum(sorted_floor[:m])) / m
        if level > sorted_floor[m - 1]:
            break
    active = order[:m]
    f = floor[active]
    # p_i = (P + sum_j (f_j - f_i)) / m avoids cancellation in level - f_i when P << f_i
    alloc = np.zeros(g.shape)
    alloc[active] = (P + (f.sum() - m * f)) / m
    alloc[active] = np.maximum(alloc[active], 0.0)
    capacity = float(np.sum(np.log1p(np.where(live, g**2 * alloc / nu, 0.0))) / LOG2)
    return alloc, capacity


def eigenmode_capacity(channel, noise, P: float):
    """Water-filling capacity over the noise-whitened singular modes of a channel."""
    A = channel.matrix if isinstance(channel, DiscretizedOperator) else np.asarray(channel)
    N = noise.matrix if isinstance(noise, DiscretizedOperator) else np.asarray(noise)
    L = linalg.cholesky((N + N.conj().T) / 2, lower=True)
    s = np.linalg.svd(linalg.solve_triangular(L, A, lower=True), compute_uv=False)
    return waterfill(s, 1.0, P)


# ---------------------------------------------------------------------------
# experiments


def _doubling_sweep(first: int, last: int) -> tuple:
    out = []
    n = first
    while n <= last:
        out.append(n)
        n *= 2
    return tuple(out)


@dataclass(frozen=True)
class ConvergenceSetup:
    """Line-segment scenario: parallel tx and rx segments along x, offset along z.

    Lengths are in wavelengths. Noise on the receive segment is the sinc-correlated
    kernel plus a continuum white floor of density ``white_floor * variance * lambda/2``;
    the correlated variance is set so that the SNR at the rx centre is ``snr_db``.
    """

    wavelength: float = 1.0
    tx_length: float = 2.0
    rx_length: float = 4.0
    separation: float = 16.0
    snr_db: float = 10.0
    power: float = 1.0
    white_floor: float = 0.1
    sweep: tuple = _doubling_sweep(2, 512)
    reference_factor: int = 8
    tx_points_per_halfwave: int = 8

    def __post_init__(self):
        for name in ("wavelength", "tx_length", "rx_length", "separation", "power", "white_floor"):
            if not getattr(self, name) > 0:
                raise InvalidArgumentError(f"{name} must be > 0")
        sweep = tuple(int(n) for n in self.sweep)
        if not sweep or min(sweep) < 1:
            raise InvalidArgumentError("sweep must hold positive sample counts")
        if max(sweep) > MAX_SAMPLES:
            raise SizeError(f"sweep exceeds the {MAX_SAMPLES}-sample cap")
        object.__setattr__(self, "sweep", tuple(sorted(set(sweep))))
        if self.reference_factor < 1:
            raise InvalidArgumentError("reference_factor must be >= 1")


class _Scenario:
    """Discretized tx side plus the noise statistics shared across a sweep."""

    def __init__(self, cfg: ConvergenceSetup):
        lam = cfg.wavelength
        self.cfg = cfg
        self.k = 2 * math.pi / lam
        tx_len = cfg.tx_length * lam
        self.rx_len = cfg.rx_length * lam
        self.rx_region = Region.centered("interval", self.rx_len)
        tx_region = Region.centered("interval", tx_len)
        n_tx = cfg.tx_points_per_halfwave * halfwavelength_count(tx_region, lam)
        tx1 = uniform_grid(tx_region, n_tx)
        self.tx = Quadrature(tx1.embed(), tx1.weights)
        self.tx_pts = self.tx.points
        self.z = cfg.separation * lam
        self.source_kernel = KernelSpec.noise_sinc(self.k, 1.0)
        self.Rx = cfg.power * discretize(self.source_kernel, self.tx).matrix
        center = np.array([[0.0, 0.0, self.z]])
        h0 = scalar_green_matrix(self.k, center, self.tx_pts) * np.sqrt(self.tx.weights)
        signal_at_center = float(np.real(h0 @ self.Rx @ h0.conj().T)[0, 0])
        self.variance = signal_at_center / 10 ** (cfg.snr_db / 10)
        self.n0_half = cfg.white_floor * self.variance * lam / 2

    def rx_grid(self, n: int) -> Quadrature:
        return uniform_grid(self.rx_region, n)

    def antenna_channel(self, rx: Quadrature) -> np.ndarray:
        """Point-sampled field map: row i is the field at antenna i per weighted tx mode."""
        pts = rx.embed((0.0, 0.0, self.z))
        return scalar_green_matrix(self.k, pts, self.tx_pts) * np.sqrt(self.tx.weights)

    def correlated_noise(self, rx: Quadrature) -> np.ndarray:
        pts = rx.embed()
        D = np.linalg.norm(pts[:, None] - pts[None], axis=-1)
        # continuum white floor seen by an antenna of cell size w
        return self.variance * np.sinc(self.k * D / math.pi) + np.diag(self.n0_half / rx.weights)

    def white_noise(self, rx: Quadrature) -> np.ndarray:
        """Per-antenna variance fixed at the single-antenna value of the correlated model."""
        return (self.variance + self.n0_half / self.rx_len) * np.eye(len(rx))

    def model(self) -> GaussianSignalModel:
        noise = KernelSpec.noise_sinc(self.k, self.variance, self.n0_half)
        channel = KernelSpec.scalar_green(self.k)
        return GaussianSignalModel(self.source_kernel, channel, noise, self.tx, self.cfg.power)

    def reference_mi(self) -> float:
        n_ref = self.cfg.reference_factor * halfwavelength_count(self.rx_region, self.cfg.wavelength)
        if n_ref > MAX_SAMPLES:
            raise SizeError(f"reference grid of {n_ref} points exceeds the {MAX_SAMPLES} cap")
        rx = _shifted(self.rx_grid(n_ref), self.z)
        return eit_mi(self.model(), rx)


def _shifted(q: Quadrature, z: float) -> Quadrature:
    return Quadrature(q.embed((0.0, 0.0, z)), q.weights)


def mi_convergence_experiment(cfg: Optional[ConvergenceSetup] = None) -> ConvergenceCurve:
    """Discrete MIMO MI with N point antennas on the rx segment versus the dense Fredholm value."""
    cfg = cfg or ConvergenceSetup()
    sc = _Scenario(cfg)
    values = []
    for n in cfg.sweep:
        rx = sc.rx_grid(n)
        values.append(mimo_mi(sc.antenna_channel(rx), sc.Rx, sc.correlated_noise(rx)))
    return ConvergenceCurve(cfg.sweep, tuple(values), sc.reference_mi())


def noise_divergence_experiment(cfg: Optional[ConvergenceSetup] = None):
    """MI versus antenna count under fixed per-antenna white noise and under correlated noise.

    Returns ``(white_curve, correlated_curve)``.
    """
    cfg = cfg or ConvergenceSetup(sweep=_doubling_sweep(1, 128))
    sc = _Scenario(cfg)
    white, corr = [], []
    for n in cfg.sweep:
        rx = sc.rx_grid(n)
        H = sc.antenna_channel(rx)
        white.append(mimo_mi(H, sc.Rx, sc.white_noise(rx)))
        corr.append(mimo_mi(H, sc.Rx, sc.correlated_noise(rx)))
    ref = sc.reference_mi()
    return (ConvergenceCurve(cfg.sweep, tuple(white)),
            ConvergenceCurve(cfg.sweep, tuple(corr), ref))
