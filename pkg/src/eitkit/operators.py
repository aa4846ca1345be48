"""Nystrom discretization, spectral decompositions and Fredholm log-determinants.

Operators live in symmetric-weighted coordinates, A_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j),
so L2 inner products of sampled functions become plain dot products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import IllConditionedNoiseError, InvalidArgumentError
from .geometry import Quadrature
from .kernels import KernelSpec

LOG2 = math.log(2.0)


@dataclass(frozen=True, eq=False)
class DiscretizedOperator:
    matrix: np.ndarray
    row_quadrature: Optional[Quadrature] = None
    col_quadrature: Optional[Quadrature] = None
    weighted: bool = True

    def __post_init__(self):
        A = np.array(self.matrix)
        if A.ndim != 2:
            raise InvalidArgumentError("operator matrix must be 2-D")
        for quad, size in ((self.row_quadrature, A.shape[0]), (self.col_quadrature, A.shape[1])):
            if quad is not None and size not in (len(quad), 3 * len(quad)):
                raise InvalidArgumentError("matrix shape inconsistent with quadrature")
        A.flags.writeable = False
        object.__setattr__(self, "matrix", A)

    @property
    def shape(self):
        return self.matrix.shape


@dataclass(frozen=True, eq=False)
class SpectralResult:
    """Values sorted descending with matching orthonormal mode columns."""

    values: np.ndarray
    left_modes: np.ndarray
    right_modes: np.ndarray

    def __len__(self):
        return len(self.values)


def _matrix(op) -> np.ndarray:
    return op.matrix if isinstance(op, DiscretizedOperator) else np.asarray(op)


def _sqrt_weights(quad: Quadrature, rank: int) -> np.ndarray:
    return np.repeat(np.sqrt(quad.weights), rank)


def discretize(kernel: KernelSpec, rows: Quadrature, cols: Optional[Quadrature] = None
               ) -> DiscretizedOperator:
    """Symmetric-weighted Nystrom matrix of ``kernel`` between two quadratures."""
    cols = rows if cols is None else cols
    white = kernel.n0_half if kernel.kind in ("noise_white", "noise_sinc") else None
    if white and cols is not rows and not (
            len(rows) == len(cols) and np.array_equal(rows.points, cols.points)):
        raise InvalidArgumentError("white noise is only defined on a single grid")
    if kernel.kind == "noise_white":
        return DiscretizedOperator(kernel.n0_half * np.eye(len(rows)), rows, cols)
    K = kernel.matrix(rows.points, cols.points)
    rank = kernel.output_rank
    A = _sqrt_weights(rows, rank)[:, None] * K * _sqrt_weights(cols, rank)[None, :]
    if white:
        A = A + white * np.eye(len(rows))
    return DiscretizedOperator(A, rows, cols)


def is_hermitian(A: np.ndarray, tol: float = 1e-10) -> bool:
    if A.shape[0] != A.shape[1]:
        return False
    scale = np.linalg.norm(A)
    return bool(np.linalg.norm(A - A.conj().T) <= tol * max(scale, np.finfo(float).tiny))


def eig_hermitian(op) -> SpectralResult:
    A = _matrix(op)
    if not is_hermitian(A):
        raise InvalidArgumentError("operator is not Hermitian")
    vals, vecs = np.linalg.eigh((A + A.conj().T) / 2)
    order = np.argsort(vals)[::-1]
    vecs = vecs[:, order]
    return SpectralResult(vals[order], vecs, vecs)


def svd_operator(op) -> SpectralResult:
    A = _matrix(op)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return SpectralResult(s, U, Vh.conj().T)


def project_operator(op, rx_modes: np.ndarray, tx_modes: np.ndarray) -> np.ndarray:
    """Mode-domain channel matrix H_qp = rx_q^H A tx_p."""
    A = _matrix(op)
    rx = np.asarray(rx_modes)
    tx = np.asarray(tx_modes)
    if rx.ndim == 1:
        rx = rx[:, None]
    if tx.ndim == 1:
        tx = tx[:, None]
    if rx.shape[0] != A.shape[0] or tx.shape[0] != A.shape[1]:
        raise InvalidArgumentError(
            f"mode dimensions {rx.shape[0]}x{tx.shape[0]} do not match operator {A.shape}")
    return rx.conj().T @ A @ tx


def fredholm_logdet(T_E, T_N) -> float:
    """log2 det(I + T_E T_N^{-1}) in bits, via the whitened form T_N^{-1/2} T_E T_N^{-1/2}."""
    E = _matrix(T_E)
    N = _matrix(T_N)
    if E.shape != N.shape or E.shape[0] != E.shape[1]:
        raise InvalidArgumentError("T_E and T_N must be square and of equal size")
    for name, M in (("T_E", E), ("T_N", N)):
        if not is_hermitian(M):
            raise InvalidArgumentError(f"{name} is not Hermitian")
    d, V = np.linalg.eigh((N + N.conj().T) / 2)
    if d[-1] <= 0 or d[0] <= 1e-12 * d[-1]:
        raise IllConditionedNoiseError(
            f"noise operator is not strictly positive definite (min/max eigenvalue "
            f"{d[0]:.3g}/{d[-1]:.3g})")
    S = (V / np.sqrt(d)) @ V.conj().T
    M = S @ E @ S
    mu = np.linalg.eigvalsh((M + M.conj().T) / 2)
    return float(np.sum(np.log1p(np.maximum(mu, 0.0))) / LOG2)
