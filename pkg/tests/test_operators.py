import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eitkit.errors import IllConditionedNoiseError, InvalidArgumentError, SingularityError
from eitkit.geometry import Quadrature, Region, interval, rectangle, uniform_grid
from eitkit.kernels import KernelSpec
from eitkit.operators import (DiscretizedOperator, discretize, eig_hermitian, fredholm_logdet,
                              project_operator, svd_operator)

from conftest import random_hermitian_psd, random_unitary


def charpoly_eigenvalues(A):
    """Faddeev-LeVerrier coefficients plus polynomial root finding in extended precision."""
    mpmath.mp.dps = 40
    n = A.shape[0]
    M = mpmath.matrix(A.tolist())
    I = mpmath.eye(n)
    coeffs = [mpmath.mpc(1)]
    Mk = mpmath.zeros(n)
    for k in range(1, n + 1):
        Mk = M * Mk + coeffs[-1] * I
        AM = M * Mk
        coeffs.append(-sum(AM[i, i] for i in range(n)) / k)
    roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=200)
    return np.sort([float(mpmath.re(r)) for r in roots])[::-1]


# --- discretize


def test_white_noise_is_identity():
    q = uniform_grid(rectangle(1.0, 2.0), (3, 5))
    op = discretize(KernelSpec.noise_white(1.0), q)
    np.testing.assert_array_equal(op.matrix, np.eye(15))


def test_sinc_one_point():
    q = Quadrature([[0.0]], [0.7])
    op = discretize(KernelSpec.sinc_bandlimit(2.0), q)
    np.testing.assert_allclose(op.matrix, [[4.0 * 0.7]])


def test_sinc_trace_matches_diagonal_integral():
    # trace = integral of K(t, t) = 2W * T
    q = uniform_grid(Region("interval", (2.0,), (-1.0,)), 256)
    op = discretize(KernelSpec.sinc_bandlimit(2.0), q)
    assert np.trace(op.matrix) == pytest.approx(8.0, rel=1e-12)


def test_green_coincident_points_raise():
    q = uniform_grid(interval(1.0), 4)
    with pytest.raises(SingularityError):
        discretize(KernelSpec.scalar_green(1.0), q)


def test_dyadic_dimensions():
    rows = Quadrature(np.array([[0, 0, 5.0], [1, 0, 5.0]]), [1, 1])
    cols = Quadrature(np.zeros((1, 3)), [2.0])
    op = discretize(KernelSpec.dyadic_green(1.0), rows, cols)
    assert op.shape == (6, 3)


@pytest.mark.parametrize("kernel, quad", [
    (KernelSpec.noise_sinc(4.0, 1.0, 0.3), uniform_grid(rectangle(2.0, 1.0), (9, 5))),
    (KernelSpec.sinc_bandlimit(1.5), uniform_grid(interval(3.0), 50)),
])
def test_self_adjoint_kernels_give_hermitian_matrices(kernel, quad):
    A = discretize(kernel, quad).matrix
    assert np.abs(A - A.conj().T).max() <= 1e-12 * np.abs(A).max()


@pytest.mark.parametrize("kernel, region, n", [
    (KernelSpec.sinc_bandlimit(2.0), Region("interval", (2.0,), (-1.0,)), 128),
    (KernelSpec.noise_sinc(2 * math.pi, 1.0), interval(4.0), 64),
])
def test_nystrom_consistency_under_refinement(kernel, region, n):
    top = [eig_hermitian(discretize(kernel, uniform_grid(region, m))).values[:10]
           for m in (n, 2 * n)]
    rel = np.abs(top[0] - top[1]) / np.abs(top[1]).max()
    assert rel.max() <= 0.01


# --- eig_hermitian


def test_eig_examples():
    np.testing.assert_allclose(eig_hermitian(np.eye(3)).values, [1, 1, 1])
    np.testing.assert_allclose(eig_hermitian(np.diag([3.0, 1.0, 2.0])).values, [3, 2, 1])


def test_eig_matches_charpoly_oracle(rng):
    X = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    A = (X + X.conj().T) / 2
    np.testing.assert_allclose(eig_hermitian(A).values, charpoly_eigenvalues(A), atol=1e-8)


def test_eig_rejects_non_hermitian():
    with pytest.raises(InvalidArgumentError):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 24), st.integers(0, 2**32 - 1))
def test_eig_reconstruction_and_orthonormality(n, seed):
    rng = np.random.default_rng(seed)
    A = random_hermitian_psd(rng, n, rank=max(1, n // 2))
    res = eig_hermitian(A)
    V = res.left_modes
    recon = (V * res.values) @ V.conj().T
    assert np.linalg.norm(A - recon) <= 1e-10 * np.linalg.norm(A)
    assert np.abs(V.conj().T @ V - np.eye(n)).max() <= 1e-10
    assert np.all(np.diff(res.values) <= 0)
    assert res.values.min() >= -1e-10 * res.values[0]


# --- svd_operator


def test_svd_examples():
    np.testing.assert_array_equal(svd_operator(np.zeros((3, 2))).values, [0, 0])
    np.testing.assert_allclose(svd_operator(np.array([[0.0, 1.0], [0.0, 0.0]])).values, [1, 0])


def test_svd_of_psd_equals_eigenvalues(rng):
    A = random_hermitian_psd(rng, 10)
    np.testing.assert_allclose(svd_operator(A).values, eig_hermitian(A).values, atol=1e-10 * np.linalg.norm(A))


def test_svd_reconstruction(rng):
    A = rng.standard_normal((7, 12)) + 1j * rng.standard_normal((7, 12))
    res = svd_operator(DiscretizedOperator(A))
    recon = (res.left_modes * res.values) @ res.right_modes.conj().T
    assert np.linalg.norm(A - recon) <= 1e-10 * np.linalg.norm(A)
    assert np.all(np.diff(res.values) <= 0)


# --- project_operator


def test_project_canonical_modes(rng):
    A = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
    rx = np.eye(5)[:, [0, 3]]
    tx = np.eye(4)[:, [1, 2]]
    np.testing.assert_array_equal(project_operator(A, rx, tx), A[np.ix_([0, 3], [1, 2])])


def test_project_singular_modes_diagonalize(rng):
    A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    res = svd_operator(A)
    H = project_operator(A, res.left_modes, res.right_modes)
    np.testing.assert_allclose(H, np.diag(res.values), atol=1e-12)


def test_project_matches_triple_sum(rng):
    A = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    U, V = random_unitary(rng, 6)[:, :3], random_unitary(rng, 6)[:, :4]
    H = project_operator(A, U, V)
    for q in range(3):
        for p in range(4):
            total = sum(np.conj(U[i, q]) * A[i, j] * V[j, p] for i in range(6) for j in range(6))
            assert H[q, p] == pytest.approx(total, abs=1e-12)


def test_project_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        project_operator(np.eye(3), np.eye(4), np.eye(3))


# --- fredholm_logdet


def test_fredholm_examples():
    assert fredholm_logdet(np.zeros((4, 4)), np.eye(4)) == 0.0
    assert fredholm_logdet([[3.0]], [[1.0]]) == pytest.approx(2.0, abs=1e-14)
    assert fredholm_logdet(np.diag([1.0, 3.0]), np.eye(2)) == pytest.approx(3.0, abs=1e-14)


def test_fredholm_singular_noise():
    with pytest.raises(IllConditionedNoiseError):
        fredholm_logdet(np.eye(2), np.diag([1.0, 0.0]))


def test_fredholm_scale_invariance(rng):
    for _ in range(20):
        E = random_hermitian_psd(rng, 6, rank=3)
        N = random_hermitian_psd(rng, 6) + np.eye(6)
        a = rng.uniform(1e-3, 1e3)
        assert abs(fredholm_logdet(E, N) - fredholm_logdet(a * E, a * N)) <= 1e-10


def test_fredholm_psd_monotone(rng):
    E = random_hermitian_psd(rng, 5, rank=2)
    N = random_hermitian_psd(rng, 5) + 0.5 * np.eye(5)
    base = fredholm_logdet(E, N)
    for _ in range(50):
        D = random_hermitian_psd(rng, 5, rank=int(rng.integers(1, 6))) * rng.uniform(0, 2)
        assert fredholm_logdet(E + D, N) >= base - 1e-12
