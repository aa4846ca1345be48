import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240518)


def random_hermitian_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    X = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    return X @ X.conj().T


def random_unitary(rng, n):
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


ACCEPTANCE_LINES = []


def record_criterion(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
