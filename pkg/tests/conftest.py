import numpy as np
import pytest
from scipy.stats import unitary_group

from geophase.pathspace import FunctionPath

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

ACCEPTANCE_LINES = []


def record(criterion, passed, detail=""):
    """Log one acceptance line; shown in the terminal summary even when output is captured."""
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion}" + (f": {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def cone_path(polar=0.7, sweep=2 * np.pi):
    """Spin-1/2 in a field on a cone of half-angle ``polar``, azimuth 0 -> ``sweep``."""

    def H(ts):
        phi = sweep * ts
        return 0.5 * (
            np.sin(polar) * (np.cos(phi)[:, None, None] * PAULI_X + np.sin(phi)[:, None, None] * PAULI_Y)
            + np.cos(polar) * PAULI_Z
        )

    return FunctionPath(H, 2, {"name": "cone", "polar": polar, "sweep": sweep}, vectorized=True)


def random_hermitian(n, rng):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (A + A.conj().T) / 2


def complex_open_path(n=3, seed=0, harmonics=2):
    """Smooth open path of complex Hermitian matrices with a well separated spectrum."""
    rng = np.random.default_rng(seed)
    base = np.diag(np.arange(n) * 3.0)
    terms = [random_hermitian(n, rng) for _ in range(2 * harmonics)]

    def H(ts):
        out = np.broadcast_to(base, (len(ts), n, n)).astype(complex)
        for m in range(harmonics):
            out = out + np.cos(1.3 * (m + 1) * ts)[:, None, None] * terms[2 * m]
            out = out + np.sin(1.7 * (m + 1) * ts)[:, None, None] * terms[2 * m + 1]
        return out

    return FunctionPath(H, n, {"name": "complex_open", "n": n, "seed": seed}, vectorized=True)


def random_unitary(n, seed, min_entry=0.0):
    """Haar unitary; redrawn until every entry has modulus >= ``min_entry``."""
    state = seed
    while True:
        U = unitary_group.rvs(n, random_state=state) if n > 1 else np.array([[np.exp(1j * seed)]])
        if np.abs(U).min() >= min_entry:
            return U
        state += 10_000


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
