import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geophase.errors import DegenerateSpectrum, NonHermitianInput
from geophase.spectral import EigenFrame, eigen_sorted, fix_gauge, min_gap, regauge

from conftest import random_hermitian


def closed_form_2x2(H):
    """Eigenpairs of a 2x2 Hermitian matrix from the quadratic formula."""
    a, b, d = H[0, 0].real, H[0, 1], H[1, 1].real
    mean, radius = (a + d) / 2, np.hypot((a - d) / 2, abs(b))
    out = []
    for lam in (mean - radius, mean + radius):
        v = np.array([b, lam - a], dtype=complex)
        if np.linalg.norm(v) < 1e-14:
            v = np.array([lam - d, np.conj(b)], dtype=complex)
        out.append((lam, v / np.linalg.norm(v)))
    return out


def test_diagonal_matrix():
    f = eigen_sorted(np.diag([2.0, -1.0]))
    assert np.array_equal(f.eigenvalues, [-1.0, 2.0])
    np.testing.assert_array_equal(f.vector(1), [0, 1])
    np.testing.assert_array_equal(f.vector(2), [1, 0])


def test_symmetric_2x2_tie_breaks_to_first_component():
    f = eigen_sorted(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(f.eigenvalues, [-1, 1], atol=1e-15)
    np.testing.assert_allclose(f.vector(1), np.array([1, -1]) / np.sqrt(2), atol=1e-15)
    np.testing.assert_allclose(f.vector(2), np.array([1, 1]) / np.sqrt(2), atol=1e-15)


def test_pauli_y_against_closed_form():
    H = np.array([[0, -1j], [1j, 0]])
    f = eigen_sorted(H)
    for j, (lam, v) in enumerate(closed_form_2x2(H), 1):
        assert f.eigenvalues[j - 1] == pytest.approx(lam, abs=1e-14)
        # tie between |v0| and |v1|: lowest index gets the real positive phase
        v = v * np.conj(v[0]) / abs(v[0])
        np.testing.assert_allclose(f.vector(j), v, atol=1e-14)
    np.testing.assert_allclose(f.vector(1), np.array([1, -1j]) / np.sqrt(2), atol=1e-14)


def test_min_gap_examples():
    assert min_gap(EigenFrame(np.array([1.0, 2.0, 4.0]), np.eye(3))) == 1.0
    assert min_gap(EigenFrame(np.array([0.0, 1e-14]), np.eye(2))) == 1e-14
    assert min_gap(EigenFrame(np.array([3.0]), np.eye(1))) == float("inf")


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitianInput):
        eigen_sorted(np.array([[0, 1], [0.5, 0]]))


def test_degenerate_rejected():
    with pytest.raises(DegenerateSpectrum):
        eigen_sorted(np.eye(3))
    # tolerance is configurable
    f = eigen_sorted(np.diag([0.0, 1e-11]), gap_tol=1e-12)
    assert min_gap(f) == 1e-11


def test_one_by_one():
    f = eigen_sorted(np.array([[2.5]]))
    assert f.eigenvalues.tolist() == [2.5]
    assert f.vectors.tolist() == [[1.0]]


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_frame_properties(n, seed):
    rng = np.random.default_rng(seed)
    H = random_hermitian(n, rng)
    f = eigen_sorted(H, gap_tol=1e-8)
    V = f.vectors
    assert np.all(np.diff(f.eigenvalues) >= 0)
    assert np.max(np.abs(V.conj().T @ V - np.eye(n))) <= 1e-10
    recon = (V * f.eigenvalues) @ V.conj().T
    assert np.max(np.abs(recon - H)) <= 1e-9 * max(1.0, np.max(np.abs(H)))
    for j in range(n):
        v = V[:, j]
        anchor = np.flatnonzero(np.abs(v) >= np.abs(v).max() * (1 - 1e-12))[0]
        assert v[anchor].imag == 0 and v[anchor].real > 0
    assert eigen_sorted(H, gap_tol=1e-8) == f
    assert regauge(f) == f
    assert np.array_equal(fix_gauge(V), V)


def test_gauge_fix_removes_arbitrary_phases(rng):
    H = random_hermitian(4, rng)
    f = eigen_sorted(H)
    scrambled = f.vectors * np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    np.testing.assert_allclose(fix_gauge(scrambled), f.vectors, atol=1e-14)
