"""Energy-ordered Hermitian eigendecomposition with a fixed phase convention.

Eigenvectors are stored as the *columns* of ``EigenFrame.vectors``.  The gauge
convention ("maxreal") multiplies every eigenvector by the global phase that
makes its largest-magnitude component real and positive; components whose
magnitude is within a relative 1e-12 of the maximum count as ties and the
lowest index wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrum, NonHermitianInput

HERMITIAN_TOL = 1e-12
GAP_TOL = 1e-10
GAUGE_TAG = "maxreal"
_TIE_RTOL = 1e-12


def hermiticity_defect(H) -> float:
    """Max |H - H^dagger| relative to the largest entry magnitude (0 for the zero matrix)."""
    H = np.asarray(H)
    scale = np.max(np.abs(H)) if H.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(H - np.conj(np.swapaxes(H, -1, -2)))) / scale)


def check_hermitian(H, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate a square Hermitian matrix and return it as an ndarray."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] < 1:
        raise ValueError(f"expected a nonempty square matrix, got shape {H.shape}")
    defect = hermiticity_defect(H)
    if defect > tol:
        raise NonHermitianInput(defect, tol)
    return H


@dataclass(frozen=True, eq=False)
class EigenFrame:
    eigenvalues: np.ndarray
    vectors: np.ndarray
    gauge_tag: str = GAUGE_TAG

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def __eq__(self, other):
        if not isinstance(other, EigenFrame):
            return NotImplemented
        return (
            self.gauge_tag == other.gauge_tag
            and np.array_equal(self.eigenvalues, other.eigenvalues)
            and np.array_equal(self.vectors, other.vectors)
        )

    def vector(self, j: int) -> np.ndarray:
        """Eigenvector ``j`` (1-based, energy order)."""
        return self.vectors[:, j - 1]


def fix_gauge(vectors: np.ndarray) -> np.ndarray:
    """Apply the maxreal convention column-wise.

    Works on a single ``(n, n)`` frame or a stack ``(..., n, n)``.
    """
    vectors = np.asarray(vectors)
    mags = np.abs(vectors)
    peak = mags.max(axis=-2, keepdims=True)
    # first component (lowest index) that ties with the peak
    pick = np.argmax(mags >= peak * (1.0 - _TIE_RTOL), axis=-2)[..., None, :]
    anchor = np.take_along_axis(vectors, pick, axis=-2)
    if not np.iscomplexobj(vectors):
        return vectors * np.sign(anchor)
    done = (anchor.imag == 0) & (anchor.real > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        phase = np.where(done, 1.0, np.conj(anchor) / np.abs(anchor))
    fixed = vectors * phase
    # pin the anchor to its exact modulus so a second pass is a bitwise no-op
    np.put_along_axis(fixed, pick, np.abs(anchor).astype(fixed.dtype), axis=-2)
    return fixed


def eigen_sorted(H, gap_tol: float = GAP_TOL, hermitian_tol: float = HERMITIAN_TOL) -> EigenFrame:
    """Diagonalize ``H`` with ascending eigenvalues and maxreal-gauged eigenvectors.

    Raises
    ------
    NonHermitianInput
        If ``H`` fails the Hermiticity check.
    DegenerateSpectrum
        If two adjacent eigenvalues are closer than ``gap_tol``.
    """
    H = check_hermitian(H, hermitian_tol)
    evals, evecs = np.linalg.eigh(H)
    gap = _min_gap(evals)
    if gap < gap_tol:
        raise DegenerateSpectrum(gap, gap_tol)
    return EigenFrame(evals, fix_gauge(evecs))


def regauge(frame: EigenFrame) -> EigenFrame:
    return EigenFrame(frame.eigenvalues, fix_gauge(frame.vectors), frame.gauge_tag)


def _min_gap(evals: np.ndarray) -> float:
    if len(evals) < 2:
        return float("inf")
    return float(np.min(np.diff(evals)))


def min_gap(frame: EigenFrame) -> float:
    """Smallest spacing between adjacent eigenvalues; ``inf`` for a 1x1 frame."""
    return _min_gap(np.asarray(frame.eigenvalues))
