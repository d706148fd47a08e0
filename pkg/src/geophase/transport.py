"""Discrete parallel transport of a full eigenframe along a path.

At every grid point the eigenvectors are labelled by energy order and
re-phased so that each one overlaps its predecessor with a real positive
number.  The product of those steps defines the transported frame at
``t = 1`` and the parallel-evolution matrix
``U[j, k] = <psi_j(0) | psi_k^par(1)>``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSpectrum,
    InvariantViolation,
    LostTrack,
    NoConvergence,
    NonHermitianInput,
    OrthogonalLink,
)
from .pathspace import ParameterPath, grid
from .phases import UNDEF_TOL, PhaseFactor
from .spectral import GAP_TOL, HERMITIAN_TOL, EigenFrame, eigen_sorted, fix_gauge, hermiticity_defect

logger = logging.getLogger(__name__)

LOST_TRACK_OVERLAP = 0.1
UNITARITY_TOL = 1e-9
DET_TOL = 1e-8
_CHUNK = 1 << 15


@dataclass(frozen=True)
class TransportSettings:
    initial_steps: int = 256
    max_steps: int = 1 << 20
    target_tol: float = 1e-8
    gap_tol: float = GAP_TOL

    def __post_init__(self):
        from .errors import ConfigError

        if int(self.initial_steps) != self.initial_steps or self.initial_steps < 1:
            raise ConfigError("must be a positive integer", "transport.initial_steps")
        if int(self.max_steps) != self.max_steps or self.max_steps < self.initial_steps:
            raise ConfigError("must be an integer >= initial_steps", "transport.max_steps")
        if not self.target_tol > 0:
            raise ConfigError("must be positive", "transport.target_tol")
        if not self.gap_tol > 0:
            raise ConfigError("must be positive", "transport.gap_tol")


@dataclass(frozen=True, eq=False)
class TransportResult:
    U: np.ndarray
    steps_used: int
    min_gap_along_path: float
    convergence_estimate: float
    initial_frame: EigenFrame
    final_frame: EigenFrame
    transported: np.ndarray  # columns: psi_k^par(1)

    @property
    def dim(self) -> int:
        return len(self.U)

    @property
    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.U.conj().T @ self.U - np.eye(self.dim))))

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.U))

    @property
    def det_defect(self) -> float:
        return abs(self.det - 1.0)


def check_invariants(result: TransportResult, unitary_tol: float = UNITARITY_TOL, det_tol: float = DET_TOL) -> None:
    """Raise :class:`InvariantViolation` if ``U`` is not unitary with unit determinant."""
    if result.unitarity_defect > unitary_tol:
        raise InvariantViolation(f"U is not unitary: defect {result.unitarity_defect:.3e}")
    if result.det_defect > det_tol:
        raise InvariantViolation(f"|det U - 1| = {result.det_defect:.3e} > {det_tol:.1e}")


@dataclass
class _Sweep:
    U: np.ndarray
    U_half: np.ndarray | None  # from the even-indexed subgrid; None if unavailable
    min_gap: float
    initial: EigenFrame
    final: EigenFrame
    transported: np.ndarray


def _diagonalize(path: ParameterPath, ts: np.ndarray, gap_tol: float):
    H = np.asarray(path.evaluate_many(ts))
    if H.shape != (len(ts), path.dim, path.dim):
        raise ValueError(f"path returned shape {H.shape}, expected {(len(ts), path.dim, path.dim)}")
    scale = np.max(np.abs(H), axis=(1, 2))
    defect = np.max(np.abs(H - np.conj(np.swapaxes(H, 1, 2))), axis=(1, 2))
    bad = defect > HERMITIAN_TOL * np.where(scale > 0, scale, 1.0)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NonHermitianInput(hermiticity_defect(H[i]), HERMITIAN_TOL)
    evals, evecs = np.linalg.eigh(H)
    if path.dim > 1:
        gaps = np.min(np.diff(evals, axis=1), axis=1)
        i = int(np.argmin(gaps))
        if gaps[i] < gap_tol:
            raise DegenerateSpectrum(float(gaps[i]), gap_tol, float(ts[i]))
        min_gap = float(gaps[i])
    else:
        min_gap = float("inf")
    return evals, evecs.astype(complex, copy=False), min_gap


def _step_overlaps(stack: np.ndarray) -> np.ndarray:
    """``<v_k(i) | v_k(i+1)>`` for consecutive frames; shape (len-1, n)."""
    return np.einsum("mik,mik->mk", np.conj(stack[:-1]), stack[1:])


def _sweep(path: ParameterPath, steps: int, gap_tol: float, initial_phases=None, chunk: int = _CHUNK) -> _Sweep:
    ts = grid(steps)
    n = path.dim
    min_gap = float("inf")
    alpha = np.zeros(n)
    alpha_half = np.zeros(n)
    half_lost = False
    prev = prev_even = None
    initial = final = None
    for a in range(0, steps + 1, chunk):
        b = min(a + chunk, steps + 1)
        evals, vecs, gap = _diagonalize(path, ts[a:b], gap_tol)
        min_gap = min(min_gap, gap)
        if a == 0:
            v0 = fix_gauge(vecs[0])
            tag = "maxreal"
            if initial_phases is not None:
                v0 = v0 * np.exp(1j * np.asarray(initial_phases, dtype=float))[None, :]
                tag = "maxreal+phases"
            vecs[0] = v0
            initial = EigenFrame(evals[0], v0, tag)
        stack = vecs if prev is None else np.concatenate([prev[None], vecs])
        d = _step_overlaps(stack)
        mags = np.abs(d)
        if d.size and mags.min() < LOST_TRACK_OVERLAP:
            m, k = np.unravel_index(np.argmin(mags), mags.shape)
            t_idx = (a if prev is None else a - 1) + m + 1
            raise LostTrack(float(ts[t_idx]), int(k) + 1, float(mags[m, k]))
        alpha -= np.angle(d).sum(axis=0)

        even = vecs[(np.arange(a, b) % 2) == 0]
        stack = even if prev_even is None else np.concatenate([prev_even[None], even])
        d = _step_overlaps(stack)
        if d.size:
            half_lost |= bool(np.abs(d).min() < LOST_TRACK_OVERLAP)
            alpha_half -= np.angle(d).sum(axis=0)
        prev = vecs[-1]
        if len(even):
            prev_even = even[-1]
        if b == steps + 1:
            final = EigenFrame(evals[-1], fix_gauge(vecs[-1]))

    last = prev
    transported = last * np.exp(1j * alpha)[None, :]
    U = initial.vectors.conj().T @ transported
    U_half = None
    if steps % 2 == 0 and not half_lost:
        U_half = initial.vectors.conj().T @ (last * np.exp(1j * alpha_half)[None, :])
    return _Sweep(U, U_half, min_gap, initial, final, transported)


def parallel_transport(
    path: ParameterPath,
    steps: int,
    gap_tol: float = GAP_TOL,
    initial_phases=None,
) -> TransportResult:
    """Transport the eigenframe of ``path`` over ``steps`` uniform steps.

    ``convergence_estimate`` is the max entrywise difference between ``U``
    and the same computation at ``steps // 2``; it is ``inf`` when that
    companion run is impossible (``steps == 1``) or loses track.
    ``initial_phases``, if given, multiplies the initial eigenvectors by
    ``exp(i * phases)`` before transport.

    Raises
    ------
    DegenerateSpectrum
        If the gap at some grid point is below ``gap_tol``.
    LostTrack
        If a step overlap drops below 0.1.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    sw = _sweep(path, steps, gap_tol, initial_phases)
    U_half = sw.U_half
    if steps % 2 and steps > 1:
        try:
            U_half = _sweep(path, steps // 2, gap_tol, initial_phases).U
        except LostTrack:
            U_half = None
    estimate = float("inf") if U_half is None else float(np.max(np.abs(sw.U - U_half)))
    return TransportResult(sw.U, steps, sw.min_gap, estimate, sw.initial, sw.final, sw.transported)


def transport_adaptive(
    path: ParameterPath,
    settings: TransportSettings | None = None,
    initial_phases=None,
) -> TransportResult:
    """Double the step count from ``initial_steps`` until the estimate meets ``target_tol``.

    A lost-track failure at a given resolution counts as unconverged and
    triggers refinement; it is re-raised only at ``max_steps``.

    Raises
    ------
    NoConvergence
        Carrying the finest result, if ``max_steps`` is reached first.
    """
    settings = settings or TransportSettings()
    steps = settings.initial_steps
    while True:
        try:
            result = parallel_transport(path, steps, settings.gap_tol, initial_phases)
        except LostTrack:
            if steps * 2 > settings.max_steps:
                raise
            logger.debug("lost track at %d steps, refining", steps)
            steps *= 2
            continue
        logger.debug("steps=%d estimate=%.3e", steps, result.convergence_estimate)
        if result.convergence_estimate <= settings.target_tol:
            check_invariants(result)
            return result
        if steps * 2 > settings.max_steps:
            raise NoConvergence(result, settings.target_tol)
        steps *= 2


def eigenframes(path: ParameterPath, steps: int, gap_tol: float = GAP_TOL) -> np.ndarray:
    """Gauge-fixed eigenvectors on the uniform grid, shape ``(steps + 1, n, n)``."""
    _, vecs, _ = _diagonalize(path, grid(steps), gap_tol)
    return fix_gauge(vecs)


def pancharatnam_product(states, undef_tol: float = UNDEF_TOL) -> PhaseFactor:
    """Phase of ``<v0|v1><v1|v2>...<v_{m-1}|v_m>`` over an open chain.

    Append the first state to close a loop.

    Raises
    ------
    OrthogonalLink
        If some consecutive overlap is smaller than ``undef_tol`` in modulus.
    """
    states = [np.asarray(s, dtype=complex) for s in states]
    if len(states) < 2:
        raise ValueError("a chain needs at least two states")
    prod = 1.0 + 0j
    for i, (u, v) in enumerate(zip(states, states[1:])):
        z = np.vdot(u, v)
        if abs(z) < undef_tol:
            raise OrthogonalLink(i, abs(z))
        # renormalize per link to avoid underflow on long chains
        prod *= z / abs(z)
    return PhaseFactor.unit(prod / abs(prod))


def four_leg_loop(path: ParameterPath, steps: int, j: int, k: int, gap_tol: float = GAP_TOL) -> list:
    """Closed chain whose overlap product carries the phase of ``gamma_jk``.

    The chain runs ``psi_j(0) -> psi_k(1) -> ... -> psi_k(0) -> psi_j(1) ->
    ... -> psi_j(0)``: the two cross links are geodesic jumps between
    endpoint states and the other links follow the paths backwards.  On
    the same grid its product equals ``U_jk U_kj`` up to a positive factor.
    """
    frames = eigenframes(path, steps, gap_tol)
    vj = frames[:, :, j - 1]
    vk = frames[:, :, k - 1]
    return [vj[0]] + list(vk[::-1]) + list(vj[::-1])
