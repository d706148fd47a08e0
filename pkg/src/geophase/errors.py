"""Exception hierarchy.

Errors are grouped by how the CLI reports them: configuration problems,
computational failures (degeneracy, lost tracking, undefined phases,
no convergence) and violated internal invariants.
"""

from __future__ import annotations


class GeophaseError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(GeophaseError, ValueError):
    """Invalid run configuration. ``field`` is a dotted path into the config."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class InvalidParameter(ConfigError):
    """A model parameter is outside its admissible range."""


class NonMonotone(ConfigError):
    """A reparametrization is not strictly increasing with fixed endpoints."""


class NonHermitianInput(GeophaseError, ValueError):
    def __init__(self, defect: float, tol: float):
        self.defect = defect
        self.tol = tol
        super().__init__(f"matrix is not Hermitian: max |H - H^dagger| = {defect:.3e} > {tol:.1e}")


class ComputationError(GeophaseError):
    """A well-posed request that could not be carried out numerically."""


class DegenerateSpectrum(ComputationError):
    def __init__(self, gap: float, gap_tol: float, t: float | None = None):
        self.gap = gap
        self.gap_tol = gap_tol
        self.t = t
        where = "" if t is None else f" at t={t:.12g}"
        super().__init__(f"degenerate spectrum{where}: min gap {gap:.3e} < {gap_tol:.1e}")


class DegenerateOnPath(DegenerateSpectrum, ConfigError):
    """A model family crosses a degeneracy. ``theta`` is the offending angle."""

    def __init__(self, gap: float, gap_tol: float, theta: float):
        self.theta = theta
        DegenerateSpectrum.__init__(self, gap, gap_tol)
        self.field = "model.parameters"
        self.args = (f"degenerate spectrum at theta={theta:.12g}: min gap {gap:.3e} < {gap_tol:.1e}",)


class LostTrack(ComputationError):
    def __init__(self, t: float, state: int, overlap: float):
        self.t = t
        self.state = state
        self.overlap = overlap
        super().__init__(
            f"lost track of state {state} at t={t:.12g}: step overlap {overlap:.3e} < 0.1 "
            "(increase the number of steps)"
        )


class NoConvergence(ComputationError):
    """Adaptive transport hit ``max_steps``. The finest result is attached."""

    def __init__(self, result, target_tol: float):
        self.result = result
        self.target_tol = target_tol
        super().__init__(
            f"no convergence after {result.steps_used} steps: estimate "
            f"{result.convergence_estimate:.3e} > {target_tol:.1e}"
        )


class OrthogonalLink(ComputationError):
    def __init__(self, index: int, magnitude: float):
        self.index = index
        self.magnitude = magnitude
        super().__init__(f"link {index} of the chain is orthogonal (|overlap| = {magnitude:.3e})")


class UndefinedConstituent(ComputationError):
    """Some sigma entering a product has vanishing overlap. ``links`` are 1-based (j, k)."""

    def __init__(self, links):
        self.links = [tuple(link) for link in links]
        shown = ", ".join(f"({j},{k})" for j, k in self.links)
        super().__init__(f"undefined phase factor(s) for link(s) {shown}")


class IndexOutOfRange(GeophaseError, IndexError):
    def __init__(self, index: int, n: int):
        self.index = index
        self.n = n
        super().__init__(f"index {index} outside 1..{n}")


class DimensionTooLarge(GeophaseError, ValueError):
    def __init__(self, n: int, cap: int):
        super().__init__(f"n={n} exceeds the enumeration cap {cap}")


class InvariantViolation(GeophaseError, AssertionError):
    """An internal consistency check failed; indicates a bug, not bad input."""
