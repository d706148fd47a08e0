"""Parameterized Hamiltonian paths on the normalized interval t in [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParameter, NonMonotone


class ParameterPath:
    """A family ``t -> H(t)`` of ``dim x dim`` Hermitian matrices.

    Subclasses implement :meth:`evaluate_many`, which maps a 1-D array of
    parameter values to a stacked ``(len(ts), dim, dim)`` array.  Evaluation
    must be a pure function of ``t``.
    """

    dim: int
    descriptor: dict

    def evaluate(self, t: float) -> np.ndarray:
        return self.evaluate_many(np.array([float(t)]))[0]

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t: float) -> np.ndarray:
        return self.evaluate(t)


class FunctionPath(ParameterPath):
    """Path backed by a Python callable.

    ``func`` maps a scalar ``t`` to a matrix.  If ``vectorized`` is true it
    must instead accept a 1-D array and return the stacked matrices, which
    is much faster for fine grids.
    """

    def __init__(self, func: Callable, dim: int, descriptor: dict | None = None, vectorized: bool = False):
        self.func = func
        self.dim = int(dim)
        self.vectorized = vectorized
        self.descriptor = descriptor if descriptor is not None else {"name": "function"}

    def evaluate_many(self, ts):
        ts = np.asarray(ts, dtype=float)
        if self.vectorized:
            return np.asarray(self.func(ts))
        return np.stack([np.asarray(self.func(float(t))) for t in ts])


class SampledPath(ParameterPath):
    """Piecewise-linear interpolation of externally supplied matrices.

    ``matrices[i]`` is taken at ``knots[i]`` (uniform on [0, 1] by default).
    The resulting family is continuous but only piecewise smooth.
    """

    def __init__(self, matrices, knots=None):
        mats = np.asarray(matrices)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or len(mats) < 2:
            raise InvalidParameter("need at least two square matrices of equal size", "model.parameters.matrices")
        if knots is None:
            knots = np.linspace(0.0, 1.0, len(mats))
        knots = np.asarray(knots, dtype=float)
        if knots.shape != (len(mats),) or knots[0] != 0.0 or knots[-1] != 1.0 or np.any(np.diff(knots) <= 0):
            raise InvalidParameter("knots must increase strictly from 0 to 1", "model.parameters.knots")
        self.matrices = mats
        self.knots = knots
        self.dim = mats.shape[1]
        self.descriptor = {"name": "sampled", "count": len(mats)}

    def evaluate_many(self, ts):
        ts = np.asarray(ts, dtype=float)
        idx = np.clip(np.searchsorted(self.knots, ts, side="right") - 1, 0, len(self.knots) - 2)
        left, right = self.knots[idx], self.knots[idx + 1]
        w = ((ts - left) / (right - left))[:, None, None]
        out = (1.0 - w) * self.matrices[idx] + w * self.matrices[idx + 1]
        # knots are hit exactly, so endpoints reproduce the input bit for bit
        exact = ts == self.knots[idx]
        out[exact] = self.matrices[idx[exact]]
        exact = ts == self.knots[idx + 1]
        out[exact] = self.matrices[idx[exact] + 1]
        return out


@dataclass(frozen=True)
class Reparametrization:
    """Monotone map of [0, 1] onto itself.

    Built-ins are ``identity``, ``smoothstep`` (3t^2 - 2t^3) and ``power``
    (t**p, p > 0).
    """

    name: str
    params: dict = field(default_factory=dict)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.name == "identity":
            return t
        if self.name == "smoothstep":
            return t * t * (3.0 - 2.0 * t)
        if self.name == "power":
            return t ** self.params["p"]
        raise InvalidParameter(f"unknown reparametrization {self.name!r}", "reparametrization.name")

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def smoothstep(cls):
        return cls("smoothstep")

    @classmethod
    def power(cls, p: float):
        if not p > 0:
            raise InvalidParameter(f"exponent must be positive, got {p}", "reparametrization.p")
        return cls("power", {"p": float(p)})

    def validate(self, grid: int = 4096) -> None:
        ts = np.linspace(0.0, 1.0, grid + 1)
        fs = self(ts)
        if fs[0] != 0.0 or fs[-1] != 1.0:
            raise NonMonotone(f"endpoints map to ({fs[0]}, {fs[-1]}) instead of (0, 1)", "reparametrization")
        if np.any(np.diff(fs) <= 0):
            raise NonMonotone("map is not strictly increasing", "reparametrization")

    def to_dict(self) -> dict:
        return {"name": self.name, **self.params}


BUILTIN_REPARAMETRIZATIONS = (
    Reparametrization.identity(),
    Reparametrization.smoothstep(),
    Reparametrization.power(2.0),
)


class ReparametrizedPath(ParameterPath):
    def __init__(self, base: ParameterPath, f: Reparametrization):
        self.base = base
        self.f = f
        self.dim = base.dim
        self.descriptor = {"name": "reparametrized", "base": base.descriptor, "reparametrization": f.to_dict()}

    def evaluate_many(self, ts):
        return self.base.evaluate_many(self.f(ts))


def reparametrize(path: ParameterPath, f) -> ParameterPath:
    """Return the path ``t -> path(f(t))``.

    ``f`` is a :class:`Reparametrization` or any vectorized callable; it is
    checked for monotonicity and fixed endpoints on a dense grid.
    """
    if not isinstance(f, Reparametrization):
        f = _CallableReparametrization(f)
    f.validate()
    return ReparametrizedPath(path, f)


class _CallableReparametrization(Reparametrization):
    def __init__(self, func):
        object.__setattr__(self, "name", getattr(func, "__name__", "custom"))
        object.__setattr__(self, "params", {})
        object.__setattr__(self, "_func", func)

    def __call__(self, t):
        return np.asarray(self._func(np.asarray(t, dtype=float)), dtype=float)


def grid(steps: int) -> np.ndarray:
    """``t_i = i / steps`` for ``i = 0..steps``, computed by division so grids nest exactly."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    return np.arange(steps + 1) / steps


def sample(path: ParameterPath, steps: int) -> np.ndarray:
    """Evaluate ``path`` on :func:`grid`; returns ``steps + 1`` matrices."""
    return path.evaluate_many(grid(steps))


def continuity_defect(path: ParameterPath, steps: int) -> float:
    """Largest entrywise jump between neighbouring samples; tends to 0 for continuous paths."""
    mats = sample(path, steps)
    return float(np.max(np.abs(np.diff(mats, axis=0))))
