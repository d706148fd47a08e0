"""Built-in Hamiltonian families.

* ``spin_half``: spin-1/2 in a field rotating in the xz plane by ``theta_f``.
* ``conical``: linear family ``r (cos th Hx + sin th Hy)`` around a degeneracy
  at the origin; ``conical3`` is the three-level real surrogate of a
  deformed rectangular resonator.
* ``random_symmetric``: closed loop of real symmetric matrices built from
  seeded Fourier harmonics.
* ``avoided_crossing``: two levels swept through an avoided crossing of
  half-gap ``delta``.
* ``constant`` and ``sampled``: user-supplied matrices.

Every model is described by a :class:`ModelDescriptor` that round-trips
through plain dicts, which is how the CLI config stores it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateOnPath, InvalidParameter
from .pathspace import FunctionPath, ParameterPath, SampledPath
from .spectral import GAP_TOL, check_hermitian

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])

CONICAL3_HX = np.diag([-1.0, 0.0, 1.0])
CONICAL3_HY = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])

MODEL_NAMES = ("spin_half", "conical", "random_symmetric", "avoided_crossing", "constant", "sampled")


def cos_sin(theta):
    """cos and sin that are exact at integer multiples of pi/2.

    Keeps endpoint relations such as H(pi) = -H(0) bit-exact.
    """
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    q = theta / (np.pi / 2)
    k = np.rint(q)
    on_axis = np.abs(q - k) <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(q))
    k = np.mod(k, 4).astype(int)
    c = np.where(on_axis, np.choose(k, [1.0, 0.0, -1.0, 0.0]), c)
    s = np.where(on_axis, np.choose(k, [0.0, 1.0, 0.0, -1.0]), s)
    return c, s


@dataclass
class ModelDescriptor:
    name: str
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "parameters": _jsonable(self.parameters)}

    @classmethod
    def from_dict(cls, data: dict) -> "ModelDescriptor":
        if not isinstance(data, dict) or "name" not in data:
            raise InvalidParameter("model needs a 'name'", "model")
        params = data.get("parameters", {})
        if not isinstance(params, dict):
            raise InvalidParameter("must be a mapping", "model.parameters")
        return cls(str(data["name"]), dict(params))


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, np.generic):
        return value.item()
    return value


def decode_matrix(data, where: str) -> np.ndarray:
    """Matrix from nested lists whose entries are numbers or ``{"re", "im"}`` pairs."""

    def entry(x):
        if isinstance(x, dict):
            try:
                return complex(float(x["re"]), float(x.get("im", 0.0)))
            except (KeyError, TypeError, ValueError):
                raise InvalidParameter("complex entries need numeric 're' and 'im'", where) from None
        if isinstance(x, (int, float)) and not isinstance(x, bool):
            return x
        raise InvalidParameter(f"bad matrix entry {x!r}", where)

    try:
        rows = [[entry(x) for x in row] for row in data]
        m = np.array(rows)
    except TypeError:
        raise InvalidParameter("expected a nested list", where) from None
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise InvalidParameter(f"expected a square matrix, got shape {m.shape}", where)
    if np.iscomplexobj(m) and not np.any(m.imag):
        m = m.real
    return m.astype(float) if not np.iscomplexobj(m) else m


def _vec(ts, M):
    return np.broadcast_to(M, (len(ts),) + M.shape)


def spin_half(theta_f: float) -> ParameterPath:
    """``H(t) = (cos(theta_f t) Z + sin(theta_f t) X) / 2`` for ``0 < theta_f <= 4 pi``."""
    theta_f = float(theta_f)
    if not 0.0 < theta_f <= 4 * math.pi + 1e-12:
        raise InvalidParameter(f"theta_f must lie in (0, 4 pi], got {theta_f}", "model.parameters.theta_f")

    def H(ts):
        c, s = cos_sin(theta_f * ts)
        return 0.5 * (c[:, None, None] * PAULI_Z + s[:, None, None] * PAULI_X)

    return FunctionPath(H, 2, {"name": "spin_half", "parameters": {"theta_f": theta_f}}, vectorized=True)


def conical(hx=CONICAL3_HX, hy=CONICAL3_HY, theta_span=(0.0, math.pi), radius: float = 1.0,
            check_points: int = 2048, gap_tol: float = GAP_TOL) -> ParameterPath:
    """``H(t) = radius (cos th Hx + sin th Hy)`` with ``th`` linear over ``theta_span``.

    The family is sampled at ``check_points + 1`` angles on construction.

    Raises
    ------
    DegenerateOnPath
        If two levels come closer than ``gap_tol`` at a sampled angle.
    """
    hx = np.asarray(hx, dtype=float)
    hy = np.asarray(hy, dtype=float)
    where = "model.parameters"
    if hx.shape != hy.shape or hx.ndim != 2 or hx.shape[0] != hx.shape[1]:
        raise InvalidParameter("hx and hy must be square matrices of the same size", where)
    for name, m in (("hx", hx), ("hy", hy)):
        if not np.array_equal(m, m.T):
            raise InvalidParameter("must be real symmetric", f"{where}.{name}")
    if hx.shape[0] < 2:
        raise InvalidParameter("need n >= 2", f"{where}.hx")
    theta_a, theta_b = (float(x) for x in theta_span)
    if not theta_b > theta_a:
        raise InvalidParameter("theta_span must be increasing", f"{where}.theta_span")
    radius = float(radius)
    if not radius > 0:
        raise InvalidParameter("radius must be positive", f"{where}.radius")

    def H(ts):
        c, s = cos_sin(theta_a + (theta_b - theta_a) * ts)
        return radius * (c[:, None, None] * hx + s[:, None, None] * hy)

    ts = np.linspace(0.0, 1.0, check_points + 1)
    evals = np.linalg.eigvalsh(H(ts))
    gaps = np.diff(evals, axis=1).min(axis=1)
    i = int(np.argmin(gaps))
    if gaps[i] < gap_tol:
        raise DegenerateOnPath(float(gaps[i]), gap_tol, theta_a + (theta_b - theta_a) * ts[i])
    desc = {
        "name": "conical",
        "parameters": {"hx": hx.tolist(), "hy": hy.tolist(), "theta_span": [theta_a, theta_b], "radius": radius},
    }
    return FunctionPath(H, hx.shape[0], desc, vectorized=True)


def conical3(theta_span=(0.0, math.pi), radius: float = 1.0) -> ParameterPath:
    """Three-level surrogate: ``Hx = diag(-1, 0, 1)``, ``Hy`` tridiagonal ones."""
    return conical(CONICAL3_HX, CONICAL3_HY, theta_span, radius)


def harmonic_coefficients(n: int, seed: int, harmonics: int):
    """Draw ``A0, (A1, B1), (A2, B2), ...`` for :func:`random_symmetric`.

    Uses numpy's PCG64 bit generator seeded with ``seed``; each matrix is
    an ``n x n`` block of uniform [-1, 1) draws in row-major order,
    symmetrized as ``(M + M.T) / 2``.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    mats = []
    for _ in range(1 + 2 * harmonics):
        M = rng.uniform(-1.0, 1.0, size=(n, n))
        mats.append(0.5 * (M + M.T))
    return mats[0], mats[1::2], mats[2::2]


def random_symmetric(n: int, seed: int, harmonics: int = 2) -> ParameterPath:
    """``H(t) = A0 + sum_m cos(2 pi m t) A_m + sin(2 pi m t) B_m``, a closed loop."""
    if int(n) != n or n < 2:
        raise InvalidParameter(f"n must be an integer >= 2, got {n}", "model.parameters.n")
    if int(harmonics) != harmonics or harmonics < 1:
        raise InvalidParameter(f"harmonics must be an integer >= 1, got {harmonics}", "model.parameters.harmonics")
    if int(seed) != seed or seed < 0:
        raise InvalidParameter(f"seed must be a nonnegative integer, got {seed}", "model.parameters.seed")
    n, seed, harmonics = int(n), int(seed), int(harmonics)
    A0, A, B = harmonic_coefficients(n, seed, harmonics)

    def H(ts):
        out = np.broadcast_to(A0, (len(ts), n, n)).copy()
        for m in range(1, harmonics + 1):
            c, s = cos_sin(2 * math.pi * m * ts)
            out += c[:, None, None] * A[m - 1] + s[:, None, None] * B[m - 1]
        return out

    desc = {"name": "random_symmetric", "parameters": {"n": n, "seed": seed, "harmonics": harmonics}}
    return FunctionPath(H, n, desc, vectorized=True)


def avoided_crossing(delta: float) -> ParameterPath:
    """``H(t) = [[t - 1/2, delta], [delta, 1/2 - t]]``; the two levels nearly swap for small delta."""
    delta = float(delta)
    if not delta > 0:
        raise InvalidParameter(f"delta must be positive, got {delta}", "model.parameters.delta")

    def H(ts):
        out = np.empty((len(ts), 2, 2))
        out[:, 0, 0] = ts - 0.5
        out[:, 1, 1] = 0.5 - ts
        out[:, 0, 1] = out[:, 1, 0] = delta
        return out

    return FunctionPath(H, 2, {"name": "avoided_crossing", "parameters": {"delta": delta}}, vectorized=True)


def constant(matrix) -> ParameterPath:
    """The path that stays at ``matrix``."""
    M = check_hermitian(decode_matrix(matrix, "model.parameters.matrix") if not isinstance(matrix, np.ndarray) else matrix)
    desc = {"name": "constant", "parameters": {"matrix": _jsonable(M)}}
    return FunctionPath(lambda ts: _vec(ts, M), len(M), desc, vectorized=True)


def sampled(matrices, knots=None) -> ParameterPath:
    """Linear interpolation through ``matrices`` (uniform knots unless given)."""
    mats = [decode_matrix(m, f"model.parameters.matrices[{i}]") for i, m in enumerate(matrices)]
    if len({m.shape for m in mats}) != 1:
        raise InvalidParameter("all matrices must share one shape", "model.parameters.matrices")
    for i, m in enumerate(mats):
        try:
            check_hermitian(m)
        except ValueError as exc:
            raise InvalidParameter(str(exc), f"model.parameters.matrices[{i}]") from None
    path = SampledPath(np.array(mats), knots)
    path.descriptor = {"name": "sampled", "parameters": {"matrices": _jsonable(mats)}}
    if knots is not None:
        path.descriptor["parameters"]["knots"] = [float(k) for k in knots]
    return path


def build(descriptor: ModelDescriptor | dict) -> ParameterPath:
    """Construct the path named by ``descriptor``."""
    if isinstance(descriptor, dict):
        descriptor = ModelDescriptor.from_dict(descriptor)
    p = dict(descriptor.parameters)
    name = descriptor.name

    def take(key, default=None, required=False):
        if key in p:
            return p.pop(key)
        if required:
            raise InvalidParameter("missing", f"model.parameters.{key}")
        return default

    try:
        if name == "spin_half":
            path = spin_half(_number(take("theta_f", required=True), "theta_f"))
        elif name == "conical":
            preset = take("preset")
            if preset not in (None, "conical3"):
                raise InvalidParameter(f"unknown preset {preset!r}", "model.parameters.preset")
            hx = take("hx", CONICAL3_HX)
            hy = take("hy", CONICAL3_HY)
            span = take("theta_span", [0.0, math.pi])
            if not isinstance(span, (list, tuple)) or len(span) != 2:
                raise InvalidParameter("expected [theta_a, theta_b]", "model.parameters.theta_span")
            span = [_number(x, "theta_span") for x in span]
            hx = decode_matrix(hx, "model.parameters.hx") if not isinstance(hx, np.ndarray) else hx
            hy = decode_matrix(hy, "model.parameters.hy") if not isinstance(hy, np.ndarray) else hy
            if np.iscomplexobj(hx) or np.iscomplexobj(hy):
                raise InvalidParameter("hx and hy must be real", "model.parameters")
            path = conical(hx, hy, span, _number(take("radius", 1.0), "radius"))
        elif name == "random_symmetric":
            path = random_symmetric(take("n", 3), take("seed", 0), take("harmonics", 2))
        elif name == "avoided_crossing":
            path = avoided_crossing(_number(take("delta", required=True), "delta"))
        elif name == "constant":
            path = constant(take("matrix", required=True))
        elif name == "sampled":
            path = sampled(take("matrices", required=True), take("knots"))
        else:
            raise InvalidParameter(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}", "model.name")
    except TypeError as exc:
        raise InvalidParameter(str(exc), "model.parameters") from None
    if p:
        raise InvalidParameter(f"unexpected parameter(s) {sorted(p)}", "model.parameters")
    return path


def _number(value, key: str) -> float:
    """A float, or an angle expression like ``"pi"``, ``"-pi/2"``, ``"3*pi/2"``."""
    if isinstance(value, bool):
        raise InvalidParameter("expected a number", f"model.parameters.{key}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return parse_angle(value, f"model.parameters.{key}")
    raise InvalidParameter(f"expected a number, got {value!r}", f"model.parameters.{key}")


def parse_angle(text: str, where: str = "angle") -> float:
    s = text.replace(" ", "").lower()
    if "pi" not in s:
        try:
            return float(s)
        except ValueError:
            raise InvalidParameter(f"cannot parse {text!r}", where) from None
    num, _, den = s.partition("/")
    head = num.replace("*", "")
    if not head.endswith("pi"):
        raise InvalidParameter(f"cannot parse {text!r}", where)
    coef = head[:-2]
    try:
        c = {"": 1.0, "-": -1.0, "+": 1.0}.get(coef)
        c = float(coef) if c is None else c
        d = float(den) if den else 1.0
    except ValueError:
        raise InvalidParameter(f"cannot parse {text!r}", where) from None
    return c * math.pi / d
