"""Diagonal and off-diagonal phase factors of a parallel-evolution matrix.

All index arguments are 1-based, following the usual physics labelling
``sigma_jk``.  Functions taking ``result`` accept either a
:class:`~geophase.transport.TransportResult` or a bare square matrix, so the
algebra can be exercised on arbitrary unitaries.
"""

from __future__ import annotations

import itertools
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange, UndefinedConstituent

UNDEF_TOL = 1e-8
SIGN_TOL = 1e-8


@dataclass(frozen=True)
class PhaseFactor:
    """Unit-modulus phase ``z/|z|`` of an overlap ``z``, or an undefined marker.

    ``magnitude`` is ``|z|``.  When it falls below the threshold used at
    construction, ``value`` is ``None`` and the phase is undefined.
    """

    value: complex | None
    magnitude: float

    @classmethod
    def of(cls, z: complex, undef_tol: float = UNDEF_TOL) -> "PhaseFactor":
        z = complex(z)
        mag = abs(z)
        if mag < undef_tol:
            return cls(None, mag)
        return cls(z / mag, mag)

    @classmethod
    def unit(cls, value: complex) -> "PhaseFactor":
        return cls(complex(value), 1.0)

    @property
    def defined(self) -> bool:
        return self.value is not None

    @property
    def angle(self) -> float | None:
        return None if self.value is None else float(np.angle(self.value))

    def sign(self, tol: float = SIGN_TOL) -> int | None:
        """+1 or -1 if the value lies within ``tol`` of it, else ``None``."""
        if self.value is None:
            return None
        for s in (1, -1):
            if abs(self.value - s) <= tol:
                return s
        return None

    def conjugate(self) -> "PhaseFactor":
        return self if self.value is None else PhaseFactor(self.value.conjugate(), self.magnitude)

    def __mul__(self, other: "PhaseFactor") -> "PhaseFactor":
        if self.value is None or other.value is None:
            return PhaseFactor(None, min(self.magnitude, other.magnitude))
        return PhaseFactor(self.value * other.value, self.magnitude * other.magnitude)

    def __complex__(self):
        if self.value is None:
            raise ValueError(f"phase undefined (|overlap| = {self.magnitude:.3e})")
        return self.value


def phi(z):
    """``z/|z|`` elementwise; undefined entries (|z| = 0) become nan."""
    z = np.asarray(z, dtype=complex)
    mag = np.abs(z)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(mag > 0, z / np.where(mag > 0, mag, 1.0), np.nan)


@dataclass(frozen=True, order=True)
class IndexCycle:
    """Cyclic index sequence ``(j1, ..., jl)`` of distinct 1-based indexes.

    Stored rotated so the smallest index comes first; rotations of the
    same cycle therefore compare equal.
    """

    indexes: tuple

    def __init__(self, indexes):
        idx = tuple(int(i) for i in indexes)
        if not idx:
            raise ValueError("an index cycle needs at least one index")
        if len(set(idx)) != len(idx):
            raise ValueError(f"repeated index in cycle {idx}; use decompose_indexes")
        if min(idx) < 1:
            raise IndexOutOfRange(min(idx), max(idx))
        r = idx.index(min(idx))
        object.__setattr__(self, "indexes", idx[r:] + idx[:r])

    def __len__(self):
        return len(self.indexes)

    def __iter__(self):
        return iter(self.indexes)

    def links(self):
        """Consecutive pairs ``(j_i, j_{i+1})`` including the closing one."""
        idx = self.indexes
        return [(idx[i], idx[(i + 1) % len(idx)]) for i in range(len(idx))]

    def label(self) -> str:
        sep = "," if max(self.indexes) > 9 else ""
        return "γ" + sep.join(str(i) for i in self.indexes)

    def key(self) -> str:
        return "gamma_" + "_".join(str(i) for i in self.indexes)

    def __str__(self):
        return self.label()


def _matrix(result) -> np.ndarray:
    U = np.asarray(getattr(result, "U", result))
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {U.shape}")
    return U


def _check_index(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexOutOfRange(i, n)


def sigma(result, j: int, k: int, undef_tol: float = UNDEF_TOL) -> PhaseFactor:
    """Phase factor of the matrix element ``U[j][k]`` (1-based)."""
    U = _matrix(result)
    n = len(U)
    _check_index(j, n)
    _check_index(k, n)
    return PhaseFactor.of(U[j - 1, k - 1], undef_tol)


def sigma_matrix(result, undef_tol: float = UNDEF_TOL) -> list[list[PhaseFactor]]:
    U = _matrix(result)
    return [[PhaseFactor.of(z, undef_tol) for z in row] for row in U]


def gamma_diag(result, j: int, undef_tol: float = UNDEF_TOL) -> PhaseFactor:
    """Open-path diagonal factor of state ``j``."""
    return sigma(result, j, j, undef_tol)


def gamma_cycle(result, cycle, undef_tol: float = UNDEF_TOL) -> PhaseFactor:
    """Cyclic product ``sigma_{j1 j2} sigma_{j2 j3} ... sigma_{jl j1}``.

    Raises
    ------
    UndefinedConstituent
        Listing every link whose overlap magnitude is below ``undef_tol``.
    """
    if not isinstance(cycle, IndexCycle):
        cycle = IndexCycle(cycle)
    U = _matrix(result)
    for i in cycle:
        _check_index(i, len(U))
    out = PhaseFactor.unit(1.0)
    missing = []
    for j, k in cycle.links():
        s = PhaseFactor.of(U[j - 1, k - 1], undef_tol)
        if not s.defined:
            missing.append((j, k))
        out = out * s
    if missing:
        raise UndefinedConstituent(missing)
    return out


def try_gamma(result, cycle, undef_tol: float = UNDEF_TOL) -> PhaseFactor:
    """Like :func:`gamma_cycle` but returns an undefined factor instead of raising."""
    try:
        return gamma_cycle(result, cycle, undef_tol)
    except UndefinedConstituent:
        U = _matrix(result)
        mag = min(abs(U[j - 1, k - 1]) for j, k in IndexCycle(cycle).links())
        return PhaseFactor(None, float(mag))


def decompose_indexes(raw, n: int | None = None) -> list[IndexCycle]:
    """Split a cyclic index sequence with repeats into repeat-free cycles.

    The product of the returned cycles' factors equals the raw product
    ``sigma_{r1 r2} ... sigma_{rl r1}``.  Whenever an index recurs, the
    stretch since its previous occurrence closes into a cycle of its own.
    """
    raw = [int(i) for i in raw]
    if not raw:
        raise ValueError("empty index sequence")
    for i in raw:
        if i < 1 or (n is not None and i > n):
            raise IndexOutOfRange(i, n if n is not None else max(raw))
    cycles = []
    stack: list[int] = []
    for i in raw:
        if i in stack:
            p = stack.index(i)
            cycles.append(IndexCycle(stack[p:]))
            del stack[p:]
        stack.append(i)
    cycles.append(IndexCycle(stack))
    return cycles


def all_cycles(n: int, max_length: int | None = None) -> list[IndexCycle]:
    """Every repeat-free cycle on 1..n up to ``max_length`` (default n), canonical order."""
    max_length = n if max_length is None else max_length
    out = []
    for length in range(1, max_length + 1):
        for first in range(1, n + 1):
            rest = [i for i in range(first + 1, n + 1)]
            for tail in itertools.permutations(rest, length - 1):
                out.append(IndexCycle((first,) + tail))
    return out


@dataclass(frozen=True)
class IndependentSet:
    """The n diagonal, n(n-1)/2 quadratic and (n-1)(n-2)/2 cubic factors."""

    n: int
    diagonal: dict = field(default_factory=dict)
    quadratic: dict = field(default_factory=dict)
    cubic: dict = field(default_factory=dict)

    def members(self) -> "OrderedDict[IndexCycle, PhaseFactor]":
        out = OrderedDict()
        for family in (self.diagonal, self.quadratic, self.cubic):
            out.update(family)
        return out

    def __len__(self):
        return len(self.diagonal) + len(self.quadratic) + len(self.cubic)


def independent_cycles(n: int) -> list[IndexCycle]:
    diag = [IndexCycle((j,)) for j in range(1, n + 1)]
    quad = [IndexCycle((j, k)) for j, k in itertools.combinations(range(1, n + 1), 2)]
    cub = [IndexCycle((1, j, k)) for j, k in itertools.combinations(range(2, n + 1), 2)]
    return diag + quad + cub


def independent_set(result, undef_tol: float = UNDEF_TOL) -> IndependentSet:
    """Evaluate the complete independent family.

    Raises
    ------
    UndefinedConstituent
        With every link that is needed but undefined.
    """
    U = _matrix(result)
    n = len(U)
    families: dict[int, dict] = {1: {}, 2: {}, 3: {}}
    missing = []
    for cyc in independent_cycles(n):
        try:
            families[len(cyc)][cyc] = gamma_cycle(U, cyc, undef_tol)
        except UndefinedConstituent as exc:
            missing.extend(link for link in exc.links if link not in missing)
    if missing:
        raise UndefinedConstituent(missing)
    return IndependentSet(n, families[1], families[2], families[3])


def _canonical_cubic(a: int, b: int) -> list[tuple[IndexCycle, int]]:
    """``gamma_{1ab}`` as a product of independent members (a != b, both > 1)."""
    if a < b:
        return [(IndexCycle((1, a, b)), 1)]
    # swapped orientation: gamma_{1ba} gamma_{1ab} = gamma_{1a} gamma_{ab} gamma_{1b}
    lo, hi = b, a
    return [
        (IndexCycle((1, lo)), 1),
        (IndexCycle((1, hi)), 1),
        (IndexCycle((lo, hi)), 1),
        (IndexCycle((1, lo, hi)), -1),
    ]


def reduce_to_independent(cycle, n: int) -> list[tuple[IndexCycle, int]]:
    """Express ``gamma_cycle`` through independent-set members.

    Returns ``(member, exponent)`` pairs with exponent +1 or -1 (-1 meaning
    complex conjugate); a member may appear more than once.  Multiplying
    out the pairs reproduces the cycle's factor exactly whenever all the
    members are defined.
    """
    if not isinstance(cycle, IndexCycle):
        cycle = IndexCycle(cycle)
    for i in cycle:
        _check_index(i, n)
    if len(cycle) < 2:
        raise ValueError("reduction needs a cycle of length >= 2")
    idx = cycle.indexes
    terms: list[tuple[IndexCycle, int]] = []
    if idx[0] == 1:
        if len(idx) == 2:
            return [(cycle, 1)]
        inner = idx[1:]
        for a, b in zip(inner, inner[1:]):
            terms += _canonical_cubic(a, b)
        for a in inner[1:-1]:
            terms.append((IndexCycle((1, a)), -1))
    else:
        # sigma_ab = gamma_{1ab} / (sigma_1a sigma_b1) for every leg
        for a, b in zip(idx, idx[1:] + idx[:1]):
            terms += _canonical_cubic(a, b)
        for a in idx:
            terms.append((IndexCycle((1, a)), -1))
    return _cancel(terms)


def _cancel(terms):
    net: "OrderedDict[IndexCycle, int]" = OrderedDict()
    for member, e in terms:
        net[member] = net.get(member, 0) + e
    out = []
    for member, e in net.items():
        out += [(member, 1 if e > 0 else -1)] * abs(e)
    return out


def evaluate_product(result, terms, undef_tol: float = UNDEF_TOL) -> PhaseFactor:
    """Multiply out ``(member, exponent)`` pairs on ``result``."""
    out = PhaseFactor.unit(1.0)
    for member, e in terms:
        g = gamma_cycle(result, member, undef_tol)
        out = out * (g if e > 0 else g.conjugate())
    return out


def format_product(terms) -> str:
    return " ".join(m.label() + ("" if e > 0 else "*") for m, e in terms) or "1"


@dataclass
class IdentityReport:
    """Residuals of the exact relations among cyclic factors.

    ``split`` covers ``gamma_{i{j}k{m}} = gamma_{i{j}k} gamma_{k{m}i} gamma_{ik}^*``
    (length >= 4), ``swap`` covers
    ``gamma_{jkm} gamma_{jmk} = gamma_{jk} gamma_{km} gamma_{jm}``, and
    ``exchange`` covers
    ``gamma_{ijm} gamma_{mj}^* gamma_{jkm} = gamma_{ijk} gamma_{ki}^* gamma_{ikm}``.
    Each list holds ``(indexes, residual)`` tuples.
    """

    tol: float
    split: list = field(default_factory=list)
    swap: list = field(default_factory=list)
    exchange: list = field(default_factory=list)

    def max_residual(self, family: str | None = None) -> float:
        families = [family] if family else ["split", "swap", "exchange"]
        vals = [r for f in families for _, r in getattr(self, f)]
        return max(vals, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual() <= self.tol

    def summary(self) -> dict:
        return {
            f: {"checked": len(getattr(self, f)), "max_residual": self.max_residual(f)}
            for f in ("split", "swap", "exchange")
        }


def verify_identities(result, tol: float = 1e-12, undef_tol: float = UNDEF_TOL) -> IdentityReport:
    """Check every instance of the three exact relations for the given matrix."""
    U = _matrix(result)
    n = len(U)
    small = [(j + 1, k + 1) for j in range(n) for k in range(n) if abs(U[j, k]) < undef_tol]
    if small:
        raise UndefinedConstituent(small)
    S = phi(U)

    def g(*idx):
        out = 1.0 + 0j
        for a, b in zip(idx, idx[1:] + idx[:1]):
            out *= S[a - 1, b - 1]
        return out

    report = IdentityReport(tol)
    labels = range(1, n + 1)
    for length in range(4, n + 1):
        for seq in itertools.permutations(labels, length):
            i = seq[0]
            for p in range(2, length - 1):
                k = seq[p]
                lhs = g(*seq)
                rhs = g(*seq[: p + 1]) * g(*seq[p:], i) * np.conj(g(i, k))
                report.split.append((seq, float(abs(lhs - rhs))))
    for j, k, m in itertools.permutations(labels, 3):
        lhs = g(j, k, m) * g(j, m, k)
        rhs = g(j, k) * g(k, m) * g(j, m)
        report.swap.append(((j, k, m), float(abs(lhs - rhs))))
    for i, j, k, m in itertools.permutations(labels, 4):
        lhs = g(i, j, m) * np.conj(g(m, j)) * g(j, k, m)
        rhs = g(i, j, k) * np.conj(g(k, i)) * g(i, k, m)
        report.exchange.append(((i, j, k, m), float(abs(lhs - rhs))))
    return report


def _angles_of_independent(theta: np.ndarray, members) -> np.ndarray:
    S = np.exp(1j * theta)
    return np.array([complex(gamma_cycle(S, m)) for m in members])


def independence_rank(n: int, samples: int = 1, seed: int = 0, h: float = 1e-6) -> int:
    """Numerical rank of d(independent phase angles)/d(sigma angles).

    The ``n*n`` angles of an all-defined sigma matrix are drawn uniformly;
    the Jacobian of the ``n*n - n + 1`` independent phase angles is built by
    central differences.  Returns the maximum rank over ``samples`` draws.
    """
    if n < 1 or samples < 1:
        raise ValueError("need n >= 1 and samples >= 1")
    members = independent_cycles(n)
    rng = np.random.default_rng(seed)
    best = 0
    for _ in range(samples):
        theta = rng.uniform(-np.pi, np.pi, size=(n, n))
        J = np.empty((len(members), n * n))
        for col in range(n * n):
            step = np.zeros(n * n)
            step[col] = h
            plus = _angles_of_independent(theta + step.reshape(n, n), members)
            minus = _angles_of_independent(theta - step.reshape(n, n), members)
            # ratio first, so branch cuts of the angle never enter
            J[:, col] = np.angle(plus / minus) / (2 * h)
        best = max(best, int(np.linalg.matrix_rank(J, tol=1e-6)))
    return best


def regauge_matrix(U, phases) -> np.ndarray:
    """``U`` after multiplying the initial states by ``exp(i phases)``.

    Entry ``(j, k)`` picks up ``exp(i (phases[k] - phases[j]))``.
    """
    d = np.exp(1j * np.asarray(phases, dtype=float))
    return np.conj(d)[:, None] * np.asarray(U) * d[None, :]
