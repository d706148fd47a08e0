"""Endpoint permutations of the eigenbasis and their well-defined phase factors.

When the final eigenstates are (approximately) a permutation ``P`` of the
initial ones, only the sigmas on the links ``j -> P_j`` survive.  Each cycle
of ``P`` then carries one well-defined cyclic factor, and unit determinant
of ``U`` ties their product to the sign of ``P``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionTooLarge, InvalidParameter
from .phases import UNDEF_TOL, IndexCycle, PhaseFactor, _matrix, gamma_cycle

TABLE_CAP = 8


@dataclass(frozen=True)
class Permutation:
    """Bijection of 1..n given by its images ``(P_1, ..., P_n)``."""

    images: tuple

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise InvalidParameter(f"{imgs} is not a permutation of 1..{len(imgs)}", "permutation")
        object.__setattr__(self, "images", imgs)

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def cycles(self) -> list[tuple]:
        """Disjoint cycles ``(j, P_j, P_{P_j}, ...)``, each starting at its smallest element."""
        seen = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            j = self.images[start - 1]
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self.images[j - 1]
            out.append(tuple(cyc))
        return out

    @property
    def cycle_type(self) -> tuple:
        return tuple(sorted((len(c) for c in self.cycles), reverse=True))

    @property
    def sign(self) -> int:
        return -1 if (self.n - len(self.cycles)) % 2 else 1

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.n + 1))

    def __str__(self):
        return " ".join(str(i) for i in self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, cycles) -> "Permutation":
        images = list(range(1, n + 1))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a - 1] = b
        return cls(tuple(images))


@dataclass(frozen=True)
class DeterminantCondition:
    """``prod(factors) = rhs`` with ``rhs`` equal to the sign of the permutation."""

    factors: tuple
    rhs: int

    def __str__(self):
        return " ".join(f.label() for f in self.factors) + f" = {self.rhs}"

    def evaluate(self, result, undef_tol: float = UNDEF_TOL) -> PhaseFactor:
        out = PhaseFactor.unit(1.0)
        for f in self.factors:
            out = out * gamma_cycle(result, f, undef_tol)
        return out

    def residual(self, result, undef_tol: float = UNDEF_TOL) -> float:
        return abs(complex(self.evaluate(result, undef_tol)) - self.rhs)


@dataclass(frozen=True)
class PermutationClassification:
    permutation: Permutation
    well_defined: tuple
    determinant_condition: DeterminantCondition
    real_case_count: int

    @property
    def starred(self) -> bool:
        """True for the order-reversing permutation produced by H(s2) = -H(s1).

        A single level has nothing to reverse, so n = 1 is never starred.
        """
        P = self.permutation
        return P.n > 1 and P == symmetry_permutation(P.n)


def classify(P: Permutation) -> PermutationClassification:
    well = tuple(IndexCycle(c) for c in P.cycles)
    return PermutationClassification(
        permutation=P,
        well_defined=well,
        determinant_condition=DeterminantCondition(well, P.sign),
        real_case_count=2 ** (len(well) - 1),
    )


def symmetry_permutation(n: int) -> Permutation:
    """``j -> n + 1 - j``: energy order reverses when the Hamiltonian changes sign."""
    if n < 1:
        raise InvalidParameter("n must be >= 1", "n")
    return Permutation(tuple(range(n, 0, -1)))


def count_real_cases_oracle(P: Permutation) -> int:
    """Brute-force count of the distinct value tuples of the well-defined factors.

    Enumerates all real sign assignments of ``sigma_{j, P_j}`` whose product
    equals the sign of ``P``.
    """
    cycles = P.cycles
    seen = set()
    for signs in itertools.product((1, -1), repeat=P.n):
        if math.prod(signs) != P.sign:
            continue
        seen.add(tuple(math.prod(signs[j - 1] for j in cyc) for cyc in cycles))
    return len(seen)


def _representative(cycle_type: tuple, n: int) -> Permutation:
    """Consecutive cycles on 1..n in descending length, e.g. (3, 1) -> 2 3 1 4."""
    cycles, start = [], 1
    for length in cycle_type:
        cycles.append(tuple(range(start, start + length)))
        start += length
    return Permutation.from_cycles(n, cycles)


def _class_order(ct: tuple):
    return ct


def _within_class_order(P: Permutation):
    return tuple(c for c in P.cycles if len(c) > 1)


def table_for_n(n: int) -> list[PermutationClassification]:
    """One classification per permutation of 1..n.

    Rows are grouped by cycle type (identity first); within a group they
    are ordered by their nontrivial cycles.
    """
    if n < 1:
        raise InvalidParameter("n must be >= 1", "n")
    if n > TABLE_CAP:
        raise DimensionTooLarge(n, TABLE_CAP)
    perms = [Permutation(p) for p in itertools.permutations(range(1, n + 1))]
    perms.sort(key=lambda P: (_class_order(P.cycle_type), _within_class_order(P)))
    return [classify(P) for P in perms]


@dataclass(frozen=True)
class TableGroup:
    """A cycle-type class: a representative row plus how many permutations share it."""

    representative: PermutationClassification
    multiplicity: int
    members: tuple = field(repr=False)

    @property
    def cycle_type(self) -> tuple:
        return self.representative.permutation.cycle_type


def group_table(rows: list[PermutationClassification]) -> list[TableGroup]:
    """Collapse rows by cycle type.

    The representative is the order-reversing permutation when it belongs
    to the class, otherwise the permutation made of consecutive cycles.
    """
    groups: dict[tuple, list] = {}
    for row in rows:
        groups.setdefault(row.permutation.cycle_type, []).append(row)
    out = []
    for ct, members in groups.items():
        n = members[0].permutation.n
        starred = [m for m in members if m.starred]
        if starred:
            rep = starred[0]
        else:
            target = _representative(ct, n)
            rep = next(m for m in members if m.permutation == target)
        out.append(TableGroup(rep, len(members), tuple(members)))
    return out


@dataclass(frozen=True)
class DominanceReport:
    """Candidate endpoint permutation and per-row dominance margins.

    ``margins[j]`` is ``|U[j, P_j]| / (n * max_{k != P_j} |U[j, k]|)`` for the
    row's largest entry ``P_j``; ``detected`` is set only if the candidate map
    is a bijection and every margin exceeds the dominance factor.
    """

    detected: Permutation | None
    candidate: tuple
    margins: tuple
    dominance_factor: float


def detect_permutation(result, dominance_factor: float = 10.0) -> DominanceReport:
    if not dominance_factor > 1:
        raise InvalidParameter("dominance factor must exceed 1", "tolerances.dominance_factor")
    A = np.abs(_matrix(result))
    n = len(A)
    candidate = tuple(int(k) + 1 for k in np.argmax(A, axis=1))
    margins = []
    for j in range(n):
        rest = np.delete(A[j], candidate[j] - 1)
        biggest = rest.max() if rest.size else 0.0
        margins.append(float("inf") if biggest == 0 else float(A[j, candidate[j] - 1] / (n * biggest)))
    detected = None
    if sorted(candidate) == list(range(1, n + 1)) and all(m > dominance_factor for m in margins):
        detected = Permutation(candidate)
    return DominanceReport(detected, candidate, tuple(margins), float(dominance_factor))


def determinant_check(result, P: Permutation, undef_tol: float = UNDEF_TOL) -> tuple[PhaseFactor, float]:
    """Product of the well-defined factors of ``P`` on ``result`` and its distance from sign(P)."""
    cond = classify(P).determinant_condition
    value = cond.evaluate(result, undef_tol)
    return value, abs(complex(value) - cond.rhs)
