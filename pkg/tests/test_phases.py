import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geophase.errors import IndexOutOfRange, UndefinedConstituent
from geophase.phases import (
    IndexCycle,
    PhaseFactor,
    all_cycles,
    decompose_indexes,
    evaluate_product,
    format_product,
    gamma_cycle,
    gamma_diag,
    independence_rank,
    independent_cycles,
    independent_set,
    reduce_to_independent,
    regauge_matrix,
    sigma,
    sigma_matrix,
    try_gamma,
    verify_identities,
)

from conftest import random_unitary

R2 = math.sqrt(2) / 2
SPIN_PI = np.array([[0.0, 1.0], [-1.0, 0.0]])
SPIN_HALF_PI = np.array([[R2, R2], [-R2, R2]])


def direct(U, raw):
    """Raw sigma product around an index sequence (repeats allowed)."""
    S = U / np.abs(U)
    out = 1.0 + 0j
    for a, b in zip(raw, raw[1:] + raw[:1]):
        out *= S[a - 1, b - 1]
    return out


def test_phase_factor_basics():
    p = PhaseFactor.of(3j)
    assert p.defined and p.value == 1j and p.magnitude == 3
    assert p.angle == pytest.approx(math.pi / 2)
    assert p.sign() is None
    assert PhaseFactor.of(-2).sign() == -1
    q = PhaseFactor.of(1e-9)
    assert not q.defined and q.magnitude == 1e-9 and q.sign() is None
    assert not (p * q).defined
    assert complex(p.conjugate()) == -1j
    with pytest.raises(ValueError):
        complex(q)


def test_sigma_spin_pi():
    assert sigma(SPIN_PI, 1, 2).sign() == 1
    assert sigma(SPIN_PI, 2, 1).sign() == -1
    s11 = sigma(SPIN_PI, 1, 1)
    assert not s11.defined and s11.magnitude == 0.0


def test_sigma_identity_and_random():
    for row_j, row in enumerate(sigma_matrix(np.eye(3))):
        assert complex(row[row_j]) == 1
    U = random_unitary(3, seed=1, min_entry=1e-3)
    for row in sigma_matrix(U):
        for p in row:
            assert p.defined and abs(abs(complex(p)) - 1) < 1e-12


def test_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        sigma(SPIN_PI, 1, 3)
    with pytest.raises(IndexOutOfRange):
        gamma_cycle(SPIN_PI, (1, 3))
    with pytest.raises(IndexOutOfRange):
        decompose_indexes((1, 4), 3)


def test_gamma_diag_examples():
    assert complex(gamma_diag(-np.eye(2), 1)) == -1
    assert complex(gamma_diag(-np.eye(2), 2)) == -1
    assert gamma_diag(SPIN_HALF_PI, 1).sign() == 1
    assert gamma_diag(SPIN_HALF_PI, 2).sign() == 1
    assert complex(gamma_diag(np.eye(4), 3)) == 1


def test_gamma_cycle_examples():
    assert complex(gamma_cycle(SPIN_PI, (1, 2))) == -1
    assert gamma_cycle(SPIN_HALF_PI, (1, 2)).sign() == -1
    assert gamma_cycle(SPIN_HALF_PI, (2,)) == gamma_diag(SPIN_HALF_PI, 2)


def test_gamma_cycle_undefined_lists_links():
    U = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
    with pytest.raises(UndefinedConstituent) as exc:
        gamma_cycle(U, (1, 3, 2))
    assert set(exc.value.links) == {(1, 3), (3, 2), (2, 1)}
    assert complex(gamma_cycle(U, (1, 2, 3))) == 1
    assert not try_gamma(U, (1, 3)).defined


def test_index_cycle_canonical():
    assert IndexCycle((3, 1, 2)).indexes == (1, 2, 3)
    assert IndexCycle((2, 3, 1)) == IndexCycle((1, 2, 3))
    assert IndexCycle((1, 3, 2)) != IndexCycle((1, 2, 3))
    assert IndexCycle((2, 1)).label() == "γ12"
    assert IndexCycle((1, 2)).key() == "gamma_1_2"
    with pytest.raises(ValueError):
        IndexCycle((1, 2, 1))
    with pytest.raises(ValueError):
        IndexCycle(())


def test_decompose_examples():
    assert decompose_indexes((2, 3, 1)) == [IndexCycle((1, 2, 3))]
    assert decompose_indexes((1, 3, 1, 2)) == [IndexCycle((1, 3)), IndexCycle((1, 2))]
    assert decompose_indexes((1, 1)) == [IndexCycle((1,)), IndexCycle((1,))]
    U = random_unitary(3, seed=2, min_entry=1e-3)
    lhs = direct(U, [1, 3, 1, 2])
    rhs = complex(gamma_cycle(U, (1, 3))) * complex(gamma_cycle(U, (1, 2)))
    assert abs(lhs - rhs) < 1e-12
    assert abs(complex(gamma_cycle(U, (1,))) ** 2 - direct(U, [1, 1])) < 1e-12


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(1, n), min_size=1, max_size=9))),
       st.integers(0, 50))
def test_decomposition_consistency(n_raw, seed):
    n, raw = n_raw
    U = random_unitary(n, seed, min_entry=1e-3)
    parts = decompose_indexes(raw, n)
    assert sum(len(c) for c in parts) == len(raw)
    assert all(len(set(c.indexes)) == len(c) for c in parts)
    prod = 1.0 + 0j
    for c in parts:
        prod *= complex(gamma_cycle(U, c))
    assert abs(prod - direct(U, list(raw))) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.permutations([1, 2, 3, 4, 5]), st.integers(2, 5), st.integers(1, 4), st.integers(0, 100))
def test_cyclic_invariance(perm, length, shift, seed):
    U = random_unitary(5, seed, min_entry=1e-3)
    seq = list(perm[:length])
    rotated = seq[shift % length:] + seq[: shift % length]
    assert gamma_cycle(U, seq) == gamma_cycle(U, rotated)
    assert abs(complex(gamma_cycle(U, seq)) - direct(U, seq)) < 1e-12


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 7), (4, 13), (5, 21)])
def test_independent_set_counts(n, count):
    U = random_unitary(n, seed=n, min_entry=1e-3)
    s = independent_set(U)
    assert len(s) == count == len(independent_cycles(n))
    assert len(s.diagonal) == n
    assert len(s.quadratic) == n * (n - 1) // 2
    assert len(s.cubic) == (n - 1) * (n - 2) // 2


def test_independent_set_n2_members():
    U = random_unitary(2, seed=3, min_entry=1e-3)
    labels = [c.label() for c in independent_set(U).members()]
    assert labels == ["γ1", "γ2", "γ12"]


def test_independent_set_reports_missing_links():
    with pytest.raises(UndefinedConstituent) as exc:
        independent_set(SPIN_PI)
    assert (1, 1) in exc.value.links and (2, 2) in exc.value.links


def test_reduction_examples():
    assert reduce_to_independent((1, 2), 3) == [(IndexCycle((1, 2)), 1)]
    terms = reduce_to_independent((2, 3, 4), 4)
    assert all(m in independent_cycles(4) for m, _ in terms)
    assert format_product(terms).count("γ") == len(terms)
    for seed in range(20):
        U = random_unitary(4, seed, min_entry=1e-3)
        assert abs(complex(evaluate_product(U, terms)) - direct(U, [2, 3, 4])) < 1e-12
        # split identity instance for (1,2,3,4)
        eq9 = direct(U, [1, 2, 3]) * direct(U, [3, 4, 1]) * np.conj(direct(U, [1, 3]))
        assert abs(eq9 - direct(U, [1, 2, 3, 4])) < 1e-12
        t = reduce_to_independent((1, 2, 3, 4), 4)
        assert abs(complex(evaluate_product(U, t)) - eq9) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_reduction_soundness(n):
    members = set(independent_cycles(n))
    for seed in range(5):
        U = random_unitary(n, 100 + seed, min_entry=1e-3)
        for c in all_cycles(n):
            if len(c) < 2:
                continue
            terms = reduce_to_independent(c, n)
            assert {m for m, _ in terms} <= members
            assert abs(complex(evaluate_product(U, terms)) - complex(gamma_cycle(U, c))) < 1e-12


def test_reduction_needs_length_two():
    with pytest.raises(ValueError):
        reduce_to_independent((1,), 3)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_identities_random(n):
    rep = verify_identities(random_unitary(n, seed=11, min_entry=1e-3))
    assert rep.passed and rep.max_residual() <= 1e-12
    assert len(rep.swap) == n * (n - 1) * (n - 2)
    if n >= 4:
        assert rep.split and rep.exchange


def test_identities_identity_and_spin():
    U = np.eye(3) + 0.0
    with pytest.raises(UndefinedConstituent):
        verify_identities(U)
    rep = verify_identities(SPIN_HALF_PI)
    assert rep.passed
    # constant-phase matrix stands in for "all gammas equal 1"
    rep = verify_identities(np.full((3, 3), 1 / math.sqrt(3)))
    assert rep.max_residual() == 0.0


def test_identities_hold_without_unitarity():
    # the relations are algebraic in the sigmas, so any all-nonzero matrix satisfies them
    A = np.random.default_rng(5).normal(size=(4, 4)) + 1j
    rep = verify_identities(A)
    assert rep.passed
    assert {k: v["checked"] for k, v in rep.summary().items()} == {"split": 24, "swap": 24, "exchange": 24}


@pytest.mark.parametrize("n,rank", [(1, 1), (2, 3), (3, 7), (4, 13)])
def test_independence_rank(n, rank):
    assert independence_rank(n, samples=2) == rank


def test_gauge_covariance():
    rng = np.random.default_rng(3)
    for _ in range(10):
        U = random_unitary(4, int(rng.integers(1000)), min_entry=1e-3)
        phases = rng.uniform(0, 2 * math.pi, 4)
        V = regauge_matrix(U, phases)
        for j in range(1, 5):
            for k in range(1, 5):
                expected = complex(sigma(U, j, k)) * np.exp(1j * (phases[k - 1] - phases[j - 1]))
                assert abs(complex(sigma(V, j, k)) - expected) < 1e-12
        for c in all_cycles(4):
            assert abs(complex(gamma_cycle(V, c)) - complex(gamma_cycle(U, c))) < 1e-10
