import random
from itertools import combinations, permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasifree.errors import DomainError
from quasifree.fock import (FockVector, GicarOperator, annihilation_matrix, apply_annihilation,
                            apply_creation, apply_monomial, apply_word, creation_matrix,
                            ideal_generator_image, monomial_operator, monomial_word,
                            number_operator, p_epsilon, p_transposition, permutation_operator,
                            pfaffian, pfaffian_expansion, quasifree_state, quasifree_word,
                            slater_state, tau_state, vector_state)
from quasifree.ground import GroundWindow, MassFunction
from quasifree.suites import random_contraction, random_projection


def test_creation_examples():
    w = GroundWindow.from_points([1, 2])
    vac = FockVector.vacuum(w)
    assert apply_creation(1, vac).coeffs == {w.mask_of([1]): 1.0}
    e2 = FockVector.basis(w, w.mask_of([2]))
    assert apply_creation(1, e2).coeffs == {w.mask_of([1, 2]): -1.0}
    assert apply_annihilation(2, vac).max_abs() == 0.0
    assert apply_creation(2, e2).max_abs() == 0.0


def _compose(w, X, Y):
    ops = [creation_matrix(w, x) for x in reversed(X)] + [annihilation_matrix(w, y) for y in Y]
    M = ops[0]
    for o in ops[1:]:
        M = M @ o
    return M.toarray()


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_monomial_matches_composition_exhaustive(N):
    w = GroundWindow.range(N)
    for n in range(1, min(3, N) + 1):
        for X in permutations(w.points, n):
            for Y in permutations(w.points, n):
                assert np.array_equal(monomial_operator(w, X, Y).to_dense(), _compose(w, X, Y))


@pytest.mark.parametrize("N", [5, 6])
def test_monomial_matches_composition_sampled(N):
    w = GroundWindow.range(N)
    rnd = random.Random(N)
    for _ in range(300):
        n = rnd.randint(1, 3)
        X = tuple(rnd.sample(w.points, n))
        Y = tuple(rnd.sample(w.points, n))
        assert np.array_equal(monomial_operator(w, X, Y).to_dense(), _compose(w, X, Y))


def test_monomial_on_vectors_matches_word():
    w = GroundWindow.range(5)
    for m in range(32):
        v = FockVector.basis(w, m)
        for X, Y in [((3,), (1,)), ((0, 4), (2, 1)), ((1, 2, 3), (4, 0, 2))]:
            a = apply_monomial(X, Y, v)
            b = apply_word(monomial_word(X, Y), v)
            assert (a - b).max_abs() == 0.0


def test_number_operator_and_support():
    w = GroundWindow.range(4)
    Nop = number_operator(w, 2).to_dense()
    assert np.array_equal(np.diag(Nop), [(m >> 2) & 1 for m in range(16)])
    v = FockVector.basis(w, w.mask_of([0, 1]))
    assert apply_monomial((3,), (2,), v).max_abs() == 0.0


def test_car_relations_sparse():
    w = GroundWindow.range(4)
    I = np.eye(16)
    for x in w:
        for y in w:
            ap, am = creation_matrix(w, x), annihilation_matrix(w, y)
            assert np.array_equal((ap @ am + am @ ap).toarray(), I * (x == y))
            assert (creation_matrix(w, x) @ creation_matrix(w, y)
                    + creation_matrix(w, y) @ creation_matrix(w, x)).nnz == 0


def test_gicar_operator_blocks():
    w = GroundWindow.range(3)
    G = monomial_operator(w, (2,), (0,))
    D = G.to_dense()
    assert np.array_equal(GicarOperator.from_dense(w, D).to_dense(), D)
    with pytest.raises(DomainError):
        GicarOperator.from_dense(w, creation_matrix(w, 0).toarray())


def test_p_epsilon_and_transpositions():
    w = GroundWindow.range(5)
    E = p_epsilon(2, w).to_dense()
    assert np.array_equal(np.diag(E), [-1.0 if m >> 2 & 1 else 1.0 for m in range(32)])
    one = GicarOperator.identity(w)
    for x, y in combinations(w.points, 2):
        P = p_transposition(x, y, w)
        assert (P @ P - one).max_abs() < 1e-14
        assert (P - permutation_operator(x, y, w)).max_abs() < 1e-14
        assert (p_transposition(y, x, w) - P).max_abs() == 0.0
        m = w.mask_of([x, y, 4 if 4 not in (x, y) else 0])
        assert P.to_dense()[m, m] == 1.0


@pytest.mark.parametrize("variant", ["minus", "plus"])
def test_ideal_generators_vanish(variant):
    for N in range(2, 6):
        w = GroundWindow.range(N)
        for x, y in permutations(w.points, 2):
            G = ideal_generator_image(x, y, w, variant)
            assert G.max_abs() < 1e-14
            Q = p_transposition(0, N - 1, w)
            assert (Q @ G).max_abs() < 1e-14 and (G @ Q).max_abs() < 1e-14


def test_quasifree_examples(rng):
    K = random_contraction(4, rng)
    assert quasifree_state(K, (), ()) == 1.0
    assert quasifree_state(K, (1,), (3,)) == pytest.approx(K.entry(3, 1))
    assert quasifree_state(K, (2, 2), (0, 1)) == pytest.approx(0.0, abs=1e-15)


def test_tau_examples():
    w = GroundWindow.range(2)
    mass = MassFunction(w, np.array([0b01, 0b10]), np.array([0.5, 0.5]))
    assert tau_state(mass, (0,), (1,)) == pytest.approx(0.5)
    assert tau_state(mass, (1,), (1,)) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        tau_state(MassFunction(w, np.array([0b01]), np.array([0.7])), (0,), (0,))


@given(st.integers(0, 10 ** 6))
def test_tau_diagonal_is_cylinder_probability(seed):
    rng = np.random.default_rng(seed)
    w = GroundWindow.range(4)
    p = rng.uniform(0, 1, 16)
    mass = MassFunction.dense(w, p / p.sum())
    X = tuple(rng.choice(4, 2, replace=False).tolist())
    exp = sum(mass.probs[m] for m in range(16) if all(m >> x & 1 for x in X))
    assert tau_state(mass, X, X) == pytest.approx(exp, rel=1e-12)


def test_pfaffian_examples(rng):
    assert pfaffian(np.array([[0, 2.5], [-2.5, 0]])) == 2.5
    assert pfaffian(np.zeros((4, 4))) == 0.0
    A = rng.standard_normal((6, 6))
    A = A - A.T
    assert pfaffian(A) ** 2 == pytest.approx(np.linalg.det(A), rel=1e-10)
    assert pfaffian(A) == pytest.approx(pfaffian_expansion(A), rel=1e-10)
    with pytest.raises(DomainError):
        pfaffian(np.ones((3, 3)))


@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_pfaffian_squares_to_det(k, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((2 * k, 2 * k))
    A = A - A.T
    assert pfaffian(A) ** 2 == pytest.approx(np.linalg.det(A), rel=1e-9, abs=1e-12)


def test_pfaffian_functional_reduces_to_determinant(rng):
    K = random_contraction(5, rng)
    for X, Y in [((1,), (2,)), ((0, 3), (4, 1)), ((1, 2, 4), (0, 2, 3))]:
        assert quasifree_word(K, monomial_word(X, Y)) == pytest.approx(
            quasifree_state(K, X, Y), abs=1e-13)


@given(st.integers(2, 6), st.integers(0, 10 ** 6))
def test_slater_state_matches_pfaffian_functional(n, seed):
    rng = np.random.default_rng(seed)
    K = random_projection(n, int(rng.integers(0, n + 1)), rng)
    psi = slater_state(K)
    assert psi.norm() == pytest.approx(1.0)
    L = int(rng.integers(1, 3)) * 2
    word = [(int(rng.choice([-1, 1])), int(rng.integers(0, n))) for _ in range(L)]
    assert vector_state(psi, word) == pytest.approx(quasifree_word(K, word), abs=1e-12)
    X = (int(rng.integers(0, n)),)
    Y = (int(rng.integers(0, n)),)
    assert vector_state(psi, monomial_word(X, Y)) == pytest.approx(
        quasifree_state(K, X, Y), abs=1e-12)
