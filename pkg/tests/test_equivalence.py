import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasifree.equivalence import (hs_partial_sums, index_estimate,
                                   jacobi_asymptotic_ratio, jacobi_hs_table,
                                   jacobi_hs_uniformity, principal_angles, verdict)
from quasifree.errors import DomainError
from quasifree.ground import GroundWindow
from quasifree.kernels import (KernelMatrix, discrete_hermite, discrete_jacobi_symmetric,
                               sine_kernel)
from quasifree.suites import random_contraction, random_projection


def test_hs_identical_kernels_vanish():
    J = discrete_jacobi_symmetric(0.5)
    hs = hs_partial_sums(J, J, [16, 64])
    assert hs.S == (0.0, 0.0)


def test_hs_symmetric_in_arguments():
    a, b = discrete_jacobi_symmetric(0.0), discrete_jacobi_symmetric(0.8)
    assert hs_partial_sums(a, b, [64, 300]).S == hs_partial_sums(b, a, [64, 300]).S


def test_hs_matches_dense_difference():
    a, b = discrete_hermite("+", 0.0), discrete_hermite("+", 0.5)
    w = GroundWindow.interval(0, 40, "half_line")
    D = a.materialize(w).entries - b.materialize(w).entries
    assert hs_partial_sums(a, b, [40]).S[0] == pytest.approx((D * D).sum(), rel=1e-13)
    s1, s2 = sine_kernel(1.0), sine_kernel(1.2)
    wz = GroundWindow.interval(-10, 10, "full_line")
    D = s1.materialize(wz).entries - s2.materialize(wz).entries
    assert hs_partial_sums(s1, s2, [10]).S[0] == pytest.approx((D * D).sum(), rel=1e-13)


def test_hs_nondecreasing_and_block_independent():
    a, b = discrete_jacobi_symmetric(0.0), discrete_jacobi_symmetric(1.0)
    hs = hs_partial_sums(a, b, [10, 100, 500])
    assert all(y >= x for x, y in zip(hs.S, hs.S[1:]))
    other = hs_partial_sums(a, b, [10, 100, 500], block=64)
    assert other.S == pytest.approx(hs.S, rel=1e-13)


def test_hs_rejects_mixed_models():
    with pytest.raises(DomainError):
        hs_partial_sums(sine_kernel(1.0), discrete_jacobi_symmetric(0.0), [8])


def test_jacobi_parity_structure_is_exact():
    a, b = discrete_jacobi_symmetric(0.0), discrete_jacobi_symmetric(1.7)
    w = GroundWindow.interval(0, 60, "half_line")
    D = a.materialize(w).entries - b.materialize(w).entries
    x, y = np.meshgrid(range(61), range(61), indexing="ij")
    assert np.all(D[(x - y) % 2 == 0] == 0.0)


def test_index_examples(rng):
    K = random_projection(5, 2, rng)
    assert index_estimate(K, K) == 0
    w = GroundWindow.range(4)
    L1 = KernelMatrix(w, np.diag([1.0, 1.0, 0, 0]), True)
    L2 = KernelMatrix(w, np.diag([0, 0, 1.0, 0]), True)
    assert index_estimate(L1, L2) == 1
    assert index_estimate(L2, L1) == -1
    with pytest.raises(DomainError):
        index_estimate(random_contraction(4, rng), L1)


@given(st.integers(3, 9), st.integers(0, 10 ** 6))
def test_index_of_nearby_projections_is_zero(n, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, n))
    K1 = random_projection(n, k, rng)
    H = rng.standard_normal((n, n))
    H = 0.05 * (H - H.T)
    w, V = np.linalg.eigh(1j * H)
    U = (V * np.exp(-1j * w)) @ V.conj().T
    P = (U @ K1.entries @ U.conj().T).real
    K2 = KernelMatrix(K1.window, 0.5 * (P + P.T), True)
    assert np.linalg.norm(K1.entries - K2.entries, 2) < 1
    assert index_estimate(K1, K2) == 0


@given(st.integers(0, 10 ** 6))
def test_index_invariant_under_permutation(seed):
    rng = np.random.default_rng(seed)
    n = 6
    K1 = random_projection(n, 3, rng)
    K2 = random_projection(n, 2, rng)
    perm = rng.permutation(n)
    P = np.eye(n)[perm]
    K1p = KernelMatrix(K1.window, P @ K1.entries @ P.T, True)
    K2p = KernelMatrix(K2.window, P @ K2.entries @ P.T, True)
    assert index_estimate(K1, K2) == index_estimate(K1p, K2p)


def test_principal_angles(rng):
    K = random_projection(5, 2, rng)
    assert np.allclose(principal_angles(K, K), 0.0, atol=1e-7)


def test_verdicts_on_finite_and_identical_kernels(rng):
    K = random_projection(5, 2, rng)
    v = verdict(K, K)
    assert v.verdict == "equivalent" and v.index_estimate == 0
    J = discrete_jacobi_symmetric(0.3)
    v = verdict(J, J, cutoffs=(32, 64))
    assert v.verdict == "equivalent" and v.to_json()["S"] == [0.0, 0.0]
    out = v.to_json()
    assert set(out) >= {"verdict", "S", "cauchy_gap", "index", "policy"}


def test_verdict_inconclusive_when_sums_still_moving():
    # a cutoff grid too coarse to show a plateau or sustained growth
    v = verdict(discrete_jacobi_symmetric(0.0), discrete_jacobi_symmetric(4.5), cutoffs=(2, 4))
    assert v.verdict == "inconclusive"


def test_jacobi_uniformity_table():
    T = jacobi_hs_table([0.0, 0.5, 1.0], 128)
    assert np.all(np.diag(T) == 0.0)
    assert np.allclose(T, T.T, rtol=1e-13, atol=0)
    rep = jacobi_hs_uniformity([0.0, 0.5, 1.0], 128)
    assert rep["continuous"] and rep["diagonal_zero"]
    with pytest.raises(DomainError):
        jacobi_hs_table([-1.0, 0.0], 16)
    with pytest.raises(DomainError):
        jacobi_hs_table([0.0, 6.0], 16)


def test_jacobi_ratio_tends_to_one():
    prev = None
    for n in (20, 50, 100, 200):
        r = jacobi_asymptotic_ratio(n, n, 0.0)
        assert abs(r["corrected"] - 1) < 2.0 / n
        assert r["literal"] == pytest.approx(r["corrected"] / math.pi, rel=1e-12)
        if prev is not None:
            assert abs(r["corrected"] - 1) < abs(prev - 1)
        prev = r["corrected"]
    odd = jacobi_asymptotic_ratio(51, 40, 0.5)
    assert abs(odd["corrected"] - 1) < 0.05
