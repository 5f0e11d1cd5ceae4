import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasifree.errors import ConstructionError, DomainError
from quasifree.ground import Configuration, GroundWindow
from quasifree.orthopoly import (EnsembleSpec, build_ops, cd_kernel, cd_kernel_ratio,
                                 ensemble_average, ensemble_mass, ensemble_measure,
                                 monic_values, sf_closed_form, weight_family)


def test_two_point_uniform():
    w = GroundWindow.range(2)
    ops = build_ops(weight_family("uniform", w), 1)
    assert ops.h == pytest.approx([2.0, 0.5])
    P = monic_values(ops, [0, 1], 1)
    assert P[0] == pytest.approx([1, 1])
    assert P[1] == pytest.approx([-0.5, 0.5])


def test_charlier_norm_is_e():
    w = GroundWindow.range(21)
    ops = build_ops(weight_family("charlier", w, theta=1.0), 3)
    assert ops.h[0] == pytest.approx(sum(1 / math.factorial(k) for k in range(21)), rel=1e-14)
    assert ops.h[0] == pytest.approx(math.e, rel=1e-15)
    # charlier norms are h_k = k! theta^k e^theta
    assert ops.h == pytest.approx([math.factorial(k) * math.e for k in range(4)], rel=1e-9)


def test_single_site():
    w = GroundWindow.from_points([3])
    wf = weight_family("table", w, values=[2.5])
    ops = build_ops(wf, 0)
    assert ops.h[0] == pytest.approx(2.5)
    assert monic_values(ops, [3], 0)[0, 0] == 1.0


def test_too_many_polynomials():
    w = GroundWindow.range(3)
    with pytest.raises(DomainError):
        build_ops(weight_family("uniform", w), 3)


def test_degenerate_weight():
    w = GroundWindow.range(4)
    with pytest.raises((ConstructionError, DomainError)):
        build_ops(weight_family("table", w, values=[1.0, 0.0, 0.0, 0.0]), 2)


def test_cd_kernel_examples():
    w = GroundWindow.range(2)
    ops = build_ops(weight_family("uniform", w), 1)
    assert np.allclose(cd_kernel(ops, 1).entries, 0.5)
    assert np.allclose(cd_kernel(ops, 2).entries, np.eye(2))
    assert np.all(cd_kernel(ops, 0).entries == 0)


@given(st.integers(3, 9), st.integers(1, 4), st.integers(0, 10 ** 6))
def test_cd_kernel_is_rank_n_projection(L, N, seed):
    N = min(N, L - 1)
    rng = np.random.default_rng(seed)
    w = GroundWindow.range(L)
    wf = weight_family("table", w, values=rng.uniform(0.1, 3.0, L))
    ops = build_ops(wf, N)
    K = cd_kernel(ops, N)
    assert K.rank() == N
    assert np.abs(K.entries @ K.entries - K.entries).max() < 1e-12


@given(st.integers(4, 9), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_cd_sum_equals_ratio_form(L, N, seed):
    rng = np.random.default_rng(seed)
    w = GroundWindow.range(L)
    wf = weight_family("table", w, values=rng.uniform(0.1, 3.0, L))
    ops = build_ops(wf, N)
    K = cd_kernel(ops, N)
    for x, y in combinations(range(L), 2):
        assert cd_kernel_ratio(ops, N, x, y) == pytest.approx(K.entry(x, y), abs=1e-11)


def test_ensemble_masses():
    w = GroundWindow.range(2)
    ops = build_ops(weight_family("uniform", w), 1)
    _, m = ensemble_measure(EnsembleSpec(ops, 1))
    assert m / m.sum() == pytest.approx([0.5, 0.5])
    _, m2 = ensemble_measure(EnsembleSpec(ops, 2))
    assert m2.size == 1 and m2[0] / m2.sum() == 1.0
    ops3 = build_ops(weight_family("table", w, values=[1.0, 3.0]), 0)
    _, m3 = ensemble_measure(EnsembleSpec(ops3, 1))
    assert m3 / m3.sum() == pytest.approx([0.25, 0.75])


def test_ensemble_masses_sum_to_one():
    w = GroundWindow.range(7)
    ops = build_ops(weight_family("charlier", w, theta=1.3), 3)
    _, m = ensemble_measure(EnsembleSpec(ops, 3))
    assert m.sum() == pytest.approx(1.0, rel=1e-12)


def test_ensemble_mass_of_explicit_configuration():
    w = GroundWindow.range(3)
    ops = build_ops(weight_family("uniform", w), 1)
    spec = EnsembleSpec(ops, 2)
    # unordered configurations: (x-y)^2 / (h0 h1) with h0 = 3, h1 = 2
    assert ensemble_mass(spec, Configuration.of(w, [0, 2])) == pytest.approx(4 / 6)
    assert ensemble_mass(spec, Configuration.of(w, [0, 1])) == pytest.approx(1 / 6)


def test_sf_small_cases():
    w = GroundWindow.range(3)
    ops = build_ops(weight_family("uniform", w), 2)
    for x in range(3):
        for y in range(3):
            assert sf_closed_form(ops, 1, (x,), (y,)) == pytest.approx(1.0)
    for x in range(3):
        for y in range(3):
            bf = np.mean([(x - u) * (y - u) for u in range(3)])
            assert sf_closed_form(ops, 2, (x,), (y,)) == pytest.approx(bf)
            assert ensemble_average(ops, 2, (x,), (y,)) == pytest.approx(bf)


@given(st.integers(0, 10 ** 6))
def test_sf_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    L = int(rng.integers(3, 8))
    N = int(rng.integers(1, min(4, L - 1) + 1))
    n = int(rng.integers(1, N + 1))
    w = GroundWindow.range(L)
    ops = build_ops(weight_family("table", w, values=rng.uniform(0.3, 2.0, L)), N)
    X = tuple(rng.choice(L, n, replace=False).tolist())
    Y = tuple(rng.choice(L, n, replace=False).tolist())
    cf = sf_closed_form(ops, N, X, Y)
    assert cf == pytest.approx(ensemble_average(ops, N, X, Y), rel=1e-9, abs=1e-9)


def test_weight_families_and_moments():
    w = GroundWindow.range(10)
    for name, kw in [("charlier", {"theta": 2.0}), ("meixner", {"beta": 1.5, "c": 0.4}),
                     ("krawtchouk", {"M": 9, "p": 0.3}), ("uniform", {})]:
        wf = weight_family(name, w, **kw)
        assert np.all(np.isfinite(wf.logw))
        assert wf.check_moments(4)
    with pytest.raises(DomainError):
        weight_family("charlier", w, theta=-1.0)
    with pytest.raises(DomainError):
        weight_family("nope", w)
