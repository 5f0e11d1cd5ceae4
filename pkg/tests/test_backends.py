import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasifree import _hot
from quasifree._accel import BACKEND, HAVE_NUMBA

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not importable")


def _hermite_args(m, kmax, seed):
    rng = np.random.default_rng(seed)
    t = np.ascontiguousarray(rng.uniform(-30, 30, m))
    k = np.arange(kmax + 2, dtype=float)
    logf0 = -0.25 * math.log(math.pi) - 0.5 * t * t
    return _hot._prep(t, np.zeros(kmax + 1), np.sqrt(k / 2), logf0, 1.0)


@needs_numba
@given(st.integers(0, 10 ** 6), st.integers(1, 61), st.data())
def test_sign_kernels_agree(seed, nsites, data):
    rng = np.random.default_rng(seed)
    n = data.draw(st.integers(1, min(3, nsites)))
    xi = rng.choice(nsites, n, replace=False)
    yi = rng.choice(nsites, n, replace=False)
    masks = rng.integers(0, 1 << min(nsites, 62), 500, dtype=np.int64)
    args = _hot.sign_masks(xi, yi)
    a = _hot.signs_numpy(masks, *args)
    b = _hot.signs_numba(masks, *args)
    assert np.array_equal(a, b)


@needs_numba
@pytest.mark.parametrize("kmax", [0, 1, 10, 200, 1500])
def test_recurrence_table_agrees(kmax):
    t, a, b, logf0, sgn0 = _hermite_args(300, kmax, kmax)
    A = _hot.recurrence_table_numpy(t, a, b, logf0, sgn0, kmax)
    B = _hot.recurrence_table_numba(t, a, b, logf0, sgn0, kmax)
    assert np.all(np.isfinite(A))
    assert np.abs(A - B).max() <= 1e-13


@needs_numba
@pytest.mark.parametrize("kmax", [0, 5, 400, 3000])
def test_recurrence_sqsum_agrees(kmax):
    t, a, b, logf0, sgn0 = _hermite_args(2000, kmax, kmax + 1)
    w = np.full(t.size, 0.01)
    A = _hot.recurrence_sqsum_numpy(t, w, a, b, logf0, sgn0, kmax)
    B = _hot.recurrence_sqsum_numba(t, w, a, b, logf0, sgn0, kmax)
    assert np.abs(A - B).max() <= 1e-12 * max(1.0, np.abs(A).max())


def test_sqsum_consistent_with_table():
    t, a, b, logf0, sgn0 = _hermite_args(400, 50, 3)
    w = np.linspace(0.1, 1.0, t.size)
    T = _hot.recurrence_table(t, a, b, logf0, sgn0, 50)
    S = _hot.recurrence_sqsum(t, w, a, b, logf0, sgn0, 50)
    assert np.allclose((T * T) @ w, S, rtol=1e-12, atol=1e-300)


def test_backend_flag_selects_numpy():
    env = dict(os.environ, QUASIFREE_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", "import quasifree; print(quasifree.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    bad = subprocess.run([sys.executable, "-c", "import quasifree"],
                         env=dict(os.environ, QUASIFREE_BACKEND="fortran"),
                         capture_output=True, text=True)
    assert bad.returncode != 0


def test_default_backend():
    assert BACKEND in ("numba", "numpy")
    if HAVE_NUMBA and os.environ.get("QUASIFREE_BACKEND", "numba") == "numba":
        assert BACKEND == "numba"
