"""Hot inner loops with a numba implementation and a vectorized numpy twin.

The public wrappers dispatch on :data:`quasifree._accel.BACKEND`.  Both
implementations are importable directly so that tests and the benchmark can
compare them.
"""
import numpy as np

from ._accel import BACKEND, njit, prange

_RESCALE = 1e150


# ---------------------------------------------------------------------------
# fermionic sign of a monomial on a batch of configurations
# ---------------------------------------------------------------------------

def sign_masks(xi, yi):
    """Precompute the bit masks used by the batched sign kernels.

    ``xi`` and ``yi`` are site indices (positions in the window order).
    Returns ``(xmask, ymask, between, fixed)`` where ``between[i]`` has the
    bits strictly between ``xi[i]`` and ``yi[i]`` and ``fixed`` is the sign
    contributed by the pairwise factors inside each tuple.
    """
    n = len(xi)
    xmask = 0
    ymask = 0
    between = np.zeros(n, dtype=np.int64)
    fixed = 1
    for i in range(n):
        xmask |= 1 << int(xi[i])
        ymask |= 1 << int(yi[i])
        lo, hi = sorted((int(xi[i]), int(yi[i])))
        between[i] = ((1 << hi) - 1) & ~((1 << (lo + 1)) - 1) if hi > lo else 0
        for j in range(i + 1, n):
            if (xi[i] > xi[j]) != (yi[i] > yi[j]):
                fixed = -fixed
    return xmask, ymask, between, fixed


def signs_numpy(masks, xmask, ymask, between, fixed):
    masks = np.asarray(masks, dtype=np.int64)
    ok = (masks & ymask) == ymask
    rest = masks & ~np.int64(ymask)
    ok &= (rest & xmask) == 0
    count = np.zeros(masks.shape, dtype=np.int64)
    for b in between:
        count += np.bitwise_count(rest & b)
    out = np.where(count % 2 == 0, fixed, -fixed).astype(np.int8)
    out[~ok] = 0
    return out


@njit(cache=True)
def _popcount(v):
    c = 0
    while v:
        v &= v - 1
        c += 1
    return c


@njit(cache=True)
def signs_numba(masks, xmask, ymask, between, fixed):
    out = np.zeros(masks.shape[0], dtype=np.int8)
    for k in range(masks.shape[0]):
        m = masks[k]
        if (m & ymask) != ymask:
            continue
        rest = m & ~ymask
        if rest & xmask:
            continue
        c = 0
        for b in between:
            c += _popcount(rest & b)
        out[k] = fixed if c % 2 == 0 else -fixed
    return out


def fermionic_signs(masks, xi, yi):
    """Sign of the monomial with index tuples ``xi``, ``yi`` on each mask."""
    xmask, ymask, between, fixed = sign_masks(xi, yi)
    if BACKEND == "numba":
        return signs_numba(np.asarray(masks, dtype=np.int64), np.int64(xmask),
                           np.int64(ymask), between, np.int8(fixed))
    return signs_numpy(masks, xmask, ymask, between, fixed)


# ---------------------------------------------------------------------------
# orthonormal three-term recurrences with dynamic rescaling
#   f_{k+1} = ((t - a_k) f_k - b_k f_{k-1}) / b_{k+1}
# the starting function is passed as log|f_0| and sign(f_0) so that weights
# far below the double range (e^{-t^2/2} at t ~ 90, 1/x! at x ~ 800) work.
# ---------------------------------------------------------------------------

def recurrence_table_numpy(t, a, b, logf0, sgn0, kmax):
    t = np.asarray(t, dtype=float)
    out = np.zeros((kmax + 1, t.size))
    scale = np.asarray(logf0, dtype=float).copy()
    e = np.exp(scale)
    prev = np.zeros_like(t)
    cur = np.asarray(sgn0, dtype=float).copy()
    out[0] = cur * e
    for k in range(kmax):
        nxt = ((t - a[k]) * cur - b[k] * prev) / b[k + 1]
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            f = np.where(big, np.abs(cur), 1.0)
            cur = cur / f
            prev = prev / f
            scale = scale + np.log(f)
            e = np.exp(scale)
        out[k + 1] = cur * e
    return out


@njit(cache=True)
def _advance(t, a_k, b_k, inv_b, prev, cur, scale, e):
    # one recurrence step over a block of nodes; k outermost keeps the inner
    # loop free of dependencies so it vectorizes
    for j in range(t.shape[0]):
        nxt = ((t[j] - a_k) * cur[j] - b_k * prev[j]) * inv_b
        prev[j] = cur[j]
        cur[j] = nxt
        if abs(nxt) > _RESCALE:
            f = abs(nxt)
            cur[j] = nxt / f
            prev[j] /= f
            scale[j] += np.log(f)
            e[j] = np.exp(scale[j])


@njit(cache=True)
def recurrence_table_numba(t, a, b, logf0, sgn0, kmax):
    m = t.shape[0]
    out = np.empty((kmax + 1, m))
    scale = logf0.copy()
    e = np.exp(scale)
    prev = np.zeros(m)
    cur = sgn0.copy()
    for j in range(m):
        out[0, j] = cur[j] * e[j]
    for k in range(kmax):
        _advance(t, a[k], b[k], 1.0 / b[k + 1], prev, cur, scale, e)
        for j in range(m):
            out[k + 1, j] = cur[j] * e[j]
    return out


def recurrence_sqsum_numpy(t, w, a, b, logf0, sgn0, kmax):
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    out = np.zeros(kmax + 1)
    scale = np.asarray(logf0, dtype=float).copy()
    e = np.exp(scale)
    prev = np.zeros_like(t)
    cur = np.asarray(sgn0, dtype=float).copy()
    out[0] = np.dot(w, (cur * e) ** 2)
    for k in range(kmax):
        nxt = ((t - a[k]) * cur - b[k] * prev) / b[k + 1]
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            f = np.where(big, np.abs(cur), 1.0)
            cur = cur / f
            prev = prev / f
            scale = scale + np.log(f)
            e = np.exp(scale)
        out[k + 1] = np.dot(w, (cur * e) ** 2)
    return out


_CHUNK = 512


@njit(cache=True, parallel=True)
def recurrence_sqsum_numba(t, w, a, b, logf0, sgn0, kmax):
    m = t.shape[0]
    nchunks = (m + _CHUNK - 1) // _CHUNK
    part = np.zeros((nchunks, kmax + 1))
    for c in prange(nchunks):
        lo = c * _CHUNK
        hi = min(m, lo + _CHUNK)
        tc = t[lo:hi]
        wc = w[lo:hi]
        scale = logf0[lo:hi].copy()
        e = np.exp(scale)
        prev = np.zeros(hi - lo)
        cur = sgn0[lo:hi].copy()
        acc = 0.0
        for j in range(hi - lo):
            v = cur[j] * e[j]
            acc += wc[j] * v * v
        part[c, 0] = acc
        for k in range(kmax):
            _advance(tc, a[k], b[k], 1.0 / b[k + 1], prev, cur, scale, e)
            acc = 0.0
            for j in range(hi - lo):
                v = cur[j] * e[j]
                acc += wc[j] * v * v
            part[c, k + 1] = acc
    # fixed summation order over chunks keeps the result thread-count independent
    out = np.zeros(kmax + 1)
    for c in range(nchunks):
        out += part[c]
    return out


def _prep(t, a, b, logf0, sgn0):
    t = np.ascontiguousarray(t, dtype=float)
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    logf0 = np.ascontiguousarray(np.broadcast_to(logf0, t.shape), dtype=float)
    sgn0 = np.ascontiguousarray(np.broadcast_to(sgn0, t.shape), dtype=float)
    return t, a, b, logf0, sgn0


def recurrence_table(t, a, b, logf0, sgn0, kmax):
    """Values ``f_k(t_j)`` for ``k = 0..kmax`` as a ``(kmax+1, len(t))`` array."""
    t, a, b, logf0, sgn0 = _prep(t, a, b, logf0, sgn0)
    if BACKEND == "numba":
        return recurrence_table_numba(t, a, b, logf0, sgn0, int(kmax))
    return recurrence_table_numpy(t, a, b, logf0, sgn0, int(kmax))


def recurrence_sqsum(t, w, a, b, logf0, sgn0, kmax):
    """Weighted sums ``sum_j w_j f_k(t_j)^2`` for ``k = 0..kmax``."""
    t, a, b, logf0, sgn0 = _prep(t, a, b, logf0, sgn0)
    w = np.ascontiguousarray(w, dtype=float)
    if BACKEND == "numba":
        return recurrence_sqsum_numba(t, w, a, b, logf0, sgn0, int(kmax))
    return recurrence_sqsum_numpy(t, w, a, b, logf0, sgn0, int(kmax))
