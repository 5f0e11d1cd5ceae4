"""Exterior-algebra model of the CAR algebra on a finite window.

Basis vectors e_omega are indexed by occupation masks; e_omega is the wedge
of the occupied e_x in descending order of x.  Creation/annihilation carry
the sign (-1)^{i(x, omega)} with i(x, omega) = #{y in omega: y > x}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp

from .errors import DomainError
from .ground import (Configuration, GroundWindow, MassFunction, _as_site, _check_tuples,
                     fermionic_sign, fermionic_signs, masks_of_size)
from .policy import DEFAULT_POLICY, Policy


def _popcount(m: int) -> int:
    return bin(m).count("1")


@dataclass
class FockVector:
    """Sparse real vector over the 2^N configuration basis."""

    window: GroundWindow
    coeffs: dict = field(default_factory=dict)

    @classmethod
    def basis(cls, window, mask=0):
        return cls(window, {int(mask): 1.0})

    @classmethod
    def vacuum(cls, window):
        return cls.basis(window, 0)

    def copy(self):
        return FockVector(self.window, dict(self.coeffs))

    def prune(self, tol=0.0):
        self.coeffs = {m: c for m, c in self.coeffs.items() if abs(c) > tol}
        return self

    def __add__(self, other):
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0.0) + c
        return FockVector(self.window, out).prune()

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, s):
        return FockVector(self.window, {m: s * c for m, c in self.coeffs.items()}).prune()

    __rmul__ = __mul__

    def dot(self, other) -> float:
        return float(sum(c * other.coeffs.get(m, 0.0) for m, c in self.coeffs.items()))

    def norm(self) -> float:
        return float(np.sqrt(sum(c * c for c in self.coeffs.values())))

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def to_dense(self) -> np.ndarray:
        v = np.zeros(1 << len(self.window))
        for m, c in self.coeffs.items():
            v[m] = c
        return v


def _i_sign(mask: int, i: int) -> int:
    return -1 if _popcount(mask >> (i + 1)) & 1 else 1


def apply_creation(x, v: FockVector) -> FockVector:
    """a+_x v."""
    i = v.window.index_of(x)
    out = {}
    for m, c in v.coeffs.items():
        if m >> i & 1:
            continue
        t = m | (1 << i)
        out[t] = out.get(t, 0.0) + _i_sign(m, i) * c
    return FockVector(v.window, out).prune()


def apply_annihilation(x, v: FockVector) -> FockVector:
    """a-_x v."""
    i = v.window.index_of(x)
    out = {}
    for m, c in v.coeffs.items():
        if not m >> i & 1:
            continue
        t = m & ~(1 << i)
        out[t] = out.get(t, 0.0) + _i_sign(m, i) * c
    return FockVector(v.window, out).prune()


def apply_word(word, v: FockVector) -> FockVector:
    """Apply a word [(+1|-1, site), ...] written left to right (rightmost acts first)."""
    for kind, x in reversed(list(word)):
        v = apply_creation(x, v) if kind > 0 else apply_annihilation(x, v)
    return v


def monomial_word(X, Y):
    """The word a+_{x_n}..a+_{x_1} a-_{y_1}..a-_{y_n}."""
    return [(1, x) for x in reversed(X)] + [(-1, y) for y in Y]


def apply_monomial(X, Y, v: FockVector) -> FockVector:
    """Signed action delta_omega -> sgn(X, Y; omega) delta_{(omega - Y) + X}."""
    w = v.window
    _check_tuples(tuple(X), tuple(Y))
    ym = w.mask_of(Y)
    xm = w.mask_of(X)
    out = {}
    for m, c in v.coeffs.items():
        s = fermionic_sign(X, Y, Configuration(w, m))
        if s:
            t = (m & ~ym) | xm
            out[t] = out.get(t, 0.0) + s * c
    return FockVector(w, out).prune()


# ---------------------------------------------------------------------------
# dense / sparse operator matrices (index = mask)
# ---------------------------------------------------------------------------

def creation_matrix(window: GroundWindow, x) -> sp.csr_matrix:
    n = len(window)
    i = window.index_of(x)
    masks = np.arange(1 << n, dtype=np.int64)
    free = masks[(masks >> i & 1) == 0]
    sgn = np.where(np.bitwise_count(free >> (i + 1)) % 2 == 0, 1.0, -1.0)
    return sp.csr_matrix((sgn, (free | (1 << i), free)), shape=(1 << n, 1 << n))


def annihilation_matrix(window: GroundWindow, x) -> sp.csr_matrix:
    return creation_matrix(window, x).T.tocsr()


class GicarOperator:
    """Operator that preserves particle number, stored as dense blocks.

    ``blocks[k]`` acts on the k-particle sector, whose basis is the list of
    k-subset masks in lexicographic order.
    """

    def __init__(self, window: GroundWindow, blocks: dict):
        self.window = window
        self.blocks = {k: np.asarray(b, dtype=float) for k, b in blocks.items()}
        n = len(window)
        for k in range(n + 1):
            d = comb(n, k)
            b = self.blocks.setdefault(k, np.zeros((d, d)))
            if b.shape != (d, d):
                raise DomainError(f"block {k} has shape {b.shape}, expected {(d, d)}")

    @classmethod
    def identity(cls, window):
        n = len(window)
        return cls(window, {k: np.eye(comb(n, k)) for k in range(n + 1)})

    @classmethod
    def from_dense(cls, window, M, tol=0.0):
        M = np.asarray(M.toarray() if sp.issparse(M) else M, dtype=float)
        n = len(window)
        pc = np.bitwise_count(np.arange(1 << n, dtype=np.int64))
        off = pc[:, None] != pc[None, :]
        leak = float(np.abs(M[off]).max(initial=0.0))
        if leak > tol:
            raise DomainError(f"operator does not preserve particle number (leak {leak:.3e})")
        blocks = {}
        for k in range(n + 1):
            idx = masks_of_size(n, k)
            blocks[k] = M[np.ix_(idx, idx)]
        return cls(window, blocks)

    @classmethod
    def diagonal(cls, window, values):
        values = np.asarray(values, dtype=float)
        n = len(window)
        return cls(window, {k: np.diag(values[masks_of_size(n, k)]) for k in range(n + 1)})

    def to_dense(self) -> np.ndarray:
        n = len(self.window)
        M = np.zeros((1 << n, 1 << n))
        for k, b in self.blocks.items():
            idx = masks_of_size(n, k)
            M[np.ix_(idx, idx)] = b
        return M

    def _combine(self, other, f):
        return GicarOperator(self.window, {k: f(self.blocks[k], other.blocks[k]) for k in self.blocks})

    def __matmul__(self, other):
        return self._combine(other, lambda a, b: a @ b)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __mul__(self, s):
        return GicarOperator(self.window, {k: s * b for k, b in self.blocks.items()})

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return max(float(np.abs(b).max(initial=0.0)) for b in self.blocks.values())

    def apply(self, v: FockVector) -> FockVector:
        return FockVector(self.window, dict(enumerate(self.to_dense() @ v.to_dense()))).prune()


def monomial_operator(window: GroundWindow, X, Y) -> GicarOperator:
    """The monomial as a block operator, via the batched sign kernel."""
    n = len(window)
    ym = window.mask_of(Y)
    xm = window.mask_of(X)
    blocks = {}
    for k in range(n + 1):
        masks = masks_of_size(n, k)
        pos = {int(m): j for j, m in enumerate(masks)}
        B = np.zeros((masks.size, masks.size))
        if masks.size:
            s = fermionic_signs(window, X, Y, masks)
            for j in np.nonzero(s)[0]:
                t = (int(masks[j]) & ~ym) | xm
                B[pos[t], j] = s[j]
        blocks[k] = B
    return GicarOperator(window, blocks)


def number_operator(window, x) -> GicarOperator:
    return monomial_operator(window, (x,), (x,))


def eta(window, x) -> GicarOperator:
    return GicarOperator.identity(window) - 2.0 * number_operator(window, x)


def p_epsilon(x, window) -> GicarOperator:
    """Image of the sign flip at x: 1 - 2 a+_x a-_x."""
    return eta(window, x)


def p_transposition(x, y, window) -> GicarOperator:
    """Image of the transposition s_{x,y}, assembled from CAR monomials."""
    x, y = _as_site(x), _as_site(y)
    if x == y:
        raise DomainError("transposition needs distinct sites")
    if x > y:
        x, y = y, x
    one = GicarOperator.identity(window)
    E = eta(window, x) @ eta(window, y)
    between = one
    for z in window.points:
        if x < z < y:
            between = between @ eta(window, z)
    hop = monomial_operator(window, (x,), (y,)) + monomial_operator(window, (y,), (x,))
    return 0.5 * (one + E) + (0.5 * (one + E + (one - E) @ between)) @ hop


def permutation_operator(x, y, window) -> GicarOperator:
    """e_omega -> e_{s_{x,y}(omega)}, built directly on masks."""
    i, j = window.index_of(x), window.index_of(y)
    n = len(window)
    M = np.zeros((1 << n, 1 << n))
    for m in range(1 << n):
        bi, bj = m >> i & 1, m >> j & 1
        t = m & ~((1 << i) | (1 << j)) | (bi << j) | (bj << i)
        M[t, m] = 1.0
    return GicarOperator.from_dense(window, M)


def ideal_generator_image(x, y, window, variant="minus") -> GicarOperator:
    """p((1 - s_{x,y})(1 -/+ eps_x)(1 -/+ eps_y)); should vanish identically."""
    if variant not in ("minus", "plus"):
        raise DomainError("variant must be 'minus' or 'plus'")
    if _as_site(x) == _as_site(y):
        raise DomainError("ideal generators need distinct sites")
    s = -1.0 if variant == "minus" else 1.0
    one = GicarOperator.identity(window)
    return ((one - p_transposition(x, y, window))
            @ (one + s * p_epsilon(x, window)) @ (one + s * p_epsilon(y, window)))


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def _real_kernel(K):
    from .kernels import KernelMatrix
    if not isinstance(K, KernelMatrix):
        raise DomainError("expected a KernelMatrix")
    return K


def quasifree_state(K, X, Y) -> float:
    """phi[K](a+_{x_n}..a+_{x_1} a-_{y_1}..a-_{y_n}) = det[K(y_i, x_j)]."""
    K = _real_kernel(K)
    if len(X) != len(Y):
        raise DomainError("X and Y must have equal length")
    if not X:
        return 1.0
    return float(np.linalg.det(K.sub(Y, X)))


def _as_mass(mass, window):
    if isinstance(mass, MassFunction):
        return mass
    if window is None:
        raise DomainError("a window is required when mass is not a MassFunction")
    if isinstance(mass, dict):
        return MassFunction.from_dict(window, mass)
    return MassFunction.dense(window, mass)


def tau_state(mass, X, Y, window=None, policy: Policy = DEFAULT_POLICY) -> float:
    """tau[M](monomial) = sum sqrt(M(omega) M(omega')) sgn(X, Y; omega)."""
    M = _as_mass(mass, window)
    if np.iscomplexobj(M.probs):
        raise DomainError("masses must be real")
    if abs(M.total() - 1.0) > policy.mass_normalization:
        raise DomainError(f"mass is not normalized (total {M.total():.15g})")
    if len(X) != len(Y):
        raise DomainError("X and Y must have equal length")
    w = M.window
    if not X:
        return 1.0
    s = fermionic_signs(w, X, Y, M.masks)
    nz = np.nonzero(s)[0]
    if nz.size == 0:
        return 0.0
    src = M.masks[nz]
    tgt = (src & ~np.int64(w.mask_of(Y))) | np.int64(w.mask_of(X))
    root = np.sqrt(M.probs[nz]) * np.sqrt(M.probs_of(tgt))
    return float(np.dot(root, s[nz]))


# ---------------------------------------------------------------------------
# Pfaffians and the Pfaffian functional
# ---------------------------------------------------------------------------

def pfaffian(A, policy: Policy = DEFAULT_POLICY) -> float:
    """Pfaffian by Parlett-Reid tridiagonalization with pivoting."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise DomainError("Pfaffian needs a square matrix")
    if n % 2:
        raise DomainError("Pfaffian needs even dimension")
    if n and np.abs(A + A.T).max() > policy.skew:
        raise DomainError("matrix is not skew-symmetric")
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(A[k + 1:, k]).argmax())
        if kp != k + 1:
            A[[k + 1, kp], :] = A[[kp, k + 1], :]
            A[:, [k + 1, kp]] = A[:, [kp, k + 1]]
            pf = -pf
        if A[k + 1, k] == 0.0:
            return 0.0
        pf *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2:] / A[k, k + 1]
            col = A[k + 2:, k + 1].copy()
            A[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


def pfaffian_expansion(A) -> float:
    """Pfaffian by expansion along the first row (small n only)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n % 2:
        raise DomainError("Pfaffian needs even dimension")
    if n == 0:
        return 1.0
    tot = 0.0
    rest = list(range(1, n))
    for j_pos, j in enumerate(rest):
        if A[0, j] == 0.0:
            continue
        keep = [r for r in rest if r != j]
        tot += (-1) ** j_pos * A[0, j] * pfaffian_expansion(A[np.ix_(keep, keep)])
    return tot


def pair_form(K, v1, v2) -> float:
    """The bilinear form of the quasifree state on generators (kind, site)."""
    (k1, x), (k2, y) = v1, v2
    if k1 == k2:
        return 0.0
    if k1 > 0:
        return K.entry(x, y)
    return (1.0 if x == y else 0.0) - K.entry(y, x)


def quasifree_word(K, word) -> float:
    """Pfaffian functional on a word of creation/annihilation generators."""
    K = _real_kernel(K)
    n = len(word)
    if n % 2:
        return 0.0
    A = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            A[i, j] = pair_form(K, word[i], word[j])
            A[j, i] = -A[i, j]
    return pfaffian(A)


def slater_state(K) -> FockVector:
    """a+(u_1)...a+(u_m) e_0 for an orthonormal basis u of the range of K."""
    K = _real_kernel(K).require_projection()
    lam, U = K.eigh
    U = U[:, lam > 0.5]
    w = K.window
    v = FockVector.vacuum(w)
    for col in range(U.shape[1] - 1, -1, -1):
        nxt = FockVector(w)
        for i, x in enumerate(w.points):
            if U[i, col] != 0.0:
                nxt = nxt + U[i, col] * apply_creation(x, v)
        v = nxt
    return v


def vector_state(psi: FockVector, word) -> float:
    """<psi, word psi> / <psi, psi>."""
    return psi.dot(apply_word(word, psi)) / psi.dot(psi)
