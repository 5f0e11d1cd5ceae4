"""Multiplicative functionals and the regularized determinant identity."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dpp import full_measure
from .errors import DomainError, EvaluationError
from .ground import Configuration, GroundWindow
from .kernels import KernelMatrix


@dataclass(frozen=True)
class MultiplierFunction:
    """Strictly positive alpha on a window, with a declared decay class for alpha - 1."""

    window: GroundWindow
    alpha: np.ndarray
    decay: str = "ell1"

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        if a.shape != (len(self.window),):
            raise DomainError("alpha needs one value per site")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise DomainError("alpha must be strictly positive")
        if self.decay not in ("ell1", "ell2"):
            raise DomainError("decay class must be ell1 or ell2")
        object.__setattr__(self, "alpha", a)

    @property
    def decay_sum(self) -> float:
        d = self.alpha - 1.0
        return float(np.abs(d).sum() if self.decay == "ell1" else (d * d).sum())

    def power(self, s) -> "MultiplierFunction":
        return MultiplierFunction(self.window, self.alpha ** s, self.decay)

    def truncate(self, sites) -> "MultiplierFunction":
        """alpha on the given sites, 1 elsewhere."""
        keep = np.zeros(len(self.window), dtype=bool)
        keep[self.window.indices(sites)] = True
        return MultiplierFunction(self.window, np.where(keep, self.alpha, 1.0), self.decay)


def multiplicative_functional(alpha: MultiplierFunction, omega: Configuration) -> float:
    """Psi_alpha(omega) = prod over occupied sites of alpha."""
    idx = [i for i in range(len(omega.window)) if omega.mask >> i & 1]
    return float(np.prod(alpha.alpha[idx])) if idx else 1.0


def det2(A) -> float:
    """Hilbert-Carleman determinant det(1 + A) exp(-tr A)."""
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return 1.0
    sign, logdet = np.linalg.slogdet(np.eye(A.shape[0]) + A)
    return float(sign * np.exp(logdet - np.trace(A)))


def det2_eigen(A) -> float:
    """prod (1 + lambda) exp(-lambda) for symmetric A."""
    lam = np.linalg.eigvalsh(0.5 * (A + A.T))
    return float(np.prod((1 + lam) * np.exp(-lam)))


def expected_sqrt_multiplicative(K: KernelMatrix, alpha: MultiplierFunction) -> float:
    """E[normalized Psi_alpha ^ 1/2] through regularized determinants."""
    sa = np.sqrt(alpha.alpha)
    A_half = (sa - 1.0)[:, None] * K.entries
    A_full = (alpha.alpha - 1.0)[:, None] * K.entries
    den = det2(A_full)
    if not den > 0:
        raise EvaluationError("det2(1 + (alpha - 1) K) is not positive; kernel is invalid", den)
    corr = np.trace(((sa - 1.0) - 0.5 * (alpha.alpha - 1.0))[:, None] * K.entries)
    return float(det2(A_half) / np.sqrt(den) * np.exp(corr))


def _log_psi(alpha: np.ndarray, masks: np.ndarray) -> np.ndarray:
    la = np.log(alpha)
    bits = ((masks[:, None] >> np.arange(alpha.size)) & 1).astype(float)
    return bits @ la


def expected_sqrt_bruteforce(K: KernelMatrix, alpha: MultiplierFunction) -> float:
    """E[Psi_{alpha^1/2}] / E[Psi_alpha]^1/2 by enumerating the full measure."""
    M = full_measure(K)
    lp = _log_psi(alpha.alpha, M.masks)
    num = float(np.dot(M.probs, np.exp(0.5 * lp)))
    den = float(np.dot(M.probs, np.exp(lp)))
    return num / np.sqrt(den)


def range_multiply(K: KernelMatrix, a: MultiplierFunction) -> KernelMatrix:
    """Projection onto aL, L the range of K (re-orthonormalized by QR)."""
    if np.any(a.alpha == 0):
        raise DomainError("multiplier must not vanish")
    K.require_projection()
    lam, U = K.eigh
    U = U[:, lam > 0.5]
    V = a.alpha[:, None] * U
    if V.shape[1]:
        s = np.linalg.svd(V, compute_uv=False)
        if s[-1] < 1e-12 * max(1.0, s[0]):
            raise DomainError("aL is rank deficient")
        Q, _ = np.linalg.qr(V)
    else:
        Q = V
    P = Q @ Q.T
    return KernelMatrix(K.window, 0.5 * (P + P.T), True, K.policy)


def density_ratio_check(K: KernelMatrix, a: MultiplierFunction) -> float:
    """max_omega |M^{[aL]}(omega) - normalized Psi_{|a|^2}(omega) M^{[L]}(omega)|."""
    if np.any(a.alpha == 0):
        raise DomainError("multiplier must not vanish")
    KaL = range_multiply(K, a)
    M = full_measure(K)
    Ma = full_measure(KaL)
    psi = np.exp(_log_psi(a.alpha ** 2, M.masks))
    w = psi * M.probs
    w /= w.sum()
    return float(np.abs(Ma.probs - w).max())


def hellinger_to_limit(K: KernelMatrix, alpha_x: MultiplierFunction,
                       alpha: MultiplierFunction) -> float:
    """Squared Hellinger distance between Psi-bar_{alpha_X} M and Psi-bar_alpha M.

    Uses E[Psi_b] = det(1 + (b - 1) K) for every multiplier b, so it works on
    windows far too large to enumerate.
    """
    def e(b):
        return np.linalg.det(np.eye(len(K)) + (b - 1.0)[:, None] * K.entries)

    cross = e(np.sqrt(alpha_x.alpha * alpha.alpha))
    aff = cross / np.sqrt(e(alpha_x.alpha) * e(alpha.alpha))
    return float(max(0.0, 2.0 - 2.0 * aff))


def truncation_sweep(K: KernelMatrix, alpha: MultiplierFunction, sizes):
    """E[Psi-bar_{alpha_X}^1/2] and Hellinger distance to the full functional
    along nested sets X of the given sizes.

    On the full line X grows outward from 0 (ties broken toward the negative
    side); otherwise X is an initial segment of the window.
    """
    pts = list(K.window.points)
    if K.window.model == "full_line":
        pts.sort(key=lambda x: (abs(x), x))
    rows = []
    for n in sizes:
        ax = alpha.truncate(pts[:n])
        rows.append({"size": int(n),
                     "sqrt_expectation": expected_sqrt_multiplicative(K, ax),
                     "hellinger_sq": hellinger_to_limit(K, ax, alpha)})
    return rows
