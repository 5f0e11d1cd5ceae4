"""Discrete orthogonal polynomials, Christoffel-Darboux kernels and
orthogonal polynomial ensembles on finite windows."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import gammaln

from .errors import ConstructionError, DomainError
from .ground import Configuration, GroundWindow, masks_of_size
from .policy import DEFAULT_POLICY, Policy


@dataclass(frozen=True)
class WeightFunction:
    """Strictly positive weight W on a window, stored as log W.

    Only ratios of W enter kernels and ensemble masses, so ``w`` is used in
    computations after dividing by its maximum (``log_scale`` keeps the
    constant).  The family name and parameters are kept for reporting.
    """

    window: GroundWindow
    logw: np.ndarray
    family: str = "table"
    params: dict = field(default_factory=dict)
    moment_bound_checked: bool = False

    def __post_init__(self):
        logw = np.asarray(self.logw, dtype=float)
        if logw.shape != (len(self.window),):
            raise DomainError("weight must have one value per site")
        if not np.all(np.isfinite(logw)):
            raise DomainError("weight must be strictly positive and finite on every site")
        object.__setattr__(self, "logw", logw)

    @property
    def log_scale(self) -> float:
        return float(self.logw.max())

    @property
    def scaled(self) -> np.ndarray:
        return np.exp(self.logw - self.log_scale)

    @property
    def w(self) -> np.ndarray:
        return np.exp(self.logw)

    def check_moments(self, N: int) -> "WeightFunction":
        """Return a copy flagged after checking sum x^(2N) W(x) is finite."""
        x = np.asarray(self.window.points, dtype=float)
        with np.errstate(divide="ignore"):
            lx = np.where(x != 0, 2 * N * np.log(np.abs(x)), -np.inf)
        tot = np.logaddexp.reduce(lx + self.logw) if N > 0 else np.logaddexp.reduce(self.logw)
        if not np.isfinite(tot) and N > 0 and np.any(x != 0):
            raise ConstructionError(f"moment of order {2 * N} is not finite on the window")
        return WeightFunction(self.window, self.logw, self.family, dict(self.params), True)


def _sites(window):
    return np.asarray(window.points, dtype=float)


def weight_family(name: str, window: GroundWindow, **params) -> WeightFunction:
    """Named weights: charlier, meixner, krawtchouk, uniform, table."""
    x = _sites(window)
    if name == "uniform":
        logw = np.zeros_like(x)
    elif name == "table":
        vals = np.asarray(params.get("values"), dtype=float)
        if vals.shape != x.shape:
            raise DomainError("table weight needs one value per site")
        if np.any(vals <= 0):
            raise DomainError("table weight must be strictly positive")
        logw = np.log(vals)
    else:
        if np.any(x < 0) or np.any(x != np.round(x)):
            raise DomainError(f"{name} weight lives on nonnegative integers")
        if name == "charlier":
            theta = float(params.get("theta", 1.0))
            if theta <= 0:
                raise DomainError("charlier needs theta > 0")
            logw = x * np.log(theta) - gammaln(x + 1)
        elif name == "meixner":
            beta = float(params["beta"])
            c = float(params["c"])
            if beta <= 0 or not 0 < c < 1:
                raise DomainError("meixner needs beta > 0 and 0 < c < 1")
            logw = gammaln(beta + x) - gammaln(beta) + x * np.log(c) - gammaln(x + 1)
        elif name == "krawtchouk":
            M = int(params["M"])
            p = float(params["p"])
            if not 0 < p < 1:
                raise DomainError("krawtchouk needs 0 < p < 1")
            if np.any(x > M):
                raise DomainError("krawtchouk weight vanishes beyond M")
            logw = (gammaln(M + 1) - gammaln(x + 1) - gammaln(M - x + 1)
                    + x * np.log(p) + (M - x) * np.log1p(-p))
        else:
            raise DomainError(f"unknown weight family {name!r}")
    return WeightFunction(window, logw, name, dict(params))


@dataclass(frozen=True)
class OPSystem:
    """Monic orthogonal polynomials p_0..p_{N_max} for a weight.

    ``alpha[k]``, ``beta[k]`` are the recurrence coefficients (beta[0] is
    unused and set to 0).  ``log_h`` holds log h_k for the true weight;
    ``q`` holds the orthonormal functions p_k sqrt(W/h_k) on the window.
    """

    weight: WeightFunction
    N_max: int
    alpha: np.ndarray
    beta: np.ndarray
    log_h: np.ndarray
    q: np.ndarray
    residual: float

    @property
    def h(self) -> np.ndarray:
        return np.exp(self.log_h)

    @property
    def window(self):
        return self.weight.window


def build_ops(weight: WeightFunction, N_max: int, policy: Policy = DEFAULT_POLICY) -> OPSystem:
    """Discrete Stieltjes procedure with full reorthogonalization.

    Works with the orthonormal vectors q_k = p_k sqrt(W) / sqrt(h_k), which
    is the Lanczos process for diag(x) started at sqrt(W).
    """
    n = len(weight.window)
    if N_max < 0 or N_max + 1 > n:
        raise DomainError(f"N_max={N_max} needs at least {N_max + 1} sites, window has {n}")
    x = _sites(weight.window)
    sw = np.sqrt(weight.scaled)
    h0 = float(sw @ sw)
    Q = np.zeros((N_max + 1, n))
    Q[0] = sw / np.sqrt(h0)
    alpha = np.zeros(N_max + 1)
    beta = np.zeros(N_max + 1)
    log_h = np.zeros(N_max + 1)
    log_h[0] = np.log(h0) + weight.log_scale
    for k in range(N_max + 1):
        v = x * Q[k]
        alpha[k] = Q[k] @ v
        if k == N_max:
            break
        v = v - alpha[k] * Q[k]
        if k > 0:
            v = v - np.sqrt(beta[k]) * Q[k - 1]
        for _ in range(2):
            v = v - Q[: k + 1].T @ (Q[: k + 1] @ v)
        b = float(v @ v)
        # beta_k = h_k / h_{k-1}; a vanishing value means the weight can't
        # carry a polynomial of this degree
        if not b > (policy.orthogonality * max(1.0, np.abs(x).max())) ** 2:
            raise ConstructionError(f"squared norm h_{k + 1} is not positive (degenerate weight)")
        beta[k + 1] = b
        log_h[k + 1] = log_h[k] + np.log(b)
        Q[k + 1] = v / np.sqrt(b)
    resid = float(np.abs(Q @ Q.T - np.eye(N_max + 1)).max())
    if n <= 200 and resid > policy.orthogonality:
        raise ConstructionError(f"orthogonality residual {resid:.3e} above tolerance")
    return OPSystem(weight, N_max, alpha, beta, log_h, Q, resid)


def monic_values(ops: OPSystem, x, kmax: int, derivative: bool = False):
    """p_0..p_kmax (and optionally derivatives) at arbitrary points x.

    Returns arrays of shape (kmax+1, len(x)).  Degree kmax may equal
    N_max + 1 because the recurrence only needs alpha, beta up to N_max.
    """
    if kmax > ops.N_max + 1:
        raise DomainError(f"degree {kmax} exceeds the available recurrence")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    P = np.zeros((kmax + 1, x.size))
    D = np.zeros_like(P)
    P[0] = 1.0
    if kmax >= 1:
        P[1] = x - ops.alpha[0]
        D[1] = 1.0
    for k in range(1, kmax):
        P[k + 1] = (x - ops.alpha[k]) * P[k] - ops.beta[k] * P[k - 1]
        D[k + 1] = P[k] + (x - ops.alpha[k]) * D[k] - ops.beta[k] * D[k - 1]
    return (P, D) if derivative else P


def cd_kernel(ops: OPSystem, N: int, policy: Policy = DEFAULT_POLICY):
    """Christoffel-Darboux kernel, sum over the first N orthonormal functions."""
    from .kernels import KernelMatrix

    if not 0 <= N <= ops.N_max + 1:
        raise DomainError(f"N={N} needs q_{N - 1}, built only to {ops.N_max}")
    Q = ops.q[:N]
    K = Q.T @ Q
    K = 0.5 * (K + K.T)
    return KernelMatrix(ops.window, K, is_projection=True, policy=policy)


def cd_kernel_ratio(ops: OPSystem, N: int, x, y) -> float:
    """The two-term CD ratio, only for x != y (cross-check of the sum)."""
    if not 1 <= N <= ops.N_max:
        raise DomainError(f"N={N} outside 1..N_max={ops.N_max}")
    if x == y:
        raise DomainError("ratio form is singular on the diagonal")
    w = ops.weight
    P = monic_values(ops, [x, y], N)
    num = P[N, 0] * P[N - 1, 1] - P[N - 1, 0] * P[N, 1]
    lw = 0.5 * (w.logw[w.window.index_of(x)] + w.logw[w.window.index_of(y)])
    return float(num / (x - y) * np.exp(lw - ops.log_h[N - 1]))


@dataclass(frozen=True)
class EnsembleSpec:
    ops: OPSystem
    N: int

    def __post_init__(self):
        if self.N < 0 or self.N > len(self.ops.window):
            raise DomainError(f"N={self.N} does not fit in the window")
        if self.N - 1 > self.ops.N_max:
            raise DomainError(f"N={self.N} needs h_{self.N - 1}, built only to {self.ops.N_max}")


def _log_vandermonde_sq(u):
    s = 0.0
    for i in range(len(u)):
        for j in range(i + 1, len(u)):
            s += 2.0 * np.log(abs(u[i] - u[j]))
    return s


def ensemble_mass(spec: EnsembleSpec, omega: Configuration) -> float:
    """Mass of omega under prod W(u) * V(u)^2 / Z_N with Z_N = h_0...h_{N-1}."""
    if len(omega) != spec.N:
        raise DomainError(f"configuration has {len(omega)} points, ensemble has {spec.N}")
    w = spec.ops.weight
    idx = [i for i in range(len(w.window)) if omega.mask >> i & 1]
    u = [float(w.window.points[i]) for i in idx]
    lm = w.logw[idx].sum() + _log_vandermonde_sq(u) - spec.ops.log_h[: spec.N].sum()
    return float(np.exp(lm))


def ensemble_measure(spec: EnsembleSpec):
    """(masks, masses) over all N-point configurations, lexicographic."""
    w = spec.ops.weight
    masks = masks_of_size(len(w.window), spec.N)
    out = np.array([ensemble_mass(spec, Configuration(w.window, int(m))) for m in masks])
    return masks, out


def _vandermonde(t):
    v = 1.0
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            v *= t[i] - t[j]
    return v


def sf_closed_form(ops: OPSystem, N: int, X, Y) -> float:
    """Closed form for the ensemble average of prod_u prod_i (x_i-u)(y_i-u).

    The average is over the (N-n)-point ensemble; coincidences x_i = y_j use
    the confluent limit of the CD-type entry.
    """
    X = [float(v) for v in X]
    Y = [float(v) for v in Y]
    n = len(X)
    if len(Y) != n:
        raise DomainError("X and Y must have equal length")
    if len(set(X)) != n or len(set(Y)) != n:
        raise DomainError("repeated entries make the Vandermonde factor vanish")
    if not 1 <= n <= N <= ops.N_max:
        raise DomainError(f"need 1 <= n <= N <= N_max, got n={n}, N={N}")
    Px, Dx = monic_values(ops, X, N, derivative=True)
    Py = monic_values(ops, Y, N)
    A = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            if X[i] == Y[j]:
                A[i, j] = Dx[N, i] * Px[N - 1, i] - Dx[N - 1, i] * Px[N, i]
            else:
                A[i, j] = (Px[N, i] * Py[N - 1, j] - Px[N - 1, i] * Py[N, j]) / (X[i] - Y[j])
    lh = ops.log_h
    pref = np.exp(lh[N - n : N].sum() - n * lh[N - 1])
    return float(pref * np.linalg.det(A) / (_vandermonde(X) * _vandermonde(Y)))


def ensemble_average(ops: OPSystem, N: int, X, Y) -> float:
    """Brute-force average of prod_{u in omega'} prod_i (x_i-u)(y_i-u)."""
    n = len(X)
    m = N - n
    if m < 0:
        raise DomainError("need n <= N")
    if m == 0:
        return 1.0
    spec = EnsembleSpec(ops, m)
    w = ops.weight
    pts = np.asarray(w.window.points, dtype=float)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    tot = 0.0
    for idx in combinations(range(len(pts)), m):
        mask = 0
        for i in idx:
            mask |= 1 << i
        u = pts[list(idx)]
        f = np.prod((X[:, None] - u[None, :]) * (Y[:, None] - u[None, :]))
        tot += ensemble_mass(spec, Configuration(w.window, mask)) * f
    return float(tot)
