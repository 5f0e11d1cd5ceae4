"""Correlation kernels: dense matrices on windows and closed-form generators
for the infinite discrete sine / Hermite / Laguerre / Jacobi kernels."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, roots_jacobi, roots_legendre

from . import _hot
from .errors import DomainError, EvaluationError
from .ground import GroundWindow
from .policy import DEFAULT_POLICY, Policy
from .reporting import csv_text


class KernelMatrix:
    """Dense real symmetric kernel on a finite window.

    Construction checks symmetry (then symmetrizes exactly) and that the
    spectrum lies in [-tol, 1+tol].  When ``is_projection`` is set the
    idempotency defect max|K^2-K| is stored in ``residual``; it is a
    diagnostic, callers that need a genuine projection use
    :meth:`require_projection`.
    """

    def __init__(self, window: GroundWindow, entries, is_projection=False,
                 policy: Policy = DEFAULT_POLICY, validate=True):
        K = np.asarray(entries)
        if np.iscomplexobj(K):
            if np.abs(K.imag).max(initial=0.0) > 0:
                raise DomainError("kernels must be real valued")
            K = K.real
        K = np.array(K, dtype=float)
        n = len(window)
        if K.shape != (n, n):
            raise DomainError(f"kernel shape {K.shape} does not match window of {n} sites")
        if not np.all(np.isfinite(K)):
            raise DomainError("kernel has non-finite entries")
        asym = float(np.abs(K - K.T).max(initial=0.0))
        if asym > policy.symmetry * max(1.0, float(np.abs(K).max(initial=0.0))):
            raise DomainError(f"kernel is not symmetric (defect {asym:.3e})")
        K = 0.5 * (K + K.T)
        self.window = window
        self.entries = K
        self.policy = policy
        self.is_projection = bool(is_projection)
        self._eig = None
        if validate and n:
            lam = self.eigenvalues
            if lam[0] < -policy.spectrum or lam[-1] > 1 + policy.spectrum:
                raise DomainError(
                    f"kernel spectrum [{lam[0]:.3e}, {lam[-1]:.3e}] is not inside [0, 1]")
        self.residual = float(np.abs(K @ K - K).max(initial=0.0)) if is_projection else None

    @property
    def eigenvalues(self):
        if self._eig is None:
            self._eig = np.linalg.eigh(self.entries)
        return self._eig[0]

    @property
    def eigh(self):
        self.eigenvalues
        return self._eig

    def __len__(self):
        return len(self.window)

    def rank(self) -> int:
        return int(np.sum(self.eigenvalues > 0.5))

    def require_projection(self, tol=None):
        tol = self.policy.spectrum if tol is None else tol
        res = float(np.abs(self.entries @ self.entries - self.entries).max(initial=0.0))
        if res > tol:
            raise DomainError(f"kernel is not a projection (defect {res:.3e})")
        return self

    def entry(self, x, y) -> float:
        w = self.window
        return float(self.entries[w.index_of(x), w.index_of(y)])

    def sub(self, rows, cols) -> np.ndarray:
        w = self.window
        return self.entries[np.ix_(w.indices(rows), w.indices(cols))]

    def restrict(self, sites) -> "KernelMatrix":
        sites = sorted(sites)
        keep = set(sites)
        win = self.window.remove([p for p in self.window.points if p not in keep])
        return KernelMatrix(win, self.sub(sites, sites), False, self.policy)

    def to_csv(self, chash=None, extra=None) -> str:
        rows = []
        pts = self.window.points
        for i, x in enumerate(pts):
            for j, y in enumerate(pts):
                rows.append((x, y, float(self.entries[i, j])))
        return csv_text(("row", "col", "value"), rows, chash, self.policy, extra)

    def __repr__(self):
        return f"KernelMatrix(n={len(self)}, projection={self.is_projection})"


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------

def gauss_legendre(a, b, n):
    u, w = roots_legendre(n)
    return 0.5 * (b - a) * u + 0.5 * (b + a), 0.5 * (b - a) * w


def composite_legendre(a, b, panels, n=32):
    u, w = roots_legendre(n)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    t = (0.5 * h[:, None] * u[None, :] + 0.5 * (edges[:-1] + edges[1:])[:, None]).ravel()
    ww = (0.5 * h[:, None] * w[None, :]).ravel()
    return t, ww


def gauss_jacobi_interval(a, b, n, alpha=0.0, beta=0.0):
    """Nodes/weights for int_a^b f(t) (b-t)^alpha (t-a)^beta dt."""
    u, w = roots_jacobi(n, alpha, beta)
    half = 0.5 * (b - a)
    return half * u + 0.5 * (a + b), w * half ** (1 + alpha + beta)


# ---------------------------------------------------------------------------
# kernel functions
# ---------------------------------------------------------------------------

def _as_int_sites(xs, model):
    a = np.asarray(xs)
    if a.dtype.kind == "f":
        if np.any(a != np.round(a)):
            raise DomainError("lattice kernels take integer sites")
        a = a.astype(np.int64)
    a = a.astype(np.int64)
    if model == "half_line" and np.any(a < 0):
        raise DomainError("sites must be nonnegative for half-line kernels")
    return a


class KernelFunction:
    """Entry generator for a kernel on an infinite lattice.

    Subclasses implement ``_offdiag(X, Y)`` (broadcast arrays, x != y
    assumed) and ``diag(xs)``.
    """

    family = "custom"
    domain_model = "half_line"
    is_projection = True

    def __init__(self, params=None, policy: Policy = DEFAULT_POLICY):
        self.params = dict(params or {})
        self.policy = policy

    def diag(self, xs) -> np.ndarray:
        raise NotImplementedError

    def _offdiag(self, X, Y) -> np.ndarray:
        raise NotImplementedError

    def prepare(self, kmax: int):
        """Hook to precompute tables for sites up to kmax."""

    def block(self, xs, ys) -> np.ndarray:
        xs = _as_int_sites(np.atleast_1d(xs), self.domain_model)
        ys = _as_int_sites(np.atleast_1d(ys), self.domain_model)
        if xs.size and ys.size:
            self.prepare(int(max(np.abs(xs).max(), np.abs(ys).max())))
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        same = X == Y
        out = np.zeros(X.shape)
        if (~same).any():
            Xo, Yo = X[~same], Y[~same]
            out[~same] = self._offdiag(Xo, Yo)
        if same.any():
            d = self.diag(X[same])
            out[same] = d
        return out

    def entry(self, x, y) -> float:
        return float(self.block([x], [y])[0, 0])

    def materialize(self, window: GroundWindow, validate=True) -> KernelMatrix:
        if window.model != self.domain_model:
            raise DomainError(
                f"{self.family} kernel lives on {self.domain_model}, window is {window.model}")
        pts = np.asarray(window.points)
        K = self.block(pts, pts)
        K = 0.5 * (K + K.T)
        return KernelMatrix(window, K, self.is_projection, self.policy, validate)

    def describe(self) -> dict:
        return {"family": self.family, "params": dict(self.params)}

    def __repr__(self):
        return f"{type(self).__name__}({self.params})"


class SineKernel(KernelFunction):
    family = "sine"
    domain_model = "full_line"

    def __init__(self, phi, policy=DEFAULT_POLICY):
        phi = float(phi)
        if not 0 < phi < math.pi:
            raise DomainError(f"phi={phi} must lie in (0, pi)")
        super().__init__({"phi": phi}, policy)
        self.phi = phi

    def diag(self, xs):
        return np.full(np.shape(xs), self.phi / math.pi)

    def _offdiag(self, X, Y):
        d = (X - Y).astype(float)
        return np.sin(self.phi * d) / (math.pi * d)


def sine_kernel(phi, policy=DEFAULT_POLICY) -> SineKernel:
    return SineKernel(phi, policy)


def _check_sign(sign):
    if sign in ("+", 1, "plus"):
        return 1
    if sign in ("-", -1, "minus"):
        return -1
    raise DomainError(f"sign must be + or -, got {sign!r}")


def hermite_functions(t, kmax):
    """Orthonormal Hermite functions psi_0..psi_kmax at points t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = np.arange(kmax + 2, dtype=float)
    b = np.sqrt(k / 2.0)
    a = np.zeros(kmax + 1)
    logf0 = -0.25 * math.log(math.pi) - 0.5 * t * t
    return _hot.recurrence_table(t, a, b, logf0, 1.0, kmax)


def _hermite_sqsums(t, w, kmax):
    k = np.arange(kmax + 2, dtype=float)
    logf0 = -0.25 * math.log(math.pi) - 0.5 * t * t
    return _hot.recurrence_sqsum(t, w, np.zeros(kmax + 1), np.sqrt(k / 2.0), logf0, 1.0, kmax)


def adaptive_sqsums(make_sums, a, b, panels, target, max_panels=1 << 16):
    """Composite Gauss-Legendre with a 24-node / 32-node comparison per level;
    panels are doubled until the two rules agree to ``target``."""
    bound = np.inf
    while panels <= max_panels:
        lo = make_sums(*composite_legendre(a, b, panels, 24))
        hi = make_sums(*composite_legendre(a, b, panels, 32))
        bound = float(np.abs(hi - lo).max())
        if bound <= target:
            return hi, bound
        panels *= 2
    raise EvaluationError("half-line quadrature missed its error target", bound)


class DiscreteHermite(KernelFunction):
    """Discrete Hermite kernel K^{+/-}_r on Z>=0.

    Off the diagonal the two-term formula in the orthonormal Hermite
    functions at r is used; the diagonal is the half-line integral of psi_x^2
    over [r, inf), computed by composite Gauss-Legendre on [r, r+T].
    """

    family = "discrete_hermite"

    def __init__(self, sign, r, policy=DEFAULT_POLICY):
        self.sign = _check_sign(sign)
        r = float(r)
        if not math.isfinite(r):
            raise DomainError("r must be finite")
        super().__init__({"sign": "+" if self.sign > 0 else "-", "r": r}, policy)
        self.r = r
        self._kmax = -1
        self._psi = None
        self._dplus = None
        self.quadrature_bound = 0.0

    def prepare(self, kmax):
        if kmax <= self._kmax:
            return
        kmax = max(kmax, 2 * self._kmax, 32)
        self._psi = hermite_functions([self.r], kmax + 1)[:, 0]
        self._dplus = self._diag_plus(kmax)
        self._kmax = kmax

    def _diag_plus(self, kmax):
        # tail of psi_k^2 past the turning point sqrt(2k+1) decays at least
        # like exp(-(t - turning)^2); 12 units gives < 1e-60 for k = 0
        hi = max(self.r, math.sqrt(2 * kmax + 1)) + 12.0
        width = min(0.5, 16.0 / (2.0 * math.sqrt(2 * kmax + 2)))
        panels = max(4, int(math.ceil((hi - self.r) / width)))
        sums, bound = adaptive_sqsums(lambda t, w: _hermite_sqsums(t, w, kmax),
                                      self.r, hi, panels, 10 * self.policy.quadrature_target)
        self.quadrature_bound = bound
        return sums

    def diag(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        self.prepare(int(xs.max(initial=0)))
        d = self._dplus[xs]
        return d if self.sign > 0 else 1.0 - d

    def _offdiag(self, X, Y):
        p = self._psi
        num = (np.sqrt((X + 1) / 2.0) * p[X + 1] * p[Y]
               - np.sqrt((Y + 1) / 2.0) * p[X] * p[Y + 1])
        return -self.sign * num / (X - Y)


def discrete_hermite(sign, r, policy=DEFAULT_POLICY) -> DiscreteHermite:
    return DiscreteHermite(sign, r, policy)


def laguerre_functions(t, kmax, alpha):
    """Orthonormal Laguerre functions (positive leading coefficient) at t > 0."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = np.arange(kmax + 2, dtype=float)
    a = 2 * k[: kmax + 1] + alpha + 1
    b = np.sqrt(k * (k + alpha))
    logf0 = 0.5 * (alpha * np.log(t) - t - gammaln(alpha + 1))
    return _hot.recurrence_table(t, a, b, logf0, 1.0, kmax)


def laguerre_polys_scaled(t, kmax, alpha):
    """Orthonormal Laguerre polynomials times exp(-t/2), no t^(alpha/2) factor."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = np.arange(kmax + 2, dtype=float)
    a = 2 * k[: kmax + 1] + alpha + 1
    b = np.sqrt(k * (k + alpha))
    logf0 = -0.5 * t - 0.5 * gammaln(alpha + 1)
    return _hot.recurrence_table(t, a, b, logf0, 1.0, kmax)


class DiscreteLaguerre(KernelFunction):
    """Discrete Laguerre kernel with weight t^alpha e^-t, split at r > 0.

    K^- is the Gram matrix over [0, r] by Gauss-Jacobi (absorbs t^alpha at
    the origin); K^+ is the Gram matrix over [r, r+T] by composite
    Gauss-Legendre.
    """

    family = "discrete_laguerre"

    def __init__(self, alpha, r, sign, policy=DEFAULT_POLICY):
        alpha = float(alpha)
        if not alpha > -1:
            raise DomainError("Laguerre parameter must exceed -1")
        r = float(r)
        if not r > 0:
            raise DomainError("r must lie inside the support (0, inf)")
        self.sign = _check_sign(sign)
        super().__init__({"alpha": alpha, "r": r, "sign": "+" if self.sign > 0 else "-"}, policy)
        self.alpha, self.r = alpha, r
        self._kmax = -1
        self._G = None
        self.quadrature_bound = 0.0

    def gram_minus(self, kmax, n=None):
        n = n or (kmax + 48)
        t, w = gauss_jacobi_interval(0.0, self.r, n, 0.0, self.alpha)
        F = laguerre_polys_scaled(t, kmax, self.alpha)
        return (F * w) @ F.T

    def gram_plus(self, kmax, panels):
        hi = self.r + 4.0 * kmax + 2 * abs(self.alpha) + 60.0
        t, w = composite_legendre(self.r, hi, panels)
        F = laguerre_functions(t, kmax, self.alpha)
        return (F * w) @ F.T

    def prepare(self, kmax):
        if kmax <= self._kmax:
            return
        kmax = max(kmax, 2 * self._kmax, 16)
        target = 10 * self.policy.quadrature_target
        if self.sign < 0:
            G0 = self.gram_minus(kmax)
            G1 = self.gram_minus(kmax, 2 * (kmax + 48))
        else:
            panels = max(16, int(4.0 * kmax + 60))
            G0 = self.gram_plus(kmax, panels)
            G1 = self.gram_plus(kmax, 2 * panels)
        bound = float(np.abs(G1 - G0).max())
        # long Legendre sums sit on a rounding floor near 1e-13
        if bound > max(target, 1e-12):
            raise EvaluationError("Laguerre quadrature missed its error target", bound)
        self.quadrature_bound = bound
        self._G = 0.5 * (G1 + G1.T)
        self._kmax = kmax

    def diag(self, xs):
        xs = np.asarray(xs, dtype=np.int64)
        self.prepare(int(xs.max(initial=0)))
        return self._G[xs, xs]

    def _offdiag(self, X, Y):
        return self._G[X, Y]


def discrete_laguerre(alpha, r, sign, policy=DEFAULT_POLICY) -> DiscreteLaguerre:
    return DiscreteLaguerre(alpha, r, sign, policy)


def jacobi_log_inv_norm(k, a):
    """log ||J_k||^{-1} for the symmetric Jacobi polynomials (log-Gamma form)."""
    k = np.asarray(k, dtype=float)
    # (k+a+1/2) Gamma(k+2a+1) rewritten as Gamma(k+2a+2) (2k+2a+1)/(2(k+2a+1)),
    # finite at k = 0, a = -1/2
    ratio = np.where(k + 2 * a + 1 == 0, 1.0,
                     (2 * k + 2 * a + 1) / np.where(k + 2 * a + 1 == 0, 1.0, k + 2 * a + 1))
    s = np.log(ratio) + gammaln(k + 2 * a + 2) - math.log(2.0) + gammaln(k + 1)
    return 0.5 * s - a * math.log(2.0) - gammaln(k + a + 1)


def jacobi_at_zero(k, a):
    """(sign, log|.|) of J_k(0) with parameters (a, a); sign 0 for odd k."""
    k = np.asarray(k, dtype=np.int64)
    ell = k // 2
    sgn = np.where(k % 2 == 1, 0.0, np.where(ell % 2 == 0, 1.0, -1.0))
    kf = k.astype(float)
    lg = gammaln(kf + a + 1) - kf * math.log(2.0) - gammaln(ell + 1.0) - gammaln(ell + a + 1)
    return sgn, lg


class DiscreteJacobiSymmetric(KernelFunction):
    """Symmetric discrete Jacobi kernel K^{+/-,a} (weight (1-t^2)^a, r = 0).

    Off-diagonal entries come from the closed two-term formula with
    log-Gamma norms and values at 0; the diagonal is exactly 1/2.
    """

    family = "discrete_jacobi_symmetric"

    def __init__(self, a, sign="+", policy=DEFAULT_POLICY):
        a = float(a)
        if not a > -1:
            raise DomainError(f"a={a} must exceed -1")
        self.sign = _check_sign(sign)
        super().__init__({"a": a, "sign": "+" if self.sign > 0 else "-"}, policy)
        self.a = a

    def diag(self, xs):
        return np.full(np.shape(xs), 0.5)

    def _terms(self, k):
        """(k+2a+1) P^{(a+1,a+1)}_{k-1}(0) and J_k(0) for each k, as values
        divided by ||J_k|| (log scale kept internal)."""
        a = self.a
        k = np.asarray(k, dtype=np.int64)
        lin = jacobi_log_inv_norm(k, a)
        s0, l0 = jacobi_at_zero(k, a)
        s1, l1 = jacobi_at_zero(np.maximum(k - 1, 0), a + 1)
        s1 = np.where(k == 0, 0.0, s1)
        # k + 2a + 1 > 0 whenever k >= 1 and a > -1
        lk = np.log(np.abs(np.where(k == 0, 1.0, k + 2 * a + 1)))
        u = s1 * np.exp(lk + l1 + lin)
        v = s0 * np.exp(l0 + lin)
        return u, v

    def _offdiag(self, X, Y):
        ux, vx = self._terms(X)
        uy, vy = self._terms(Y)
        num = ux * vy - vx * uy
        val = 0.5 * num / ((X - Y) * (X + Y + 2 * self.a + 1))
        # same-parity pairs vanish identically
        val = np.where((X - Y) % 2 == 0, 0.0, val)
        if self.sign < 0:
            val = -val  # (-1)^{x-y} with x-y odd
        return val


def discrete_jacobi_symmetric(a, sign="+", policy=DEFAULT_POLICY) -> DiscreteJacobiSymmetric:
    return DiscreteJacobiSymmetric(a, sign, policy)


def jacobi_orthonormal(t, kmax, a):
    """Orthonormal symmetric Jacobi polynomials times (1-t^2)^(a/2) at t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = np.arange(kmax + 2, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        beta = k * (k + 2 * a) / ((2 * k + 2 * a + 1) * (2 * k + 2 * a - 1))
    beta[0] = 0.0
    if kmax + 1 >= 1:
        beta[1] = 1.0 / (2 * a + 3)
    mass = (2 * a + 1) * math.log(2.0) + 2 * gammaln(a + 1) - gammaln(2 * a + 2)
    with np.errstate(divide="ignore"):
        logf0 = 0.5 * a * np.log1p(-t * t) - 0.5 * mass
    return _hot.recurrence_table(t, np.zeros(kmax + 1), np.sqrt(beta), logf0, 1.0, kmax)


class CDKernel(KernelFunction):
    """Finite Christoffel-Darboux kernel exposed through the generator API."""

    family = "cd_finite"
    domain_model = "finite"

    def __init__(self, kernel: KernelMatrix, params=None):
        super().__init__(params or {}, kernel.policy)
        self.kernel = kernel
        self.domain_model = kernel.window.model

    def block(self, xs, ys):
        return self.kernel.sub(list(np.atleast_1d(xs)), list(np.atleast_1d(ys)))

    def materialize(self, window, validate=True):
        return self.kernel.restrict(window.points) if not window.same_sites(self.kernel.window) \
            else self.kernel


class ParticleHole(KernelFunction):
    """K°(x,y) = delta - (-1)^{nu(x)-nu(y)} K(x,y) for a generator K."""

    def __init__(self, base: KernelFunction, nu_anchor=0):
        super().__init__(dict(base.params), base.policy)
        self.base = base
        self.nu_anchor = int(nu_anchor)
        self.family = base.family
        self.domain_model = base.domain_model
        self.is_projection = base.is_projection
        self.params["particle_hole"] = True

    def prepare(self, kmax):
        self.base.prepare(kmax)

    def block(self, xs, ys):
        xs = _as_int_sites(np.atleast_1d(xs), self.domain_model)
        ys = _as_int_sites(np.atleast_1d(ys), self.domain_model)
        K = self.base.block(xs, ys)
        s = np.where((xs - self.nu_anchor) % 2 == 0, 1.0, -1.0)
        t = np.where((ys - self.nu_anchor) % 2 == 0, 1.0, -1.0)
        delta = (xs[:, None] == ys[None, :]).astype(float)
        return delta - s[:, None] * t[None, :] * K

    def diag(self, xs):
        return 1.0 - self.base.diag(xs)


def particle_hole(kernel, nu_anchor=None):
    """Particle/hole transform of a KernelMatrix or a KernelFunction.

    For matrices the window's nu is used (shifted by ``nu_anchor`` when
    given, which does not change parities up to a global sign that cancels).
    """
    if isinstance(kernel, KernelMatrix):
        w = kernel.window
        nu = np.asarray(w.nu) - (nu_anchor or 0)
        s = np.where(nu % 2 == 0, 1.0, -1.0)
        K = np.eye(len(w)) - s[:, None] * s[None, :] * kernel.entries
        return KernelMatrix(w, K, kernel.is_projection, kernel.policy)
    if isinstance(kernel, ParticleHole) and (nu_anchor or 0) % 2 == kernel.nu_anchor % 2:
        return kernel.base
    if isinstance(kernel, KernelFunction):
        return ParticleHole(kernel, nu_anchor or 0)
    raise DomainError("particle_hole expects a KernelMatrix or KernelFunction")


# ---------------------------------------------------------------------------
# scaled Charlier kernels
# ---------------------------------------------------------------------------

def charlier_shift(N: int, phi: float) -> int:
    """s_N = integer part of N + 2 cos(phi) sqrt(N)."""
    if N < 1:
        raise DomainError("N must be positive")
    return int(math.floor(N + 2.0 * math.cos(phi) * math.sqrt(N)))


def charlier_functions(u, kmax, theta=1.0):
    """Orthonormal Charlier functions phi_0..phi_kmax at lattice points u >= 0."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    k = np.arange(kmax + 2, dtype=float)
    a = k[: kmax + 1] + theta
    b = np.sqrt(k * theta)
    logf0 = 0.5 * (-theta + u * math.log(theta) - gammaln(u + 1))
    return _hot.recurrence_table(u, a, b, logf0, 1.0, kmax)


def charlier_scaled_kernel(N: int, phi: float, window: GroundWindow, theta=1.0,
                           policy=DEFAULT_POLICY) -> KernelMatrix:
    """N-th Charlier CD kernel at x + s_N, restricted to the window."""
    if not 0 < phi < math.pi:
        raise DomainError(f"phi={phi} must lie in (0, pi)")
    s = charlier_shift(N, phi)
    x = np.asarray(window.points)
    if np.any(x + s < 0):
        raise DomainError(f"window reaches below -s_N = {-s}")
    F = charlier_functions(x + s, N - 1, theta)
    K = F.T @ F
    return KernelMatrix(window, 0.5 * (K + K.T), False, policy)


def charlier_sine_error(N, phi, half_width=5):
    """Max entry deviation between the scaled Charlier and sine kernels."""
    win = GroundWindow.interval(-half_width, half_width, "full_line")
    K = charlier_scaled_kernel(N, phi, win)
    S = sine_kernel(phi).materialize(win)
    return float(np.abs(K.entries - S.entries).max())


FAMILIES = {
    "sine": lambda p: sine_kernel(p["phi"]),
    "discrete_hermite": lambda p: discrete_hermite(p.get("sign", "+"), p["r"]),
    "discrete_laguerre": lambda p: discrete_laguerre(p["alpha"], p["r"], p.get("sign", "+")),
    "discrete_jacobi_symmetric": lambda p: discrete_jacobi_symmetric(p["a"], p.get("sign", "+")),
}


def kernel_from_spec(spec: dict, policy=DEFAULT_POLICY) -> KernelFunction:
    fam = spec.get("family")
    if fam not in FAMILIES:
        raise DomainError(f"unknown kernel family {fam!r}")
    k = FAMILIES[fam](spec.get("params", {}))
    k.policy = policy
    return k
