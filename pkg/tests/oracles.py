"""Independent quadrature oracles for the limit kernels.

These evaluate the defining integrals with scipy's classical polynomial
evaluators and their own quadrature rules, sharing no code with the
closed forms under test.
"""
import numpy as np
from scipy.special import eval_hermite, eval_jacobi, gammaln, roots_jacobi


def _legendre_panels(a, b, width, n=64):
    t, w = np.polynomial.legendre.leggauss(n)
    panels = max(1, int(np.ceil((b - a) / width)))
    edges = np.linspace(a, b, panels + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (hi - lo) * t + 0.5 * (hi + lo)).ravel()
    weights = (0.5 * (hi - lo) * w).ravel()
    return nodes, weights


def hermite_psi(kmax, t):
    out = np.empty((kmax + 1, t.size))
    for k in range(kmax + 1):
        H = eval_hermite(k, t)
        lognorm = 0.5 * (k * np.log(2.0) + gammaln(k + 1) + 0.5 * np.log(np.pi))
        with np.errstate(divide="ignore"):
            out[k] = np.sign(H) * np.exp(np.log(np.abs(H)) - 0.5 * t * t - lognorm)
    return out


def hermite_kernel(kmax, r, sign):
    """[int psi_x psi_y] over [r, inf) for sign '+', (-inf, r] for '-'."""
    a, b = (r, 26.0) if sign == "+" else (-26.0, r)
    t, w = _legendre_panels(a, b, 0.25)
    P = hermite_psi(kmax, t)
    return (P * w) @ P.T


def jacobi_kernel(kmax, a, nodes=120):
    """int_0^1 Ptilde_x Ptilde_y (1-t^2)^a dt with orthonormal Ptilde."""
    s, w = roots_jacobi(nodes, a, 0.0)
    t = 0.5 * (1 + s)
    # (1-t)^a is in the rule; the rest of the weight and the Jacobian remain
    w = w * 0.5 ** (a + 1) * (1 + t) ** a
    out = np.empty((kmax + 1, t.size))
    for n in range(kmax + 1):
        if n == 0:
            # (2a+1) Gamma(2a+1) = Gamma(2a+2) keeps a = -1/2 finite
            logh = (2 * a + 1) * np.log(2.0) + 2 * gammaln(a + 1) - gammaln(2 * a + 2)
        else:
            logh = ((2 * a + 1) * np.log(2.0) + 2 * gammaln(n + a + 1)
                    - np.log(2 * n + 2 * a + 1) - gammaln(n + 1) - gammaln(n + 2 * a + 1))
        out[n] = eval_jacobi(n, a, a, t) * np.exp(-0.5 * logh)
    return (out * w) @ out.T
