"""Verification suites shared by the CLI and the acceptance tests.

Each suite returns a JSON-ready report with the largest residual found, the
tolerance it was held to and a pass flag.
"""
from __future__ import annotations

from itertools import combinations, permutations

import numpy as np

from .dpp import (conditional_measure, full_measure, mass_correlation, reduce)
from .errors import RegularityError
from .fock import (GicarOperator, annihilation_matrix, creation_matrix, ideal_generator_image,
                   monomial_operator, p_transposition, permutation_operator, quasifree_state,
                   tau_state)
from .functionals import (MultiplierFunction, density_ratio_check, expected_sqrt_bruteforce,
                          expected_sqrt_multiplicative)
from .ground import CylinderSpec, GroundWindow, MassFunction
from .kernels import KernelMatrix, discrete_jacobi_symmetric, particle_hole
from .orthopoly import (EnsembleSpec, build_ops, cd_kernel, ensemble_average, ensemble_measure,
                        sf_closed_form, weight_family)


def _report(name, resid, tol, checks, **extra):
    out = {"suite": name, "max_residual": float(resid), "tolerance": tol,
           "checks": int(checks), "passed": bool(resid <= tol)}
    out.update(extra)
    return out


def random_projection(n, k, rng, window=None) -> KernelMatrix:
    window = window or GroundWindow.range(n)
    Q, _ = np.linalg.qr(rng.standard_normal((n, k))) if k else (np.zeros((n, 0)), None)
    P = Q @ Q.T
    return KernelMatrix(window, 0.5 * (P + P.T), True)


def random_contraction(n, rng, window=None) -> KernelMatrix:
    window = window or GroundWindow.range(n)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = rng.uniform(0.05, 0.95, n)
    K = (Q * lam) @ Q.T
    return KernelMatrix(window, 0.5 * (K + K.T))


# ---------------------------------------------------------------------------
# CAR / GICAR algebra
# ---------------------------------------------------------------------------

def _dense_monomial(window, X, Y):
    ops = [creation_matrix(window, x) for x in reversed(X)] + \
          [annihilation_matrix(window, y) for y in Y]
    M = ops[0]
    for o in ops[1:]:
        M = M @ o
    return M.toarray()


def car_suite(max_sites=5, max_n=3) -> dict:
    worst = 0.0
    checks = 0
    for N in range(1, max_sites + 1):
        w = GroundWindow.range(N)
        I = np.eye(1 << N)
        ap = {x: creation_matrix(w, x) for x in w}
        am = {x: annihilation_matrix(w, x) for x in w}
        for x in w:
            for y in w:
                r1 = (ap[x] @ am[y] + am[y] @ ap[x]).toarray() - (x == y) * I
                r2 = (ap[x] @ ap[y] + ap[y] @ ap[x]).toarray()
                r3 = (am[x] @ am[y] + am[y] @ am[x]).toarray()
                worst = max(worst, np.abs(r1).max(), np.abs(r2).max(), np.abs(r3).max())
                checks += 3
        for n in range(1, min(max_n, N) + 1):
            for X in permutations(w.points, n):
                for Y in permutations(w.points, n):
                    A = monomial_operator(w, X, Y).to_dense()
                    B = _dense_monomial(w, X, Y)
                    worst = max(worst, float(np.abs(A - B).max()))
                    checks += 1
    return _report("car", worst, 1e-12, checks)


def ideal_suite(max_sites=5) -> dict:
    worst = 0.0
    checks = 0
    for N in range(2, max_sites + 1):
        w = GroundWindow.range(N)
        ps = {}
        for x, y in combinations(w.points, 2):
            P = p_transposition(x, y, w)
            ps[(x, y)] = P
            one = GicarOperator.identity(w)
            worst = max(worst, (P @ P - one).max_abs(),
                        (P - permutation_operator(x, y, w)).max_abs())
            checks += 2
        for (x, y) in ps:
            for variant in ("minus", "plus"):
                for a, b in ((x, y), (y, x)):
                    G = ideal_generator_image(a, b, w, variant)
                    worst = max(worst, G.max_abs())
                    checks += 1
                    for Q in ps.values():
                        worst = max(worst, (Q @ G).max_abs(), (G @ Q).max_abs())
                        checks += 2
    return _report("ideal", worst, 1e-12, checks)


# ---------------------------------------------------------------------------
# orthogonal polynomial ensembles are perfect
# ---------------------------------------------------------------------------

def _weights(family, n, rng):
    w = GroundWindow.range(n)
    if family == "uniform":
        return weight_family("uniform", w)
    if family == "charlier":
        return weight_family("charlier", w, theta=1.0)
    return weight_family("table", w, values=rng.uniform(0.2, 2.0, n))


def perfect_suite(max_sites=8, max_n=3, Ns=(1, 2, 3), seed=0,
                  families=("uniform", "charlier", "random")) -> dict:
    """tau of the ensemble against the quasifree state of its CD kernel."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    checks = 0
    for fam in families:
        for N in Ns:
            for L in range(max(N, 1), max_sites + 1):
                wf = _weights(fam, L, rng)
                ops = build_ops(wf, N - 1)
                spec = EnsembleSpec(ops, N)
                masks, probs = ensemble_measure(spec)
                mass = MassFunction(wf.window, masks, probs / probs.sum())
                K = cd_kernel(ops, N)
                pts = wf.window.points
                for n in range(1, min(max_n, L) + 1):
                    for X in combinations(pts, n):
                        for Y in combinations(pts, n):
                            t = tau_state(mass, X, Y)
                            q = quasifree_state(K, X, Y)
                            worst = max(worst, abs(t - q))
                            checks += 1
                    # antisymmetry in the tuple order
                    if n >= 2:
                        X = pts[:n]
                        for Xp in permutations(X):
                            t = tau_state(mass, Xp, X)
                            q = quasifree_state(K, Xp, X)
                            worst = max(worst, abs(t - q))
                            checks += 1
    return _report("perfect", worst, 1e-9, checks)


def product_measure_gap(p=0.5) -> dict:
    """tau and the forced-kernel determinant for a product measure on 2 sites."""
    w = GroundWindow.range(2)
    probs = np.array([(1 - p) ** 2, p * (1 - p), (1 - p) * p, p * p])
    mass = MassFunction.dense(w, probs)
    tau = tau_state(mass, (0, 1), (0, 1))
    off = tau_state(mass, (0,), (1,))
    K = KernelMatrix(w, np.array([[p, off], [off, p]]), validate=False)
    det = quasifree_state(K, (0, 1), (0, 1))
    return {"tau": tau, "forced_kernel_offdiag": off, "det": det, "gap": tau - det}


def sf_suite(instances=200, seed=0) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        L = int(rng.integers(2, 9))
        N = int(rng.integers(1, min(4, L - 1) + 1)) if L > 1 else 1
        n = int(rng.integers(1, N + 1))
        pts = np.sort(rng.choice(np.arange(-20, 21), L, replace=False)) if rng.random() < 0.3 \
            else np.arange(L)
        w = GroundWindow(tuple(int(v) for v in pts), tuple(range(L)))
        wf = weight_family("table", w, values=rng.uniform(0.2, 2.0, L))
        ops = build_ops(wf, min(N, L - 1))
        X = tuple(rng.choice(pts, n, replace=False).tolist())
        Y = tuple(rng.choice(pts, n, replace=False).tolist())
        cf = sf_closed_form(ops, N, X, Y)
        bf = ensemble_average(ops, N, X, Y)
        worst = max(worst, abs(cf - bf) / (1 + abs(cf)))
    return _report("strahov_fyodorov", worst, 1e-9, instances)


# ---------------------------------------------------------------------------
# conditioning, particle/hole, functionals
# ---------------------------------------------------------------------------

def _random_regular_instance(rng, max_sites=8, max_cond=3):
    while True:
        n = int(rng.integers(3, max_sites + 1))
        k = int(rng.integers(1, n))
        K = random_projection(n, k, rng)
        m = int(rng.integers(1, min(max_cond, n - 1) + 1))
        Z = rng.choice(n, m, replace=False).tolist()
        nx = int(rng.integers(0, m + 1))
        X, Xp = Z[:nx], Z[nx:]
        try:
            orders = [list(p) for p in permutations(Z)]
            reds = [reduce(K, X, Xp, order=o) for o in orders]
        except RegularityError:
            continue
        return K, X, Xp, reds


def conditioning_suite(instances=100, seed=0, max_sites=8) -> dict:
    rng = np.random.default_rng(seed)
    worst_c = 0.0
    worst_o = 0.0
    for _ in range(instances):
        K, X, Xp, reds = _random_regular_instance(rng, max_sites)
        base = reds[0][0]
        for other, _t in reds[1:]:
            worst_o = max(worst_o, float(np.abs(other.entries - base.entries).max()))
        cond = conditional_measure(full_measure(K), CylinderSpec(frozenset(X), frozenset(Xp)))
        pts = base.window.points
        for r in range(1, min(3, len(pts)) + 1):
            for S in combinations(pts, r):
                a = float(np.linalg.det(base.sub(S, S)))
                b = mass_correlation(cond, S)
                worst_c = max(worst_c, abs(a - b))
    ok = worst_c <= 1e-9 and worst_o <= 1e-10
    return {"suite": "conditioning", "max_residual": max(worst_c, worst_o),
            "conditional_residual": worst_c, "order_residual": worst_o,
            "tolerance": {"conditional": 1e-9, "order": 1e-10}, "checks": instances,
            "passed": bool(ok)}


def particle_hole_suite(max_sites=8, seed=0, per_size=3) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    checks = 0
    for n in range(1, max_sites + 1):
        full = (1 << n) - 1
        for j in range(per_size):
            K = random_contraction(n, rng) if j % 2 == 0 else random_projection(n, int(rng.integers(0, n + 1)), rng)
            M = full_measure(K)
            Mo = full_measure(particle_hole(K))
            push = np.zeros(1 << n)
            push[full ^ M.masks] = M.probs
            worst = max(worst, float(np.abs(push - Mo.probs).max()))
            checks += 1
    jac = discrete_jacobi_symmetric(0.7).materialize(GroundWindow.interval(0, 40, "half_line"))
    exact = bool(np.array_equal(particle_hole(jac).entries, jac.entries))
    rep = _report("particle_hole", worst, 1e-10, checks, jacobi_self_dual_exact=exact)
    rep["passed"] = rep["passed"] and exact
    return rep


def functionals_suite(instances=100, seed=0) -> dict:
    rng = np.random.default_rng(seed)
    worst_a = 0.0
    worst_b = 0.0
    for i in range(instances):
        n = int(rng.integers(2, 11))
        k = int(rng.integers(0, n + 1))
        K = random_projection(n, k, rng)
        decay = 0.3 * (rng.uniform(0.3, 0.8) ** np.arange(n)) * rng.choice([-1.0, 1.0], n)
        alpha = MultiplierFunction(K.window, 1.0 + decay)
        worst_a = max(worst_a, abs(expected_sqrt_multiplicative(K, alpha)
                                   - expected_sqrt_bruteforce(K, alpha)))
        m = int(rng.integers(3, 9))
        L = random_projection(m, int(rng.integers(1, m)), rng)
        a = MultiplierFunction(L.window, 1.0 + 0.2 * rng.uniform(-1, 1, m) * 0.7 ** np.arange(m))
        worst_b = max(worst_b, density_ratio_check(L, a))
    worst = max(worst_a, worst_b)
    return {"suite": "functionals", "max_residual": worst, "sqrt_identity_residual": worst_a,
            "density_residual": worst_b, "tolerance": 1e-9, "checks": 2 * instances,
            "passed": bool(worst <= 1e-9)}


SUITES = {
    "car": car_suite,
    "ideal": ideal_suite,
    "perfect": perfect_suite,
    "strahov-fyodorov": sf_suite,
    "conditioning": conditioning_suite,
    "particle-hole": particle_hole_suite,
    "functionals": functionals_suite,
}
