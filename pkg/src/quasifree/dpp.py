"""Determinantal measures on finite windows: correlations, cylinder
probabilities, exact point masses, sampling and Schur-complement conditioning."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RegularityError, ResourceError
from .ground import Configuration, CylinderSpec, MassFunction, _as_site
from .kernels import KernelMatrix
from .orthopoly import EnsembleSpec, ensemble_measure
from .policy import DEFAULT_POLICY, Policy


def correlation(K: KernelMatrix, points) -> float:
    """Principal minor det[K(x_i, x_j)]."""
    pts = [_as_site(p) for p in points]
    if len(set(pts)) != len(pts):
        raise DomainError("correlation points must be pairwise distinct")
    if not pts:
        return 1.0
    return float(np.linalg.det(K.sub(pts, pts)))


def cylinder_prob(K: KernelMatrix, spec: CylinderSpec) -> float:
    """M(C(X, X')) as the determinant with K-rows on X and (1-K)-rows on X'."""
    X = sorted(spec.X)
    Xp = sorted(spec.Xp)
    Z = X + Xp
    if not Z:
        return 1.0
    M = K.sub(Z, Z)
    k = len(X)
    M[k:] = np.eye(len(Z))[k:] - M[k:]
    return float(np.linalg.det(M))


def _det_masses(Kd, masks, chunk=8192):
    n = Kd.shape[0]
    I = np.eye(n)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    out = np.empty(masks.size)
    for s in range(0, masks.size, chunk):
        b = bits[s:s + chunk]
        M = np.where(b[:, :, None], Kd[None], (I - Kd)[None])
        out[s:s + chunk] = np.linalg.det(M)
    return out


def full_measure(K: KernelMatrix, policy: Policy = DEFAULT_POLICY) -> MassFunction:
    """Point masses of all 2^N configurations (index = mask)."""
    n = len(K)
    if n > policy.full_measure_max_sites:
        raise ResourceError(f"full measure on {n} sites exceeds the cap of "
                            f"{policy.full_measure_max_sites}")
    masks = np.arange(1 << n, dtype=np.int64)
    p = _det_masses(K.entries, masks)
    lo = float(p.min())
    if lo < -policy.spectrum:
        raise DomainError(f"negative point mass {lo:.3e}; kernel is not a contraction")
    p = np.maximum(p, 0.0)
    return MassFunction(K.window, masks, p)


class DeterminantalMeasure:
    """M^K for a positive contraction K on a finite window."""

    def __init__(self, kernel: KernelMatrix):
        lam = kernel.eigenvalues
        tol = kernel.policy.spectrum
        if len(lam) and (lam[0] < -tol or lam[-1] > 1 + tol):
            raise DomainError("kernel is not a positive contraction")
        self.kernel = kernel
        self._masses = None

    @property
    def window(self):
        return self.kernel.window

    def correlation(self, points):
        return correlation(self.kernel, points)

    def cylinder_prob(self, spec):
        return cylinder_prob(self.kernel, spec)

    def full_measure(self):
        if self._masses is None:
            self._masses = full_measure(self.kernel)
        return self._masses

    def sample(self, rng):
        return sample(self.kernel, rng)

    def sample_many(self, n, seed):
        return sample_many(self.kernel, n, seed)


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

def _range_basis(K: KernelMatrix):
    K.require_projection()
    lam, U = K.eigh
    return U[:, lam > 0.5]


def _sample_from_basis(V, rng):
    V = V.copy()
    n, k = V.shape
    picked = []
    for step in range(k, 0, -1):
        p = np.einsum("ij,ij->i", V, V)
        p = np.maximum(p, 0.0)
        p /= p.sum()
        i = int(rng.choice(n, p=p))
        picked.append(i)
        j = int(np.abs(V[i]).argmax())
        vj = V[:, j] / V[i, j]
        V = V - np.outer(vj, V[i])
        V = np.delete(V, j, axis=1)
        if V.shape[1]:
            V, _ = np.linalg.qr(V)
    m = 0
    for i in picked:
        m |= 1 << i
    return m


def _rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def sample(K: KernelMatrix, rng) -> Configuration:
    """One exact sample of the projection DPP (spectral algorithm)."""
    V = _range_basis(K)
    return Configuration(K.window, _sample_from_basis(V, _rng(rng)))


def sample_many(K: KernelMatrix, n: int, seed) -> np.ndarray:
    """n samples as an int64 mask array, driven by one seeded generator."""
    V = _range_basis(K)
    rng = _rng(seed)
    return np.array([_sample_from_basis(V, rng) for _ in range(n)], dtype=np.int64)


# ---------------------------------------------------------------------------
# conditioning
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionStep:
    site: object
    variant: str  # "occupied" or "vacant"
    pivot: float


@dataclass(frozen=True)
class ReductionTrace:
    steps: tuple = field(default_factory=tuple)

    def as_list(self):
        return [{"site": s.site, "variant": s.variant, "pivot": s.pivot} for s in self.steps]


def _elementary(K: np.ndarray, i: int, variant: str, eps: float, site):
    d = K[i, i]
    keep = np.r_[0:i, i + 1:K.shape[0]]
    a = K[np.ix_(keep, keep)]
    b = K[keep, i]
    c = K[i, keep]
    if variant == "occupied":
        if abs(d) < eps:
            raise RegularityError(site, variant, abs(d), eps)
        out = a - np.outer(b, c) / d
    elif variant == "vacant":
        if abs(1.0 - d) < eps:
            raise RegularityError(site, variant, abs(1.0 - d), eps)
        out = a + np.outer(b, c) / (1.0 - d)
    else:
        raise DomainError(f"unknown reduction variant {variant!r}")
    return 0.5 * (out + out.T), float(d)


def reduce_steps(K: KernelMatrix, steps, policy: Policy = DEFAULT_POLICY):
    """Apply elementary reductions [(site, 'occupied'|'vacant'), ...] in order."""
    win = K.window
    M = K.entries.copy()
    used = []
    trace = []
    seen = set()
    for site, variant in steps:
        site = _as_site(site)
        if site in seen:
            raise DomainError(f"site {site!r} reduced twice")
        seen.add(site)
        i = win.index_of(site)
        M, d = _elementary(M, i, variant, policy.regularity, site)
        trace.append(ReductionStep(site, variant, d))
        used.append(site)
        win = win.remove([site])
    return KernelMatrix(win, M, K.is_projection, K.policy), ReductionTrace(tuple(trace))


def reduce(K: KernelMatrix, X=(), Xp=(), order=None, policy: Policy = DEFAULT_POLICY):
    """(X, X')-reduction: kernel of the measure conditioned on C(X, X').

    ``order`` optionally lists the sites of X u X' in the order in which the
    elementary steps are taken; the default is X ascending then X' ascending.
    """
    spec = CylinderSpec(frozenset(X), frozenset(Xp))
    for s in spec.X | spec.Xp:
        K.window.index_of(s)
    if order is None:
        order = sorted(spec.X) + sorted(spec.Xp)
    order = [_as_site(s) for s in order]
    if sorted(order) != sorted(spec.X | spec.Xp):
        raise DomainError("order must list each site of X and X' once")
    steps = [(s, "occupied" if s in spec.X else "vacant") for s in order]
    return reduce_steps(K, steps, policy)


def conditional_measure(mass: MassFunction, spec: CylinderSpec) -> MassFunction:
    """Brute-force conditional measure on the configurations of window - (X u X')."""
    w = mass.window
    need = w.mask_of(spec.X)
    avoid = w.mask_of(spec.Xp)
    sel = ((mass.masks & need) == need) & ((mass.masks & avoid) == 0)
    tot = float(mass.probs[sel].sum())
    if tot <= 0:
        raise DomainError("cylinder has zero mass")
    removed = sorted(spec.X | spec.Xp)
    win = w.remove(removed)
    keep_idx = [i for i in range(len(w)) if w.points[i] not in set(removed)]
    src = mass.masks[sel]
    new = np.zeros(src.size, dtype=np.int64)
    for j, i in enumerate(keep_idx):
        new |= ((src >> i) & 1) << j
    return MassFunction(win, new, mass.probs[sel] / tot)


def mass_correlation(mass: MassFunction, points) -> float:
    """rho(points) = M(omega contains points) by enumeration."""
    m = mass.window.mask_of(points)
    return float(mass.probs[(mass.masks & m) == m].sum())


# ---------------------------------------------------------------------------
# quasi-invariance
# ---------------------------------------------------------------------------

def rn_density(X, Y, u) -> float:
    """a(u) = prod (u - y) / prod (u - x)."""
    if len(X) != len(Y):
        raise DomainError("X and Y must have equal length")
    if any(u == v for v in list(X) + list(Y)):
        raise DomainError(f"u={u!r} lies in X or Y")
    num = np.prod([u - y for y in Y]) if len(Y) else 1.0
    den = np.prod([u - x for x in X]) if len(X) else 1.0
    return float(num / den)


def quasi_invariance_check(spec: EnsembleSpec, X, Xp, Y, Yp) -> float:
    """max |(M_N)_{Y,Y'} - normalized Psi_{|a|^2} (M_N)_{X,X'}| over configurations."""
    X, Xp, Y, Yp = (sorted(_as_site(v) for v in s) for s in (X, Xp, Y, Yp))
    if len(X) != len(Y):
        raise DomainError("|X| must equal |Y|")
    if set(X) & set(Xp) or set(Y) & set(Yp):
        raise DomainError("X, X' (and Y, Y') must be disjoint")
    if set(X) | set(Xp) != set(Y) | set(Yp) or len(X) + len(Xp) != len(Y) + len(Yp):
        raise DomainError("X u X' must equal Y u Y' as sets")
    w = spec.ops.window
    masks, probs = ensemble_measure(spec)
    M = MassFunction(w, masks, probs)
    cx = conditional_measure(M, CylinderSpec(frozenset(X), frozenset(Xp)))
    cy = conditional_measure(M, CylinderSpec(frozenset(Y), frozenset(Yp)))
    rest = cx.window
    a2 = np.array([rn_density(X, Y, float(u)) ** 2 for u in rest.points])
    psi = np.array([np.prod(a2[[i for i in range(len(rest)) if int(m) >> i & 1]])
                    for m in cx.masks])
    weighted = psi * cx.probs
    weighted /= weighted.sum()
    target = cy.probs_of(cx.masks)
    resid = float(np.abs(weighted - target).max(initial=0.0))
    # mass of cy outside the support of cx also counts
    outside = set(cy.masks.tolist()) - set(cx.masks.tolist())
    if outside:
        resid = max(resid, max(cy.prob(m) for m in outside))
    return resid
