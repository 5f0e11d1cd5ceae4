"""Ordered ground sets, configurations and fermionic sign combinatorics."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from numbers import Integral
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import _hot
from .errors import DomainError

MODELS = ("half_line", "full_line", "finite")


def _as_site(x):
    # integral sites are kept as python ints so order tests are exact
    if isinstance(x, (Integral, np.integer)):
        return int(x)
    xf = float(x)
    if xf.is_integer():
        return int(xf)
    return xf


@dataclass(frozen=True)
class GroundWindow:
    """A finite ordered piece of a countable ground set.

    ``points`` holds the sites in increasing order, ``nu`` the integer
    enumeration.  Windows built by :meth:`interval` are order intervals of
    the ambient lattice; :meth:`remove` produces the (generally not interval)
    windows left behind after conditioning, which keep their ambient ``nu``.
    """

    points: tuple
    nu: tuple
    model: str = "finite"
    is_interval: bool = True
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"unknown window model {self.model!r}")
        pts = tuple(_as_site(p) for p in self.points)
        nu = tuple(int(v) for v in self.nu)
        if len(pts) != len(nu):
            raise DomainError("points and nu differ in length")
        for a, b in zip(pts, pts[1:]):
            if not a < b:
                raise DomainError("window points must be strictly increasing")
        for a, b in zip(nu, nu[1:]):
            if not a < b:
                raise DomainError("nu must be strictly increasing")
            if self.is_interval and b - a != 1:
                raise DomainError("nu must step by 1 on an interval window")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(pts)})

    # constructors ---------------------------------------------------------

    @classmethod
    def interval(cls, lo, hi, model="finite"):
        """Integer window {lo, ..., hi} of the given ambient lattice.

        half_line samples Z>=0 and full_line samples Z, both with nu(x) = x
        (anchor nu(0) = 0).  finite samples {1..N} with nu(x) = x - 1.
        """
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise DomainError(f"empty interval [{lo}, {hi}]")
        if model == "half_line" and lo < 0:
            raise DomainError("half_line windows live in Z>=0")
        if model == "finite" and lo < 1:
            raise DomainError("finite windows live in {1..N}")
        origin = 1 if model == "finite" else 0
        pts = tuple(range(lo, hi + 1))
        return cls(pts, tuple(p - origin for p in pts), model, True)

    @classmethod
    def range(cls, n):
        """The window {0, ..., n-1} of Z>=0; the default for desk-scale work."""
        if n < 1:
            raise DomainError("window needs at least one site")
        return cls.interval(0, n - 1, "half_line")

    @classmethod
    def from_points(cls, points, model="finite", nu0=0):
        """Window with arbitrary increasing real sites, nu = nu0 + position."""
        pts = tuple(points)
        return cls(pts, tuple(range(nu0, nu0 + len(pts))), model, True)

    # queries --------------------------------------------------------------

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, x):
        return _as_site(x) in self._index

    def index_of(self, x) -> int:
        try:
            return self._index[_as_site(x)]
        except KeyError:
            raise DomainError(f"site {x!r} is not in the window") from None

    def indices(self, sites: Iterable) -> list:
        return [self.index_of(x) for x in sites]

    def mask_of(self, sites: Iterable) -> int:
        m = 0
        for i in self.indices(sites):
            m |= 1 << i
        return m

    def sites_of(self, mask: int) -> tuple:
        return tuple(p for i, p in enumerate(self.points) if mask >> i & 1)

    def nu_of(self, x) -> int:
        return self.nu[self.index_of(x)]

    def parity(self) -> np.ndarray:
        """(-1)^nu(x) per site, as floats."""
        return np.where(np.asarray(self.nu) % 2 == 0, 1.0, -1.0)

    def remove(self, sites: Iterable) -> "GroundWindow":
        drop = set(self.indices(sites))
        keep = [i for i in range(len(self)) if i not in drop]
        if not keep:
            raise DomainError("removing every site leaves an empty window")
        return GroundWindow(tuple(self.points[i] for i in keep),
                            tuple(self.nu[i] for i in keep), self.model,
                            self.is_interval and not drop)

    def same_sites(self, other: "GroundWindow") -> bool:
        return self.points == other.points


@dataclass(frozen=True)
class Configuration:
    """A subset omega of a window, stored as an occupation bitmask."""

    window: GroundWindow
    mask: int = 0

    def __post_init__(self):
        if self.mask < 0 or self.mask >> len(self.window):
            raise DomainError("configuration mask has bits outside the window")

    @classmethod
    def of(cls, window, sites=()):
        return cls(window, window.mask_of(sites))

    @property
    def sites(self) -> tuple:
        return self.window.sites_of(self.mask)

    def __len__(self):
        return bin(self.mask).count("1")

    def __contains__(self, x):
        return x in self.window and bool(self.mask >> self.window.index_of(x) & 1)

    def complement(self) -> "Configuration":
        return Configuration(self.window, ((1 << len(self.window)) - 1) & ~self.mask)

    def __repr__(self):
        return f"Configuration({set(self.sites) or '{}'})"


@dataclass(frozen=True)
class CylinderSpec:
    """C(X, X'): X must be occupied, X' must be empty."""

    X: frozenset = frozenset()
    Xp: frozenset = frozenset()

    def __post_init__(self):
        X = frozenset(_as_site(x) for x in self.X)
        Xp = frozenset(_as_site(x) for x in self.Xp)
        if X & Xp:
            raise DomainError(f"cylinder sets overlap at {sorted(X & Xp)}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Xp", Xp)


def sgn_pair(x, y) -> int:
    """+1 if x > y, -1 if x < y."""
    if x == y:
        raise DomainError(f"sgn_pair needs distinct sites, got {x!r} twice")
    return 1 if x > y else -1


def _check_tuples(X, Y):
    if len(X) != len(Y):
        raise DomainError("X and Y must have equal length")
    if len(set(X)) != len(X) or len(set(Y)) != len(Y):
        raise DomainError("repeated entries inside X or inside Y")


def fermionic_sign(X: Sequence, Y: Sequence, omega: Configuration) -> int:
    """Sign of the monomial a+_{x_n}..a+_{x_1} a-_{y_1}..a-_{y_n} at omega.

    Direct product over the remaining particles u and the pairs inside the
    tuples; zero when the monomial annihilates delta_omega.
    """
    X = tuple(_as_site(x) for x in X)
    Y = tuple(_as_site(y) for y in Y)
    _check_tuples(X, Y)
    occ = set(omega.sites)
    if not set(Y) <= occ:
        return 0
    rest = occ - set(Y)
    if rest & set(X):
        return 0
    s = 1
    for u in rest:
        for x, y in zip(X, Y):
            s *= sgn_pair(x, u) * sgn_pair(y, u)
    n = len(X)
    for i in range(n):
        for j in range(i + 1, n):
            s *= sgn_pair(X[i], X[j]) * sgn_pair(Y[i], Y[j])
    return s


def fermionic_signs(window: GroundWindow, X: Sequence, Y: Sequence, masks) -> np.ndarray:
    """Vectorized :func:`fermionic_sign` over an array of masks (int8 result)."""
    _check_tuples(tuple(X), tuple(Y))
    if len(window) > 62:
        raise DomainError("batched signs support at most 62 sites")
    return _hot.fermionic_signs(masks, window.indices(X), window.indices(Y))


def target_mask(window: GroundWindow, X: Sequence, Y: Sequence, mask: int) -> int:
    """Mask of (omega minus Y) union X."""
    return (mask & ~window.mask_of(Y)) | window.mask_of(X)


def cylinder_contains(omega: Configuration, spec: CylinderSpec) -> bool:
    """True iff omega contains X and misses X'."""
    w = omega.window
    need = w.mask_of(spec.X)
    avoid = w.mask_of(spec.Xp)
    return (omega.mask & need) == need and not (omega.mask & avoid)


def enumerate_configurations(window: GroundWindow, n: int) -> Iterator[Configuration]:
    """All n-point configurations in lexicographic order of site tuples."""
    if not 0 <= n <= len(window):
        raise DomainError(f"n={n} outside 0..{len(window)}")
    for idx in combinations(range(len(window)), n):
        m = 0
        for i in idx:
            m |= 1 << i
        yield Configuration(window, m)


def masks_of_size(size: int, n: int) -> np.ndarray:
    """Masks of all n-subsets of range(size), lexicographic order."""
    out = []
    for idx in combinations(range(size), n):
        m = 0
        for i in idx:
            m |= 1 << i
        out.append(m)
    return np.array(out, dtype=np.int64)


def all_masks(size: int) -> np.ndarray:
    return np.arange(1 << size, dtype=np.int64)


@dataclass(frozen=True)
class MassFunction:
    """A probability mass on configurations of a window.

    ``masks`` and ``probs`` are parallel arrays; the support is unique.
    Lookups of masks outside the support return 0.
    """

    window: GroundWindow
    masks: np.ndarray
    probs: np.ndarray
    _lookup: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        masks = np.asarray(self.masks, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=float)
        if masks.shape != probs.shape:
            raise DomainError("masks and probs differ in shape")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise DomainError("masses must be finite and non-negative")
        if np.unique(masks).size != masks.size:
            raise DomainError("repeated configuration in mass function")
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_lookup", dict(zip(masks.tolist(), probs.tolist())))

    @classmethod
    def dense(cls, window, probs):
        probs = np.asarray(probs, dtype=float)
        if probs.shape != (1 << len(window),):
            raise DomainError("dense mass needs 2^N entries")
        return cls(window, np.arange(probs.size, dtype=np.int64), probs)

    @classmethod
    def from_dict(cls, window, d):
        keys = sorted(int(k) for k in d)
        return cls(window, np.array(keys, dtype=np.int64), np.array([d[k] for k in keys], dtype=float))

    def total(self) -> float:
        return float(self.probs.sum())

    def prob(self, mask: int) -> float:
        return self._lookup.get(int(mask), 0.0)

    def probs_of(self, masks) -> np.ndarray:
        get = self._lookup.get
        return np.array([get(int(m), 0.0) for m in np.asarray(masks).ravel()]).reshape(np.shape(masks))

    def cylinder(self, spec: CylinderSpec) -> float:
        need = self.window.mask_of(spec.X)
        avoid = self.window.mask_of(spec.Xp)
        sel = ((self.masks & need) == need) & ((self.masks & avoid) == 0)
        return float(self.probs[sel].sum())
