"""Central tolerance table.

Every numeric threshold used by the library lives here so that reports can
state the policy they were produced under.
"""
from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Policy:
    orthogonality: float = 1e-10
    spectrum: float = 1e-8
    symmetry: float = 1e-12
    skew: float = 1e-12
    mass_normalization: float = 1e-12
    regularity: float = 1e-9
    equivalence_eps: float = 1e-3
    divergence_factor: float = 10.0
    sv_relative: float = 1e-8
    quadrature_target: float = 1e-14
    full_measure_max_sites: int = 20

    @property
    def divergence_threshold(self):
        return self.divergence_factor * self.equivalence_eps

    def as_dict(self):
        return asdict(self)

    def override(self, **changes):
        known = {f.name for f in fields(self)}
        unknown = set(changes) - known
        if unknown:
            raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **changes)


DEFAULT_POLICY = Policy()
