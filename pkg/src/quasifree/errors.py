"""Exception hierarchy shared by all modules."""


class QuasifreeError(Exception):
    """Base class for errors raised by this package."""


class DomainError(QuasifreeError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConstructionError(QuasifreeError):
    """A numerical object could not be built (e.g. a degenerate weight)."""


class RegularityError(QuasifreeError):
    """A reduction pivot fell below the regularity threshold."""

    def __init__(self, site, variant, pivot, threshold):
        self.site = site
        self.variant = variant
        self.pivot = pivot
        self.threshold = threshold
        super().__init__(
            f"{variant} reduction at site {site!r} is not regular: "
            f"pivot {pivot:.3e} below threshold {threshold:.1e}"
        )


class EvaluationError(QuasifreeError):
    """A numerical evaluation missed its error target."""

    def __init__(self, message, bound=None):
        self.bound = bound
        if bound is not None:
            message = f"{message} (achieved bound {bound:.3e})"
        super().__init__(message)


class ResourceError(QuasifreeError):
    """A request exceeds the configured size limits."""
