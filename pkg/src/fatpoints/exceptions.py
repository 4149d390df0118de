"""Custom exceptions for fatpoints."""


class FatpointsError(Exception):
    """Base exception for all fatpoints errors."""

    pass


class InvalidSystemError(FatpointsError):
    """Malformed linear system or multiplicity vector."""

    pass


class IntersectionError(FatpointsError):
    """Intersection requested for systems on incomparable point sets."""

    pass


class DimensionError(FatpointsError):
    """A reported dimension falls below the expected dimension."""

    pass


class ClassificationError(FatpointsError):
    """Classifier precondition violated or list and lemmas disagree."""

    pass


class OracleError(FatpointsError):
    """Interpolation matrix cannot be built or evaluated."""

    pass


class DegenerationError(FatpointsError):
    """Invalid (k, b) degeneration or inconsistent dimension formula."""

    pass


class TraceError(FatpointsError):
    """Malformed or unreadable proof trace document."""

    pass


class CacheError(FatpointsError):
    """Corrupt or incompatible cache file."""

    pass


class SweepError(FatpointsError):
    """Invalid sweep range or layout."""

    pass
