"""Numeric invariants of quasi-homogeneous plane-curve linear systems.

A system L(d, m0, n, m) is the space of plane curves of degree d with a point
of multiplicity m0 at p0 and points of multiplicity m at n further general
points. Every number here is an exact integer.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Union

from .exceptions import DimensionError, IntersectionError, InvalidSystemError

_SYSTEM_PATTERN = re.compile(
    r"^\s*(?:L\s*\()?\s*(-?\d+)[\s,]+(-?\d+)[\s,]+(-?\d+)[\s,]+(-?\d+)\s*\)?\s*$"
)


def conditions(m: int) -> int:
    """Number of linear conditions imposed by a point of multiplicity m."""
    return m * (m + 1) // 2 if m > 0 else 0


def monomial_count(d: int) -> int:
    """Dimension of the space of degree-d forms, (d+1)(d+2)/2."""
    return (d + 1) * (d + 2) // 2 if d >= 0 else 0


class Source(str, Enum):
    """Channel that produced a dimension."""

    FORMULA = "formula"
    LIST = "list"
    CREMONA = "cremona"
    ORACLE = "oracle"
    DEGENERATION = "degeneration"


@dataclass(frozen=True, order=True)
class LinearSystem:
    """The quasi-homogeneous system L(d, m0, n, m)."""

    d: int
    m0: int
    n: int
    m: int

    def __post_init__(self) -> None:
        for name in ("d", "m0", "n", "m"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidSystemError(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise InvalidSystemError(f"{name} must be non-negative, got {value}")

    @classmethod
    def parse(cls, text: str) -> "LinearSystem":
        """Parse ``L(d,m0,n,m)``, ``d,m0,n,m`` or ``d m0 n m``."""
        match = _SYSTEM_PATTERN.match(text)
        if match is None:
            raise InvalidSystemError(f"Cannot parse linear system from {text!r}")
        d, m0, n, m = (int(group) for group in match.groups())
        return cls(d, m0, n, m)

    @classmethod
    def from_key(cls, key: Any) -> "LinearSystem":
        """Build from a ``[d, m0, n, m]`` sequence."""
        try:
            d, m0, n, m = (int(value) for value in key)
        except (TypeError, ValueError) as e:
            raise InvalidSystemError(f"Invalid system key {key!r}") from e
        return cls(d, m0, n, m)

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.d, self.m0, self.n, self.m)

    def with_n(self, n: int) -> "LinearSystem":
        return replace(self, n=n)

    def __str__(self) -> str:
        return f"L({self.d},{self.m0},{self.n},{self.m})"


@dataclass(frozen=True)
class MultVector:
    """A general system (d; m1, ..., mr) in the working form of Cremona reduction."""

    d: int
    mults: tuple[int, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.mults, tuple):
            object.__setattr__(self, "mults", tuple(self.mults))

    @classmethod
    def from_system(cls, s: LinearSystem) -> "MultVector":
        return cls(s.d, (s.m0,) + (s.m,) * s.n)

    def canonical(self) -> "MultVector":
        """Multiplicities sorted in descending order."""
        return MultVector(self.d, tuple(sorted(self.mults, reverse=True)))

    def clamped(self) -> "MultVector":
        """Negative multiplicities replaced by zero."""
        return MultVector(self.d, tuple(max(0, value) for value in self.mults))

    def padded(self, length: int) -> "MultVector":
        """Append zero multiplicities up to the given length."""
        missing = length - len(self.mults)
        if missing <= 0:
            return self
        return MultVector(self.d, self.mults + (0,) * missing)

    def positive(self) -> tuple[int, ...]:
        return tuple(value for value in self.mults if value > 0)

    def condition_count(self) -> int:
        return sum(conditions(value) for value in self.mults)

    def virtual_dimension(self) -> int:
        """d(d+3)/2 minus the conditions of the positive multiplicities."""
        return (self.d * (self.d + 3)) // 2 - self.condition_count()

    def as_linear_system(self) -> LinearSystem | None:
        """Read the vector as L(d, m0, n, m) when its positive part has that shape.

        A homogeneous vector is read with m0 = 0. With two distinct values the
        one occurring once becomes m0 (the larger if both occur once).
        """
        if self.d < 0:
            return None
        counts = Counter(self.positive())
        if not counts:
            return LinearSystem(self.d, 0, 0, 0)
        if len(counts) == 1:
            ((m, n),) = counts.items()
            return LinearSystem(self.d, 0, n, m)
        if len(counts) == 2:
            (high, high_count), (low, low_count) = sorted(counts.items(), reverse=True)
            if high_count == 1:
                return LinearSystem(self.d, high, low_count, low)
            if low_count == 1:
                return LinearSystem(self.d, low, high_count, high)
        return None

    def to_dict(self) -> dict[str, Any]:
        return {"d": self.d, "mults": list(self.mults)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MultVector":
        return cls(int(data["d"]), tuple(int(value) for value in data["mults"]))

    def __str__(self) -> str:
        return f"({self.d}; [{', '.join(str(value) for value in self.mults)}])"


AnySystem = Union[LinearSystem, MultVector]


@dataclass(frozen=True)
class DimensionReport:
    """Virtual, expected and (when known) actual dimension of a system."""

    virtual: int
    expected: int
    actual: int | None = None
    source: Source = Source.FORMULA
    certified: bool = True
    detail: str = ""

    def __post_init__(self) -> None:
        if self.expected != max(-1, self.virtual):
            raise DimensionError(
                f"expected {self.expected} inconsistent with virtual {self.virtual}"
            )
        if self.actual is not None and self.actual < self.expected:
            raise DimensionError(
                f"actual dimension {self.actual} below expected dimension {self.expected}"
            )

    @property
    def special(self) -> bool | None:
        """Whether the actual dimension exceeds the expected one, if known."""
        if self.actual is None:
            return None
        return self.actual > self.expected


def virtual_dimension(s: AnySystem) -> int:
    """d(d+3)/2 - m0(m0+1)/2 - n m(m+1)/2."""
    if isinstance(s, MultVector):
        return s.virtual_dimension()
    return (s.d * (s.d + 3) - s.m0 * (s.m0 + 1) - s.n * s.m * (s.m + 1)) // 2


def expected_dimension(s: AnySystem) -> int:
    return max(-1, virtual_dimension(s))


def intersection(a: LinearSystem, b: LinearSystem) -> int:
    """Intersection number of two quasi-homogeneous classes, defined when b.n <= a.n."""
    if b.n > a.n:
        raise IntersectionError(f"{b} has more points than {a}; intersection undefined")
    return a.d * b.d - a.m0 * b.m0 - b.n * a.m * b.m


def self_intersection(s: LinearSystem) -> int:
    return s.d * s.d - s.m0 * s.m0 - s.n * s.m * s.m


def genus(s: LinearSystem) -> int:
    """Arithmetic genus from Plücker's formula."""
    return ((s.d - 1) * (s.d - 2) - s.m0 * (s.m0 - 1) - s.n * s.m * (s.m - 1)) // 2


def mult_vector(s: LinearSystem) -> MultVector:
    return MultVector.from_system(s)


def report(
    s: AnySystem,
    actual: int | None = None,
    source: Source = Source.FORMULA,
    *,
    certified: bool = True,
    detail: str = "",
) -> DimensionReport:
    """Build a DimensionReport for s."""
    v = virtual_dimension(s)
    return DimensionReport(
        virtual=v,
        expected=max(-1, v),
        actual=actual,
        source=source,
        certified=certified,
        detail=detail,
    )


def critical_counts(d: int, m0: int, m: int) -> tuple[int, int]:
    """Boundary point counts for L(d, m0, n, m) used by monotonicity in n.

    Returns (smallest n with v <= -1, largest n with v >= -1). Both bounds use
    the threshold -1, so a system with v = -1 counts on both sides; the table
    helper ``sweep.critical_points`` instead reports the largest n with v >= 0.
    The second value is -1 when no n qualifies.
    """
    if m <= 0:
        raise InvalidSystemError("critical point counts need m >= 1")
    base = (d * (d + 3) - m0 * (m0 + 1)) // 2
    c = conditions(m)
    negative = max(0, -((-(base + 1)) // c))
    top = (base + 1) // c if base >= -1 else -1
    return negative, top
