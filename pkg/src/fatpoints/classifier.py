"""Speciality by list membership.

Covers the (-1) curves and configurations with m <= 2, the complete list of
(-1) special quasi-homogeneous systems with m = 4, the quoted m <= 3 families,
and the rules for systems whose m0 is at least d - 5.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Any, Callable, Optional

from .core import (
    DimensionReport,
    LinearSystem,
    Source,
    genus,
    intersection,
    report,
    self_intersection,
    virtual_dimension,
)
from .exceptions import ClassificationError, IntersectionError, InvalidSystemError


class Family(str, Enum):
    """The (-1) curves and configurations with m <= 2."""

    CONIC5 = "conic5"  # L(2,0,5,1)
    TANGENT = "tangent"  # L(e,e-1,2e,1)
    COMPOUND_LINES = "compound_lines"  # L(e,e,e,1)
    SEXTIC = "sextic"  # L(6,3,7,2)
    CUBIC = "cubic"  # L(3,0,3,2)


_PARAMETRIC = (Family.TANGENT, Family.COMPOUND_LINES)


@dataclass(frozen=True)
class MinusOneClass:
    """A member of one of the (-1) families, with its parameter e."""

    family: Family
    e: int = 1

    def __post_init__(self) -> None:
        if self.family in _PARAMETRIC and self.e < 1:
            raise InvalidSystemError(f"{self.family.value} needs e >= 1, got {self.e}")
        if self.family not in _PARAMETRIC and self.e != 1:
            raise InvalidSystemError(f"{self.family.value} takes no parameter")

    @property
    def system(self) -> LinearSystem:
        e = self.e
        if self.family is Family.CONIC5:
            return LinearSystem(2, 0, 5, 1)
        if self.family is Family.TANGENT:
            return LinearSystem(e, e - 1, 2 * e, 1)
        if self.family is Family.COMPOUND_LINES:
            return LinearSystem(e, e, e, 1)
        if self.family is Family.SEXTIC:
            return LinearSystem(6, 3, 7, 2)
        return LinearSystem(3, 0, 3, 2)

    @property
    def components(self) -> int:
        """Number of disjoint (-1) curves making up the class."""
        return -self_intersection(self.system)

    @property
    def compound(self) -> bool:
        return self.components > 1

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family.value, "e": self.e}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MinusOneClass":
        return cls(Family(data["family"]), int(data.get("e", 1)))

    def __str__(self) -> str:
        return str(self.system)


def _tangent(e: int) -> MinusOneClass:
    return MinusOneClass(Family.TANGENT, e)


def _lines(e: int) -> MinusOneClass:
    return MinusOneClass(Family.COMPOUND_LINES, e)


@dataclass(frozen=True)
class Witness:
    """A splitting L = M + sum N_j A_j."""

    parts: tuple[tuple[int, MinusOneClass], ...]

    def residual(self, s: LinearSystem) -> LinearSystem | None:
        """M = L - sum N_j A_j, or None when some entry would be negative."""
        d, m0, m = s.d, s.m0, s.m
        for multiplier, curve in self.parts:
            a = curve.system
            d -= multiplier * a.d
            m0 -= multiplier * a.m0
            m -= multiplier * a.m
        if min(d, m0, m) < 0:
            return None
        return LinearSystem(d, m0, s.n, m)

    def dimension(self, s: LinearSystem) -> int:
        """Actual dimension of a (-1) special system: the residual's virtual dimension."""
        residual = self.residual(s)
        if residual is None:
            raise ClassificationError(f"Witness does not fit {s}")
        return virtual_dimension(residual)

    def to_dict(self) -> dict[str, Any]:
        return {"parts": [{"N": n, "class": a.to_dict()} for n, a in self.parts]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Witness":
        return cls(
            tuple(
                (int(part["N"]), MinusOneClass.from_dict(part["class"]))
                for part in data["parts"]
            )
        )

    def __str__(self) -> str:
        return " + ".join(f"{n}*{a}" for n, a in self.parts)


def _witness(*parts: tuple[int, MinusOneClass]) -> Witness:
    return Witness(tuple(parts))


class VerdictStatus(str, Enum):
    MINUS_ONE_SPECIAL = "minus_one_special"
    NON_SPECIAL = "non_special"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SpecialityVerdict:
    """Classification outcome with the row or rule that decided it."""

    status: VerdictStatus
    rule: str
    witness: Optional[Witness] = None

    @property
    def special(self) -> bool:
        return self.status is VerdictStatus.MINUS_ONE_SPECIAL

    def dimension(self, s: LinearSystem) -> int | None:
        """Actual dimension implied by the verdict, if it implies one."""
        if self.status is VerdictStatus.MINUS_ONE_SPECIAL and self.witness is not None:
            return self.witness.dimension(s)
        if self.status is VerdictStatus.NON_SPECIAL:
            return max(-1, virtual_dimension(s))
        return None


# ---------------------------------------------------------------------------
# The m = 4 list
# ---------------------------------------------------------------------------

Matcher = Callable[[int, int, int], Optional[Witness]]


@dataclass(frozen=True)
class ListRow:
    """One row of the m = 4 list: a name and a matcher returning the splitting."""

    name: str
    match: Matcher


def _half(n: int) -> int | None:
    return n // 2 if n >= 2 and n % 2 == 0 else None


def _row_full(d: int, m0: int, n: int) -> Witness | None:
    if m0 == d and n >= 1 and d >= 4 * n:
        return _witness((4, _lines(n)))
    return None


def _row_minus_one(d: int, m0: int, n: int) -> Witness | None:
    if m0 == d - 1 and n >= 1 and 2 * d >= 7 * n:
        return _witness((3, _lines(n)))
    return None


def _row_minus_two(d: int, m0: int, n: int) -> Witness | None:
    if m0 == d - 2 and n >= 1 and 3 * d >= 9 * n + 1:
        return _witness((2, _lines(n)))
    return None


def _tangent_row(scale: int, shift: int, gap: int, splits: int) -> Matcher:
    """Rows L(scale*e + shift, scale*e + shift - gap, 2e, 4) split by `splits` tangents."""

    def match(d: int, m0: int, n: int) -> Witness | None:
        e = _half(n)
        if e is None or d != scale * e + shift or m0 != d - gap:
            return None
        return _witness((splits, _tangent(e)))

    return match


def _row_pair(d: int, m0: int, n: int) -> Witness | None:
    e = _half(n)
    if e is None or d != 6 * e or m0 != 6 * e - 2:
        return None
    return _witness((2, _tangent(e)), (2, _lines(2 * e)))


_SPORADIC: dict[tuple[int, int, int], Witness] = {
    (5, 0, 2): _witness((3, _tangent(1))),
    (6, 1, 2): _witness((2, _tangent(1))),
    (8, 3, 4): _witness((3, _tangent(2))),
    (9, 4, 4): _witness((2, _tangent(2))),
    (12, 7, 6): _witness((2, _tangent(3))),
    (15, 10, 8): _witness((2, _tangent(4))),
    (6, 0, 2): _witness((2, _tangent(1))),
    (6, 0, 3): _witness((2, MinusOneClass(Family.CUBIC))),
    (8, 2, 4): _witness((2, _tangent(2))),
    (12, 6, 7): _witness((2, MinusOneClass(Family.SEXTIC))),
    (9, 2, 5): _witness((2, MinusOneClass(Family.CONIC5))),
    (8, 0, 5): _witness((4, MinusOneClass(Family.CONIC5))),
    (9, 1, 5): _witness((2, MinusOneClass(Family.CONIC5))),
    (9, 0, 5): _witness((2, MinusOneClass(Family.CONIC5))),
}


def _sporadic_row(key: tuple[int, int, int]) -> ListRow:
    d, m0, n = key

    def match(d_: int, m0_: int, n_: int) -> Witness | None:
        return _SPORADIC[key] if (d_, m0_, n_) == key else None

    return ListRow(f"d-m0={d - m0}: L({d},{m0},{n},4)", match)


M4_ROWS: tuple[ListRow, ...] = (
    ListRow("d-m0=0: L(d,d,e,4), d>=4e>=4", _row_full),
    ListRow("d-m0=1: L(d,d-1,e,4), d>=7e/2, e>=1", _row_minus_one),
    ListRow("d-m0=2: L(d,d-2,e,4), d>=(9e+1)/3", _row_minus_two),
    ListRow("d-m0=2: L(6e,6e-2,2e,4)", _row_pair),
    ListRow("d-m0=3: L(5e,5e-3,2e,4)", _tangent_row(5, 0, 3, 3)),
    ListRow("d-m0=3: L(5e+1,5e-2,2e,4)", _tangent_row(5, 1, 3, 2)),
    ListRow("d-m0=4: L(4e,4e-4,2e,4)", _tangent_row(4, 0, 4, 4)),
    ListRow("d-m0=4: L(4e+1,4e-3,2e,4)", _tangent_row(4, 1, 4, 3)),
    ListRow("d-m0=4: L(4e+2,4e-2,2e,4)", _tangent_row(4, 2, 4, 2)),
) + tuple(_sporadic_row(key) for key in _SPORADIC)


def minus_one_list_m4(s: LinearSystem) -> SpecialityVerdict:
    """Match s against every row of the m = 4 list."""
    if s.m != 4:
        raise ClassificationError(f"{s} does not have m = 4")
    for row in M4_ROWS:
        witness = row.match(s.d, s.m0, s.n)
        if witness is not None:
            return SpecialityVerdict(VerdictStatus.MINUS_ONE_SPECIAL, row.name, witness)
    return SpecialityVerdict(VerdictStatus.NON_SPECIAL, "not on the m=4 list")


# ---------------------------------------------------------------------------
# m <= 3
# ---------------------------------------------------------------------------


def _double_points(s: LinearSystem) -> SpecialityVerdict:
    """General double points, with m0 = 2 read as one more double point.

    Only the double conic through five points and the double line through two
    are special. A simple point (m0 = 1) always imposes one condition.
    """
    if s.m0 == 1:
        return SpecialityVerdict(VerdictStatus.NON_SPECIAL, "m=2: double points, one simple")
    if (s.d, s.m0, s.n) == (4, 0, 5):
        return SpecialityVerdict(
            VerdictStatus.MINUS_ONE_SPECIAL,
            "m=2: double conic through 5 points",
            _witness((2, MinusOneClass(Family.CONIC5))),
        )
    if (s.d, s.m0, s.n) == (2, 2, 1):
        return SpecialityVerdict(
            VerdictStatus.MINUS_ONE_SPECIAL,
            "m=2: double line through 2 points",
            _witness((2, _lines(1))),
        )
    return SpecialityVerdict(VerdictStatus.NON_SPECIAL, "m=2: double points")


def minus_one_list_small_m(s: LinearSystem) -> SpecialityVerdict:
    """Quoted special families with m <= 3, general double points and the m <= 1 defaults."""
    if s.m > 3:
        raise ClassificationError(f"{s} has m > 3")
    if s.m0 > s.d:
        return SpecialityVerdict(VerdictStatus.NON_SPECIAL, "m0 > d: empty")
    if s.n == 0 or s.m == 0:
        return SpecialityVerdict(VerdictStatus.NON_SPECIAL, "single fat point")
    if s.m == 1:
        return SpecialityVerdict(VerdictStatus.NON_SPECIAL, "m=1")
    e = _half(s.n)
    if e is not None:
        if s.m == 3 and s.d == 3 * e and s.m0 == 3 * e - 3:
            return SpecialityVerdict(
                VerdictStatus.MINUS_ONE_SPECIAL,
                "m=3: L(3e,3e-3,2e,3)",
                _witness((3, _tangent(e))),
            )
        if s.m == 3 and s.d == 3 * e + 1 and s.m0 == 3 * e - 2:
            return SpecialityVerdict(
                VerdictStatus.MINUS_ONE_SPECIAL,
                "m=3: L(3e+1,3e-2,2e,3)",
                _witness((2, _tangent(e))),
            )
        if s.m == 2 and s.d == 2 * e and s.m0 == 2 * e - 2:
            return SpecialityVerdict(
                VerdictStatus.MINUS_ONE_SPECIAL,
                "m=2: L(2e,2e-2,2e,2)",
                _witness((2, _tangent(e))),
            )
    if s.m == 2 and s.m0 <= 2:
        return _double_points(s)
    return SpecialityVerdict(VerdictStatus.UNKNOWN, f"m={s.m}: outside the quoted families")


def classify(s: LinearSystem) -> SpecialityVerdict:
    """List verdict for any m; m >= 5 is always unknown."""
    if s.m == 4:
        return minus_one_list_m4(s)
    if s.m <= 3:
        return minus_one_list_small_m(s)
    return SpecialityVerdict(VerdictStatus.UNKNOWN, "m>=5: no list")


# ---------------------------------------------------------------------------
# m0 >= d - 5
# ---------------------------------------------------------------------------


def _reduced_dimension(reduced: LinearSystem) -> int:
    # Inside the line-splitting reduction the quoted families are exhaustive.
    verdict = minus_one_list_small_m(reduced)
    if verdict.special and verdict.witness is not None:
        return verdict.witness.dimension(reduced)
    return max(-1, virtual_dimension(reduced))


def _listed_dimension(s: LinearSystem, lemma: str) -> int:
    verdict = minus_one_list_m4(s)
    if not verdict.special or verdict.witness is None:
        raise ClassificationError(f"{lemma} marks {s} special but it is not on the m=4 list")
    return verdict.witness.dimension(s)


def large_m0_dimension(s: LinearSystem) -> DimensionReport:
    """Actual dimension of L(d, m0, n, 4) with m0 >= d - 5."""
    if s.m != 4:
        raise ClassificationError(f"{s} does not have m = 4")
    if s.m0 > s.d:
        return report(s, -1, Source.LIST, detail="m0 > d: empty")
    gap = s.d - s.m0
    if gap > 5:
        raise ClassificationError(f"{s} has m0 < d-5")

    h, eps = divmod(s.n, 2)
    if gap == 5:
        q, mu = divmod(s.d, 3)
        special = (q == h + 1 and mu == 0 and eps == 0 and h <= 4) or (
            q == h and eps == 0 and 4 * q <= mu * (mu + 3)
        )
        lemma = f"m0=d-5: q={q} mu={mu} h={h} eps={eps}"
        dimension = _listed_dimension(s, lemma) if special else max(-1, virtual_dimension(s))
        return report(s, dimension, Source.LIST, detail=lemma)

    if gap == 4:
        q, mu = divmod(s.d, 4)
        special = q == h and eps == 0 and mu <= 2
        lemma = f"m0=d-4: q={q} mu={mu} h={h} eps={eps}"
        dimension = _listed_dimension(s, lemma) if special else max(-1, virtual_dimension(s))
        return report(s, dimension, Source.LIST, detail=lemma)

    k = 4 - gap
    reduced_degree = s.d - k * s.n
    lemma = f"m0=d-4+{k}: lines through p0 split {k} times"
    if reduced_degree < 0:
        return report(s, -1, Source.LIST, detail=f"{lemma}; negative residual degree")
    reduced = LinearSystem(reduced_degree, max(0, reduced_degree - 4 + k), s.n, 4 - k)
    return report(s, _reduced_dimension(reduced), Source.LIST, detail=f"{lemma}; {reduced}")


# ---------------------------------------------------------------------------
# Certified closures and witness checks
# ---------------------------------------------------------------------------


def classify_dimension(s: LinearSystem) -> DimensionReport | None:
    """Dimension of s when a formula, a lemma or a list witness determines it.

    Systems with m = 4 that are merely absent from the list are not closed
    here; their non-speciality is what the prover establishes.
    """
    if s.m0 > s.d:
        return report(s, -1, Source.FORMULA, detail="m0 > d: empty")
    if s.n == 0 or s.m == 0:
        return report(s, max(-1, virtual_dimension(s)), Source.FORMULA, detail="single fat point")
    if s.m == 4:
        if s.m0 >= s.d - 5:
            return large_m0_dimension(s)
        verdict = minus_one_list_m4(s)
        if verdict.special:
            return report(s, verdict.dimension(s), Source.LIST, detail=verdict.rule)
        return None
    if s.m <= 3:
        verdict = minus_one_list_small_m(s)
        dimension = verdict.dimension(s)
        if dimension is None:
            return None
        return report(s, dimension, Source.LIST, detail=verdict.rule)
    return None


def verify_minus_one_witness(s: LinearSystem, witness: Witness) -> bool:
    """Check a splitting against the definition of (-1) speciality."""
    if not witness.parts:
        return False
    multipliers = [multiplier for multiplier, _ in witness.parts]
    if min(multipliers) < 1 or max(multipliers) < 2:
        return False
    try:
        for multiplier, curve in witness.parts:
            a = curve.system
            components = -self_intersection(a)
            if a.n != s.n or components < 1 or genus(a) != 1 - components:
                return False
            if intersection(s, a) != -multiplier * components:
                return False
        residual = witness.residual(s)
        if residual is None or virtual_dimension(residual) < 0:
            return False
        if any(intersection(residual, curve.system) < 0 for _, curve in witness.parts):
            return False
        for (_, first), (_, second) in combinations(witness.parts, 2):
            if intersection(first.system, second.system) != 0:
                return False
    except (IntersectionError, InvalidSystemError):
        return False
    return True
