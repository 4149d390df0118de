"""The (k,b) degeneration calculus.

A (k,b) degeneration splits L(d, m0, n, m) into a plane part L_P and a
Hirzebruch part L_F, with kernel systems L_P_hat and L_F_hat:

    L_F_hat = L(d, d-k+1, b, m)       L_P = L(d-k, m0, n-b, m)
    L_F     = L(d, d-k,   b, m)       L_P_hat = L(d-k-1, m0, n-b, m)

The limit dimension follows from the four children's dimensions; the lemma
checks below turn it into bounds on the dimension of L itself.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Optional

from .core import LinearSystem, expected_dimension, virtual_dimension
from .exceptions import DegenerationError
from .types import Claim, DimsProvider

logger = logging.getLogger(__name__)


class Rule(str, Enum):
    LEMMA_EMPTY = "lemma_empty"
    LEMMA_EXPECTED = "lemma_expected"
    THEOREM_A = "theorem_a"
    THEOREM_B = "theorem_b"


@dataclass(frozen=True)
class DegenerationNode:
    """One (k,b) degeneration of a parent system."""

    parent: LinearSystem
    k: int
    b: int
    lf_hat: LinearSystem
    lf: LinearSystem
    lp: LinearSystem
    lp_hat: LinearSystem
    rule: Optional[Rule] = None

    @property
    def children(self) -> tuple[LinearSystem, LinearSystem, LinearSystem, LinearSystem]:
        """The four restricted systems in table order."""
        return (self.lf_hat, self.lf, self.lp, self.lp_hat)

    def with_rule(self, rule: Rule) -> "DegenerationNode":
        return replace(self, rule=rule)

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "b": self.b,
            "LF_hat": list(self.lf_hat.key),
            "LF": list(self.lf.key),
            "LP": list(self.lp.key),
            "LP_hat": list(self.lp_hat.key),
            "rule": self.rule.value if self.rule is not None else None,
        }

    @classmethod
    def from_dict(cls, parent: LinearSystem, data: dict[str, Any]) -> "DegenerationNode":
        rule = data.get("rule")
        return cls(
            parent=parent,
            k=int(data["k"]),
            b=int(data["b"]),
            lf_hat=LinearSystem.from_key(data["LF_hat"]),
            lf=LinearSystem.from_key(data["LF"]),
            lp=LinearSystem.from_key(data["LP"]),
            lp_hat=LinearSystem.from_key(data["LP_hat"]),
            rule=Rule(rule) if rule is not None else None,
        )


def degenerate(s: LinearSystem, k: int, b: int) -> DegenerationNode:
    """Build the four restricted systems of a (k,b) degeneration."""
    if not 0 < k < s.d:
        raise DegenerationError(f"k must satisfy 0 < k < d for {s}, got k={k}")
    if not 0 <= b <= s.n:
        raise DegenerationError(f"b must satisfy 0 <= b <= n for {s}, got b={b}")
    d, m = s.d, s.m
    return DegenerationNode(
        parent=s,
        k=k,
        b=b,
        lf_hat=LinearSystem(d, d - k + 1, b, m),
        lf=LinearSystem(d, d - k, b, m),
        lp=LinearSystem(d - k, s.m0, s.n - b, m),
        lp_hat=LinearSystem(d - k - 1, s.m0, s.n - b, m),
    )


def check_identities(node: DegenerationNode) -> bool:
    """Evaluate the three virtual-dimension identities of a node."""
    v = virtual_dimension(node.parent)
    v_p, v_f = virtual_dimension(node.lp), virtual_dimension(node.lf)
    v_p_hat, v_f_hat = virtual_dimension(node.lp_hat), virtual_dimension(node.lf_hat)
    d, k = node.parent.d, node.k
    return v_p + v_f == v + d - k and v_p_hat + v_f == v - 1 and v_p + v_f_hat == v - 1


def l0_case(node: DegenerationNode, l_p: int, l_f: int, l_p_hat: int, l_f_hat: int) -> Rule:
    """Which case of the limit formula applies; case (a) on equality."""
    r_p = l_p - l_p_hat - 1
    r_f = l_f - l_f_hat - 1
    return Rule.THEOREM_A if r_p + r_f <= node.parent.d - node.k - 1 else Rule.THEOREM_B


def dim_l0(node: DegenerationNode, l_p: int, l_f: int, l_p_hat: int, l_f_hat: int) -> int:
    """Dimension of the limit system from the dimensions of the four children."""
    if min(l_p, l_f, l_p_hat, l_f_hat) < -1:
        raise DegenerationError("Child dimensions must be at least -1")
    bound = node.parent.d - node.k - 1
    total = (l_p - l_p_hat - 1) + (l_f - l_f_hat - 1)
    case_a = l_p_hat + l_f_hat + 1
    case_b = l_p + l_f - node.parent.d + node.k
    if total < bound:
        return case_a
    if total > bound:
        return case_b
    if case_a != case_b:
        raise DegenerationError(f"Limit formulas disagree at equality for {node.parent}")
    return case_a


@dataclass(frozen=True)
class NodeOutcome:
    """A node whose rule fired, with the child claims it used."""

    node: DegenerationNode
    claims: tuple[Claim, ...]
    dimension: int
    certified: bool


def _non_special(claim: Claim) -> bool:
    return claim.dimension == expected_dimension(claim.system)


def _empty(claim: Claim) -> bool:
    return claim.dimension == -1


def _fetch(child: LinearSystem, provider: DimsProvider, require_certified: bool) -> Claim | None:
    claim = provider(child)
    if claim is None or (require_certified and not claim.certified):
        return None
    return claim


def _collect(
    systems: tuple[LinearSystem, ...],
    provider: DimsProvider,
    require_certified: bool,
) -> dict[LinearSystem, Claim] | None:
    claims: dict[LinearSystem, Claim] = {}
    for child in systems:
        if child not in claims:
            claim = _fetch(child, provider, require_certified)
            if claim is None:
                return None
            claims[child] = claim
    return claims


def _outcome(
    node: DegenerationNode, claims: dict[LinearSystem, Claim], rule: Rule, dimension: int
) -> NodeOutcome:
    ordered = tuple(claims[child] for child in node.children)
    return NodeOutcome(
        node=node.with_rule(rule),
        claims=ordered,
        dimension=dimension,
        certified=all(claim.certified for claim in ordered),
    )


def try_empty(
    s: LinearSystem,
    k: int,
    b: int,
    provider: DimsProvider,
    *,
    require_certified: bool = False,
) -> NodeOutcome | None:
    """Emptiness: L_F and L_P non-special, both kernel systems empty."""
    if virtual_dimension(s) > -1:
        raise DegenerationError(f"{s} has non-negative virtual dimension")
    node = degenerate(s, k, b)
    claims: dict[LinearSystem, Claim] = {}
    # Cheap Hirzebruch side first; stop at the first failed hypothesis.
    for child, check in (
        (node.lf_hat, _empty),
        (node.lf, _non_special),
        (node.lp_hat, _empty),
        (node.lp, _non_special),
    ):
        claim = _fetch(child, provider, require_certified)
        if claim is None or not check(claim):
            return None
        claims[child] = claim
    return _outcome(node, claims, Rule.LEMMA_EMPTY, -1)


def try_expected(
    s: LinearSystem,
    k: int,
    b: int,
    provider: DimsProvider,
    *,
    require_certified: bool = False,
) -> NodeOutcome | None:
    """Expected dimension: all four children non-special, v_F and v_P at least -1."""
    v = virtual_dimension(s)
    if v < -1:
        raise DegenerationError(f"{s} has virtual dimension below -1")
    node = degenerate(s, k, b)
    if virtual_dimension(node.lf) < -1 or virtual_dimension(node.lp) < -1:
        return None
    claims: dict[LinearSystem, Claim] = {}
    for child in (node.lf_hat, node.lf, node.lp_hat, node.lp):
        claim = _fetch(child, provider, require_certified)
        if claim is None or not _non_special(claim):
            return None
        claims[child] = claim
    return _outcome(node, claims, Rule.LEMMA_EXPECTED, v)


def try_theorem(
    s: LinearSystem,
    k: int,
    b: int,
    provider: DimsProvider,
    *,
    require_certified: bool = False,
) -> NodeOutcome | None:
    """Evaluate the limit dimension directly; it certifies s when it equals e(s)."""
    node = degenerate(s, k, b)
    claims = _collect(node.children, provider, require_certified)
    if claims is None:
        return None
    l_p, l_f = claims[node.lp].dimension, claims[node.lf].dimension
    l_p_hat, l_f_hat = claims[node.lp_hat].dimension, claims[node.lf_hat].dimension
    l0 = dim_l0(node, l_p, l_f, l_p_hat, l_f_hat)
    # The limit bounds the general system from above; e(s) bounds it from below.
    if l0 != expected_dimension(s):
        logger.debug(f"({k},{b}) on {s}: limit dimension {l0} above expected")
        return None
    return _outcome(node, claims, l0_case(node, l_p, l_f, l_p_hat, l_f_hat), l0)


def k_order(d: int) -> list[int]:
    """Plane-side degree drops to try: 3, 4, 5, 6 first, then the rest of 1..d-1."""
    preferred = [k for k in (3, 4, 5, 6) if 0 < k < d]
    return preferred + [k for k in range(1, d) if k not in preferred]


def b_window(s: LinearSystem) -> tuple[Fraction, Fraction]:
    """Open interval of preferred b values for the sign of v(s)."""
    d = s.d
    if virtual_dimension(s) <= -1:
        return Fraction(d, 3), Fraction(4 * d - 4, 10)
    return Fraction(d, 3), Fraction(2 * d - 2, 5)


def b_order(s: LinearSystem) -> list[int]:
    """Point splits to try: window values first (n-b odd before even), then 0..n."""
    low, high = b_window(s)
    window = [b for b in range(s.n + 1) if low < b < high]
    odd = [b for b in window if (s.n - b) % 2 == 1]
    even = [b for b in window if (s.n - b) % 2 == 0]
    head = sorted(odd, reverse=True) + sorted(even, reverse=True)
    return head + [b for b in range(s.n + 1) if b not in head]
