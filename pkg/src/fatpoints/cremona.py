"""Standard quadratic (Cremona) transformations and the reduction loop."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Optional

from . import oracle
from .classifier import classify_dimension
from .config import FatpointsConfig
from .core import (
    AnySystem,
    DimensionReport,
    LinearSystem,
    MultVector,
    Source,
    report,
)
from .exceptions import InvalidSystemError, OracleError
from .types import Resolver

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CremonaStep:
    """One quadratic transformation centred at three of the points.

    ``after`` is the raw result; ``clamped`` lists the (index, value) pairs of
    negative multiplicities that were set to zero before the next step.
    """

    indices: tuple[int, int, int]
    before: MultVector
    after: MultVector
    delta: int
    clamped: tuple[tuple[int, int], ...] = ()

    @property
    def deep(self) -> bool:
        """Whether a multiplicity of -2 or less was clamped."""
        return any(value <= -2 for _, value in self.clamped)

    def to_dict(self) -> dict[str, Any]:
        return {
            "indices": list(self.indices),
            "before": self.before.to_dict(),
            "after": self.after.to_dict(),
            "delta": self.delta,
            "clamped": [list(pair) for pair in self.clamped],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CremonaStep":
        i, j, k = (int(index) for index in data["indices"])
        return cls(
            indices=(i, j, k),
            before=MultVector.from_dict(data["before"]),
            after=MultVector.from_dict(data["after"]),
            delta=int(data["delta"]),
            clamped=tuple((int(idx), int(value)) for idx, value in data.get("clamped", [])),
        )


class ReductionStatus(str, Enum):
    REDUCED_NONNEGATIVE = "reduced_nonnegative"
    EMPTY_DETECTED = "empty_detected"
    NEGATIVE_DEGREE = "negative_degree"


@dataclass(frozen=True)
class ReductionResult:
    """Outcome of the reduction loop.

    ``dimension`` is set only when the final form has a closed-form dimension.
    ``needs_oracle`` marks reductions that clamped a multiplicity <= -2.
    """

    start: MultVector
    final: MultVector
    steps: tuple[CremonaStep, ...]
    status: ReductionStatus
    dimension: Optional[int] = None
    needs_oracle: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "start": self.start.to_dict(),
            "final": self.final.to_dict(),
            "steps": [step.to_dict() for step in self.steps],
            "status": self.status.value,
            "dimension": self.dimension,
            "needs_oracle": self.needs_oracle,
        }


def cremona_step(v: MultVector, i: int, j: int, k: int) -> CremonaStep:
    """Apply the quadratic transformation centred at points i, j, k.

    d becomes 2d - mi - mj - mk and each of mi, mj, mk becomes d minus the
    other two; all other multiplicities are fixed. Negative results are kept.
    """
    size = len(v.mults)
    if len({i, j, k}) != 3:
        raise InvalidSystemError(f"Cremona indices must be distinct, got {(i, j, k)}")
    for index in (i, j, k):
        if not 0 <= index < size:
            raise InvalidSystemError(f"Index {index} out of range for {size} points")

    delta = v.d - (v.mults[i] + v.mults[j] + v.mults[k])
    mults = list(v.mults)
    for index in (i, j, k):
        mults[index] += delta
    return CremonaStep(
        indices=(i, j, k),
        before=v,
        after=MultVector(v.d + delta, tuple(mults)),
        delta=delta,
    )


def _top_three(v: MultVector) -> tuple[int, int, int]:
    # Largest values first, lowest index among equals.
    order = sorted(range(len(v.mults)), key=lambda index: (-v.mults[index], index))
    return order[0], order[1], order[2]


def standard_form_dimension(v: MultVector) -> int | None:
    """Closed-form dimension of a vector in standard form, when one applies."""
    positive = v.positive()
    if not positive:
        return v.d * (v.d + 3) // 2
    if sum(1 for value in positive if value > 1) <= 1:
        # One fat point plus simple points never gives speciality.
        return max(-1, v.virtual_dimension())
    return None


def reduce(v: MultVector) -> ReductionResult:
    """Reduce v by quadratic transformations until it is in standard form or empty.

    Points keep their positions; each round transforms on the three largest
    multiplicities. Negative multiplicities are clamped to zero after every
    step and the clamp is recorded on that step.
    """
    start = v
    current = v.clamped().padded(3)
    steps: list[CremonaStep] = []
    needs_oracle = False

    while True:
        if current.d < 0:
            status = ReductionStatus.NEGATIVE_DEGREE
            break
        if max(current.mults) > current.d:
            status = ReductionStatus.EMPTY_DETECTED
            break
        i, j, k = _top_three(current)
        step = cremona_step(current, i, j, k)
        if step.delta >= 0:
            status = ReductionStatus.REDUCED_NONNEGATIVE
            break
        clamped = tuple(
            (index, value) for index, value in enumerate(step.after.mults) if value < 0
        )
        step = replace(step, clamped=clamped)
        if step.deep:
            needs_oracle = True
        logger.debug(f"Cremona step {step.indices}: {step.before} -> {step.after}")
        steps.append(step)
        current = step.after.clamped()

    if status is ReductionStatus.REDUCED_NONNEGATIVE:
        dimension = standard_form_dimension(current)
    else:
        dimension = -1
    return ReductionResult(
        start=start,
        final=current,
        steps=tuple(steps),
        status=status,
        dimension=dimension,
        needs_oracle=needs_oracle,
    )


@dataclass(frozen=True)
class CremonaOutcome:
    """A reduction together with how its endpoint was resolved."""

    reduction: ReductionResult
    dimension: Optional[int]
    certified: bool
    endpoint: Optional[LinearSystem] = None
    endpoint_rule: str = ""
    confirmed_by_oracle: Optional[bool] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "reduction": self.reduction.to_dict(),
            "dimension": self.dimension,
            "certified": self.certified,
            "endpoint": list(self.endpoint.key) if self.endpoint is not None else None,
            "endpoint_rule": self.endpoint_rule,
            "confirmed_by_oracle": self.confirmed_by_oracle,
        }


def _oracle_dimension(s: AnySystem, config: FatpointsConfig) -> int | None:
    try:
        return oracle.dimension(s, config=config).dimension
    except OracleError as e:
        logger.warning(f"Oracle unavailable for {s}: {e}")
        return None


def evaluate(
    s: AnySystem,
    config: FatpointsConfig | None = None,
    resolver: Resolver | None = None,
    *,
    use_oracle: bool = True,
) -> CremonaOutcome:
    """Reduce s and resolve the endpoint.

    Endpoints without a closed form are read as L(d, m0, n, m) and handed to the
    classifier, then to ``resolver``; with ``use_oracle`` the oracle decides what
    is left (uncertified).
    """
    config = config or FatpointsConfig()
    vector = s if isinstance(s, MultVector) else MultVector.from_system(s)
    reduction = reduce(vector)

    dimension = reduction.dimension
    certified = dimension is not None
    endpoint: LinearSystem | None = None
    rule = reduction.status.value if dimension is not None else ""

    if dimension is None:
        endpoint = reduction.final.as_linear_system()
        if endpoint is not None:
            known = classify_dimension(endpoint)
            if known is not None and known.actual is not None:
                dimension, certified, rule = known.actual, known.certified, known.detail
            elif resolver is not None:
                resolved = resolver(endpoint)
                if resolved is not None:
                    dimension, certified = resolved
                    rule = "resolver"
        if dimension is None and use_oracle:
            dimension = _oracle_dimension(reduction.final, config)
            certified = False
            rule = "oracle"

    confirmed: bool | None = None
    if reduction.needs_oracle and config.negative_clamp == "oracle":
        certified = False
        if use_oracle and dimension is not None:
            measured = _oracle_dimension(vector, config)
            confirmed = measured == dimension
            if measured is not None and not confirmed:
                logger.warning(
                    f"Cremona endpoint of {s} gives {dimension} but the oracle measures {measured}"
                )
                dimension = measured

    state = "certified" if certified else "uncertified"
    logger.debug(
        f"Cremona {s}: {len(reduction.steps)} steps, {reduction.final}, "
        f"dimension {dimension} ({state})"
    )
    return CremonaOutcome(
        reduction=reduction,
        dimension=dimension,
        certified=certified and dimension is not None,
        endpoint=endpoint,
        endpoint_rule=rule,
        confirmed_by_oracle=confirmed,
    )


def dimension_via_cremona(
    s: LinearSystem,
    config: FatpointsConfig | None = None,
    resolver: Resolver | None = None,
    *,
    use_oracle: bool = True,
) -> DimensionReport:
    """Actual dimension of s via Cremona reduction, when the endpoint is known."""
    outcome = evaluate(s, config, resolver, use_oracle=use_oracle)
    reduction = outcome.reduction
    detail = f"{len(reduction.steps)} steps to {reduction.final} ({reduction.status.value})"
    if outcome.endpoint_rule:
        detail += f"; {outcome.endpoint_rule}"
    return report(
        s,
        outcome.dimension,
        Source.CREMONA,
        certified=outcome.certified,
        detail=detail,
    )


def compare_endpoint(
    s: AnySystem,
    expected: AnySystem,
    config: FatpointsConfig | None = None,
) -> bool:
    """Check that s and a claimed reduction endpoint have equal oracle dimension.

    Used when a canonical reduction path ends somewhere other than a quoted
    endpoint; a mismatch is logged.
    """
    config = config or FatpointsConfig()
    ours = oracle.dimension(s, config=config).dimension
    theirs = oracle.dimension(expected, config=config).dimension
    if ours != theirs:
        logger.warning(f"{s} has dimension {ours} but endpoint {expected} has {theirs}")
        return False
    return True
