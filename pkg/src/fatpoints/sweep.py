"""Range sweeps: which systems to visit, how to fan them out, how to print them."""

from __future__ import annotations

import asyncio
import csv
import io
import json
import logging
from collections import Counter
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable, Literal, Optional, Sequence, TypeVar

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import oracle
from .classifier import classify, classify_dimension
from .config import FatpointsConfig
from .core import LinearSystem, conditions, expected_dimension, virtual_dimension
from .exceptions import SweepError
from .prover import Prover
from .trace import ProofTrace

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

Range = tuple[int, int]
SystemKey = tuple[int, int, int, int]
Channel = Literal["list", "oracle", "prove"]

CSV_COLUMNS = ("d", "m0", "n", "m", "v", "e", "dim", "verdict", "rule", "source")


def parse_range(text: str) -> Range:
    """Parse ``a:b`` (inclusive) or a single integer ``a``."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            value = int(parts[0])
            return value, value
        if len(parts) == 2:
            return int(parts[0]), int(parts[1])
    except ValueError as e:
        raise SweepError(f"Invalid range {text!r}") from e
    raise SweepError(f"Invalid range {text!r}")


def critical_points(d: int, m0: int, m: int) -> list[int]:
    """The boundary n values for L(d, m0, n, m).

    The smallest n with v <= -1 (ceiling of the rational boundary) and the
    largest n with v >= 0 (its floor), when that exists.
    """
    if m <= 0:
        raise SweepError("critical n needs m >= 1")
    base = (d * (d + 3) - m0 * (m0 + 1)) // 2
    c = conditions(m)
    smallest_negative = max(0, -(-(base + 1) // c))
    points = {smallest_negative}
    if base >= 0:
        points.add(base // c)
    return sorted(points)


class SweepSpec(BaseModel):
    """Which systems a sweep visits. Ranges are inclusive; lo > hi is empty."""

    model_config = ConfigDict(frozen=True)

    d: Range
    m0: Optional[Range] = None
    m0_offset: Optional[Range] = Field(default=None, description="m0 = d - c for c in range")
    n: Optional[Range] = None
    critical: bool = False
    m: int = Field(default=4, ge=0)
    fmt: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def _check(self) -> "SweepSpec":
        if self.m0 is not None and self.m0_offset is not None:
            raise ValueError("give either m0 or m0_offset, not both")
        if self.critical and self.n is not None:
            raise ValueError("critical mode computes n; do not give an n range")
        if not self.critical and self.n is None:
            raise ValueError("give an n range or critical mode")
        if self.critical and self.m < 1:
            raise ValueError("critical mode needs m >= 1")
        for name in ("d", "m0", "m0_offset", "n"):
            bounds = getattr(self, name)
            if bounds is not None and bounds[0] < 0:
                raise ValueError(f"{name} range must start at 0 or above")
        return self

    def _m0_values(self, d: int) -> list[int]:
        if self.m0_offset is not None:
            low, high = self.m0_offset
            return sorted(d - c for c in range(low, high + 1) if 0 <= d - c)
        low, high = self.m0 if self.m0 is not None else (0, d)
        return list(range(low, min(high, d) + 1))

    def systems(self) -> list[LinearSystem]:
        """Systems in sweep order: d, then m0, then n ascending."""
        out: list[LinearSystem] = []
        for d in range(self.d[0], self.d[1] + 1):
            for m0 in self._m0_values(d):
                if self.critical:
                    ns = critical_points(d, m0, self.m)
                else:
                    assert self.n is not None
                    ns = list(range(self.n[0], self.n[1] + 1))
                out.extend(LinearSystem(d, m0, n, self.m) for n in ns)
        return out


@dataclass(frozen=True)
class Row:
    """One line of a classification table."""

    d: int
    m0: int
    n: int
    m: int
    v: int
    e: int
    dim: Optional[int]
    verdict: str
    rule: str
    source: str

    @property
    def system(self) -> LinearSystem:
        return LinearSystem(self.d, self.m0, self.n, self.m)

    @property
    def special(self) -> Optional[bool]:
        return None if self.dim is None else self.dim > self.e


def classify_row(
    s: LinearSystem,
    channel: Channel = "list",
    config: FatpointsConfig | None = None,
    prover: Prover | None = None,
) -> Row:
    """Classify s and attach a dimension from the chosen channel."""
    config = config or FatpointsConfig()
    verdict = classify(s)
    dim: Optional[int] = None
    source = ""
    if channel == "oracle":
        dim = oracle.dimension(s, config=config).dimension
        source = "oracle"
    elif channel == "prove":
        step = (prover or Prover(config)).prove(s).claim
        dim = step.dimension
        source = step.rule.value if step.certified else f"{step.rule.value}?"
    else:
        known = classify_dimension(s)
        if known is not None:
            dim, source = known.actual, known.source.value
        elif s.m == 4:
            dim, source = expected_dimension(s), "list"
    return Row(
        d=s.d,
        m0=s.m0,
        n=s.n,
        m=s.m,
        v=virtual_dimension(s),
        e=expected_dimension(s),
        dim=dim,
        verdict=verdict.status.value,
        rule=verdict.rule,
        source=source,
    )


def render(rows: Sequence[Row], fmt: Literal["csv", "json"] = "csv") -> str:
    """Rows as CSV (header always present) or a JSON array."""
    if fmt == "json":
        return json.dumps([asdict(row) for row in rows], indent=2) + "\n"
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(["" if value is None else value for value in asdict(row).values()])
    return buffer.getvalue()


# -- process pool --------------------------------------------------------------

_PROVERS: dict[str, Prover] = {}


def _process_prover(config: FatpointsConfig) -> Prover:
    # One prover per worker process and configuration; the memo is shared by its roots.
    key = config.model_dump_json()
    prover = _PROVERS.get(key)
    if prover is None:
        prover = _PROVERS[key] = Prover(config)
    return prover


def row_worker(item: tuple[SystemKey, Channel, dict[str, Any]]) -> Row:
    """Classify one system inside a worker process."""
    key, channel, settings = item
    config = FatpointsConfig(**settings)
    prover = _process_prover(config) if channel == "prove" else None
    return classify_row(LinearSystem.from_key(key), channel, config, prover)


def prove_worker(item: tuple[SystemKey, list[tuple[int, int]], dict[str, Any]]) -> str:
    """Prove one system inside a worker process; returns the trace as JSON."""
    key, hints, settings = item
    config = FatpointsConfig(**settings)
    trace = _process_prover(config).prove(LinearSystem.from_key(key), hints=hints)
    return trace.to_json()


async def run_sweep(
    items: Iterable[T],
    worker: Callable[[T], R],
    max_workers: Optional[int] = None,
    executor: Optional[Executor] = None,
) -> list[R]:
    """Run worker over items in an executor; results come back in input order."""
    work = list(items)
    if not work:
        return []
    loop = asyncio.get_running_loop()
    owned = executor is None
    pool = executor if executor is not None else ProcessPoolExecutor(max_workers=max_workers)
    try:
        futures = [loop.run_in_executor(pool, worker, item) for item in work]
        return list(await asyncio.gather(*futures))
    finally:
        if owned:
            pool.shutdown()


# -- prove summaries -------------------------------------------------------------


@dataclass
class ProveSummary:
    """Counts over a batch of proof traces."""

    roots: int = 0
    by_rule: Counter[str] = field(default_factory=Counter)
    uncertified_roots: int = 0
    uncertified_leaves: set[LinearSystem] = field(default_factory=set)
    failed_checks: list[LinearSystem] = field(default_factory=list)

    def add(self, trace: ProofTrace) -> None:
        self.roots += 1
        self.by_rule[trace.claim.rule.value] += 1
        if not trace.certified:
            self.uncertified_roots += 1
        self.uncertified_leaves.update(trace.uncertified_leaves())

    def render(self) -> str:
        lines = [f"roots: {self.roots}"]
        for rule, count in sorted(self.by_rule.items()):
            lines.append(f"  {rule}: {count}")
        lines.append(f"uncertified roots: {self.uncertified_roots}")
        lines.append(f"uncertified leaves: {len(self.uncertified_leaves)}")
        for leaf in sorted(self.uncertified_leaves):
            lines.append(f"  {leaf}")
        if self.failed_checks:
            lines.append(f"failed checks: {len(self.failed_checks)}")
            for system in self.failed_checks:
                lines.append(f"  {system}")
        return "\n".join(lines) + "\n"
