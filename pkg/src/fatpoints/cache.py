"""Append-only JSON-lines cache of computed dimensions."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

from . import oracle
from .config import FatpointsConfig
from .core import LinearSystem, Source
from .exceptions import CacheError, FatpointsError
from .prover import Prover
from .trace import StepRule

logger = logging.getLogger(__name__)

CACHE_FORMAT = 1

_RULE_SOURCES = {
    StepRule.FORMULA: Source.FORMULA,
    StepRule.CLASSIFIER_LIST: Source.LIST,
    StepRule.LARGE_M0: Source.LIST,
    StepRule.CREMONA: Source.CREMONA,
    StepRule.ORACLE: Source.ORACLE,
}


def source_for(rule: StepRule) -> Source:
    """Cache source for the rule that closed a proof step."""
    return _RULE_SOURCES.get(rule, Source.DEGENERATION)


@dataclass(frozen=True)
class CacheEntry:
    """One recorded dimension."""

    system: LinearSystem
    dimension: int
    source: Source
    trace: Optional[str] = None
    provenance: dict[str, Any] = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "key": list(self.system.key),
            "dimension": self.dimension,
            "source": self.source.value,
            "trace": self.trace,
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CacheEntry":
        return cls(
            system=LinearSystem.from_key(data["key"]),
            dimension=int(data["dimension"]),
            source=Source(data["source"]),
            trace=data.get("trace"),
            provenance=dict(data.get("provenance") or {}),
        )


@dataclass(frozen=True)
class CacheSummary:
    path: Path
    lines: int
    entries: int
    sources: dict[str, int]
    state_hash: str


@dataclass(frozen=True)
class CacheVerification:
    checked: int
    mismatches: tuple[tuple[LinearSystem, int, int], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.mismatches


class CacheFile:
    """
    JSON-lines log of dimensions keyed by (d, m0, n, m).

    The first line is a header; every further line is an entry. Replaying the
    log keeps the last entry per key. Only one process should write.
    """

    def __init__(self, path: Path | str, *, tool: str = "fatpoints") -> None:
        self._path = Path(path)
        self._tool = tool

    @property
    def path(self) -> Path:
        return self._path

    def _header(self) -> str:
        return json.dumps({"format": CACHE_FORMAT, "tool": self._tool}, sort_keys=True)

    def _ensure_header(self) -> None:
        if not self._path.exists() or self._path.stat().st_size == 0:
            self._path.parent.mkdir(parents=True, exist_ok=True)
            self._path.write_text(self._header() + "\n", encoding="utf-8")

    def append(self, entry: CacheEntry) -> None:
        self.extend([entry])

    def extend(self, entries: Iterable[CacheEntry]) -> int:
        self._ensure_header()
        count = 0
        with self._path.open("a", encoding="utf-8") as handle:
            for entry in entries:
                handle.write(json.dumps(entry.to_dict(), sort_keys=True) + "\n")
                count += 1
        logger.debug(f"Appended {count} entries to {self._path}")
        return count

    def _lines(self) -> list[str]:
        if not self._path.exists():
            return []
        try:
            return self._path.read_text(encoding="utf-8").splitlines()
        except OSError as e:
            raise CacheError(f"Cannot read cache {self._path}: {e}") from e

    def replay(self) -> dict[LinearSystem, CacheEntry]:
        """Rebuild the state from the log, last writer wins."""
        lines = self._lines()
        state: dict[LinearSystem, CacheEntry] = {}
        if not lines:
            return state
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as e:
            raise CacheError(f"{self._path}:1: corrupt header: {e}") from e
        if not isinstance(header, dict) or header.get("format") != CACHE_FORMAT:
            raise CacheError(f"{self._path}:1: unsupported cache format")
        for number, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            try:
                entry = CacheEntry.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, FatpointsError) as e:
                raise CacheError(f"{self._path}:{number}: corrupt entry: {e}") from e
            state[entry.system] = entry
        return state

    def get(self, s: LinearSystem) -> Optional[CacheEntry]:
        return self.replay().get(s)

    def state_hash(self) -> str:
        """sha256 of the canonical JSON of the replayed state."""
        state = self.replay()
        canonical = json.dumps(
            [state[key].to_dict() for key in sorted(state)],
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def compact(self) -> int:
        """Rewrite the log with one line per key; returns the number of entries."""
        state = self.replay()
        self._path.parent.mkdir(parents=True, exist_ok=True)
        fd, temp_name = tempfile.mkstemp(dir=self._path.parent, prefix=".cache-", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                handle.write(self._header() + "\n")
                for key in sorted(state):
                    handle.write(json.dumps(state[key].to_dict(), sort_keys=True) + "\n")
            os.replace(temp_name, self._path)
        except BaseException:
            Path(temp_name).unlink(missing_ok=True)
            raise
        logger.info(f"Compacted {self._path} to {len(state)} entries")
        return len(state)

    def inspect(self) -> CacheSummary:
        state = self.replay()
        sources = Counter(entry.source.value for entry in state.values())
        return CacheSummary(
            path=self._path,
            lines=max(0, len(self._lines()) - 1),
            entries=len(state),
            sources=dict(sorted(sources.items())),
            state_hash=self.state_hash(),
        )

    def verify(
        self,
        sample: Optional[int] = None,
        config: FatpointsConfig | None = None,
        prover: Prover | None = None,
    ) -> CacheVerification:
        """Recompute a deterministic sample of entries.

        Oracle entries are re-measured with their recorded prime, seed and
        trials; every other entry is proven again.
        """
        config = config or FatpointsConfig()
        prover = prover or Prover(config)
        state = self.replay()
        keys = sorted(state)
        if sample is not None and 0 <= sample < len(keys):
            keys = [keys[i * len(keys) // sample] for i in range(sample)]

        mismatches: list[tuple[LinearSystem, int, int]] = []
        for key in keys:
            entry = state[key]
            if entry.source is Source.ORACLE:
                recorded = entry.provenance
                fresh = oracle.dimension(
                    key,
                    trials=int(recorded.get("trials", config.trials)),
                    seed=int(recorded.get("seed", config.seed)),
                    prime=int(recorded.get("prime", config.prime)),
                    config=config,
                ).dimension
            else:
                fresh = prover.prove(key).dimension
            if fresh != entry.dimension:
                logger.warning(f"Cache entry {key} records {entry.dimension}, recomputed {fresh}")
                mismatches.append((key, entry.dimension, fresh))
        return CacheVerification(checked=len(keys), mismatches=tuple(mismatches))
