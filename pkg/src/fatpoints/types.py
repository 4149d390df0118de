"""Type definitions for fatpoints."""

from __future__ import annotations

from typing import Callable, Optional, Protocol

from .core import LinearSystem


class Claim(Protocol):
    """A dimension claim for one system, as handed out by a dimension provider."""

    @property
    def system(self) -> LinearSystem:
        """The system the claim is about."""
        ...

    @property
    def dimension(self) -> int:
        """Claimed actual dimension (-1 for empty)."""
        ...

    @property
    def certified(self) -> bool:
        """Whether the claim rests only on certificates (no oracle evidence)."""
        ...


# Returns the claim for a child system, or None when it cannot be closed
# (including a cycle back to a system still being proven).
DimsProvider = Callable[[LinearSystem], Optional[Claim]]

# Resolves a Cremona endpoint of quasi-homogeneous shape to (dimension, certified).
Resolver = Callable[[LinearSystem], Optional[tuple[int, bool]]]
