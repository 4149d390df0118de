"""Interpolation-matrix rank over a prime field at random points.

The oracle measures the generic dimension of a system: build the matrix of
derivative conditions at random points of GF(p), take its rank, and subtract
from the number of monomials. Its output is evidence, not a certificate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np
import numpy.typing as npt
from sympy import Matrix, isprime

from .config import FatpointsConfig
from .core import AnySystem, LinearSystem, MultVector, monomial_count
from .exceptions import OracleError

logger = logging.getLogger(__name__)

Point = tuple[int, int]
IntArray = npt.NDArray[np.int64]

# Integer points quoted for the explicit rank check of L(13,5,9,4); p0 first.
REGRESSION_SYSTEM = LinearSystem(13, 5, 9, 4)
REGRESSION_POINTS: tuple[Point, ...] = (
    (0, -3),
    (8, 3),
    (4, -4),
    (-5, -5),
    (-5, -2),
    (3, -1),
    (-5, -9),
    (8, 5),
    (5, 8),
    (-1, 4),
)


def monomials(d: int) -> list[tuple[int, int]]:
    """Exponents (alpha, beta) of x^alpha y^beta with alpha + beta <= d."""
    return [(total - beta, beta) for total in range(d + 1) for beta in range(total + 1)]


def _vector(s: AnySystem) -> MultVector:
    return s if isinstance(s, MultVector) else MultVector.from_system(s)


def _falling_table(d: int, prime: int) -> IntArray:
    """table[n, k] = n (n-1) ... (n-k+1) mod prime for 0 <= k <= n <= d."""
    table = np.zeros((d + 1, d + 1), dtype=np.int64)
    for n in range(d + 1):
        value = 1
        for k in range(n + 1):
            table[n, k] = value
            value = value * (n - k) % prime
    return table


def _powers(x: int, d: int, prime: int) -> IntArray:
    powers = np.ones(d + 1, dtype=np.int64)
    for e in range(1, d + 1):
        powers[e] = int(powers[e - 1]) * x % prime
    return powers


@dataclass(frozen=True)
class InterpolationMatrix:
    """Derivative conditions of a multiplicity vector at concrete points, mod prime."""

    entries: IntArray
    prime: int
    points: tuple[Point, ...]
    degree: int

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])


def _check_prime(prime: int) -> None:
    # Products of two residues must fit in int64.
    if prime >= 2**31:
        raise OracleError(f"Prime {prime} must be below 2**31")
    if not isprime(prime):
        raise OracleError(f"{prime} is not prime")


def _check_points(points: Sequence[Point], prime: int) -> tuple[Point, ...]:
    reduced = tuple((x % prime, y % prime) for x, y in points)
    if len(set(reduced)) != len(reduced):
        raise OracleError("Interpolation points must be distinct")
    return reduced


def build_matrix(s: AnySystem, points: Sequence[Point], prime: int) -> InterpolationMatrix:
    """Matrix of the conditions imposed by s at the given points.

    Rows are the partials of order (a, b), a + b < m_i, at point p_i; columns
    are the monomials of degree <= d. Points with multiplicity <= 0 add no rows.
    """
    vector = _vector(s)
    d = vector.d
    if len(points) != len(vector.mults):
        raise OracleError(f"Need {len(vector.mults)} points, got {len(points)}")
    _check_prime(prime)
    if prime <= max(d, 0):
        raise OracleError(f"Prime {prime} must exceed the degree {d}")
    reduced = _check_points(points, prime)

    if d < 0:
        return InterpolationMatrix(np.zeros((0, 0), dtype=np.int64), prime, reduced, d)

    exponents = np.array(monomials(d), dtype=np.int64).reshape(-1, 2)
    alpha, beta = exponents[:, 0], exponents[:, 1]
    falling = _falling_table(d, prime)

    rows: list[IntArray] = []
    for (x, y), mult in zip(reduced, vector.mults):
        if mult <= 0:
            continue
        x_powers, y_powers = _powers(x, d, prime), _powers(y, d, prime)
        for a in range(mult):
            for b in range(mult - a):
                live = (alpha >= a) & (beta >= b)
                ea = np.where(live, alpha - a, 0)
                eb = np.where(live, beta - b, 0)
                coefficient = falling[alpha, np.minimum(a, alpha)] * falling[
                    beta, np.minimum(b, beta)
                ] % prime
                value = coefficient * x_powers[ea] % prime * y_powers[eb] % prime
                rows.append(np.where(live, value, 0))

    if rows:
        entries = np.vstack(rows).astype(np.int64)
    else:
        entries = np.zeros((0, monomial_count(d)), dtype=np.int64)
    return InterpolationMatrix(entries, prime, reduced, d)


def rank(mat: InterpolationMatrix) -> int:
    """Rank over GF(prime) by Gaussian elimination with outer-product row updates."""
    p = mat.prime
    work = mat.entries.copy() % p
    n_rows, n_cols = work.shape
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nonzero = np.flatnonzero(work[r:, c])
        if nonzero.size == 0:
            continue
        pivot = r + int(nonzero[0])
        if pivot != r:
            work[[r, pivot]] = work[[pivot, r]]
        inverse = pow(int(work[r, c]), p - 2, p)
        work[r, c:] = work[r, c:] * inverse % p
        column = work[r + 1 :, c]
        targets = np.flatnonzero(column)
        if targets.size:
            below = r + 1 + targets
            update = column[targets][:, None] * work[r, c:][None, :] % p
            work[below, c:] = (work[below, c:] - update) % p
        r += 1
    return r


@dataclass(frozen=True)
class OracleResult:
    """Estimated dimension with the settings that produced it."""

    dimension: int
    trials: int
    prime: int
    unanimous: bool
    seed: int = 0
    ranks: tuple[int, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict[str, Any]:
        return {
            "dimension": self.dimension,
            "trials": self.trials,
            "prime": self.prime,
            "unanimous": self.unanimous,
            "seed": self.seed,
            "ranks": list(self.ranks),
        }


def sample_points(rng: np.random.Generator, count: int, prime: int) -> tuple[Point, ...]:
    """Draw count distinct uniform points of the affine plane over GF(prime)."""
    chosen: dict[Point, None] = {}
    while len(chosen) < count:
        for x, y in rng.integers(0, prime, size=(count - len(chosen), 2)):
            chosen.setdefault((int(x), int(y)), None)
    return tuple(chosen)


def dimension(
    s: AnySystem,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    prime: Optional[int] = None,
    *,
    config: FatpointsConfig | None = None,
) -> OracleResult:
    """Estimate the dimension of s as cols - 1 - max rank over independent trials."""
    config = config or FatpointsConfig()
    trials = config.trials if trials is None else trials
    seed = config.seed if seed is None else seed
    prime = config.prime if prime is None else prime
    if trials < 1:
        raise OracleError(f"trials must be at least 1, got {trials}")
    _check_prime(prime)

    vector = _vector(s)
    if vector.d < 0:
        return OracleResult(-1, trials, prime, True, seed, ())
    if vector.d > config.oracle_max_degree:
        raise OracleError(f"Degree {vector.d} exceeds oracle_max_degree")

    # Points without conditions do not change the rank.
    conditioned = MultVector(vector.d, vector.positive())
    rng = np.random.default_rng(seed)
    ranks: list[int] = []
    for _ in range(trials):
        points = sample_points(rng, len(conditioned.mults), prime)
        ranks.append(rank(build_matrix(conditioned, points, prime)))

    result = OracleResult(
        dimension=monomial_count(vector.d) - 1 - max(ranks),
        trials=trials,
        prime=prime,
        unanimous=len(set(ranks)) == 1,
        seed=seed,
        ranks=tuple(ranks),
    )
    if not result.unanimous:
        logger.warning(f"Oracle trials disagree on {s}: ranks {result.ranks}")
    logger.debug(f"Oracle {s}: dimension {result.dimension} (ranks {result.ranks})")
    return result


def replay(
    s: AnySystem = REGRESSION_SYSTEM,
    points: Sequence[Point] = REGRESSION_POINTS,
    prime: Optional[int] = None,
) -> int:
    """Dimension of s at fixed integer points, reduced mod prime."""
    prime = prime if prime is not None else FatpointsConfig().prime
    vector = _vector(s)
    if vector.d < 0:
        return -1
    mat = build_matrix(vector, points, prime)
    return monomial_count(vector.d) - 1 - rank(mat)


def cross_check_replay(
    s: AnySystem = REGRESSION_SYSTEM,
    points: Sequence[Point] = REGRESSION_POINTS,
    *,
    config: FatpointsConfig | None = None,
) -> bool:
    """Compare the fixed-point replay with random trials; disagreement is logged."""
    config = config or FatpointsConfig()
    fixed = replay(s, points, config.prime)
    measured = dimension(s, config=config).dimension
    if fixed != measured:
        logger.warning(f"Replay of {s} at fixed points gives {fixed}, random trials {measured}")
        return False
    return True


def _falling(n: int, k: int) -> int:
    value = 1
    for i in range(k):
        value *= n - i
    return value


def rational_rank(s: AnySystem, points: Sequence[Point]) -> int:
    """Exact rank of the interpolation matrix over the rationals (slow; for debugging)."""
    vector = _vector(s)
    if len(points) != len(vector.mults):
        raise OracleError(f"Need {len(vector.mults)} points, got {len(points)}")
    if len(set(points)) != len(points):
        raise OracleError("Interpolation points must be distinct")
    if vector.d < 0:
        return 0
    exponents = monomials(vector.d)
    rows: list[list[int]] = []
    for (x, y), mult in zip(points, vector.mults):
        for a in range(max(0, mult)):
            for b in range(mult - a):
                rows.append(
                    [
                        _falling(alpha, a) * _falling(beta, b) * x ** (alpha - a) * y ** (beta - b)
                        if alpha >= a and beta >= b
                        else 0
                        for alpha, beta in exponents
                    ]
                )
    if not rows:
        return 0
    return int(Matrix(rows).rank())
