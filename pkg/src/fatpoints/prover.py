"""Recursive, memoized search for dimension certificates."""

from __future__ import annotations

import logging
from types import MappingProxyType
from typing import Iterable, Mapping, Optional

from . import oracle
from .classifier import classify_dimension, large_m0_dimension, minus_one_list_m4
from .config import FatpointsConfig
from .core import LinearSystem, critical_counts, expected_dimension, virtual_dimension
from .cremona import evaluate
from .degeneration import b_order, k_order, try_empty, try_expected, try_theorem
from .exceptions import DegenerationError
from .trace import ProofStep, ProofTrace, StepRule

logger = logging.getLogger(__name__)

Hint = tuple[int, int]


class Prover:
    """
    Proves dimensions of L(d, m0, n, 4) and records the steps.

    Each system is closed by the first rule that applies: formula, large-m0
    lemmas, the m=4 list, monotonicity in n, Cremona reduction, a (k,b)
    degeneration, and finally an uncertified oracle leaf. Results are
    memoized per process and shared by every root proven with this instance.

    Example:
        prover = Prover(FatpointsConfig(seed=1))
        trace = prover.prove(LinearSystem(12, 1, 9, 4), hints=[(4, 5)])
        assert trace.dimension == -1
    """

    def __init__(self, config: FatpointsConfig | None = None) -> None:
        self._config = config or FatpointsConfig()
        self._memo: dict[LinearSystem, ProofStep] = {}
        self._in_progress: set[LinearSystem] = set()

    @property
    def config(self) -> FatpointsConfig:
        return self._config

    @property
    def memo(self) -> Mapping[LinearSystem, ProofStep]:
        return MappingProxyType(self._memo)

    def prove(self, s: LinearSystem, hints: Iterable[Hint] = ()) -> ProofTrace:
        """Prove the dimension of s; hints are (k, b) pairs tried before the search."""
        if s not in self._memo:
            self._prove_step(s, tuple(hints))
        return self.trace(s)

    def claim(self, s: LinearSystem) -> Optional[ProofStep]:
        """Dimension provider for child systems; None on a cycle."""
        if s in self._memo:
            return self._memo[s]
        if s in self._in_progress:
            logger.debug(f"Cycle through {s}")
            return None
        return self._prove_step(s, ())

    def trace(self, root: LinearSystem) -> ProofTrace:
        """Collect the memoized steps below root, children first."""
        ordered: dict[LinearSystem, ProofStep] = {}
        stack: list[tuple[LinearSystem, bool]] = [(root, False)]
        while stack:
            system, expanded = stack.pop()
            if system in ordered:
                continue
            step = self._memo[system]
            if expanded:
                ordered[system] = step
                continue
            stack.append((system, True))
            for child in reversed(step.children):
                if child not in ordered:
                    stack.append((child, False))
        return ProofTrace(root=root, steps=ordered, provenance=self._config.provenance())

    # -- search -----------------------------------------------------------

    def _prove_step(self, s: LinearSystem, hints: tuple[Hint, ...]) -> ProofStep:
        self._in_progress.add(s)
        try:
            step = self._search(s, hints) or self._oracle_leaf(s)
        finally:
            self._in_progress.discard(s)
        self._memo[s] = step
        suffix = "" if step.certified else " (uncertified)"
        logger.info(f"{s}: dimension {step.dimension} by {step.rule.value}{suffix}")
        return step

    def _search(self, s: LinearSystem, hints: tuple[Hint, ...]) -> Optional[ProofStep]:
        step = self._formula(s)
        if step is not None:
            return step
        if s.m != 4:
            return self._classifier(s) or self._cremona(s)
        if s.m0 >= s.d - 5:
            closed = large_m0_dimension(s)
            assert closed.actual is not None
            return ProofStep(
                s, closed.actual, StepRule.LARGE_M0, payload={"detail": closed.detail}
            )
        verdict = minus_one_list_m4(s)
        if verdict.special and verdict.witness is not None:
            return ProofStep(
                s,
                verdict.witness.dimension(s),
                StepRule.CLASSIFIER_LIST,
                payload={"row": verdict.rule, "witness": verdict.witness.to_dict()},
            )
        return self._monotone(s) or self._cremona(s) or self._degenerate(s, hints)

    def _formula(self, s: LinearSystem) -> Optional[ProofStep]:
        if s.m0 > s.d:
            return ProofStep(s, -1, StepRule.FORMULA, payload={"detail": "m0 > d"})
        if s.n == 0 or s.m == 0:
            return ProofStep(
                s, expected_dimension(s), StepRule.FORMULA, payload={"detail": "single fat point"}
            )
        return None

    def _classifier(self, s: LinearSystem) -> Optional[ProofStep]:
        known = classify_dimension(s)
        if known is None or known.actual is None:
            return None
        return ProofStep(s, known.actual, StepRule.CLASSIFIER_LIST, payload={"row": known.detail})

    def _monotone(self, s: LinearSystem) -> Optional[ProofStep]:
        negative, top = critical_counts(s.d, s.m0, s.m)
        v = virtual_dimension(s)
        if v <= -1 and negative < s.n:
            critical = s.with_n(negative)
        elif v >= -1 and top > s.n:
            critical = s.with_n(top)
        else:
            return None
        if minus_one_list_m4(critical).special:
            return None
        claim = self.claim(critical)
        if claim is None or not claim.certified:
            return None
        if v <= -1 and claim.dimension == -1:
            dimension = -1
        elif v >= -1 and claim.dimension == expected_dimension(critical):
            dimension = v
        else:
            return None
        return ProofStep(
            s,
            dimension,
            StepRule.MONOTONE,
            children=(critical,),
            payload={"critical_n": critical.n},
        )

    def _resolve_endpoint(self, endpoint: LinearSystem) -> Optional[tuple[int, bool]]:
        if endpoint.m != 4:
            return None
        claim = self.claim(endpoint)
        if claim is None or not claim.certified:
            return None
        return claim.dimension, True

    def _cremona(self, s: LinearSystem) -> Optional[ProofStep]:
        outcome = evaluate(s, self._config, self._resolve_endpoint, use_oracle=False)
        if not outcome.reduction.steps or outcome.dimension is None or not outcome.certified:
            return None
        children: tuple[LinearSystem, ...] = ()
        if outcome.endpoint_rule == "resolver" and outcome.endpoint is not None:
            children = (outcome.endpoint,)
        return ProofStep(
            s,
            outcome.dimension,
            StepRule.CREMONA,
            children=children,
            payload={
                "final": outcome.reduction.final.to_dict(),
                "endpoint": list(outcome.endpoint.key) if outcome.endpoint is not None else None,
                "steps": len(outcome.reduction.steps),
                "endpoint_rule": outcome.endpoint_rule,
            },
        )

    def _candidates(self, s: LinearSystem, hints: tuple[Hint, ...]) -> list[Hint]:
        seen: dict[Hint, None] = {}
        for k, b in hints:
            if 0 < k < s.d and 0 <= b <= s.n:
                seen.setdefault((k, b), None)
            else:
                logger.warning(f"Ignoring hint ({k},{b}) for {s}")
        for k in k_order(s.d):
            for b in b_order(s):
                seen.setdefault((k, b), None)
        return list(seen)

    def _degenerate(self, s: LinearSystem, hints: tuple[Hint, ...]) -> Optional[ProofStep]:
        v = virtual_dimension(s)
        for k, b in self._candidates(s, hints):
            logger.debug(f"Trying ({k},{b}) on {s}")
            try:
                outcome = None
                if v <= -1:
                    outcome = try_empty(s, k, b, self.claim, require_certified=True)
                if outcome is None and v >= -1:
                    outcome = try_expected(s, k, b, self.claim, require_certified=True)
                if outcome is None:
                    outcome = try_theorem(s, k, b, self.claim, require_certified=True)
            except DegenerationError as e:
                logger.debug(f"({k},{b}) on {s} rejected: {e}")
                continue
            if outcome is not None:
                return ProofStep.from_outcome(outcome)
        return None

    def _oracle_leaf(self, s: LinearSystem) -> ProofStep:
        result = oracle.dimension(s, config=self._config)
        logger.warning(f"{s} closed by the oracle only: dimension {result.dimension}")
        return ProofStep(
            s,
            result.dimension,
            StepRule.ORACLE,
            certified=False,
            payload={"oracle": result.to_dict()},
        )
