"""Proof traces: the certificate document and its independent checker."""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterator, Optional

from . import cremona, oracle
from .classifier import (
    Witness,
    classify_dimension,
    large_m0_dimension,
    minus_one_list_m4,
    verify_minus_one_witness,
)
from .config import FatpointsConfig
from .core import LinearSystem, critical_counts, expected_dimension, virtual_dimension
from .degeneration import (
    DegenerationNode,
    NodeOutcome,
    Rule,
    check_identities,
    degenerate,
    dim_l0,
    l0_case,
    try_empty,
    try_expected,
    try_theorem,
)
from .exceptions import DegenerationError, FatpointsError, OracleError, TraceError

logger = logging.getLogger(__name__)

TRACE_FORMAT = 1


class StepRule(str, Enum):
    """How a step in a trace was closed."""

    FORMULA = "formula"
    CLASSIFIER_LIST = "classifier_list"
    LARGE_M0 = "large_m0"
    CREMONA = "cremona"
    ORACLE = "oracle"
    MONOTONE = "monotone"
    LEMMA_EMPTY = "lemma_empty"
    LEMMA_EXPECTED = "lemma_expected"
    THEOREM_A = "theorem_a"
    THEOREM_B = "theorem_b"

    @classmethod
    def from_node_rule(cls, rule: Rule) -> "StepRule":
        return cls(rule.value)


_NODE_RULES = {
    StepRule.LEMMA_EMPTY,
    StepRule.LEMMA_EXPECTED,
    StepRule.THEOREM_A,
    StepRule.THEOREM_B,
}


@dataclass(frozen=True)
class ProofStep:
    """The claim for one system and the rule that closed it."""

    system: LinearSystem
    dimension: int
    rule: StepRule
    certified: bool = True
    children: tuple[LinearSystem, ...] = ()
    node: Optional[DegenerationNode] = None
    payload: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def from_outcome(cls, outcome: NodeOutcome) -> "ProofStep":
        node = outcome.node
        if node.rule is None:
            raise TraceError(f"Node for {node.parent} carries no rule")
        return cls(
            system=node.parent,
            dimension=outcome.dimension,
            rule=StepRule.from_node_rule(node.rule),
            certified=outcome.certified,
            children=node.children,
            node=node,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "system": list(self.system.key),
            "dimension": self.dimension,
            "rule": self.rule.value,
            "certified": self.certified,
            "children": [list(child.key) for child in self.children],
            "node": self.node.to_dict() if self.node is not None else None,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ProofStep":
        system = LinearSystem.from_key(data["system"])
        node = data.get("node")
        return cls(
            system=system,
            dimension=int(data["dimension"]),
            rule=StepRule(data["rule"]),
            certified=bool(data["certified"]),
            children=tuple(LinearSystem.from_key(child) for child in data.get("children", [])),
            node=DegenerationNode.from_dict(system, node) if node is not None else None,
            payload=dict(data.get("payload") or {}),
        )


@dataclass
class ProofTrace:
    """A root claim and the table of every step it depends on.

    Steps are stored children first, so a reader can check them in order.
    """

    root: LinearSystem
    steps: dict[LinearSystem, ProofStep]
    provenance: dict[str, Any] = field(default_factory=dict)

    @property
    def claim(self) -> ProofStep:
        try:
            return self.steps[self.root]
        except KeyError as e:
            raise TraceError(f"Trace has no step for its root {self.root}") from e

    @property
    def dimension(self) -> int:
        return self.claim.dimension

    @property
    def certified(self) -> bool:
        return self.claim.certified

    def __iter__(self) -> Iterator[ProofStep]:
        return iter(self.steps.values())

    def uncertified_leaves(self) -> list[LinearSystem]:
        """Steps that are uncertified on their own, not through a child."""
        leaves = []
        for step in self.steps.values():
            if step.certified:
                continue
            if all(self.steps[child].certified for child in step.children if child in self.steps):
                leaves.append(step.system)
        return leaves

    def rule_counts(self) -> Counter[str]:
        return Counter(step.rule.value for step in self.steps.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": TRACE_FORMAT,
            "tool": self.provenance.get("tool", "fatpoints"),
            "provenance": self.provenance,
            "root": list(self.root.key),
            "steps": [step.to_dict() for step in self.steps.values()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ProofTrace":
        if data.get("format") != TRACE_FORMAT:
            raise TraceError(f"Unsupported trace format {data.get('format')!r}")
        try:
            steps = [ProofStep.from_dict(item) for item in data["steps"]]
            root = LinearSystem.from_key(data["root"])
        except (KeyError, TypeError, ValueError, FatpointsError) as e:
            raise TraceError(f"Malformed trace: {e}") from e
        return cls(
            root=root,
            steps={step.system: step for step in steps},
            provenance=dict(data.get("provenance") or {}),
        )

    @classmethod
    def from_json(cls, raw: str) -> "ProofTrace":
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as e:
            raise TraceError(f"Trace is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise TraceError("Trace document must be a JSON object")
        return cls.from_dict(data)

    def write(self, path: Path) -> Path:
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path

    @classmethod
    def read(cls, path: Path) -> "ProofTrace":
        try:
            raw = path.read_text(encoding="utf-8")
        except OSError as e:
            raise TraceError(f"Cannot read trace {path}: {e}") from e
        return cls.from_json(raw)


def trace_filename(s: LinearSystem) -> str:
    return "L_{}_{}_{}_{}.json".format(*s.key)


@dataclass(frozen=True)
class TraceCheck:
    """Result of checking a trace; falsy on failure, with the first failing system."""

    ok: bool
    failure: str = ""
    location: Optional[LinearSystem] = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.ok


class _Failure(Exception):
    pass


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise _Failure(message)


def _check_formula(step: ProofStep) -> None:
    s = step.system
    if s.m0 > s.d:
        _expect(step.dimension == -1, "m0 > d must be empty")
        return
    _expect(s.n == 0 or s.m == 0, "formula rule needs m0 > d, n = 0 or m = 0")
    _expect(step.dimension == expected_dimension(s), "formula dimension mismatch")


def _check_list(step: ProofStep) -> None:
    s = step.system
    if s.m == 4:
        verdict = minus_one_list_m4(s)
        _expect(verdict.special, f"{s} is not on the m=4 list")
        witness = verdict.witness
        if "witness" in step.payload:
            witness = Witness.from_dict(step.payload["witness"])
        if witness is None or not verify_minus_one_witness(s, witness):
            raise _Failure("witness fails")
        _expect(step.dimension == witness.dimension(s), "list dimension mismatch")
        return
    known = classify_dimension(s)
    _expect(known is not None and known.actual == step.dimension, "classifier disagrees")


def _check_large_m0(step: ProofStep) -> None:
    _expect(
        large_m0_dimension(step.system).actual == step.dimension, "large-m0 lemma disagrees"
    )


def _check_oracle(step: ProofStep, config: FatpointsConfig) -> None:
    _expect(not step.certified, "oracle leaves cannot be certified")
    fresh = config.model_copy(update={"seed": config.seed + 1})
    try:
        measured = oracle.dimension(step.system, config=fresh).dimension
    except OracleError as e:
        raise _Failure(f"oracle re-run failed: {e}") from e
    _expect(measured == step.dimension, f"oracle re-run gives {measured}")


def _check_cremona(
    step: ProofStep, steps: dict[LinearSystem, ProofStep], config: FatpointsConfig
) -> None:
    def resolver(endpoint: LinearSystem) -> tuple[int, bool] | None:
        claim = steps.get(endpoint)
        if claim is None or endpoint not in step.children:
            return None
        return claim.dimension, claim.certified

    fresh = config.model_copy(update={"seed": config.seed + 1})
    outcome = cremona.evaluate(step.system, fresh, resolver, use_oracle=not step.certified)
    _expect(outcome.dimension == step.dimension, f"Cremona re-run gives {outcome.dimension}")
    _expect(outcome.certified or not step.certified, "Cremona re-run is not certified")


def _check_monotone(step: ProofStep, steps: dict[LinearSystem, ProofStep]) -> None:
    s = step.system
    _expect(len(step.children) == 1, "monotone step needs one child")
    critical = step.children[0]
    _expect(
        (critical.d, critical.m0, critical.m) == (s.d, s.m0, s.m), "child differs beyond n"
    )
    child = steps[critical]
    _expect(critical.n != s.n, "child is the system itself")
    if critical.n < s.n:
        _expect(virtual_dimension(s) <= -1, "fewer points only prove emptiness")
        _expect(child.dimension == -1, "critical system is not empty")
        _expect(step.dimension == -1, "monotone emptiness must claim -1")
    else:
        _expect(virtual_dimension(s) >= -1, "more points only prove non-speciality")
        _expect(
            virtual_dimension(critical) >= -1
            and child.dimension == expected_dimension(critical),
            "critical system is not non-special",
        )
        _expect(step.dimension == expected_dimension(s), "monotone dimension mismatch")
    negative, top = critical_counts(s.d, s.m0, s.m)
    _expect(critical.n in (negative, top), "child is not a critical system")


def _check_node(step: ProofStep, steps: dict[LinearSystem, ProofStep]) -> None:
    node = step.node
    if node is None:
        raise _Failure("degeneration step without node")
    _expect(
        step.system.m != 4 or not minus_one_list_m4(step.system).special,
        f"{step.system} is (-1) special; degenerations cannot close it",
    )
    try:
        fresh = degenerate(step.system, node.k, node.b)
    except DegenerationError as e:
        raise _Failure(str(e)) from e
    _expect(fresh.children == node.children, "restricted systems do not match the table")
    _expect(check_identities(node), "virtual-dimension identities fail")
    _expect(step.children == node.children, "children do not match the node")

    def provider(child: LinearSystem) -> ProofStep | None:
        return steps.get(child)

    k, b = node.k, node.b
    outcome: NodeOutcome | None
    if step.rule is StepRule.LEMMA_EMPTY:
        outcome = try_empty(step.system, k, b, provider)
    elif step.rule is StepRule.LEMMA_EXPECTED:
        outcome = try_expected(step.system, k, b, provider)
    else:
        outcome = try_theorem(step.system, k, b, provider)
        if outcome is not None:
            order = (node.lp, node.lf, node.lp_hat, node.lf_hat)
            l_p, l_f, l_p_hat, l_f_hat = (steps[child].dimension for child in order)
            l0 = dim_l0(node, l_p, l_f, l_p_hat, l_f_hat)
            case = l0_case(node, l_p, l_f, l_p_hat, l_f_hat)
            _expect(case.value == step.rule.value, f"limit formula case is {case.value}")
            _expect(l0 == step.dimension, f"limit dimension is {l0}")
    if outcome is None:
        raise _Failure(f"hypotheses of {step.rule.value} do not hold")
    _expect(outcome.dimension == step.dimension, f"rule gives {outcome.dimension}")


def _check_order(
    step: ProofStep, steps: dict[LinearSystem, ProofStep], done: set[LinearSystem]
) -> None:
    # Children must be checked before their parent, which rules out cycles.
    for child in step.children:
        _expect(child != step.system, "step lists its own system as a child")
        _expect(child in steps, f"missing step for child {child}")
        _expect(child in done, f"child {child} is not proven before its parent")


def _check_step(
    step: ProofStep, steps: dict[LinearSystem, ProofStep], config: FatpointsConfig
) -> None:
    if step.certified:
        _expect(
            all(steps[child].certified for child in step.children),
            "certified step depends on an uncertified child",
        )
    rule = step.rule
    if rule is StepRule.FORMULA:
        _check_formula(step)
    elif rule is StepRule.CLASSIFIER_LIST:
        _check_list(step)
    elif rule is StepRule.LARGE_M0:
        _check_large_m0(step)
    elif rule is StepRule.ORACLE:
        _check_oracle(step, config)
    elif rule is StepRule.CREMONA:
        _check_cremona(step, steps, config)
    elif rule is StepRule.MONOTONE:
        _check_monotone(step, steps)
    elif rule in _NODE_RULES:
        _check_node(step, steps)
    else:  # pragma: no cover
        raise _Failure(f"unknown rule {rule}")


def check_trace(trace: ProofTrace, config: FatpointsConfig | None = None) -> TraceCheck:
    """Re-verify every step of a trace without repeating the search.

    Classifier steps are looked up again, Cremona steps re-run, degeneration
    steps have their hypotheses re-checked against the recorded child claims,
    and oracle leaves are re-measured with a different seed. Every child must
    be listed before the step that uses it.
    """
    config = config or FatpointsConfig()
    recorded = trace.provenance.get("negative_clamp")
    if recorded in ("oracle", "exceptional") and recorded != config.negative_clamp:
        config = config.model_copy(update={"negative_clamp": recorded})
    if trace.root not in trace.steps:
        return TraceCheck(False, "trace has no root step", trace.root)
    checked = 0
    done: set[LinearSystem] = set()
    for step in trace.steps.values():
        try:
            _check_order(step, trace.steps, done)
            _check_step(step, trace.steps, config)
        except (_Failure, FatpointsError) as e:
            logger.error(f"Trace check failed at {step.system}: {e}")
            return TraceCheck(False, str(e), step.system, checked)
        done.add(step.system)
        checked += 1
    return TraceCheck(True, checked=checked)
