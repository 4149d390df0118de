"""Tests for proof traces and the trace checker."""

import json
from dataclasses import replace

import pytest

from fatpoints.core import LinearSystem, expected_dimension
from fatpoints.degeneration import degenerate
from fatpoints.exceptions import TraceError
from fatpoints.trace import (
    ProofStep,
    ProofTrace,
    StepRule,
    check_trace,
    trace_filename,
)

ROOT = LinearSystem(12, 1, 9, 4)


@pytest.fixture
def trace(prover):
    """The emptiness proof of L(12,1,9,4)."""
    return prover.prove(ROOT, hints=[(4, 5)])


def tampered(trace, system, **changes):
    steps = dict(trace.steps)
    steps[system] = replace(steps[system], **changes)
    return ProofTrace(trace.root, steps, dict(trace.provenance))


class TestProofTrace:
    """Tests for the trace document."""

    def test_json_round_trip(self, trace):
        """Test that a trace survives serialization."""
        restored = ProofTrace.from_json(trace.to_json())

        assert restored.root == trace.root
        assert list(restored.steps) == list(trace.steps)
        assert restored.claim == trace.claim
        assert restored.claim.node == trace.claim.node
        assert restored.provenance == trace.provenance

    def test_document_layout(self, trace):
        """Test the top-level keys and the node table."""
        data = json.loads(trace.to_json())

        assert data["format"] == 1
        assert data["root"] == [12, 1, 9, 4]
        assert data["tool"] == "fatpoints 0.1.0"
        root_step = data["steps"][-1]
        assert root_step["rule"] == "lemma_empty"
        assert root_step["node"]["LF_hat"] == [12, 9, 5, 4]
        assert root_step["node"]["LP_hat"] == [7, 1, 4, 4]

    def test_write_and_read(self, trace, tmp_path):
        """Test writing a trace under its canonical file name."""
        path = trace.write(tmp_path / trace_filename(trace.root))

        assert path.name == "L_12_1_9_4.json"
        assert ProofTrace.read(path).claim == trace.claim

    def test_rule_counts(self, trace):
        """Test the per-rule tally."""
        counts = trace.rule_counts()

        assert counts["lemma_empty"] == 1
        assert counts["cremona"] == 2
        assert counts["large_m0"] == 2

    def test_missing_file(self, tmp_path):
        """Test reading a trace that does not exist."""
        with pytest.raises(TraceError):
            ProofTrace.read(tmp_path / "missing.json")

    @pytest.mark.parametrize(
        "raw",
        [
            "not json",
            "[1, 2]",
            json.dumps({"format": 2, "root": [1, 0, 0, 0], "steps": []}),
            json.dumps({"format": 1, "root": [1, 0, 0], "steps": []}),
        ],
    )
    def test_malformed(self, raw):
        """Test documents the reader refuses."""
        with pytest.raises(TraceError):
            ProofTrace.from_json(raw)

    def test_claim_without_root_step(self):
        """Test a trace that lacks its root."""
        with pytest.raises(TraceError):
            ProofTrace(ROOT, {}).claim


class TestCheckTrace:
    """Tests for independent trace checking."""

    def test_valid_trace(self, trace, config):
        """Test that a fresh proof checks."""
        result = check_trace(trace, config)

        assert result
        assert result.checked == len(trace.steps)

    def test_round_tripped_trace(self, trace, config):
        """Test that checking works on a trace read back from JSON."""
        assert check_trace(ProofTrace.from_json(trace.to_json()), config)

    def test_wrong_root_dimension(self, trace, config):
        """Test a root claim its rule does not give."""
        result = check_trace(tampered(trace, ROOT, dimension=0), config)

        assert not result
        assert result.location == ROOT

    def test_wrong_child_dimension(self, trace, config):
        """Test that the first bad step is reported, children first."""
        child = LinearSystem(8, 1, 4, 4)

        result = check_trace(tampered(trace, child, dimension=4), config)

        assert not result
        assert result.location == child

    def test_missing_child(self, trace, config):
        """Test a step whose child has no entry."""
        steps = dict(trace.steps)
        del steps[LinearSystem(7, 1, 4, 4)]

        result = check_trace(ProofTrace(ROOT, steps, trace.provenance), config)

        assert not result
        assert result.location == ROOT
        assert "missing step" in result.failure

    def test_wrong_rule(self, trace, config):
        """Test a degeneration step labelled with the wrong limit formula case."""
        result = check_trace(tampered(trace, ROOT, rule=StepRule.THEOREM_B), config)

        assert not result
        assert "theorem_a" in result.failure

    def test_uncertified_child(self, trace, config):
        """Test that a certified step may not rest on an uncertified one."""
        result = check_trace(
            tampered(trace, LinearSystem(8, 1, 4, 4), certified=False, rule=StepRule.ORACLE),
            config,
        )

        assert not result
        assert result.location == ROOT

    def test_missing_root(self, trace, config):
        """Test a trace without its root step."""
        steps = dict(trace.steps)
        del steps[ROOT]

        assert not check_trace(ProofTrace(ROOT, steps), config)

    def test_oracle_leaf(self, config):
        """Test that oracle leaves are re-measured with another seed."""
        s = LinearSystem(8, 1, 4, 4)
        leaf = ProofStep(s, 3, StepRule.ORACLE, certified=False)

        assert check_trace(ProofTrace(s, {s: leaf}), config)
        assert not check_trace(ProofTrace(s, {s: replace(leaf, dimension=4)}), config)

    def test_certified_oracle_leaf(self, config):
        """Test that an oracle leaf may not claim certification."""
        s = LinearSystem(8, 1, 4, 4)
        leaf = ProofStep(s, 3, StepRule.ORACLE)

        assert not check_trace(ProofTrace(s, {s: leaf}), config)

    def test_formula_step(self, config):
        """Test the formula rule on a system it does not apply to."""
        s = LinearSystem(8, 1, 4, 4)
        single = s.with_n(0)
        step = ProofStep(single, 43, StepRule.FORMULA)

        assert check_trace(ProofTrace(single, {single: step}), config)
        assert not check_trace(ProofTrace(s, {s: ProofStep(s, 3, StepRule.FORMULA)}), config)

    def test_list_step(self, config):
        """Test the list rule on a listed and an unlisted system."""
        listed = LinearSystem(8, 0, 5, 4)
        unlisted = LinearSystem(8, 1, 4, 4)

        good = ProofStep(listed, 0, StepRule.CLASSIFIER_LIST)
        bad = ProofStep(unlisted, 3, StepRule.CLASSIFIER_LIST)

        assert check_trace(ProofTrace(listed, {listed: good}), config)
        assert not check_trace(ProofTrace(unlisted, {unlisted: bad}), config)

    def test_monotone_step(self, prover, config):
        """Test a monotone proof and a monotone step with a non-critical child."""
        trace = prover.prove(LinearSystem(7, 1, 5, 4))
        assert check_trace(trace, config)

        far = LinearSystem(7, 1, 6, 4)
        steps = dict(trace.steps)
        steps[far] = ProofStep(far, -1, StepRule.MONOTONE, children=(LinearSystem(7, 1, 5, 4),))

        assert not check_trace(ProofTrace(far, steps), config)


class TestProofGraph:
    """Tests that the checker only accepts well-founded proofs."""

    LISTED = LinearSystem(9, 2, 5, 4)

    def test_self_referencing_step(self, prover, config):
        """Test a non-speciality claim that uses its own system as a child."""
        s = self.LISTED
        node = degenerate(s, 7, 5)
        assert s in node.children
        steps = {}
        for child in node.children:
            if child != s:
                steps.update(prover.prove(child).steps)
        steps[s] = ProofStep(
            s,
            expected_dimension(s),
            StepRule.LEMMA_EXPECTED,
            children=node.children,
            node=node,
        )

        result = check_trace(ProofTrace(s, steps), config)

        assert result.ok is False
        assert result.location == s

    def test_child_after_parent(self, trace, config):
        """Test a table where a child is listed after the step that uses it."""
        child = LinearSystem(8, 1, 4, 4)
        steps = {key: step for key, step in trace.steps.items() if key != child}
        steps[child] = trace.steps[child]

        result = check_trace(ProofTrace(ROOT, steps, trace.provenance), config)

        assert not result
        assert result.location == ROOT
        assert "before its parent" in result.failure

    def test_two_step_cycle(self, config):
        """Test two monotone steps that justify each other."""
        low, high = LinearSystem(7, 1, 4, 4), LinearSystem(7, 1, 5, 4)
        steps = {
            low: ProofStep(low, -1, StepRule.MONOTONE, children=(high,)),
            high: ProofStep(high, -1, StepRule.MONOTONE, children=(low,)),
        }

        assert not check_trace(ProofTrace(high, steps), config)

    def test_degeneration_of_listed_system(self, prover, config):
        """Test that a degeneration step may not close a (-1) special system."""
        s = self.LISTED
        node = degenerate(s, 3, 2)
        steps = {}
        for child in node.children:
            steps.update(prover.prove(child).steps)
        steps[s] = ProofStep(
            s,
            expected_dimension(s),
            StepRule.LEMMA_EXPECTED,
            children=node.children,
            node=node,
        )

        result = check_trace(ProofTrace(s, steps), config)

        assert not result
        assert result.location == s
        assert "(-1) special" in result.failure
