"""Tests for Cremona transformations and reduction."""

import pytest

from fatpoints.core import LinearSystem, MultVector, Source
from fatpoints.cremona import (
    CremonaStep,
    ReductionStatus,
    cremona_step,
    dimension_via_cremona,
    evaluate,
    reduce,
    standard_form_dimension,
)
from fatpoints.exceptions import InvalidSystemError


def vector(d, m0, n, m):
    return MultVector.from_system(LinearSystem(d, m0, n, m))


class TestCremonaStep:
    """Tests for a single quadratic transformation."""

    def test_step(self):
        """Test the transformation on three of the 4-fold points."""
        step = cremona_step(vector(8, 1, 4, 4), 1, 2, 3)

        assert step.delta == -4
        assert step.after == MultVector(4, (1, 0, 0, 0, 4))
        assert step.clamped == ()
        assert not step.deep

    def test_step_keeps_negative_values(self):
        """Test that the raw step does not clamp."""
        step = cremona_step(MultVector(4, (1, 0, 0, 0, 4)), 4, 0, 1)

        assert step.after == MultVector(3, (0, -1, 0, 0, 3))

    def test_step_preserves_virtual_dimension(self):
        """Test that a transformation preserves the virtual dimension."""
        before = vector(22, 16, 14, 4)
        step = cremona_step(before, 0, 1, 2)

        assert step.after.virtual_dimension() == before.virtual_dimension()

    @pytest.mark.parametrize("indices", [(0, 0, 1), (0, 1, 9)])
    def test_bad_indices(self, indices):
        """Test that indices must be distinct and in range."""
        with pytest.raises(InvalidSystemError):
            cremona_step(vector(8, 1, 4, 4), *indices)

    def test_dict_round_trip(self):
        """Test the JSON form of a step."""
        step = cremona_step(vector(8, 1, 4, 4), 1, 2, 3)

        assert CremonaStep.from_dict(step.to_dict()) == step


class TestReduce:
    """Tests for the reduction loop."""

    def test_reduces_to_standard_form(self):
        """Test L(8,1,4,4), which reduces to a single triple point."""
        result = reduce(vector(8, 1, 4, 4))

        assert result.status is ReductionStatus.REDUCED_NONNEGATIVE
        assert len(result.steps) == 2
        assert result.steps[1].indices == (4, 0, 1)
        assert result.steps[1].clamped == ((1, -1),)
        assert result.final == MultVector(3, (0, 0, 0, 0, 3))
        assert result.dimension == 3
        assert not result.needs_oracle

    def test_detects_empty(self):
        """Test L(7,1,4,4), where a multiplicity overtakes the degree."""
        result = reduce(vector(7, 1, 4, 4))

        assert result.status is ReductionStatus.EMPTY_DETECTED
        assert result.dimension == -1
        assert result.steps[0].clamped == ((1, -1), (2, -1), (3, -1))
        assert not result.needs_oracle

    def test_empty_with_shallow_clamps(self):
        """Test L(10,3,6,4), which only ever clamps -1."""
        result = reduce(vector(10, 3, 6, 4))

        assert result.status is ReductionStatus.EMPTY_DETECTED
        assert len(result.steps) == 3
        assert not result.needs_oracle

    def test_open_endpoint(self):
        """Test L(22,16,14,4), which ends at fifteen double points."""
        result = reduce(vector(22, 16, 14, 4))

        assert len(result.steps) == 7
        assert all(step.clamped == () for step in result.steps)
        assert result.final.canonical() == MultVector(8, (2,) * 15)
        assert result.status is ReductionStatus.REDUCED_NONNEGATIVE
        assert result.dimension is None

    def test_deep_clamp(self):
        """Test L(9,0,6,4), whose second step produces -2 entries."""
        result = reduce(vector(9, 0, 6, 4))

        assert result.needs_oracle
        assert result.steps[1].deep
        assert result.steps[1].clamped == ((4, -2), (5, -2), (6, -2))
        assert result.status is ReductionStatus.EMPTY_DETECTED

    def test_pads_short_vectors(self):
        """Test that vectors with fewer than three points are padded."""
        result = reduce(MultVector(4, (2,)))

        assert result.final == MultVector(4, (2, 0, 0))
        assert result.dimension == 14 - 3

    def test_start_is_kept(self):
        """Test that the unclamped input is recorded."""
        start = MultVector(5, (-1, 2, 2))

        assert reduce(start).start == start


class TestStandardForm:
    """Tests for closed-form dimensions in standard form."""

    def test_no_points(self):
        """Test the full space of forms."""
        assert standard_form_dimension(MultVector(3, (0, 0, 0))) == 9

    def test_one_fat_point(self):
        """Test one fat point and simple points."""
        assert standard_form_dimension(MultVector(5, (3, 1, 1))) == 20 - 6 - 2

    def test_two_fat_points_stay_open(self):
        """Test that two multiplicities above one have no closed form."""
        assert standard_form_dimension(MultVector(8, (2, 2, 2))) is None


class TestEvaluate:
    """Tests for endpoint resolution."""

    def test_certified_closed_form(self, config):
        """Test a reduction that ends in a closed form."""
        outcome = evaluate(LinearSystem(8, 1, 4, 4), config)

        assert outcome.dimension == 3
        assert outcome.certified
        assert outcome.endpoint is None

    def test_resolver_closes_endpoint(self, config):
        """Test that the resolver is asked about endpoints the lists cannot close."""
        asked = []

        def resolver(endpoint):
            asked.append(endpoint)
            return 4, True

        outcome = evaluate(LinearSystem(13, 5, 9, 4), config, resolver, use_oracle=False)

        assert asked == [LinearSystem(13, 5, 9, 4)]
        assert outcome.dimension == 4
        assert outcome.certified
        assert outcome.endpoint_rule == "resolver"

    def test_unresolved_without_oracle(self, config):
        """Test that an open endpoint stays open without the oracle."""
        outcome = evaluate(LinearSystem(13, 5, 9, 4), config, use_oracle=False)

        assert outcome.dimension is None
        assert not outcome.certified
        assert outcome.endpoint == LinearSystem(13, 5, 9, 4)

    @pytest.mark.parametrize(
        ("system", "endpoint"),
        [
            (LinearSystem(22, 16, 14, 4), LinearSystem(8, 0, 15, 2)),
            (LinearSystem(16, 10, 10, 4), LinearSystem(6, 0, 10, 2)),
        ],
    )
    def test_double_point_endpoint(self, config, system, endpoint):
        """Test reductions that end in general double points."""
        outcome = evaluate(system, config, use_oracle=False)

        assert outcome.endpoint == endpoint
        assert outcome.dimension == -1
        assert outcome.certified

    def test_deep_clamp_policy_exceptional(self, config):
        """Test that the exceptional policy trusts deep clamps."""
        trusting = config.model_copy(update={"negative_clamp": "exceptional"})

        outcome = evaluate(LinearSystem(9, 0, 6, 4), trusting, use_oracle=False)

        assert outcome.dimension == -1
        assert outcome.certified

    def test_deep_clamp_policy_oracle(self, config):
        """Test that the default policy withholds certification and asks the oracle."""
        outcome = evaluate(LinearSystem(9, 0, 6, 4), config)

        assert outcome.dimension == -1
        assert not outcome.certified
        assert outcome.confirmed_by_oracle is True

    def test_dimension_via_cremona(self, config):
        """Test the report form."""
        result = dimension_via_cremona(LinearSystem(8, 1, 4, 4), config)

        assert result.actual == 3
        assert result.source is Source.CREMONA
        assert result.certified
        assert "2 steps" in result.detail


class TestReductionEndpoints:
    """Reductions whose dimension is quoted in the literature."""

    @pytest.mark.parametrize(
        ("system", "dimension"),
        [
            (LinearSystem(30, 27, 12, 4), 0),
            (LinearSystem(33, 29, 16, 4), 2),
            (LinearSystem(10, 3, 6, 4), -1),
            (LinearSystem(9, 3, 5, 4), -1),
            (LinearSystem(9, 0, 6, 4), -1),
            (LinearSystem(8, 1, 5, 4), -1),
            (LinearSystem(7, 0, 4, 4), -1),
            (LinearSystem(6, 0, 4, 4), -1),
        ],
    )
    def test_exceptional_policy(self, system, dimension, config):
        """Test the dimension read off the reduction when deep clamps are trusted."""
        trusting = config.model_copy(update={"negative_clamp": "exceptional"})

        outcome = evaluate(system, trusting, use_oracle=False)

        assert outcome.dimension == dimension
        assert outcome.certified

    def test_deep_clamps_flagged(self):
        """Test that the larger reductions pass through deep clamps."""
        assert reduce(vector(30, 27, 12, 4)).needs_oracle
        assert reduce(vector(33, 29, 16, 4)).needs_oracle
        assert reduce(vector(9, 3, 5, 4)).needs_oracle

    @pytest.mark.slow
    @pytest.mark.parametrize(
        ("system", "dimension"),
        [(LinearSystem(30, 27, 12, 4), 0), (LinearSystem(33, 29, 16, 4), 2)],
    )
    def test_oracle_confirms(self, system, dimension, config):
        """Test that the oracle agrees with the reduction."""
        outcome = evaluate(system, config)

        assert outcome.dimension == dimension
        assert outcome.confirmed_by_oracle is True
        assert not outcome.certified
