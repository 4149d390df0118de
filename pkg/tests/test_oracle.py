"""Tests for the interpolation-matrix rank oracle."""

import numpy as np
import pytest

from fatpoints import oracle
from fatpoints.classifier import minus_one_list_m4
from fatpoints.config import FatpointsConfig
from fatpoints.core import LinearSystem, MultVector, expected_dimension
from fatpoints.cremona import compare_endpoint, cremona_step
from fatpoints.exceptions import OracleError
from fatpoints.oracle import InterpolationMatrix, build_matrix, monomials, rank, rational_rank

CONIC_POINTS = ((0, 0), (1, 0), (0, 1), (1, 1), (2, 3))


class TestBuildMatrix:
    """Tests for the interpolation matrix."""

    def test_shape(self, config):
        """Test one row per derivative condition and one column per monomial."""
        mat = build_matrix(LinearSystem(2, 0, 5, 1), [(9, 9)] + list(CONIC_POINTS), config.prime)

        assert (mat.rows, mat.cols) == (5, 6)
        assert mat.degree == 2

    def test_value_rows(self):
        """Test that multiplicity one evaluates the monomials."""
        mat = build_matrix(MultVector(2, (1,)), [(2, 3)], 101)

        expected = [2**a * 3**b for a, b in monomials(2)]
        assert mat.entries[0].tolist() == expected

    def test_derivative_rows(self):
        """Test the first partials at a double point."""
        mat = build_matrix(MultVector(1, (2,)), [(5, 7)], 101)

        # Columns 1, x, y; rows f, f_y, f_x in (a, b) order.
        assert mat.entries.tolist() == [[1, 5, 7], [0, 0, 1], [0, 1, 0]]

    def test_zero_multiplicity_adds_nothing(self):
        """Test that points without conditions contribute no rows."""
        mat = build_matrix(MultVector(3, (0, 1)), [(1, 2), (3, 4)], 101)

        assert mat.rows == 1

    def test_point_count(self, config):
        """Test that each multiplicity needs a point."""
        with pytest.raises(OracleError):
            build_matrix(LinearSystem(2, 0, 5, 1), CONIC_POINTS, config.prime)

    def test_duplicate_points(self):
        """Test that points must be distinct modulo the prime."""
        with pytest.raises(OracleError):
            build_matrix(MultVector(2, (1, 1)), [(1, 2), (102, 2)], 101)

    def test_prime_must_exceed_degree(self):
        """Test that the field must be larger than the degree."""
        with pytest.raises(OracleError):
            build_matrix(MultVector(7, (1,)), [(1, 2)], 7)

    def test_prime_validated(self):
        """Test that the modulus must be a prime below 2**31."""
        with pytest.raises(OracleError, match="not prime"):
            build_matrix(MultVector(2, (1,)), [(1, 2)], 100)


class TestRank:
    """Tests for rank over a prime field."""

    def test_identity(self):
        """Test a full-rank matrix."""
        mat = InterpolationMatrix(np.eye(3, dtype=np.int64), 7, (), 0)

        assert rank(mat) == 3

    def test_dependent_rows(self):
        """Test a row that is a multiple of another."""
        entries = np.array([[1, 2], [3, 6], [2, 5]], dtype=np.int64)

        assert rank(InterpolationMatrix(entries, 7, (), 0)) == 2
        assert rank(InterpolationMatrix(entries[:2], 7, (), 0)) == 1

    def test_empty(self):
        """Test a matrix without rows."""
        assert rank(InterpolationMatrix(np.zeros((0, 4), dtype=np.int64), 7, (), 0)) == 0

    def test_matches_rational_rank(self, config):
        """Test the modular rank against exact rational elimination."""
        system = MultVector(2, (1,) * 5)

        modular = rank(build_matrix(system, CONIC_POINTS, config.prime))

        assert modular == rational_rank(system, CONIC_POINTS) == 5


class TestDimension:
    """Tests for the randomized dimension estimate."""

    def test_no_conditions(self, config):
        """Test the full space of cubics."""
        assert oracle.dimension(LinearSystem(3, 0, 0, 0), config=config).dimension == 9

    def test_conic_through_five_points(self, config):
        """Test that five general points fix a conic."""
        result = oracle.dimension(LinearSystem(2, 0, 5, 1), config=config)

        assert result.dimension == 0
        assert result.unanimous
        assert result.trials == 2
        assert len(result.ranks) == 2

    def test_non_special(self, config):
        """Test a system of expected dimension."""
        assert oracle.dimension(LinearSystem(8, 1, 4, 4), config=config).dimension == 3

    def test_special(self, config):
        """Test systems above their expected dimension."""
        assert oracle.dimension(LinearSystem(8, 0, 5, 4), config=config).dimension == 0
        assert oracle.dimension(LinearSystem(5, 0, 2, 4), config=config).dimension == 3

    def test_negative_degree(self, config):
        """Test that a negative degree is empty."""
        assert oracle.dimension(MultVector(-1, (1,)), config=config).dimension == -1

    def test_deterministic_for_a_seed(self, config):
        """Test that a seed fixes the sampled points."""
        first = oracle.dimension(LinearSystem(5, 0, 2, 4), config=config)
        second = oracle.dimension(LinearSystem(5, 0, 2, 4), config=config)

        assert first.ranks == second.ranks

    def test_max_degree(self):
        """Test that the oracle refuses large degrees."""
        config = FatpointsConfig(_env_file=None, oracle_max_degree=5)

        with pytest.raises(OracleError):
            oracle.dimension(LinearSystem(6, 0, 1, 1), config=config)

    def test_trials_validated(self, config):
        """Test that at least one trial is needed."""
        with pytest.raises(OracleError):
            oracle.dimension(LinearSystem(2, 0, 5, 1), trials=0, config=config)

    @pytest.mark.parametrize("prime", [100, 2**31 + 11, 2**61 - 1])
    def test_prime_validated(self, prime, config):
        """Test that an explicit prime gets the same checks as the configured one."""
        with pytest.raises(OracleError):
            oracle.dimension(LinearSystem(2, 0, 5, 1), prime=prime, config=config)

    def test_result_dict(self, config):
        """Test the recorded oracle settings."""
        data = oracle.dimension(LinearSystem(2, 0, 5, 1), seed=3, config=config).to_dict()

        assert data["seed"] == 3
        assert data["prime"] == config.prime
        assert data["dimension"] == 0


class TestSamplePoints:
    """Tests for point sampling."""

    def test_distinct(self):
        """Test that sampled points are distinct."""
        rng = np.random.default_rng(0)

        points = oracle.sample_points(rng, 20, 5)

        assert len(set(points)) == 20
        assert all(0 <= x < 5 and 0 <= y < 5 for x, y in points)


class TestReplay:
    """Tests for the fixed regression points."""

    def test_regression_shape(self, config):
        """Test that the regression system gives a square matrix."""
        mat = build_matrix(oracle.REGRESSION_SYSTEM, oracle.REGRESSION_POINTS, config.prime)

        assert (mat.rows, mat.cols) == (105, 105)

    @pytest.mark.slow
    def test_regression_replay(self, config):
        """Test that L(13,5,9,4) is empty at the regression points."""
        assert oracle.replay(prime=config.prime) == -1

    @pytest.mark.slow
    def test_cross_check(self, config):
        """Test that random trials agree with the regression points."""
        assert oracle.cross_check_replay(config=config)


class TestProperties:
    """Cross-checks of the oracle against the other channels."""

    @pytest.mark.parametrize(
        "system",
        [
            LinearSystem(6, 2, 3, 2),
            LinearSystem(7, 3, 2, 3),
            LinearSystem(9, 2, 5, 4),
            LinearSystem(10, 6, 4, 4),
            LinearSystem(7, 0, 8, 2),
        ],
    )
    def test_never_below_expected(self, system, config):
        """Test that measured dimensions are at least e."""
        assert oracle.dimension(system, config=config).dimension >= expected_dimension(system)

    @pytest.mark.parametrize(
        ("system", "indices"),
        [
            (LinearSystem(8, 1, 4, 4), (1, 2, 3)),
            (LinearSystem(9, 3, 3, 3), (0, 1, 2)),
            (LinearSystem(10, 3, 6, 4), (1, 2, 3)),
            (LinearSystem(7, 2, 5, 2), (0, 1, 2)),
        ],
    )
    def test_cremona_invariance(self, system, indices, config):
        """Test that a quadratic transformation keeps the measured dimension."""
        step = cremona_step(MultVector.from_system(system), *indices)

        assert compare_endpoint(system, step.after.clamped(), config)

    @pytest.mark.slow
    def test_list_concordance(self, config):
        """Test that the m=4 list marks exactly the systems measured above e."""
        mismatches = []
        for d in range(4, 13):
            for m0 in range(d + 1):
                for n in range(1, 13):
                    s = LinearSystem(d, m0, n, 4)
                    measured = oracle.dimension(s, config=config).dimension
                    if minus_one_list_m4(s).special != (measured > expected_dimension(s)):
                        mismatches.append(s)

        assert mismatches == []

    @pytest.mark.slow
    @pytest.mark.parametrize("d", range(4, 10))
    def test_monotone_in_n(self, d, config):
        """Test that adding a general point never raises the measured dimension."""
        for m0 in range(d + 1):
            measured = [
                oracle.dimension(LinearSystem(d, m0, n, 4), config=config).dimension
                for n in range(0, 9)
            ]

            assert measured == sorted(measured, reverse=True)
            assert all(a - b <= 10 for a, b in zip(measured, measured[1:]))
            assert measured[-1] >= -1
