"""
Unit tests for X/T state families and their scalar functionals.
"""
import math

import pytest
import numpy as np
import sys
import os

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from bilocal.exceptions import DomainViolationError, MatrixError, StateValidationError
from bilocal.linalg import is_density_matrix
from bilocal.states import (
    ChshVerdict, TParams, XParams, alpha_state, alpha_state_t, chsh_report, clamped_sqrt,
    compare_to_threshold, concurrence_t, concurrence_x_oracle, correlation_tensor, horodecki_m,
    is_separable_t, locality_vars, sample_t_params, sample_x_params, t_params_from_row, t_to_x,
    validate_t_params, validate_x_params, werner, x_params_from_row, x_state_matrix,
)

SINGLET_T = TParams(-1.0, -1.0, -1.0)
GENERIC_X = XParams(0.4, 0.1, 0.2, 0.3, 0.25, 0.1)


class TestValidation:
    """Test parameter validation."""

    def test_generic_x_is_valid(self):
        assert validate_x_params(GENERIC_X) == {"success": True, "errors": []}

    def test_coherence_violation_is_named(self):
        result = validate_x_params(XParams(0.5, 0.0, 0.0, 0.5, 0.6, 0.0))
        assert not result["success"]
        assert "p²≤ςd violated" in result["errors"]

    def test_normalization_violation(self):
        result = validate_x_params(XParams(0.5, 0.5, 0.5, 0.5, 0.0, 0.0))
        assert not result["success"]
        assert any("ς+κ+ζ+d=1" in e for e in result["errors"])

    def test_matrix_builder_rejects_invalid(self):
        with pytest.raises(StateValidationError, match="q²≤κζ"):
            x_state_matrix(XParams(0.0, 0.5, 0.5, 0.0, 0.0, 0.7))

    def test_bell_states_are_on_the_boundary(self):
        for t in (TParams(1, -1, 1), TParams(-1, 1, 1), TParams(1, 1, -1), SINGLET_T):
            assert validate_t_params(t)["success"]

    def test_outside_tetrahedron(self):
        result = validate_t_params(TParams(1.0, 1.0, 1.0))
        assert not result["success"]
        with pytest.raises(StateValidationError):
            t_to_x(TParams(1.0, 1.0, 1.0))

    def test_non_finite_values_are_rejected(self):
        result = validate_t_params(TParams(float("nan"), 0.0, 0.0))
        assert not result["success"]
        assert result["errors"] == ["c1 must be finite (nan)"]
        result = validate_x_params(XParams(0.5, 0.0, 0.0, 0.5, 0.0, float("inf")))
        assert result["errors"] == ["q must be finite (inf)"]
        with pytest.raises(StateValidationError, match="c3 must be finite"):
            t_to_x(TParams(0.0, 0.0, float("-inf")))

    def test_werner_range(self):
        with pytest.raises(StateValidationError):
            werner(1.2)


class TestConstructors:
    """Test state constructors and the T-to-X mapping."""

    def test_singlet_mapping(self):
        assert t_to_x(SINGLET_T).as_tuple() == (0.0, 0.5, 0.5, 0.0, 0.0, -0.5)

    def test_maximally_mixed(self):
        rho = x_state_matrix(t_to_x(TParams(0.0, 0.0, 0.0)))
        assert np.allclose(rho, np.eye(4) / 4)

    def test_matrix_layout(self):
        rho = x_state_matrix(GENERIC_X)
        assert rho[0, 3] == rho[3, 0] == 0.25
        assert rho[1, 2] == rho[2, 1] == 0.1
        assert is_density_matrix(rho)

    def test_alpha_state_is_t_state(self):
        for a in (0.0, 0.3, 0.75, 1.0):
            assert t_to_x(alpha_state_t(a)).as_tuple() == pytest.approx(alpha_state(a).as_tuple())

    def test_round_trip_on_random_samples(self):
        rng = np.random.default_rng(13)
        for row in sample_t_params(rng, 500):
            t = t_params_from_row(row)
            tensor = correlation_tensor(x_state_matrix(t_to_x(t))).t
            assert np.allclose(tensor, np.diag(t.as_tuple()), atol=1e-12)

    def test_werner_coefficients(self):
        assert werner(0.6) == TParams(-0.6, -0.6, -0.6)

    def test_from_row(self):
        assert x_params_from_row(np.array(GENERIC_X.as_tuple())) == GENERIC_X


class TestCorrelationTensor:
    """Test the correlation tensor and Horodecki value."""

    def test_x_state_tensor_is_diagonal(self):
        t = correlation_tensor(x_state_matrix(GENERIC_X)).t
        assert t == pytest.approx(np.diag([0.7, -0.3, 0.4]), abs=1e-12)
        assert GENERIC_X.t_xx == pytest.approx(0.7)
        assert GENERIC_X.t_yy == pytest.approx(-0.3)
        assert GENERIC_X.t_zz == pytest.approx(0.4)

    def test_t_state_tensor(self):
        t = TParams(0.3, -0.2, 0.1)
        diag = correlation_tensor(x_state_matrix(t_to_x(t))).diagonal()
        assert diag == pytest.approx(t.as_tuple())

    def test_horodecki_is_max_theta(self):
        rng = np.random.default_rng(14)
        for row in sample_x_params(rng, 500):
            x = x_params_from_row(row)
            v = locality_vars(x)
            m = horodecki_m(x_state_matrix(x))
            assert m * m == pytest.approx(max(v.theta1, v.theta2, v.theta3), abs=1e-10)

    def test_rejects_invalid_matrix(self):
        with pytest.raises(MatrixError):
            correlation_tensor(np.diag([1.5, -0.5, 0.0, 0.0]))
        with pytest.raises(MatrixError):
            correlation_tensor(np.eye(2) / 2)

    def test_horodecki_generic(self):
        assert horodecki_m(x_state_matrix(GENERIC_X)) == pytest.approx(math.sqrt(0.65))

    def test_singlet_is_maximally_nonlocal(self):
        report = chsh_report(x_state_matrix(t_to_x(SINGLET_T)))
        assert report["m"] == pytest.approx(math.sqrt(2))
        assert report["chsh"] == pytest.approx(2 * math.sqrt(2))
        assert report["verdict"] is ChshVerdict.NONLOCAL

    @pytest.mark.parametrize("alpha", [0.2, 0.5, 0.9])
    def test_werner_horodecki(self, alpha):
        m = horodecki_m(x_state_matrix(t_to_x(werner(alpha))))
        assert m == pytest.approx(math.sqrt(2) * alpha)

    def test_werner_verdicts(self):
        boundary = chsh_report(x_state_matrix(t_to_x(werner(1 / math.sqrt(2)))))
        local = chsh_report(x_state_matrix(t_to_x(werner(0.5))))
        assert boundary["verdict"] is ChshVerdict.BOUNDARY
        assert local["verdict"] is ChshVerdict.LOCAL

    def test_product_and_maximally_mixed(self):
        assert horodecki_m(x_state_matrix(XParams(1.0, 0.0, 0.0, 0.0, 0.0, 0.0))) == pytest.approx(1.0)
        assert horodecki_m(np.eye(4) / 4) == pytest.approx(0.0)


class TestLocalityVars:
    """Test theta and epsilon/delta/xi."""

    def test_singlet(self):
        v = locality_vars(t_to_x(SINGLET_T))
        assert (v.theta1, v.theta2, v.theta3) == pytest.approx((2.0, 2.0, 2.0))
        assert (v.epsilon, v.delta, v.xi) == pytest.approx((-1.0, -1.0, -1.0))

    def test_generic(self):
        v = locality_vars(GENERIC_X)
        assert v.theta1 == pytest.approx(8 * (0.25 ** 2 + 0.1 ** 2))
        assert v.theta2 == pytest.approx(0.16 + 4 * 0.35 ** 2)
        assert v.theta3 == pytest.approx(0.16 + 4 * 0.15 ** 2)
        assert v.epsilon == pytest.approx(1 - v.theta1)

    def test_alpha_state_algebra(self):
        rng = np.random.default_rng(8)
        for a in rng.uniform(0, 1, size=1000):
            v = locality_vars(alpha_state(a))
            assert v.epsilon == pytest.approx(1 - 2 * a * a, abs=1e-12)
            assert v.delta == pytest.approx(1 - a * a - (2 * a - 1) ** 2, abs=1e-12)
            assert v.xi == pytest.approx(v.delta, abs=1e-12)

    def test_local_states_have_nonnegative_vars(self):
        rng = np.random.default_rng(15)
        checked = 0
        for row in sample_x_params(rng, 1000):
            x = x_params_from_row(row)
            if horodecki_m(x_state_matrix(x)) > 1:
                continue
            v = locality_vars(x)
            assert min(v.epsilon, v.delta, v.xi) >= -1e-10
            checked += 1
        assert checked > 100

    def test_maximally_mixed_is_all_ones(self):
        v = locality_vars(t_to_x(TParams(0.0, 0.0, 0.0)))
        assert (v.epsilon, v.delta, v.xi) == (1.0, 1.0, 1.0)


class TestConcurrence:
    """Test concurrence formulas."""

    @pytest.mark.parametrize("alpha", [0.1, 1 / 3, 0.6, 1.0])
    def test_werner(self, alpha):
        expected = max(0.0, (3 * alpha - 1) / 2)
        assert concurrence_t(werner(alpha)) == pytest.approx(expected)
        assert concurrence_x_oracle(t_to_x(werner(alpha))) == pytest.approx(expected)

    def test_t_and_x_forms_agree(self):
        rng = np.random.default_rng(5)
        for row in sample_t_params(rng, 200):
            t = TParams(*row)
            assert concurrence_t(t) == pytest.approx(concurrence_x_oracle(t_to_x(t)), abs=1e-12)

    def test_separable_octahedron(self):
        assert is_separable_t(TParams(0.3, -0.3, 0.4))
        assert not is_separable_t(TParams(0.5, -0.5, 0.5))
        assert concurrence_t(TParams(0.3, -0.3, 0.4)) == pytest.approx(0.0, abs=1e-15)


class TestSamplers:
    """Test the random state samplers."""

    def test_t_samples_are_valid(self):
        rng = np.random.default_rng(9)
        rows = sample_t_params(rng, 500)
        assert rows.shape == (500, 3)
        assert all(validate_t_params(TParams(*row))["success"] for row in rows)

    def test_separable_samples(self):
        rng = np.random.default_rng(10)
        rows = sample_t_params(rng, 300, separable=True)
        assert np.all(np.abs(rows).sum(axis=1) <= 1)

    def test_x_samples_are_density_matrices(self):
        rng = np.random.default_rng(12)
        rows = sample_x_params(rng, 50)
        assert rows.shape == (50, 6)
        for row in rows:
            assert validate_x_params(x_params_from_row(row))["success"]

    def test_seeded_reproducibility(self):
        a = sample_t_params(np.random.default_rng(3), 10)
        b = sample_t_params(np.random.default_rng(3), 10)
        assert np.array_equal(a, b)


class TestHelpers:
    """Test threshold comparison and clamped roots."""

    def test_compare_to_threshold(self):
        assert compare_to_threshold(1.0 + 1e-12) == 0
        assert compare_to_threshold(1.1) == 1
        assert compare_to_threshold(0.9) == -1
        assert compare_to_threshold(1.5, math.sqrt(2)) == 1

    def test_clamped_sqrt(self):
        assert clamped_sqrt(-1e-15) == 0.0
        assert clamped_sqrt(4.0) == 2.0
        with pytest.raises(DomainViolationError):
            clamped_sqrt(-0.1)
