"""
Unit tests for the analytic criteria.
"""
import math

import pytest
import numpy as np
import sys
import os

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import FIG4_P, V_LOC
from bilocal.criteria import (
    C_CONDITIONS, FilterParams, SteeringVerdict, alpha_nonbilocal, conditional_chsh,
    copy_conditions, edx_inequality, entanglement_necessity_check, filter_state,
    filter_state_matrix, filtered_chsh_bound, hidden_filter, hidden_limit_state,
    hidden_network_report, hidden_nonlocality_state, inequality_pair, maximal_plane_condition,
    necessity_monte_carlo, no_go_monte_carlo, sample_locality_vars, steering_report,
    sufficiency_report, t_local_condition, t_nonbilocal_condition, visibility_analysis,
)
from bilocal.exceptions import DegenerateBranchError, DomainViolationError
from bilocal.network import BilocalVerdict, analytic_bound_b1
from bilocal.states import (
    ChshVerdict, LocalityVars, TParams, XParams, alpha_state, alpha_state_t, horodecki_m,
    locality_vars, sample_t_params, sample_x_params, t_params_from_row, t_to_x, werner,
    x_params_from_row, x_state_matrix,
)

SINGLET_T = TParams(-1.0, -1.0, -1.0)
WITNESS_X = XParams(0.5, 0.0, 0.0, 0.5, FIG4_P, 0.0)


class TestTStatePairs:
    """Test the T-state locality and nonbilocality conditions."""

    def test_diagonal_point(self):
        t = TParams(0.8, 0.0, 0.8)
        local = t_local_condition(t, t)
        nonbilocal = t_nonbilocal_condition(t, t)
        assert local.value == pytest.approx(0.9051, abs=1e-4)
        assert local.flag
        assert nonbilocal.value == pytest.approx(1.1314, abs=1e-4)
        assert nonbilocal.flag

    def test_singlets(self):
        assert t_local_condition(SINGLET_T, SINGLET_T).value == pytest.approx(math.sqrt(2))
        assert not t_local_condition(SINGLET_T, SINGLET_T).flag
        assert t_nonbilocal_condition(SINGLET_T, SINGLET_T).value == pytest.approx(math.sqrt(2))

    def test_negative_radicand_is_clamped(self):
        result = t_nonbilocal_condition(TParams(0.0, 0.0, 1.0), TParams(0.0, 0.0, -1.0))
        assert result.value == 0.0
        assert result.clamped
        assert not result.flag

    def test_maximally_mixed_pair(self):
        mixed = TParams(0.0, 0.0, 0.0)
        assert t_nonbilocal_condition(mixed, SINGLET_T).value == 0.0

    def test_nonbilocal_value_matches_bound_on_random_pairs(self):
        rng = np.random.default_rng(31)
        rows = sample_t_params(rng, 4000)
        for k in range(0, 4000, 2):
            t1, t2 = t_params_from_row(rows[k]), t_params_from_row(rows[k + 1])
            bound = analytic_bound_b1(t_to_x(t1), t_to_x(t2)).value
            assert t_nonbilocal_condition(t1, t2).value == pytest.approx(bound, abs=1e-12)

    def test_conditional_chsh_of_singlets(self):
        rows = conditional_chsh(t_to_x(SINGLET_T), t_to_x(SINGLET_T))
        assert [row["label"] for row in rows] == ["00", "01", "10", "11"]
        assert all(row["m"] == pytest.approx(math.sqrt(2)) for row in rows)

    def test_conditional_chsh_matches_local_condition(self):
        t1, t2 = TParams(0.5, -0.2, 0.3), TParams(-0.4, 0.3, -0.1)
        rows = conditional_chsh(t_to_x(t1), t_to_x(t2))
        best = max(row["m"] for row in rows if row["m"] is not None)
        assert best == pytest.approx(t_local_condition(t1, t2).value)
        assert best == pytest.approx(math.sqrt(0.0436))


class TestVisibility:
    """Test the Werner visibility trade-off."""

    def test_threshold_on_phi1(self):
        phi2 = 1 - V_LOC
        assert visibility_analysis(0.2, phi2).nonbilocal
        assert not visibility_analysis(0.21, phi2).nonbilocal
        assert phi2 / (1 + math.sqrt(2) * phi2) == pytest.approx(0.20711, abs=1e-5)

    def test_equivalent_to_product_above_half(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            phi1 = rng.uniform(0, V_LOC)
            phi2 = rng.uniform(0, 1 - V_LOC)
            report = visibility_analysis(phi1, phi2)
            if abs(report.product - 0.5) > 1e-9:
                assert report.nonbilocal == (report.product > 0.5)

    def test_both_nonlocal(self):
        report = visibility_analysis(0.1, -0.05, both_nonlocal=True)
        assert report.alpha1 == pytest.approx(V_LOC + 0.1)
        assert report.nonbilocal == (report.product > 0.5)

    def test_out_of_range(self):
        with pytest.raises(DomainViolationError):
            visibility_analysis(0.8, 0.0)


class TestSteering:
    """Test the linear steering criterion."""

    def test_witness_point(self):
        report = steering_report(WITNESS_X)
        assert report.r == pytest.approx((0.48, 0.48, 1.0))
        assert report.w == pytest.approx(0.5)
        assert report.r_post == pytest.approx((0.2304, 0.2304, -1.0))
        assert report.pre_verdict is SteeringVerdict.NOT_GUARANTEED
        assert report.post_verdict is SteeringVerdict.NOT_GUARANTEED
        assert report.st12_value == pytest.approx(math.sqrt(1.9216))
        assert report.nonbilocal

    def test_identical_copy_b1_matches_bound(self):
        report = steering_report(WITNESS_X)
        assert report.identical_copy_b1 == pytest.approx(analytic_bound_b1(WITNESS_X, WITNESS_X).value)

    def test_singlet_is_steerable(self):
        report = steering_report(t_to_x(SINGLET_T))
        assert report.pre_verdict is SteeringVerdict.GUARANTEED
        assert report.pre_verdict.value == "steerable-guaranteed"

    def test_degenerate_branch(self):
        with pytest.raises(DegenerateBranchError):
            steering_report(XParams(1.0, 0.0, 0.0, 0.0, 0.0, 0.0))


class TestFiltering:
    """Test local filtering and hidden nonlocality."""

    def test_parameter_and_matrix_forms_agree(self):
        x = XParams(0.4, 0.1, 0.2, 0.3, 0.25, 0.1)
        f = FilterParams(0.6, 0.8)
        assert np.allclose(x_state_matrix(filter_state(x, f)),
                           filter_state_matrix(x_state_matrix(x), f))

    def test_identity_filter(self):
        x = XParams(0.4, 0.1, 0.2, 0.3, 0.25, 0.1)
        assert filter_state(x, FilterParams(1.0, 1.0)).as_tuple() == pytest.approx(x.as_tuple())

    def test_filter_range(self):
        with pytest.raises(DomainViolationError):
            filter_state(t_to_x(SINGLET_T), FilterParams(0.0, 1.0))

    def test_ground_truth_is_twice_horodecki(self):
        x = XParams(0.4, 0.1, 0.2, 0.3, 0.25, 0.1)
        report = filtered_chsh_bound(x, FilterParams(0.7, 0.5))
        assert report.ground_truth == pytest.approx(2 * horodecki_m(x_state_matrix(report.filtered)))
        assert report.table_first == pytest.approx(2 * report.horodecki_first)
        assert report.pq_sign == "pq>0"

    def test_second_branch_matches_filtered_tensor(self):
        rng = np.random.default_rng(33)
        for row in sample_x_params(rng, 200):
            x = x_params_from_row(row)
            f = FilterParams(*rng.uniform(0.05, 1.0, size=2))
            report = filtered_chsh_bound(x, f)
            fx = report.filtered
            assert report.table_second_pos == pytest.approx(
                2 * math.sqrt(fx.t_xx ** 2 + fx.t_zz ** 2), abs=1e-10)
            assert report.table_second_neg == pytest.approx(
                2 * math.sqrt(fx.t_yy ** 2 + fx.t_zz ** 2), abs=1e-10)

    def test_rows_coincide_without_p(self):
        x = XParams(0.3, 0.2, 0.3, 0.2, 0.0, 0.15)
        report = filtered_chsh_bound(x, FilterParams(0.6, 0.9))
        assert report.pq_sign == "pq=0"
        assert report.table_second_pos == pytest.approx(report.table_second_neg)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
    def test_hidden_nonlocality_revealed(self, alpha):
        x = hidden_nonlocality_state(alpha)
        assert horodecki_m(x_state_matrix(x)) <= 1
        report = filtered_chsh_bound(x, hidden_filter(alpha))
        assert report.ground_truth > 2
        assert report.ground_truth == pytest.approx(2 * math.sqrt(1 + alpha), rel=1e-5)

    def test_limit_state(self):
        alpha = 0.5
        limit = hidden_limit_state(alpha)
        assert limit.as_tuple() == pytest.approx((0.0, 0.5, 0.5, 0.0, 0.0, -math.sqrt(alpha) / 2))
        assert 2 * horodecki_m(x_state_matrix(limit)) == pytest.approx(2 * math.sqrt(1.5))

    def test_hidden_state_range(self):
        with pytest.raises(DomainViolationError):
            hidden_nonlocality_state(1.5)

    def test_network_report(self):
        report = hidden_network_report(0.5, 1.0)
        assert report.projective_local_model
        assert report.copy1_chsh["verdict"] is ChshVerdict.LOCAL
        assert report.filtered_chsh > 2
        assert report.network_b1 == pytest.approx(1.0)
        assert report.verdict is BilocalVerdict.BOUNDARY
        assert hidden_network_report(0.6, 1.0).verdict is BilocalVerdict.NONBILOCAL


class TestLocalityVariableForm:
    """Test the epsilon/delta/xi inequality and the maximal plane."""

    @pytest.mark.parametrize("a1,a2", [(0.9, 0.8), (0.6, 0.7), (1.0, 1.0)])
    def test_werner_pair_matches_bound(self, a1, a2):
        x1, x2 = t_to_x(werner(a1)), t_to_x(werner(a2))
        result = edx_inequality(locality_vars(x1), locality_vars(x2))
        assert result.value == pytest.approx(math.sqrt(2) * analytic_bound_b1(x1, x2).value)
        assert result.flag == (a1 * a2 > 0.5)

    def test_matches_bound_when_zz_terms_agree(self):
        rng = np.random.default_rng(32)
        rows = sample_t_params(rng, 2000)
        checked = 0
        for k in range(0, 2000, 2):
            t1, t2 = t_params_from_row(rows[k]), t_params_from_row(rows[k + 1])
            if t1.c3 * t2.c3 < 0:
                continue
            x1, x2 = t_to_x(t1), t_to_x(t2)
            result = edx_inequality(locality_vars(x1), locality_vars(x2))
            bound = analytic_bound_b1(x1, x2).value
            assert result.value == pytest.approx(math.sqrt(2) * bound, abs=1e-10)
            if abs(bound - 1) > 1e-8:
                assert result.flag == (bound > 1)
            checked += 1
        assert checked > 300

    def test_domain(self):
        bad = LocalityVars.from_vars(0.0, 1.5, 0.0)
        with pytest.raises(DomainViolationError):
            edx_inequality(bad, bad)

    def test_maximal_plane(self):
        report = maximal_plane_condition(0.4, -0.7)
        assert report.delta2_bound == pytest.approx(-0.6667, abs=1e-4)
        assert report.capable
        assert not maximal_plane_condition(0.4, -0.5).capable
        assert maximal_plane_condition(0.0, 0.0).boundary


class TestSufficiency:
    """Test the sign dispatch and the sufficient conditions."""

    def test_alpha_state_classes(self):
        assert inequality_pair(alpha_state_t(0.8)) == 1
        assert inequality_pair(alpha_state_t(0.3)) == 2

    def test_werner_class(self):
        assert inequality_pair(werner(0.9)) == 1

    def test_c1_upper_end(self):
        assert C_CONDITIONS["C1"](0.0, 0.3)
        assert not C_CONDITIONS["C1"](0.0, 0.33)

    def test_singlet_pair(self):
        report = sufficiency_report(SINGLET_T, SINGLET_T)
        assert report.scenario == "both nonlocal, delta1<0"
        assert report.c_results == {"C3[copy1]": True, "C3[copy2]": True}
        assert report.edx.flag
        assert report.verdict

    def test_copy_conditions(self):
        copy = copy_conditions(SINGLET_T)
        assert (copy.f, copy.g, copy.h) == pytest.approx((math.sqrt(2),) * 3)
        assert copy.condition_i and copy.condition_iii
        assert not copy.local

    def test_both_local_pair(self):
        t = TParams(0.3, -0.2, 0.1)
        report = sufficiency_report(t, t)
        assert report.scenario == "both local"
        assert not report.verdict


class TestAlphaStates:
    """Test the alpha-state pair criterion."""

    def test_pure_pair(self):
        result = alpha_nonbilocal(1.0, 1.0)
        assert result.value == pytest.approx(math.sqrt(2))
        assert result.flag

    def test_matches_bound(self):
        for a1, a2 in ((0.9, 0.7), (0.6, 0.95)):
            bound = analytic_bound_b1(alpha_state(a1), alpha_state(a2)).value
            assert alpha_nonbilocal(a1, a2).value == pytest.approx(bound)

    def test_below_half_never_flagged(self):
        for a1 in np.linspace(0.0, 0.49, 25):
            for a2 in np.linspace(0.0, 1.0, 25):
                assert not alpha_nonbilocal(a1, a2).flag

    def test_range(self):
        with pytest.raises(DomainViolationError):
            alpha_nonbilocal(1.2, 0.5)


class TestPropertyRuns:
    """Test the Monte-Carlo property runs."""

    def test_separable_pairs_never_flagged(self):
        result = necessity_monte_carlo(20000, seed=1, workers=2)
        assert result == {"samples": 20000, "flagged": 0, "violations": 0}

    def test_identical_separable_copies(self):
        assert necessity_monte_carlo(5000, seed=2, same_copy=True)["violations"] == 0

    def test_entangled_pair_passes_check(self):
        assert entanglement_necessity_check(SINGLET_T, SINGLET_T)
        assert entanglement_necessity_check(TParams(0.3, -0.3, 0.4), SINGLET_T)

    @pytest.mark.parametrize("mode", ["local", "mixed"])
    def test_no_go_regimes(self, mode):
        assert no_go_monte_carlo(20000, mode, seed=3)["violations"] == 0

    def test_locality_var_sampler(self):
        draws = sample_locality_vars(np.random.default_rng(0), 100, "mixed")
        assert draws.shape == (100, 2, 3)
        assert np.all(draws[:, 0, 1] >= 0.5)
        assert np.all(draws[:, 1, 1] < 0)
        with pytest.raises(DomainViolationError):
            sample_locality_vars(np.random.default_rng(0), 10, "other")

    def test_runs_are_seeded(self):
        assert no_go_monte_carlo(3000, "local", seed=5) == no_go_monte_carlo(3000, "local", seed=5, workers=3)
