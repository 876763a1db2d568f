import pytest

from engine.results import LimitKind
from utils.distributions import UNDEFINED, beta, cauchy, gumbel_min, standard_normal, standard_uniform
from utils.errors import ConfigurationError, DomainError
from utils.quadrature import QuadratureScheme


class TestSweep:
    def test_normal_exponential_column(self, sensitivity, repro_simpson):
        curve = sensitivity.sweep(standard_normal(), "exponential", [1, 5, 25, 100], repro_simpson)
        assert curve.parameter_name == "k"
        assert curve.parameters == (1.0, 5.0, 25.0, 100.0)
        assert list(curve.values) == pytest.approx([0.278, 1.080, 1.945, 2.467], abs=0.005)

    def test_normal_power_low_column(self, sensitivity, repro_trapezoid):
        curve = sensitivity.sweep(standard_normal(), "power_low", [0.1, 0.5, 0.9], repro_trapezoid)
        assert list(curve.values) == pytest.approx([1.062, 0.664, 0.096], abs=0.01)

    def test_cauchy_power_high_column(self, sensitivity, repro_trapezoid):
        curve = sensitivity.sweep(cauchy(), "power-high", [1.1, 1.5, 5, 20], repro_trapezoid)
        for value, published in zip(curve.values, [1.096, 3.258, 11.276, 36.503]):
            assert value == pytest.approx(published, rel=0.05)

    def test_results_keep_input_order(self, sensitivity):
        params = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0]
        curve = sensitivity.sweep(standard_uniform(), "exp", params, QuadratureScheme.exact(1000))
        assert curve.parameters == tuple(params)
        assert all(b > a for a, b in zip(curve.values, curve.values[1:]))

    def test_params_must_ascend(self, sensitivity):
        with pytest.raises(DomainError):
            sensitivity.sweep(standard_normal(), "exponential", [5, 1])

    def test_invalid_parameter_fails_before_integration(self, sensitivity):
        with pytest.raises(DomainError):
            sensitivity.sweep(standard_normal(), "power_low", [0.5, 1.0])

    def test_unknown_family(self, sensitivity):
        with pytest.raises(DomainError):
            sensitivity.sweep(standard_normal(), "es", [0.5])


class TestLimitCheck:
    def test_exponential_to_mean(self, sensitivity):
        check = sensitivity.limit_check(standard_uniform(), LimitKind.EXP_K_TO_0, QuadratureScheme.exact())
        assert check.reference == 0.5
        assert check.gap <= 1e-4

    @pytest.mark.parametrize("dist", [standard_normal(), standard_uniform(), beta(2, 4), gumbel_min()],
                             ids=lambda d: d.label)
    @pytest.mark.parametrize("which", [LimitKind.POWER_HIGH_GAMMA_TO_1, LimitKind.POWER_LOW_GAMMA_TO_1])
    def test_power_limits_to_mean(self, sensitivity, dist, which):
        assert sensitivity.limit_check(dist, which, QuadratureScheme.exact()).gap <= 1e-3

    def test_beta_power_high_on_reproduction_grid(self, sensitivity, repro_trapezoid):
        check = sensitivity.limit_check(beta(2, 4), LimitKind.POWER_HIGH_GAMMA_TO_1, repro_trapezoid)
        assert check.limit_estimate == pytest.approx(0.333, abs=1e-3)

    def test_power_low_to_zero_on_reproduction_grid(self, sensitivity, repro_trapezoid):
        check = sensitivity.limit_check(standard_uniform(), LimitKind.POWER_LOW_GAMMA_TO_0, repro_trapezoid)
        assert check.reference == 0.0
        assert check.limit_estimate == pytest.approx(0.0, abs=1e-3)
        assert check.note

    def test_power_low_to_zero_exact_slice_is_the_supremum(self, sensitivity):
        check = sensitivity.limit_check(standard_uniform(), LimitKind.POWER_LOW_GAMMA_TO_0, QuadratureScheme.exact())
        assert check.reference == 1.0
        assert check.limit_estimate == pytest.approx(1.0, abs=1e-3)
        assert "essential supremum" in check.note

    def test_cauchy_reference_is_unit_weight_integral(self, sensitivity, repro_trapezoid):
        check = sensitivity.limit_check(cauchy(), LimitKind.POWER_LOW_GAMMA_TO_1, repro_trapezoid)
        assert cauchy().mean() is UNDEFINED
        assert check.gap <= 1e-3
        assert "mean undefined" in check.note
        assert check.result.value == check.limit_estimate


class TestDerivative:
    def test_exponential_slope_is_positive(self, sensitivity):
        report = sensitivity.srm_derivative(standard_normal(), "exponential", 5.0, h=1e-4)
        assert report.central_difference > 0
        assert report.step == 1e-4

    @pytest.mark.parametrize("c", [-1000.0, -10.0, 10.0, 1000.0])
    def test_constant_shift_leaves_slope_unchanged(self, sensitivity, c):
        report = sensitivity.srm_derivative(standard_normal(), "exponential", 5.0, h=1e-4, shift_c=c)
        assert report.shift_discrepancy <= 1e-6 * (1 + abs(c))

    def test_uniform_power_high_closed_form(self, sensitivity):
        report = sensitivity.srm_derivative(standard_uniform(), "power_high", 2.0, h=1e-5)
        assert report.central_difference == pytest.approx(1.0 / 9.0, abs=1e-5)

    def test_default_step(self, sensitivity):
        assert sensitivity.srm_derivative(standard_uniform(), "exp", 25.0).step == pytest.approx(25e-4)

    def test_reproduction_grid_is_refused(self, sensitivity, repro_trapezoid):
        with pytest.raises(ConfigurationError):
            sensitivity.srm_derivative(standard_normal(), "exponential", 5.0, scheme=repro_trapezoid)
