import numpy as np
import pytest

from engine.results import ExactDiagnostics
from engine.risk_engine import HEAVY_TAIL_WARNING
from utils.distributions import cauchy, from_samples, standard_normal, standard_uniform
from utils.errors import DomainError, UnsupportedOperationError
from utils.quadrature import IntegralDiagnostics, QuadratureScheme
from utils.spectra import RiskSpectrum


class TestSrm:
    @pytest.mark.parametrize("k, expected", [(5.0, 1.080), (25.0, 1.945)])
    def test_normal_exponential_published(self, risk_engine, repro_simpson, k, expected):
        result = risk_engine.srm(standard_normal(), RiskSpectrum.exponential(k), repro_simpson)
        assert result.value == pytest.approx(expected, abs=0.005)
        assert isinstance(result.diagnostics, IntegralDiagnostics)

    @pytest.mark.parametrize("spec, expected", [
        (RiskSpectrum.power_low(0.9), 0.526),
        (RiskSpectrum.power_high(5.0), 0.833),
    ])
    def test_uniform_power_published(self, risk_engine, repro_trapezoid, spec, expected):
        assert risk_engine.srm(standard_uniform(), spec, repro_trapezoid).value == pytest.approx(expected, abs=0.005)

    def test_empirical_uses_exact_order_statistic_sum(self, risk_engine):
        result = risk_engine.srm(from_samples([0.0, 1.0]), RiskSpectrum.es_step(0.5))
        assert result.value == 1.0
        assert result.is_exact
        assert result.captured_mass == 1.0

    def test_engine_default_scheme(self, risk_engine):
        result = risk_engine.srm(standard_uniform(), RiskSpectrum.es_step(0.0))
        assert result.diagnostics.scheme_echo == QuadratureScheme.exact()
        assert result.value == pytest.approx(0.5, abs=1e-12)

    def test_var_spectrum_is_rejected(self, risk_engine):
        with pytest.raises(UnsupportedOperationError):
            risk_engine.srm(standard_uniform(), RiskSpectrum.var_dirac(0.5))

    def test_low_mass_and_heavy_tail_warnings(self, risk_engine, repro_trapezoid):
        result = risk_engine.srm(cauchy(), RiskSpectrum.power_low(0.1), repro_trapezoid)
        assert HEAVY_TAIL_WARNING in result.warnings
        assert any("captured weight mass" in w for w in result.warnings)
        assert result.captured_mass == pytest.approx((1.0 - 1e-4) ** 0.1 - 1e-4 ** 0.1)

    def test_clean_result_has_no_warnings(self, risk_engine):
        assert risk_engine.srm(standard_normal(), RiskSpectrum.exponential(5.0)).warnings == ()


MONOTONE_SPECS = [
    RiskSpectrum.exponential(5.0),
    RiskSpectrum.power_low(0.5),
    RiskSpectrum.power_high(5.0),
    RiskSpectrum.es_step(0.95),
]


class TestMonotonicity:
    @pytest.mark.parametrize("spec", MONOTONE_SPECS, ids=lambda s: s.label)
    @pytest.mark.parametrize("seed", range(5))
    def test_dominated_sample_scores_lower(self, risk_engine, spec, seed):
        rng = np.random.default_rng(seed)
        low = rng.standard_normal(250)
        high = low + np.abs(rng.standard_t(3, 250))
        assert risk_engine.srm(from_samples(low), spec).value <= risk_engine.srm(from_samples(high), spec).value

    @pytest.mark.parametrize("spec", MONOTONE_SPECS, ids=lambda s: s.label)
    @pytest.mark.parametrize("scheme", [QuadratureScheme.exact(10_000), QuadratureScheme.repro_trapezoid()],
                             ids=lambda s: s.label)
    def test_shifted_distribution_scores_higher(self, risk_engine, spec, scheme):
        base = risk_engine.srm(standard_normal(), spec, scheme).value
        assert risk_engine.srm(standard_normal(loc=0.5), spec, scheme).value > base

    def test_larger_quantiles_everywhere(self, risk_engine):
        spec = RiskSpectrum.exponential(25.0)
        assert (risk_engine.srm(standard_uniform(), spec).value
                < risk_engine.srm(standard_uniform().scaled(2.0), spec).value)


class TestVarAndEs:
    @pytest.mark.parametrize("dist, alpha, expected", [
        (standard_uniform(), 0.95, 0.95),
        (cauchy(), 0.5, 0.0),
        (standard_normal(), 0.95, 1.6449),
    ])
    def test_var_is_the_quantile(self, risk_engine, dist, alpha, expected):
        result = risk_engine.var(dist, alpha)
        assert result.value == pytest.approx(expected, abs=1e-4)
        assert result.value == dist.quantile(alpha)
        assert isinstance(result.diagnostics, ExactDiagnostics)

    def test_var_alpha_range(self, risk_engine):
        with pytest.raises(DomainError):
            risk_engine.var(standard_normal(), 1.0)

    def test_empirical_var_step_rule(self, risk_engine):
        assert risk_engine.var(from_samples([1.0, 2.0, 3.0]), 0.5).value == 2.0

    def test_es_uniform(self, risk_engine):
        assert risk_engine.es(standard_uniform(), 0.95).value == pytest.approx(0.975, abs=1e-6)
        assert risk_engine.es(standard_uniform(), 0.0).value == pytest.approx(0.5, abs=1e-12)

    def test_es_normal(self, risk_engine):
        value = risk_engine.es(standard_normal(), 0.95, QuadratureScheme.exact(1_000_000)).value
        assert value == pytest.approx(2.0627, abs=5e-4)

    def test_es_is_srm_of_step(self, risk_engine, repro_trapezoid):
        direct = risk_engine.srm(standard_normal(), RiskSpectrum.es_step(0.9), repro_trapezoid).value
        assert risk_engine.es(standard_normal(), 0.9, repro_trapezoid).value == direct


class TestMeasure:
    def test_routes_var(self, risk_engine):
        assert risk_engine.measure(standard_uniform(), RiskSpectrum.var_dirac(0.25)).value == pytest.approx(0.25)

    def test_routes_srm(self, risk_engine):
        assert risk_engine.measure(standard_uniform(), RiskSpectrum.es_step(0.0)).value == pytest.approx(0.5)
