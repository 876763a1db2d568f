"""
Risk Engine
Computes spectral risk measures, VaR and ES for analytic and empirical loss distributions
"""
import logging
import math
from typing import List, Optional

from engine.results import ExactDiagnostics, RiskMeasureResult
from utils.distributions import Family, LossDistribution
from utils.errors import DomainError
from utils.quadrature import (
    DEFAULT_SCHEME,
    IntegralDiagnostics,
    Mode,
    QuadratureScheme,
    integrate_empirical,
    integrate_product,
)
from utils.spectra import RiskSpectrum, SpectrumKind

logger = logging.getLogger(__name__)

LOW_MASS_THRESHOLD = 0.999

HEAVY_TAIL_WARNING = (
    "heavy-tail: Cauchy losses make the truncated integral sensitive to endpoint handling; "
    "treat this value as grid-dependent"
)


class RiskEngine:
    def __init__(self, scheme: QuadratureScheme = DEFAULT_SCHEME):
        """Initialize Risk Engine with the scheme used when callers pass none"""
        self.scheme = scheme

    def srm(self, dist: LossDistribution, spec: RiskSpectrum,
            scheme: Optional[QuadratureScheme] = None) -> RiskMeasureResult:
        """
        Spectral risk measure M_phi = integral of phi(p) q_p dp.

        Empirical samples under ExactSlice are summed exactly over their
        order statistics; everything else goes through quadrature.

        Args:
            dist: loss distribution
            spec: any spectrum except the VaR Dirac spectrum
            scheme: quadrature scheme (defaults to the engine's)

        Returns:
            RiskMeasureResult
        """
        scheme = scheme or self.scheme
        if dist.family is Family.EMPIRICAL and scheme.mode is Mode.EXACT_SLICE:
            diagnostics = integrate_empirical(spec, dist)
            exact = ExactDiagnostics(method="order-statistic sum", captured_mass=diagnostics.captured_mass)
            return self._result(diagnostics.value, spec, exact, dist)

        diagnostics = integrate_product(spec, dist, scheme)
        return self._result(diagnostics.value, spec, diagnostics, dist)

    def var(self, dist: LossDistribution, alpha: float) -> RiskMeasureResult:
        """VaR_alpha = q_alpha, read straight off the quantile function"""
        spec = RiskSpectrum.var_dirac(alpha)
        value = dist.quantile(alpha)
        return self._result(value, spec, ExactDiagnostics(method="quantile lookup"), dist)

    def es(self, dist: LossDistribution, alpha: float,
           scheme: Optional[QuadratureScheme] = None) -> RiskMeasureResult:
        """Expected shortfall: the SRM of the flat tail spectrum above alpha"""
        return self.srm(dist, RiskSpectrum.es_step(alpha), scheme)

    def measure(self, dist: LossDistribution, spec: RiskSpectrum,
                scheme: Optional[QuadratureScheme] = None) -> RiskMeasureResult:
        """Route VaR to var and every other spectrum to srm"""
        if spec.kind is SpectrumKind.VAR_DIRAC:
            return self.var(dist, spec.parameter)
        return self.srm(dist, spec, scheme)

    def _result(self, value: float, spec: RiskSpectrum, diagnostics, dist: LossDistribution) -> RiskMeasureResult:
        if not math.isfinite(value):
            raise DomainError(f"{spec.label} on {dist.label} produced a non-finite value ({value})")

        warnings: List[str] = []
        if diagnostics.captured_mass < LOW_MASS_THRESHOLD:
            warnings.append(
                f"captured weight mass {diagnostics.captured_mass:.6g} < {LOW_MASS_THRESHOLD}: "
                "the integration domain misses part of the spectrum"
            )
        if dist.is_heavy_tailed:
            warnings.append(HEAVY_TAIL_WARNING)
        if isinstance(diagnostics, IntegralDiagnostics) and diagnostics.nonfinite_nodes_zeroed:
            logger.debug("%s on %s: %d node(s) zeroed", spec.label, dist.label,
                         diagnostics.nonfinite_nodes_zeroed)
        for message in warnings:
            logger.info("%s on %s: %s", spec.label, dist.label, message)
        return RiskMeasureResult(value=float(value), spectrum_echo=spec,
                                 diagnostics=diagnostics, warnings=tuple(warnings))
