"""
Sensitivity Engine
Parameter sweeps, limit checks and finite-difference sensitivities of spectral risk measures
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

from engine.results import DerivativeReport, LimitCheck, LimitKind, SweepCurve
from engine.risk_engine import RiskEngine
from utils.distributions import UNDEFINED, LossDistribution
from utils.errors import ConfigurationError, DomainError
from utils.quadrature import Mode, QuadratureScheme, integrate_product
from utils.spectra import RiskSpectrum, spectrum_for

logger = logging.getLogger(__name__)

SWEEP_FAMILIES = {"exponential": "k", "power_low": "gamma", "power_high": "gamma"}

# Parameter values standing in for the "-> 0" / "-> 1" limits.
LIMIT_PROXIMITY = {
    LimitKind.EXP_K_TO_0: ("exponential", 1e-6),
    LimitKind.POWER_LOW_GAMMA_TO_1: ("power_low", 1.0 - 1e-6),
    LimitKind.POWER_HIGH_GAMMA_TO_1: ("power_high", 1.0 + 1e-6),
    LimitKind.POWER_LOW_GAMMA_TO_0: ("power_low", 1e-6),
}


def _normalize_family(family: str) -> str:
    name = {"exp": "exponential", "power-low": "power_low", "power-high": "power_high"}.get(family, family)
    if name not in SWEEP_FAMILIES:
        raise DomainError(f"sweep family must be one of {sorted(SWEEP_FAMILIES)}, got {family!r}")
    return name


class SensitivityEngine:
    def __init__(self, risk_engine: RiskEngine, max_workers: Optional[int] = None):
        """Initialize Sensitivity Engine

        Args:
            risk_engine: engine that evaluates single risk measures
            max_workers: worker cap for sweeps; None lets the executor decide
        """
        self.risk_engine = risk_engine
        self.max_workers = max_workers

    def sweep(self, dist: LossDistribution, family: str, params: Sequence[float],
              scheme: Optional[QuadratureScheme] = None) -> SweepCurve:
        """
        Evaluate the SRM of one spectrum family over ascending parameter values.

        Every spectrum is constructed (and validated) before any
        integration starts; results keep the order of `params`.
        """
        family = _normalize_family(family)
        scheme = scheme or self.risk_engine.scheme
        values = [float(p) for p in params]
        if not values:
            raise DomainError("sweep needs at least one parameter value")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise DomainError(f"sweep parameters must be strictly ascending, got {values}")
        spectra_list = [spectrum_for(family, p) for p in values]

        logger.info("Sweeping %s over %d values on %s (%s)", family, len(values), dist.label, scheme.label)
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            results = list(pool.map(lambda spec: self.risk_engine.srm(dist, spec, scheme).value, spectra_list))
        return SweepCurve(
            parameter_name=SWEEP_FAMILIES[family],
            points=tuple(zip(values, results)),
            scheme_echo=scheme,
        )

    def limit_check(self, dist: LossDistribution, which: LimitKind,
                    scheme: Optional[QuadratureScheme] = None) -> LimitCheck:
        """
        Evaluate an SRM next to one of its limiting parameter values.

        The reference is the distribution mean for the three mean limits
        (for Cauchy, whose mean does not exist, the unit-weight integral of
        q_p on the same scheme). For gamma -> 0 it is 0 on the reproduction
        grid and the essential supremum of the loss under ExactSlice.
        """
        which = LimitKind(which)
        scheme = scheme or self.risk_engine.scheme
        family, parameter = LIMIT_PROXIMITY[which]
        result = self.risk_engine.srm(dist, spectrum_for(family, parameter), scheme)
        note = None

        if which is LimitKind.POWER_LOW_GAMMA_TO_0:
            if scheme.mode is Mode.REPRO_GRID:
                reference = 0.0
                note = (
                    "zero limit of the truncated reproduction grid; under ExactSlice the "
                    "gamma -> 0 limit is the essential supremum of the loss instead"
                )
            else:
                reference = dist.support_upper
                note = (
                    "ExactSlice limit is the essential supremum of the loss, not 0; "
                    "the zero limit only holds for the truncated reproduction grid"
                )
        else:
            reference = dist.mean()
            if reference is UNDEFINED:
                flat = RiskSpectrum.es_step(0.0)
                reference = integrate_product(flat, dist, scheme).value
                note = "mean undefined; reference is the unit-weight integral of q_p on the same grid"

        return LimitCheck(which=which, parameter=parameter, limit_estimate=result.value,
                          reference=reference, scheme_echo=scheme, note=note, result=result)

    def srm_derivative(self, dist: LossDistribution, family: str, param: float,
                       h: Optional[float] = None, shift_c: float = 0.0,
                       scheme: Optional[QuadratureScheme] = None) -> DerivativeReport:
        """
        Central-difference derivative of the SRM with respect to its
        risk-aversion parameter, with and without a constant quantile shift.

        Args:
            dist: loss distribution
            family: exponential, power_low or power_high
            param: parameter value (k or gamma)
            h: step, defaults to 1e-4 * max(1, |param|)
            shift_c: constant added to every quantile for the shifted difference
            scheme: must be an ExactSlice scheme

        Returns:
            DerivativeReport
        """
        family = _normalize_family(family)
        scheme = scheme or self.risk_engine.scheme
        if scheme.mode is not Mode.EXACT_SLICE:
            raise ConfigurationError(
                "srm_derivative needs an ExactSlice scheme; reproduction-grid mass loss "
                "turns parameter derivatives into scheme artifacts"
            )
        step = h if h is not None else 1e-4 * max(1.0, abs(param))
        if not step > 0:
            raise DomainError(f"derivative step must be positive, got {step}")
        upper = spectrum_for(family, param + step)
        lower = spectrum_for(family, param - step)

        def central(target: LossDistribution) -> float:
            hi = self.risk_engine.srm(target, upper, scheme).value
            lo = self.risk_engine.srm(target, lower, scheme).value
            return (hi - lo) / (2.0 * step)

        plain = central(dist)
        shifted = central(dist.shifted(shift_c)) if shift_c else plain
        return DerivativeReport(parameter=float(param), step=step, central_difference=plain,
                                shifted_central_difference=shifted, shift=float(shift_c))
