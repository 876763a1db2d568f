"""
Engine Results
Value objects returned by the risk, sensitivity and coherence engines
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

from utils.distributions import Undefined
from utils.quadrature import IntegralDiagnostics, QuadratureScheme
from utils.spectra import RiskSpectrum


@dataclass(frozen=True)
class ExactDiagnostics:
    """Diagnostics for values obtained without quadrature (VaR lookups, order-statistic sums)"""

    method: str
    captured_mass: float = 1.0


@dataclass(frozen=True)
class RiskMeasureResult:
    value: float
    spectrum_echo: RiskSpectrum
    diagnostics: Union[IntegralDiagnostics, ExactDiagnostics]
    warnings: Tuple[str, ...] = ()

    @property
    def captured_mass(self) -> float:
        return self.diagnostics.captured_mass

    @property
    def is_exact(self) -> bool:
        return isinstance(self.diagnostics, ExactDiagnostics)


@dataclass(frozen=True)
class SweepCurve:
    parameter_name: str
    points: Tuple[Tuple[float, float], ...]
    scheme_echo: QuadratureScheme

    @property
    def parameters(self) -> Tuple[float, ...]:
        return tuple(p for p, _ in self.points)

    @property
    def values(self) -> Tuple[float, ...]:
        return tuple(v for _, v in self.points)


class LimitKind(str, Enum):
    EXP_K_TO_0 = "exp_k_to_0"
    POWER_LOW_GAMMA_TO_1 = "power_low_gamma_to_1"
    POWER_HIGH_GAMMA_TO_1 = "power_high_gamma_to_1"
    POWER_LOW_GAMMA_TO_0 = "power_low_gamma_to_0"


@dataclass(frozen=True)
class LimitCheck:
    which: LimitKind
    parameter: float
    limit_estimate: float
    reference: Union[float, Undefined]
    scheme_echo: QuadratureScheme
    note: Optional[str] = None
    result: Optional[RiskMeasureResult] = None

    @property
    def gap(self) -> Optional[float]:
        if isinstance(self.reference, Undefined):
            return None
        return abs(self.limit_estimate - self.reference)


@dataclass(frozen=True)
class DerivativeReport:
    parameter: float
    step: float
    central_difference: float
    shifted_central_difference: float
    shift: float

    @property
    def shift_discrepancy(self) -> float:
        return abs(self.shifted_central_difference - self.central_difference)


@dataclass(frozen=True)
class SubadditivityResult:
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class PropertyVerdict:
    name: str
    passed: bool
    detail: str = ""
    notes: Tuple[str, ...] = field(default=())
