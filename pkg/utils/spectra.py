"""
Risk Spectra
Weighting functions phi(p), their closed-form cumulative weights, admissibility checks,
and the exponential / power utility formulas they are built from
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Tuple, Union

import numpy as np

from utils.errors import DomainError, UnsupportedOperationError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class SpectrumKind(str, Enum):
    VAR_DIRAC = "var"
    ES_STEP = "es"
    EXPONENTIAL = "exponential"
    POWER_LOW = "power_low"
    POWER_HIGH = "power_high"


_PARAMETER_NAMES = {
    SpectrumKind.VAR_DIRAC: "alpha",
    SpectrumKind.ES_STEP: "alpha",
    SpectrumKind.EXPONENTIAL: "k",
    SpectrumKind.POWER_LOW: "gamma",
    SpectrumKind.POWER_HIGH: "gamma",
}


@dataclass(frozen=True)
class RiskSpectrum:
    """
    A risk-aversion weighting function over cumulative probability.

    The single parameter is alpha for VaR/ES, the absolute risk aversion k
    for the exponential spectrum and the relative risk aversion gamma for
    the two power spectra. The normalising constant is always derived.
    """

    kind: SpectrumKind
    parameter: float

    def __post_init__(self):
        value = self.parameter
        kind = self.kind
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise DomainError(f"{self.parameter_name} must be a finite real, got {value!r}")
        if kind is SpectrumKind.VAR_DIRAC and not 0.0 < value < 1.0:
            raise DomainError(f"VaR requires 0 < alpha < 1, got {value}")
        if kind is SpectrumKind.ES_STEP and not 0.0 <= value < 1.0:
            raise DomainError(f"ES requires 0 <= alpha < 1, got {value}")
        if kind is SpectrumKind.EXPONENTIAL and not value > 0.0:
            raise DomainError(f"exponential spectrum requires k > 0, got {value}")
        if kind in (SpectrumKind.POWER_LOW, SpectrumKind.POWER_HIGH) and value == 1.0:
            raise DomainError(
                "gamma = 1 is the near singular point of the power spectra; "
                "use gamma < 1 (power_low) or gamma > 1 (power_high)"
            )
        if kind is SpectrumKind.POWER_LOW and not 0.0 < value < 1.0:
            raise DomainError(f"power_low spectrum requires 0 < gamma < 1, got {value}")
        if kind is SpectrumKind.POWER_HIGH and not value > 1.0:
            raise DomainError(f"power_high spectrum requires gamma > 1, got {value}")

    @property
    def parameter_name(self) -> str:
        return _PARAMETER_NAMES[self.kind]

    @property
    def label(self) -> str:
        return f"{self.kind.value}({self.parameter_name}={self.parameter:g})"

    @property
    def normalization(self) -> float:
        """The constant lambda that makes the spectrum integrate to one"""
        kind, value = self.kind, self.parameter
        if kind is SpectrumKind.EXPONENTIAL:
            return value / -math.expm1(-value)
        if kind is SpectrumKind.POWER_LOW:
            return value * (1.0 - value)
        if kind is SpectrumKind.POWER_HIGH:
            return value
        if kind is SpectrumKind.ES_STEP:
            return 1.0 / (1.0 - value)
        raise UnsupportedOperationError("the VaR Dirac spectrum has no normalising density constant")

    # convenience constructors
    @classmethod
    def var_dirac(cls, alpha: float) -> "RiskSpectrum":
        return cls(SpectrumKind.VAR_DIRAC, float(alpha))

    @classmethod
    def es_step(cls, alpha: float) -> "RiskSpectrum":
        return cls(SpectrumKind.ES_STEP, float(alpha))

    @classmethod
    def exponential(cls, k: float) -> "RiskSpectrum":
        return cls(SpectrumKind.EXPONENTIAL, float(k))

    @classmethod
    def power_low(cls, gamma: float) -> "RiskSpectrum":
        return cls(SpectrumKind.POWER_LOW, float(gamma))

    @classmethod
    def power_high(cls, gamma: float) -> "RiskSpectrum":
        return cls(SpectrumKind.POWER_HIGH, float(gamma))


def spectrum_for(family: str, parameter: float) -> RiskSpectrum:
    """Build a spectrum from a family name such as 'exponential' or 'power_low'"""
    aliases = {"exp": "exponential", "power-low": "power_low", "power-high": "power_high"}
    name = aliases.get(family, family)
    try:
        kind = SpectrumKind(name)
    except ValueError:
        raise DomainError(f"Unknown spectrum family: {family}")
    return RiskSpectrum(kind, float(parameter))


@dataclass(frozen=True)
class AdmissibilityReport:
    nonnegativity_ok: bool
    normalization_residual: float
    strictly_increasing: bool
    weakly_increasing: bool

    @property
    def admissible(self) -> bool:
        """Nonnegative, normalised and non-decreasing"""
        return self.nonnegativity_ok and self.normalization_residual <= 1e-12 and self.weakly_increasing


def _probabilities(p: ArrayLike) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr >= 0.0) & (arr <= 1.0))):
        raise DomainError(f"probability must lie in [0, 1], got {p}")
    return arr


def _maybe_scalar(values: np.ndarray, original: ArrayLike):
    if np.ndim(original) == 0:
        return float(values)
    return values


def weight(spec: RiskSpectrum, p: ArrayLike):
    """
    Pointwise weight phi(p).

    PowerLow returns +inf at p = 1; quadrature decides what to do with it.

    Raises:
        UnsupportedOperationError: for the VaR Dirac spectrum, which has no
            pointwise density (use the engine's var operation)
    """
    arr = _probabilities(p)
    kind, value = spec.kind, spec.parameter
    if kind is SpectrumKind.VAR_DIRAC:
        raise UnsupportedOperationError(
            "the VaR spectrum is a Dirac delta with no pointwise weight; use RiskEngine.var"
        )
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if kind is SpectrumKind.EXPONENTIAL:
            out = spec.normalization * np.exp(-value * (1.0 - arr))
        elif kind is SpectrumKind.POWER_LOW:
            out = value * np.power(1.0 - arr, value - 1.0)
        elif kind is SpectrumKind.POWER_HIGH:
            out = value * np.power(arr, value - 1.0)
        else:
            out = np.where(arr >= value, 1.0 / (1.0 - value), 0.0)
    return _maybe_scalar(out, p)


def cumulative_weight(spec: RiskSpectrum, p: ArrayLike):
    """
    Closed-form cumulative weight Phi(p) = integral of phi over [0, p].

    Phi(0) = 0 and Phi(1) = 1 exactly for every kind.
    """
    arr = _probabilities(p)
    kind, value = spec.kind, spec.parameter
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        if kind is SpectrumKind.EXPONENTIAL:
            # exp(-k(1-p)) - exp(-k), rewritten to stay accurate as k -> 0
            out = np.exp(-value * (1.0 - arr)) * -np.expm1(-value * arr) / -math.expm1(-value)
        elif kind is SpectrumKind.POWER_LOW:
            out = -np.expm1(value * np.log1p(-arr))
        elif kind is SpectrumKind.POWER_HIGH:
            out = np.power(arr, value)
        elif kind is SpectrumKind.ES_STEP:
            out = np.maximum(0.0, arr - value) / (1.0 - value)
        else:
            out = np.where(arr >= value, 1.0, 0.0)
    return _maybe_scalar(out, p)


def check_admissibility(spec: RiskSpectrum, grid_points: int = 101) -> AdmissibilityReport:
    """
    Check nonnegativity, normalisation and increasingness of a spectrum.

    Args:
        spec: spectrum to check
        grid_points: number of evenly spaced interior points, at least 3

    Returns:
        AdmissibilityReport
    """
    if int(grid_points) != grid_points or grid_points < 3:
        raise DomainError(f"grid_points must be an integer >= 3, got {grid_points}")
    grid_points = int(grid_points)
    ends = cumulative_weight(spec, np.array([0.0, 1.0]))
    residual = float(abs((ends[1] - ends[0]) - 1.0))

    if spec.kind is SpectrumKind.VAR_DIRAC:
        # a point mass is not an increasing density
        return AdmissibilityReport(True, residual, False, False)

    grid = np.arange(1, grid_points + 1) / (grid_points + 1)
    values = weight(spec, grid)
    steps = np.diff(values)
    report = AdmissibilityReport(
        nonnegativity_ok=bool(np.all(values >= 0.0)),
        normalization_residual=residual,
        strictly_increasing=bool(np.all(steps > 0.0)),
        weakly_increasing=bool(np.all(steps >= 0.0)),
    )
    logger.debug("Admissibility of %s: %s", spec.label, report)
    return report


# ----------------------------------------------------------------------
# utility functions and risk-aversion coefficients
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class UtilityFamily:
    """Exponential utility with ARA k, or power (CRRA) utility with RRA gamma"""

    name: str
    parameter: float

    def __post_init__(self):
        if self.name not in ("exponential", "power"):
            raise DomainError(f"utility family must be 'exponential' or 'power', got {self.name!r}")
        if not (math.isfinite(self.parameter) and self.parameter > 0):
            raise DomainError(f"utility parameter must be a positive real, got {self.parameter}")

    @classmethod
    def exponential(cls, k: float) -> "UtilityFamily":
        return cls("exponential", float(k))

    @classmethod
    def power(cls, gamma: float) -> "UtilityFamily":
        return cls("power", float(gamma))


def utility(family: UtilityFamily, x: float) -> float:
    """
    Utility of outcome x.

    Exponential: -exp(-k x). Power: (x^(1-gamma) - 1)/(1 - gamma), or
    ln(x) when gamma = 1; requires x > 0.
    """
    if family.name == "exponential":
        return -math.exp(-family.parameter * x)
    if not x > 0:
        raise DomainError(f"power utility requires x > 0, got {x}")
    gamma = family.parameter
    if gamma == 1.0:
        return math.log(x)
    return (x ** (1.0 - gamma) - 1.0) / (1.0 - gamma)


def risk_aversion(family: UtilityFamily, x: float) -> Tuple[float, float]:
    """
    Arrow-Pratt coefficients of absolute and relative risk aversion at x.

    Returns:
        (absolute, relative)
    """
    if not x > 0:
        raise DomainError(f"risk aversion coefficients require x > 0, got {x}")
    if family.name == "exponential":
        k = family.parameter
        return k, x * k
    gamma = family.parameter
    return gamma / x, gamma
