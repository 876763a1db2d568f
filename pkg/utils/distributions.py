"""
Loss Distributions
Quantile functions, CDFs and means for the analytic loss families and for empirical samples
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from utils.errors import DomainError, InputValidationError, UnsupportedOperationError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

# Empirical step rule x_(ceil(p*n)) shrinks p*n by a few ulps so that p = i/n
# lands on the i-th order statistic despite rounding; the shrink is relative so
# any p strictly above i/n still moves to the next order statistic.
_STEP_SHRINK = 1.0 - 4.0 * np.finfo(float).eps


class Family(str, Enum):
    STANDARD_NORMAL = "normal"
    CAUCHY = "cauchy"
    STANDARD_UNIFORM = "uniform"
    BETA = "beta"
    GUMBEL_MIN = "gumbel"
    EMPIRICAL = "empirical"


class Undefined:
    """Marker for a moment that does not exist (e.g. the Cauchy mean)"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "undefined"

    def __bool__(self) -> bool:
        return False


UNDEFINED = Undefined()


@dataclass(frozen=True)
class LossDistribution:
    """
    A loss quantile function q_p with its metadata.

    Analytic families are standardized and then mapped through
    q_p = loc + scale * q0_p. Empirical samples are stored as an
    ascending tuple of finite losses.
    """

    family: Family
    shape_a: Optional[float] = None
    shape_b: Optional[float] = None
    losses: Optional[Tuple[float, ...]] = None
    loc: float = 0.0
    scale: float = 1.0
    _sorted: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.loc) and math.isfinite(self.scale) and self.scale > 0):
            raise DomainError(f"loc must be finite and scale positive, got loc={self.loc}, scale={self.scale}")

        if self.family is Family.BETA:
            for name, value in (("alpha", self.shape_a), ("beta", self.shape_b)):
                if value is None or not math.isfinite(value) or value <= 0:
                    raise DomainError(f"Beta shape parameter {name} must be a positive real, got {value}")

        if self.family is Family.EMPIRICAL:
            if not self.losses:
                raise InputValidationError("Empirical distribution needs at least one loss")
            arr = np.asarray(self.losses, dtype=float)
            if not np.all(np.isfinite(arr)):
                raise InputValidationError("Empirical losses must all be finite")
            if np.any(np.diff(arr) < 0):
                raise InputValidationError("Empirical losses must be sorted ascending")
            arr.setflags(write=False)
            object.__setattr__(self, "_sorted", arr)

    # ------------------------------------------------------------------
    # descriptive helpers
    # ------------------------------------------------------------------
    @property
    def label(self) -> str:
        """Short column label used in tables and figure files"""
        if self.family is Family.BETA:
            base = f"beta({_fmt(self.shape_a)},{_fmt(self.shape_b)})"
        elif self.family is Family.EMPIRICAL:
            base = f"empirical(n={len(self.losses)})"
        else:
            base = self.family.value
        if self.loc != 0.0 or self.scale != 1.0:
            base += f"[loc={_fmt(self.loc)},scale={_fmt(self.scale)}]"
        return base

    @property
    def is_heavy_tailed(self) -> bool:
        return self.family is Family.CAUCHY

    @property
    def sample_size(self) -> int:
        if self.family is not Family.EMPIRICAL:
            raise UnsupportedOperationError("sample_size is only defined for Empirical distributions")
        return len(self.losses)

    @property
    def order_statistics(self) -> np.ndarray:
        """Ascending losses after location/scale (Empirical only)"""
        if self.family is not Family.EMPIRICAL:
            raise UnsupportedOperationError("order statistics are only defined for Empirical distributions")
        return self.loc + self.scale * self._sorted

    @property
    def support_lower(self) -> float:
        return self.loc + self.scale * _standard_support(self)[0]

    @property
    def support_upper(self) -> float:
        return self.loc + self.scale * _standard_support(self)[1]

    def shifted(self, c: float) -> "LossDistribution":
        """Distribution whose every quantile is moved by c"""
        return replace(self, loc=self.loc + c)

    def scaled(self, s: float) -> "LossDistribution":
        """Distribution whose every quantile is multiplied by s > 0"""
        if not s > 0:
            raise DomainError(f"scale factor must be positive, got {s}")
        return replace(self, loc=self.loc * s, scale=self.scale * s)

    # ------------------------------------------------------------------
    # operations
    # ------------------------------------------------------------------
    def quantile(self, p: ArrayLike):
        """
        Loss quantile q_p for p strictly inside (0, 1).

        Args:
            p: probability or array of probabilities

        Returns:
            float for scalar input, ndarray otherwise
        """
        arr = np.asarray(p, dtype=float)
        if np.any(~((arr > 0.0) & (arr < 1.0))):
            raise DomainError(f"quantile requires 0 < p < 1, got {p}")
        return _maybe_scalar(self.quantile_values(arr), p)

    def quantile_values(self, p: ArrayLike) -> np.ndarray:
        """
        Vectorised quantile on the closed interval [0, 1].

        p = 0 and p = 1 map to the support bounds, which are infinite for
        the normal, Cauchy and Gumbel families. Used by the quadrature
        module, which decides how to treat non-finite nodes.
        """
        arr = np.asarray(p, dtype=float)
        if np.any(~((arr >= 0.0) & (arr <= 1.0))):
            raise DomainError(f"quantile_values requires 0 <= p <= 1, got {p}")
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            base = _standard_quantile(self, arr)
        return self.loc + self.scale * base

    def cdf(self, x: ArrayLike):
        """Loss CDF F(x) for the analytic families"""
        if self.family is Family.EMPIRICAL:
            raise UnsupportedOperationError("cdf is not provided for Empirical distributions")
        z = (np.asarray(x, dtype=float) - self.loc) / self.scale
        family = self.family
        if family is Family.STANDARD_NORMAL:
            out = special.ndtr(z)
        elif family is Family.CAUCHY:
            out = 0.5 + np.arctan(z) / np.pi
        elif family is Family.STANDARD_UNIFORM:
            out = np.clip(z, 0.0, 1.0)
        elif family is Family.BETA:
            out = special.betainc(self.shape_a, self.shape_b, np.clip(z, 0.0, 1.0))
        else:
            # minimum-convention Gumbel: F(x) = 1 - exp(-exp(x))
            with np.errstate(over="ignore"):
                out = -np.expm1(-np.exp(z))
        return _maybe_scalar(out, x)

    def mean(self) -> Union[float, Undefined]:
        """Mean loss, or UNDEFINED when it does not exist"""
        family = self.family
        if family is Family.CAUCHY:
            return UNDEFINED
        if family is Family.EMPIRICAL:
            return float(np.mean(self.order_statistics))
        if family is Family.STANDARD_NORMAL:
            base = 0.0
        elif family is Family.STANDARD_UNIFORM:
            base = 0.5
        elif family is Family.BETA:
            base = self.shape_a / (self.shape_a + self.shape_b)
        else:
            base = -float(np.euler_gamma)
        return self.loc + self.scale * base


def _fmt(value: float) -> str:
    return f"{value:g}"


def _maybe_scalar(values: np.ndarray, original: ArrayLike):
    if np.ndim(original) == 0:
        return float(values)
    return values


def _standard_support(dist: LossDistribution) -> Tuple[float, float]:
    family = dist.family
    if family in (Family.STANDARD_UNIFORM, Family.BETA):
        return 0.0, 1.0
    if family is Family.EMPIRICAL:
        return float(dist._sorted[0]), float(dist._sorted[-1])
    return -math.inf, math.inf


def _standard_quantile(dist: LossDistribution, p: np.ndarray) -> np.ndarray:
    family = dist.family
    if family is Family.STANDARD_NORMAL:
        return special.ndtri(p)
    if family is Family.CAUCHY:
        core = np.tan(np.pi * (p - 0.5))
        return np.where(p == 0.0, -np.inf, np.where(p == 1.0, np.inf, core))
    if family is Family.STANDARD_UNIFORM:
        return p.copy()
    if family is Family.BETA:
        return special.betaincinv(dist.shape_a, dist.shape_b, p)
    if family is Family.GUMBEL_MIN:
        return np.log(-np.log1p(-p))
    losses = dist._sorted
    n = losses.size
    index = np.clip(np.ceil(p * n * _STEP_SHRINK), 1, n).astype(np.int64)
    return losses[index - 1]


# ----------------------------------------------------------------------
# constructors
# ----------------------------------------------------------------------
def standard_normal(loc: float = 0.0, scale: float = 1.0) -> LossDistribution:
    return LossDistribution(Family.STANDARD_NORMAL, loc=loc, scale=scale)


def cauchy(loc: float = 0.0, scale: float = 1.0) -> LossDistribution:
    return LossDistribution(Family.CAUCHY, loc=loc, scale=scale)


def standard_uniform(loc: float = 0.0, scale: float = 1.0) -> LossDistribution:
    return LossDistribution(Family.STANDARD_UNIFORM, loc=loc, scale=scale)


def beta(alpha: float, beta_: float, loc: float = 0.0, scale: float = 1.0) -> LossDistribution:
    return LossDistribution(Family.BETA, shape_a=float(alpha), shape_b=float(beta_), loc=loc, scale=scale)


def gumbel_min(loc: float = 0.0, scale: float = 1.0) -> LossDistribution:
    return LossDistribution(Family.GUMBEL_MIN, loc=loc, scale=scale)


def from_samples(losses: Sequence[float]) -> LossDistribution:
    """
    Build an Empirical distribution from raw losses.

    Args:
        losses: nonempty sequence of finite reals, any order

    Returns:
        Empirical LossDistribution holding an ascending-sorted copy
    """
    try:
        arr = np.asarray(list(losses), dtype=float).ravel()
    except (TypeError, ValueError) as e:
        raise InputValidationError(f"losses must be real numbers: {e}")
    if arr.size == 0:
        raise InputValidationError("losses must be nonempty")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise InputValidationError(f"losses must be finite; element {bad} is {arr[bad]}")
    logger.debug("Empirical distribution from %d losses", arr.size)
    return LossDistribution(Family.EMPIRICAL, losses=tuple(np.sort(arr).tolist()))


def by_name(name: str, shape_a: float = 2.0, shape_b: float = 4.0,
            loc: float = 0.0, scale: float = 1.0) -> LossDistribution:
    """Analytic distribution from its CLI name"""
    try:
        family = Family(name)
    except ValueError:
        raise DomainError(f"Unknown distribution family: {name}")
    if family is Family.EMPIRICAL:
        raise DomainError("Empirical distributions are built from samples, not by name")
    if family is Family.BETA:
        return beta(shape_a, shape_b, loc=loc, scale=scale)
    return LossDistribution(family, loc=loc, scale=scale)


# The five illustrative loss distributions, in table column order.
REFERENCE_DISTRIBUTIONS: Tuple[LossDistribution, ...] = (
    standard_normal(),
    cauchy(),
    standard_uniform(),
    beta(2.0, 4.0),
    gumbel_min(),
)
