"""
Run Configuration
Environment settings, the flat key=value config file and the validated RunConfig model
"""
import logging
import os
from pathlib import Path
from typing import Dict, List, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from utils.distributions import LossDistribution, by_name
from utils.errors import InputValidationError, SRMError
from utils.quadrature import Mode, QuadratureScheme, Rule
from utils.spectra import RiskSpectrum, spectrum_for

logger = logging.getLogger(__name__)

COMMANDS = ("compute", "table", "figure", "sweep", "check", "empirical", "history")

# spectrum name -> the config key holding its parameter
SPECTRUM_PARAMETER_KEYS = {
    "exp": "k",
    "exponential": "k",
    "power-low": "gamma",
    "power_low": "gamma",
    "power-high": "gamma",
    "power_high": "gamma",
    "es": "alpha",
    "var": "alpha",
}


def _flag(key: str) -> str:
    return key.replace("_", "-")


def _as_validation_error(e: ValidationError) -> InputValidationError:
    first = e.errors()[0]
    name = _flag(str(first["loc"][0])) if first["loc"] else "config"
    return InputValidationError(f"invalid value for '{name}': {first['msg']}", key=name)


class Settings(BaseModel):
    """Process-wide settings read from SRM_* environment variables"""

    model_config = ConfigDict(extra="ignore", frozen=True)

    num_threads: int = Field(default=0, ge=0)
    log_level: str = "WARNING"
    ledger_path: Optional[str] = None

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.strip().upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown logging level {value!r}")
        return level

    @property
    def workers(self) -> int:
        """Worker cap for parallel sweeps, tables and batches (0 means auto)"""
        return self.num_threads or min(8, os.cpu_count() or 1)


def load_settings(environ: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Read SRM_NUM_THREADS, SRM_LOG_LEVEL and SRM_LEDGER_PATH.

    Call after load_dotenv() so values from a .env file are visible.
    """
    environ = os.environ if environ is None else environ
    raw = {}
    for field in ("num_threads", "log_level", "ledger_path"):
        value = environ.get(f"SRM_{field.upper()}")
        if value not in (None, ""):
            raw[field] = value.strip()
    try:
        return Settings.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        key = f"SRM_{str(first['loc'][0]).upper()}"
        raise InputValidationError(f"invalid value for '{key}': {first['msg']}", key=key)


def parse_config_file(path: str) -> Dict[str, str]:
    """
    Parse a flat `key = value` config file.

    '#' starts a comment, blank lines are skipped and '-' / '_' are
    interchangeable in keys. Values stay strings; RunConfig coerces them.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise InputValidationError(f"cannot read config file {path}: {e}", key="config")

    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputValidationError(f"{path}:{number}: expected 'key = value', got {raw.strip()!r}",
                                       key="config", line=number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise InputValidationError(f"{path}:{number}: missing key before '='", key="config", line=number)
        values[key.replace("-", "_")] = value
    logger.debug("Read %d key(s) from %s", len(values), path)
    return values


class RunConfig(BaseModel):
    """One CLI invocation: command, distribution, spectrum, scheme and output options"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Literal["compute", "table", "figure", "sweep", "check", "empirical", "history"]

    dist: str = "normal"
    beta_a: float = Field(default=2.0, gt=0)
    beta_b: float = Field(default=4.0, gt=0)
    loc: float = 0.0
    scale: float = Field(default=1.0, gt=0)

    spectrum: Optional[str] = None
    alpha: Optional[float] = Field(default=None, ge=0, lt=1)
    k: Optional[float] = Field(default=None, gt=0)
    gamma: Optional[float] = Field(default=None, gt=0)

    rule: Rule = Rule.TRAPEZOID
    n: int = Field(default=100_000, ge=1)
    mode: Mode = Mode.EXACT_SLICE
    h_top: float = Field(default=1e-4, gt=0, lt=0.5)

    out: Optional[str] = None
    format: Literal["csv", "tsv", "pretty"] = "csv"
    precision: Literal["table", "full"] = "table"

    id: Optional[int] = Field(default=None, ge=1, le=6)
    family: Optional[str] = None
    params: Optional[List[float]] = None
    input: Optional[str] = None
    limit: int = Field(default=20, ge=1)

    verbose: bool = False
    ledger: Optional[str] = None

    @field_validator("params", mode="before")
    @classmethod
    def _split_params(cls, value):
        if isinstance(value, str):
            parts = [part.strip() for part in value.split(",")]
            if not all(parts):
                raise ValueError("expected a comma separated list of numbers")
            return parts
        return value

    @field_validator("gamma")
    @classmethod
    def _not_singular(cls, value):
        if value == 1.0:
            raise ValueError("gamma = 1 is the near singular point of the power spectra")
        return value

    @field_validator("dist", "spectrum", "family")
    @classmethod
    def _lowercase(cls, value):
        return value.strip().lower() if isinstance(value, str) else value

    # ------------------------------------------------------------------
    # builders; each names the offending key on failure
    # ------------------------------------------------------------------
    def scheme(self) -> QuadratureScheme:
        try:
            return QuadratureScheme(rule=self.rule, intervals=self.n, mode=self.mode, top_truncation=self.h_top)
        except SRMError as e:
            key = "n" if "intervals" in str(e) or "Simpson" in str(e) else "h-top"
            raise InputValidationError(f"invalid value for '{key}': {e}", key=key)

    def spectrum_spec(self) -> RiskSpectrum:
        if self.spectrum is None:
            raise InputValidationError(f"'{self.command}' needs --spectrum", key="spectrum")
        key = SPECTRUM_PARAMETER_KEYS.get(self.spectrum)
        if key is None:
            raise InputValidationError(
                f"invalid value for 'spectrum': {self.spectrum!r} is not one of exp, power-low, power-high, es, var",
                key="spectrum",
            )
        value = getattr(self, key)
        if value is None:
            raise InputValidationError(f"spectrum {self.spectrum} needs --{key}", key=key)
        try:
            return spectrum_for(self.spectrum, value)
        except SRMError as e:
            raise InputValidationError(f"invalid value for '{key}': {e}", key=key)

    def distribution(self) -> LossDistribution:
        try:
            return by_name(self.dist, shape_a=self.beta_a, shape_b=self.beta_b, loc=self.loc, scale=self.scale)
        except SRMError as e:
            raise InputValidationError(f"invalid value for 'dist': {e}", key="dist")

    def validate_for_command(self) -> "RunConfig":
        """Cross-field checks that must pass before any computation starts"""
        if self.command == "compute":
            self.distribution()
            self.spectrum_spec()
            self.scheme()
        elif self.command == "empirical":
            if not self.input:
                raise InputValidationError("'empirical' needs --input", key="input")
            self.spectrum_spec()
        elif self.command == "table":
            if self.id is None or self.id > 3:
                raise InputValidationError("invalid value for 'id': table id must be 1, 2 or 3", key="id")
        elif self.command == "figure":
            if self.id is None:
                raise InputValidationError("invalid value for 'id': figure id must be between 1 and 6", key="id")
        elif self.command == "sweep":
            if self.family is None:
                raise InputValidationError("'sweep' needs --family", key="family")
            if not self.params:
                raise InputValidationError("'sweep' needs --params", key="params")
            if any(b <= a for a, b in zip(self.params, self.params[1:])):
                raise InputValidationError("invalid value for 'params': values must be strictly ascending",
                                           key="params")
            self.distribution()
            self.scheme()
            try:
                for value in self.params:
                    spectrum_for(self.family, value)
            except SRMError as e:
                raise InputValidationError(f"invalid value for 'params': {e}", key="params")
        return self

    def canonical(self) -> Dict[str, object]:
        """Plain dict of the non-default settings, for the run ledger"""
        return self.model_dump(mode="json", exclude_defaults=True)


def build_run_config(values: Mapping[str, object]) -> RunConfig:
    """Validate merged file and flag values into a RunConfig"""
    try:
        config = RunConfig.model_validate(dict(values))
    except ValidationError as e:
        raise _as_validation_error(e)
    return config.validate_for_command()
