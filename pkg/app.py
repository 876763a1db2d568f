"""
Spectral Risk Lab - command line
Computes spectral risk measures, rebuilds the published tables and figure data, and runs the property suite
"""
import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from dotenv import load_dotenv

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from engine.coherence_checker import CoherenceChecker
from engine.property_suite import PropertySuite
from engine.report_builder import ReportBuilder
from engine.results import RiskMeasureResult
from engine.risk_engine import RiskEngine
from engine.sensitivity_engine import SensitivityEngine
from utils.config import RunConfig, Settings, build_run_config, load_settings, parse_config_file
from utils.errors import InputValidationError, SRMError
from utils.formatting import HEAVY_TAIL_COMMENT, format_number, render_rows
from utils.ledger import RunLedger
from utils.logger import configure_logging
from utils.loss_file import load_losses
from utils.quadrature import IntegralDiagnostics, QuadratureScheme

logger = logging.getLogger(__name__)

SRM_DECIMALS = 3

# Empirical samples are summed exactly over their order statistics.
EMPIRICAL_SCHEME = QuadratureScheme.exact(1)


@dataclass
class Outcome:
    text: str
    exit_code: int = 0


@dataclass
class Engines:
    risk: RiskEngine
    sensitivity: SensitivityEngine
    coherence: CoherenceChecker
    reports: ReportBuilder

    @classmethod
    def build(cls, scheme: QuadratureScheme, workers: int) -> "Engines":
        risk = RiskEngine(scheme)
        sensitivity = SensitivityEngine(risk, workers)
        return cls(risk, sensitivity, CoherenceChecker(risk, workers), ReportBuilder(risk, sensitivity, workers))


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="flat key = value file; flags override its values")
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--format", choices=["csv", "tsv", "pretty"])
    common.add_argument("--precision", choices=["table", "full"])
    common.add_argument("--ledger", help="SQLite run ledger (overrides SRM_LEDGER_PATH)")
    common.add_argument("--verbose", action="store_true", help="log at INFO")

    distribution = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    distribution.add_argument("--dist", help="normal, cauchy, uniform, beta or gumbel")
    distribution.add_argument("--beta-a", type=float, dest="beta_a")
    distribution.add_argument("--beta-b", type=float, dest="beta_b")
    distribution.add_argument("--loc", type=float)
    distribution.add_argument("--scale", type=float)

    spectrum = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    spectrum.add_argument("--spectrum", help="exp, power-low, power-high, es or var")
    spectrum.add_argument("--alpha", type=float)
    spectrum.add_argument("--k", type=float)
    spectrum.add_argument("--gamma", type=float)

    scheme = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    scheme.add_argument("--rule", choices=["trapezoid", "simpson"])
    scheme.add_argument("--n", type=int, help="number of intervals")
    scheme.add_argument("--mode", choices=["repro", "exact"])
    scheme.add_argument("--h-top", type=float, dest="h_top", help="cut applied at each end of the reproduction grid")

    parser = argparse.ArgumentParser(prog="app.py", description="Spectral risk measures from the command line")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("compute", parents=[common, distribution, spectrum, scheme],
                        help="one SRM, VaR or ES on an analytic distribution")
    table = commands.add_parser("table", parents=[common], help="rebuild table 1, 2 or 3")
    table.add_argument("--id", type=int, default=argparse.SUPPRESS)
    figure = commands.add_parser("figure", parents=[common], help="data behind figure 1-6")
    figure.add_argument("--id", type=int, default=argparse.SUPPRESS)
    sweep = commands.add_parser("sweep", parents=[common, distribution, scheme], help="SRM over a parameter grid")
    sweep.add_argument("--family", default=argparse.SUPPRESS, help="exp, power-low or power-high")
    sweep.add_argument("--params", default=argparse.SUPPRESS, help="comma separated ascending values")
    commands.add_parser("check", parents=[common], help="run the property suite")
    empirical = commands.add_parser("empirical", parents=[common, spectrum], help="SRM of a loss file")
    empirical.add_argument("--input", default=argparse.SUPPRESS, help="one loss per line, optional header")
    history = commands.add_parser("history", parents=[common], help="list runs recorded in the ledger")
    history.add_argument("--limit", type=int, default=argparse.SUPPRESS)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file values first, command-line flags on top"""
    flags = vars(args).copy()
    values: Dict[str, object] = {}
    config_path = flags.pop("config", None)
    if config_path:
        values.update(parse_config_file(config_path))
    values.update(flags)
    return build_run_config(values)


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------
def _result_cells(result: RiskMeasureResult, precision: str) -> List[str]:
    diagnostics = result.diagnostics
    if isinstance(diagnostics, IntegralDiagnostics):
        scheme = diagnostics.scheme_echo
        method = [scheme.mode.value, scheme.rule.value, str(scheme.intervals)]
    else:
        method = [diagnostics.method, "", ""]
    return method + [
        format_number(result.value, precision, SRM_DECIMALS),
        format_number(result.captured_mass, precision),
        "; ".join(result.warnings),
    ]


def run_compute(config: RunConfig, engines: Engines) -> Outcome:
    dist = config.distribution()
    result = engines.risk.measure(dist, config.spectrum_spec(), config.scheme())
    header = ["distribution", "spectrum", "mode", "rule", "intervals", "value", "captured_mass", "warnings"]
    row = [dist.label, result.spectrum_echo.label] + _result_cells(result, config.precision)
    comments = [HEAVY_TAIL_COMMENT if dist.is_heavy_tailed else None]
    return Outcome(render_rows(header, [row], config.format, comments))


def run_empirical(config: RunConfig, engines: Engines) -> Outcome:
    """Sample size, spectrum echo and the exact order-statistic SRM of a loss file"""
    spec = config.spectrum_spec()
    dist = load_losses(config.input)
    result = engines.risk.measure(dist, spec, EMPIRICAL_SCHEME)
    header = ["sample_size", "spectrum", "method", "value", "captured_mass", "warnings"]
    cells = _result_cells(result, config.precision)
    method = result.diagnostics.method if result.is_exact else cells[0]
    row = [str(dist.sample_size), spec.label, method] + cells[3:]
    return Outcome(render_rows(header, [row], config.format))


def run_table(config: RunConfig, engines: Engines) -> Outcome:
    table = engines.reports.make_table(config.id)
    header = [table.parameter_name] + list(table.column_labels)
    rows = [[label] + [format_number(cell.value, config.precision, SRM_DECIMALS) for cell in cells]
            for label, cells in zip(table.row_labels, table.cells)]
    comments = [HEAVY_TAIL_COMMENT] * len(rows)
    return Outcome(render_rows(header, rows, config.format, comments))


def run_figure(config: RunConfig, engines: Engines) -> Outcome:
    figure = engines.reports.figure_data(config.id)
    rows = [[format_number(x, config.precision) for x in row] for row in figure.rows]
    return Outcome(render_rows(figure.columns, rows, config.format))


def run_sweep(config: RunConfig, engines: Engines) -> Outcome:
    curve = engines.sensitivity.sweep(config.distribution(), config.family, config.params, config.scheme())
    rows = [[format_number(p, config.precision), format_number(v, config.precision, SRM_DECIMALS)]
            for p, v in curve.points]
    return Outcome(render_rows([curve.parameter_name, "value"], rows, config.format))


def run_check(config: RunConfig, engines: Engines) -> Outcome:
    """One verdict line per property; exit code 1 if any fails"""
    suite = PropertySuite(engines.risk, engines.sensitivity, engines.coherence, engines.reports)
    verdicts = suite.run()
    lines = []
    for verdict in verdicts:
        lines.append(f"{'PASS' if verdict.passed else 'FAIL'} {verdict.name}: {verdict.detail}")
        lines.extend(f"    note: {note}" for note in verdict.notes)
    failed = sum(not v.passed for v in verdicts)
    lines.append(f"{len(verdicts) - failed} passed, {failed} failed")
    return Outcome("\n".join(lines) + "\n", exit_code=1 if failed else 0)


def run_history(config: RunConfig, ledger_path: Optional[str]) -> Outcome:
    if not ledger_path:
        raise InputValidationError("'history' needs --ledger or SRM_LEDGER_PATH", key="ledger")
    runs = RunLedger(ledger_path).get_runs(limit=config.limit)
    header = ["id", "command", "recorded_at", "output_sha256", "config"]
    rows = [[str(r["id"]), r["command"], r["recorded_at"], r["output_sha256"],
             json.dumps(r["config"], sort_keys=True, separators=(",", ":"))] for r in runs]
    return Outcome(render_rows(header, rows, config.format))


HANDLERS = {
    "compute": run_compute,
    "empirical": run_empirical,
    "table": run_table,
    "figure": run_figure,
    "sweep": run_sweep,
    "check": run_check,
}


# ----------------------------------------------------------------------
# output
# ----------------------------------------------------------------------
def write_atomic(path: str, data: bytes) -> None:
    """Write-then-rename so readers never see a partial file"""
    target = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    except OSError as e:
        raise InputValidationError(f"cannot write output {path}: {e}", key="out")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, target)
    except OSError as e:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise InputValidationError(f"cannot write output {path}: {e}", key="out")


def _record(ledger_path: Optional[str], config: RunConfig, data: bytes) -> None:
    if not ledger_path:
        return
    try:
        RunLedger(ledger_path).record_run(config.command, config.canonical(), data)
    except Exception as e:
        logger.warning("Could not record run in ledger %s: %s", ledger_path, e)


def execute(config: RunConfig, settings: Settings) -> int:
    ledger_path = config.ledger or settings.ledger_path
    if config.command == "history":
        outcome = run_history(config, ledger_path)
    else:
        engines = Engines.build(config.scheme(), settings.workers)
        outcome = HANDLERS[config.command](config, engines)

    data = outcome.text.encode("utf-8")
    if config.out:
        write_atomic(config.out, data)
    else:
        sys.stdout.write(outcome.text)
        sys.stdout.flush()
    if config.command != "history" and outcome.exit_code == 0:
        _record(ledger_path, config, data)
    return outcome.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse, validate, run; returns the process exit code"""
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = load_settings()
        config = resolve_config(args)
        configure_logging(settings.log_level, config.verbose)
        return execute(config, settings)
    except SRMError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
