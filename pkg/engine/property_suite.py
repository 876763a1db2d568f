"""
Property Suite
Executable acceptance checks: table reproduction, closed-form oracles, limits, coherence properties,
curve shapes and derivative identities. Backs the CLI `check` command.
"""
import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from engine.coherence_checker import CoherenceChecker
from engine.report_builder import COLUMN_LABELS, LIMIT_ROW_ONE, LIMIT_ROW_ZERO, ReportBuilder
from engine.results import LimitKind, PropertyVerdict
from engine.risk_engine import RiskEngine
from engine.sensitivity_engine import SensitivityEngine
from utils import spectra
from utils.distributions import (
    REFERENCE_DISTRIBUTIONS,
    UNDEFINED,
    from_samples,
    standard_normal,
    standard_uniform,
)
from utils.quadrature import QuadratureScheme, integrate_product
from utils.spectra import RiskSpectrum

logger = logging.getLogger(__name__)

SEED = 20080418

# absolute tolerance for non-Cauchy cells, per table
TABLE_TOLERANCE = {1: 0.005, 2: 0.01, 3: 0.005}
CAUCHY_RELATIVE_TOLERANCE = 0.05

DERIVATIVE_NOTE = (
    "normalisation forces the integral of d(phi)/d(theta) over [0,1] to vanish, so a constant "
    "quantile shift cannot change dM/d(theta) and no sign flip under a shift is expected"
)
CAUCHY_NOTE = "Cauchy cells depend on where the grid is cut at both ends (h and 1-h)"
GRID_CUT = 1e-4


def truncated_uniform_exponential(k: float, bottom: float, top: float) -> float:
    """Closed form of the exponential SRM of U(0,1) integrated over [bottom, top]"""
    lam = k / -math.expm1(-k)

    def antiderivative(p: float) -> float:
        return lam * math.exp(-k * (1.0 - p)) * (p / k - 1.0 / k ** 2)

    return antiderivative(top) - antiderivative(bottom)


def truncated_uniform_power_high(gamma: float, bottom: float, top: float) -> float:
    """Closed form of the gamma > 1 power SRM of U(0,1) integrated over [bottom, top]"""
    return gamma / (gamma + 1.0) * (top ** (gamma + 1.0) - bottom ** (gamma + 1.0))


class PropertySuite:
    def __init__(self, risk_engine: RiskEngine, sensitivity: SensitivityEngine,
                 coherence: CoherenceChecker, reports: ReportBuilder, seed: int = SEED):
        """Initialize Property Suite with the engines it exercises"""
        self.risk_engine = risk_engine
        self.sensitivity = sensitivity
        self.coherence = coherence
        self.reports = reports
        self.seed = seed
        self.exact = QuadratureScheme.exact()

    def checks(self) -> List[Callable[[], PropertyVerdict]]:
        return [
            lambda: self.table_reproduction(1),
            lambda: self.table_reproduction(2),
            lambda: self.table_reproduction(3),
            self.closed_form_oracles,
            self.limit_properties,
            self.spectrum_admissibility,
            self.density_consistency,
            self.translation_exact_slice,
            self.translation_repro_grid,
            self.positive_homogeneity,
            self.comonotone_additivity,
            self.var_exactness,
            self.es_equivalence,
            self.quantile_monotonicity_and_round_trip,
            self.simpson_order,
            self.subadditivity,
            self.srm_monotonicity,
            self.exponential_sweep_increasing,
            self.power_low_sweep_peaks,
            self.power_high_sweep_concave,
            self.power_high_curvature,
            self.spectrum_figure_shapes,
            self.derivative_identities,
        ]

    def run(self) -> List[PropertyVerdict]:
        """Run every check; a check that raises is reported as a failure"""
        verdicts = []
        for check in self.checks():
            try:
                verdict = check()
            except Exception as e:
                name = getattr(check, "__name__", "check")
                verdict = PropertyVerdict(name=name, passed=False, detail=f"{type(e).__name__}: {e}")
            logger.info("%s %s", "PASS" if verdict.passed else "FAIL", verdict.name)
            verdicts.append(verdict)
        return verdicts

    # ------------------------------------------------------------------
    # reproduction of the published numbers
    # ------------------------------------------------------------------
    def table_reproduction(self, table_id: int) -> PropertyVerdict:
        table = self.reports.make_table(table_id)
        tolerance = TABLE_TOLERANCE[table_id]
        failures = []
        worst = 0.0
        for row in table.row_labels:
            for column, cell in zip(table.column_labels, table.cells[table.row_labels.index(row)]):
                value = cell.value
                published = table.published(row, column)
                dist = self.reports.distributions[COLUMN_LABELS.index(column)]
                if row == LIMIT_ROW_ONE:
                    reference = dist.mean()
                    if reference is UNDEFINED:
                        reference = published
                    ok = abs(value - reference) <= 1e-3
                elif row == LIMIT_ROW_ZERO:
                    ok = abs(value) <= (5e-3 if dist.is_heavy_tailed else 1e-3)
                elif dist.is_heavy_tailed:
                    ok = abs(value - published) <= CAUCHY_RELATIVE_TOLERANCE * abs(published)
                else:
                    worst = max(worst, abs(value - published))
                    ok = abs(value - published) <= tolerance
                if not ok:
                    failures.append(f"{row}/{column}={value:.4f} (published {published})")
        detail = f"max non-Cauchy deviation {worst:.4f}"
        if failures:
            detail += "; off: " + ", ".join(failures)
        return PropertyVerdict(f"table_{table_id}_reproduction", not failures, detail, (CAUCHY_NOTE,))

    def closed_form_oracles(self) -> PropertyVerdict:
        bottom, top = GRID_CUT, 1.0 - GRID_CUT
        errors = []
        simpson = QuadratureScheme.repro_simpson()
        trapezoid = QuadratureScheme.repro_trapezoid()
        uniform = standard_uniform()
        for k in (1.0, 5.0, 25.0, 100.0):
            value = self.risk_engine.srm(uniform, RiskSpectrum.exponential(k), simpson).value
            errors.append(abs(value - truncated_uniform_exponential(k, bottom, top)))
        for gamma in (1.1, 1.5, 5.0, 20.0):
            value = self.risk_engine.srm(uniform, RiskSpectrum.power_high(gamma), trapezoid).value
            errors.append(abs(value - truncated_uniform_power_high(gamma, bottom, top)))
        fine = QuadratureScheme.exact(1_000_000)
        for gamma in (0.1, 0.5, 0.9):
            value = self.risk_engine.srm(uniform, RiskSpectrum.power_low(gamma), fine).value
            errors.append(abs(value - 1.0 / (gamma + 1.0)))
        worst = max(errors)
        return PropertyVerdict("closed_form_oracles", worst <= 1e-6, f"max error {worst:.2e}")

    def limit_properties(self) -> PropertyVerdict:
        failures = []
        for dist in REFERENCE_DISTRIBUTIONS:
            if dist.mean() is UNDEFINED:
                continue
            for which, tolerance in ((LimitKind.EXP_K_TO_0, 1e-4),
                                     (LimitKind.POWER_HIGH_GAMMA_TO_1, 1e-3),
                                     (LimitKind.POWER_LOW_GAMMA_TO_1, 1e-3)):
                check = self.sensitivity.limit_check(dist, which, self.exact)
                if check.gap > tolerance:
                    failures.append(f"{dist.label}/{which.value} gap {check.gap:.2e}")
        uniform_zero = self.sensitivity.limit_check(
            standard_uniform(), LimitKind.POWER_LOW_GAMMA_TO_0, QuadratureScheme.repro_trapezoid())
        if uniform_zero.gap > 1e-3:
            failures.append(f"uniform gamma->0 on the reproduction grid: {uniform_zero.limit_estimate:.2e}")
        detail = "all limits within tolerance" if not failures else "; ".join(failures)
        notes = ("gamma -> 0 gives 0 only on the truncated grid; the full integral tends to the "
                 "essential supremum of the loss",)
        return PropertyVerdict("limit_properties", not failures, detail, notes)

    # ------------------------------------------------------------------
    # spectra
    # ------------------------------------------------------------------
    def _random_spectra(self, rng: np.random.Generator) -> List[RiskSpectrum]:
        specs = [RiskSpectrum.exponential(k) for k in 10 ** rng.uniform(-2, 2, 20)]
        specs += [RiskSpectrum.power_low(g) for g in rng.uniform(0.01, 0.99, 20)]
        specs += [RiskSpectrum.power_high(g) for g in rng.uniform(1.01, 50.0, 20)]
        return specs

    def spectrum_admissibility(self) -> PropertyVerdict:
        rng = np.random.default_rng(self.seed)
        failures = []
        for spec in self._random_spectra(rng):
            report = spectra.check_admissibility(spec, 101)
            if not (report.nonnegativity_ok and report.strictly_increasing
                    and report.normalization_residual <= 1e-12):
                failures.append(spec.label)
        for spec in (RiskSpectrum.es_step(0.95), RiskSpectrum.var_dirac(0.95)):
            report = spectra.check_admissibility(spec, 101)
            if report.strictly_increasing or report.normalization_residual > 1e-12:
                failures.append(spec.label)
        detail = "nonnegative, normalised and strictly increasing on 60 random spectra; ES and VaR not strict"
        if failures:
            detail = "failed: " + ", ".join(failures)
        return PropertyVerdict("spectrum_admissibility", not failures, detail)

    def density_consistency(self) -> PropertyVerdict:
        grid = np.linspace(1e-3, 1.0 - 1e-3, 199)
        delta = 1e-8
        worst = 0.0
        specs = [RiskSpectrum.exponential(k) for k in (0.5, 5.0, 100.0)]
        specs += [RiskSpectrum.power_low(g) for g in (0.1, 0.5, 0.9)]
        specs += [RiskSpectrum.power_high(g) for g in (1.5, 5.0, 20.0)]
        for spec in specs:
            upper, lower = grid + delta, grid - delta
            slope = (spectra.cumulative_weight(spec, upper) - spectra.cumulative_weight(spec, lower)) / (upper - lower)
            density = spectra.weight(spec, grid)
            worst = max(worst, float(np.max(np.abs(slope - density) / density)))
        return PropertyVerdict("density_cumulative_consistency", worst <= 1e-6, f"max relative gap {worst:.2e}")

    # ------------------------------------------------------------------
    # coherence properties of the integral
    # ------------------------------------------------------------------
    def _property_cases(self):
        rng = np.random.default_rng(self.seed + 1)
        sample = from_samples(rng.standard_normal(400))
        dists = [d for d in REFERENCE_DISTRIBUTIONS if not d.is_heavy_tailed] + [sample]
        specs = [RiskSpectrum.exponential(5.0), RiskSpectrum.power_low(0.5),
                 RiskSpectrum.power_high(5.0), RiskSpectrum.es_step(0.95)]
        return dists, specs

    def translation_exact_slice(self) -> PropertyVerdict:
        dists, specs = self._property_cases()
        worst = 0.0
        for dist in dists:
            for spec in specs:
                base = self.risk_engine.srm(dist, spec, self.exact).value
                for c in (-1000.0, -10.0, 10.0, 1000.0):
                    moved = self.risk_engine.srm(dist.shifted(c), spec, self.exact).value
                    worst = max(worst, abs((moved - base) - c) / max(1.0, abs(c), abs(base)))
        return PropertyVerdict("translation_exact_slice", worst <= 1e-10, f"max relative gap {worst:.2e}")

    def translation_repro_grid(self) -> PropertyVerdict:
        worst = 0.0
        worst_closed_form = 0.0
        schemes = (QuadratureScheme.repro_simpson(), QuadratureScheme.repro_trapezoid())
        specs = [RiskSpectrum.exponential(5.0), RiskSpectrum.power_low(0.5), RiskSpectrum.power_high(5.0)]
        for scheme in schemes:
            for dist in REFERENCE_DISTRIBUTIONS:
                for spec in specs:
                    base = integrate_product(spec, dist, scheme)
                    for c in (-10.0, 10.0):
                        moved = integrate_product(spec, dist.shifted(c), scheme).value
                        gap = abs((moved - base.value) - c * base.grid_mass) / max(1.0, abs(c), abs(base.value))
                        worst = max(worst, gap)
        smooth = QuadratureScheme.repro_simpson()
        for dist in (standard_uniform(), REFERENCE_DISTRIBUTIONS[3]):
            base = integrate_product(RiskSpectrum.exponential(5.0), dist, smooth)
            moved = integrate_product(RiskSpectrum.exponential(5.0), dist.shifted(10.0), smooth).value
            worst_closed_form = max(worst_closed_form,
                                    abs((moved - base.value) - 10.0 * base.captured_mass) / 10.0)
        ok = worst <= 1e-10 and worst_closed_form <= 1e-10
        return PropertyVerdict(
            "translation_repro_grid", ok,
            f"shift picks up c*grid_mass to {worst:.2e}; c*captured_mass (smooth case) to {worst_closed_form:.2e}",
        )

    def positive_homogeneity(self) -> PropertyVerdict:
        dists, specs = self._property_cases()
        worst = 0.0
        for scheme in (self.exact, QuadratureScheme.repro_trapezoid()):
            for dist in dists:
                for spec in specs:
                    base = self.risk_engine.srm(dist, spec, scheme).value
                    for factor in (0.5, 3.0, 250.0):
                        scaled = self.risk_engine.srm(dist.scaled(factor), spec, scheme).value
                        worst = max(worst, abs(scaled - factor * base) / max(1e-300, abs(factor * base), 1.0))
        return PropertyVerdict("positive_homogeneity", worst <= 1e-12, f"max relative gap {worst:.2e}")

    def comonotone_additivity(self) -> PropertyVerdict:
        rng = np.random.default_rng(self.seed + 2)
        worst = 0.0
        _, specs = self._property_cases()
        for _ in range(20):
            a = np.sort(rng.standard_normal(300))
            b = np.sort(rng.standard_t(4, 300))
            for spec in specs:
                joint = self.risk_engine.srm(from_samples(a + b), spec, self.exact).value
                parts = (self.risk_engine.srm(from_samples(a), spec, self.exact).value
                         + self.risk_engine.srm(from_samples(b), spec, self.exact).value)
                worst = max(worst, abs(joint - parts) / max(1.0, abs(parts)))
        return PropertyVerdict("comonotone_additivity", worst <= 1e-12, f"max relative gap {worst:.2e}")

    def var_exactness(self) -> PropertyVerdict:
        ok = True
        for dist in REFERENCE_DISTRIBUTIONS:
            for alpha in (0.01, 0.5, 0.95, 0.99):
                result = self.risk_engine.var(dist, alpha)
                ok = ok and result.value == dist.quantile(alpha) and result.is_exact
        return PropertyVerdict("var_exactness", ok, "VaR equals the quantile with no quadrature")

    def es_equivalence(self) -> PropertyVerdict:
        ok = True
        for dist in REFERENCE_DISTRIBUTIONS:
            for scheme in (self.exact, QuadratureScheme.repro_trapezoid()):
                for alpha in (0.0, 0.9, 0.99):
                    es = self.risk_engine.es(dist, alpha, scheme).value
                    direct = self.risk_engine.srm(dist, RiskSpectrum.es_step(alpha), scheme).value
                    ok = ok and es == direct
        return PropertyVerdict("es_equivalence", ok, "es(alpha) is srm(ESStep(alpha)) bit for bit")

    # ------------------------------------------------------------------
    # distributions and quadrature
    # ------------------------------------------------------------------
    def quantile_monotonicity_and_round_trip(self) -> PropertyVerdict:
        rng = np.random.default_rng(self.seed + 3)
        p = np.sort(rng.uniform(0.0, 1.0, 500))
        p = p[(p > 0.0) & (p < 1.0)]
        points = np.concatenate([[1e-6, 1.0 - 1e-6], rng.uniform(1e-6, 1.0 - 1e-6, 500)])
        monotone = True
        worst = 0.0
        for dist in REFERENCE_DISTRIBUTIONS:
            monotone = monotone and bool(np.all(np.diff(dist.quantile(p)) >= 0.0))
            worst = max(worst, float(np.max(np.abs(dist.cdf(dist.quantile(points)) - points))))
        ok = monotone and worst <= 1e-8
        return PropertyVerdict("quantile_monotonicity_round_trip", ok,
                               f"monotone={monotone}, max round-trip error {worst:.2e}")

    def simpson_order(self) -> PropertyVerdict:
        spec = RiskSpectrum.exponential(1.0)
        exact = truncated_uniform_exponential(1.0, GRID_CUT, 1.0 - GRID_CUT)
        errors = []
        for n in (8, 32, 128):
            scheme = QuadratureScheme.repro_simpson(intervals=n)
            errors.append(abs(self.risk_engine.srm(standard_uniform(), spec, scheme).value - exact))
        ratios = [a / b if b > 1e-14 else math.inf for a, b in zip(errors, errors[1:])]
        ok = all(r >= 200.0 for r in ratios)
        return PropertyVerdict("simpson_order", ok, "error ratios " + ", ".join(f"{r:.0f}" for r in ratios))

    def subadditivity(self) -> PropertyVerdict:
        rng = np.random.default_rng(self.seed + 4)
        pairs = []
        for i in range(200):
            a = rng.standard_normal(500)
            b = rng.standard_t(3, 500) if i % 2 else rng.standard_normal(500) + rng.uniform(-1, 1) * a
            pairs.append((a, b))
        failures = 0
        for spec in (RiskSpectrum.exponential(5.0), RiskSpectrum.power_high(5.0), RiskSpectrum.es_step(0.95)):
            failures += sum(not r.holds for r in self.coherence.subadditivity_batch(pairs, spec))
        return PropertyVerdict("subadditivity", failures == 0, f"{failures} failures over 600 checks")

    def srm_monotonicity(self) -> PropertyVerdict:
        rng = np.random.default_rng(self.seed + 5)
        dists, specs = self._property_cases()
        violations = 0
        checks = 0
        for scheme in (self.exact, QuadratureScheme.repro_trapezoid()):
            for dist in dists:
                for spec in specs:
                    low = self.risk_engine.srm(dist, spec, scheme).value
                    high = self.risk_engine.srm(dist.shifted(0.25), spec, scheme).value
                    violations += low > high
                    checks += 1
        for _ in range(50):
            a = rng.standard_normal(300)
            b = a + np.abs(rng.standard_t(3, 300))
            for spec in specs:
                low = self.risk_engine.srm(from_samples(a), spec, self.exact).value
                high = self.risk_engine.srm(from_samples(b), spec, self.exact).value
                violations += low > high + 1e-12 * max(1.0, abs(high))
                checks += 1
        return PropertyVerdict("srm_monotonicity", violations == 0,
                               f"{violations} of {checks} dominated pairs ranked the wrong way")

    # ------------------------------------------------------------------
    # shapes of the sweep curves and spectra
    # ------------------------------------------------------------------
    def exponential_sweep_increasing(self) -> PropertyVerdict:
        grid = np.logspace(0.0, 2.0, 20)
        scheme = QuadratureScheme.repro_simpson()
        bad = [d.label for d in REFERENCE_DISTRIBUTIONS
               if not np.all(np.diff(self.sensitivity.sweep(d, "exponential", grid, scheme).values) > 0)]
        detail = "strictly increasing in k on all five distributions" if not bad else "not increasing: " + ", ".join(bad)
        return PropertyVerdict("exponential_sweep_increasing", not bad, detail)

    def power_low_sweep_peaks(self) -> PropertyVerdict:
        grid = np.linspace(0.01, 0.99, 25)
        scheme = QuadratureScheme.repro_trapezoid()
        bad = []
        for dist in REFERENCE_DISTRIBUTIONS:
            if not has_interior_peak(self.sensitivity.sweep(dist, "power_low", grid, scheme).values):
                bad.append(dist.label)
        detail = "interior maximum then decline on all five distributions" if not bad else "no peak: " + ", ".join(bad)
        return PropertyVerdict("power_low_sweep_peaks", not bad, detail)

    def power_high_sweep_concave(self) -> PropertyVerdict:
        grid = np.array([1.1, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0, 20.0])
        scheme = QuadratureScheme.repro_trapezoid()
        bad = []
        for dist in REFERENCE_DISTRIBUTIONS:
            values = np.array(self.sensitivity.sweep(dist, "power_high", grid, scheme).values)
            slopes = np.diff(values) / np.diff(grid)
            if not (np.all(slopes > 0) and np.all(np.diff(slopes) < 0)):
                bad.append(dist.label)
        detail = "rises at a decreasing rate on all five distributions" if not bad else "shape off: " + ", ".join(bad)
        return PropertyVerdict("power_high_sweep_concave", not bad, detail)

    def power_high_curvature(self) -> PropertyVerdict:
        grid = np.linspace(0.05, 0.95, 19)
        bad = []
        for gamma, sign in ((1.2, -1), (1.5, -1), (1.8, -1), (2.5, 1), (5.0, 1), (20.0, 1)):
            bends = np.diff(spectra.weight(RiskSpectrum.power_high(gamma), grid), n=2)
            if not np.all(sign * bends > 0):
                bad.append(f"gamma={gamma:g}")
        detail = "weight concave below gamma=2 and convex above" if not bad else "curvature off: " + ", ".join(bad)
        return PropertyVerdict("power_high_curvature", not bad, detail)

    def spectrum_figure_shapes(self) -> PropertyVerdict:
        fig1 = self.reports.figure_data(1)
        fig3 = self.reports.figure_data(3)
        fig5 = self.reports.figure_data(5)
        crossings = count_crossings(fig3.series("gamma=0.7"), fig3.series("gamma=0.9"))
        end_k5 = fig1.series("k=5")[-1]
        end_g5 = fig5.series("gamma=5")[-1]
        ok = crossings == 1 and abs(end_k5 - 5.0 / -math.expm1(-5.0)) <= 1e-12 and end_g5 == 5.0
        return PropertyVerdict("spectrum_figure_shapes", ok,
                               f"gamma 0.7/0.9 curves cross {crossings} time(s); phi_k=5(1)={end_k5:.4f}; "
                               f"phi_gamma=5(1)={end_g5:g}")

    # ------------------------------------------------------------------
    # derivatives
    # ------------------------------------------------------------------
    def derivative_identities(self) -> PropertyVerdict:
        normal = standard_normal()
        slope = self.sensitivity.srm_derivative(normal, "exponential", 5.0, h=1e-4, scheme=self.exact)
        worst = 0.0
        for c in (-1000.0, -10.0, 10.0, 1000.0):
            report = self.sensitivity.srm_derivative(normal, "exponential", 5.0, h=1e-4, shift_c=c,
                                                     scheme=self.exact)
            worst = max(worst, report.shift_discrepancy / (1.0 + abs(c)))
        uniform_slope = self.sensitivity.srm_derivative(standard_uniform(), "power_high", 2.0, h=1e-5,
                                                        scheme=self.exact).central_difference
        ok = slope.central_difference > 0 and worst <= 1e-6 and abs(uniform_slope - 1.0 / 9.0) <= 1e-5
        detail = (f"dM/dk at k=5 (normal) = {slope.central_difference:.4f}; shift discrepancy "
                  f"{worst:.2e}; dM/dgamma at gamma=2 (uniform) = {uniform_slope:.5f}")
        return PropertyVerdict("derivative_identities", ok, detail, (DERIVATIVE_NOTE,))


def has_interior_peak(values: Sequence[float]) -> bool:
    """True if the maximum is not at either end and the curve falls after it"""
    values = np.asarray(values)
    top = int(np.argmax(values))
    return 0 < top < values.size - 1 and bool(np.all(np.diff(values[top:]) < 0))


def count_crossings(first: np.ndarray, second: np.ndarray) -> int:
    """Number of sign changes of first - second over the finite points"""
    gap = np.asarray(first) - np.asarray(second)
    gap = gap[np.isfinite(gap) & (gap != 0.0)]
    return int(np.count_nonzero(np.diff(np.sign(gap))))


def run_property_suite(risk_engine: Optional[RiskEngine] = None,
                       max_workers: Optional[int] = None) -> List[PropertyVerdict]:
    """Wire the engines together and run every check"""
    risk_engine = risk_engine or RiskEngine()
    sensitivity = SensitivityEngine(risk_engine, max_workers)
    suite = PropertySuite(risk_engine, sensitivity, CoherenceChecker(risk_engine, max_workers),
                          ReportBuilder(risk_engine, sensitivity, max_workers))
    return suite.run()
