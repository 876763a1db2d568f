"""
Report Builder
Regenerates the exponential and power SRM tables and the data behind the six figures
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from engine.results import LimitKind, RiskMeasureResult
from engine.risk_engine import RiskEngine
from engine.sensitivity_engine import SensitivityEngine
from utils import spectra
from utils.distributions import REFERENCE_DISTRIBUTIONS, LossDistribution
from utils.errors import DomainError
from utils.quadrature import QuadratureScheme
from utils.spectra import spectrum_for

logger = logging.getLogger(__name__)

COLUMN_LABELS: Tuple[str, ...] = tuple(d.family.value for d in REFERENCE_DISTRIBUTIONS)

LIMIT_ROW_ZERO = "->0"
LIMIT_ROW_ONE = "->1"

# Published values, columns in COLUMN_LABELS order.
PUBLISHED_TABLES: Dict[int, Dict[str, Tuple[float, ...]]] = {
    1: {
        "1": (0.278, 2.341, 0.582, 0.384, -0.249),
        "5": (1.080, 10.955, 0.806, 0.538, 0.599),
        "25": (1.945, 43.166, 0.958, 0.706, 1.275),
        "100": (2.467, 128.930, 0.980, 0.789, 1.594),
    },
    2: {
        LIMIT_ROW_ZERO: (0.0, 0.0, 0.0, 0.0, 0.0),
        "0.1": (1.062, 157.980, 0.514, 0.394, 0.597),
        "0.5": (0.664, 31.707, 0.657, 0.454, 0.093),
        "0.9": (0.096, 1.697, 0.526, 0.351, -0.472),
        LIMIT_ROW_ONE: (0.0, 0.0, 0.500, 0.333, -0.576),
    },
    3: {
        "1.1": (0.085, 1.096, 0.524, 0.347, -0.461),
        "1.5": (0.343, 3.258, 0.600, 0.393, -0.134),
        "5": (1.161, 11.276, 0.833, 0.553, 0.689),
        "20": (1.860, 36.503, 0.950, 0.690, 1.219),
    },
}

# table id -> (spectrum family, parameter name, parameter rows, scheme)
TABLE_LAYOUT = {
    1: ("exponential", "k", (1.0, 5.0, 25.0, 100.0), QuadratureScheme.repro_simpson()),
    2: ("power_low", "gamma", (0.1, 0.5, 0.9), QuadratureScheme.repro_trapezoid()),
    3: ("power_high", "gamma", (1.1, 1.5, 5.0, 20.0), QuadratureScheme.repro_trapezoid()),
}

# figure id -> (family, parameter name, two parameter values) for spectrum plots
SPECTRUM_FIGURES = {
    1: ("exponential", "k", (5.0, 25.0)),
    3: ("power_low", "gamma", (0.7, 0.9)),
    5: ("power_high", "gamma", (1.5, 5.0)),
}

# figure id -> (family, parameter name, parameter grid, scheme) for SRM sweeps
SWEEP_FIGURES = {
    2: ("exponential", "k", np.linspace(1.0, 100.0, 100), QuadratureScheme.repro_simpson()),
    4: ("power_low", "gamma", np.linspace(0.01, 0.99, 100), QuadratureScheme.repro_trapezoid()),
    6: ("power_high", "gamma", np.linspace(1.1, 20.0, 100), QuadratureScheme.repro_trapezoid()),
}

FIGURE_GRID_POINTS = 1001


@dataclass(frozen=True)
class ResultTable:
    table_id: int
    parameter_name: str
    row_labels: Tuple[str, ...]
    column_labels: Tuple[str, ...]
    cells: Tuple[Tuple[RiskMeasureResult, ...], ...]
    scheme_echo: QuadratureScheme

    def value(self, row_label: str, column_label: str) -> float:
        return self.cells[self.row_labels.index(row_label)][self.column_labels.index(column_label)].value

    def published(self, row_label: str, column_label: str) -> float:
        return PUBLISHED_TABLES[self.table_id][row_label][self.column_labels.index(column_label)]


@dataclass(frozen=True)
class FigureData:
    figure_id: int
    columns: Tuple[str, ...]
    rows: Tuple[Tuple[float, ...], ...]

    def series(self, column: str) -> np.ndarray:
        index = self.columns.index(column)
        return np.array([row[index] for row in self.rows])


def _param_label(value: float) -> str:
    return f"{value:g}"


class ReportBuilder:
    def __init__(self, risk_engine: RiskEngine, sensitivity_engine: SensitivityEngine,
                 max_workers: Optional[int] = None):
        """Initialize Report Builder"""
        self.risk_engine = risk_engine
        self.sensitivity = sensitivity_engine
        self.max_workers = max_workers
        self.distributions: Tuple[LossDistribution, ...] = REFERENCE_DISTRIBUTIONS

    def make_table(self, table_id: int) -> ResultTable:
        """
        Rebuild one of the three published SRM tables.

        Args:
            table_id: 1 (exponential), 2 (power, gamma < 1) or 3 (power, gamma > 1)

        Returns:
            ResultTable of RiskMeasureResult cells, rows by parameter and
            columns normal, cauchy, uniform, beta, gumbel
        """
        if table_id not in TABLE_LAYOUT:
            raise DomainError(f"table id must be 1, 2 or 3, got {table_id}")
        family, parameter_name, params, scheme = TABLE_LAYOUT[table_id]
        logger.info("Building table %d (%s, %s)", table_id, family, scheme.label)

        jobs = [(row, spectrum_for(family, p), dist)
                for row, p in enumerate(params) for dist in self.distributions]
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            flat = list(pool.map(lambda job: self.risk_engine.srm(job[2], job[1], scheme), jobs))

        width = len(self.distributions)
        rows: List[Tuple[RiskMeasureResult, ...]] = [tuple(flat[i * width:(i + 1) * width])
                                                     for i in range(len(params))]
        labels = [_param_label(p) for p in params]

        if table_id == 2:
            rows.insert(0, self._limit_row(LimitKind.POWER_LOW_GAMMA_TO_0, scheme))
            labels.insert(0, LIMIT_ROW_ZERO)
            rows.append(self._limit_row(LimitKind.POWER_LOW_GAMMA_TO_1, scheme))
            labels.append(LIMIT_ROW_ONE)

        return ResultTable(table_id=table_id, parameter_name=parameter_name, row_labels=tuple(labels),
                           column_labels=COLUMN_LABELS, cells=tuple(rows), scheme_echo=scheme)

    def _limit_row(self, which: LimitKind, scheme: QuadratureScheme) -> Tuple[RiskMeasureResult, ...]:
        row = []
        for dist in self.distributions:
            check = self.sensitivity.limit_check(dist, which, scheme)
            result = check.result
            if check.note:
                result = replace(result, warnings=result.warnings + (check.note,))
            row.append(result)
        return tuple(row)

    def figure_data(self, figure_id: int) -> FigureData:
        """
        Data behind one of the six figures.

        Figures 1, 3 and 5 are spectrum curves phi(p) on p = i/1000,
        i = 0..1000; figures 2, 4 and 6 are SRM sweeps over 100 parameter
        values for the five illustrative distributions.
        """
        if figure_id in SPECTRUM_FIGURES:
            return self._spectrum_figure(figure_id)
        if figure_id in SWEEP_FIGURES:
            return self._sweep_figure(figure_id)
        raise DomainError(f"figure id must be between 1 and 6, got {figure_id}")

    def _spectrum_figure(self, figure_id: int) -> FigureData:
        family, name, params = SPECTRUM_FIGURES[figure_id]
        grid = np.linspace(0.0, 1.0, FIGURE_GRID_POINTS)
        series = [spectra.weight(spectrum_for(family, value), grid) for value in params]
        columns = ("p",) + tuple(f"{name}={_param_label(v)}" for v in params)
        rows = tuple(tuple(float(x) for x in row) for row in zip(grid, *series))
        return FigureData(figure_id=figure_id, columns=columns, rows=rows)

    def _sweep_figure(self, figure_id: int) -> FigureData:
        family, name, grid, scheme = SWEEP_FIGURES[figure_id]
        curves = [self.sensitivity.sweep(dist, family, grid, scheme) for dist in self.distributions]
        columns = (name,) + COLUMN_LABELS
        rows = tuple((float(p),) + tuple(curve.values[i] for curve in curves) for i, p in enumerate(grid))
        return FigureData(figure_id=figure_id, columns=columns, rows=rows)
