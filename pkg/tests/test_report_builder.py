import math

import numpy as np
import pytest

from engine.report_builder import COLUMN_LABELS, LIMIT_ROW_ONE, LIMIT_ROW_ZERO
from utils.errors import DomainError

TOLERANCE = {1: 0.005, 2: 0.01, 3: 0.005}


@pytest.mark.parametrize("table_id", [1, 2, 3])
def test_tables_reproduce_published_values(reports, table_id):
    table = reports.make_table(table_id)
    assert table.column_labels == COLUMN_LABELS
    for row in table.row_labels:
        if row in (LIMIT_ROW_ZERO, LIMIT_ROW_ONE):
            continue
        for column in table.column_labels:
            value, published = table.value(row, column), table.published(row, column)
            if column == "cauchy":
                assert value == pytest.approx(published, rel=0.05), (row, column)
            else:
                assert value == pytest.approx(published, abs=TOLERANCE[table_id]), (row, column)


def test_table_shapes(reports):
    assert reports.make_table(1).row_labels == ("1", "5", "25", "100")
    assert reports.make_table(2).row_labels == (LIMIT_ROW_ZERO, "0.1", "0.5", "0.9", LIMIT_ROW_ONE)
    assert reports.make_table(3).row_labels == ("1.1", "1.5", "5", "20")


def test_named_cells(reports):
    assert reports.make_table(1).value("100", "gumbel") == pytest.approx(1.594, abs=0.005)
    assert reports.make_table(2).value("0.5", "cauchy") == pytest.approx(31.707, rel=0.05)
    assert reports.make_table(3).value("1.5", "beta") == pytest.approx(0.393, abs=0.005)


def test_table_two_limit_rows(reports):
    table = reports.make_table(2)
    for column in ("normal", "uniform", "beta", "gumbel"):
        assert table.value(LIMIT_ROW_ZERO, column) == pytest.approx(0.0, abs=1e-3)
    assert table.value(LIMIT_ROW_ZERO, "cauchy") == pytest.approx(0.0, abs=5e-3)
    assert table.value(LIMIT_ROW_ONE, "uniform") == pytest.approx(0.500, abs=1e-3)
    assert table.value(LIMIT_ROW_ONE, "beta") == pytest.approx(0.333, abs=1e-3)
    assert table.value(LIMIT_ROW_ONE, "gumbel") == pytest.approx(-0.576, abs=1e-3)
    assert table.value(LIMIT_ROW_ONE, "cauchy") == pytest.approx(0.0, abs=1e-3)
    zero_row = table.cells[0]
    assert all(any("essential supremum" in w for w in cell.warnings) for cell in zero_row)


def test_unknown_table(reports):
    with pytest.raises(DomainError):
        reports.make_table(4)


class TestFigures:
    def test_exponential_spectrum_endpoint(self, reports):
        figure = reports.figure_data(1)
        assert figure.columns == ("p", "k=5", "k=25")
        assert len(figure.rows) == 1001
        assert figure.series("p")[-1] == 1.0
        assert figure.series("k=5")[-1] == pytest.approx(5.0 / (1.0 - math.exp(-5.0)))
        assert figure.series("k=25")[-1] > figure.series("k=5")[-1]

    def test_power_high_spectrum_endpoint(self, reports):
        assert reports.figure_data(5).series("gamma=5")[-1] == 5.0

    def test_power_low_curves_cross_once(self, reports):
        figure = reports.figure_data(3)
        gap = figure.series("gamma=0.7") - figure.series("gamma=0.9")
        finite = gap[np.isfinite(gap)]
        assert np.count_nonzero(np.diff(np.sign(finite))) == 1
        assert math.isinf(figure.series("gamma=0.7")[-1])

    def test_exponential_sweep_rises(self, reports):
        figure = reports.figure_data(2)
        assert figure.columns == ("k",) + COLUMN_LABELS
        assert len(figure.rows) == 100
        for column in COLUMN_LABELS:
            assert np.all(np.diff(figure.series(column)) > 0), column

    def test_unknown_figure(self, reports):
        with pytest.raises(DomainError):
            reports.figure_data(7)
