"""
Shared pytest fixtures
"""
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from engine.coherence_checker import CoherenceChecker
from engine.report_builder import ReportBuilder
from engine.risk_engine import RiskEngine
from engine.sensitivity_engine import SensitivityEngine
from utils.quadrature import QuadratureScheme


@pytest.fixture
def risk_engine():
    return RiskEngine()


@pytest.fixture
def sensitivity(risk_engine):
    return SensitivityEngine(risk_engine, max_workers=2)


@pytest.fixture
def coherence(risk_engine):
    return CoherenceChecker(risk_engine, max_workers=2)


@pytest.fixture
def reports(risk_engine, sensitivity):
    return ReportBuilder(risk_engine, sensitivity, max_workers=2)


@pytest.fixture
def repro_simpson():
    return QuadratureScheme.repro_simpson()


@pytest.fixture
def repro_trapezoid():
    return QuadratureScheme.repro_trapezoid()


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    for name in ("SRM_NUM_THREADS", "SRM_LOG_LEVEL", "SRM_LEDGER_PATH"):
        monkeypatch.delenv(name, raising=False)
