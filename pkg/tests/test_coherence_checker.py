import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from utils.errors import DomainError, InputValidationError
from utils.spectra import RiskSpectrum

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


class TestSubadditivityCheck:
    def test_comonotone_pair_is_additive(self, coherence):
        a = np.random.default_rng(1).standard_normal(200)
        result = coherence.subadditivity_check(a, a, RiskSpectrum.exponential(5.0))
        assert result.lhs == pytest.approx(result.rhs, rel=1e-12)
        assert result.holds

    def test_hedged_pair(self, coherence):
        a = np.random.default_rng(2).standard_normal(200)
        result = coherence.subadditivity_check(a, -a, RiskSpectrum.exponential(5.0))
        assert result.lhs == 0.0
        assert result.rhs >= 0.0
        assert result.holds

    def test_expected_shortfall_on_independent_normals(self, coherence):
        rng = np.random.default_rng(3)
        result = coherence.subadditivity_check(rng.standard_normal(1000), rng.standard_normal(1000),
                                               RiskSpectrum.es_step(0.95))
        assert result.holds

    def test_length_mismatch(self, coherence):
        with pytest.raises(InputValidationError):
            coherence.subadditivity_check([1.0, 2.0], [1.0], RiskSpectrum.es_step(0.5))

    def test_empty_samples(self, coherence):
        with pytest.raises(InputValidationError):
            coherence.subadditivity_check([], [], RiskSpectrum.es_step(0.5))

    def test_var_is_not_admissible(self, coherence):
        with pytest.raises(DomainError):
            coherence.subadditivity_check([1.0, 2.0], [2.0, 1.0], RiskSpectrum.var_dirac(0.5))

    @settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(pairs=st.lists(st.tuples(finite, finite), min_size=1, max_size=40),
           k=st.floats(0.1, 50.0))
    def test_holds_for_random_pairs(self, coherence, pairs, k):
        a, b = zip(*pairs)
        assert coherence.subadditivity_check(a, b, RiskSpectrum.exponential(k)).holds


def test_batch_keeps_order(coherence):
    rng = np.random.default_rng(4)
    pairs = [(rng.standard_normal(50) * (i + 1), rng.standard_normal(50)) for i in range(12)]
    spec = RiskSpectrum.power_high(5.0)
    batch = coherence.subadditivity_batch(pairs, spec)
    assert [r.lhs for r in batch] == [coherence.subadditivity_check(a, b, spec).lhs for a, b in pairs]
    assert all(r.holds for r in batch)
