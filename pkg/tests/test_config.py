import pytest

from utils.config import build_run_config, load_settings, parse_config_file
from utils.errors import InputValidationError
from utils.quadrature import Mode, QuadratureScheme, Rule
from utils.spectra import RiskSpectrum


class TestSettings:
    def test_defaults(self):
        settings = load_settings({})
        assert settings.num_threads == 0
        assert settings.log_level == "WARNING"
        assert settings.ledger_path is None
        assert 1 <= settings.workers <= 8

    def test_explicit_threads(self):
        assert load_settings({"SRM_NUM_THREADS": "3"}).workers == 3

    @pytest.mark.parametrize("value", ["-1", "many"])
    def test_bad_thread_count_names_the_key(self, value):
        with pytest.raises(InputValidationError) as excinfo:
            load_settings({"SRM_NUM_THREADS": value})
        assert excinfo.value.key == "SRM_NUM_THREADS"
        assert "SRM_NUM_THREADS" in str(excinfo.value)

    def test_log_level(self):
        assert load_settings({"SRM_LOG_LEVEL": "debug"}).log_level == "DEBUG"
        with pytest.raises(InputValidationError):
            load_settings({"SRM_LOG_LEVEL": "chatty"})


class TestConfigFile:
    def test_parses_flat_key_values(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("# table run\ncommand = compute\n\ndist = uniform  # comment\nh-top=1e-4\n")
        assert parse_config_file(str(path)) == {"command": "compute", "dist": "uniform", "h_top": "1e-4"}

    def test_line_without_equals(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("dist = uniform\nspectrum exp\n")
        with pytest.raises(InputValidationError) as excinfo:
            parse_config_file(str(path))
        assert excinfo.value.line == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputValidationError) as excinfo:
            parse_config_file(str(tmp_path / "absent.cfg"))
        assert excinfo.value.key == "config"


class TestRunConfig:
    def test_defaults(self):
        config = build_run_config({"command": "check"})
        assert config.scheme() == QuadratureScheme.exact()
        assert config.format == "csv"
        assert config.precision == "table"

    def test_compute_builders(self):
        config = build_run_config({"command": "compute", "dist": "uniform", "spectrum": "exp", "k": "1",
                                   "mode": "repro", "rule": "simpson", "n": "10000"})
        assert config.scheme() == QuadratureScheme(Rule.SIMPSON, 10_000, Mode.REPRO_GRID)
        assert config.spectrum_spec() == RiskSpectrum.exponential(1.0)
        assert config.distribution().label == "uniform"

    def test_unknown_key_is_named(self):
        with pytest.raises(InputValidationError) as excinfo:
            build_run_config({"command": "check", "colour": "blue"})
        assert excinfo.value.key == "colour"

    @pytest.mark.parametrize("values, key", [
        ({"command": "compute", "spectrum": "es", "alpha": "1.5"}, "alpha"),
        ({"command": "compute", "spectrum": "exp", "k": "-2"}, "k"),
        ({"command": "compute", "spectrum": "power-high", "gamma": "1"}, "gamma"),
        ({"command": "compute", "spectrum": "exp"}, "k"),
        ({"command": "compute", "spectrum": "exp", "k": "1", "rule": "simpson", "n": "101"}, "n"),
        ({"command": "compute", "spectrum": "exp", "k": "1", "h_top": "0.7"}, "h-top"),
        ({"command": "compute", "spectrum": "exp", "k": "1", "dist": "lognormal"}, "dist"),
        ({"command": "compute", "spectrum": "exp", "k": "1", "beta_a": "0"}, "beta-a"),
        ({"command": "compute", "spectrum": "var", "alpha": "0"}, "alpha"),
        ({"command": "compute"}, "spectrum"),
        ({"command": "table", "id": "5"}, "id"),
        ({"command": "figure", "id": "9"}, "id"),
        ({"command": "empirical", "spectrum": "es", "alpha": "0.5"}, "input"),
        ({"command": "sweep", "family": "exp", "params": "5,1"}, "params"),
        ({"command": "sweep", "family": "power-low", "params": "0.5,2"}, "params"),
        ({"command": "sweep", "params": "1,2"}, "family"),
        ({"command": "launch"}, "command"),
    ])
    def test_invalid_values_name_their_key(self, values, key):
        with pytest.raises(InputValidationError) as excinfo:
            build_run_config(values)
        assert excinfo.value.key == key
        assert key in str(excinfo.value)

    def test_params_are_split(self):
        config = build_run_config({"command": "sweep", "family": "exp", "params": "1, 5,25"})
        assert config.params == [1.0, 5.0, 25.0]

    def test_canonical_drops_defaults(self):
        config = build_run_config({"command": "table", "id": 1})
        assert config.canonical() == {"command": "table", "id": 1}
