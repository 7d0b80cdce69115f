"""
Unit tests for run configuration
"""

import json
import math

import pytest

from spinaddress.config import (
    DEFAULT_SWEEP_SIZES,
    RunConfig,
    apply_overrides,
    load_config_file,
    resolve_config,
)
from spinaddress.exceptions import ConfigError


class TestRunConfig:
    """Test cases for defaults and validation"""

    def test_defaults(self):
        """Test the default scenario"""
        config = resolve_config()
        assert config.theta == pytest.approx(math.pi / 2)
        assert config.n_qubits_list == DEFAULT_SWEEP_SIZES
        assert config.spectrum().delta == 10.0
        assert config.spectrum().shift == 5.0

    @pytest.mark.parametrize(
        "field,value",
        [
            ("delta_mhz", 0.0),
            ("sigma_mhz", -1.0),
            ("ell", 0),
            ("n_configs", 0),
            ("seed", -1),
            ("seed", 2**64),
            ("f_swap", 1.5),
            ("estimator", "median"),
            ("baseline_phase", "global"),
            ("swap_mode", "lossy"),
            ("workers", 0),
            ("tunability_mhz", 2.0),
            ("theta_over_pi", 9.0),
            ("j_max_mhz", float("nan")),
        ],
    )
    def test_invalid_field_named(self, field, value):
        """Test validation names the offending field"""
        with pytest.raises(ConfigError) as exc_info:
            apply_overrides(RunConfig(), {field: value}).validate()
        assert exc_info.value.field == field
        assert str(exc_info.value).startswith(field)

    def test_empty_sweep_list(self):
        """Test an empty size list is rejected"""
        with pytest.raises(ConfigError):
            RunConfig(n_qubits_list=()).validate()

    def test_to_dict_round_trips(self):
        """Test to_dict feeds back into apply_overrides"""
        config = RunConfig(seed=17, n_qubits_list=(3, 4))
        assert apply_overrides(RunConfig(), config.to_dict()) == config


class TestOverrides:
    """Test cases for override coercion"""

    def test_none_is_skipped(self):
        """Test unset command-line flags keep the current value"""
        config = apply_overrides(RunConfig(seed=5), {"seed": None})
        assert config.seed == 5

    def test_comma_separated_sizes(self):
        """Test n_qubits_list accepts a comma string"""
        config = apply_overrides(RunConfig(), {"n_qubits_list": "2, 5,10"})
        assert config.n_qubits_list == (2, 5, 10)

    def test_unknown_key(self):
        """Test misspelt keys are reported"""
        with pytest.raises(ConfigError) as exc_info:
            apply_overrides(RunConfig(), {"sigma": 60})
        assert exc_info.value.field == "sigma"

    @pytest.mark.parametrize("field,value", [("ell", 2.5), ("n_configs", "many")])
    def test_uncoercible_value(self, field, value):
        """Test values of the wrong type are rejected"""
        with pytest.raises(ConfigError):
            apply_overrides(RunConfig(), {field: value})


class TestConfigFile:
    """Test cases for JSON configuration files"""

    def test_file_then_overrides(self, tmp_path):
        """Test overrides win over the file"""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"seed": 3, "n_configs": 50, "sigma_mhz": 40}))
        config = resolve_config(path, {"seed": 9})
        assert (config.seed, config.n_configs, config.sigma_mhz) == (9, 50, 40.0)

    def test_missing_file(self, tmp_path):
        """Test unreadable files raise ConfigError"""
        with pytest.raises(ConfigError):
            load_config_file(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        """Test malformed JSON raises ConfigError"""
        path = tmp_path / "bad.json"
        path.write_text("{seed: 3")
        with pytest.raises(ConfigError):
            load_config_file(path)

    def test_not_an_object(self, tmp_path):
        """Test a JSON list is rejected"""
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_config_file(path)
