"""
Run configuration: defaults, JSON file, command-line overrides
"""

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from .exceptions import ConfigError
from .fidelity import BASELINE_PHASES, ESTIMATORS
from .oracle import SWAP_MODES
from .spectrum import SpectrumParams

DEFAULT_SWEEP_SIZES = (2, 5, 10, 15, 20, 25, 30, 40, 50)
_U64 = 2**64


@dataclass(frozen=True)
class RunConfig:
    """
    All knobs of a run

    Frequencies are labelled MHz and used as rad/us.
    """

    delta_mhz: float = 10.0
    sigma_mhz: float = 60.0
    omega0_mhz: float = 0.0
    tunability_mhz: Optional[float] = None
    ell: int = 4
    theta_over_pi: float = 0.5
    phi_over_pi: float = 0.5
    n_qubits_list: Tuple[int, ...] = DEFAULT_SWEEP_SIZES
    n_configs: int = 10_000
    seed: int = 0
    f_swap: float = 1.0
    estimator: str = "mc_mean"
    j_max_mhz: float = 50.0
    delta_ez_mhz: float = 85.0
    output_path: str = "sweep.csv"
    workers: int = 1
    baseline_phase: str = "trace"
    t_total_us: float = 10.0
    min_bin_separation: int = 1
    swap_mode: str = "ideal"

    @property
    def theta(self) -> float:
        return self.theta_over_pi * math.pi

    @property
    def phi(self) -> float:
        return self.phi_over_pi * math.pi

    def spectrum(self) -> SpectrumParams:
        return SpectrumParams(
            omega0=self.omega0_mhz,
            sigma=self.sigma_mhz,
            delta=self.delta_mhz,
            tunability=self.tunability_mhz,
        )

    def validate(self) -> "RunConfig":
        """
        Check every field

        Raises:
            ConfigError: naming the first offending field
        """
        for name in ("delta_mhz", "sigma_mhz", "j_max_mhz", "t_total_us"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(name, f"must be positive, got {value}")
        for name in ("omega0_mhz", "delta_ez_mhz", "theta_over_pi", "phi_over_pi"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(name, "must be finite")
        if self.tunability_mhz is not None and self.tunability_mhz < self.delta_mhz / 2:
            raise ConfigError("tunability_mhz", f"must be >= delta_mhz / 2 = {self.delta_mhz / 2}")
        if self.ell < 1:
            raise ConfigError("ell", f"must be >= 1, got {self.ell}")
        for name in ("theta_over_pi", "phi_over_pi"):
            if self.ell <= abs(getattr(self, name)) / 2:
                raise ConfigError(name, f"needs ell > |angle| / 2pi (ell={self.ell})")
        if not self.n_qubits_list or any(n < 1 for n in self.n_qubits_list):
            raise ConfigError("n_qubits_list", "must be a non-empty list of positive integers")
        if self.n_configs < 1:
            raise ConfigError("n_configs", f"must be >= 1, got {self.n_configs}")
        if not 0 <= self.seed < _U64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        if not 0 <= self.f_swap <= 1:
            raise ConfigError("f_swap", f"must lie in [0, 1], got {self.f_swap}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError("estimator", f"must be one of {', '.join(ESTIMATORS)}")
        if self.baseline_phase not in BASELINE_PHASES:
            raise ConfigError("baseline_phase", f"must be one of {', '.join(BASELINE_PHASES)}")
        if self.swap_mode not in SWAP_MODES:
            raise ConfigError("swap_mode", f"must be one of {', '.join(SWAP_MODES)}")
        if self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")
        if self.min_bin_separation < 1:
            raise ConfigError("min_bin_separation", "must be >= 1")
        if not self.output_path:
            raise ConfigError("output_path", "must not be empty")
        return self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["n_qubits_list"] = list(self.n_qubits_list)
        return data


_FIELD_NAMES = frozenset(f.name for f in fields(RunConfig))


def _coerce(name: str, value: Any) -> Any:
    default = getattr(RunConfig, name, None)
    try:
        if name == "n_qubits_list":
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip()]
            return tuple(int(v) for v in value)
        if name == "tunability_mhz":
            return None if value is None else float(value)
        if isinstance(default, int):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(f"{value} is not an integer")
            return int(value)
        if isinstance(default, float):
            return float(value)
        return str(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(name, f"bad value {value!r}: {e}") from None


def apply_overrides(config: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    """
    Replace fields, skipping None values

    Raises:
        ConfigError: unknown key or uncoercible value
    """
    changes = {}
    for key, value in overrides.items():
        if key not in _FIELD_NAMES:
            raise ConfigError(key, "unknown configuration key")
        if value is None:
            continue
        changes[key] = _coerce(key, value)
    return replace(config, **changes)


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a flat JSON object of RunConfig keys

    Raises:
        ConfigError: unreadable file, invalid JSON or not an object
    """
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e.strerror or e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"invalid JSON in {path}: {e.msg} (line {e.lineno})") from None
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold a JSON object")
    return data


def resolve_config(
    path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """Defaults, then the JSON file, then overrides; validated"""
    config = RunConfig()
    if path is not None:
        config = apply_overrides(config, load_config_file(path))
    if overrides:
        config = apply_overrides(config, overrides)
    return config.validate()
