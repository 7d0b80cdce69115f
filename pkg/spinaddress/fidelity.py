"""
Analytic sequence fidelity and its Monte Carlo average over random arrays
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from .drive import DEFAULT_ELL, DriveParams, idle_fidelities
from .exceptions import NonAddressableError
from .spectrum import (
    ArrayConfig,
    BinOccupancy,
    SpectrumParams,
    config_log_probability,
    occupancy,
    sample_config,
)
from .swap import DEFAULT_J_MAX, ExchangeLink, plan_swap

logger = logging.getLogger(__name__)

ESTIMATORS = ("mc_mean", "paper_weighted")
BASELINE_PHASES = ("trace", "virtual_z")
DEFAULT_CHUNK = 256


@dataclass(frozen=True)
class FidelityReport:
    """
    Average fidelity over sampled arrays

    Attributes:
        f_avg: Estimated average fidelity
        standard_error: Standard error of f_avg
        n_configs: Configurations sampled
        n_excluded: Configurations with every qubit in one bin
        estimator: "mc_mean" or "paper_weighted"
        f_swap: Fidelity assumed per swap
        f_seq: Unweighted mean of the per-array lower bound
        f_loc: Mean local rotation fidelity per driven bin, over arrays occupying it
    """

    f_avg: float
    standard_error: float
    n_configs: int
    n_excluded: int = 0
    estimator: str = "mc_mean"
    f_swap: float = 1.0
    f_seq: float = math.nan
    f_loc: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.standard_error < 0:
            raise ValueError("standard error must be non-negative")
        values = {"f_avg": self.f_avg, "f_seq": self.f_seq}
        values.update({f"f_loc[{b}]": v for b, v in self.f_loc.items()})
        for name, value in values.items():
            if not math.isnan(value) and not -1e-12 <= value <= 1 + 1e-12:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class ConfigFidelity:
    """Per-array breakdown of the analytic model"""

    f_loc_x: Dict[int, float]
    f_loc_y: Dict[int, float]
    f_seq: float


def local_rotation_fidelity(
    occ: BinOccupancy, driven_bin: int, drive: DriveParams, phase_blind: bool = False
) -> float:
    """
    Joint identity fidelity of every qubit outside the driven bin

    Each bin b != driven_bin contributes F_idle((b - driven_bin) delta) ** N_b.
    """
    bins = np.array([b for b in occ.occupied() if b != driven_bin], dtype=float)
    if bins.size == 0:
        return 1.0
    counts = np.array([occ.get(int(b)) for b in bins], dtype=float)
    f = idle_fidelities(
        drive.rabi, (bins - driven_bin) * drive.bin_width, drive.duration, phase_blind
    )
    return float(np.prod(f**counts))


def _local_fidelities(
    bins: NDArray[np.int64], counts: NDArray[np.float64], drive: DriveParams
) -> NDArray[np.float64]:
    # F_loc for every occupied bin as the driven one
    offsets = (bins[None, :] - bins[:, None]) * drive.bin_width
    f = idle_fidelities(drive.rabi, offsets, drive.duration)
    np.fill_diagonal(f, 1.0)
    return np.prod(f ** counts[None, :], axis=1)


def pair_weights(occ: BinOccupancy) -> Tuple[NDArray[np.int64], NDArray[np.float64]]:
    """
    Occupied bins and the (target, partner) bin weights (N_t/N)(N_k/(N - N_t))

    Raises:
        NonAddressableError: fewer than two occupied bins
    """
    if not occ.is_addressable():
        raise NonAddressableError(f"every qubit shares one bin: {dict(occ.counts)}")
    bins = np.array(occ.occupied(), dtype=np.int64)
    counts = np.array([occ.get(int(b)) for b in bins], dtype=float)
    n = counts.sum()
    weights = (counts / n)[:, None] * (counts[None, :] / (n - counts)[:, None])
    np.fill_diagonal(weights, 0.0)
    return bins, weights


def sequence_fidelity(
    occ: BinOccupancy,
    drive: DriveParams,
    f_swap: float = 1.0,
    drive_y: Optional[DriveParams] = None,
) -> float:
    """
    Lower bound on the sequence fidelity averaged over target and partner bins

    f_swap^4 * sum_t sum_{k != t} (N_t/N)(N_k/(N - N_t)) F_loc(t)^2 F_loc(k)^2, with
    F_loc(t) from the x drive and F_loc(k) from drive_y (defaults to drive).

    Raises:
        NonAddressableError: fewer than two occupied bins
    """
    return evaluate_config(occ, drive, f_swap, drive_y).f_seq


def evaluate_config(
    occ: BinOccupancy,
    drive: DriveParams,
    f_swap: float = 1.0,
    drive_y: Optional[DriveParams] = None,
) -> ConfigFidelity:
    bins, weights = pair_weights(occ)
    counts = np.array([occ.get(int(b)) for b in bins], dtype=float)
    fx = _local_fidelities(bins, counts, drive)
    fy = fx if drive_y is None else _local_fidelities(bins, counts, drive_y)
    total = float(np.sum(weights * (fx**2)[:, None] * (fy**2)[None, :]))
    f_seq = min(1.0, max(0.0, f_swap**4 * total))
    return ConfigFidelity(
        {int(b): float(v) for b, v in zip(bins, fx)},
        {int(b): float(v) for b, v in zip(bins, fy)},
        f_seq,
    )


def pair_term(
    occ: BinOccupancy,
    target_bin: int,
    partner_bin: int,
    drive: DriveParams,
    f_swap: float = 1.0,
    drive_y: Optional[DriveParams] = None,
) -> float:
    """f_swap^4 F_loc(t)^2 F_loc(k)^2 for one fixed (target, partner) bin pair"""
    fx = local_rotation_fidelity(occ, target_bin, drive)
    fy = local_rotation_fidelity(occ, partner_bin, drive_y or drive)
    return f_swap**4 * fx**2 * fy**2


def simple_pulse_rabi(t_total: float) -> float:
    """Drive strength of a single resonant pi/2 pulse lasting t_total"""
    if not t_total > 0:
        raise ValueError(f"t_total must be positive, got {t_total}")
    return (math.pi / 2) / t_total


def _baseline_detunings(config: ArrayConfig, target_site: int) -> NDArray[np.float64]:
    raw = config.raw
    offsets = np.delete(raw - raw[target_site], target_site)
    push = np.where(offsets >= 0, 1.0, -1.0) * config.params.shift
    return offsets + push


def simple_pulse_baseline(
    config: ArrayConfig,
    target_site: int,
    t_total: float,
    baseline_phase: str = "trace",
) -> float:
    """
    Fidelity of addressing one target with a single slow resonant pulse

    Idle qubits are tuned as far from the target as their tunability allows; the target
    stays at its raw frequency. "trace" scores idles the way the sequence bound does,
    detuning phase included; "virtual_z" drops that phase.
    """
    if baseline_phase not in BASELINE_PHASES:
        raise ValueError(f"baseline_phase must be one of {BASELINE_PHASES}")
    rabi = simple_pulse_rabi(t_total)
    if config.n_qubits == 1:
        return 1.0
    detunings = _baseline_detunings(config, target_site)
    f = idle_fidelities(rabi, detunings, t_total, phase_blind=baseline_phase == "virtual_z")
    return float(np.prod(f))


def average_simple_pulse_baseline(
    config: ArrayConfig, t_total: float, baseline_phase: str = "trace"
) -> float:
    """simple_pulse_baseline averaged over every choice of target"""
    values = [
        simple_pulse_baseline(config, site, t_total, baseline_phase)
        for site in range(config.n_qubits)
    ]
    return float(np.mean(values))


def nominal_total_time(
    params: SpectrumParams,
    ell: int = DEFAULT_ELL,
    j_max: float = DEFAULT_J_MAX,
    alpha_total: Optional[float] = None,
) -> float:
    """
    4 T + 4 T_SWAP, with T = 2 ell pi / delta and the swap planned at the rms
    gradient sqrt(2) sigma. An explicit alpha_total is nominal accounting and is not padded.
    """
    t_rot = 2 * ell * math.pi / params.delta
    link = ExchangeLink(j_max=j_max, delta_ez=math.sqrt(2) * params.sigma)
    pad = alpha_total is None
    return 4 * t_rot + 4 * plan_swap(link, alpha_total, pad=pad).gate_duration


def _mean_and_error(values: NDArray[np.float64]) -> Tuple[float, float]:
    if values.size == 0:
        return float("nan"), 0.0
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


def _weighted_mean_and_error(
    values: NDArray[np.float64], log_p: NDArray[np.float64]
) -> Tuple[float, float]:
    if values.size == 0:
        return float("nan"), 0.0
    w = np.exp(log_p - np.max(log_p))
    w = w / np.sum(w)
    mean = float(np.sum(w * values))
    error = float(math.sqrt(np.sum(w**2 * (values - mean) ** 2)))
    return mean, error


def _mean_local_fidelities(per_config: List[Dict[int, float]]) -> Dict[int, float]:
    # Per-bin means in configuration order, so chunking never changes the sums
    collected: Dict[int, List[float]] = {}
    for loc in per_config:
        for b, v in loc.items():
            collected.setdefault(b, []).append(v)
    return {b: float(np.mean(collected[b])) for b in sorted(collected)}


@dataclass(frozen=True)
class SweepPoint:
    """Both sequence estimators and the baseline for one array size"""

    n_qubits: int
    sequence: FidelityReport
    sequence_weighted: FidelityReport
    simple: FidelityReport
    seed: int


@dataclass(frozen=True)
class _ChunkResult:
    f_seq: NDArray[np.float64]
    log_p: NDArray[np.float64]
    simple: NDArray[np.float64]
    addressable: NDArray[np.bool_]
    f_loc: List[Dict[int, float]]


@dataclass
class MonteCarloRunner:
    """
    Samples arrays and evaluates the sequence bound and the simple-pulse baseline

    Configuration i of a run draws its frequencies from the counter stream (seed, i), so
    results do not depend on the worker count or chunking.
    """

    params: SpectrumParams = field(default_factory=SpectrumParams)
    theta: float = math.pi / 2
    phi: float = math.pi / 2
    ell: int = DEFAULT_ELL
    f_swap: float = 1.0
    t_total: float = 10.0
    baseline_phase: str = "trace"
    workers: int = 1
    chunk_size: int = DEFAULT_CHUNK
    with_baseline: bool = True
    drive_x: DriveParams = field(init=False)
    drive_y: DriveParams = field(init=False)

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.baseline_phase not in BASELINE_PHASES:
            raise ValueError(f"baseline_phase must be one of {BASELINE_PHASES}")
        self.drive_x = DriveParams.optimal(self.params.delta, self.theta, self.ell, "x")
        self.drive_y = DriveParams.optimal(self.params.delta, self.phi, self.ell, "y")

    def _evaluate_chunk(self, n_qubits: int, seed: int, start: int, stop: int) -> _ChunkResult:
        size = stop - start
        f_seq = np.zeros(size)
        log_p = np.full(size, -np.inf)
        simple = np.zeros(size)
        addressable = np.zeros(size, dtype=bool)
        f_loc: List[Dict[int, float]] = [{} for _ in range(size)]
        for k, i in enumerate(range(start, stop)):
            config = sample_config(self.params, n_qubits, seed, stream=i)
            occ = occupancy(config)
            if self.with_baseline:
                simple[k] = average_simple_pulse_baseline(
                    config, self.t_total, self.baseline_phase
                )
            if not occ.is_addressable():
                continue
            addressable[k] = True
            evaluated = evaluate_config(occ, self.drive_x, self.f_swap, self.drive_y)
            f_seq[k] = evaluated.f_seq
            f_loc[k] = evaluated.f_loc_x
            log_p[k] = config_log_probability(occ, self.params)
        return _ChunkResult(f_seq, log_p, simple, addressable, f_loc)

    def _evaluate(self, n_qubits: int, n_configs: int, seed: int) -> _ChunkResult:
        bounds = [
            (start, min(start + self.chunk_size, n_configs))
            for start in range(0, n_configs, self.chunk_size)
        ]
        if self.workers == 1:
            parts = [self._evaluate_chunk(n_qubits, seed, a, b) for a, b in bounds]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                futures = [
                    pool.submit(self._evaluate_chunk, n_qubits, seed, a, b) for a, b in bounds
                ]
                parts = [f.result() for f in futures]
        return _ChunkResult(
            np.concatenate([p.f_seq for p in parts]),
            np.concatenate([p.log_p for p in parts]),
            np.concatenate([p.simple for p in parts]),
            np.concatenate([p.addressable for p in parts]),
            [loc for p in parts for loc in p.f_loc],
        )

    def run(self, n_qubits: int, n_configs: int, seed: int) -> SweepPoint:
        """
        Evaluate n_configs sampled arrays of n_qubits qubits

        Raises:
            ValueError: n_qubits < 1 or n_configs < 1
        """
        if n_configs < 1:
            raise ValueError(f"n_configs must be >= 1, got {n_configs}")
        if n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")

        result = self._evaluate(n_qubits, n_configs, seed)
        mask = result.addressable
        excluded = int(n_configs - np.count_nonzero(mask))
        if excluded:
            logger.info(
                "N=%d: %d of %d configurations are not addressable", n_qubits, excluded, n_configs
            )

        mean, err = _mean_and_error(result.f_seq[mask])
        w_mean, w_err = _weighted_mean_and_error(result.f_seq[mask], result.log_p[mask])
        s_mean, s_err = _mean_and_error(result.simple) if self.with_baseline else (math.nan, 0.0)
        f_loc = _mean_local_fidelities(result.f_loc)

        point = SweepPoint(
            n_qubits,
            FidelityReport(
                mean, err, n_configs, excluded, "mc_mean", self.f_swap, mean, f_loc
            ),
            FidelityReport(
                w_mean, w_err, n_configs, excluded, "paper_weighted", self.f_swap, mean, f_loc
            ),
            FidelityReport(s_mean, s_err, n_configs, 0, "mc_mean", 1.0, s_mean),
            seed,
        )
        logger.info("N=%d: sequence %.6f +- %.2g, simple %.6f", n_qubits, mean, err, s_mean)
        return point

    def sweep(self, n_qubits_list: List[int], n_configs: int, seed: int) -> List[SweepPoint]:
        return [self.run(n, n_configs, seed) for n in n_qubits_list]


def monte_carlo_average(
    params: SpectrumParams,
    n_qubits: int,
    n_configs: int,
    seed: int,
    estimator: str = "mc_mean",
    theta: float = math.pi / 2,
    phi: float = math.pi / 2,
    ell: int = DEFAULT_ELL,
    f_swap: float = 1.0,
    workers: int = 1,
) -> FidelityReport:
    """
    Configuration-averaged sequence fidelity

    "mc_mean" is the plain sample mean; "paper_weighted" reweights the sampled
    configurations by their multinomial probability.
    """
    if estimator not in ESTIMATORS:
        raise ValueError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")
    runner = MonteCarloRunner(
        params=params,
        theta=theta,
        phi=phi,
        ell=ell,
        f_swap=f_swap,
        workers=workers,
        with_baseline=False,
    )
    point = runner.run(n_qubits, n_configs, seed)
    return point.sequence if estimator == "mc_mean" else point.sequence_weighted
