"""
Larmor-frequency distribution, frequency binning and configuration probabilities

All frequencies are angular frequencies in rad/us (displayed with "MHz" labels).
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.special import gammaln, ndtr, ndtri, xlogy

DEFAULT_DELTA = 10.0
DEFAULT_SIGMA = 60.0


@dataclass(frozen=True)
class SpectrumParams:
    """
    Parameters of the Gaussian Larmor-frequency spread and the bin grid

    Attributes:
        omega0: Center Larmor frequency (rad/us)
        sigma: Standard deviation of the spread (rad/us)
        delta: Bin width (rad/us)
        tunability: Max electrical shift per qubit (rad/us), defaults to delta/2
    """

    omega0: float = 0.0
    sigma: float = DEFAULT_SIGMA
    delta: float = DEFAULT_DELTA
    tunability: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ValueError(f"bin width must be positive, got {self.delta}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.tunability is None:
            object.__setattr__(self, "tunability", self.delta / 2)
        elif self.tunability < self.delta / 2:
            raise ValueError(
                f"tunability {self.tunability} cannot reach bin centers (needs >= {self.delta / 2})"
            )

    @property
    def shift(self) -> float:
        """Tunability as a plain float"""
        assert self.tunability is not None
        return self.tunability

    @property
    def bin_range(self) -> int:
        """Truncation radius for sums over bins: ceil(8 sigma / delta)"""
        return int(math.ceil(8 * self.sigma / self.delta))

    def bin_center(self, j: int) -> float:
        """Tuned frequency of bin j"""
        return self.omega0 + j * self.delta


def bin_index(params: SpectrumParams, raw_larmor: float) -> int:
    """Nearest bin, ties rounded away from zero"""
    x = (raw_larmor - params.omega0) / params.delta
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def bin_indices(params: SpectrumParams, raw: NDArray[np.float64]) -> NDArray[np.int64]:
    """Vectorised bin_index"""
    x = (np.asarray(raw, dtype=float) - params.omega0) / params.delta
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


@dataclass(frozen=True)
class QubitSpec:
    """One site of the chain"""

    site: int
    raw_larmor: float
    bin: int
    tuned_larmor: float


@dataclass(frozen=True)
class ArrayConfig:
    """Linear chain of binned qubits"""

    params: SpectrumParams
    qubits: Sequence[QubitSpec]

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))
        sites = [q.site for q in self.qubits]
        if sites != list(range(len(sites))):
            raise ValueError(f"site indices must be 0..N-1 in order, got {sites}")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def bins(self) -> List[int]:
        return [q.bin for q in self.qubits]

    @property
    def tuned(self) -> NDArray[np.float64]:
        return np.array([q.tuned_larmor for q in self.qubits])

    @property
    def raw(self) -> NDArray[np.float64]:
        return np.array([q.raw_larmor for q in self.qubits])

    @classmethod
    def from_raw(cls, params: SpectrumParams, raw: Iterable[float]) -> "ArrayConfig":
        """Bin and tune a list of raw Larmor frequencies"""
        qubits = []
        for site, w in enumerate(raw):
            j = bin_index(params, float(w))
            qubits.append(QubitSpec(site, float(w), j, params.bin_center(j)))
        return cls(params, qubits)

    @classmethod
    def from_bins(
        cls,
        params: SpectrumParams,
        bins: Sequence[int],
        offsets: Optional[Sequence[float]] = None,
    ) -> "ArrayConfig":
        """
        Build an array directly from bin indices

        Args:
            params: Spectrum parameters
            bins: Bin index per site
            offsets: Optional raw offsets from the bin centers (|offset| < delta/2)
        """
        offsets = offsets if offsets is not None else [0.0] * len(bins)
        raw = [params.bin_center(j) + off for j, off in zip(bins, offsets)]
        return cls.from_raw(params, raw)


@dataclass(frozen=True)
class BinOccupancy:
    """Number of qubits per bin"""

    counts: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for j, n in self.counts.items():
            if n < 0:
                raise ValueError(f"negative occupancy {n} for bin {j}")
        object.__setattr__(self, "counts", {j: n for j, n in sorted(self.counts.items()) if n})

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def get(self, j: int) -> int:
        return self.counts.get(j, 0)

    def occupied(self) -> List[int]:
        return list(self.counts)

    def is_addressable(self) -> bool:
        """At least two bins occupied"""
        return len(self.counts) >= 2

    @classmethod
    def from_bins(cls, bins: Iterable[int]) -> "BinOccupancy":
        return cls(dict(Counter(int(j) for j in bins)))


def counter_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox counter-based generator keyed by (seed, stream)"""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_frequencies(
    params: SpectrumParams, n_qubits: int, seed: int, stream: int = 0
) -> NDArray[np.float64]:
    """
    Draw raw Larmor frequencies by inverse-CDF sampling

    Identical (params, n_qubits, seed, stream) yields bit-identical output.
    """
    if n_qubits < 1:
        raise ValueError(f"n_qubits must be >= 1, got {n_qubits}")
    u = counter_generator(seed, stream).random(n_qubits)
    u = np.where(u > 0.0, u, np.finfo(float).tiny)
    return params.omega0 + params.sigma * ndtri(u)


def sample_config(
    params: SpectrumParams, n_qubits: int, seed: int, stream: int = 0
) -> ArrayConfig:
    """Random array of n_qubits i.i.d. Normal(omega0, sigma^2) qubits, binned and tuned"""
    return ArrayConfig.from_raw(params, sample_frequencies(params, n_qubits, seed, stream))


def occupancy(config: ArrayConfig) -> BinOccupancy:
    """Per-bin counts of an array"""
    return BinOccupancy.from_bins(config.bins)


def bin_probabilities(params: SpectrumParams, j: NDArray[np.int64]) -> NDArray[np.float64]:
    """Vectorised bin_probability; uses the upper tail for j > 0 to keep precision"""
    j = np.asarray(j, dtype=float)
    scale = params.delta / params.sigma
    lo = (np.abs(j) - 0.5) * scale
    hi = (np.abs(j) + 0.5) * scale
    return np.where(j == 0, ndtr(hi) - ndtr(-hi), ndtr(-lo) - ndtr(-hi))


def bin_probability(params: SpectrumParams, j: int) -> float:
    """Gaussian mass of bin j"""
    return float(bin_probabilities(params, np.array([j]))[0])


def config_log_probability(occ: BinOccupancy, params: SpectrumParams) -> float:
    """
    Natural log of the multinomial probability of an occupancy vector

    Equivalent to the product over bins of p_j^{N_j} times the sequential binomials.
    """
    bins = np.array(list(occ.counts), dtype=np.int64)
    counts = np.array(list(occ.counts.values()), dtype=float)
    if counts.size == 0:
        return 0.0
    log_coeff = gammaln(counts.sum() + 1) - gammaln(counts + 1).sum()
    return float(log_coeff + xlogy(counts, bin_probabilities(params, bins)).sum())


def bin_histogram(params: SpectrumParams, samples: NDArray[np.float64]) -> Dict[int, int]:
    """Counts per bin of a batch of raw frequencies"""
    values, counts = np.unique(bin_indices(params, samples), return_counts=True)
    return {int(j): int(n) for j, n in zip(values, counts)}
