"""
Global microwave step parameters in the rotating-wave approximation
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from numpy.typing import NDArray

from .exceptions import DriveParameterError
from .su2 import Unitary2, rotation, trace_gate_fidelity

DEFAULT_ELL = 4

_DRIVE_AXES = {"x": (1.0, 0.0), "y": (0.0, 1.0)}


def _check_ell(theta: float, ell: int) -> None:
    if ell < 1:
        raise DriveParameterError(f"ell must be >= 1, got {ell}")
    if not ell > theta / (2 * math.pi):
        raise DriveParameterError(f"ell={ell} must exceed theta/2pi={theta / (2 * math.pi):.6g}")


def optimal_drive_strength(delta: float, theta: float, ell: int = DEFAULT_ELL) -> float:
    """
    Bin-independent drive strength Omega = delta * theta / (2 ell pi)

    Args:
        delta: Bin width (rad/us)
        theta: Rotation angle (rad), > 0
        ell: Synchronization integer

    Returns:
        Rabi frequency (rad/us)
    """
    if not theta > 0:
        raise DriveParameterError(f"theta must be positive, got {theta}")
    _check_ell(theta, ell)
    return delta * theta / (2 * ell * math.pi)


def exact_sync_strength(m: int, delta: float, theta: float, n: int) -> float:
    """
    Drive strength that makes bin offset m idle to a pure z-rotation

    Omega = |m| delta theta / sqrt((2 n pi)^2 - theta^2)
    """
    if m == 0:
        raise DriveParameterError("bin offset m must be nonzero")
    radicand = (2 * n * math.pi) ** 2 - theta**2
    if n < 1 or radicand <= 0:
        raise DriveParameterError(f"n={n} gives an imaginary drive strength for theta={theta}")
    return abs(m) * delta * theta / math.sqrt(radicand)


@dataclass(frozen=True)
class DriveParams:
    """
    One constant-amplitude microwave step

    A zero-angle step is a no-op: rabi = duration = 0.

    Attributes:
        rabi: Drive strength Omega (rad/us)
        axis: "x" or "y"
        rotation_angle: Signed resonant rotation angle (rad)
        duration: Pulse length T (us)
        target_bin: Bin the drive is resonant with
        ell: Synchronization integer the strength was chosen with
        bin_width: delta (rad/us) used to turn bin offsets into detunings
    """

    rabi: float
    axis: str
    rotation_angle: float
    duration: float
    target_bin: int = 0
    ell: int = DEFAULT_ELL
    bin_width: float = 10.0

    def __post_init__(self) -> None:
        if self.axis not in _DRIVE_AXES:
            raise DriveParameterError(f"drive axis must be 'x' or 'y', got {self.axis!r}")
        if self.rabi < 0 or self.duration < 0:
            raise DriveParameterError("rabi and duration must be non-negative")
        if self.rotation_angle != 0 and not (self.rabi > 0 and self.duration > 0):
            raise DriveParameterError("a nonzero rotation needs rabi > 0 and duration > 0")
        if not math.isclose(self.rabi * self.duration, abs(self.rotation_angle), abs_tol=1e-12):
            raise DriveParameterError(
                f"rabi * duration = {self.rabi * self.duration} != |theta| = "
                f"{abs(self.rotation_angle)}"
            )

    @property
    def inverted(self) -> bool:
        """Negative angles are driven with the axis phase-flipped"""
        return self.rotation_angle < 0

    def detuning(self, bin_index: int) -> float:
        """Detuning of a qubit sitting in bin_index"""
        return (bin_index - self.target_bin) * self.bin_width

    @classmethod
    def optimal(
        cls,
        delta: float,
        theta: float,
        ell: int = DEFAULT_ELL,
        axis: str = "x",
        target_bin: int = 0,
    ) -> "DriveParams":
        """Step driven at the bin-independent strength"""
        if theta == 0:
            return cls(0.0, axis, 0.0, 0.0, target_bin, ell, delta)
        rabi = optimal_drive_strength(delta, abs(theta), ell)
        return cls(rabi, axis, theta, abs(theta) / rabi, target_bin, ell, delta)

    @classmethod
    def exact_sync(
        cls,
        delta: float,
        theta: float,
        m: int,
        ell: int = DEFAULT_ELL,
        axis: str = "x",
        target_bin: int = 0,
    ) -> "DriveParams":
        """Step synchronized for bin offset m with n = ell * |m|"""
        if theta == 0:
            return cls(0.0, axis, 0.0, 0.0, target_bin, ell, delta)
        rabi = exact_sync_strength(m, delta, abs(theta), ell * abs(m))
        return cls(rabi, axis, theta, abs(theta) / rabi, target_bin, ell, delta)


def rotation_step_duration(drive: DriveParams) -> float:
    """T = |theta| / Omega"""
    if drive.rabi == 0:
        return 0.0
    return abs(drive.rotation_angle) / drive.rabi


def off_resonant_unitary(
    rabi: float, detuning: float, duration: float, axis: str = "x", inverted: bool = False
) -> Unitary2:
    """
    Rotating-frame evolution exp(-i T (Omega n.sigma + Delta Z) / 2)

    Args:
        rabi: Drive strength (rad/us)
        detuning: Qubit frequency minus drive frequency (rad/us)
        duration: Pulse length (us), >= 0
        axis: "x" or "y" drive quadrature
        inverted: Phase-flip the drive (negates the drive axis)
    """
    if duration < 0:
        raise DriveParameterError(f"duration must be >= 0, got {duration}")
    try:
        nx, ny = _DRIVE_AXES[axis]
    except KeyError:
        raise DriveParameterError(f"drive axis must be 'x' or 'y', got {axis!r}") from None
    sign = -1.0 if inverted else 1.0
    field = np.array([sign * rabi * nx, sign * rabi * ny, detuning])
    strength = float(np.linalg.norm(field))
    if strength == 0 or duration == 0:
        return np.eye(2, dtype=complex)
    return rotation(field / strength, strength * duration)


def step_unitary(drive: DriveParams, bin_index: int) -> Unitary2:
    """Evolution of a qubit in bin_index during a drive step"""
    return off_resonant_unitary(
        drive.rabi, drive.detuning(bin_index), drive.duration, drive.axis, drive.inverted
    )


def idle_fidelity(
    rabi: float, detuning: float, duration: float, phase_blind: bool = False
) -> float:
    """
    Identity fidelity of an idle qubit

    phase_blind=False gives |Tr(U)/2|^2; phase_blind=True gives |U_00|^2, the value after
    free virtual-z correction.
    """
    u = off_resonant_unitary(rabi, detuning, duration)
    if phase_blind:
        return float(abs(u[0, 0]) ** 2)
    return trace_gate_fidelity(np.eye(2), u)


def idle_fidelities(
    rabi: float,
    detuning: Union[float, NDArray[np.float64]],
    duration: float,
    phase_blind: bool = False,
) -> NDArray[np.float64]:
    """
    Closed form of idle_fidelity over an array of detunings

    With w = sqrt(Omega^2 + Delta^2): cos^2(wT/2) or 1 - (Omega/w)^2 sin^2(wT/2).
    """
    detuning = np.asarray(detuning, dtype=float)
    w = np.hypot(rabi, detuning)
    half = w * duration / 2
    if not phase_blind:
        return np.cos(half) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(w > 0, rabi / np.where(w > 0, w, 1.0), 0.0)
    return 1.0 - ratio**2 * np.sin(half) ** 2
