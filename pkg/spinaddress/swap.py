"""
SWAP synthesis from finite exchange pulses under a Zeeman gradient

Two-site model (left site x right site):

    H = J/4 (XX + YY + ZZ) + dEz/2 (IZ - ZI) + Ez (IZ + ZI)

On the odd-parity pair {|01>, |10>} the exchange term generates rotations about
Z_TILDE and the gradient about X_TILDE. A composite (chi, phi, chi) triple builds a
rotation about Z_TILDE alone; repeating it n_reps times reaches alpha_total.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.optimize import brentq

from .exceptions import SwapSynthesisError
from .su2 import (
    IZ,
    SWAP,
    X_TILDE,
    XX,
    YY,
    Z_TILDE,
    ZI,
    ZZ,
    Unitary4,
    compose,
    equivalent_up_to_local_z,
    phase_aligned_distance,
    rotation,
)

logger = logging.getLogger(__name__)

DEFAULT_J_MAX = 50.0
REALITY_SLACK = 1e-12
SWAP_TOLERANCE = 1e-10
_COMPOSITE_TOLERANCE = 1e-9
_MAX_REPS = 100_000


@dataclass(frozen=True)
class ExchangeLink:
    """
    One neighbouring pair of the chain

    Attributes:
        j_max: Largest accessible exchange J (rad/us)
        delta_ez: Zeeman gradient, right minus left (rad/us)
        ez_bar: Mean Zeeman energy (rad/us)
    """

    j_max: float = DEFAULT_J_MAX
    delta_ez: float = 0.0
    ez_bar: float = 0.0

    def __post_init__(self) -> None:
        if not self.j_max > 0:
            raise SwapSynthesisError(f"j_max must be positive, got {self.j_max}")

    @classmethod
    def from_frequencies(cls, w_left: float, w_right: float, j_max: float) -> "ExchangeLink":
        return cls(j_max=j_max, delta_ez=w_right - w_left, ez_bar=(w_left + w_right) / 2)


@dataclass(frozen=True)
class ExchangeSegment:
    """Constant exchange held for a time"""

    exchange: float
    duration: float


@dataclass(frozen=True)
class SwapPlan:
    """
    Composite exchange sequence realizing a rotation by alpha_total about Z_TILDE

    total_duration is n_reps * (2 chi cos(gamma) + phi cot(gamma)) / J. gate_duration
    adds the padding loops that bring the integrated exchange to alpha_total (mod 2pi).
    """

    gamma: float
    alpha_total: float
    alpha_piece: float
    n_reps: int
    phi: float
    chi: float
    j_max: float
    outer_duration: float
    middle_duration: float
    padding_exchange: float = 0.0
    padding_loops: int = 0
    padding_duration: float = 0.0

    def __post_init__(self) -> None:
        if self.n_reps < 1:
            raise SwapSynthesisError(f"n_reps must be >= 1, got {self.n_reps}")
        if min(self.outer_duration, self.middle_duration, self.padding_duration) < 0:
            raise SwapSynthesisError("segment durations must be non-negative")

    @property
    def total_duration(self) -> float:
        return self.n_reps * (2 * self.outer_duration + self.middle_duration)

    @property
    def gate_duration(self) -> float:
        return self.total_duration + self.padding_loops * self.padding_duration

    @property
    def exchange_area(self) -> float:
        """Integrated exchange over the whole gate"""
        composite = self.n_reps * 2 * self.outer_duration * self.j_max
        return composite + self.padding_loops * self.padding_exchange * self.padding_duration

    def segments(self) -> List[ExchangeSegment]:
        """Time-ordered constant-exchange segments, zero-length ones dropped"""
        rep = [
            ExchangeSegment(self.j_max, self.outer_duration),
            ExchangeSegment(0.0, self.middle_duration),
            ExchangeSegment(self.j_max, self.outer_duration),
        ]
        pad = [ExchangeSegment(self.padding_exchange, self.padding_duration)]
        out = rep * self.n_reps + pad * self.padding_loops
        return [s for s in out if s.duration > 0]


def effective_axis(link: ExchangeLink) -> float:
    """gamma = arctan(2 dEz / J), in (-pi/2, pi/2)"""
    return math.atan(2 * link.delta_ez / link.j_max)


def _clip_unit(x: float, what: str) -> float:
    if abs(x) > 1 + REALITY_SLACK:
        raise SwapSynthesisError(f"{what} argument {x} is outside [-1, 1]")
    return max(-1.0, min(1.0, x))


def composite_z_angles(gamma: float, alpha: float, adjust: bool = True) -> Tuple[float, float]:
    """
    Angles (phi, chi) with R(n, chi) R(x, phi) R(n, chi) = R(z, alpha) up to global phase

    n = sin(gamma) x + cos(gamma) z. With adjust, 2pi shifts make chi >= 0 and give phi
    the sign of gamma (the sign of the gradient).

    Raises:
        SwapSynthesisError: |tan(gamma) sin(alpha/2)| > 1
    """
    if alpha == 0:
        return 0.0, 0.0

    tan_g = math.tan(gamma)
    half = alpha / 2
    phi = -2 * math.asin(_clip_unit(tan_g * math.sin(half), "phi"))

    radicand = math.cos(half) ** 2 - 0.25 * math.sin(alpha) ** 2 * tan_g**2
    if radicand < -REALITY_SLACK:
        raise SwapSynthesisError(f"chi is complex for gamma={gamma}, alpha={alpha}")
    ratio = (1 - math.sqrt(max(radicand, 0.0))) / (
        math.cos(half) ** 2 + math.sin(half) ** 2 * math.cos(gamma) ** 2
    )
    chi = math.copysign(1.0, alpha) * math.acos(_clip_unit(1 - ratio, "chi"))

    if adjust:
        if chi < 0:
            chi += 2 * math.pi
        if abs(phi) < 1e-15:
            phi = 0.0
        elif gamma > 0 and phi < 0:
            phi += 2 * math.pi
        elif gamma < 0 and phi > 0:
            phi -= 2 * math.pi

        axis = [math.sin(gamma), 0.0, math.cos(gamma)]
        built = compose([rotation(axis, chi), rotation("x", phi), rotation(axis, chi)])
        error = phase_aligned_distance(rotation("z", alpha), built)
        if error > _COMPOSITE_TOLERANCE:
            raise SwapSynthesisError(
                f"composite rotation misses R(z, {alpha}) by {error:.3g} at gamma={gamma}"
            )
    return phi, chi


def repetitions_needed(gamma: float, alpha_total: float) -> int:
    """Smallest n with |tan(gamma) sin(alpha_total / 2n)| <= 1"""
    tan_g = abs(math.tan(gamma))
    n = 1
    if tan_g > 1:
        n = max(1, math.ceil(abs(alpha_total) / (2 * math.asin(1 / tan_g))) - 1)
    while tan_g * abs(math.sin(alpha_total / (2 * n))) > 1 + REALITY_SLACK:
        n += 1
        if n > _MAX_REPS:
            raise SwapSynthesisError(f"no repetition count up to {_MAX_REPS} is real")
    return n


def _padding(link: ExchangeLink, deficit: float) -> Tuple[float, int, float]:
    # Full 2pi turns of the effective SU(2) at reduced exchange J'; each adds 2pi cos(gamma')
    # of exchange area and is -I on the odd-parity pair.
    if deficit <= REALITY_SLACK or deficit >= 2 * math.pi - REALITY_SLACK:
        return 0.0, 0, 0.0
    if link.delta_ez == 0:
        raise SwapSynthesisError("exchange phase cannot be padded without a Zeeman gradient")
    gap = 2 * abs(link.delta_ez)
    cos_max = link.j_max / math.hypot(link.j_max, gap)
    loops = math.ceil(deficit / (2 * math.pi * cos_max) - 1e-12)
    c = deficit / (2 * math.pi * loops)
    s = math.sqrt(1 - c * c)
    exchange = min(gap * c / s, link.j_max)
    duration = 2 * math.pi / math.hypot(exchange, gap)
    return exchange, loops, duration


def unpadded_swap_fidelity(plan: SwapPlan, link: ExchangeLink) -> float:
    """SWAP fidelity up to local z of the composite alone, without padding loops"""
    bare = replace(plan, padding_exchange=0.0, padding_loops=0, padding_duration=0.0)
    return equivalent_up_to_local_z(plan_unitary(bare, link), SWAP).fidelity


def _build_plan(link: ExchangeLink, alpha_total: float, pad: bool) -> SwapPlan:
    gamma = effective_axis(link)
    n_reps = repetitions_needed(gamma, alpha_total)
    alpha_piece = alpha_total / n_reps
    phi, chi = composite_z_angles(gamma, alpha_piece)

    w = math.hypot(link.j_max, 2 * link.delta_ez)
    outer = chi / w
    middle = 0.0 if phi == 0 else phi / (2 * link.delta_ez)

    plan = SwapPlan(gamma, alpha_total, alpha_piece, n_reps, phi, chi, link.j_max, outer, middle)
    if not pad:
        return plan

    # Pad only when the exchange phase actually costs SWAP fidelity
    fidelity = unpadded_swap_fidelity(plan, link)
    if fidelity >= 1.0 - SWAP_TOLERANCE:
        return plan

    deficit = (alpha_total - plan.exchange_area) % (2 * math.pi)
    exchange, loops, duration = _padding(link, deficit)
    if loops:
        logger.debug(
            "padding swap with %d loop(s) at J=%.6g for exchange deficit %.6g (fidelity %.12g)",
            loops,
            exchange,
            deficit,
            fidelity,
        )
    return replace(
        plan, padding_exchange=exchange, padding_loops=loops, padding_duration=duration
    )


def plan_swap(
    link: ExchangeLink, alpha_total: Optional[float] = None, pad: bool = True
) -> SwapPlan:
    """
    Synthesize a composite exchange sequence for one link

    Both signs of alpha_total are planned and the one with the shorter gate, padding
    included, is kept.

    Args:
        link: Exchange link parameters
        alpha_total: Effective rotation angle, calibrated SWAP angle by default
        pad: Append exchange-phase padding loops when the composite alone is not SWAP

    Raises:
        SwapSynthesisError: alpha_total is zero or no real plan exists
    """
    if alpha_total is None:
        alpha_total = calibrate_alpha_total()
    if alpha_total == 0:
        raise SwapSynthesisError("alpha_total must be nonzero")

    candidates = []
    for sign in (1.0, -1.0):
        try:
            candidates.append(_build_plan(link, sign * abs(alpha_total), pad))
        except SwapSynthesisError as e:
            logger.debug("alpha_total=%.6g rejected: %s", sign * abs(alpha_total), e)
    if not candidates:
        raise SwapSynthesisError(f"no composite plan for {link}")
    return min(candidates, key=lambda p: (p.gate_duration, p.total_duration))


def hamiltonian(link: ExchangeLink, exchange: float) -> Unitary4:
    """Two-site Hamiltonian at exchange J"""
    return (
        exchange / 4 * (XX + YY + ZZ)
        + link.delta_ez / 2 * (IZ - ZI)
        + link.ez_bar * (IZ + ZI)
    )


def su2_part(link: ExchangeLink, exchange: float) -> Unitary4:
    """J/2 Z_TILDE + dEz X_TILDE"""
    return exchange / 2 * Z_TILDE + link.delta_ez * X_TILDE


def u1_part(link: ExchangeLink, exchange: float) -> Unitary4:
    """J/4 ZZ + Ez (IZ + ZI)"""
    return exchange / 4 * ZZ + link.ez_bar * (IZ + ZI)


def segment_propagators(plan: SwapPlan, link: ExchangeLink) -> List[Unitary4]:
    """exp(-i t H) for every segment of the plan, in time order"""
    return [expm(-1j * s.duration * hamiltonian(link, s.exchange)) for s in plan.segments()]


def plan_unitary(plan: SwapPlan, link: ExchangeLink) -> Unitary4:
    """Net 4x4 evolution of a plan"""
    props = segment_propagators(plan, link)
    return compose(props) if props else np.eye(4, dtype=complex)


def _heisenberg_unitary(angle: float) -> Unitary4:
    return expm(-1j * angle * hamiltonian(ExchangeLink(j_max=1.0), 1.0))


def _heisenberg_mismatch(angle: float) -> float:
    return 1.0 - equivalent_up_to_local_z(_heisenberg_unitary(angle), SWAP).fidelity


def _stay_amplitude(angle: float) -> float:
    # Im(<01|U|01> / <01|U|10>): zero exactly where |01> is fully transferred, with a sign change
    u = _heisenberg_unitary(angle)
    return float((u[1, 1] / u[1, 2]).imag)


@lru_cache(maxsize=1)
def calibrate_alpha_total(points: int = 64) -> float:
    """
    Exchange angle at which pure Heisenberg evolution first becomes SWAP-equivalent

    A coarse scan over (0, 2pi] for the smallest |01> population left in place is
    refined by bracketing the sign change of the stay amplitude, then confirmed with
    the local-z SWAP search.

    Raises:
        SwapSynthesisError: no transfer point is bracketed, or the refined angle is not SWAP
    """
    grid = np.linspace(2 * np.pi / points, 2 * np.pi, points)
    leakage = np.array([abs(_heisenberg_unitary(a)[1, 1]) for a in grid])
    best = int(np.argmin(leakage))
    step = grid[1] - grid[0]
    lo, hi = grid[best] - step, min(grid[best] + step, 2 * np.pi - 1e-9)
    if _stay_amplitude(lo) * _stay_amplitude(hi) > 0:
        raise SwapSynthesisError(f"no SWAP point bracketed near exchange angle {grid[best]:.6g}")
    angle = float(brentq(_stay_amplitude, lo, hi, xtol=1e-15))

    mismatch = _heisenberg_mismatch(angle)
    if mismatch > SWAP_TOLERANCE:
        raise SwapSynthesisError(f"exchange angle {angle} misses SWAP by {mismatch:.3g}")
    logger.info("calibrated SWAP exchange angle %.15g (mismatch %.3g)", angle, mismatch)
    return angle


class DirectSwapDuration(NamedTuple):
    """Exchange-only SWAP time in the negligible-gradient regime"""

    nominal: float
    calibrated: float


def direct_swap_duration(j: float) -> DirectSwapDuration:
    """pi / 2J next to the calibrated angle / J"""
    if not j > 0:
        raise SwapSynthesisError(f"exchange must be positive, got {j}")
    return DirectSwapDuration(math.pi / (2 * j), calibrate_alpha_total() / j)


def exchange_area_residual(plan: SwapPlan) -> float:
    """Distance of the integrated exchange from alpha_total, modulo 2pi"""
    r = (plan.exchange_area - plan.alpha_total) % (2 * math.pi)
    return float(min(r, 2 * math.pi - r))

