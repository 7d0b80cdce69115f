"""
Eight-step single-qubit addressing sequence

Stages, with T the target's bin and P the partner's bin:
    1 X(theta) at T, 2 swap out, 3 Y(phi) at P, 4 swap back,
    5 X(-theta) at T, 6 swap out, 7 Y(-phi) at P, 8 swap back
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import bisect

from .drive import DEFAULT_ELL, DriveParams
from .exceptions import BookkeepingError, NoPartnerError
from .spectrum import ArrayConfig, SpectrumParams
from .su2 import EulerZXZ, Unitary2, compose, euler_zxz, phase_aligned_distance, rotation
from .swap import DEFAULT_J_MAX, ExchangeLink, SwapPlan, plan_swap

logger = logging.getLogger(__name__)

BETA_MAX = 2 * math.asin(3 * math.sqrt(3) / (4 * math.sqrt(2)))
THETA_AT_BETA_MAX = 2 * math.pi / 3
BOOKKEEPING_TOLERANCE = 1e-9


@dataclass(frozen=True)
class RotationStep:
    """Global drive resonant with one bin"""

    stage: int
    bin: int
    axis: str
    angle: float
    drive: DriveParams

    @property
    def duration(self) -> float:
        return self.drive.duration


@dataclass(frozen=True)
class SwapStep:
    """Exchange pulse on one adjacent pair; plan is None for an ideal, instantaneous swap"""

    stage: int
    sites: Tuple[int, int]
    plan: Optional[SwapPlan] = None

    def __post_init__(self) -> None:
        i, j = self.sites
        if abs(i - j) != 1:
            raise ValueError(f"swap sites must be adjacent, got {self.sites}")
        object.__setattr__(self, "sites", (min(i, j), max(i, j)))

    @property
    def duration(self) -> float:
        return 0.0 if self.plan is None else self.plan.gate_duration


SequenceStep = Union[RotationStep, SwapStep]


@dataclass(frozen=True)
class SequencePlan:
    """
    Schedule of one addressing sequence

    Swap stages expand to one SwapStep per hop of the partner path.
    """

    steps: Tuple[SequenceStep, ...]
    target_site: int
    partner_site: int
    path: Tuple[int, ...]
    theta: float
    phi: float
    virtual_z_pre: float = 0.0
    virtual_z_post: float = 0.0

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.steps)

    @property
    def rotation_steps(self) -> List[RotationStep]:
        return [s for s in self.steps if isinstance(s, RotationStep)]

    @property
    def swap_steps(self) -> List[SwapStep]:
        return [s for s in self.steps if isinstance(s, SwapStep)]

    def stage(self, n: int) -> List[SequenceStep]:
        return [s for s in self.steps if s.stage == n]

    def ideal_target_unitary(self) -> Unitary2:
        """Z_post . Y(-phi) X(-theta) Y(phi) X(theta) . Z_pre"""
        return compose(
            [
                rotation("z", self.virtual_z_pre),
                target_unitary(self.theta, self.phi),
                rotation("z", self.virtual_z_post),
            ]
        )


@dataclass(frozen=True)
class GateRequest:
    """Single-qubit gate Z_alpha X_beta Z_gamma wanted on one site"""

    euler: EulerZXZ
    target_site: int

    def __post_init__(self) -> None:
        if not 0 <= self.euler.beta <= math.pi:
            raise ValueError(f"beta must lie in [0, pi], got {self.euler.beta}")

    @classmethod
    def from_unitary(cls, u: Unitary2, target_site: int) -> "GateRequest":
        euler, _ = euler_zxz(u)
        return cls(euler, target_site)


@dataclass(frozen=True)
class GateSynthesis:
    """Zero, one or two sequence plans, each carrying its own virtual z frame updates"""

    request: GateRequest
    plans: Tuple[SequencePlan, ...] = field(default_factory=tuple)
    virtual_z: float = 0.0

    def unitary(self) -> Unitary2:
        """Ideal realized gate, up to global phase"""
        if not self.plans:
            return rotation("z", self.virtual_z)
        return compose([p.ideal_target_unitary() for p in self.plans])

    @property
    def total_duration(self) -> float:
        return sum(p.total_duration for p in self.plans)


def target_unitary(theta: float, phi: float) -> Unitary2:
    """Y(-phi) X(-theta) Y(phi) X(theta)"""
    return compose(
        [rotation("x", theta), rotation("y", phi), rotation("x", -theta), rotation("y", -phi)]
    )


def sequence_euler_angles(theta: float) -> EulerZXZ:
    """
    Closed-form Z X Z angles of the phi = theta sequence

    The arctangent is taken with two arguments so the branch stays correct once
    sin^2(theta) + 2 cos(theta) turns negative.
    """
    s2 = math.sin(theta) ** 2
    a = math.atan2(s2, s2 + 2 * math.cos(theta))
    return EulerZXZ(-math.pi / 4 - a, beta_of_theta(theta), math.pi / 4 - a)


def beta_of_theta(theta: float) -> float:
    """beta = 2 arcsin(sqrt(2) sin^2(theta/2) sin(theta))"""
    x = math.sqrt(2) * math.sin(theta / 2) ** 2 * math.sin(theta)
    return 2 * math.asin(max(-1.0, min(1.0, x)))


def theta_for_beta(beta: float) -> float:
    """
    Invert beta_of_theta on [0, 2pi/3], where it is monotone

    Raises:
        ValueError: beta outside [0, BETA_MAX]
    """
    if beta < 0 or beta > BETA_MAX + 1e-12:
        raise ValueError(f"beta {beta} outside [0, {BETA_MAX}]")
    if beta == 0:
        return 0.0
    if beta >= BETA_MAX:
        return THETA_AT_BETA_MAX
    return float(
        bisect(
            lambda t: beta_of_theta(t) - beta,
            0.0,
            THETA_AT_BETA_MAX,
            xtol=1e-14,
            maxiter=200,
        )
    )


def choose_partner(
    config: ArrayConfig, target_site: int, min_bin_separation: int = 1
) -> List[int]:
    """
    Path of adjacent sites from the target to the nearest qubit in another bin

    Ties between equally distant candidates go to the lower site index.

    Returns:
        [target_site, ..., partner_site]

    Raises:
        NoPartnerError: no site is at least min_bin_separation bins away
        IndexError: target_site outside the chain
    """
    n = config.n_qubits
    if not 0 <= target_site < n:
        raise IndexError(f"target site {target_site} outside 0..{n - 1}")
    bins = config.bins
    t_bin = bins[target_site]
    for d in range(1, n):
        for site in (target_site - d, target_site + d):
            if 0 <= site < n and abs(bins[site] - t_bin) >= min_bin_separation:
                step = 1 if site > target_site else -1
                return list(range(target_site, site + step, step))
    raise NoPartnerError(f"no qubit outside bin {t_bin} for target site {target_site}")


def _drive(
    config: ArrayConfig,
    angle: float,
    axis: str,
    bin_index: int,
    ell: int,
    sync_offset: Optional[int],
) -> DriveParams:
    delta = config.params.delta
    if sync_offset is None:
        return DriveParams.optimal(delta, angle, ell, axis, bin_index)
    return DriveParams.exact_sync(delta, angle, sync_offset, ell, axis, bin_index)


def _swap_chain(
    stage: int,
    pairs: Sequence[Tuple[int, int]],
    swap_plans: Dict[Tuple[int, int], Optional[SwapPlan]],
) -> List[SwapStep]:
    return [SwapStep(stage, pair, swap_plans[(min(pair), max(pair))]) for pair in pairs]


def plan_sequence(
    config: ArrayConfig,
    target_site: int,
    theta: float,
    phi: float,
    ell: int = DEFAULT_ELL,
    j_max: Optional[float] = DEFAULT_J_MAX,
    min_bin_separation: int = 1,
    sync_offset: Optional[int] = None,
) -> SequencePlan:
    """
    Build the eight-stage schedule for one target

    Args:
        config: Binned array
        target_site: Site to address
        theta: Resonant x angle at the target's bin
        phi: Resonant y angle at the partner's bin
        ell: Synchronization integer of the bin-independent drive
        j_max: Largest exchange for synthesized swaps, None for ideal swaps
        min_bin_separation: Minimum |bin difference| for a partner
        sync_offset: Use the exactly synchronized drive for this bin offset instead

    Raises:
        NoPartnerError: every qubit shares the target's bin
    """
    path = choose_partner(config, target_site, min_bin_separation)
    partner = path[-1]
    bins = config.bins
    t_bin, p_bin = bins[target_site], bins[partner]

    out = [(path[i], path[i + 1]) for i in range(len(path) - 1)]
    back = list(reversed(out))

    tuned = config.tuned
    swap_plans: Dict[Tuple[int, int], Optional[SwapPlan]] = {}
    for i, j in out:
        key = (min(i, j), max(i, j))
        if j_max is None:
            swap_plans[key] = None
        else:
            link = ExchangeLink.from_frequencies(tuned[key[0]], tuned[key[1]], j_max)
            swap_plans[key] = plan_swap(link)

    def rot(stage: int, axis: str, angle: float, b: int) -> RotationStep:
        return RotationStep(stage, b, axis, angle, _drive(config, angle, axis, b, ell, sync_offset))

    steps: List[SequenceStep] = [rot(1, "x", theta, t_bin)]
    steps += _swap_chain(2, out, swap_plans)
    steps.append(rot(3, "y", phi, p_bin))
    steps += _swap_chain(4, back, swap_plans)
    steps.append(rot(5, "x", -theta, t_bin))
    steps += _swap_chain(6, out, swap_plans)
    steps.append(rot(7, "y", -phi, p_bin))
    steps += _swap_chain(8, back, swap_plans)

    if len(path) > 2:
        logger.debug("target %d reaches partner %d over %d hops", target_site, partner, len(out))

    return SequencePlan(tuple(steps), target_site, partner, tuple(path), theta, phi)


def ideal_bookkeeping(plan: SequencePlan, config: ArrayConfig) -> Dict[int, Unitary2]:
    """
    Net unitary of every logical qubit under ideal bin rotations and ideal swaps

    Keys are the original sites. Virtual z updates are included for the target.
    """
    n = config.n_qubits
    bins = config.bins
    at_site = list(range(n))
    net = {q: np.eye(2, dtype=complex) for q in range(n)}
    net[plan.target_site] = rotation("z", plan.virtual_z_pre)

    for step in plan.steps:
        if isinstance(step, RotationStep):
            r = rotation(step.axis, step.angle)
            for site, q in enumerate(at_site):
                if bins[site] == step.bin:
                    net[q] = r @ net[q]
        else:
            i, j = step.sites
            at_site[i], at_site[j] = at_site[j], at_site[i]

    net[plan.target_site] = rotation("z", plan.virtual_z_post) @ net[plan.target_site]
    return net


def spectator_deviations(plan: SequencePlan, config: ArrayConfig) -> Dict[int, float]:
    """Distance from the identity, up to global phase, of every non-target qubit's ideal net"""
    identity = np.eye(2, dtype=complex)
    net = ideal_bookkeeping(plan, config)
    return {
        q: phase_aligned_distance(identity, u) for q, u in net.items() if q != plan.target_site
    }


def check_bookkeeping(
    plan: SequencePlan, config: ArrayConfig, tol: float = BOOKKEEPING_TOLERANCE
) -> Dict[int, float]:
    """
    Verify the ideal sequence returns every spectator to the identity and gives the target
    its intended gate

    Returns:
        Spectator deviations keyed by original site

    Raises:
        BookkeepingError: a spectator or the target is off by more than tol
    """
    deviations = spectator_deviations(plan, config)
    bad = {q: d for q, d in deviations.items() if d > tol}
    if bad:
        worst = max(bad, key=bad.__getitem__)
        raise BookkeepingError(
            f"{len(bad)} spectator(s) not returned to identity; site {worst + 1} off by "
            f"{bad[worst]:.3g}"
        )
    target = ideal_bookkeeping(plan, config)[plan.target_site]
    miss = phase_aligned_distance(plan.ideal_target_unitary(), target)
    if miss > tol:
        raise BookkeepingError(f"target misses its intended gate by {miss:.3g}")
    return deviations


@dataclass(frozen=True)
class TraceRow:
    """One stage of the per-qubit evolution table"""

    stage: int
    description: str
    cells: Tuple[str, ...]


def _op_label(axis: str, angle: float) -> Tuple[str, int]:
    name = "θ" if axis == "x" else "φ"
    sign = 1 if angle > 0 else -1
    return axis.upper() + "_" + ("" if sign > 0 else "-") + name, sign


def _cell(ops: List[Tuple[str, int]], q: int) -> str:
    if not ops:
        return f"I_{q + 1}"
    if len(ops) == 1:
        return f"{ops[0][0]},{q + 1}"
    return "(" + " ".join(label for label, _ in reversed(ops)) + f")_{q + 1}"


def trace_steps(plan: SequencePlan, config: ArrayConfig) -> List[TraceRow]:
    """
    Symbolic per-stage evolution, one cell per site in site order

    Sites are labelled from 1. An operation directly following its own inverse
    cancels.
    """
    n = config.n_qubits
    bins = config.bins
    at_site = list(range(n))
    ops: Dict[int, List[Tuple[str, int]]] = {q: [] for q in range(n)}
    rows: List[TraceRow] = []

    for stage in range(1, 9):
        steps = plan.stage(stage)
        first = steps[0]
        if isinstance(first, RotationStep):
            if first.angle != 0:
                label, sign = _op_label(first.axis, first.angle)
                base = label.replace("-", "")
                for site, q in enumerate(at_site):
                    if bins[site] != first.bin:
                        continue
                    history = ops[q]
                    last = history[-1] if history else None
                    if last and last[0].replace("-", "") == base and last[1] == -sign:
                        history.pop()
                    else:
                        history.append((label, sign))
            desc_label = _op_label(first.axis, first.angle)[0] if first.angle else "I"
            description = f"Bin {first.bin} rotation ({desc_label})"
        else:
            for step in steps:
                if isinstance(step, SwapStep):
                    i, j = step.sites
                    at_site[i], at_site[j] = at_site[j], at_site[i]
            if len(plan.path) == 2:
                a, b = sorted(plan.path)
                description = f"SWAP qubits {a + 1} and {b + 1}"
            else:
                description = "SWAP along sites " + "-".join(str(s + 1) for s in plan.path)
        rows.append(TraceRow(stage, description, tuple(_cell(ops[q], q) for q in at_site)))

    return rows


@dataclass(frozen=True)
class ScheduleRow:
    """Flat listing of one step"""

    index: int
    stage: int
    kind: str
    where: str
    angle: float
    rabi: float
    duration: float


def schedule_rows(plan: SequencePlan) -> List[ScheduleRow]:
    rows = []
    for k, step in enumerate(plan.steps, start=1):
        if isinstance(step, RotationStep):
            rows.append(
                ScheduleRow(
                    k, step.stage, f"rot-{step.axis}", f"bin {step.bin}",
                    step.angle, step.drive.rabi, step.duration,
                )
            )
        else:
            i, j = step.sites
            rows.append(
                ScheduleRow(
                    k, step.stage, "swap", f"sites {i + 1}-{j + 1}", 0.0, 0.0, step.duration
                )
            )
    return rows


def _plan_with_frame(plan: SequencePlan, pre: float, post: float) -> SequencePlan:
    return SequencePlan(
        plan.steps, plan.target_site, plan.partner_site, plan.path,
        plan.theta, plan.phi, pre, post,
    )


def synthesize_gate(
    request: GateRequest,
    config: ArrayConfig,
    ell: int = DEFAULT_ELL,
    j_max: Optional[float] = DEFAULT_J_MAX,
    min_bin_separation: int = 1,
) -> GateSynthesis:
    """
    Realize Z_alpha X_beta Z_gamma with addressing sequences and virtual z rotations

    beta <= BETA_MAX takes one sequence with phi = theta; larger beta takes two
    theta = phi = pi/2 sequences around a virtual z.
    """
    e = request.euler
    site = request.target_site

    if e.beta < 1e-12:
        return GateSynthesis(request, (), e.alpha + e.gamma)

    def build(theta: float) -> Tuple[SequencePlan, EulerZXZ]:
        plan = plan_sequence(config, site, theta, theta, ell, j_max, min_bin_separation)
        angles, _ = euler_zxz(target_unitary(theta, theta))
        return plan, angles

    if e.beta <= BETA_MAX:
        plan, seq = build(theta_for_beta(e.beta))
        framed = _plan_with_frame(plan, e.gamma - seq.gamma, e.alpha - seq.alpha)
        return GateSynthesis(request, (framed,))

    # Z_a X_b Z_c = Z_a' [X(pi/2) Z(pi - b) X(pi/2)] Z_c'
    plan, seq = build(math.pi / 2)
    half_x = rotation("x", math.pi / 2)
    middle = compose([half_x, rotation("z", math.pi - e.beta), half_x])
    m, _ = euler_zxz(middle)
    # X(pi/2) = Z(-seq.alpha) . S . Z(-seq.gamma) with S the sequence unitary
    first = _plan_with_frame(plan, e.gamma - m.gamma - seq.gamma, 0.0)
    second = _plan_with_frame(
        plan, -seq.alpha + (math.pi - e.beta) - seq.gamma, e.alpha - m.alpha - seq.alpha
    )
    return GateSynthesis(request, (first, second))


SIX_SITE_BINS = (1, 3, 6, 3, 1, -3)


def six_site_fixture(params: Optional[SpectrumParams] = None) -> ArrayConfig:
    """Six-site example array; target site 0 pairs with site 1"""
    return ArrayConfig.from_bins(params or SpectrumParams(), SIX_SITE_BINS)
