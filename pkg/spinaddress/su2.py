"""
Small dense SU(2) / 4x4 algebra shared by every other module.

Conventions:
    rotation(n, angle) = exp(-i * angle * (n . sigma) / 2)
    compose([U1, U2, ...]) applies U1 first in time (returns ... U2 @ U1)
    Two-qubit operators use kron(left_site, right_site) ordering.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize

from .exceptions import InvalidAxisError

logger = logging.getLogger(__name__)

Unitary2 = NDArray[np.complex128]
Unitary4 = NDArray[np.complex128]
AxisLike = Union[str, Sequence[float], NDArray[np.float64]]

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_AXES = {
    "x": np.array([1.0, 0.0, 0.0]),
    "y": np.array([0.0, 1.0, 0.0]),
    "z": np.array([0.0, 0.0, 1.0]),
}

# Two-qubit operators of the exchange Hamiltonian
XX = np.kron(PAULI_X, PAULI_X)
YY = np.kron(PAULI_Y, PAULI_Y)
ZZ = np.kron(PAULI_Z, PAULI_Z)
IZ = np.kron(PAULI_I, PAULI_Z)
ZI = np.kron(PAULI_Z, PAULI_I)
Z_TILDE = (XX + YY) / 2
X_TILDE = (IZ - ZI) / 2
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
    dtype=complex,
)

AXIS_TOLERANCE = 1e-9
_DEGENERATE_TOLERANCE = 1e-12
_GRID_POINTS = 16


def wrap_angle(angle: float) -> float:
    """Map an angle into (-pi, pi]"""
    return float(np.pi - ((np.pi - angle) % (2 * np.pi)))


def axis_vector(axis: AxisLike) -> NDArray[np.float64]:
    """
    Resolve an axis label or 3-vector into a unit vector

    Args:
        axis: "x", "y", "z" or a unit 3-vector

    Returns:
        Unit vector as a float array

    Raises:
        InvalidAxisError: unknown label, wrong shape, or norm off by more than 1e-9
    """
    if isinstance(axis, str):
        try:
            return _AXES[axis.lower()]
        except KeyError:
            raise InvalidAxisError(f"unknown axis label {axis!r}") from None

    vec = np.asarray(axis, dtype=float)
    if vec.shape != (3,):
        raise InvalidAxisError(f"axis must be a 3-vector, got shape {vec.shape}")
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > AXIS_TOLERANCE:
        raise InvalidAxisError(f"axis norm {norm} is not 1")
    return vec


def rotation(axis: AxisLike, angle: float) -> Unitary2:
    """
    Rotation exp(-i angle (n . sigma) / 2)

    A 2*pi rotation returns -I; the sign is kept.
    """
    if not np.isfinite(angle):
        raise ValueError(f"rotation angle must be finite, got {angle}")
    n = axis_vector(axis)
    generator = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    return np.cos(angle / 2) * PAULI_I - 1j * np.sin(angle / 2) * generator


def compose(unitaries: Sequence[NDArray[np.complex128]]) -> NDArray[np.complex128]:
    """
    Time-ordered product: the first element acts first

    Raises:
        ValueError: empty sequence
    """
    if len(unitaries) == 0:
        raise ValueError("cannot compose an empty sequence")
    return reduce(lambda acc, u: np.asarray(u) @ acc, unitaries[1:], np.asarray(unitaries[0]))


def is_unitary(u: NDArray[np.complex128], tol: float = 1e-12) -> bool:
    """Check U^dagger U = I in max-entry norm"""
    u = np.asarray(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def phase_aligned_distance(u: NDArray[np.complex128], v: NDArray[np.complex128]) -> float:
    """
    Max-entry difference between U and V after removing their relative global phase

    The phase is read off U's largest-magnitude entry.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    k = np.unravel_index(np.argmax(np.abs(u)), u.shape)
    ratio = v[k] / u[k] if abs(u[k]) > 0 else 1.0
    phase = ratio / abs(ratio) if abs(ratio) > 0 else 1.0
    return float(np.max(np.abs(u * phase - v)))


def trace_gate_fidelity(u: NDArray[np.complex128], v: NDArray[np.complex128]) -> float:
    """|Tr(U^dagger V) / d|^2, blind to global phase"""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    d = u.shape[0]
    value = abs(np.trace(u.conj().T @ v) / d) ** 2
    return float(min(1.0, value))


def z_corrected_fidelity(u: Unitary2, v: Unitary2) -> float:
    """
    Trace fidelity of V against U after the best virtual z before and after V

    max over a, b of |Tr(U^dagger Z_a V Z_b) / 2|^2, which for SU(2) reduces to
    (|U00||V00| + |U01||V01|)^2.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    value = (abs(u[0, 0]) * abs(v[0, 0]) + abs(u[0, 1]) * abs(v[0, 1])) ** 2
    return float(min(1.0, value))


@dataclass(frozen=True)
class EulerZXZ:
    """Euler angles of U = Z_alpha X_beta Z_gamma"""

    alpha: float
    beta: float
    gamma: float

    def matrix(self) -> Unitary2:
        """Rebuild the SU(2) element (no global phase)"""
        return compose(
            [rotation("z", self.gamma), rotation("x", self.beta), rotation("z", self.alpha)]
        )


def euler_zxz(u: Unitary2) -> Tuple[EulerZXZ, float]:
    """
    Decompose U = e^{i phase} Z_alpha X_beta Z_gamma

    beta is in [0, pi]; alpha, gamma in (-pi, pi]. At beta in {0, pi} gamma is fixed to 0.

    Returns:
        Tuple of (EulerZXZ, global phase in radians)
    """
    u = np.asarray(u, dtype=complex)
    v = u / np.sqrt(np.linalg.det(u))
    a, b = v[0, 0], v[0, 1]

    beta = float(2 * np.arctan2(abs(b), abs(a)))
    if abs(b) < _DEGENERATE_TOLERANCE:
        alpha, gamma = -2 * np.angle(a), 0.0
    elif abs(a) < _DEGENERATE_TOLERANCE:
        alpha, gamma = -2 * np.angle(b) - np.pi, 0.0
    else:
        alpha = -np.angle(a) - np.angle(b) - np.pi / 2
        gamma = -np.angle(a) + np.angle(b) + np.pi / 2

    euler = EulerZXZ(wrap_angle(float(alpha)), beta, wrap_angle(float(gamma)))

    rebuilt = euler.matrix()
    k = np.unravel_index(np.argmax(np.abs(rebuilt)), rebuilt.shape)
    phase = float(np.angle(u[k] / rebuilt[k]))
    return euler, phase


def local_z(a: float, b: float) -> Unitary4:
    """Z_a (x) Z_b"""
    return np.kron(rotation("z", a), rotation("z", b))


def _local_z_diagonal(a: NDArray[np.float64], b: NDArray[np.float64]) -> NDArray[np.complex128]:
    # diag(Z_a (x) Z_b), broadcast over a and b
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    s1 = np.array([1.0, 1.0, -1.0, -1.0])
    s2 = np.array([1.0, -1.0, 1.0, -1.0])
    return np.exp(-0.5j * (s1 * a + s2 * b))


@dataclass(frozen=True)
class LocalZEquivalence:
    """Result of a SWAP-up-to-local-z search"""

    fidelity: float
    angles: Tuple[float, float, float, float]
    global_phase: float
    converged: bool


def equivalent_up_to_local_z(g: Unitary4, target: Unitary4) -> LocalZEquivalence:
    """
    Maximise |Tr(target^dagger (Z_a Z_b) G (Z_c Z_d)) / 4|^2 over the four z-angles

    A 16^3 grid over (a, b, c) with d = 0 seeds a BFGS refinement of all four angles.

    Args:
        g: Two-qubit gate to test
        target: Reference gate

    Returns:
        LocalZEquivalence with the best fidelity and angles (a, b, c, d)
    """
    g = np.asarray(g, dtype=complex)
    target = np.asarray(target, dtype=complex)
    weights = target.conj() * g

    def overlap(x: NDArray[np.float64]) -> complex:
        d1 = _local_z_diagonal(x[0], x[1])
        d2 = _local_z_diagonal(x[2], x[3])
        return complex(d1 @ weights @ d2) / 4

    def objective(x: NDArray[np.float64]) -> float:
        return -abs(overlap(x)) ** 2

    grid = np.arange(_GRID_POINTS) * (2 * np.pi / _GRID_POINTS)
    d1 = _local_z_diagonal(grid[:, None], grid[None, :])
    d2 = _local_z_diagonal(grid, np.zeros_like(grid))
    values = np.abs(np.einsum("abi,ij,cj->abc", d1, weights, d2) / 4) ** 2

    order = np.argsort(-values, axis=None, kind="stable")[:4]
    seeds = [np.array([*(grid[i] for i in np.unravel_index(k, values.shape)), 0.0]) for k in order]

    best_x = seeds[0]
    best_f = float(values.flat[order[0]])
    converged = best_f >= 1.0 - 1e-15

    if not converged:
        for seed in seeds:
            result = minimize(objective, seed, method="BFGS", options={"gtol": 1e-12})
            if -result.fun > best_f:
                best_f, best_x = float(-result.fun), result.x
            converged = converged or bool(result.success)
        if not converged:
            logger.warning("local-z search did not converge; best fidelity %.12g", best_f)

    angles = tuple(wrap_angle(float(t)) for t in best_x)
    phase = float(np.angle(overlap(np.asarray(best_x))))
    return LocalZEquivalence(
        fidelity=min(1.0, best_f),
        angles=(angles[0], angles[1], angles[2], angles[3]),
        global_phase=phase,
        converged=converged,
    )
