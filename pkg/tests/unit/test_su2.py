"""
Unit tests for the SU(2) helpers
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from spinaddress.exceptions import InvalidAxisError
from spinaddress.su2 import (
    PAULI_I,
    PAULI_X,
    SWAP,
    EulerZXZ,
    axis_vector,
    compose,
    equivalent_up_to_local_z,
    euler_zxz,
    is_unitary,
    local_z,
    phase_aligned_distance,
    rotation,
    trace_gate_fidelity,
    wrap_angle,
    z_corrected_fidelity,
)

angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi, allow_nan=False)


class TestRotation:
    """Test cases for rotation and axis handling"""

    @pytest.mark.parametrize("axis", ["x", "y", "z", [0.6, 0.0, 0.8]])
    def test_rotation_is_unitary(self, axis):
        """Test every rotation is unitary"""
        assert is_unitary(rotation(axis, 1.234))

    def test_pi_about_x_is_pauli_x(self):
        """Test X(pi) equals -i sigma_x"""
        assert np.allclose(rotation("x", math.pi), -1j * PAULI_X)

    def test_full_turn_keeps_sign(self):
        """Test a 2 pi rotation returns -I"""
        assert np.allclose(rotation("y", 2 * math.pi), -PAULI_I)

    def test_zero_angle_is_identity(self):
        """Test zero rotation is the identity"""
        assert np.allclose(rotation("z", 0.0), PAULI_I)

    @pytest.mark.parametrize("axis", ["w", [1.0, 1.0, 0.0], [1.0, 0.0]])
    def test_invalid_axis(self, axis):
        """Test unknown labels, non-unit and wrong-shape vectors are rejected"""
        with pytest.raises(InvalidAxisError):
            axis_vector(axis)

    def test_non_finite_angle(self):
        """Test NaN angles are rejected"""
        with pytest.raises(ValueError):
            rotation("x", float("nan"))

    def test_label_is_case_insensitive(self):
        """Test upper-case labels resolve"""
        assert np.allclose(axis_vector("X"), [1.0, 0.0, 0.0])


class TestCompose:
    """Test cases for time-ordered composition"""

    def test_first_element_acts_first(self):
        """Test compose([A, B]) == B @ A"""
        a, b = rotation("x", 0.3), rotation("y", 0.7)
        assert np.allclose(compose([a, b]), b @ a)

    def test_empty_sequence(self):
        """Test composing nothing is an error"""
        with pytest.raises(ValueError):
            compose([])

    def test_inverse_cancels(self):
        """Test U followed by its inverse is the identity"""
        u = rotation([0.0, 0.6, 0.8], 2.1)
        assert np.allclose(compose([u, u.conj().T]), PAULI_I)


class TestFidelities:
    """Test cases for fidelity measures"""

    def test_trace_fidelity_ignores_global_phase(self):
        """Test a pure global phase leaves fidelity at one"""
        u = rotation("x", 0.4)
        assert trace_gate_fidelity(u, np.exp(0.9j) * u) == pytest.approx(1.0)

    def test_trace_fidelity_of_orthogonal_gates(self):
        """Test I against X(pi) is zero"""
        assert trace_gate_fidelity(PAULI_I, rotation("x", math.pi)) == pytest.approx(0.0)

    def test_z_correction_removes_z_errors(self):
        """Test z rotations on either side do not count"""
        u = rotation("x", 0.8)
        v = compose([rotation("z", 0.3), u, rotation("z", -1.1)])
        assert trace_gate_fidelity(u, v) < 0.99
        assert z_corrected_fidelity(u, v) == pytest.approx(1.0)

    @given(a=angles, b=angles)
    @settings(max_examples=50, deadline=None)
    def test_z_corrected_bounds_trace(self, a, b):
        """Test the z-corrected fidelity never falls below the trace fidelity"""
        u, v = rotation("x", a), rotation([0.0, 0.6, 0.8], b)
        assert z_corrected_fidelity(u, v) >= trace_gate_fidelity(u, v) - 1e-12

    def test_phase_aligned_distance(self):
        """Test the distance ignores global phase but sees real differences"""
        u = rotation("y", 1.0)
        assert phase_aligned_distance(u, -1j * u) == pytest.approx(0.0, abs=1e-12)
        assert phase_aligned_distance(u, rotation("y", 1.1)) > 1e-3


class TestEuler:
    """Test cases for the ZXZ decomposition"""

    @given(a=angles, b=st.floats(min_value=0.01, max_value=3.13), c=angles)
    @settings(max_examples=100, deadline=None)
    def test_decomposition_rebuilds_matrix(self, a, b, c):
        """Test Z_a X_b Z_c is rebuilt to 1e-10 up to the reported phase"""
        u = np.exp(0.37j) * EulerZXZ(a, b, c).matrix()
        euler, phase = euler_zxz(u)
        assert 0.0 <= euler.beta <= math.pi
        assert np.max(np.abs(np.exp(1j * phase) * euler.matrix() - u)) < 1e-10

    @pytest.mark.parametrize("u", [PAULI_I, rotation("z", 0.7), rotation("x", math.pi)])
    def test_degenerate_beta(self, u):
        """Test beta in {0, pi} fixes gamma to zero"""
        euler, phase = euler_zxz(u)
        assert euler.gamma == 0.0
        assert phase_aligned_distance(euler.matrix(), u) < 1e-10

    def test_wrap_angle_range(self):
        """Test wrapping into (-pi, pi]"""
        assert wrap_angle(math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)
        assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


class TestLocalZEquivalence:
    """Test cases for the SWAP-up-to-local-z search"""

    def test_swap_dressed_with_z(self):
        """Test SWAP sandwiched between local z is recognised with fidelity one"""
        g = local_z(0.4, -1.2) @ SWAP @ local_z(2.0, 0.3)
        result = equivalent_up_to_local_z(g, SWAP)
        assert result.fidelity == pytest.approx(1.0, abs=1e-9)
        assert result.converged

    def test_identity_is_far_from_swap(self):
        """Test the identity does not pass as SWAP"""
        result = equivalent_up_to_local_z(np.eye(4, dtype=complex), SWAP)
        assert result.fidelity < 0.5


class TestRandomUnitaries:
    """Test cases over seeded batches of random unitaries"""

    @pytest.fixture
    def unitaries(self, rng):
        return unitary_group.rvs(2, size=1000, random_state=rng)

    def test_trace_fidelity_symmetric(self, unitaries):
        """Test F(U, V) = F(V, U) for 1000 random pairs"""
        for u, v in zip(unitaries, np.roll(unitaries, 1, axis=0)):
            assert trace_gate_fidelity(u, v) == pytest.approx(trace_gate_fidelity(v, u), abs=1e-12)

    def test_trace_fidelity_phase_invariant(self, unitaries, rng):
        """Test a global phase on either argument leaves the fidelity unchanged"""
        phases = np.exp(1j * rng.uniform(-math.pi, math.pi, size=(len(unitaries), 2)))
        for (u, v), (p, q) in zip(zip(unitaries, np.roll(unitaries, 1, axis=0)), phases):
            reference = trace_gate_fidelity(u, v)
            assert trace_gate_fidelity(p * u, v) == pytest.approx(reference, abs=1e-12)
            assert trace_gate_fidelity(u, q * v) == pytest.approx(reference, abs=1e-12)

    def test_euler_round_trip(self, unitaries):
        """Test decomposition and recomposition of 1000 random unitaries"""
        for u in unitaries:
            euler, phase = euler_zxz(u)
            assert np.max(np.abs(np.exp(1j * phase) * euler.matrix() - u)) < 1e-10

    def test_compose_associative(self, unitaries):
        """Test (AB)C = A(BC) for consecutive triples"""
        for a, b, c in zip(unitaries[:-2], unitaries[1:-1], unitaries[2:]):
            left = compose([compose([a, b]), c])
            right = compose([a, compose([b, c])])
            assert np.max(np.abs(left - right)) < 1e-12
            assert np.max(np.abs(compose([a, b, c]) - left)) < 1e-12
