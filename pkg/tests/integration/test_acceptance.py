"""
End-to-end checks of the default scenario: delta = 10, sigma = 60, ell = 4, theta = phi = pi/2
"""

import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from spinaddress.fidelity import MonteCarloRunner, monte_carlo_average
from spinaddress.oracle import compare_with_bound, verify_swap_plan
from spinaddress.sequencer import BETA_MAX, GateRequest, plan_sequence, synthesize_gate
from spinaddress.spectrum import SpectrumParams, occupancy, sample_config
from spinaddress.su2 import EulerZXZ, compose, phase_aligned_distance, rotation
from spinaddress.swap import ExchangeLink, composite_z_angles, direct_swap_duration, plan_swap

HALF_PI = math.pi / 2


@pytest.mark.integration
class TestSwapSynthesis:
    """Composite SWAP plans across exchange strengths and gradients"""

    @pytest.mark.parametrize("j_max", [10.0, 25.0, 50.0])
    @pytest.mark.parametrize("delta_ez", [5.0, -5.0, 85.0, -85.0, 200.0, -200.0])
    def test_calibrated_plans_are_swaps(self, j_max, delta_ez):
        """Test every calibrated plan is SWAP up to local z in exact 4x4 evolution"""
        link = ExchangeLink(j_max=j_max, delta_ez=delta_ez, ez_bar=150.0)
        result = verify_swap_plan(plan_swap(link), link)
        assert result.fidelity >= 1 - 1e-9

    def test_composite_identity_on_random_angles(self):
        """Test the (chi, phi, chi) identity on 500 random valid angle pairs"""
        rng = np.random.default_rng(500)
        checked = 0
        while checked < 500:
            gamma = rng.uniform(-1.5, 1.5)
            alpha = rng.uniform(-math.pi, math.pi)
            if abs(math.tan(gamma) * math.sin(alpha / 2)) > 0.99 or abs(alpha) < 1e-9:
                continue
            phi, chi = composite_z_angles(gamma, alpha)
            axis = [math.sin(gamma), 0.0, math.cos(gamma)]
            built = compose([rotation(axis, chi), rotation("x", phi), rotation(axis, chi)])
            assert phase_aligned_distance(rotation("z", alpha), built) < 1e-10
            checked += 1

    def test_large_gradient_duration(self):
        """Test the pi/2-accounting duration approaches pi^2 / 2J"""
        plan = plan_swap(ExchangeLink(j_max=50.0, delta_ez=5000.0), HALF_PI, pad=False)
        assert plan.total_duration == pytest.approx(math.pi**2 / 100, abs=2e-3)

    def test_small_gradient_duration(self):
        """Test the pi/2-accounting duration approaches (3.5 pi + sqrt 2) / J"""
        plan = plan_swap(ExchangeLink(j_max=50.0, delta_ez=0.005), HALF_PI, pad=False)
        expected = (3.5 * math.pi + math.sqrt(2)) / 50.0
        assert plan.total_duration == pytest.approx(expected, rel=0.02)

    def test_direct_exchange_calibration(self):
        """Test pure exchange needs pi / J at J = 50"""
        assert direct_swap_duration(50.0).calibrated == pytest.approx(0.0628, abs=1e-4)


@pytest.mark.integration
class TestGateSynthesis:
    """Arbitrary single-qubit gates on the six-site example"""

    def test_half_pi_x(self, six_site_config):
        """Test X(pi/2) takes one quarter-turn sequence and a virtual z"""
        result = synthesize_gate(GateRequest(EulerZXZ(0.0, HALF_PI, 0.0), 0), six_site_config)
        (plan,) = result.plans
        assert plan.theta == pytest.approx(HALF_PI, abs=1e-10)
        assert abs(plan.virtual_z_post) == pytest.approx(HALF_PI, abs=1e-9)
        assert phase_aligned_distance(result.unitary(), rotation("x", HALF_PI)) < 1e-9

    def test_large_beta_splits(self, six_site_config):
        """Test beta = 0.9 pi needs two sequences"""
        euler = EulerZXZ(0.2, 0.9 * math.pi, -0.7)
        result = synthesize_gate(GateRequest(euler, 0), six_site_config)
        assert len(result.plans) == 2
        assert phase_aligned_distance(result.unitary(), euler.matrix()) < 1e-9

    def test_random_targets_round_trip(self, six_site_config, rng):
        """Test 200 random single-qubit gates are realized, including two-sequence ones"""
        split = 0
        for u in unitary_group.rvs(2, size=200, random_state=rng):
            request = GateRequest.from_unitary(u, 0)
            result = synthesize_gate(request, six_site_config, j_max=None)
            assert phase_aligned_distance(result.unitary(), u) < 1e-9
            split += request.euler.beta > BETA_MAX
        assert split > 0


@pytest.mark.integration
@pytest.mark.slow
class TestExactAgainstBound:
    """Exact propagation never falls below the analytic term"""

    def test_random_six_qubit_arrays(self):
        params = SpectrumParams()
        checked = 0
        for stream in range(200):
            config = sample_config(params, 6, seed=9, stream=stream)
            if not occupancy(config).is_addressable():
                continue
            plan = plan_sequence(config, 0, HALF_PI, HALF_PI, j_max=None)
            comparison = compare_with_bound(plan, config)
            assert comparison.exact >= comparison.bound - 1e-6
            assert comparison.exact <= 1.0
            # Trace infidelity of a product of four idles is at most 4x the sum of theirs
            assert comparison.exact_raw <= comparison.exact
            assert 1 - comparison.exact_raw <= 4 * (1 - comparison.bound) + 1e-3
            checked += 1
            if checked == 100:
                break
        assert checked == 100


@pytest.mark.integration
@pytest.mark.slow
class TestFidelitySweep:
    """Configuration-averaged fidelity against array size"""

    @pytest.mark.parametrize("estimator", ["mc_mean", "paper_weighted"])
    def test_twenty_five_qubits_above_99_percent(self, estimator):
        report = monte_carlo_average(SpectrumParams(), 25, 10_000, seed=0, estimator=estimator)
        assert report.f_avg >= 0.99
        assert report.n_excluded == 0

    def test_linear_against_exponential_scaling(self):
        sizes = [2, 5, 10, 15, 20, 25, 30, 40, 50]
        points = MonteCarloRunner(workers=4).sweep(sizes, 2_000, seed=0)
        n = np.array(sizes, dtype=float)
        sequence = np.array([p.sequence.f_avg for p in points])
        simple = np.array([p.simple.f_avg for p in points])

        fit = np.polyval(np.polyfit(n, sequence, 1), n)
        assert np.max(np.abs(fit - sequence)) <= 5e-4
        assert np.all(np.diff(sequence) < 0)

        # Both curves use trace fidelity; the slow pulse loses on every size
        assert np.all(simple < sequence)
        assert simple[sizes.index(5)] < 0.99
        assert sequence[sizes.index(25)] >= 0.99
        for size in (5, 10, 15, 20, 25):
            assert simple[sizes.index(size)] <= simple[0] * 0.9 ** (size - 2)

    def test_monte_carlo_converges(self):
        """Test 10^3 and 10^5 sampled arrays agree at 25 qubits"""
        params = SpectrumParams()
        small = monte_carlo_average(params, 25, 1_000, seed=0, workers=4)
        large = monte_carlo_average(params, 25, 100_000, seed=0, workers=4)
        assert abs(small.f_avg - large.f_avg) <= 1e-4
