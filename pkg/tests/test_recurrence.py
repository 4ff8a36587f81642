import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lrq.recurrence import (SpectralEnsemble, avg_frequency, ball_volume, characteristic_function, default_scan_step,
                            fidelity, first_recurrence_scan, incommensurate_ladder, kitaev_recurrence_bridge,
                            recurrence_estimate, uniform_Q, uniform_Q_trace)
from lrq.spectra import CouplingSpec, hopping_coeff_limit, pairing_coeff_limit

GOLDEN = (1 + math.sqrt(5)) / 2


class TestEnsemble:
    def test_populations_must_sum_to_one(self):
        with pytest.raises(ValueError):
            SpectralEnsemble([0.0, 1.0], [0.5, 0.6])

    def test_rejects_negative_and_nonfinite(self):
        with pytest.raises(ValueError):
            SpectralEnsemble([0.0, 1.0], [1.5, -0.5])
        with pytest.raises(ValueError):
            SpectralEnsemble([0.0, np.inf], [0.5, 0.5])


class TestFidelity:
    def test_origin(self):
        ens = SpectralEnsemble([0.3, 1.1, 2.0], [0.2, 0.3, 0.5])
        assert characteristic_function(ens, 0.0) == pytest.approx(1.0)
        assert fidelity(ens, 0.0) == pytest.approx(1.0)

    def test_single_level(self):
        ens = SpectralEnsemble.uniform([4.2])
        for t in (0.1, 3.0, 1e4):
            assert abs(characteristic_function(ens, t)) == pytest.approx(1.0)
            assert fidelity(ens, t) == pytest.approx(1.0)

    def test_two_level_node(self):
        ens = SpectralEnsemble.uniform([0.0, 1.0])
        assert abs(characteristic_function(ens, math.pi)) < 1e-16
        assert fidelity(ens, math.pi) < 1e-30

    @given(st.lists(st.floats(-5, 5), min_size=2, max_size=50), st.floats(0, 1e3))
    @settings(max_examples=200, deadline=None)
    def test_identity_and_bounds(self, energies, t):
        ens = SpectralEnsemble.uniform(energies)
        q = uniform_Q(energies, t)
        assert 0 <= q <= 1 + 1e-15
        assert q == pytest.approx(1 - fidelity(ens, t), abs=1e-12)

    def test_almost_periodic_rational_spectrum(self):
        # E_n = a_n / b: chi is periodic with period 2 pi b
        energies = [Fraction(1, 6), Fraction(5, 6), Fraction(7, 3), Fraction(3, 2)]
        b = 6
        ens = SpectralEnsemble.uniform([float(e) for e in energies])
        period = 2 * math.pi * b
        for t in (0.3, 1.7, 11.0):
            assert fidelity(ens, t + period) == pytest.approx(fidelity(ens, t), abs=1e-12)


class TestUniformQ:
    def test_zero_time(self):
        assert uniform_Q([0.1, 0.7, 3.0], 0.0) == 0.0

    def test_degenerate(self):
        assert uniform_Q([2.0, 2.0, 2.0], 17.3) == 0.0

    def test_two_level(self):
        assert uniform_Q([0.0, 1.0], math.pi) == pytest.approx(1.0)

    def test_trace_matches(self):
        e = [0.0, 0.4, 1.3, 2.2]
        t = np.linspace(0, 30, 31)
        assert np.allclose(uniform_Q_trace(e, t), [uniform_Q(e, x) for x in t], atol=1e-13)

    def test_needs_two_levels(self):
        with pytest.raises(ValueError):
            uniform_Q([1.0], 1.0)


class TestEstimate:
    def test_avg_frequency(self):
        assert avg_frequency([0.0, 2.5]) == 2.5
        assert avg_frequency([1.0, 3.0, 3.0, 3.0]) == pytest.approx(2.0)
        assert avg_frequency([0.0, 1.0, 2.0]) == pytest.approx(math.sqrt(2.5))

    @pytest.mark.parametrize("dim,R,expected", [(0, 3.0, 1.0), (1, 2.0, 4.0), (2, 1.0, math.pi),
                                                (3, 1.0, 4 * math.pi / 3), (4, 2.0, math.pi**2 / 2 * 16)])
    def test_ball_volume(self, dim, R, expected):
        assert ball_volume(dim, R) == pytest.approx(expected, rel=1e-14)

    def test_ball_volume_high_dimension(self):
        # recursion V_d = 2 pi R^2 / d * V_{d-2}
        for d in range(2, 200):
            assert ball_volume(d, 1.3) == pytest.approx(2 * math.pi * 1.3**2 / d * ball_volume(d - 2, 1.3), rel=1e-12)

    def test_fields(self):
        est = recurrence_estimate([0.0, 1.0, GOLDEN], 0.1)
        assert est.radius == pytest.approx(math.sqrt(2 * 0.1 / 8))
        assert est.sphere_volume == pytest.approx(2 * est.radius)
        assert est.tau == pytest.approx(1 / (math.sqrt(2) * est.omega_avg * est.sphere_volume))
        assert est.tau > 0 and est.M == 3

    @given(st.floats(0.01, 100))
    @settings(max_examples=30, deadline=None)
    def test_energy_scaling(self, c):
        e = np.array([0.0, 1.0, GOLDEN, 2.9])
        assert recurrence_estimate(c * e, 0.1).tau == pytest.approx(recurrence_estimate(e, 0.1).tau / c, rel=1e-12)

    def test_quasi_degenerate_large_m(self):
        # gaps shrinking like 1/n keep omega roughly fixed; the ball volume eventually collapses
        taus = [recurrence_estimate(1 - 1 / np.arange(1, M + 1), 0.1).tau for M in (3, 10, 40)]
        assert all(t > 0 for t in taus)

    @pytest.mark.parametrize("eps", [0.0, 1.0, -0.1])
    def test_epsilon_domain(self, eps):
        with pytest.raises(ValueError):
            recurrence_estimate([0.0, 1.0, 2.0], eps)

    def test_needs_three_levels(self):
        with pytest.raises(ValueError):
            recurrence_estimate([0.0, 1.0], 0.1)


class TestScan:
    def test_two_level_first_crossing(self):
        dt = default_scan_step([0.0, 1.0])
        tau = first_recurrence_scan([0.0, 1.0], 0.01)
        # Q = sin^2(t/2) first re-enters [0, eps) at 2 pi - 2 asin(sqrt eps)
        crossing = 2 * math.pi - 2 * math.asin(0.1)
        assert crossing <= tau < crossing + dt
        assert abs(tau - 2 * math.pi) < 0.2 + dt

    def test_degenerate_is_immediate(self):
        assert first_recurrence_scan([1.0, 1.0, 1.0], 0.1, t_min=0.5) == 0.5

    def test_golden_ratio_case(self):
        e = [0.0, 1.0, GOLDEN]
        tau = first_recurrence_scan(e, 0.1, t_max=1e4)
        assert tau is not None
        assert uniform_Q(e, tau) < 0.1
        assert 2 < tau < 50

    def test_none_when_horizon_short(self):
        assert first_recurrence_scan([0.0, 1.0, GOLDEN, math.e, math.pi], 0.01, t_max=5.0) is None

    def test_rejects_bad_start(self):
        with pytest.raises(ValueError):
            first_recurrence_scan([0.0, 1.0], 0.1, t_min=0.0)

    def test_chunking_irrelevant(self):
        e = [0.0, 1.0, GOLDEN, math.sqrt(7)]
        assert first_recurrence_scan(e, 0.1, t_max=1e4, chunk=64) == first_recurrence_scan(e, 0.1, t_max=1e4)


class TestBridge:
    def test_levels(self):
        ens = kitaev_recurrence_bridge(CouplingSpec(0.5, 64), 0.4, 6)
        assert ens.M == 6
        assert ens.energies[0] == pytest.approx(0.6)
        n = 3
        expected = math.hypot(0.4 - hopping_coeff_limit(0.5, n), pairing_coeff_limit(0.5, n))
        assert ens.energies[n] == pytest.approx(expected)
        assert np.allclose(ens.populations, 1 / 6)

    def test_accumulation(self):
        e = kitaev_recurrence_bridge(CouplingSpec(0.5, 64), 0.4, 60).energies
        gaps = np.abs(np.diff(e))
        assert gaps[-10:].mean() < gaps[2:12].mean()

    def test_flat_coupling_limit(self):
        # hopping vanishes as alpha -> 0 but pairing tends to (1 - cos(pi n)) / (pi n):
        # even modes collapse onto h, odd modes approach it like 1/n
        e = kitaev_recurrence_bridge(CouplingSpec(0.001, 64), 0.4, 40).energies
        assert np.allclose(e[2::2], 0.4, atol=1e-2)
        odd = np.arange(1, 40, 2)
        assert np.allclose(e[1::2], np.hypot(0.4, 2 / (np.pi * odd)), atol=1e-2)

    def test_domain(self):
        with pytest.raises(ValueError):
            kitaev_recurrence_bridge(CouplingSpec(1.5, 64), 0.4, 5)


def test_incommensurate_ladder_is_nearly_even():
    e = incommensurate_ladder(20, spacing=2.0)
    gaps = np.diff(e)
    assert np.all(gaps > 1.0) and np.all(gaps < 3.0)
