import math

import mpmath as mp
import numpy as np
import pytest
from scipy.linalg import circulant, eigvalsh

from lrq.errors import CondensedPhaseError
from lrq.series import TimeSeries
from lrq.spectra import CouplingSpec
from lrq.spherical import (SphericalQuench, cesaro_fluctuation, constraint_sum, coupling_row, critical_coupling,
                           critical_quench, disordered_couplings, disordered_ensemble, dos_discrete, dos_disordered,
                           dos_flat, dos_powerlaw, dos_semicircle, dos_two_level, ermakov_width,
                           fit_equilibration_time, fluctuation_curve, observable_long_time_mean, quench_observable,
                           quench_observable_cosine, sample_rng, semicircle_density, solve_constraint)


def rk4_ermakov(w0, wf, t_max, h):
    # xi'' = -wf**2 xi + w0**2 / xi**3, xi(0) = 1, xi'(0) = 0
    def f(y):
        return np.array([y[1], -wf**2 * y[0] + w0**2 / y[0] ** 3])

    y = np.array([1.0, 0.0])
    out = [y[0]]
    for _ in range(int(round(t_max / h))):
        k1 = f(y)
        k2 = f(y + h / 2 * k1)
        k3 = f(y + h / 2 * k2)
        k4 = f(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(y[0])
    return np.array(out)


class TestDensities:
    def test_flat_levels(self):
        dos = dos_powerlaw(CouplingSpec(0.0, 64))
        assert dos.ground == pytest.approx(-(1 - 1 / 64), abs=1e-14)
        assert np.allclose(dos.energies, 1 / 64, atol=1e-14)
        assert dos.total_weight == pytest.approx(1.0)

    @pytest.mark.parametrize("alpha", [0.3, 0.9, 2.0])
    def test_fft_spectrum_matches_dense(self, alpha):
        spec = CouplingSpec(alpha, 96)
        dense = eigvalsh(circulant(coupling_row(spec)))
        dos = dos_powerlaw(spec)
        assert np.allclose(np.sort(np.r_[dos.ground, dos.energies]), dense, atol=1e-13)

    def test_trace_vanishes(self):
        dos = dos_powerlaw(CouplingSpec(0.5, 128))
        assert dos.ground + dos.energies.sum() == pytest.approx(0.0, abs=1e-12)

    def test_semicircle_normalized(self):
        dos = dos_semicircle(0.4, 1.0)
        assert dos.bulk_average(lambda e: np.ones_like(e)) == pytest.approx(1.0, abs=1e-13)
        assert dos.bulk_average(lambda e: e**2) == pytest.approx(0.4**2, rel=1e-12)
        assert dos.ground == pytest.approx(-1.16)

    def test_semicircle_density_shape(self):
        e = np.linspace(-1, 1, 2001)
        assert np.trapezoid(semicircle_density(e, 0.5), e) == pytest.approx(1.0, abs=1e-4)
        assert semicircle_density(1.5, 0.5) == 0

    def test_semicircle_requires_weak_disorder(self):
        with pytest.raises(ValueError):
            dos_semicircle(1.0, 1.0)

    def test_disordered_sample_matches_semicircle(self):
        dos = dos_disordered(800, 0.4, 1.0, seed=3)
        assert dos.ground == pytest.approx(-1 - 0.16, abs=0.05)
        hist, edges = np.histogram(dos.energies, bins=16, range=(-0.8, 0.8), density=True)
        centres = (edges[1:] + edges[:-1]) / 2
        assert np.max(np.abs(hist - semicircle_density(centres, 0.4))) < 0.2

    def test_two_level_validation(self):
        with pytest.raises(ValueError):
            dos_two_level(1.0, 0.0, 10)


class TestConstraint:
    def test_flat_critical_coupling(self):
        assert critical_coupling(dos_flat(1.0)) == pytest.approx(0.25)
        assert critical_coupling(dos_flat(2.0)) == pytest.approx(0.5)

    def test_boundary_solution(self):
        assert solve_constraint(0.25, dos_flat(1.0)) == pytest.approx(0.5, abs=1e-12)

    def test_flat_closed_form(self):
        # 2 / sqrt(2 mu) = 1 / sqrt(g)
        for g in (0.3, 1.0, 4.0):
            assert solve_constraint(g, dos_flat(1.0)) == pytest.approx(2 * g, rel=1e-12)

    def test_condensed(self):
        with pytest.raises(CondensedPhaseError):
            solve_constraint(0.2, dos_flat(1.0))

    @pytest.mark.parametrize("g", [0.3, 0.8, 2.5])
    def test_roundtrip_powerlaw(self, g):
        dos = dos_powerlaw(CouplingSpec(0.5, 256))
        mu = solve_constraint(g, dos)
        assert constraint_sum(mu, dos) == pytest.approx(1 / math.sqrt(g), rel=1e-12)

    def test_semicircle_critical_coupling_oracle(self):
        J, J0 = 0.3, 1.0
        mp.mp.dps = 25
        mu_c = (J0 + J * J / J0) / 2
        rho = lambda e: 2 / mp.pi * mp.sqrt(4 * J * J - e * e) / (2 * J) ** 2
        F = mp.quad(lambda e: 2 * rho(e) / mp.sqrt(2 * mu_c + e), [-2 * J, 0, 2 * J])
        assert critical_coupling(dos_semicircle(J, J0)) == pytest.approx(float(F) ** -2, rel=1e-10)

    def test_powerlaw_converges_to_quarter(self):
        gaps = [abs(critical_coupling(dos_powerlaw(CouplingSpec(0.15, N))) - 0.25) for N in (2**8, 2**11, 2**14)]
        assert gaps[0] > gaps[1] > gaps[2]

    def test_divergent_sum_gives_zero(self):
        dos = dos_discrete([-1.0, -1.0, 0.5])
        assert critical_coupling(dos) == 0.0
        assert solve_constraint(1.0, dos) > dos.mu_critical


class TestErmakov:
    @pytest.mark.parametrize("w0,wf", [(2.0, 1.0), (1.0, 2.0), (1.0, 1.0), (0.7, 1.9)])
    def test_against_rk4(self, w0, wf):
        h = 1e-3
        t = np.arange(int(round(20 / h)) + 1) * h
        assert np.max(np.abs(ermakov_width(w0, wf, t) - rk4_ermakov(w0, wf, 20, h))) < 1e-6

    def test_no_quench_constant(self):
        assert np.allclose(ermakov_width(1.3, 1.3, np.linspace(0, 9, 50)), 1.0)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            ermakov_width(0.0, 1.0, 1.0)


class TestQuench:
    @pytest.mark.parametrize("dos", [dos_flat(1.0), dos_flat(1.0, 128), dos_semicircle(0.3, 1.0),
                                     dos_powerlaw(CouplingSpec(0.4, 512))], ids=["flat", "flat-N", "semicircle", "powerlaw"])
    def test_starts_at_one(self, dos):
        series = quench_observable(critical_quench(dos, 2.0, 0.1))
        assert series.values[0] == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("dos", [dos_powerlaw(CouplingSpec(0.95, 256)), dos_semicircle(0.5, 1.0)], ids=["powerlaw", "semicircle"])
    def test_cosine_identity(self, dos):
        q = critical_quench(dos, 30.0, 0.05)
        assert np.allclose(quench_observable(q).values, quench_observable_cosine(q).values, atol=1e-9)

    def test_flat_single_oscillator(self):
        q = critical_quench(dos_flat(1.0), 40.0, 0.01)
        a = quench_observable(q)
        wf = math.sqrt(q.g * (2 * q.mu_final))
        # (2g/w0)(1 + e sin^2) with e = (w0/wf)^2 - 1
        w0 = math.sqrt(q.g * 2 * q.mu_initial)
        expected = 2 * q.g / w0 * (1 + ((w0 / wf) ** 2 - 1) * np.sin(wf * a.t) ** 2)
        assert np.allclose(a.values, expected, atol=1e-13)

    def test_long_time_mean(self):
        q = critical_quench(dos_semicircle(0.5, 1.0), 400.0, 0.05)
        a = quench_observable(q)
        late = a.values[a.t > 200]
        assert late.mean() == pytest.approx(observable_long_time_mean(q), abs=1e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            SphericalQuench(1.0, -5.0, 1.0, dos_flat(1.0), 1.0, 0.1)
        with pytest.raises(ValueError):
            SphericalQuench(0.0, 1.0, 1.0, dos_flat(1.0), 1.0, 0.1)

    def test_meta(self):
        q = critical_quench(dos_semicircle(0.2, 1.0), 1.0, 0.1)
        meta = quench_observable(q).meta
        assert meta["dos"] == "semicircle" and meta["J"] == 0.2


class TestFluctuations:
    def test_constant_series(self):
        s = TimeSeries(np.arange(101) * 0.1, np.full(101, 3.0))
        assert cesaro_fluctuation(s, 10.0) == pytest.approx(0.0, abs=1e-28)

    def test_sinusoid(self):
        t = np.arange(200001) * 0.01
        s = TimeSeries(t, np.cos(t))
        assert cesaro_fluctuation(s, 2000.0) == pytest.approx(0.5, abs=1e-3)

    def test_rejects_short_window(self):
        s = TimeSeries(np.arange(101) * 0.1, np.zeros(101))
        with pytest.raises(ValueError):
            cesaro_fluctuation(s, 0.5)
        with pytest.raises(ValueError):
            cesaro_fluctuation(s, 50.0)

    def test_curve_consistent(self):
        t = np.arange(1001) * 0.05
        s = TimeSeries(t, np.exp(-t) * np.cos(3 * t))
        curve = fluctuation_curve(s)
        assert curve.values[100] == pytest.approx(cesaro_fluctuation(s, curve.t[100]), rel=1e-12)

    def test_fit_synthetic_exponential(self):
        T = np.arange(1, 2001) * 0.05
        fit = fit_equilibration_time(TimeSeries(T, 3.0 * np.exp(-T / 5.0)))
        tau, R, residual = fit
        assert tau == pytest.approx(5.0, rel=1e-8)
        assert R == pytest.approx(3.0, rel=1e-6)
        assert residual < 1e-8

    def test_fit_refuses_flat(self):
        T = np.arange(1, 201) * 0.1
        assert fit_equilibration_time(TimeSeries(T, np.full(T.size, 0.2))) is None


class TestDisorder:
    def test_symmetric(self):
        u = disordered_couplings(50, 0.3, 1.0, sample_rng(1, 0))
        assert np.array_equal(u, u.T)

    def test_reproducible_streams(self):
        a = disordered_couplings(20, 0.3, 1.0, sample_rng(7, 2))
        b = disordered_couplings(20, 0.3, 1.0, sample_rng(7, 2))
        c = disordered_couplings(20, 0.3, 1.0, sample_rng(7, 3))
        assert np.array_equal(a, b) and not np.array_equal(a, c)

    def test_thread_count_irrelevant(self):
        one, e1 = disordered_ensemble(64, 0.3, 1.0, 5, 11, 3.0, 0.1, threads=1)
        many, e4 = disordered_ensemble(64, 0.3, 1.0, 5, 11, 3.0, 0.1, threads=4)
        assert np.array_equal(one.values, many.values) and np.array_equal(e1, e4)
        assert one.values[0] == pytest.approx(1.0, abs=1e-9)
