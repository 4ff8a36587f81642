"""Quantum spherical model: constraint, critical coupling and sudden-lift quenches.

Energies ``eps`` are eigenvalues ``U_lambda`` of the coupling matrix. Mode
frequencies are ``omega**2 = 2 g (mu + eps / 2)``. The lowest level is the
would-be condensate; in the normal phase its weight ``1/N`` is dropped from
every constraint integral and from the dynamics, so ``A(0) = 1`` exactly
when ``mu_initial`` solves the constraint.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad, quad_vec
from scipy.linalg import eigvalsh
from scipy.optimize import brentq

from .errors import CondensedPhaseError, NumericalError
from .series import TimeSeries, time_grid
from .spectra import CouplingSpec, kac_norm


@dataclass(frozen=True)
class DensityOfStates:
    """Bulk spectral weight plus the isolated lowest level.

    ``kind`` is ``"discrete"``, ``"two_level"`` or ``"semicircle"``. For the
    discrete kinds ``energies``/``weights`` hold the bulk levels; for the
    semicircle the bulk is the continuous density on ``[-2J, 2J]``.
    """

    kind: str
    ground: float
    ground_weight: float
    energies: np.ndarray = field(default_factory=lambda: np.empty(0))
    weights: np.ndarray = field(default_factory=lambda: np.empty(0))
    J: float | None = None
    J0: float | None = None
    N: float | None = None

    @property
    def mu_critical(self) -> float:
        return -self.ground / 2.0

    @property
    def bulk_min(self) -> float:
        if self.kind == "semicircle":
            return -2.0 * self.J
        return float(np.min(self.energies))

    @property
    def total_weight(self) -> float:
        if self.kind == "semicircle":
            return 1.0 + self.ground_weight
        return math.fsum(self.weights) + self.ground_weight

    def bulk_average(self, fn: Callable[[np.ndarray], np.ndarray]) -> float:
        """``integral rho_bulk(eps) fn(eps) d eps``."""
        if self.kind == "semicircle":
            val, _ = quad(lambda phi: _semicircle_weight(phi) * fn(2 * self.J * np.sin(phi)),
                          -np.pi / 2, np.pi / 2, epsabs=1e-14, epsrel=1e-13, limit=200)
            return val
        return math.fsum(self.weights * fn(self.energies))


def _semicircle_weight(phi):
    # rho_0(eps) d eps with eps = 2J sin(phi); the square-root edges become smooth
    return (2.0 / np.pi) * np.cos(phi) ** 2


def dos_discrete(eigenvalues) -> DensityOfStates:
    """Uniform-weight density for a finite spectrum; the minimum is the ground level."""
    eig = np.sort(np.asarray(eigenvalues, dtype=float))
    n = eig.size
    return DensityOfStates("discrete", ground=float(eig[0]), ground_weight=1.0 / n,
                           energies=eig[1:], weights=np.full(n - 1, 1.0 / n), N=n)


def coupling_row(spec: CouplingSpec) -> np.ndarray:
    """First row of ``U_ij = -J0 |i-j|**-alpha / N'`` on a ring, zero diagonal.

    ``N' = 2 * kac_norm`` counts both directions, so ``alpha = 0`` gives the
    flat matrix ``-J0/N``.
    """
    if spec.d != 1:
        raise ValueError("dos_powerlaw is one-dimensional")
    N = spec.size
    r = np.arange(N)
    dist = np.minimum(r, N - r).astype(float)
    row = np.zeros(N)
    row[1:] = dist[1:] ** -spec.alpha
    return -spec.strength * row / (2.0 * kac_norm(spec))


def dos_powerlaw(spec: CouplingSpec) -> DensityOfStates:
    row = coupling_row(spec)
    # circulant and symmetric: the spectrum is the real DFT of the row
    eig = np.fft.fft(row).real
    dos = dos_discrete(eig)
    return DensityOfStates(**{**dos.__dict__, "J0": spec.strength})


def dos_two_level(e0: float, e1: float, N: float) -> DensityOfStates:
    """Weight ``1/N`` at ``e0`` and ``(N-1)/N`` at ``e1``; ``N`` may be ``inf``."""
    if not e0 < e1:
        raise ValueError("need e0 < e1")
    w0 = 0.0 if math.isinf(N) else 1.0 / N
    return DensityOfStates("two_level", ground=float(e0), ground_weight=w0,
                           energies=np.array([float(e1)]), weights=np.array([1.0 - w0]), N=N)


def dos_flat(J0: float = 1.0, N: float = math.inf) -> DensityOfStates:
    """The ``alpha = 0`` clean spectrum ``-J0 (1 - 1/N)`` and ``J0/N``."""
    inv = 0.0 if math.isinf(N) else 1.0 / N
    dos = dos_two_level(-J0 * (1 - inv), J0 * inv, N)
    return DensityOfStates(**{**dos.__dict__, "J0": J0})


def dos_semicircle(J: float, J0: float = 1.0) -> DensityOfStates:
    """Thermodynamic-limit density of the flat-plus-Gaussian coupling matrix.

    Bulk ``(2/pi) sqrt(4J**2 - eps**2) / (2J)**2`` and an isolated level at
    ``-J0 - J**2/J0`` whose weight vanishes.
    """
    if not 0 < J < J0:
        raise ValueError(f"semicircle density needs 0 < J < J0, got J={J}, J0={J0}")
    return DensityOfStates("semicircle", ground=-J0 - J * J / J0, ground_weight=0.0, J=float(J), J0=float(J0), N=math.inf)


def semicircle_density(eps, J: float):
    eps = np.asarray(eps, dtype=float)
    e1 = 2.0 * J
    inside = np.abs(eps) < e1
    return np.where(inside, (2 / np.pi) * np.sqrt(np.clip(e1 * e1 - eps * eps, 0, None)) / e1**2, 0.0)


# -- equilibrium -----------------------------------------------------------


def constraint_sum(mu: float, dos: DensityOfStates) -> float:
    """``integral 2 rho(eps) / sqrt(2 mu + eps)`` over the bulk."""
    if 2 * mu + dos.bulk_min < 0:
        return math.inf
    with np.errstate(divide="ignore"):
        return dos.bulk_average(lambda e: 2.0 / np.sqrt(2 * mu + e))


def critical_coupling(dos: DensityOfStates) -> float:
    """``g_c`` from the constraint sum at ``mu_c``; 0 if that sum diverges."""
    total = constraint_sum(dos.mu_critical, dos)
    if not math.isfinite(total):
        return 0.0
    return total**-2


def solve_constraint(g: float, dos: DensityOfStates) -> float:
    """Chemical potential enforcing the spherical constraint at coupling ``g``."""
    if not g > 0:
        raise ValueError("g must be positive")
    target = 1.0 / math.sqrt(g)
    mu_c = dos.mu_critical
    at_critical = constraint_sum(mu_c, dos)
    if at_critical < target:
        if abs(at_critical - target) <= 1e-13 * target:
            return mu_c
        raise CondensedPhaseError("solve_constraint", f"g={g} is below g_c={at_critical ** -2}")
    scale = max(abs(mu_c), 1.0)
    hi = mu_c + scale
    while constraint_sum(hi, dos) > target:
        hi = mu_c + 2 * (hi - mu_c)
        if hi - mu_c > 1e12 * scale:
            raise NumericalError("solve_constraint", "failed to bracket the root")
    lo = mu_c
    if not math.isfinite(at_critical):
        step = hi - mu_c
        while not math.isfinite(constraint_sum(mu_c + step, dos)) or constraint_sum(mu_c + step, dos) < target:
            step /= 2
            if step < 1e-300:
                raise NumericalError("solve_constraint", "failed to bracket the root")
        lo = mu_c + step
    return brentq(lambda mu: constraint_sum(mu, dos) - target, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


# -- dynamics --------------------------------------------------------------


def ermakov_width(omega0, omegaf, t):
    """Width ``sqrt(1 + e sin(omega_f t)**2)``, ``e = (omega0/omega_f)**2 - 1``.

    Exact solution of the Ermakov-Milne equation after a sudden frequency
    change, starting from the ground-state width at ``omega0``.
    """
    omega0 = np.asarray(omega0, dtype=float)
    omegaf = np.asarray(omegaf, dtype=float)
    if np.any(omega0 <= 0) or np.any(omegaf <= 0):
        raise ValueError("frequencies must be positive")
    ratio = (omega0 / omegaf) ** 2 - 1.0
    return np.sqrt(1.0 + ratio * np.sin(omegaf * t) ** 2)


@dataclass(frozen=True)
class SphericalQuench:
    g: float
    mu_initial: float
    mu_final: float
    dos: DensityOfStates
    t_max: float
    dt: float

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError("g must be positive")
        lowest = self.dos.bulk_min
        for name, mu in (("mu_initial", self.mu_initial), ("mu_final", self.mu_final)):
            if not 2 * mu + lowest > 0:
                raise ValueError(f"{name}={mu} leaves a non-positive squared frequency (normal phase only)")

    @property
    def t(self) -> np.ndarray:
        return time_grid(self.t_max, self.dt)

    def frequencies(self, eps):
        w0 = np.sqrt(self.g * (2 * self.mu_initial + eps))
        wf = np.sqrt(self.g * (2 * self.mu_final + eps))
        return w0, wf

    def meta(self) -> dict:
        d = self.dos
        out = {"model": "spherical", "dos": d.kind, "g": self.g, "mu_initial": self.mu_initial,
               "mu_final": self.mu_final, "mu_critical": d.mu_critical, "t_max": self.t_max, "dt": self.dt}
        for key in ("J", "J0", "N"):
            if getattr(d, key) is not None:
                out[key] = getattr(d, key)
        return out


def critical_quench(dos: DensityOfStates, t_max: float, dt: float, mu_initial_factor: float = 2.0,
                    mu_final_factor: float = 1.0, g: float | None = None) -> SphericalQuench:
    """Quench ``mu: f_i mu_c -> f_f mu_c``.

    Without an explicit ``g`` it is fixed by the constraint at ``mu_initial``
    so that the pre-quench state is the constrained ground state.
    """
    mu_c = dos.mu_critical
    mu0, muf = mu_initial_factor * mu_c, mu_final_factor * mu_c
    if g is None:
        g = constraint_sum(mu0, dos) ** -2
    return SphericalQuench(g=g, mu_initial=mu0, mu_final=muf, dos=dos, t_max=t_max, dt=dt)


def _observable_terms(q: SphericalQuench, eps, t, form: str):
    w0, wf = q.frequencies(eps)
    amplitude = 2 * q.g / w0
    ratio = (w0 / wf) ** 2 - 1.0
    if form == "width":
        return amplitude * ermakov_width(w0, wf, t) ** 2
    return amplitude * (1 + ratio / 2) - amplitude * ratio / 2 * np.cos(2 * wf * t)


def _evaluate(q: SphericalQuench, form: str) -> np.ndarray:
    t = q.t
    dos = q.dos
    if dos.kind == "semicircle":
        J = dos.J

        def integrand(phi):
            return _semicircle_weight(phi) * _observable_terms(q, 2 * J * np.sin(phi), t, form)

        val, err = quad_vec(integrand, -np.pi / 2, np.pi / 2, epsabs=1e-9, epsrel=1e-10, norm="max", limit=20000)
        if not err <= 1e-8:
            raise NumericalError("quench_observable", f"semicircle quadrature error {err:.2e}")
        return val
    out = np.empty(t.size)
    rows = max(1, 2**22 // max(1, dos.energies.size))
    for lo in range(0, t.size, rows):
        tt = t[lo : lo + rows, None]
        out[lo : lo + rows] = np.sum(dos.weights * _observable_terms(q, dos.energies, tt, form), axis=1)
    return out


def quench_observable(q: SphericalQuench) -> TimeSeries:
    """``A(t) = 4 <sum s_i**2> / N`` from the per-mode Ermakov widths."""
    return TimeSeries(q.t, _evaluate(q, "width"), q.meta())


def quench_observable_cosine(q: SphericalQuench) -> TimeSeries:
    """The same observable written as mean minus a sum of cosines at ``2 omega_f``."""
    return TimeSeries(q.t, _evaluate(q, "cosine"), q.meta())


def observable_long_time_mean(q: SphericalQuench) -> float:
    """Analytic infinite-time mean of ``A``."""
    def mean_terms(eps):
        w0, wf = q.frequencies(eps)
        return 2 * q.g / w0 * (1 + ((w0 / wf) ** 2 - 1) / 2)

    return q.dos.bulk_average(mean_terms)


# -- disorder ensembles ----------------------------------------------------


def disordered_couplings(N: int, J: float, J0: float, rng: np.random.Generator) -> np.ndarray:
    """Flat ``-J0/N`` background minus a symmetric Gaussian matrix of variance ``J**2/N``."""
    a = rng.normal(0.0, J / math.sqrt(N), size=(N, N))
    u = np.triu(a) + np.triu(a, 1).T
    return -J0 / N - u


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for ensemble member ``index`` under master ``seed``."""
    return np.random.default_rng([int(seed), int(index)])


def dos_disordered(N: int, J: float, J0: float, seed: int, index: int = 0) -> DensityOfStates:
    eig = eigvalsh(disordered_couplings(N, J, J0, sample_rng(seed, index)))
    dos = dos_discrete(eig)
    return DensityOfStates(**{**dos.__dict__, "J": J, "J0": J0})


def disordered_ensemble(N: int, J: float, J0: float, samples: int, seed: int, t_max: float, dt: float,
                        mu_initial_factor: float = 2.0, mu_final_factor: float = 1.0,
                        threads: int | None = None) -> tuple[TimeSeries, np.ndarray]:
    """Sample mean of ``A(t)`` over ``samples`` disorder realisations and its standard error.

    Each realisation uses its own ``mu_c`` and constraint-fixed ``g``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")

    def one(index):
        dos = dos_disordered(N, J, J0, seed, index)
        q = critical_quench(dos, t_max, dt, mu_initial_factor, mu_final_factor)
        return quench_observable(q).values

    with ThreadPoolExecutor(max_workers=threads or 1) as pool:
        runs = np.array(list(pool.map(one, range(samples))))
    mean = runs.mean(axis=0)
    stderr = runs.std(axis=0, ddof=1) / math.sqrt(samples) if samples > 1 else np.zeros_like(mean)
    meta = {"model": "spherical", "dos": "disordered", "N": N, "J": J, "J0": J0, "samples": samples,
            "seed": seed, "mu_initial_factor": mu_initial_factor, "mu_final_factor": mu_final_factor,
            "t_max": t_max, "dt": dt}
    return TimeSeries(time_grid(t_max, dt), mean, meta), stderr


# -- equilibration diagnostics ---------------------------------------------


def _mean_and_cumulative(series: TimeSeries):
    t, a = series.t, series.values
    mean = np.trapezoid(a, t) / (t[-1] - t[0])
    cum = cumulative_trapezoid((a - mean) ** 2, t, initial=0.0)
    return mean, cum


def cesaro_fluctuation(series: TimeSeries, T: float) -> float:
    """``Q_A(T) = (1/T) int_0^T |A - Abar|**2`` with ``Abar`` over the whole record.

    ``T`` is rounded to the nearest grid point.
    """
    dt = series.dt
    if T < 10 * dt:
        raise ValueError(f"T={T} is under-resolved (needs at least 10 steps of {dt})")
    if T > series.horizon * (1 + 1e-12):
        raise ValueError("T exceeds the stored horizon")
    idx = int(round((T - series.t[0]) / dt))
    _, cum = _mean_and_cumulative(series)
    return float(cum[idx] / (series.t[idx] - series.t[0]))


def fluctuation_curve(series: TimeSeries) -> TimeSeries:
    """``Q_A(T)`` at every grid point ``T >= 10 dt``."""
    _, cum = _mean_and_cumulative(series)
    T = series.t - series.t[0]
    keep = slice(10, None)
    meta = {**series.meta, "observable": "Q_A"}
    return TimeSeries(T[keep], cum[keep] / T[keep], meta)


def fit_equilibration_time(qa: TimeSeries, min_points: int = 20):
    """Fit ``Q_A(T) ~ R exp(-T / tau_eq)`` on the decaying window.

    The window keeps points with ``1e-8 max <= Q_A <= 1e-1 max``. Returns
    ``(tau_eq, R, residual)`` with the rms residual of ``log Q_A``, or
    ``None`` when the window is too short or shows no decay.
    """
    T, Q = qa.t, np.asarray(qa.values, dtype=float)
    peak = np.max(Q)
    if not peak > 0:
        return None
    window = (Q >= 1e-8 * peak) & (Q <= 1e-1 * peak)
    if window.sum() < min_points:
        return None
    slope, intercept = np.polyfit(T[window], np.log(Q[window]), 1)
    if not slope < 0:
        return None
    residual = float(np.sqrt(np.mean((np.log(Q[window]) - (slope * T[window] + intercept)) ** 2)))
    return -1.0 / slope, math.exp(intercept), residual
