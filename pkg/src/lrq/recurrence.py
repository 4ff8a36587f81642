"""Fidelity, characteristic functions and Poincare recurrence times of discrete spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kitaev import mode_frequency
from .spectra import CouplingSpec, hopping_coeff_limit, pairing_coeff_limit


@dataclass(frozen=True)
class SpectralEnsemble:
    """Levels ``E_n`` occupied with probabilities ``p_n``."""

    energies: np.ndarray
    populations: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float).ravel()
        p = np.asarray(self.populations, dtype=float).ravel()
        if e.shape != p.shape or e.size == 0:
            raise ValueError("energies and populations must be non-empty and of equal length")
        if not np.all(np.isfinite(e)):
            raise ValueError("energies must be finite")
        if np.any(p < 0) or abs(math.fsum(p) - 1.0) > 1e-12:
            raise ValueError("populations must be nonnegative and sum to 1")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "populations", p)

    @classmethod
    def uniform(cls, energies) -> "SpectralEnsemble":
        e = np.asarray(energies, dtype=float).ravel()
        return cls(e, np.full(e.size, 1.0 / e.size))

    @property
    def M(self) -> int:
        return self.energies.size


@dataclass(frozen=True)
class RecurrenceEstimate:
    tau: float
    M: int
    epsilon: float
    omega_avg: float
    radius: float
    sphere_volume: float


def _fsum_complex(z) -> complex:
    return complex(math.fsum(z.real), math.fsum(z.imag))


def characteristic_function(ens: SpectralEnsemble, t: float) -> complex:
    """``chi(t) = sum_n p_n exp(-i t E_n)``."""
    return _fsum_complex(ens.populations * np.exp(-1j * t * ens.energies))


def fidelity(ens: SpectralEnsemble, t: float) -> float:
    f = abs(characteristic_function(ens, t)) ** 2
    return min(1.0, max(0.0, f))


def _check_levels(energies, minimum: int) -> np.ndarray:
    e = np.asarray(energies, dtype=float).ravel()
    if e.size < minimum:
        raise ValueError(f"need at least {minimum} levels, got {e.size}")
    if not np.all(np.isfinite(e)):
        raise ValueError("energies must be finite")
    return e


def uniform_Q(energies, t: float) -> float:
    """``1 - f(t)`` for equal populations, as ``(4/M**2) sum_{m>n} sin(w_nm t/2)**2``."""
    e = _check_levels(energies, 2)
    M = e.size
    i, j = np.triu_indices(M, 1)
    terms = np.sin((e[j] - e[i]) * t / 2) ** 2
    return 4.0 / M**2 * math.fsum(terms)


def avg_frequency(energies) -> float:
    """RMS of the gaps ``E_m - E_1`` measured from the first listed level."""
    e = _check_levels(energies, 2)
    gaps = e[1:] - e[0]
    return math.sqrt(math.fsum(gaps * gaps) / (e.size - 1))


def ball_volume(dim: int, R: float) -> float:
    """Volume of the ``dim``-dimensional ball of radius ``R``."""
    if dim < 0 or R < 0:
        raise ValueError("dim and R must be nonnegative")
    if R == 0:
        return 1.0 if dim == 0 else 0.0
    log_v = 0.5 * dim * math.log(math.pi) + dim * math.log(R) - math.lgamma(dim / 2 + 1)
    return math.exp(log_v)


def recurrence_estimate(energies, epsilon: float) -> RecurrenceEstimate:
    """Geometric estimate ``tau = 1 / (sqrt(M-1) omega sigma(R))``.

    The relative phases wander on an ``(M-1)``-torus; a recurrence needs the
    trajectory, thickened to a cylinder of radius ``R = sqrt((M-1) eps / 8)``,
    to cover a point. ``sigma`` is the ``(M-2)``-ball volume.
    """
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    e = _check_levels(energies, 3)
    M = e.size
    omega = avg_frequency(e)
    if omega == 0:
        raise ValueError("degenerate spectrum has no recurrence scale")
    R = math.sqrt((M - 1) * epsilon / 8)
    sigma = ball_volume(M - 2, R)
    return RecurrenceEstimate(1.0 / (math.sqrt(M - 1) * omega * sigma), M, epsilon, omega, R, sigma)


def default_scan_step(energies) -> float:
    """``2 pi / (50 * max gap)``; resolves the fastest beat."""
    e = np.asarray(energies, dtype=float)
    span = float(e.max() - e.min())
    return 2 * math.pi / (50 * span) if span > 0 else 1.0


def _uniform_Q_many(e: np.ndarray, t: np.ndarray) -> np.ndarray:
    chi = np.mean(np.exp(-1j * np.outer(t, e - e.mean())), axis=1)
    return np.clip(1.0 - np.abs(chi) ** 2, 0.0, 1.0)


def first_recurrence_scan(energies, epsilon: float, t_min: float | None = None, t_max: float = 1e4,
                          dt: float | None = None, chunk: int = 2**21) -> float | None:
    """First sampled return of ``Q`` below ``epsilon`` after leaving it.

    Sampling starts at ``t_min`` (default ``dt``). While ``Q`` stays below
    ``epsilon`` from the start the state has not left its neighbourhood, so
    the scan waits for ``Q >= epsilon`` and reports the next sample with
    ``Q < epsilon``. A spectrum that never leaves (degenerate) returns
    ``t_min``; no return before ``t_max`` gives ``None``.
    """
    e = _check_levels(energies, 1)
    if dt is None:
        dt = default_scan_step(e)
    if t_min is None:
        t_min = dt
    if not t_min > 0 or not dt > 0:
        raise ValueError("t_min and dt must be positive")
    if e.size == 1 or np.ptp(e) == 0:
        return float(t_min)
    rows = max(1, chunk // e.size)
    steps = int(math.floor((t_max - t_min) / dt + 1e-9)) + 1
    left = False
    for lo in range(0, steps, rows):
        idx = np.arange(lo, min(lo + rows, steps))
        t = t_min + idx * dt
        q = _uniform_Q_many(e, t)
        if not left:
            out = np.flatnonzero(q >= epsilon)
            if out.size == 0:
                continue
            left = True
            q, t = q[out[0]:], t[out[0]:]
        back = np.flatnonzero(q < epsilon)
        if back.size:
            return float(t[back[0]])
    return None if left else float(t_min)


def uniform_Q_trace(energies, t) -> np.ndarray:
    """``Q`` on an array of times."""
    e = _check_levels(energies, 2)
    t = np.asarray(t, dtype=float)
    out = np.empty(t.size)
    rows = max(1, 2**21 // e.size)
    for lo in range(0, t.size, rows):
        out[lo : lo + rows] = _uniform_Q_many(e, t[lo : lo + rows])
    return out


def kitaev_recurrence_bridge(spec: CouplingSpec, h: float, M: int) -> SpectralEnsemble:
    """Uniform ensemble over the lowest-``n`` mode frequencies ``omega_0 .. omega_{M-1}``.

    Uses the infinite-size coefficients, whose discreteness is what keeps
    the levels isolated.
    """
    if not 0 < spec.alpha < 1:
        raise ValueError("the bridge needs 0 < alpha < 1")
    if M < 1:
        raise ValueError("M must be positive")
    omegas = [float(mode_frequency(h, hopping_coeff_limit(spec.alpha, n), pairing_coeff_limit(spec.alpha, n)))
              for n in range(M)]
    return SpectralEnsemble.uniform(omegas)


def incommensurate_ladder(M: int, spacing: float = 1.0, jitter: float = 0.5) -> np.ndarray:
    """Evenly spaced levels shifted by ``jitter * frac(n**2 * golden)``.

    A quadratic Weyl shift: unlike a linear one it cannot be absorbed into a
    rescaled ladder, so the levels are rationally independent in practice.
    """
    golden = (1 + math.sqrt(5)) / 2
    n = np.arange(M)
    return spacing * (n + jitter * np.mod(n * n * golden, 1.0))
