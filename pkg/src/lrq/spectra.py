"""Kac-normalised power-law couplings in momentum space.

Finite lattices are handled by exact sums; the strong long-range limit
(``0 < alpha < 1``) by quadrature of the rescaled integral, and the weak
long-range limit (``alpha > 1``) by the normalised polylogarithm.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from decimal import Decimal, localcontext
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import NumericalError

MAX_LATTICE_POINTS = 2**24


@dataclass(frozen=True)
class CouplingSpec:
    """Power-law kernel ``strength / (N_alpha * r**alpha)`` on a periodic lattice.

    ``size`` is the number of sites per direction.
    """

    alpha: float
    size: int
    d: int = 1
    strength: float = 1.0

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.d not in (1, 2, 3):
            raise ValueError(f"d must be 1, 2 or 3, got {self.d}")
        if int(self.size) != self.size or self.size < 4 or self.size % 2:
            raise ValueError(f"size must be an even integer >= 4, got {self.size}")
        if not self.strength > 0:
            raise ValueError("strength must be positive")
        if self.d == 1 and self.alpha == 1:
            raise ValueError("alpha = 1 in d = 1 is not supported")

    def with_size(self, size: int) -> "CouplingSpec":
        return replace(self, size=size)


@dataclass(frozen=True)
class ModeSpectrum:
    """Levels ``(n, energy, degeneracy)`` sorted by energy, offset by ``mu``."""

    levels: tuple
    mu: float

    @property
    def energies(self) -> np.ndarray:
        return np.array([e for _, e, _ in self.levels])

    @property
    def indices(self) -> np.ndarray:
        return np.array([n for n, _, _ in self.levels])

    @property
    def n_modes(self) -> int:
        return sum(g for _, _, g in self.levels)


# -- finite lattice ---------------------------------------------------------


def kac_norm(spec: CouplingSpec) -> float:
    if spec.d == 1:
        r = np.arange(1, spec.size // 2 + 1, dtype=float)
        return float(np.sum(r ** -spec.alpha))
    return _lattice_sums(spec, (0,) * spec.d)[1]


def _check_mode(spec: CouplingSpec, n: int) -> None:
    if spec.d != 1:
        raise ValueError("finite Fourier coefficients here are one-dimensional; use lattice_coeff_ddim")
    if not -spec.size // 2 <= n < spec.size // 2:
        raise ValueError(f"mode index {n} outside [-N/2, N/2) for N={spec.size}")


def _finite_sum(spec: CouplingSpec, n: int, trig) -> float:
    N = spec.size
    r = np.arange(1, N // 2)
    # reduce n*r modulo N in integers so the phase is exact
    phase = 2.0 * np.pi * ((n * r) % N) / N
    return float(np.sum(trig(phase) * r.astype(float) ** -spec.alpha)) / kac_norm(spec)


def hopping_fourier_finite(spec: CouplingSpec, n: int) -> float:
    _check_mode(spec, n)
    return _finite_sum(spec, n, np.cos)


def pairing_fourier_finite(spec: CouplingSpec, n: int) -> float:
    _check_mode(spec, n)
    return _finite_sum(spec, n, np.sin)


def fourier_couplings(spec: CouplingSpec) -> tuple[np.ndarray, np.ndarray]:
    """Hopping and pairing coefficients for every mode ``n = 0 .. N-1`` at once.

    Index ``n`` and ``n - N`` denote the same momentum. Uses one FFT of the
    coupling row; agrees with the direct sums to rounding.
    """
    if spec.d != 1:
        raise ValueError("fourier_couplings is one-dimensional")
    N = spec.size
    row = np.zeros(N)
    r = np.arange(1, N // 2, dtype=float)
    row[1 : N // 2] = r ** -spec.alpha
    spectrum = np.fft.fft(row) / kac_norm(spec)
    return spectrum.real.copy(), -spectrum.imag.copy()


def momenta(N: int) -> np.ndarray:
    """Mode indices in FFT order mapped to the Brillouin range [-N/2, N/2)."""
    n = np.arange(N)
    return np.where(n >= N // 2, n - N, n)


# -- strong long-range limit -----------------------------------------------


def _limit_integral(alpha: float, n: int, kind: str) -> float:
    if not 0 < alpha < 1:
        raise ValueError(f"limit coefficients need 0 < alpha < 1, got {alpha}")
    sign = 1.0
    if n < 0:
        n = -n
        sign = -1.0 if kind == "sin" else 1.0
    if n == 0:
        return 1.0 if kind == "cos" else 0.0
    trig = np.cos if kind == "cos" else np.sin
    # s = u**p with p = 1/(1-alpha) turns ds/s**alpha into p*du; the
    # prefactor c_alpha * p collapses to 2**(1-alpha)
    p = 1.0 / (1.0 - alpha)
    upper = 0.5 ** (1.0 - alpha)
    omega = 2.0 * np.pi * n
    prefactor = 2.0 ** (1.0 - alpha)
    # half-period breakpoints of the oscillation in s, mapped to u
    breaks = (np.arange(1, 2 * n) / (4.0 * n)) ** (1.0 - alpha)
    edges = np.concatenate(([0.0], breaks, [upper]))
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            pieces = [
                quad(lambda u: trig(omega * u**p), a, b, epsabs=1e-12 / edges.size, epsrel=1e-13, limit=200)[0]
                for a, b in zip(edges[:-1], edges[1:])
            ]
        except IntegrationWarning as exc:
            raise NumericalError("hopping_coeff_limit", str(exc)) from exc
    return sign * prefactor * math.fsum(pieces)


def hopping_coeff_limit(alpha: float, n: int) -> float:
    """Thermodynamic-limit hopping coefficient for ``0 < alpha < 1``.

    ``c_alpha * int_0^{1/2} cos(2 pi n s) s**-alpha ds`` with
    ``c_alpha = (1 - alpha) 2**(1 - alpha)``; equals 1 at ``n = 0``.
    """
    return _limit_integral(alpha, n, "cos")


def pairing_coeff_limit(alpha: float, n: int) -> float:
    return _limit_integral(alpha, n, "sin")


def discrete_spectrum(spec: CouplingSpec, mu: float, n_max: int) -> ModeSpectrum:
    """Levels ``mu - t_n`` for ``n = 0 .. n_max`` in the strong long-range limit.

    ``t_n`` is even in ``n`` so every ``n > 0`` level is doubly degenerate.
    """
    if not 0 < spec.alpha < 1:
        raise ValueError("discrete_spectrum needs 0 < alpha < 1")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    levels = [(n, mu - hopping_coeff_limit(spec.alpha, n), 1 if n == 0 else 2) for n in range(n_max + 1)]
    levels.sort(key=lambda lv: lv[1])
    return ModeSpectrum(tuple(levels), float(mu))


# -- weak long-range limit -------------------------------------------------

# B_2j / (2j)! for the Euler-Maclaurin tail of the zeta series
_BERNOULLI_RATIOS = (1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160, -691 / 1307674368000)


def zeta(s: float, cutoff: int = 64) -> float:
    """Riemann zeta for real ``s > 1`` by Euler-Maclaurin summation."""
    if not s > 1:
        raise ValueError("zeta series needs s > 1")
    head = np.arange(1, cutoff, dtype=float) ** -s
    M = float(cutoff)
    tail = M ** (1 - s) / (s - 1) + 0.5 * M**-s
    rising = s  # (s)_{2j-1}
    for j, ratio in enumerate(_BERNOULLI_RATIOS, start=1):
        tail += ratio * rising * M ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return math.fsum(head[::-1]) + tail


def _backward_differences(alpha: float, start: int, order: int) -> list[float]:
    """``nabla^j f(start + j)`` for ``f(r) = r**-alpha``, ``j = 0 .. order``.

    Evaluated in 50-digit decimal arithmetic; the differences cancel
    catastrophically in double precision at large ``start``.
    """
    out = []
    with localcontext() as ctx:
        ctx.prec = 50
        a = Decimal(repr(alpha))
        values = {r: Decimal(r) ** -a for r in range(start - order, start + order + 1)}
        for j in range(order + 1):
            b = start + j
            acc = Decimal(0)
            for i in range(j + 1):
                acc += (-1) ** i * math.comb(j, i) * values[b - i]
            out.append(float(acc))
    return out


def _polylog_unit_circle(alpha: float, k: float, tol: float = 1e-15, levels: int = 5) -> complex:
    """``sum_{r>=1} exp(i k r) / r**alpha`` for ``alpha > 1``, ``0 < |k| <= pi``.

    Direct summation up to ``a - 1``; the oscillatory tail from ``a`` on is
    resolved by repeated summation by parts, whose remainder is bounded by
    ``|nabla^{J-1} f(a + J - 1)| / |1 - z|**J``.
    """
    z = complex(math.cos(k), math.sin(k))
    one_minus_z = abs(1 - z)
    a = max(4096, int(math.ceil(64.0 / abs(k))))
    while True:
        if a > 2**27:
            raise NumericalError("polylog_couplings", f"tail bound not reached for k={k}")
        diffs = _backward_differences(alpha, a, levels)
        bound = abs(diffs[levels - 1]) / one_minus_z**levels
        if bound < tol:
            break
        a *= 2
    head = 0j
    for lo in range(1, a, 2**20):
        r = np.arange(lo, min(lo + 2**20, a), dtype=float)
        w = r**-alpha
        head += complex(np.sum(np.cos(k * r) * w), np.sum(np.sin(k * r) * w))
    tail = 0j
    for j in range(levels):
        tail += np.exp(1j * k * (a + j)) * diffs[j] / (1 - z) ** (j + 1)
    return head + tail


def polylog_couplings(alpha: float, k: float) -> tuple[float, float]:
    """``(Re, Im)`` of ``Li_alpha(exp(i k)) / zeta(alpha)`` for ``alpha > 1``.

    These are the ``N -> infinity`` hopping and pairing coefficients at
    continuous momentum ``k``.
    """
    if not alpha > 1:
        raise ValueError("polylog series converges on the unit circle only for alpha > 1")
    if not -math.pi <= k <= math.pi:
        raise ValueError("k must lie in [-pi, pi]")
    if k == 0:
        return 1.0, 0.0
    value = _polylog_unit_circle(alpha, k) / zeta(alpha)
    return value.real, value.imag


# -- d dimensions ----------------------------------------------------------


def _lattice_sums(spec: CouplingSpec, n_vec: Sequence[int]) -> tuple[float, float]:
    """``(sum_R cos(k.R)/|R|^alpha, sum_R 1/|R|^alpha)`` over the hypercube.

    Displacements run over ``-(L/2-1) .. L/2-1`` in each direction, origin
    excluded, so the zero mode normalises to exactly 1.
    """
    L, d = spec.size, spec.d
    if L**d > MAX_LATTICE_POINTS:
        raise ValueError(f"lattice of {L}^{d} sites exceeds the 2^24 enumeration limit")
    half = L // 2 - 1
    comps = np.arange(-half, half + 1)
    rest = np.meshgrid(*([comps] * (d - 1)), indexing="ij")
    rest_sq = sum(c.astype(float) ** 2 for c in rest)
    rest_phase = sum(int(n) * c for n, c in zip(n_vec[1:], rest))
    num, den = [], []
    for x in comps:
        r2 = rest_sq + float(x) ** 2
        if x == 0:
            r2 = np.where(r2 == 0, np.inf, r2)
        w = r2 ** (-spec.alpha / 2)
        phase = 2.0 * np.pi * ((int(n_vec[0]) * x + rest_phase) % L) / L
        num.append(np.sum(np.cos(phase) * w))
        den.append(np.sum(w))
    return math.fsum(num), math.fsum(den)


def lattice_coeff_ddim(spec: CouplingSpec, n_vec: Sequence[int]) -> float:
    """Kac-normalised lattice Fourier coefficient at ``k = 2 pi n_vec / L``."""
    if spec.d not in (2, 3):
        raise ValueError("lattice_coeff_ddim needs d in {2, 3}")
    if len(n_vec) != spec.d:
        raise ValueError("n_vec length must equal d")
    if any(abs(int(n)) > spec.size // 2 for n in n_vec):
        raise ValueError("n_vec components must satisfy |n| <= L/2")
    num, den = _lattice_sums(spec, n_vec)
    return num / den


# -- sweeps ----------------------------------------------------------------


def gap_scan(spec: CouplingSpec, sizes: Iterable[int], n_pair: tuple[int, int]) -> list[tuple[int, float]]:
    """``|t_{n1}(N) - t_{n2}(N)|`` from finite sums for each ``N`` in ``sizes``."""
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise ValueError("sizes must be ascending")
    n1, n2 = n_pair
    out = []
    for N in sizes:
        s = spec.with_size(N)
        out.append((N, abs(hopping_fourier_finite(s, n1) - hopping_fourier_finite(s, n2))))
    return out


def adjacent_gap_scan(spec: CouplingSpec, sizes: Iterable[int], k: float) -> list[tuple[int, float]]:
    """Gap between the two lattice modes adjacent at fixed momentum ``k``.

    Uses ``n = round(k N / 2 pi)`` and ``n + 1``; in a continuous band this
    level spacing closes as ``1/N``.
    """
    out = []
    for N in sizes:
        n = int(round(k * N / (2 * np.pi)))
        s = spec.with_size(N)
        out.append((N, abs(hopping_fourier_finite(s, n) - hopping_fourier_finite(s, n + 1))))
    return out
