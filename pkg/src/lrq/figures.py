"""Desk-scale CSV bundles, one recipe per figure name.

Every recipe expands to a list of :class:`Job`; jobs are independent and may
run on a thread pool, while files are written in recipe order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kitaev import QuenchProtocol, _angles, run_quench
from .series import write_csv
from .spectra import CouplingSpec, fourier_couplings, hopping_coeff_limit, pairing_coeff_limit
from .spherical import (critical_coupling, critical_quench, dos_flat, dos_powerlaw, dos_semicircle,
                        fit_equilibration_time, fluctuation_curve, quench_observable)

SIZES = (2**7, 2**9, 2**11, 2**13)
H_INITIAL = 20.0
H_FINAL = 0.4
# J0 for the disorder ladders: the semicircle needs J < J0 and the ladder reaches J = 1
DISORDER_J0 = 2.0
DISORDER_2J = (0.2, 0.6, 1.0, 1.4, 2.0)


@dataclass(frozen=True)
class Job:
    filename: str
    columns: tuple[str, ...]
    compute: Callable[[], list]
    meta: dict


def _tag(x) -> str:
    return f"{x:g}".replace(".", "p").replace("-", "m")


def _angle_jobs() -> list[Job]:
    jobs = []
    N = 256
    for alpha in (12.0, 1.75):
        for h in (H_INITIAL, 1.0, H_FINAL):
            def rows(alpha=alpha, h=h):
                t, d = fourier_couplings(CouplingSpec(alpha, N))
                n = np.arange(-N // 2, N // 2)
                theta, _ = _angles(h, t[n % N], d[n % N])
                k = 2 * np.pi * n / N
                return [(alpha, N, h, int(a), b, c) for a, b, c in zip(n, k, theta)]
            jobs.append(Job(f"fig2_alpha{_tag(alpha)}_h{_tag(h)}.csv", ("alpha", "N", "h", "n", "k", "theta"), rows,
                            {"figure": "fig2", "alpha": alpha, "N": N, "h": h}))
    alpha, n_max = 0.5, 32
    for h in (H_INITIAL, 1.0, H_FINAL):
        def rows(h=h):
            n = np.arange(-n_max, n_max + 1)
            t = np.array([hopping_coeff_limit(alpha, int(m)) for m in n])
            d = np.array([pairing_coeff_limit(alpha, int(m)) for m in n])
            theta, _ = _angles(h, t, d)
            return [(alpha, "inf", h, int(a), 2 * np.pi * a, c) for a, c in zip(n, theta)]
        jobs.append(Job(f"fig2_alpha{_tag(alpha)}_limit_h{_tag(h)}.csv", ("alpha", "N", "h", "n", "k", "theta"), rows,
                        {"figure": "fig2", "alpha": alpha, "N": "inf", "h": h, "note": "k column holds 2*pi*n"}))
    return jobs


def _kitaev_jobs(name: str, alphas, t_max=100.0, dt=0.05) -> list[Job]:
    jobs = []
    for alpha in alphas:
        for N in SIZES:
            def rows(alpha=alpha, N=N):
                s = run_quench(QuenchProtocol(CouplingSpec(alpha, N), H_FINAL, t_max, dt, H_INITIAL))
                return [(alpha, N, H_INITIAL, H_FINAL, a, b) for a, b in zip(s.t, s.values)]
            jobs.append(Job(f"{name}_alpha{_tag(alpha)}_N{N}.csv", ("alpha", "N", "h_i", "h_f", "t", "m_x"), rows,
                            {"figure": name, "alpha": alpha, "N": N, "h_i": H_INITIAL, "h_f": H_FINAL,
                             "t_max": t_max, "dt": dt}))
    return jobs


def _fig4_jobs(t_max=50.0, dt=0.01) -> list[Job]:
    jobs = []
    for alpha in (0.4, 0.95):
        for N in SIZES:
            def rows(alpha=alpha, N=N):
                return _rows(quench_observable(critical_quench(dos_powerlaw(CouplingSpec(alpha, N)), t_max, dt)))
            jobs.append(Job(f"fig4_alpha{_tag(alpha)}_N{N}.csv", ("t", "A"), rows,
                            {"figure": "fig4", "alpha": alpha, "N": N, "J0": 1.0, "mu_initial_factor": 2.0,
                             "mu_final_factor": 1.0, "t_max": t_max, "dt": dt}))
    return jobs


def _rows(series):
    return list(zip(series.t, series.values))


def _disorder_series(two_j, t_max, dt):
    return quench_observable(critical_quench(dos_semicircle(two_j / 2, DISORDER_J0), t_max, dt))


def _fig5_jobs(t_max=100.0, dt=0.05) -> list[Job]:
    jobs = []
    for two_j in DISORDER_2J:
        meta = {"figure": "fig5", "2J": two_j, "J0": DISORDER_J0, "dos": "semicircle", "t_max": t_max, "dt": dt}
        jobs.append(Job(f"fig5a_2J{_tag(two_j)}.csv", ("t", "A"),
                        lambda two_j=two_j: _rows(_disorder_series(two_j, t_max, dt)), meta))

    def clean():
        return _rows(quench_observable(critical_quench(dos_flat(DISORDER_J0), t_max, dt)))

    jobs.append(Job("fig5b_clean.csv", ("t", "A"), clean,
                    {"figure": "fig5", "2J": 0.0, "J0": DISORDER_J0, "dos": "two_level", "N": "inf",
                     "t_max": t_max, "dt": dt}))
    return jobs


def _s1_jobs() -> list[Job]:
    alphas = (0.15, 0.35, 0.55, 0.75, 0.95)
    sizes = [2**p for p in range(8, 15)]

    def rows():
        return [(a, N, critical_coupling(dos_powerlaw(CouplingSpec(a, N)))) for a in alphas for N in sizes]

    return [Job("s1_critical_coupling.csv", ("alpha", "N", "g_c"), rows,
                {"figure": "s1", "J0": 1.0, "alphas": " ".join(map(str, alphas)), "N_min": sizes[0], "N_max": sizes[-1]})]


def _s3_jobs(t_max=400.0, dt=0.05) -> list[Job]:
    jobs = []
    for two_j in DISORDER_2J:
        def rows(two_j=two_j):
            return _rows(fluctuation_curve(_disorder_series(two_j, t_max, dt)))
        jobs.append(Job(f"s3_QA_2J{_tag(two_j)}.csv", ("T", "Q_A"), rows,
                        {"figure": "s3", "2J": two_j, "J0": DISORDER_J0, "t_max": t_max, "dt": dt}))

    def summary():
        out = []
        for two_j in DISORDER_2J:
            fit = fit_equilibration_time(fluctuation_curve(_disorder_series(two_j, t_max, dt)))
            tau, R, res = fit if fit is not None else (float("nan"),) * 3
            out.append((two_j / 2, tau, R, res))
        return out

    jobs.append(Job("s3_equilibration_times.csv", ("J", "tau_eq", "R", "residual"), summary,
                    {"figure": "s3", "J0": DISORDER_J0, "t_max": t_max, "dt": dt}))
    return jobs


RECIPES: dict[str, Callable[[], list[Job]]] = {
    "fig2": _angle_jobs,
    "fig0": lambda: _kitaev_jobs("fig0", (12.0, 1.75)),
    "fig1": lambda: _kitaev_jobs("fig1", (0.9, 0.4)),
    "fig4": _fig4_jobs,
    "fig5": _fig5_jobs,
    "s1": _s1_jobs,
    "s3": _s3_jobs,
}


def figure_recipe(name: str) -> list[Job]:
    try:
        return RECIPES[name]()
    except KeyError:
        raise ValueError(f"unknown figure {name!r}; choose from {', '.join(RECIPES)}") from None


def run_recipe(name: str, out_dir, threads: int = 1, header: dict | None = None) -> list[str]:
    """Compute every job of ``name`` and write the CSVs into ``out_dir``."""
    jobs = figure_recipe(name)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(lambda job: job.compute(), jobs))
    paths = []
    for job, rows in zip(jobs, results):
        path = os.path.join(os.fspath(out_dir), job.filename)
        write_csv(path, job.columns, rows, {**(header or {}), **job.meta})
        paths.append(path)
    return paths
