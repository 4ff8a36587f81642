"""``lrq`` command-line front end.

Exit codes: 0 success, 1 numerical failure, 2 usage error. Every CSV starts
with ``# key=value`` lines echoing the fully resolved configuration.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from importlib import metadata

import numpy as np

from .errors import NumericalError
from .figures import RECIPES, run_recipe
from .kitaev import QuenchProtocol, run_quench
from .recurrence import (default_scan_step, first_recurrence_scan, kitaev_recurrence_bridge, recurrence_estimate,
                         uniform_Q_trace)
from .series import time_grid, write_csv
from .spectra import CouplingSpec, fourier_couplings, lattice_coeff_ddim
from .spherical import (critical_quench, disordered_ensemble, dos_flat, dos_powerlaw, dos_semicircle,
                        fluctuation_curve, quench_observable)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", required=True, help="output path (a directory for sweeps)")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads; the LRQ_THREADS environment variable takes precedence")

    parser = _Parser(prog="lrq", description="Long-range quench dynamics and recurrence toolkit.")
    parser.add_argument("--version", action="version", version=f"lrq {version()}")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", parents=[common], help="finite-size Fourier couplings")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--d", type=int, default=1)

    p = sub.add_parser("kitaev", parents=[common], help="transverse magnetisation after a field quench")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--h-initial", type=float, default=20.0)
    p.add_argument("--h-final", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)

    p = sub.add_parser("spherical", parents=[common], help="spherical-model chemical-potential quench")
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--alpha", type=float)
    kind.add_argument("--flat", action="store_true")
    kind.add_argument("--disorder", type=float, metavar="J", help="disorder strength J (semicircle radius 2J)")
    p.add_argument("--size", type=int, help="lattice size; omit for the infinite flat or semicircle limit")
    p.add_argument("--j0", type=float, default=1.0)
    p.add_argument("--g", type=float, help="coupling; default fixes the constraint at the initial mu")
    p.add_argument("--mu-initial-factor", type=float, default=2.0)
    p.add_argument("--mu-final-factor", type=float, default=1.0)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--samples", type=_positive_int, help="finite-size disorder realisations (needs --size)")
    p.add_argument("--fluctuation-out", help="also write T,Q_A to this path")

    p = sub.add_parser("recurrence", parents=[common], help="recurrence time of a discrete spectrum")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--alpha", type=float)
    source.add_argument("--energies-file")
    p.add_argument("--h", type=float, default=0.4)
    p.add_argument("--levels", type=_positive_int)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--dt", type=float, help="scan step; default 2 pi / (50 max gap)")
    p.add_argument("--summary-out", help="path for the M,epsilon,tau_estimate,tau_scan row")

    p = sub.add_parser("sweep", help="figure bundles")
    sweep = p.add_subparsers(dest="sweep", required=True, parser_class=_Parser)
    f = sweep.add_parser("figure", parents=[common])
    f.add_argument("name", choices=sorted(RECIPES))
    return parser


def resolve_threads(args) -> int:
    env = os.environ.get("LRQ_THREADS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise UsageError(f"LRQ_THREADS must be a positive integer, got {env!r}") from None
        if value <= 0:
            raise UsageError(f"LRQ_THREADS must be a positive integer, got {env!r}")
        return value
    return args.threads or 1


def config_header(args) -> dict:
    """Resolved run parameters; thread count is left out since it never changes results."""
    skip = {"threads", "out", "summary_out", "fluctuation_out"}
    header = {"lrq_version": version()}
    for key, value in vars(args).items():
        if key in skip or value is None or value is False:
            continue
        header[key.replace("_", "-")] = value
    return header


def _spectrum(args, header):
    spec = CouplingSpec(args.alpha, args.size, d=args.d)
    if not 0 <= args.n_max < args.size // 2:
        raise UsageError(f"--n-max must lie in [0, {args.size // 2 - 1}]")
    n = np.arange(args.n_max + 1)
    if args.d == 1:
        t, d = fourier_couplings(spec)
        t, d = t[n], d[n]
    else:
        t = np.array([lattice_coeff_ddim(spec, [int(m)] + [0] * (args.d - 1)) for m in n])
        # the symmetric lattice sum of sin(k.R) vanishes identically
        d = np.zeros_like(t)
    rows = [(args.alpha, args.d, args.size, int(m), a, b) for m, a, b in zip(n, t, d)]
    write_csv(args.out, ("alpha", "d", "N", "n", "t_tilde", "delta_tilde"), rows, header)


def _kitaev(args, header):
    protocol = QuenchProtocol(CouplingSpec(args.alpha, args.size), args.h_final, args.t_max, args.dt, args.h_initial)
    s = run_quench(protocol)
    write_csv(args.out, ("t", "m_x"), zip(s.t, s.values), header)


def _spherical(args, header, threads):
    if args.samples is not None:
        if args.disorder is None or args.size is None:
            raise UsageError("--samples needs --disorder and --size")
        if args.g is not None:
            raise UsageError("--g is fixed per realisation by the constraint in ensemble runs")
        mean, err = disordered_ensemble(args.size, args.disorder, args.j0, args.samples, args.seed, args.t_max,
                                        args.dt, args.mu_initial_factor, args.mu_final_factor, threads=threads)
        write_csv(args.out, ("t", "A", "A_stderr"), zip(mean.t, mean.values, err), header)
        series = mean
    else:
        if args.alpha is not None:
            if args.size is None:
                raise UsageError("--alpha needs --size")
            dos = dos_powerlaw(CouplingSpec(args.alpha, args.size, strength=args.j0))
        elif args.flat:
            dos = dos_flat(args.j0, args.size if args.size is not None else math.inf)
        else:
            if args.size is not None:
                raise UsageError("finite-size disorder needs --samples")
            dos = dos_semicircle(args.disorder, args.j0)
        q = critical_quench(dos, args.t_max, args.dt, args.mu_initial_factor, args.mu_final_factor, g=args.g)
        header = {**header, "g": q.g, "mu_initial": q.mu_initial, "mu_final": q.mu_final}
        series = quench_observable(q)
        write_csv(args.out, ("t", "A"), zip(series.t, series.values), header)
    if args.fluctuation_out:
        qa = fluctuation_curve(series)
        write_csv(args.fluctuation_out, ("T", "Q_A"), zip(qa.t, qa.values), header)


def _read_energies(path) -> np.ndarray:
    try:
        with open(path) as fh:
            values = [float(line) for line in fh if line.strip()]
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read energies from {path}: {exc}") from None
    return np.array(values)


def _recurrence(args, header):
    if not 0 < args.epsilon < 1:
        raise UsageError("--epsilon must lie in (0, 1)")
    if args.alpha is not None:
        if args.levels is None:
            raise UsageError("--alpha needs --levels")
        energies = kitaev_recurrence_bridge(CouplingSpec(args.alpha, 4), args.h, args.levels).energies
    else:
        energies = _read_energies(args.energies_file)
    if energies.size < 2:
        raise UsageError("need at least two levels")
    dt = args.dt or default_scan_step(energies)
    t = time_grid(args.t_max, dt)
    write_csv(args.out, ("t", "Q"), zip(t, uniform_Q_trace(energies, t)), {**header, "dt": dt})
    estimate = recurrence_estimate(energies, args.epsilon).tau if energies.size >= 3 else math.nan
    scan = first_recurrence_scan(energies, args.epsilon, t_max=args.t_max, dt=dt)
    summary = args.summary_out or os.path.splitext(args.out)[0] + ".summary.csv"
    write_csv(summary, ("M", "epsilon", "tau_estimate", "tau_scan"),
              [(energies.size, args.epsilon, estimate, math.nan if scan is None else scan)], {**header, "dt": dt})


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
        threads = resolve_threads(args)
        header = config_header(args)
        if args.subcommand == "spectrum":
            _spectrum(args, header)
        elif args.subcommand == "kitaev":
            _kitaev(args, header)
        elif args.subcommand == "spherical":
            _spherical(args, header, threads)
        elif args.subcommand == "recurrence":
            _recurrence(args, header)
        else:
            run_recipe(args.name, args.out, threads=threads, header=header)
    except SystemExit as exc:
        # --help and --version
        return int(exc.code or 0)
    except (UsageError, ValueError) as exc:
        print(f"lrq: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"lrq: numerical failure in {exc.operation}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
