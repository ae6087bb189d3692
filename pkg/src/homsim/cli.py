"""Command-line front end.

All flags are dimensionless, in units of the bath cutoff frequency omega_c
(times are omega_c*t, rates are gamma/omega_c, theta = omega_c*beta).

Exit codes: 0 success, 2 bad usage, 3 numerical failure, 4 I/O failure,
5 empty post-selection.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from . import trajectories
from .bath import (BathFamily, BathSpec, QuadratureError, gamma_closed,
                   gamma_quadrature)
from .dynamics import SourceConfig
from .interference import visibility, windowed_visibility
from .trajectories import EmptySelectionError, Window

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4
EXIT_EMPTY = 5

# defaults throughout: A = 0.5, theta = 10, g = 0.01
DEFAULT_A = 0.5
DEFAULT_THETA = 10.0
DEFAULT_G = 0.01


class UsageError(Exception):
    pass


def _bath_args(parser, with_g=False):
    parser.add_argument("--bath", default="ohmic",
                        choices=[f.value for f in BathFamily],
                        help="spectral family")
    parser.add_argument("--A", type=float, default=DEFAULT_A,
                        help="coupling strength (>= 0)")
    parser.add_argument("--theta", type=float, default=DEFAULT_THETA,
                        help="dimensionless inverse temperature omega_c*beta")
    parser.add_argument("--exponent", type=float, default=None,
                        help="spectral exponent (powerlaw only)")
    if with_g:
        parser.add_argument("--g", type=float, default=DEFAULT_G,
                            help="decay rate gamma/omega_c")


def _make_bath(args) -> BathSpec:
    try:
        return BathSpec(family=BathFamily(args.bath), A=args.A,
                        theta=args.theta, n=args.exponent)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _make_source(args) -> SourceConfig:
    bath = _make_bath(args)
    if not args.g > 0:
        raise UsageError(f"--g must be > 0, got {args.g}")
    return SourceConfig.identical_sources(args.g, bath)


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(v) if isinstance(v, float) else v
                                 for v in row])
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


class _IOFailure(Exception):
    pass


def cmd_gamma(args) -> int:
    bath = _make_bath(args)
    if bath.family is BathFamily.MARKOVIAN:
        raise UsageError("gamma table needs a bath with a spectral density")
    if not args.tau_max > 0 or args.points < 2:
        raise UsageError("need --tau-max > 0 and --points >= 2")
    taus = np.linspace(0.0, args.tau_max, args.points)
    rows = []
    for tau in taus:
        quad = gamma_quadrature(bath, float(tau)).gamma_big
        if bath.family is BathFamily.POWER_LAW:
            closed = quad
        else:
            closed = gamma_closed(bath, float(tau)).gamma_big
        rows.append((float(tau), closed, quad, abs(closed - quad)))
    _write_csv(args.out, ["tau", "gamma_closed", "gamma_quadrature",
                          "abs_diff"], rows)
    return EXIT_OK


def _three_baths(A, theta):
    return {
        "ohmic": BathSpec(BathFamily.OHMIC, A, theta),
        "superohmic": BathSpec(BathFamily.SUPEROHMIC, A, theta),
        "markovian": BathSpec(BathFamily.MARKOVIAN, A, theta),
    }


def cmd_fig1(args) -> int:
    baths = _three_baths(args.A, args.theta)
    taus = np.linspace(0.0, args.tau_max, args.points)
    # visibility is g-independent; the rate only matters for windowed curves
    sources = {k: SourceConfig.identical_sources(DEFAULT_G, b)
               for k, b in baths.items()}
    rows = [(float(t),
             visibility(sources["ohmic"], float(t)),
             visibility(sources["superohmic"], float(t)),
             visibility(sources["markovian"], float(t)))
            for t in taus]
    _write_csv(args.out, ["tau", "nu_ohmic", "nu_superohmic", "nu_markovian"],
               rows)
    return EXIT_OK


def cmd_fig2(args) -> int:
    if not args.g > 0:
        raise UsageError(f"--g must be > 0, got {args.g}")
    baths = _three_baths(args.A, args.theta)
    sources = {k: SourceConfig.identical_sources(args.g, b)
               for k, b in baths.items()}
    deltas = np.geomspace(args.delta_min, args.delta_max, args.points)
    rows = [(float(d),
             windowed_visibility(sources["ohmic"], float(d)),
             windowed_visibility(sources["superohmic"], float(d)),
             windowed_visibility(sources["markovian"], float(d)))
            for d in deltas]
    _write_csv(args.out, ["delta", "nu_ohmic", "nu_superohmic",
                          "nu_markovian"], rows)
    return EXIT_OK


def cmd_visibility(args) -> int:
    src = _make_source(args)
    taus = np.linspace(0.0, args.tau_max, args.points)
    rows = [(float(t), visibility(src, float(t))) for t in taus]
    _write_csv(args.out, ["tau", "nu"], rows)
    return EXIT_OK


def cmd_windowed(args) -> int:
    src = _make_source(args)
    deltas = np.geomspace(args.delta_min, args.delta_max, args.points)
    rows = [(float(d), windowed_visibility(src, float(d))) for d in deltas]
    _write_csv(args.out, ["delta", "nu"], rows)
    return EXIT_OK


def cmd_simulate(args) -> int:
    src = _make_source(args)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    records = trajectories.simulate_ensemble(args.seed, args.n, src,
                                             workers=args.workers)
    try:
        with open(args.out, "w") as fh:
            trajectories.write_records(fh, records)
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc
    return EXIT_OK


def cmd_analyze(args) -> int:
    if not args.delta > 0:
        raise UsageError(f"--delta must be > 0, got {args.delta}")
    if args.t1_max is not None and not args.t1_max > 0:
        raise UsageError(f"--t1-max must be > 0, got {args.t1_max}")
    try:
        with open(args.records) as fh:
            records = trajectories.read_records(fh)
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc

    window = Window(delta=args.delta, t1_max=args.t1_max)
    est = trajectories.estimate_visibility(records, window)
    print(f"records:     {len(records)}")
    print(f"retained:    {est.n_same + est.n_diff} "
          f"(same={est.n_same}, different={est.n_diff})")
    print(f"nu_hat:      {est.nu_hat:.6f}")
    print(f"95% CI:      [{est.ci_low:.6f}, {est.ci_high:.6f}]")
    print(f"efficiency:  {est.efficiency:.6f}")

    if args.bins:
        hi = args.delta
        if not math.isfinite(hi):
            hi = max(r.tau for r in records)
        edges = np.linspace(0.0, hi, args.bins + 1)
        binned = trajectories.binned_visibility(
            [r for r in records if window.t1_max is None
             or r.t1 <= window.t1_max], edges)
        rows = []
        for i, mid in enumerate(binned.midpoints):
            if binned.counts[i] == 0:
                rows.append((float(mid), 0, "", "", ""))
            else:
                rows.append((float(mid), int(binned.counts[i]),
                             binned.nu_hat[i], binned.ci_low[i],
                             binned.ci_high[i]))
        _write_csv(args.bins_out, ["tau_mid", "n", "nu_hat", "ci_low",
                                   "ci_high"], rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homsim",
        description="Time-resolved two-photon interference with dephasing "
                    "sources. All quantities are dimensionless in units of "
                    "the bath cutoff frequency.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gamma", help="decoherence function table (closed "
                                     "form vs quadrature)")
    _bath_args(p)
    p.add_argument("--tau-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("fig1", help="time-resolved visibility of the three "
                                    "reference baths")
    p.add_argument("--A", type=float, default=DEFAULT_A)
    p.add_argument("--theta", type=float, default=DEFAULT_THETA)
    p.add_argument("--tau-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", default="fig1.csv")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", help="windowed visibility of the three "
                                    "reference baths")
    p.add_argument("--A", type=float, default=DEFAULT_A)
    p.add_argument("--theta", type=float, default=DEFAULT_THETA)
    p.add_argument("--g", type=float, default=DEFAULT_G)
    p.add_argument("--delta-min", type=float, default=1e-3)
    p.add_argument("--delta-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", default="fig2.csv")
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("visibility", help="time-resolved visibility curve")
    _bath_args(p, with_g=True)
    p.add_argument("--tau-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_visibility)

    p = sub.add_parser("windowed", help="windowed visibility curve")
    _bath_args(p, with_g=True)
    p.add_argument("--delta-min", type=float, default=1e-3)
    p.add_argument("--delta-max", type=float, default=10.0)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_windowed)

    p = sub.add_parser("simulate", help="draw Monte Carlo click records")
    _bath_args(p, with_g=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="post-select records and estimate "
                                       "visibility")
    p.add_argument("--records", required=True)
    p.add_argument("--delta", type=float, required=True,
                   help="window width (inf allowed)")
    p.add_argument("--t1-max", type=float, default=None)
    p.add_argument("--bins", type=int, default=0,
                   help="also write a binned visibility CSV")
    p.add_argument("--bins-out", default="bins.csv")
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _IOFailure as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO
    except EmptySelectionError as exc:
        print(f"empty post-selection: {exc}", file=sys.stderr)
        return EXIT_EMPTY


if __name__ == "__main__":
    sys.exit(main())
