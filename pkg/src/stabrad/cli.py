"""Command-line front end.

Subcommands: ``radius`` (compute theta and the stability radius),
``worstcase`` (construct and certify the marginal perturbation),
``verify`` (Monte Carlo sampling below the radius), ``sweep`` (export the
frequency trace as CSV, with a rendered figure alongside) and ``generate``
(write example system files).

Exit codes: 0 success, 2 input/validation error, 3 verification violation,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import sys as _sys
import time
from dataclasses import asdict, replace

from . import __version__
from .errors import InputError, StabradError
from .fileio import (SystemFile, load_system_file, result_file_dict,
                     write_json, write_system_file)
from .generate import PATTERNS, heat_chain, random_stable
from .radius import RadiusReport, SweepOptions, stability_radius, write_trace_csv
from .verify import monte_carlo_stability
from .worstcase import certify, construct_delta


def _sweep_options(loaded: SystemFile, args) -> SweepOptions:
    opts = loaded.options or SweepOptions()
    if getattr(args, "grid", None) is not None:
        opts = replace(opts, grid_points=args.grid)
    if getattr(args, "tol", None) is not None:
        opts = replace(opts, objective_tol=args.tol)
    return opts


def _print_radius(report: RadiusReport) -> None:
    print(f"theta      = {report.theta:.17g}")
    if report.radius_is_infinite:
        print("radius     = inf")
    else:
        print(f"radius     = {report.radius:.17g}")
    print(f"omega_star = {report.omega_star:.17g}")
    for flag in report.flags:
        print(f"note: {flag}")


def cmd_radius(args) -> int:
    t0 = time.perf_counter()
    loaded = load_system_file(args.system)
    opts = _sweep_options(loaded, args)
    report = stability_radius(loaded.system, opts)
    elapsed = time.perf_counter() - t0
    _print_radius(report)
    if args.out:
        write_json(result_file_dict("radius", loaded, opts,
                                    {"total_seconds": elapsed},
                                    radius_report=report), args.out)
    return 0


def cmd_worstcase(args) -> int:
    t0 = time.perf_counter()
    loaded = load_system_file(args.system)
    opts = _sweep_options(loaded, args)
    report = stability_radius(loaded.system, opts)
    if report.radius_is_infinite:
        print("stability radius is infinite (acyclic coupling); "
              "no destabilizing perturbation exists", file=_sys.stderr)
        return 2
    cert = construct_delta(loaded.system, report.omega_star)
    elapsed = time.perf_counter() - t0
    _print_radius(report)
    print(f"delta_norm_2inf      = {cert.norm_2inf:.17g}")
    print(f"target (1/theta)     = {cert.target_radius:.17g}")
    print(f"closed_loop_eig      = {cert.closed_loop_eig.real:.17g} "
          f"{cert.closed_loop_eig.imag:+.17g}j")
    print(f"eig_residual         = {cert.eig_residual:.3e}")
    print(f"certified            = {cert.certified}")

    extra = None
    if args.inflate is not None:
        if not args.inflate > 0:
            raise InputError(f"--inflate must be positive, got {args.inflate}")
        pushed = certify(loaded.system, cert.delta.scaled(1.0 + args.inflate),
                         report.omega_star)
        print(f"inflated (x{1.0 + args.inflate:g}) abscissa = "
              f"{pushed.closed_loop_abscissa:.6e}")
        extra = {"inflated": {
            "factor": 1.0 + args.inflate,
            "closed_loop_abscissa": pushed.closed_loop_abscissa,
            "norm_2inf": pushed.norm_2inf,
        }}
    if args.out:
        write_json(result_file_dict("worstcase", loaded, opts,
                                    {"total_seconds": elapsed},
                                    radius_report=report, worst_case=cert,
                                    extra=extra), args.out)
    if not cert.certified:
        print("warning: certification failed (residual above tolerance)",
              file=_sys.stderr)
    return 0


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    loaded = load_system_file(args.system)
    opts = _sweep_options(loaded, args)
    report = stability_radius(loaded.system, opts)
    if report.radius_is_infinite:
        print("stability radius is infinite; nothing to verify "
              "(every perturbation keeps the system stable)", file=_sys.stderr)
        return 2
    include = ()
    cert = None
    if args.include_worstcase:
        cert = construct_delta(loaded.system, report.omega_star)
        include = (cert.delta,)
    mc = monte_carlo_stability(loaded.system, report, args.samples,
                               args.fraction, seed=args.seed,
                               norm_kind=args.norm, include=include)
    elapsed = time.perf_counter() - t0
    print(f"samples         = {mc.samples}")
    print(f"fraction        = {mc.fraction_of_radius:.17g}")
    print(f"violations      = {mc.violations}")
    print(f"worst_abscissa  = {mc.worst_abscissa:.6e}")
    if args.out:
        write_json(result_file_dict("verify", loaded, opts,
                                    {"total_seconds": elapsed},
                                    radius_report=report, worst_case=cert,
                                    monte_carlo=mc), args.out)
    if mc.violations:
        print(f"verification FAILED: {mc.violations} unstable sample(s) at "
              f"fraction {mc.fraction_of_radius}", file=_sys.stderr)
        return 3
    return 0


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    loaded = load_system_file(args.system)
    opts = _sweep_options(loaded, args)
    report = stability_radius(loaded.system, opts)
    try:
        write_trace_csv(report, args.out)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from None
    print(f"wrote {report.trace.shape[0]} rows to {args.out}")
    if not args.no_plot:
        from .plotting import render_sweep_figure
        plot_path = args.plot
        if plot_path is None:
            stem = str(args.out)
            plot_path = (stem[:-4] if stem.lower().endswith(".csv") else stem) + ".png"
        try:
            render_sweep_figure(report, plot_path, title=args.system)
        except OSError as exc:
            raise InputError(f"cannot write {plot_path}: {exc}") from None
        print(f"wrote figure to {plot_path}")
    elapsed = time.perf_counter() - t0
    print(f"elapsed {elapsed:.2f} s")
    return 0


def cmd_generate(args) -> int:
    if args.kind == "heat_chain":
        sys_ = heat_chain(args.grid_points, args.blocks, args.pattern)
    else:
        sys_ = random_stable(args.blocks, args.state_dim, args.in_dim,
                             args.out_dim, margin=args.margin, seed=args.seed)
    try:
        write_system_file(sys_, args.out)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from None
    print(f"wrote {args.kind} system ({sys_.n_blocks} blocks) to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="stabrad",
        description="Stability radius of interconnected stable LTI systems.")
    p.add_argument("--version", action="version", version=f"stabrad {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, out_help):
        sp.add_argument("system", help="system file (JSON)")
        sp.add_argument("--out", help=out_help)
        sp.add_argument("--grid", type=int, help="sweep grid points (>= 16)")
        sp.add_argument("--tol", type=float,
                        help="relative tolerance on the squared objective")

    sp = sub.add_parser("radius", help="compute theta and the stability radius")
    add_common(sp, "write a JSON result file")
    sp.set_defaults(func=cmd_radius)

    sp = sub.add_parser("worstcase",
                        help="construct the marginal destabilizing perturbation")
    add_common(sp, "write a JSON result file with the certificate")
    sp.add_argument("--inflate", type=float, metavar="EPS",
                    help="also certify the perturbation scaled by 1+EPS "
                         "(pushes the eigenvalue across the axis)")
    sp.set_defaults(func=cmd_worstcase)

    sp = sub.add_parser("verify",
                        help="Monte Carlo stability sampling below the radius")
    add_common(sp, "write a JSON result file with the sampling report")
    sp.add_argument("--samples", type=int, default=10000,
                    help="number of random perturbations (default 10000)")
    sp.add_argument("--fraction", type=float, default=0.99,
                    help="perturbation norm as a fraction of the radius "
                         "(default 0.99; >= 1 only with --include-worstcase)")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    sp.add_argument("--norm", choices=("norm_2inf", "opnorm"),
                    default="norm_2inf", help="perturbation norm (default norm_2inf)")
    sp.add_argument("--include-worstcase", action="store_true",
                    help="inject the constructed worst-case direction")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="export the frequency sweep trace as CSV")
    sp.add_argument("system", help="system file (JSON)")
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.add_argument("--grid", type=int, help="sweep grid points (>= 16)")
    sp.add_argument("--tol", type=float,
                    help="relative tolerance on the squared objective")
    sp.add_argument("--plot", help="figure path (default: CSV path with .png)")
    sp.add_argument("--no-plot", action="store_true",
                    help="skip rendering the figure")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("generate", help="write an example system file")
    sp.add_argument("kind", choices=("heat_chain", "random_stable"))
    sp.add_argument("--out", required=True, help="system file to write")
    sp.add_argument("--blocks", type=int, default=3, help="number of blocks")
    sp.add_argument("--grid-points", type=int, default=10, dest="grid_points",
                    help="heat_chain: interior grid points per rod (default 10)")
    sp.add_argument("--pattern", choices=PATTERNS, default="ring",
                    help="heat_chain: coupling pattern (default ring)")
    sp.add_argument("--state-dim", type=int, default=4, dest="state_dim",
                    help="random_stable: states per block (default 4)")
    sp.add_argument("--in-dim", type=int, default=1, dest="in_dim",
                    help="random_stable: inputs per block (default 1)")
    sp.add_argument("--out-dim", type=int, default=1, dest="out_dim",
                    help="random_stable: outputs per block (default 1)")
    sp.add_argument("--margin", type=float, default=0.5,
                    help="random_stable: spectral-abscissa margin (default 0.5)")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    sp.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StabradError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
