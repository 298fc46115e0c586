"""Command-line front end.

Subcommands: run (a config file), figure (bundled recipes), resonances,
scan-filter and verify.  Exit status 0 on success, 2 on configuration
errors, 3 on numerical-invariant failures.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import scenarios
from .dynamics import InvariantViolation
from .filtering import filter_scan
from .model import ModelParams
from .scenarios import (EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, OUTDIR_ENV,
                        ConfigError, fmt, recipe_config, reproduce_figure,
                        resonance_report, run_scenario, write_csv, _header)
from .spin_core import Spin
from .verify import report_table, run_oracle_suite


def _add_param_flags(ap: argparse.ArgumentParser) -> None:
    for flag in ("jk2", "jk3", "jz", "jxy", "d", "thop", "b0", "g1", "g23", "j"):
        default = 2.0 if flag in ("g1", "g23") else 0.0
        ap.add_argument(f"--{flag}", type=float, default=default)


def _params_from_args(args, model: str):
    if model in ("bh3", "trimer"):
        return (args.j, args.d)
    spin = {"s_half": Spin(1), "s_one": Spin(2)}.get(model)
    if spin is None:
        spin = Spin.of(args.s)
    return ModelParams(s2=spin, s3=spin, j_z=args.jz, j_xy=args.jxy,
                       j_k2=args.jk2, j_k3=args.jk3, d=args.d, t_hop=args.thop,
                       b0=args.b0, g1=args.g1, g23=args.g23)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="trispin",
        description="Three-particle spin model simulator: exact density-matrix "
                    "dynamics, resonance analysis and spin filtering.")
    ap.add_argument("--outdir", default=None,
                    help=f"output directory (default: ${OUTDIR_ENV} or '.')")
    sub = ap.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a scenario config file")
    runp.add_argument("config")

    figp = sub.add_parser("figure", help="emit the data behind a bundled figure")
    figp.add_argument("id", choices=scenarios.FIGURE_IDS)
    figp.add_argument("--dump-config", action="store_true",
                      help="print the canned config instead of running")
    figp.add_argument("--render", action="store_true",
                      help="also render the figure (needs the trispin-plots package)")

    resp = sub.add_parser("resonances", help="two-level block resonance report")
    resp.add_argument("model", choices=scenarios.MODELS)
    resp.add_argument("--s", default="1", help="coupled-particle spin for model=general")
    _add_param_flags(resp)

    scanp = sub.add_parser("scan-filter", help="filter-angle scan of relative "
                                               "transition probability")
    scanp.add_argument("--model", choices=("general", "s_half", "s_one"),
                       default="s_half")
    scanp.add_argument("--s", default="1")
    _add_param_flags(scanp)
    scanp.add_argument("--theta-in-points", type=int, default=33)
    scanp.add_argument("--theta-out-points", type=int, default=33)
    scanp.add_argument("--t-snapshot", type=float, default=133.0)
    scanp.add_argument("--from", dest="from_state", default="1:1")
    scanp.add_argument("--to", dest="to_state", default="1:0")
    scanp.add_argument("--name", default="scan")

    verp = sub.add_parser("verify", help="run the randomized oracle battery")
    verp.add_argument("-n", "--instances", type=int, default=40)
    verp.add_argument("--seed", type=int, default=7)
    return ap


def _resolve_outdir(args) -> str:
    if args.outdir:
        return args.outdir
    return os.environ.get(OUTDIR_ENV, ".")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    outdir = _resolve_outdir(args)
    try:
        return _dispatch(args, outdir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def _dispatch(args, outdir: str) -> int:
    if args.command == "run":
        files, summary = run_scenario(args.config, outdir)
        print(summary)
        for f in files:
            print(f"wrote {f}")
        return EXIT_OK

    if args.command == "figure":
        if args.dump_config:
            text = recipe_config(args.id)
            if text is None:
                print(f"figure {args.id} is not scenario-backed; no config to dump",
                      file=sys.stderr)
                return EXIT_CONFIG
            print(text, end="")
            return EXIT_OK
        files, summary = reproduce_figure(args.id, outdir)
        print(summary)
        for f in files:
            print(f"wrote {f}")
        if args.render:
            return _render_files(args.id, files, outdir)
        return EXIT_OK

    if args.command == "resonances":
        params = _params_from_args(args, args.model)
        spin = Spin.of(args.s) if args.model == "general" else None
        text, names, cols = resonance_report(args.model, params, s=spin)
        os.makedirs(outdir, exist_ok=True)
        path = os.path.join(outdir, f"resonances_{args.model}.csv")
        head = {"model": args.model}
        if args.model in ("bh3", "trimer"):
            head.update(j=args.j, d=args.d)
        else:
            head.update(jk2=params.j_k2, jk3=params.j_k3, jz=params.j_z,
                        jxy=params.j_xy, d=params.d, b0=params.b0)
        write_csv(path, _header(head), names, cols)
        print(text)
        print(f"wrote {path}")
        return EXIT_OK

    if args.command == "scan-filter":
        params = _params_from_args(args, args.model)
        th_in = np.linspace(0.0, np.pi, args.theta_in_points)
        th_out = np.linspace(0.0, np.pi, args.theta_out_points)
        grid = filter_scan(th_in, th_out, args.t_snapshot, params,
                           (args.from_state, args.to_state))
        os.makedirs(outdir, exist_ok=True)
        path = os.path.join(outdir, f"{args.name}_scan.csv")
        ti = np.repeat(grid.theta_in, len(grid.theta_out))
        to = np.tile(grid.theta_out, len(grid.theta_in))
        write_csv(path, _header({"model": args.model,
                                 "t_snapshot_ps": grid.t_snapshot,
                                 "from": args.from_state, "to": args.to_state}),
                  ["theta_in", "theta_out", "value"],
                  [ti, to, grid.values.ravel()])
        print(f"scan peak = {fmt(np.nanmax(grid.values))}")
        print(f"wrote {path}")
        return EXIT_OK

    if args.command == "verify":
        reports = run_oracle_suite(n_random=args.instances, seed=args.seed)
        print(report_table(reports))
        return EXIT_OK if all(r.passed for r in reports) else EXIT_NUMERIC

    raise AssertionError(f"unhandled command {args.command}")


def _render_files(figure_id: str, files: list[str], outdir: str) -> int:
    try:
        from trispin_plots.render import render_figure_file
    except ImportError:
        print("rendering needs the trispin-plots package (pip install ./plots)",
              file=sys.stderr)
        return EXIT_CONFIG
    csvs = [p for p in files if p.endswith(".csv")]
    balance = [p for p in csvs if p.endswith("_balance.csv")]
    rendered = []
    if balance:
        out = os.path.join(outdir, f"{figure_id}.svg")
        render_figure_file("fig3", balance, out)
        rendered.append(out)
    for path in csvs:
        if path in balance:
            continue
        # pick the renderer from the data kind; figure ids share schemas
        if path.endswith("_bloch.csv"):
            kind = "fig7"
        elif path.endswith("_scan.csv"):
            kind = "fig4"
        else:
            kind = figure_id if figure_id not in ("fig7", "fig4", "fig3") else "fig2"
        out = path[:-4] + ".svg"
        render_figure_file(kind, [path], out)
        rendered.append(out)
    for out in rendered:
        print(f"rendered {out}")
    if not rendered:
        print("nothing to render", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
