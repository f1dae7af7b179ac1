"""Command-line front end.

Four subcommands:

* ``run``         -- play a scenario matrix, write results.csv (+ figures,
                     optional per-run step logs).
* ``transpile``   -- turn a serialized decision-tree model into a standalone
                     C source file plus a size report.
* ``recommend``   -- feasibility table of app class x pattern x medium.
* ``check-trends`` -- judge a results.csv against the expected qualitative
                     trends and emit a JSON verdict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .harness import (
    emit_recommendation_table,
    load_results_csv,
    load_scenarios,
    preset,
    run_matrix,
    trend_checks,
    write_recommendation_csv,
    write_results_csv,
)
from .learners import deserialize
from .netsim import MessageSizes, default_profiles, load_profiles
from .patterns import write_step_log
from .transpile import dump_text, emit_c, lower_tree, report_sizes


def _parse_seed_list(text: str) -> tuple[int, ...]:
    try:
        seeds = tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError("seed list is empty")
    return seeds


def _load_profiles_arg(path: str | None):
    return load_profiles(path) if path else default_profiles()


def _cmd_run(args: argparse.Namespace) -> int:
    profiles = _load_profiles_arg(args.profiles)
    if args.scenarios:
        configs = load_scenarios(args.scenarios)
        if args.seeds is not None:
            from dataclasses import replace
            configs = [replace(c, seeds=args.seeds) for c in configs]
    else:
        configs = preset(args.preset, seeds=args.seeds)
    os.makedirs(args.out_dir, exist_ok=True)

    on_run = None
    if args.step_logs:
        log_dir = os.path.join(args.out_dir, "step_logs")
        os.makedirs(log_dir, exist_ok=True)

        def on_run(config, seed, run):  # noqa: F811
            write_step_log(run, os.path.join(log_dir, f"{config.name}-seed{seed}.csv"))

    rows = run_matrix(configs, profiles, on_run=on_run)
    results_path = os.path.join(args.out_dir, "results.csv")
    write_results_csv(rows, results_path)
    for row in rows:
        if row.status == "ok":
            print(f"{row.name}: ok score={row.mean_score:.4f}")
        else:
            print(f"{row.name}: error {row.error}")
    print(f"wrote {results_path}")

    if not args.no_figures:
        from . import report

        ok_rows = [r for r in rows if r.status == "ok"]
        if ok_rows:
            scores_path = os.path.join(args.out_dir, "scores.png")
            report.save_score_bars(rows, scores_path)
            print(f"wrote {scores_path}")
        if any(r.pattern == "P0" and r.offset_w1 is not None for r in ok_rows):
            offsets_path = os.path.join(args.out_dir, "offsets.png")
            report.save_offset_bars(rows, offsets_path)
            print(f"wrote {offsets_path}")
    return 0 if all(r.status == "ok" for r in rows) else 1


def _cmd_transpile(args: argparse.Namespace) -> int:
    with open(args.model, "rb") as fh:
        blob = fh.read()
    model = deserialize(blob)
    if model.kind != "decision_tree":
        print(f"error: cannot transpile a {model.kind} model", file=sys.stderr)
        return 2
    program = lower_tree(model)
    source = emit_c(program)
    os.makedirs(args.out_dir, exist_ok=True)
    stem = args.name or os.path.splitext(os.path.basename(args.model))[0]
    c_path = os.path.join(args.out_dir, f"{stem}.c")
    with open(c_path, "w") as fh:
        fh.write(source.text)
    sizes = report_sizes(model, source)
    sizes_path = os.path.join(args.out_dir, f"{stem}_sizes.json")
    with open(sizes_path, "w") as fh:
        json.dump(sizes, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {c_path}")
    print(f"wrote {sizes_path}")
    if args.dump:
        txt_path = os.path.join(args.out_dir, f"{stem}.txt")
        with open(txt_path, "w") as fh:
            fh.write(dump_text(program))
        print(f"wrote {txt_path}")
    print(f"model {sizes['model_bytes']} bytes, source {sizes['source_bytes']} bytes")
    return 0


def _cmd_recommend(args: argparse.Namespace) -> int:
    profiles = _load_profiles_arg(args.profiles)
    # the zero-cost simulation medium is not a deployment option
    table_profiles = {k: v for k, v in profiles.items() if k != "instant"}
    if not table_profiles:
        table_profiles = profiles
    sizes = MessageSizes(
        s_bytes=args.s_bytes, d_bytes=args.d_bytes, m_bytes=args.m_bytes
    )
    rows = emit_recommendation_table(
        table_profiles, sizes=sizes, edge_ms=args.edge_ms, cloud_ms=args.cloud_ms
    )
    os.makedirs(args.out_dir, exist_ok=True)
    csv_path = os.path.join(args.out_dir, "recommendation.csv")
    write_recommendation_csv(rows, csv_path)
    for row in rows:
        mark = "feasible" if row.feasible else "infeasible"
        print(f"{row.app_class} {row.pattern} {row.medium}: "
              f"{row.latency_ms:.3f} ms {mark}")
    print(f"wrote {csv_path}")
    if not args.no_figures:
        from . import report

        latency_path = os.path.join(args.out_dir, "latency.png")
        energy_path = os.path.join(args.out_dir, "energy.png")
        report.save_latency_curves(table_profiles, latency_path)
        report.save_energy_curves(table_profiles, energy_path)
        print(f"wrote {latency_path}")
        print(f"wrote {energy_path}")
    return 0


def _cmd_check_trends(args: argparse.Namespace) -> int:
    rows = load_results_csv(args.results)
    verdicts = trend_checks(
        rows,
        division_margin=args.division_margin,
        frame_margin=args.frame_margin,
        offset_margin=args.offset_margin,
        offset_flat_margin=args.offset_flat_margin,
        order_margin=args.order_margin,
    )
    for name, claim in verdicts["claims"].items():
        print(f"{name}: {claim['verdict']} ({claim['detail']})")
    print(f"overall: {verdicts['verdict']}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(verdicts, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(f"wrote {args.out}")
    return 2 if verdicts["n_fail"] else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deltasim",
        description="simulate edge/cloud learning patterns and report costs",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario matrix")
    p_run.add_argument("--scenarios", help="scenario INI file")
    p_run.add_argument(
        "--preset", default="trends",
        help="named scenario preset when no --scenarios file is given "
             "(trends, full-grid, c1..c4)",
    )
    p_run.add_argument("--profiles", help="medium profile INI file")
    p_run.add_argument(
        "--seeds", type=_parse_seed_list, default=None,
        help="comma-separated seed list overriding every scenario",
    )
    p_run.add_argument("--out-dir", default="out", help="output directory")
    p_run.add_argument(
        "--step-logs", action="store_true",
        help="write a per-step CSV log for every (scenario, seed) run",
    )
    p_run.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering")
    p_run.set_defaults(func=_cmd_run)

    p_tr = sub.add_parser("transpile", help="emit C source for a tree model")
    p_tr.add_argument("model", help="serialized model file")
    p_tr.add_argument("--out-dir", default="out", help="output directory")
    p_tr.add_argument("--name", help="output stem (default: model file stem)")
    p_tr.add_argument("--dump", action="store_true",
                      help="also write the plain-text tree dump")
    p_tr.set_defaults(func=_cmd_transpile)

    p_rec = sub.add_parser("recommend",
                           help="app class / pattern / medium feasibility")
    p_rec.add_argument("--profiles", help="medium profile INI file")
    p_rec.add_argument("--out-dir", default="out", help="output directory")
    p_rec.add_argument("--edge-ms", type=float, default=1.0,
                       help="local compute per prediction")
    p_rec.add_argument("--cloud-ms", type=float, default=1.0,
                       help="cloud compute per prediction")
    p_rec.add_argument("--s-bytes", type=int, default=21,
                       help="sensor message payload bytes")
    p_rec.add_argument("--d-bytes", type=int, default=5,
                       help="decision message payload bytes")
    p_rec.add_argument("--m-bytes", type=int, default=330,
                       help="model message payload bytes")
    p_rec.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering")
    p_rec.set_defaults(func=_cmd_recommend)

    p_ct = sub.add_parser("check-trends",
                          help="judge a results.csv against expected trends")
    p_ct.add_argument("results", help="results.csv produced by run")
    p_ct.add_argument("--out", help="write the JSON verdict here")
    p_ct.add_argument("--division-margin", type=float, default=0.05)
    p_ct.add_argument("--frame-margin", type=float, default=0.02)
    p_ct.add_argument("--offset-margin", type=float, default=0.03)
    p_ct.add_argument("--offset-flat-margin", type=float, default=0.05)
    p_ct.add_argument("--order-margin", type=float, default=0.02)
    p_ct.set_defaults(func=_cmd_check_trends)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
