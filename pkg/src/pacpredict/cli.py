"""Command-line entry point driving every workflow.

Subcommands: simulate (bot corpora), eval (accuracy/streaks/timing),
sweep (depth x lambda grid), loo (leave-one-out ablation), correlate
(speed-accuracy Pearson), validate-maze, and serve (live play).

Every artifact embeds the config digest on its first line.  Accuracy
artifacts are byte-reproducible for a fixed config and seed; wall-clock
timing lives in separate `*_timing.csv` sidecars, which are excluded from
the determinism contract because elapsed time is not reproducible.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .config import Config
from .gamelog import read_log, serialize_log
from .harness import (
    EvalReport,
    Model1Predictor,
    Model2Predictor,
    RandomBaseline,
    evaluate,
    leave_one_out,
    parameter_sweep,
    pearson_from_pairs,
    run_bots,
)
from .lookahead import SearchParams
from .maze import MazeError, adjacency_census, branching_rate, load_maze_file

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _digest_header(config: Config) -> list[str]:
    return [f"# config_digest={config.digest()}"]


def _write_csv(path: Path, config: Config, header: list[str],
               rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in _digest_header(config):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _load_logs(paths: list[str]):
    files: list[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            files.extend(sorted(path.glob("*.log")))
        elif path.exists():
            files.append(path)
        else:
            raise FileNotFoundError(f"log path not found: {p}")
    return [read_log(f) for f in files]


def _report_rows(report: EvalReport) -> list[list]:
    return [[row.index, row.seed, row.ticks, row.evaluated, row.correct,
             f"{row.accuracy:.6f}", " ".join(map(str, row.streaks))]
            for row in report.per_game]


def _write_eval_outputs(out: Path, stem: str, config: Config,
                        report: EvalReport) -> None:
    _write_csv(out / f"{stem}.csv", config,
               ["game", "seed", "ticks", "evaluated", "correct", "accuracy",
                "streaks"],
               _report_rows(report))
    _write_csv(out / f"{stem}_summary.csv", config,
               ["predictor", "games", "states", "correct", "accuracy",
                "streak_mean", "streak_sd", "mean_reciprocal_branching"],
               [[report.predictor, report.games, report.states_evaluated,
                 report.correct, f"{report.accuracy:.6f}",
                 f"{report.streak_mean:.6f}", f"{report.streak_sd:.6f}",
                 f"{report.mean_reciprocal_branching:.6f}"]])
    _write_csv(out / f"{stem}_timing.csv", config,
               ["game", "ms_mean"],
               [[row.index, f"{row.ms_mean:.4f}"] for row in report.per_game]
               + [["overall_mean", f"{report.ms_mean:.4f}"],
                  ["overall_median", f"{report.ms_median:.4f}"],
                  ["overall_sd", f"{report.ms_sd:.4f}"]])


def cmd_validate_maze(args, config: Config) -> int:
    try:
        if args.file == "bundled":
            import pacpredict

            from .maze import load_maze
            maze = load_maze(pacpredict.default_maze_text())
        else:
            maze = load_maze_file(args.file)
    except (MazeError, OSError) as exc:
        print(f"invalid maze: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    census = adjacency_census(maze)
    print(f"navigable cells: {maze.n_cells}")
    print(f"adjacency census: deg2={census.deg2} deg3={census.deg3} "
          f"deg4={census.deg4}")
    print(f"branching rate (w=1): {branching_rate(census, 1):.4f}")
    print(f"checksum: {maze.checksum}")
    return EXIT_OK


def cmd_simulate(args, config: Config) -> int:
    maze = config.load_maze()
    logs = run_bots(maze, args.policy, args.games, args.seed, config.engine,
                    max_ticks=config.max_ticks, config_digest=config.digest())
    out = Path(args.out or config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, log in enumerate(logs):
        path = out / f"{args.policy}_{args.seed}_{i:03d}.log"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(serialize_log(log))
    print(f"wrote {len(logs)} logs to {out}")
    return EXIT_OK


def cmd_eval(args, parser, config: Config) -> int:
    logs = _load_logs(args.logs)
    if not logs:
        parser.error("no logs found to evaluate")
    maze = config.load_maze()
    params = SearchParams(depth=args.depth or config.depth,
                          lam=getattr(args, "lambda") or config.lam)
    audit_sink = [] if args.audit else None
    if args.model == "1":
        predictor = Model1Predictor(maze, params, config.model1,
                                    config.engine, node_cap=config.node_cap)
    elif args.model == "2":
        cfg2 = config.model2_config()
        cfg2 = type(cfg2)(params=params, usage_filter=cfg2.usage_filter,
                          state_checker_enabled=cfg2.state_checker_enabled,
                          weights=cfg2.weights)
        predictor = Model2Predictor(maze, cfg2, config.engine,
                                    audit_sink=audit_sink)
    else:
        predictor = RandomBaseline(maze, seed=1)
    report = evaluate(logs, predictor, maze, config.engine)
    out = Path(args.out or config.output_dir)
    _write_eval_outputs(out, f"eval_model{args.model}", config, report)
    if audit_sink is not None:
        import json as _json

        out.mkdir(parents=True, exist_ok=True)
        with open(out / "audit_model2.jsonl", "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write("\n".join(_digest_header(config)) + "\n")
            for entry in audit_sink:
                fh.write(_json.dumps(entry, sort_keys=True) + "\n")
    print(f"model={args.model} games={report.games} "
          f"states={report.states_evaluated} accuracy={report.accuracy:.4f} "
          f"streak_mean={report.streak_mean:.2f} ms_mean={report.ms_mean:.2f}")
    return EXIT_OK


def cmd_sweep(args, parser, config: Config) -> int:
    logs = _load_logs(args.logs)
    if not logs:
        parser.error("no logs found to sweep")
    maze = config.load_maze()
    base2 = config.model2_config()

    def factory(params: SearchParams):
        cfg2 = type(base2)(params=params, usage_filter=base2.usage_filter,
                           state_checker_enabled=base2.state_checker_enabled,
                           weights=base2.weights)
        return Model2Predictor(maze, cfg2, config.engine)

    result = parameter_sweep(logs, maze, factory, config.engine)
    out = Path(args.out or config.output_dir)
    rows = []
    timing_rows = []
    for cell in result.cells:
        if cell.report is None:
            rows.append([cell.depth, cell.lam, "offline-skipped", ""])
        else:
            rows.append([cell.depth, cell.lam,
                         f"{cell.report.accuracy:.6f}",
                         cell.report.states_evaluated])
            timing_rows.append([cell.depth, cell.lam,
                                f"{cell.report.ms_mean:.4f}"])
    _write_csv(out / "sweep.csv", config,
               ["depth", "lambda", "accuracy", "states"], rows)
    _write_csv(out / "sweep_timing.csv", config,
               ["depth", "lambda", "ms_mean"], timing_rows)
    best = result.best()
    if best is not None:
        print(f"best cell: depth={best.depth} lambda={best.lam} "
              f"accuracy={best.report.accuracy:.4f}")
    return EXIT_OK


def cmd_loo(args, parser, config: Config) -> int:
    logs = _load_logs(args.logs)
    if not logs:
        parser.error("no logs found for leave-one-out")
    maze = config.load_maze()
    table = leave_one_out(logs, maze, config.engine)
    out = Path(args.out or config.output_dir)
    # Accuracy columns are deterministic; ms/State mirrors the reference
    # table's structure but is wall-clock, so it lives in the sidecar.
    _write_csv(out / "loo.csv", config,
               ["Excluded", "Acc %", "Usage"],
               [[row.label,
                 "-" if row.d_acc_pp is None else f"{row.d_acc_pp:.4f}",
                 row.usage] for row in table.rows])
    _write_csv(out / "loo_timing.csv", config,
               ["Excluded", "ms/State", "Acc %", "Usage"],
               [[row.label,
                 "-" if row.d_ms is None else f"{row.d_ms:.4f}",
                 "-" if row.d_acc_pp is None else f"{row.d_acc_pp:.4f}",
                 row.usage] for row in table.rows])
    print(f"baseline accuracy={table.baseline_accuracy:.4f} "
          f"ms={table.baseline_ms:.2f}")
    print(f"{'Excluded':45s} {'ms/State':>9s} {'Acc %':>8s} Usage")
    for row in table.rows:
        dms = "-" if row.d_ms is None else f"{row.d_ms:+.2f}"
        dacc = "-" if row.d_acc_pp is None else f"{row.d_acc_pp:+.2f}"
        print(f"{row.label:45s} {dms:>9s} {dacc:>8s} {row.usage:>3s}")
    return EXIT_OK


def cmd_correlate(args, config: Config) -> int:
    pairs = []
    with open(args.report, encoding="utf-8") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader)
        try:
            acc_i = header.index("accuracy")
            ms_i = header.index("ms_mean")
        except ValueError:
            print("report must have 'accuracy' and 'ms_mean' columns",
                  file=sys.stderr)
            return EXIT_FAILURE
        for row in reader:
            pairs.append((float(row[acc_i]), float(row[ms_i])))
    result = pearson_from_pairs(pairs)
    if result.undefined:
        print(f"correlation undefined: {result.reason}")
    else:
        print(f"pearson r={result.r:.4f} p={result.p:.4f} n={result.n}")
    return EXIT_OK


def cmd_serve(args, config: Config) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port or config.server_port,
                log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pacpredict",
        description="Pac-Man move-prediction workbench",
    )
    parser.add_argument("--config", help="INI config file", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-maze", help="parse a maze file, print census")
    p.add_argument("--file", default="bundled",
                   help="maze file path, or 'bundled' for the shipped maze")

    p = sub.add_parser("simulate", help="generate bot game logs")
    p.add_argument("--policy", required=True,
                   choices=["greedy_pills", "hunter", "cautious", "random"])
    p.add_argument("--games", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default=None)

    p = sub.add_parser("eval", help="evaluate a predictor on logs")
    p.add_argument("--model", required=True, choices=["1", "2", "random"])
    p.add_argument("--logs", nargs="+", required=True)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--lambda", type=int, default=None)
    p.add_argument("--audit", action="store_true",
                   help="model 2: write per-plan Behavlet firing traces")
    p.add_argument("--out", default=None)

    p = sub.add_parser("sweep", help="depth x lambda parameter sweep")
    p.add_argument("--model", required=True, choices=["2"])
    p.add_argument("--logs", nargs="+", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("loo", help="leave-one-out Behavlet ablation")
    p.add_argument("--logs", nargs="+", required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("correlate", help="speed-accuracy Pearson correlation")
    p.add_argument("--report", required=True)

    p = sub.add_parser("serve", help="run the live play server")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    config = Config.from_file(args.config) if args.config else Config()
    try:
        if args.command == "validate-maze":
            return cmd_validate_maze(args, config)
        if args.command == "simulate":
            return cmd_simulate(args, config)
        if args.command == "eval":
            return cmd_eval(args, parser, config)
        if args.command == "sweep":
            return cmd_sweep(args, parser, config)
        if args.command == "loo":
            return cmd_loo(args, parser, config)
        if args.command == "correlate":
            return cmd_correlate(args, config)
        if args.command == "serve":
            return cmd_serve(args, config)
    except SystemExit as exc:  # argparse usage errors from parser.error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # runtime failures -> exit 1
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
