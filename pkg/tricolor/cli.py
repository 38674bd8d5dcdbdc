"""
Command-line entry point: gen, solve, sweep, report, stats and verify.

Exit codes: 0 success, 2 usage error (argparse), 3 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import pandas as pd

from tricolor import bench, plots, stats
from tricolor.config import load_settings
from tricolor.errors import TricolorError
from tricolor.graph_core import GRAPH_TYPES, load_graph, save_graph
from tricolor.graph_gen import GenSpec, generate, sweep_specs
from tricolor.oracle import BudgetExceeded, Colorable, exact_3color
from tricolor.solvers import ALGORITHMS, hsa_ea, make_config, solve

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3


def _params(pairs: Optional[List[str]]) -> Dict[str, object]:
    params: Dict[str, object] = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"--param expects key=value, got {pair!r}")
        params[key] = bench.parse_value(value)
    return params


def cmd_gen(args: argparse.Namespace) -> int:
    seeds = bench.parse_seeds(args.seeds)
    if args.p is not None:
        specs = [GenSpec(args.type, args.n, args.p, args.delta, seed) for seed in seeds]
    else:
        if None in (args.p_min, args.p_max, args.p_step):
            raise TricolorError("give either --p or all of --p-min, --p-max and --p-step")
        specs = sweep_specs(args.type, args.n, args.p_min, args.p_max, args.p_step, seeds, delta=args.delta)
    out_dir = Path(args.out)
    for spec in specs:
        path = save_graph(generate(spec), out_dir / f"{spec.instance_id}.col")
        print(path)
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    settings = load_settings()
    g = load_graph(args.graph)
    budget = args.budget or settings.budget
    params = _params(args.param)
    if args.trace:
        if args.algo != "hsaea":
            raise TricolorError("--trace is only available for hsaea")
        states: List[hsa_ea.EAState] = []
        cfg = make_config("hsaea", params, budget)
        record = hsa_ea.run(g, cfg, args.seed, state_out=states)
        pd.DataFrame(
            states[0].trace_rows, columns=["generation", "best_fitness", "reference_fitness", "mean_q"]
        ).to_csv(args.trace, index=False)
    else:
        record = solve(args.algo, g, budget, args.seed, params)
    print(record.to_json())
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    settings = load_settings()
    plan = bench.load_plan(args.plan, default_runs=settings.runs, default_budget=settings.budget)
    out_dir = Path(args.out or settings.results_dir)
    store = bench.RecordStore(out_dir / f"{Path(args.plan).stem}.jsonl", plan)
    jobs = bench.default_jobs(args.jobs)
    finished = sum(1 for _ in bench.run_experiment(plan, jobs=jobs, store=store))
    logger.info("sweep finished: %d new records in %s", finished, store.path)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    records = bench.read_records(args.input)
    out_dir = Path(args.out or (args.input if Path(args.input).is_dir() else Path(args.input).parent))
    out_dir.mkdir(parents=True, exist_ok=True)

    results = bench.aggregate(records, bench.STRATIFICATION, include_failures=args.include_failures)
    table = bench.results_frame(results)
    table.to_csv(out_dir / "summary.csv", index=False)
    stats.instance_scores(records).to_csv(out_dir / "instances.csv", index=False)

    if table["p"].nunique() > 1:
        transition = bench.phase_transition_report(results)
        transition.minima.to_csv(out_dir / "transition.csv", index=False)
    plots.write_sweep_charts(table, out_dir, html=args.html)

    for preset in args.error_rates or []:
        bench.error_rate_table(records, preset).to_csv(out_dir / f"er_{preset}.csv", index=False)
    print(out_dir / "summary.csv")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    per = pd.read_csv(args.input)
    group_by = [c for c in args.group_by.split(",") if c]
    matrices = stats.matrices_from_scores(per, group_by)
    report = stats.significance_report(matrices, alpha=args.alpha)
    out_dir = Path(args.out or Path(args.input).parent)
    out_dir.mkdir(parents=True, exist_ok=True)
    if report:
        pd.concat([sig.to_frame() for sig in report]).to_csv(out_dir / "ranks.csv", index=False)
    for sig in report:
        label = "_".join(str(v) for v in sig.group)
        plots.rank_diagram_svg(sig, out_dir / f"rank_{label}.svg")
    print(out_dir / "ranks.csv")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    g = load_graph(args.graph)
    verdict = exact_3color(g, node_budget=args.node_budget)
    if isinstance(verdict, Colorable):
        result = {"verdict": "colorable", "nodes": verdict.nodes, "witness": verdict.witness.to_list()}
    elif isinstance(verdict, BudgetExceeded):
        result = {"verdict": "unknown", "nodes": verdict.nodes}
    else:
        result = {"verdict": "not_colorable", "nodes": verdict.nodes}
    result["instance_id"] = g.instance_id
    print(json.dumps(result))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tricolor", description="Graph 3-coloring solvers and benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate planted 3-colorable graphs as DIMACS .col files")
    gen.add_argument("--type", choices=GRAPH_TYPES, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float)
    gen.add_argument("--p-min")
    gen.add_argument("--p-max")
    gen.add_argument("--p-step")
    gen.add_argument("--delta", type=int, default=0)
    gen.add_argument("--seed", "--seeds", dest="seeds", default="1", help="seed, list or range such as 1-10")
    gen.add_argument("--out", default=".")
    gen.set_defaults(func=cmd_gen)

    slv = sub.add_parser("solve", help="run one algorithm once and print its RunRecord as JSON")
    slv.add_argument("--algo", choices=ALGORITHMS, required=True)
    slv.add_argument("--graph", required=True)
    slv.add_argument("--seed", type=int, default=1)
    slv.add_argument("--budget", type=int)
    slv.add_argument("--param", action="append", help="algorithm parameter key=value (repeatable)")
    slv.add_argument("--trace", help="write per-generation CSV (hsaea only)")
    slv.set_defaults(func=cmd_solve)

    swp = sub.add_parser("sweep", help="execute a plan file into an append-only record store")
    swp.add_argument("--plan", required=True)
    swp.add_argument("--out")
    swp.add_argument("--jobs", type=int)
    swp.set_defaults(func=cmd_sweep)

    rep = sub.add_parser("report", help="aggregate records into CSV tables and charts")
    rep.add_argument("--in", dest="input", required=True, help="record store file or directory")
    rep.add_argument("--out")
    rep.add_argument("--html", action="store_true", help="also write interactive HTML charts")
    rep.add_argument("--include-failures", action="store_true", help="count failed runs in AES")
    rep.add_argument("--error-rates", nargs="*", choices=sorted(bench.ERROR_RATE_PRESETS))
    rep.set_defaults(func=cmd_report)

    st = sub.add_parser("stats", help="Friedman test and Bonferroni-Dunn rank diagrams")
    st.add_argument("--in", dest="input", required=True, help="instances.csv written by report")
    st.add_argument("--out")
    st.add_argument("--alpha", type=float, default=0.05)
    st.add_argument("--group-by", default="graph_type,p")
    st.set_defaults(func=cmd_stats)

    ver = sub.add_parser("verify", help="decide 3-colorability exactly")
    ver.add_argument("--graph", required=True)
    ver.add_argument("--node-budget", type=int, default=1_000_000)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        settings = load_settings()
        logging.basicConfig(
            level=getattr(logging, settings.log_level, logging.INFO),
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        return args.func(args)
    except argparse.ArgumentTypeError as exc:
        print(f"tricolor: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TricolorError, OSError, ValueError, pd.errors.ParserError) as exc:
        print(f"tricolor: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
