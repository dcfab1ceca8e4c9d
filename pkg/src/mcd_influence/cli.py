"""Command line entry point: ``mcd-influence <verb> ...``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .cascade import CascadeConfig, estimate_spread
from .diversity import SeedSet, read_seeds, select_top_k, write_scores, write_seeds
from .experiment import CASCADE_COLUMNS, METHODS, DatasetError, ExperimentConfig, compute_stats, emit_plot_data, ranker, run_experiment
from .graph import generate_ba, read_edge_list, write_edge_list
from .leiden import QualityConfig, leiden, write_partition


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


def _leiden_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--quality", choices=["modularity", "cpm"], default="modularity")
    p.add_argument("--resolution", type=float, default=1.0)


def _qcfg(args) -> QualityConfig:
    return QualityConfig(args.quality, args.resolution, args.seed)


def cmd_score(args) -> int:
    g, labels, _ = read_edge_list(args.graph)
    table = ranker(args.method, _qcfg(args))(g)
    with _open_out(args.out) as fh:
        write_scores(table, fh, labels)
    if args.seeds_out:
        with _open_out(args.seeds_out) as fh:
            write_seeds(select_top_k(table, args.fraction), fh, labels)
    return 0


def cmd_communities(args) -> int:
    g, labels, diag = read_edge_list(args.graph)
    part = leiden(g, _qcfg(args))
    with _open_out(args.out) as fh:
        write_partition(part, fh, labels)
    print(f"{g.node_count} nodes, {g.edge_count} edges, {part.community_count} communities "
          f"({diag.duplicate_edges} duplicate edges, {diag.self_loops} self-loops dropped)", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    g, labels, _ = read_edge_list(args.graph)
    if args.seeds:
        with open(args.seeds, encoding="utf-8") as fh:
            seeds = SeedSet(tuple(read_seeds(fh, labels)), args.fraction or 0.0)
        method = args.method or "custom"
    else:
        if not args.method or not args.fraction:
            raise ValueError("give --seeds, or --method together with --fraction")
        seeds = select_top_k(ranker(args.method, _qcfg(args))(g), args.fraction)
        method = args.method
    outcome = estimate_spread(g, seeds, CascadeConfig(args.prob, args.runs, args.seed))
    with _open_out(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CASCADE_COLUMNS)
        w.writerow([method, args.dataset or Path(args.graph).stem, repr(seeds.spreader_fraction), repr(args.prob),
                    args.runs, repr(outcome.mean_infected), repr(outcome.mean_final_infected_scale), repr(outcome.std_error)])
    return 0


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.load(args.config)
    overrides = {}
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.prob is not None:
        overrides["activation_probability"] = args.prob
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.no_timing:
        overrides["timing"] = False
    if overrides:
        d = cfg.to_dict()
        d.update(overrides)
        cfg = ExperimentConfig.from_dict(d, base_dir=cfg.base_dir)
    out = run_experiment(cfg, args.out)
    print(f"bundle written to {out}", file=sys.stderr)
    return 0


def cmd_stats(args) -> int:
    reports = compute_stats(args.bundle, control=args.control, out_dir=args.out)
    emit_plot_data(args.bundle)
    for metric, rep in reports.items():
        print(f"[{metric}] n={rep.n} Ff={rep.friedman_statistic:.4f} Fid={rep.iman_davenport:.4f} (p={rep.iman_davenport_p:.3g})")
        for c in rep.comparisons:
            print(f"  {c.method:8s} z={c.z_score:8.3f} p={c.p_value:.3g} APV={c.adjusted_p:.3g}")
    return 0


def cmd_gen_ba(args) -> int:
    g = generate_ba(args.n, args.m, args.seed)
    with _open_out(args.out) as fh:
        write_edge_list(g, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcd-influence", description="Community-diversity seed selection and IC evaluation")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("score", help="rank nodes of one graph with one method")
    p.add_argument("graph")
    p.add_argument("--method", choices=METHODS, default="MCD")
    p.add_argument("--out", help="score CSV (default stdout)")
    p.add_argument("--fraction", type=float, default=0.05)
    p.add_argument("--seeds-out", help="also write the top-k seed labels here")
    _leiden_args(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("communities", help="Leiden partition as CSV")
    p.add_argument("graph")
    p.add_argument("--out")
    _leiden_args(p)
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("simulate", help="Independent Cascade spread of a seed set")
    p.add_argument("graph")
    p.add_argument("--seeds", help="file with one seed label per line")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--fraction", type=float)
    p.add_argument("--prob", type=float, default=0.1)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--dataset")
    p.add_argument("--out")
    _leiden_args(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("experiment", help="run a JSON experiment config")
    p.add_argument("config")
    p.add_argument("--out", help="bundle directory (default: output_dir from config)")
    p.add_argument("--runs", type=int)
    p.add_argument("--prob", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--no-timing", action="store_true", help="skip ranking timings (byte-stable bundles)")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("stats", help="Friedman / Holm tables from a bundle's results.csv")
    p.add_argument("bundle")
    p.add_argument("--control", default="MCD")
    p.add_argument("--out", help="directory for the stats CSVs (default: <bundle>/stats)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen-ba", help="Barabási–Albert edge list")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_ba)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, DatasetError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
