"""Experiment orchestration: datasets x methods x spreader fractions.

A run writes a bundle directory::

    config.json          normalised copy of the config
    datasets.csv         per-dataset sizes, load diagnostics, community count
    communities/*.csv    Leiden partition per dataset
    scores/*.csv         score table per (dataset, method)
    seeds.csv            seed set per cell
    cascades.csv         Monte Carlo outcome per cell
    results.csv          metric row per cell
    errors.csv           cells that failed
    stats/*.csv          Friedman ranks and Holm tables per metric
    plots/*.csv          one table per (dataset, metric) for plotting
    summary.txt          human-readable digest of the stats tables

Config files are JSON (``"version": 1``); see ``configs/`` for examples.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import os
import warnings
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .baselines import cd_rank, degree_rank, h_index_rank, pagerank_rank
from .cascade import CascadeConfig, estimate_spread
from .diversity import ScoreTable, mcd_scores, select_top_k, write_scores
from .graph import Graph, NodeLabelMap, generate_ba, read_edge_list
from .leiden import Partition, QualityConfig, leiden, write_partition
from .metrics import RESULT_COLUMNS, MetricCell, UndefinedDistance, avg_spreader_distance, time_ranking
from .stats import compare_with_control, rank_rows, write_holm_table, write_rank_table

log = logging.getLogger(__name__)

CONFIG_VERSION = 1
METHODS = ("MCD", "CSR-CD", "PR", "HI", "DEG")
SMALL_FRACTIONS = (0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1)
LARGE_FRACTIONS = (0.005, 0.01, 0.015, 0.02, 0.025, 0.03, 0.035, 0.04)
LARGE_GRAPH_NODES = 2000
CASCADE_COLUMNS = ["method", "dataset", "fraction", "p", "runs", "mean_infected", "scale", "std_error"]
STAT_METRICS = {"scale": "higher", "ls": "higher"}


class DatasetError(RuntimeError):
    pass


def auto_fractions(n: int) -> tuple[float, ...]:
    """Spreader fractions by graph size; ``n == 2000`` counts as large."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return SMALL_FRACTIONS if n < LARGE_GRAPH_NODES else LARGE_FRACTIONS


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    path: str | None = None
    generator: dict | None = None  # {"model": "ba", "n": ..., "m": ..., "seed": ...}

    def load(self, base: Path) -> tuple[Graph, NodeLabelMap, dict]:
        if self.path is not None:
            p = Path(self.path)
            p = p if p.is_absolute() else base / p
            try:
                g, labels, diag = read_edge_list(p)
            except (OSError, ValueError) as e:
                raise DatasetError(f"dataset {self.name!r}: {e}") from e
            return g, labels, asdict(diag)
        gen = self.generator or {}
        if gen.get("model", "ba") != "ba":
            raise DatasetError(f"dataset {self.name!r}: unknown generator {gen.get('model')!r}")
        try:
            g = generate_ba(int(gen["n"]), int(gen["m"]), int(gen.get("seed", 0)))
        except (KeyError, ValueError) as e:
            raise DatasetError(f"dataset {self.name!r}: bad generator spec {gen}: {e}") from e
        return g, NodeLabelMap.identity(g.node_count), {"lines_read": 0, "raw_edges": g.edge_count, "duplicate_edges": 0, "self_loops": 0}


@dataclass(frozen=True)
class ExperimentConfig:
    datasets: tuple[DatasetSpec, ...]
    methods: tuple[str, ...] = METHODS
    fractions: tuple[float, ...] | str = "auto"
    activation_probability: float = 0.1
    runs: int = 100
    rng_seed: int = 0
    output_dir: str = "results"
    control: str = "MCD"
    leiden_quality: str = "modularity"
    leiden_resolution: float = 1.0
    timing: bool = True
    timing_repetitions: int = 3
    workers: int = 1
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        if not self.datasets:
            raise ValueError("at least one dataset required")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("duplicate methods")
        if self.fractions != "auto":
            if not self.fractions or not all(0 < f <= 1 for f in self.fractions):
                raise ValueError("fractions must lie in (0, 1]")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not 0 <= self.activation_probability <= 1:
            raise ValueError("activation_probability must be in [0, 1]")
        names = [d.name for d in self.datasets]
        if len(set(names)) != len(names):
            raise ValueError("duplicate dataset names")

    @classmethod
    def from_dict(cls, d: dict, base_dir: str = ".") -> "ExperimentConfig":
        d = dict(d)
        version = d.pop("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise ValueError(f"unsupported config version {version}")
        d["datasets"] = tuple(DatasetSpec(**x) for x in d["datasets"])
        if "methods" in d:
            d["methods"] = tuple(d["methods"])
        if isinstance(d.get("fractions"), list):
            d["fractions"] = tuple(float(f) for f in d["fractions"])
        return cls(**d, base_dir=base_dir)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh), base_dir=str(path.parent))

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        d["datasets"] = [{k: v for k, v in x.items() if v is not None} for x in d["datasets"]]
        d["methods"] = list(self.methods)
        d["fractions"] = self.fractions if self.fractions == "auto" else list(self.fractions)
        return {"version": CONFIG_VERSION, **d}

    def fractions_for(self, n: int) -> tuple[float, ...]:
        return auto_fractions(n) if self.fractions == "auto" else tuple(self.fractions)

    def quality_config(self) -> QualityConfig:
        return QualityConfig(self.leiden_quality, self.leiden_resolution, self.rng_seed)


def ranker(method: str, qcfg: QualityConfig) -> Callable[[Graph], ScoreTable]:
    """The full ranking pipeline for ``method``, community detection included."""
    if method == "MCD":
        return lambda g: mcd_scores(g, leiden(g, qcfg))[2]
    if method == "CSR-CD":
        return lambda g: cd_rank(g, leiden(g, qcfg))
    if method == "PR":
        return lambda g: pagerank_rank(g)
    if method == "HI":
        return h_index_rank
    if method == "DEG":
        return degree_rank
    raise ValueError(f"unknown method {method!r}")


def cell_seed(rng_seed: int, dataset: str, method: str) -> int:
    """Cascade stream per (dataset, method), shared by all of its fractions.

    Top-k seed sets are nested in k, so common coins make each method's
    estimated spread non-decreasing in the fraction run by run.
    """
    key = [rng_seed, zlib.crc32(dataset.encode()), zlib.crc32(method.encode())]
    return int(np.random.SeedSequence(key).generate_state(1)[0])


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def _run_cells(job) -> list[tuple]:
    """Seed selection, cascades and distance metric for one (dataset, method)."""
    g, dataset, method, scores, fractions, p, runs, rng_seed = job
    out = []
    for f in fractions:
        seeds = select_top_k(scores, f)
        outcome = estimate_spread(g, seeds, CascadeConfig(p, runs, cell_seed(rng_seed, dataset, method)))
        try:
            ls, unreachable = avg_spreader_distance(g, seeds)
        except UndefinedDistance as e:
            ls, unreachable = None, e.unreachable_pairs
        except ValueError:
            ls, unreachable = None, 0  # fewer than two seeds
        out.append((f, seeds.seeds, outcome.mean_infected, outcome.mean_final_infected_scale, outcome.std_error, ls, unreachable))
    return out


def _write_csv(path: Path, header: list[str], rows, comment: str | None = None) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def run_experiment(cfg: ExperimentConfig, output_dir: str | os.PathLike | None = None) -> Path:
    """Run every cell of ``cfg`` and write the bundle; returns its directory."""
    out = Path(output_dir if output_dir is not None else Path(cfg.base_dir) / cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "config.json", "w", encoding="utf-8") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    qcfg = cfg.quality_config()
    base = Path(cfg.base_dir)
    dataset_rows, seed_rows, errors = [], [], []
    jobs, timings, label_maps = [], {}, {}
    for ds in cfg.datasets:
        g, labels, diag = ds.load(base)
        label_maps[ds.name] = labels
        log.info("dataset %s: n=%d m=%d", ds.name, g.node_count, g.edge_count)
        part: Partition | None = None
        if g.node_count:
            part = leiden(g, qcfg)
            with open(_mkparent(out / "communities" / f"{ds.name}.csv"), "w", encoding="utf-8", newline="") as fh:
                write_partition(part, fh, labels)
        dataset_rows.append(
            [ds.name, g.node_count, g.edge_count, part.community_count if part else 0,
             diag["raw_edges"], diag["duplicate_edges"], diag["self_loops"]]
        )
        fractions = cfg.fractions_for(max(g.node_count, 1))
        for method in cfg.methods:
            rank = ranker(method, qcfg)
            try:
                scores = rank(g)
                if cfg.timing:
                    timings[(ds.name, method)] = time_ranking(rank, g, cfg.timing_repetitions).median
            except Exception as e:  # noqa: BLE001 - isolate failures per cell
                log.warning("%s/%s ranking failed: %s", ds.name, method, e)
                errors.extend([ds.name, method, repr(f), f"{type(e).__name__}: {e}"] for f in fractions)
                continue
            with open(_mkparent(out / "scores" / f"{ds.name}__{method}.csv"), "w", encoding="utf-8", newline="") as fh:
                write_scores(scores, fh, labels)
            jobs.append((g, ds.name, method, scores, fractions, cfg.activation_probability, cfg.runs, cfg.rng_seed))

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            cell_results = list(pool.map(_run_cells, jobs))
    else:
        cell_results = [_run_cells(j) for j in jobs]

    result_rows, cascade_rows = [], []
    for job, cells in zip(jobs, cell_results):
        _, dname, method = job[:3]
        labels = label_maps[dname]
        for f, seeds, mean_inf, scale, se, ls, unreachable in cells:
            cell = MetricCell(method, dname, f, scale, ls, unreachable, timings.get((dname, method)))
            result_rows.append(cell.row())
            cascade_rows.append([method, dname, repr(f), repr(cfg.activation_probability), cfg.runs, _fmt(mean_inf), _fmt(scale), _fmt(se)])
            seed_rows.append([dname, method, repr(f), len(seeds), " ".join(labels.label(v) for v in seeds)])

    _write_csv(out / "datasets.csv", ["dataset", "nodes", "edges", "communities", "raw_edges", "duplicate_edges", "self_loops"], dataset_rows)
    _write_csv(out / "seeds.csv", ["dataset", "method", "fraction", "k", "seeds"], seed_rows)
    _write_csv(out / "cascades.csv", CASCADE_COLUMNS, cascade_rows)
    _write_csv(out / "results.csv", RESULT_COLUMNS, result_rows)
    _write_csv(out / "errors.csv", ["dataset", "method", "fraction", "error"], errors)
    compute_stats(out, control=cfg.control, methods=cfg.methods)
    emit_plot_data(out, methods=cfg.methods)
    return out


def _mkparent(path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def read_results(bundle: str | os.PathLike) -> list[dict]:
    with open(Path(bundle) / "results.csv", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def metric_matrix(rows: list[dict], metric: str, methods: tuple[str, ...]):
    """Problems (dataset, fraction) where every method has a value for ``metric``."""
    cells: dict[tuple[str, str], dict[str, float]] = {}
    order: list[tuple[str, str]] = []
    for r in rows:
        key = (r["dataset"], r["fraction"])
        if key not in cells:
            cells[key] = {}
            order.append(key)
        if r[metric] != "":
            cells[key][r["method"]] = float(r[metric])
    problems, values = [], []
    for key in order:
        if all(m in cells[key] for m in methods):
            problems.append(f"{key[0]}@{key[1]}")
            values.append([cells[key][m] for m in methods])
    return problems, values


def compute_stats(bundle, control: str = "MCD", methods: tuple[str, ...] | None = None, out_dir=None) -> dict:
    """Friedman/Holm reports for each metric, computed from ``results.csv`` alone."""
    rows = read_results(bundle)
    if methods is None:
        methods = tuple(dict.fromkeys(r["method"] for r in rows))
    out = Path(out_dir) if out_dir is not None else Path(bundle) / "stats"
    out.mkdir(parents=True, exist_ok=True)
    reports = {}
    for metric, direction in STAT_METRICS.items():
        problems, values = metric_matrix(rows, metric, methods)
        if len(methods) < 2 or len(problems) < 2 or control not in methods:
            log.warning("stats for %s skipped: %d methods, %d complete problems", metric, len(methods), len(problems))
            continue
        rm = rank_rows(values, direction, methods, problems)
        report = compare_with_control(rm, control)
        reports[metric] = report
        with open(out / f"{metric}_ranks.csv", "w", encoding="utf-8", newline="") as fh:
            write_rank_table(report, fh)
        with open(out / f"{metric}_holm.csv", "w", encoding="utf-8", newline="") as fh:
            write_holm_table(report, fh)
    return reports


def emit_plot_data(bundle, methods: tuple[str, ...] | None = None, out_dir=None) -> list[Path]:
    """One CSV per (dataset, metric): a fraction column plus one column per method."""
    rows = read_results(bundle)
    if methods is None:
        methods = tuple(dict.fromkeys(r["method"] for r in rows))
    out = Path(out_dir) if out_dir is not None else Path(bundle) / "plots"
    out.mkdir(parents=True, exist_ok=True)
    datasets = list(dict.fromkeys(r["dataset"] for r in rows))
    written = []
    for ds in datasets:
        ds_rows = [r for r in rows if r["dataset"] == ds]
        fractions = sorted(dict.fromkeys(r["fraction"] for r in ds_rows), key=float)
        for metric in ("scale", "ls"):
            table = {(r["fraction"], r["method"]): r[metric] for r in ds_rows}
            body = []
            for f in fractions:
                vals = [table.get((f, m), "") for m in methods]
                if "" in vals and any(vals):
                    warnings.warn(f"{ds}/{metric}@{f}: missing cells left blank", stacklevel=2)
                body.append([f, *vals])
            path = out / f"{ds}__{metric}.csv"
            _write_csv(path, ["fraction", *methods], body)
            written.append(path)
        times = {r["method"]: r["ranking_seconds"] for r in ds_rows}
        path = out / f"{ds}__time.csv"
        _write_csv(path, ["method", "ranking_seconds"], [[m, times.get(m, "")] for m in methods])
        written.append(path)
    _write_summary(Path(bundle), out_dir=Path(bundle))
    return written


def _write_summary(bundle: Path, out_dir: Path) -> None:
    buf = io.StringIO()
    stats_dir = bundle / "stats"
    for metric in STAT_METRICS:
        for kind in ("ranks", "holm"):
            p = stats_dir / f"{metric}_{kind}.csv"
            if p.exists():
                buf.write(f"== {metric} / {kind} ==\n")
                buf.write(p.read_text(encoding="utf-8"))
                buf.write("\n")
    (out_dir / "summary.txt").write_text(buf.getvalue() or "no statistics available\n", encoding="utf-8")
