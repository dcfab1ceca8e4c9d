"""Community diversity scores and seed selection.

* CD  - entropy of the community labels among a node's neighbours.
* ECD - a node's CD plus the CD of each neighbour (two-hop view).
* MCD - ``-P log P`` with ``P = CD / ECD``; large when a node's own diversity
  is comparable to, but not dominant over, its neighbourhood's.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, TextIO

import numpy as np

from .graph import Graph, NodeLabelMap
from .leiden import Partition


@dataclass(frozen=True)
class ScoreTable:
    method_name: str
    scores: np.ndarray
    generated_from: tuple[str, str] = ("", "")  # (graph fingerprint, partition fingerprint)

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=float)
        if not np.all(np.isfinite(s)):
            raise ValueError(f"{self.method_name}: non-finite scores")
        s.setflags(write=False)
        object.__setattr__(self, "scores", s)

    def __len__(self) -> int:
        return len(self.scores)

    def ranking(self) -> list[int]:
        """Nodes by descending score, ties by ascending index."""
        return sorted(range(len(self.scores)), key=lambda v: (-self.scores[v], v))


@dataclass(frozen=True)
class SeedSet:
    seeds: tuple[int, ...]
    spreader_fraction: float

    @property
    def k(self) -> int:
        return len(self.seeds)


def _xlogx(x: float, log: Callable[[float], float]) -> float:
    return x * log(x) if x > 0 else 0.0


def community_diversity(g: Graph, p: Partition, log: Callable[[float], float] = math.log) -> ScoreTable:
    if p.node_count != g.node_count:
        raise ValueError("partition does not match graph")
    a = p.assignment
    out = np.zeros(g.node_count)
    for v in range(g.node_count):
        nb = g.adjacency[v]
        deg = len(nb)
        if deg == 0:
            continue
        # bincount over sorted labels keeps the summation order fixed
        counts = np.bincount(a[nb])
        h = 0.0
        for c in counts:
            if c:
                h -= _xlogx(c / deg, log)
        out[v] = h if h > 0 else 0.0
    return ScoreTable("CD", out, (g.fingerprint(), p.fingerprint()))


def extended_community_diversity(g: Graph, cd: ScoreTable) -> ScoreTable:
    if len(cd) != g.node_count:
        raise ValueError("score table does not match graph")
    s = cd.scores
    out = np.array([s[v] + sum(float(s[w]) for w in g.adjacency[v]) for v in range(g.node_count)])
    return ScoreTable("ECD", out, cd.generated_from)


def modified_community_diversity(
    cd: ScoreTable, ecd: ScoreTable, log: Callable[[float], float] = math.log
) -> ScoreTable:
    if len(cd) != len(ecd):
        raise ValueError("score tables are not aligned")
    out = np.zeros(len(cd))
    for v, (c, e) in enumerate(zip(cd.scores, ecd.scores)):
        if e <= 0:
            continue  # 0/0 -> P = 0
        ratio = c / e
        out[v] = max(0.0, -_xlogx(ratio, log))
    return ScoreTable("MCD", out, cd.generated_from)


def mcd_scores(g: Graph, p: Partition, log: Callable[[float], float] = math.log) -> tuple[ScoreTable, ScoreTable, ScoreTable]:
    """CD, ECD and MCD tables for ``g`` under partition ``p``."""
    cd = community_diversity(g, p, log)
    ecd = extended_community_diversity(g, cd)
    return cd, ecd, modified_community_diversity(cd, ecd, log)


def seed_count(fraction: float, n: int) -> int:
    """``max(1, round(fraction * n))``; Python's round is half-to-even."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    return min(n, max(1, round(fraction * n)))


def select_top_k(scores: ScoreTable, fraction: float) -> SeedSet:
    k = seed_count(fraction, len(scores))
    return SeedSet(tuple(scores.ranking()[:k]), fraction)


def write_scores(table: ScoreTable, out: TextIO, labels: NodeLabelMap | None = None) -> None:
    out.write(f"# method={table.method_name} graph={table.generated_from[0]} partition={table.generated_from[1]}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["node_label", "score"])
    for v in table.ranking():
        w.writerow([labels.label(v) if labels else v, repr(float(table.scores[v]))])


def read_scores(stream: TextIO, labels: NodeLabelMap | None = None, method_name: str = "") -> ScoreTable:
    header = ""
    lines = []
    for line in stream:
        if line.startswith("#"):
            header = line
        else:
            lines.append(line)
    rows = list(csv.DictReader(lines))
    out = np.zeros(len(rows))
    for row in rows:
        v = labels.index(row["node_label"]) if labels else int(row["node_label"])
        out[v] = float(row["score"])
    if not method_name and "method=" in header:
        method_name = header.split("method=")[1].split()[0]
    return ScoreTable(method_name, out)


def write_seeds(seeds: SeedSet, out: TextIO, labels: NodeLabelMap | None = None) -> None:
    for v in seeds.seeds:
        out.write(f"{labels.label(v) if labels else v}\n")


def read_seeds(stream: TextIO, labels: NodeLabelMap | None = None) -> list[int]:
    out = []
    for line in stream:
        s = line.strip()
        if s and not s.startswith("#"):
            out.append(labels.index(s) if labels else int(s))
    return out
