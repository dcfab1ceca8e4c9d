"""Leiden community detection (modularity or CPM).

Each iteration runs fast local moving, refinement of every community into
well-connected sub-communities, and aggregation of the refined partition,
with the unrefined partition seeding the aggregate network. Iterations repeat
until quality stops improving.
"""
from __future__ import annotations

import csv
import hashlib
import math
from collections import deque
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .graph import Graph, NodeLabelMap, connected_components

_EPS = 1e-12
_THETA = 0.01


@dataclass(frozen=True)
class QualityConfig:
    quality: str = "modularity"  # or "cpm"
    resolution: float = 1.0
    rng_seed: int = 0
    max_iterations: int = 100

    def __post_init__(self):
        if self.quality not in ("modularity", "cpm"):
            raise ValueError(f"unknown quality {self.quality!r}")
        if not self.resolution > 0:
            raise ValueError("resolution must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class Partition:
    """Dense community assignment: ``assignment[v]`` in ``[0, community_count)``."""

    assignment: np.ndarray

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Renumber arbitrary community labels densely in order of first node."""
        remap: dict = {}
        out = np.array([remap.setdefault(c, len(remap)) for c in labels], dtype=np.int64)
        out.setflags(write=False)
        return cls(out)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls.from_labels(range(n))

    @property
    def community_count(self) -> int:
        return int(self.assignment.max()) + 1 if len(self.assignment) else 0

    @property
    def node_count(self) -> int:
        return len(self.assignment)

    def members(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.community_count)]
        for v, c in enumerate(self.assignment):
            groups[c].append(v)
        return groups

    def fingerprint(self) -> str:
        return hashlib.sha256(self.assignment.tobytes()).hexdigest()[:16]


def quality(g: Graph, p: Partition, cfg: QualityConfig = QualityConfig()) -> float:
    """Newman–Girvan modularity, or CPM ``sum(e_c - gamma * C(n_c, 2))``."""
    if p.node_count != g.node_count:
        raise ValueError(f"partition has {p.node_count} nodes, graph has {g.node_count}")
    a = p.assignment
    k = p.community_count
    internal = np.zeros(k)
    for u, v in g.edges():
        if a[u] == a[v]:
            internal[a[u]] += 1
    gamma = cfg.resolution
    if cfg.quality == "cpm":
        sizes = np.bincount(a, minlength=k).astype(float)
        return float(internal.sum() - gamma * np.sum(sizes * (sizes - 1) / 2))
    m = g.edge_count
    if m == 0:
        return 0.0
    deg_sum = np.bincount(a, weights=g.degrees(), minlength=k)
    return float(internal.sum() / m - gamma * np.sum((deg_sum / (2 * m)) ** 2))


class _Level:
    """Weighted (possibly aggregated) graph the optimiser works on."""

    def __init__(self, nbrs, weights, self_w, node_w):
        self.n = len(node_w)
        self.nbrs = nbrs  # list of int lists
        self.weights = weights  # parallel list of float lists
        self.self_w = self_w
        self.node_w = node_w  # degree (modularity) or size (CPM)

    @classmethod
    def from_graph(cls, g: Graph, cpm: bool) -> "_Level":
        nbrs = [a.tolist() for a in g.adjacency]
        weights = [[1.0] * len(a) for a in nbrs]
        node_w = [1.0] * g.node_count if cpm else [float(len(a)) for a in nbrs]
        return cls(nbrs, weights, [0.0] * g.node_count, node_w)

    def aggregate(self, membership: list[int], count: int) -> "_Level":
        node_w = [0.0] * count
        self_w = [0.0] * count
        links: list[dict[int, float]] = [{} for _ in range(count)]
        for v in range(self.n):
            cv = membership[v]
            node_w[cv] += self.node_w[v]
            self_w[cv] += self.self_w[v]
            for w, wt in zip(self.nbrs[v], self.weights[v]):
                cw = membership[w]
                if cw == cv:
                    if v < w:
                        self_w[cv] += wt
                else:
                    links[cv][cw] = links[cv].get(cw, 0.0) + wt
        nbrs = [sorted(d) for d in links]
        weights = [[links[c][x] for x in nbrs[c]] for c in range(count)]
        return _Level(nbrs, weights, self_w, node_w)


class _Optimiser:
    def __init__(self, g: Graph, cfg: QualityConfig):
        self.cfg = cfg
        self.gamma = cfg.resolution
        cpm = cfg.quality == "cpm"
        self.scale = 1.0 if cpm else (1.0 / (2 * g.edge_count) if g.edge_count else 0.0)
        self.rng = np.random.default_rng(cfg.rng_seed)
        self.base = _Level.from_graph(g, cpm)

    def move_nodes(self, lvl: _Level, comm: list[int]) -> bool:
        n = lvl.n
        comm_w = [0.0] * n
        comm_size = [0] * n
        for v in range(n):
            comm_w[comm[v]] += lvl.node_w[v]
            comm_size[comm[v]] += 1
        empty = [c for c in range(n - 1, -1, -1) if comm_size[c] == 0]
        coef = self.gamma * self.scale
        queue = deque(self.rng.permutation(n).tolist())
        queued = [True] * n
        moved = False
        while queue:
            v = queue.popleft()
            queued[v] = False
            cur = comm[v]
            link: dict[int, float] = {}
            for w, wt in zip(lvl.nbrs[v], lvl.weights[v]):
                c = comm[w]
                link[c] = link.get(c, 0.0) + wt
            a = lvl.node_w[v]
            pa = coef * a
            comm_w[cur] -= a
            comm_size[cur] -= 1
            best_c = cur
            best = link.get(cur, 0.0) - pa * comm_w[cur]
            for c in sorted(link):
                if c == cur:
                    continue
                gain = link[c] - pa * comm_w[c]
                if gain > best + _EPS:
                    best, best_c = gain, c
            if comm_size[cur] > 0 and empty and best < -_EPS:
                # leaving for an empty community gains 0
                best_c = empty[-1]
            comm_w[best_c] += a
            comm_size[best_c] += 1
            if best_c != cur:
                if empty and best_c == empty[-1]:
                    empty.pop()
                if comm_size[cur] == 0:
                    empty.append(cur)
                comm[v] = best_c
                moved = True
                for w in lvl.nbrs[v]:
                    if comm[w] != best_c and not queued[w]:
                        queued[w] = True
                        queue.append(w)
        return moved

    def refine(self, lvl: _Level, comm: list[int]) -> list[int]:
        n = lvl.n
        refined = list(range(n))
        ref_w = list(lvl.node_w)
        ref_size = [1] * n
        s_w: dict[int, float] = {}
        for v in range(n):
            s_w[comm[v]] = s_w.get(comm[v], 0.0) + lvl.node_w[v]
        # ext[r]: weight from refined community r to the rest of its parent community
        ext = [0.0] * n
        for v in range(n):
            for w, wt in zip(lvl.nbrs[v], lvl.weights[v]):
                if comm[w] == comm[v]:
                    ext[v] += wt
        coef = self.gamma * self.scale
        draws = self.rng.random(n).tolist()
        for v in self.rng.permutation(n).tolist():
            if ref_size[refined[v]] != 1:
                continue
            a = lvl.node_w[v]
            cv = comm[v]
            total = s_w[cv]
            if ext[v] < coef * a * (total - a) - _EPS:
                continue
            link: dict[int, float] = {}
            for w, wt in zip(lvl.nbrs[v], lvl.weights[v]):
                if comm[w] == cv:
                    r = refined[w]
                    link[r] = link.get(r, 0.0) + wt
            cands = [refined[v]]
            gains = [0.0]
            for r in sorted(link):
                if r == refined[v]:
                    continue
                rw = ref_w[r]
                if ext[r] < coef * rw * (total - rw) - _EPS:
                    continue
                gain = link[r] - coef * a * rw
                if gain >= 0:
                    cands.append(r)
                    gains.append(gain)
            if len(cands) == 1:
                continue
            # sample a candidate with probability proportional to exp(gain / theta)
            top = max(gains)
            weights = [math.exp((x - top) / _THETA) for x in gains]
            u = draws[v] * sum(weights)
            idx = 0
            while idx < len(weights) - 1 and u >= weights[idx]:
                u -= weights[idx]
                idx += 1
            target = cands[idx]
            if target == refined[v]:
                continue
            own = refined[v]
            ref_w[own] -= a
            ref_size[own] -= 1
            ext[target] = ext[target] + ext[v] - 2 * link[target]
            refined[v] = target
            ref_w[target] += a
            ref_size[target] += 1
        return refined

    def iterate(self, membership: list[int]) -> list[int]:
        """One Leiden iteration starting from ``membership`` on the base graph."""
        lvl = self.base
        comm = list(membership)
        node_of = list(range(self.base.n))  # base node -> node of current level
        while True:
            self.move_nodes(lvl, comm)
            ncomm = len(set(comm))
            if ncomm == lvl.n:
                break
            refined = self.refine(lvl, comm)
            ref_ids, ref_dense = _dense(refined)
            if ref_ids == lvl.n:
                # refinement merged nothing; aggregate on the unrefined partition
                ref_ids, ref_dense = _dense(comm)
            parent = [0] * ref_ids
            for v in range(lvl.n):
                parent[ref_dense[v]] = comm[v]
            lvl = lvl.aggregate(ref_dense, ref_ids)
            node_of = [ref_dense[x] for x in node_of]
            _, comm = _dense(parent)
        return [comm[x] for x in node_of]


def _dense(labels: list[int]) -> tuple[int, list[int]]:
    remap: dict[int, int] = {}
    out = [remap.setdefault(c, len(remap)) for c in labels]
    return len(remap), out


def _split_disconnected(g: Graph, membership: list[int]) -> list[int]:
    groups: dict[int, list[int]] = {}
    for v, c in enumerate(membership):
        groups.setdefault(c, []).append(v)
    out = list(membership)
    next_id = max(membership, default=-1) + 1
    for members in groups.values():
        comps = connected_components(g, members)
        for comp in comps[1:]:
            for v in comp:
                out[v] = next_id
            next_id += 1
    return out


def leiden(g: Graph, cfg: QualityConfig = QualityConfig(), trace: list | None = None) -> Partition:
    """Partition ``g`` with the Leiden algorithm.

    Visiting orders and refinement choices come from ``cfg.rng_seed``, so the
    result is a deterministic function of ``(g, cfg)``. If ``trace`` is given,
    the quality of the starting singleton partition and of the partition after
    every iteration are appended to it.
    """
    if g.node_count == 0:
        raise ValueError("graph has no nodes")
    opt = _Optimiser(g, cfg)
    membership = list(range(g.node_count))
    best = quality(g, Partition.from_labels(membership), cfg)
    if trace is not None:
        trace.append(best)
    for _ in range(cfg.max_iterations):
        membership = opt.iterate(membership)
        q = quality(g, Partition.from_labels(membership), cfg)
        if trace is not None:
            trace.append(q)
        gained = q - best
        best = max(best, q)
        if gained < _EPS:
            break
    membership = _split_disconnected(g, membership)
    return Partition.from_labels(membership)


def brute_force_best_partition(g: Graph, cfg: QualityConfig = QualityConfig()) -> tuple[float, Partition]:
    """Exhaustive search over all set partitions (restricted growth strings).

    Only practical for about ten nodes; used as an oracle in tests.
    """
    n = g.node_count
    if n > 12:
        raise ValueError("brute force limited to 12 nodes")
    best_q, best_p = -math.inf, None
    labels = [0] * n

    def rec(i: int, maxlab: int):
        nonlocal best_q, best_p
        if i == n:
            p = Partition.from_labels(labels)
            q = quality(g, p, cfg)
            if q > best_q + 1e-15:
                best_q, best_p = q, p
            return
        for c in range(maxlab + 2):
            labels[i] = c
            rec(i + 1, max(maxlab, c))

    if n:
        labels[0] = 0
        rec(1, 0)
    return best_q, best_p


def write_partition(p: Partition, out: TextIO, labels: NodeLabelMap | None = None) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["node_label", "community_id"])
    for v, c in enumerate(p.assignment):
        w.writerow([labels.label(v) if labels else v, int(c)])


def read_partition(stream: TextIO, labels: NodeLabelMap | None = None) -> Partition:
    rows = list(csv.DictReader(stream))
    n = len(rows)
    raw = [0] * n
    for row in rows:
        v = labels.index(row["node_label"]) if labels else int(row["node_label"])
        raw[v] = int(row["community_id"])
    return Partition.from_labels(raw)
