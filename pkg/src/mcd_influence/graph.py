"""Undirected simple graphs with dense integer node indices.

Everything downstream (community detection, scoring, cascades) works on
:class:`Graph`, which is immutable once built.
"""
from __future__ import annotations

import hashlib
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np

# Distances to unreachable nodes. Kept as a float so it never collides with a hop count.
UNREACHABLE = float("inf")

_SPLIT = re.compile(r"\s*,\s*|\s+")


class EdgeListParseError(ValueError):
    def __init__(self, line_number: int, line: str):
        super().__init__(f"line {line_number}: expected 2 tokens, got {line!r}")
        self.line_number = line_number


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on nodes ``0..node_count-1``.

    ``adjacency[v]`` is a sorted ``int64`` array of neighbours of ``v``.
    """

    node_count: int
    adjacency: tuple[np.ndarray, ...]
    _edge_count: int = field(repr=False, default=-1)

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Build a graph, silently dropping self-loops and duplicate edges."""
        nbrs: list[set[int]] = [set() for _ in range(node_count)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u}, {v}) out of range for {node_count} nodes")
            if u == v:
                continue
            nbrs[u].add(v)
            nbrs[v].add(u)
        adjacency = tuple(np.array(sorted(s), dtype=np.int64) for s in nbrs)
        for a in adjacency:
            a.setflags(write=False)
        m = sum(len(s) for s in nbrs) // 2
        return cls(node_count, adjacency, m)

    @property
    def edge_count(self) -> int:
        return self._edge_count

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """``(offsets, targets)``: slot ``offsets[u] + j`` is the directed edge ``u -> adjacency[u][j]``."""
        offsets = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum([len(a) for a in self.adjacency], out=offsets[1:])
        targets = np.concatenate(self.adjacency) if self.node_count else np.zeros(0, dtype=np.int64)
        return offsets, targets

    def neighbors(self, v: int) -> np.ndarray:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(u, v)`` with ``u < v``, sorted lexicographically."""
        return [(u, int(v)) for u in range(self.node_count) for v in self.adjacency[u] if u < v]

    def edge_set(self) -> set[frozenset[int]]:
        return {frozenset(e) for e in self.edges()}

    def fingerprint(self) -> str:
        h = hashlib.sha256(str(self.node_count).encode())
        for u, v in self.edges():
            h.update(f"{u},{v};".encode())
        return h.hexdigest()[:16]

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Return the graph with node ``v`` renamed to ``perm[v]``."""
        return Graph.from_edges(self.node_count, ((perm[u], perm[v]) for u, v in self.edges()))

    def check_invariants(self) -> None:
        """Full scan: symmetry, no self-loops, sorted/unique rows, degree sum."""
        total = 0
        for v, row in enumerate(self.adjacency):
            if len(row) and (np.any(np.diff(row) <= 0) or row[0] < 0 or row[-1] >= self.node_count):
                raise AssertionError(f"adjacency of {v} not sorted/unique/in range")
            if np.any(row == v):
                raise AssertionError(f"self-loop at {v}")
            for w in row:
                if v not in set(self.adjacency[w].tolist()):
                    raise AssertionError(f"asymmetric edge {v}-{w}")
            total += len(row)
        if total != 2 * self.edge_count:
            raise AssertionError("degree sum != 2 * edge count")


@dataclass(frozen=True)
class NodeLabelMap:
    """Bijection between external string labels and internal node indices."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    @classmethod
    def identity(cls, n: int) -> "NodeLabelMap":
        return cls(tuple(str(i) for i in range(n)))

    def index(self, label: str) -> int:
        return self._index[label]

    def label(self, index: int) -> str:
        return self.labels[index]

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class LoadDiagnostics:
    lines_read: int
    raw_edges: int
    duplicate_edges: int
    self_loops: int


def load_edge_list(
    stream: TextIO | Iterable[str],
    comment_prefixes: tuple[str, ...] = ("#", "%"),
) -> tuple[Graph, NodeLabelMap, LoadDiagnostics]:
    """Parse a whitespace- or comma-separated edge list.

    Labels get dense indices in first-seen order. Direction is ignored, and
    duplicates/self-loops are dropped but counted in the diagnostics.
    Extra columns are not tolerated: any non-comment line with other than
    two tokens raises :class:`EdgeListParseError`.
    """
    index: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    dupes = loops = raw = lines = 0
    for lineno, line in enumerate(stream, start=1):
        lines += 1
        s = line.strip()
        if not s or s.startswith(comment_prefixes):
            continue
        toks = _SPLIT.split(s)
        if len(toks) != 2 or not all(toks):
            raise EdgeListParseError(lineno, line.rstrip("\n"))
        raw += 1
        u = index.setdefault(toks[0], len(index))
        v = index.setdefault(toks[1], len(index))
        if u == v:
            loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            dupes += 1
            continue
        seen.add(key)
        edges.append(key)
    labels = NodeLabelMap(tuple(index))
    g = Graph.from_edges(len(labels), edges)
    return g, labels, LoadDiagnostics(lines, raw, dupes, loops)


def read_edge_list(path) -> tuple[Graph, NodeLabelMap, LoadDiagnostics]:
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def write_edge_list(g: Graph, out: TextIO, labels: NodeLabelMap | None = None) -> None:
    for u, v in g.edges():
        if labels is None:
            out.write(f"{u} {v}\n")
        else:
            out.write(f"{labels.label(u)} {labels.label(v)}\n")


def generate_ba(n: int, m_attach: int, rng_seed: int) -> Graph:
    """Barabási–Albert preferential attachment graph.

    The core is ``m_attach`` isolated nodes; node ``m_attach`` links to all of
    them, and every later node links to ``m_attach`` distinct existing nodes
    chosen with probability proportional to degree. The result is connected
    with exactly ``m_attach * (n - m_attach)`` edges.
    """
    if m_attach < 1 or n <= m_attach:
        raise ValueError(f"need n > m_attach >= 1, got n={n}, m_attach={m_attach}")
    rng = np.random.default_rng(rng_seed)
    edges: list[tuple[int, int]] = []
    # every edge endpoint appears once, so uniform draws are degree-proportional
    endpoints = np.empty(2 * m_attach * (n - m_attach), dtype=np.int64)
    filled = 0
    targets = list(range(m_attach))
    for new in range(m_attach, n):
        for t in targets:
            edges.append((t, new))
            endpoints[filled] = t
            endpoints[filled + 1] = new
            filled += 2
        chosen: set[int] = set()
        while len(chosen) < m_attach and new + 1 < n:
            chosen.add(int(endpoints[rng.integers(filled)]))
        targets = sorted(chosen)
    return Graph.from_edges(n, edges)


def bfs_distances(g: Graph, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable nodes get :data:`UNREACHABLE`."""
    if not 0 <= source < g.node_count:
        raise ValueError(f"source {source} out of range for {g.node_count} nodes")
    dist = np.full(g.node_count, UNREACHABLE)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        d = dist[u] + 1
        for w in g.adjacency[u]:
            if dist[w] == UNREACHABLE:
                dist[w] = d
                queue.append(w)
    return dist


def connected_components(g: Graph, nodes: Iterable[int] | None = None) -> list[list[int]]:
    """Components of the subgraph induced by ``nodes`` (default: all nodes)."""
    allowed = set(range(g.node_count)) if nodes is None else set(nodes)
    comps = []
    seen: set[int] = set()
    for s in sorted(allowed):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.adjacency[u]:
                w = int(w)
                if w in allowed and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps
