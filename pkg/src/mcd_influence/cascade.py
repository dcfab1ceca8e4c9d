"""Independent Cascade simulation and spread estimation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .diversity import SeedSet
from .graph import Graph

MAX_EXACT_EDGES = 20


@dataclass(frozen=True)
class CascadeConfig:
    activation_probability: float = 0.1
    runs: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        if not 0 <= self.activation_probability <= 1:
            raise ValueError("activation_probability must be in [0, 1]")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.rng_seed < 0:
            raise ValueError("rng_seed must be non-negative")


@dataclass(frozen=True)
class CascadeOutcome:
    per_run_infected_count: tuple[int, ...]
    node_count: int

    @property
    def runs(self) -> int:
        return len(self.per_run_infected_count)

    @property
    def mean_infected(self) -> float:
        return float(np.mean(self.per_run_infected_count))

    @property
    def mean_final_infected_scale(self) -> float:
        return self.mean_infected / self.node_count

    @property
    def std_error(self) -> float:
        if self.runs < 2:
            return 0.0
        return float(np.std(self.per_run_infected_count, ddof=1) / math.sqrt(self.runs))


def _seed_list(seeds: SeedSet | Iterable[int]) -> list[int]:
    s = list(seeds.seeds if isinstance(seeds, SeedSet) else seeds)
    if not s:
        raise ValueError("seed set is empty")
    return sorted(set(int(v) for v in s))


def run_cascade(
    g: Graph,
    seeds: SeedSet | Iterable[int],
    attempt: Callable[[int, np.ndarray], np.ndarray],
    reverse: bool = False,
) -> np.ndarray:
    """Round-based cascade driven by an arbitrary activation rule.

    ``attempt(u, targets)`` returns a boolean mask saying which of the still
    susceptible ``targets`` the newly infected ``u`` activates. Each infector
    is asked about each susceptible neighbour exactly once; neighbours that
    were infected earlier are never offered. Frontier and neighbours are
    visited in ascending order, or descending with ``reverse=True``.
    Returns the boolean infected mask.
    """
    infected = np.zeros(g.node_count, dtype=bool)
    frontier = _seed_list(seeds)
    infected[frontier] = True
    while frontier:
        nxt: list[int] = []
        for u in (reversed(frontier) if reverse else frontier):
            nb = g.adjacency[u]
            if reverse:
                nb = nb[::-1]
            targets = nb[~infected[nb]]
            if len(targets) == 0:
                continue
            hit = targets[attempt(u, targets)]
            infected[hit] = True
            nxt.extend(hit.tolist())
        frontier = sorted(nxt)
    return infected


def draw_live_edges(g: Graph, p: float, rng: np.random.Generator) -> np.ndarray:
    """One coin per directed edge, in :attr:`Graph.csr` slot order.

    Slot ``i`` decides whether the infector at its tail activates the node at
    its head, should that attempt ever happen. Coins of attempts that never
    happen are simply unused, so the law of the cascade is plain IC.
    """
    return rng.random(len(g.csr[1])) < p


def spread_from_live(g: Graph, seeds: SeedSet | Iterable[int], live: np.ndarray) -> np.ndarray:
    """Infected mask of the cascade whose attempts are decided by ``live``."""
    offsets, targets = g.csr
    infected = np.zeros(g.node_count, dtype=bool)
    stack = _seed_list(seeds)
    infected[stack] = True
    while stack:
        u = stack.pop()
        lo, hi = offsets[u], offsets[u + 1]
        hit = targets[lo:hi][live[lo:hi]]
        hit = hit[~infected[hit]]
        if len(hit):
            infected[hit] = True
            stack.extend(hit.tolist())
    return infected


def simulate_once(g: Graph, seeds: SeedSet | Iterable[int], p: float, rng: np.random.Generator) -> set[int]:
    """One IC run; the returned set of infected nodes always contains the seeds."""
    if not 0 <= p <= 1:
        raise ValueError("p must be in [0, 1]")
    infected = spread_from_live(g, seeds, draw_live_edges(g, p, rng))
    return set(np.flatnonzero(infected).tolist())


def run_stream(rng_seed: int, run_index: int) -> np.random.Generator:
    """Private generator for one run, keyed by ``(rng_seed, run_index)``."""
    return np.random.default_rng(np.random.SeedSequence([rng_seed, run_index]))


def estimate_spread(g: Graph, seeds: SeedSet | Iterable[int], cfg: CascadeConfig) -> CascadeOutcome:
    """Monte Carlo spread over ``cfg.runs`` independent runs.

    Run ``r`` depends only on ``(cfg.rng_seed, r)``, so two calls with the
    same config see the same coins: if one seed set contains the other, every
    run infects at least as many nodes with the larger set.
    """
    seed_list = _seed_list(seeds)
    p = cfg.activation_probability
    counts = []
    for r in range(cfg.runs):
        live = draw_live_edges(g, p, run_stream(cfg.rng_seed, r))
        counts.append(int(spread_from_live(g, seed_list, live).sum()))
    return CascadeOutcome(tuple(counts), g.node_count)


def exact_spread(g: Graph, seeds: SeedSet | Sequence[int], p: float) -> float:
    """Expected infected count by enumerating every live-edge subgraph.

    Each edge is live with probability ``p``; the IC spread equals the
    expected number of nodes reachable from the seeds over live edges.
    Refuses graphs with more than 20 edges.
    """
    edges = g.edges()
    m = len(edges)
    if m > MAX_EXACT_EDGES:
        raise ValueError(f"exact_spread refuses {m} edges (limit {MAX_EXACT_EDGES})")
    seed_list = _seed_list(seeds)
    incident: list[list[tuple[int, int]]] = [[] for _ in range(g.node_count)]
    for i, (u, v) in enumerate(edges):
        incident[u].append((v, i))
        incident[v].append((u, i))
    total = 0.0
    for mask in range(1 << m):
        live = bin(mask).count("1")
        weight = p**live * (1 - p) ** (m - live)
        if weight == 0.0:
            continue
        seen = set(seed_list)
        stack = list(seed_list)
        while stack:
            u = stack.pop()
            for w, i in incident[u]:
                if mask >> i & 1 and w not in seen:
                    seen.add(w)
                    stack.append(w)
        total += weight * len(seen)
    return total
