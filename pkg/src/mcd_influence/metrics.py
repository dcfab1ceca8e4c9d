"""Per-cell evaluation metrics: infected scale, spreader distance, ranking time."""
from __future__ import annotations

import statistics
import time
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .cascade import CascadeOutcome
from .diversity import SeedSet
from .graph import UNREACHABLE, Graph, bfs_distances

RESULT_COLUMNS = ["method", "dataset", "fraction", "scale", "ls", "unreachable", "ranking_seconds"]


@dataclass(frozen=True)
class MetricCell:
    method: str
    dataset: str
    fraction: float
    final_infected_scale: float | None
    avg_spreader_distance: float | None  # None when undefined (k < 2 or all pairs disconnected)
    unreachable_pairs: int
    ranking_time: float | None

    def row(self) -> list[str]:
        def fmt(x):
            return "" if x is None else repr(float(x))

        return [
            self.method,
            self.dataset,
            repr(float(self.fraction)),
            fmt(self.final_infected_scale),
            fmt(self.avg_spreader_distance),
            str(self.unreachable_pairs),
            fmt(self.ranking_time),
        ]


class UndefinedDistance(ValueError):
    """Every seed pair is disconnected."""

    def __init__(self, unreachable_pairs: int):
        super().__init__(f"all {unreachable_pairs} seed pairs are unreachable")
        self.unreachable_pairs = unreachable_pairs


def final_infected_scale(outcome: CascadeOutcome, n: int) -> float:
    if n <= 0:
        raise ValueError("n must be positive")
    return outcome.mean_infected / n


def avg_spreader_distance(g: Graph, seeds: SeedSet | Iterable[int]) -> tuple[float, int]:
    """Mean hop distance over unordered seed pairs, and the count of unreachable pairs.

    Unreachable pairs are left out of the mean. Raises :class:`UndefinedDistance`
    when no pair is reachable.
    """
    s = sorted(set(seeds.seeds if isinstance(seeds, SeedSet) else seeds))
    if len(s) < 2:
        raise ValueError("need at least 2 seeds")
    total = 0.0
    finite = unreachable = 0
    for i, u in enumerate(s[:-1]):
        d = bfs_distances(g, u)[s[i + 1:]]
        ok = d != UNREACHABLE
        total += float(d[ok].sum())
        finite += int(ok.sum())
        unreachable += int((~ok).sum())
    if finite == 0:
        raise UndefinedDistance(unreachable)
    return total / finite, unreachable


@dataclass(frozen=True)
class TimingStats:
    samples: tuple[float, ...]

    @property
    def median(self) -> float:
        return statistics.median(self.samples)

    @property
    def min(self) -> float:
        return min(self.samples)

    @property
    def max(self) -> float:
        return max(self.samples)


def time_ranking(method: Callable[[Graph], object], g: Graph, repetitions: int = 3) -> TimingStats:
    """Wall-clock the whole ranking callable ``repetitions`` times."""
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        method(g)
        samples.append(time.perf_counter() - t0)
    return TimingStats(tuple(samples))
