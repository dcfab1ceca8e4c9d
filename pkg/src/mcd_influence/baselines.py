"""Reference rankers: degree, H-index, PageRank and a CD-only CSR proxy."""
from __future__ import annotations

import warnings

import numpy as np

from .diversity import ScoreTable, community_diversity
from .graph import Graph
from .leiden import Partition


class ConvergenceWarning(RuntimeWarning):
    pass


def degree_rank(g: Graph) -> ScoreTable:
    return ScoreTable("DEG", g.degrees().astype(float), (g.fingerprint(), ""))


def h_index(values) -> int:
    """Largest h such that at least h of ``values`` are >= h."""
    vals = sorted(values, reverse=True)
    h = 0
    for i, x in enumerate(vals, start=1):
        if x >= i:
            h = i
        else:
            break
    return h


def h_index_rank(g: Graph) -> ScoreTable:
    deg = g.degrees()
    scores = [h_index(deg[g.adjacency[v]]) for v in range(g.node_count)]
    return ScoreTable("HI", np.array(scores, dtype=float), (g.fingerprint(), ""))


def pagerank_rank(g: Graph, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 1000) -> ScoreTable:
    """Power iteration on the undirected random walk with uniform teleport.

    Isolated nodes spread their mass uniformly. Stops when the L1 change
    drops below ``tol``; hitting ``max_iter`` first emits
    :class:`ConvergenceWarning` and names the table ``PR(unconverged)``.
    """
    if not 0 < damping < 1:
        raise ValueError("damping must be in (0, 1)")
    n = g.node_count
    if n == 0:
        return ScoreTable("PR", np.zeros(0))
    deg = g.degrees().astype(float)
    src = np.repeat(np.arange(n), g.degrees())
    dst = np.concatenate(g.adjacency) if n else np.zeros(0, dtype=np.int64)
    dangling = deg == 0
    inv_deg = np.divide(1.0, deg, out=np.zeros(n), where=~dangling)
    x = np.full(n, 1.0 / n)
    converged = False
    for _ in range(max_iter):
        flow = np.bincount(dst, weights=(x * inv_deg)[src], minlength=n)
        nxt = damping * (flow + x[dangling].sum() / n) + (1 - damping) / n
        nxt /= nxt.sum()
        delta = np.abs(nxt - x).sum()
        x = nxt
        if delta < tol:
            converged = True
            break
    name = "PR"
    if not converged:
        warnings.warn(f"PageRank did not converge in {max_iter} iterations", ConvergenceWarning, stacklevel=2)
        name = "PR(unconverged)"
    return ScoreTable(name, x, (g.fingerprint(), ""))


def cd_rank(g: Graph, p: Partition) -> ScoreTable:
    """Community-diversity-only stand-in for CSR (its other two terms are not used)."""
    cd = community_diversity(g, p)
    return ScoreTable("CSR-CD", cd.scores, cd.generated_from)
