"""Friedman ranking test, Iman–Davenport correction and Holm post-hoc vs a control."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np
from scipy import stats as st


@dataclass(frozen=True)
class RankMatrix:
    methods: tuple[str, ...]
    problems: tuple[str, ...]
    values: np.ndarray  # problems x methods
    ranks: np.ndarray
    direction: str

    @property
    def n(self) -> int:
        return len(self.problems)

    @property
    def k(self) -> int:
        return len(self.methods)

    def avg_ranks(self) -> np.ndarray:
        return self.ranks.mean(axis=0)


def rank_rows(
    values,
    direction: str = "higher",
    methods: Sequence[str] | None = None,
    problems: Sequence[str] | None = None,
) -> RankMatrix:
    """Rank each problem's row so that 1 is the best value; ties share the mean rank.

    ``direction`` is ``"higher"`` (higher is better) or ``"lower"``.
    """
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 2 or vals.size == 0:
        raise ValueError("values must be a non-empty 2-D matrix")
    if np.isnan(vals).any():
        raise ValueError("values contain missing entries")
    if direction not in ("higher", "lower"):
        raise ValueError(f"unknown direction {direction!r}")
    keyed = -vals if direction == "higher" else vals
    ranks = st.rankdata(keyed, method="average", axis=1)
    n_p, k_m = vals.shape
    methods = tuple(methods) if methods is not None else tuple(f"m{j}" for j in range(k_m))
    problems = tuple(problems) if problems is not None else tuple(str(i) for i in range(n_p))
    if len(methods) != k_m or len(problems) != n_p:
        raise ValueError("labels do not match matrix shape")
    return RankMatrix(methods, problems, vals, ranks, direction)


@dataclass(frozen=True)
class FriedmanResult:
    avg_ranks: np.ndarray
    statistic: float  # chi-square form, k-1 dof
    iman_davenport: float  # F form; inf when every row ranks identically
    saturated: bool
    p_value: float
    iman_davenport_p: float


def friedman_statistic(avg_ranks: Sequence[float], n: int) -> float:
    r = np.asarray(avg_ranks, dtype=float)
    k = len(r)
    return 12 * n / (k * (k + 1)) * (float(np.sum(r**2)) - k * (k + 1) ** 2 / 4)


def iman_davenport(ff: float, n: int, k: int) -> tuple[float, bool]:
    denom = n * (k - 1) - ff
    if denom <= 0:
        return math.inf, True
    return (n - 1) * ff / denom, False


def friedman(rm: RankMatrix) -> FriedmanResult:
    if rm.k < 2 or rm.n < 2:
        raise ValueError("need at least 2 methods and 2 problems")
    r = rm.avg_ranks()
    ff = friedman_statistic(r, rm.n)
    fid, saturated = iman_davenport(ff, rm.n, rm.k)
    p = float(st.chi2.sf(ff, rm.k - 1))
    p_id = 0.0 if saturated else float(st.f.sf(fid, rm.k - 1, (rm.n - 1) * (rm.k - 1)))
    return FriedmanResult(r, ff, fid, saturated, p, p_id)


def holm_adjust(raw_p: Sequence[float], k_m: int) -> list[float]:
    """Holm step-down APVs: ``min(max_{j<=i} (k_m - j) p_j, 1)`` over ascending ``raw_p``."""
    p = list(raw_p)
    if any(b < a for a, b in zip(p, p[1:])):
        raise ValueError("raw p-values must be sorted ascending")
    if len(p) > k_m - 1:
        raise ValueError("more comparisons than k_m - 1")
    out = []
    running = 0.0
    for j, pj in enumerate(p, start=1):
        running = max(running, (k_m - j) * pj)
        out.append(min(running, 1.0))
    return out


def normal_lower_tail(z: float) -> float:
    """Phi(z), accurate far into the lower tail."""
    return 0.5 * math.erfc(-z / math.sqrt(2))


def z_score(r_control: float, r_other: float, k: int, n: int) -> float:
    """Negative when ``r_other`` is the worse (larger) average rank."""
    return float((r_control - r_other) / math.sqrt(k * (k + 1) / (6 * n)))


@dataclass(frozen=True)
class Comparison:
    method: str
    avg_rank: float
    z_score: float
    p_value: float
    adjusted_p: float


@dataclass(frozen=True)
class TestReport:
    control: str
    methods: tuple[str, ...]
    avg_ranks: tuple[float, ...]
    n: int
    friedman_statistic: float
    friedman_p: float
    iman_davenport: float
    iman_davenport_p: float
    saturated: bool
    comparisons: tuple[Comparison, ...]  # ascending raw p
    alpha: float = 0.05

    __test__ = False  # not a pytest class


def compare_with_control(rm: RankMatrix, control: str, alpha: float = 0.05) -> TestReport:
    if control not in rm.methods:
        raise ValueError(f"control {control!r} not among methods {rm.methods}")
    fr = friedman(rm)
    ci = rm.methods.index(control)
    rc = fr.avg_ranks[ci]
    rows = []
    for j, name in enumerate(rm.methods):
        if j == ci:
            continue
        z = z_score(rc, fr.avg_ranks[j], rm.k, rm.n)
        rows.append((normal_lower_tail(z), j, name, z))
    rows.sort(key=lambda t: (t[0], t[1]))
    apv = holm_adjust([t[0] for t in rows], rm.k)
    comps = tuple(
        Comparison(name, float(fr.avg_ranks[j]), z, p, a) for (p, j, name, z), a in zip(rows, apv)
    )
    return TestReport(
        control,
        rm.methods,
        tuple(float(x) for x in fr.avg_ranks),
        rm.n,
        fr.statistic,
        fr.p_value,
        fr.iman_davenport,
        fr.iman_davenport_p,
        fr.saturated,
        comps,
        alpha,
    )


def write_rank_table(report: TestReport, out: TextIO) -> None:
    out.write(
        f"# n={report.n} friedman={report.friedman_statistic!r} friedman_p={report.friedman_p!r} "
        f"iman_davenport={report.iman_davenport!r} iman_davenport_p={report.iman_davenport_p!r}\n"
    )
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["method", "average_rank"])
    for r, name in sorted(zip(report.avg_ranks, report.methods)):
        w.writerow([name, repr(r)])


def write_holm_table(report: TestReport, out: TextIO) -> None:
    out.write(f"# control={report.control} alpha={report.alpha}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["method", "z_score", "p_value", "apv", "reject"])
    for c in report.comparisons:
        w.writerow([c.method, repr(c.z_score), repr(c.p_value), repr(c.adjusted_p), int(c.adjusted_p < report.alpha)])
