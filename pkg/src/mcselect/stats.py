"""Disagreement metrics and paired Wilcoxon comparison matrices."""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.stats import norm, rankdata

from .core import SetMetrics

EXACT_LIMIT = 25  # exact signed-rank distribution up to this many pairs


class Symbol(Enum):
    UP = "up"        # row distribution significantly larger than column
    EQ = "eq"
    DOWN = "down"

    @property
    def glyph(self) -> str:
        return {"up": "▲", "eq": "≡", "down": "▽"}[self.value]

    @property
    def score(self) -> int:
        return {"up": 1, "eq": 0, "down": -1}[self.value]


@dataclass(frozen=True)
class DisagreementReport:
    train_validation: float
    holdout_test: float
    all: float


@dataclass(frozen=True)
class WilcoxonOutcome:
    statistic: float   # sum of positive ranks
    p_value: float
    symbol: Symbol
    n_effective: int


@dataclass
class ComparisonMatrix:
    policies: list
    outcomes: dict     # (row, col) -> WilcoxonOutcome
    summary: dict      # policy -> sum of up(+1)/eq(0)/down(-1)
    target: str
    alpha: float


def disagreement(metrics: SetMetrics) -> DisagreementReport:
    """Absolute accuracy gaps between sets; "all" averages the 6 pairs."""
    values = [metrics.train, metrics.validation, metrics.holdout, metrics.test]
    pairs = [abs(x - y) for x, y in itertools.combinations(values, 2)]
    return DisagreementReport(
        train_validation=abs(metrics.train - metrics.validation),
        holdout_test=abs(metrics.holdout - metrics.test),
        all=sum(pairs) / len(pairs),
    )


def _exact_p(doubled_ranks, w_doubled: int) -> float:
    """Two-sided p from the exact null distribution of the positive-rank sum.

    Tie-averaged ranks are half-integers, so ranks are doubled to keep the
    dynamic program integral; counts are exact Python integers.
    """
    total = sum(doubled_ranks)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled_ranks:
        nxt = counts[:]
        for s in range(total - r + 1):
            if counts[s]:
                nxt[s + r] += counts[s]
        counts = nxt
    n_patterns = 1 << len(doubled_ranks)
    p_low = sum(counts[: w_doubled + 1])
    p_high = sum(counts[w_doubled:])
    return min(1.0, 2.0 * min(p_low, p_high) / n_patterns)


def wilcoxon_signed_rank(a, b, alpha: float = 0.05) -> WilcoxonOutcome:
    """Two-sided paired Wilcoxon signed-rank test of a vs b.

    Zero differences are discarded; tied absolute differences share average
    ranks. The p-value is exact (full sign-pattern distribution) up to
    EXACT_LIMIT effective pairs, and a tie-corrected normal approximation
    with continuity correction beyond that.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 1:
        raise ValueError("a and b must be equal-length 1-D samples")
    d = a - b
    d = d[d != 0]
    n = len(d)
    if n == 0:
        return WilcoxonOutcome(statistic=0.0, p_value=1.0, symbol=Symbol.EQ,
                               n_effective=0)
    ranks = rankdata(np.abs(d))
    w_pos = float(ranks[d > 0].sum())
    mean = n * (n + 1) / 4.0
    if n <= EXACT_LIMIT:
        doubled = [int(round(2 * r)) for r in ranks]
        p = _exact_p(doubled, int(round(2 * w_pos)))
    else:
        _, tie_counts = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24.0 \
            - float(np.sum(tie_counts ** 3 - tie_counts)) / 48.0
        if var == 0.0:
            p = 1.0
        else:
            shift = w_pos - mean
            z = (shift - 0.5 * np.sign(shift)) / np.sqrt(var)
            p = float(2.0 * norm.sf(abs(z)))
    if p < alpha and w_pos > mean:
        symbol = Symbol.UP
    elif p < alpha and w_pos < mean:
        symbol = Symbol.DOWN
    else:
        symbol = Symbol.EQ
    return WilcoxonOutcome(statistic=w_pos, p_value=p, symbol=symbol,
                           n_effective=n)


def comparison_matrix(values_by_policy: dict, target: str,
                      alpha: float = 0.05) -> ComparisonMatrix:
    """Policy-by-policy Wilcoxon grid over values paired by (dataset, run) key.

    Every policy must cover the same keys. Cells compare raw distributions;
    for a smaller-is-better target the preferred direction is down, which the
    emitters label alongside the summary.
    """
    policies = list(values_by_policy)
    key_sets = {p: set(values_by_policy[p]) for p in policies}
    reference = key_sets[policies[0]]
    for p in policies[1:]:
        missing = reference.symmetric_difference(key_sets[p])
        if missing:
            raise ValueError(
                f"policies {policies[0]} and {p} disagree on keys: {sorted(missing)}")
    keys = sorted(reference)
    series = {p: np.array([values_by_policy[p][k] for k in keys])
              for p in policies}
    outcomes = {}
    for row in policies:
        for col in policies:
            if row == col:
                outcomes[(row, col)] = WilcoxonOutcome(
                    statistic=0.0, p_value=1.0, symbol=Symbol.EQ,
                    n_effective=0)
            else:
                outcomes[(row, col)] = wilcoxon_signed_rank(
                    series[row], series[col], alpha)
    summary = {row: sum(outcomes[(row, col)].symbol.score for col in policies)
               for row in policies}
    return ComparisonMatrix(policies=policies, outcomes=outcomes,
                            summary=summary, target=target, alpha=alpha)


def matrix_to_text(matrix: ComparisonMatrix) -> str:
    """Aligned plain-text table with triangle/equivalence glyphs."""
    names = [str(p) for p in matrix.policies]
    width = max(len(n) for n in names) + 2
    lines = [f"target: {matrix.target} (alpha={matrix.alpha})"]
    header = " " * width + "".join(n.rjust(width) for n in names) + "  Summary"
    lines.append(header)
    for row in matrix.policies:
        cells = "".join(
            matrix.outcomes[(row, col)].symbol.glyph.rjust(width)
            for col in matrix.policies)
        lines.append(str(row).rjust(width) + cells
                     + str(matrix.summary[row]).rjust(9))
    return "\n".join(lines) + "\n"


def write_matrix_csv(matrix: ComparisonMatrix, path) -> None:
    names = [str(p) for p in matrix.policies]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["policy"] + names + ["summary"])
        for row in matrix.policies:
            writer.writerow(
                [str(row)]
                + [matrix.outcomes[(row, col)].symbol.value
                   for col in matrix.policies]
                + [matrix.summary[row]])
