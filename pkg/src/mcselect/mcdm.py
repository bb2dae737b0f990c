"""Multi-criteria core: TOPSIS closeness to ideal solutions, Pareto filter."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Direction(Enum):
    MAXIMIZE = "Maximize"
    MINIMIZE = "Minimize"


@dataclass(frozen=True)
class CriterionSpec:
    name: str
    direction: Direction
    weight: float = 1.0


@dataclass
class DecisionMatrix:
    alternatives: list
    values: np.ndarray  # m alternatives x n criteria
    criteria: list

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        m, n = self.values.shape
        if m < 1 or n < 1:
            raise ValueError("matrix must have at least one row and column")
        if len(self.alternatives) != m:
            raise ValueError("alternative count does not match rows")
        if len(self.criteria) != n:
            raise ValueError("criterion count does not match columns")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("matrix values must be finite")
        for c in self.criteria:
            if c.weight <= 0:
                raise ValueError(f"criterion {c.name}: weight must be positive")


@dataclass
class TopsisResult:
    closeness: np.ndarray
    ordering: list
    pis: np.ndarray
    nis: np.ndarray
    zero_columns: list = field(default_factory=list)


def _normalized_weights(criteria) -> np.ndarray:
    w = np.array([c.weight for c in criteria], dtype=float)
    return w / w.sum()


def normalize_matrix(matrix: DecisionMatrix):
    """Vector-normalize each column and scale by its normalized weight.

    An all-zero column stays zero and is reported back; it contributes
    nothing to the ideal-solution distances.
    """
    values = matrix.values
    norms = np.sqrt(np.sum(values ** 2, axis=0))
    zero_columns = [j for j in range(values.shape[1]) if norms[j] == 0.0]
    safe = np.where(norms == 0.0, 1.0, norms)
    normalized = values / safe
    weighted = normalized * _normalized_weights(matrix.criteria)
    return weighted, zero_columns


def topsis_rank(matrix: DecisionMatrix) -> TopsisResult:
    """Rank alternatives by closeness c = d-/(d+ + d-) to the ideal vectors.

    PIS takes the per-column best of the normalized-weighted matrix (max for
    Maximize criteria, min for Minimize), NIS the per-column worst. When all
    alternatives coincide (d+ + d- = 0) closeness defaults to 0.5.
    """
    weighted, zero_columns = normalize_matrix(matrix)
    maximize = np.array([c.direction is Direction.MAXIMIZE for c in matrix.criteria])
    col_max = weighted.max(axis=0)
    col_min = weighted.min(axis=0)
    pis = np.where(maximize, col_max, col_min)
    nis = np.where(maximize, col_min, col_max)
    d_pos = np.sqrt(np.sum((weighted - pis) ** 2, axis=1))
    d_neg = np.sqrt(np.sum((weighted - nis) ** 2, axis=1))
    total = d_pos + d_neg
    closeness = np.where(total == 0.0, 0.5, d_neg / np.where(total == 0.0, 1.0, total))
    order = np.argsort(-closeness, kind="stable")
    ordering = [matrix.alternatives[i] for i in order]
    return TopsisResult(closeness=closeness, ordering=ordering, pis=pis,
                        nis=nis, zero_columns=zero_columns)


def pareto_filter(matrix: DecisionMatrix) -> set:
    """Indices of non-dominated alternatives.

    Row j dominates row i when j is at least as good on every criterion
    (respecting directions) and strictly better on at least one. Identical
    rows do not dominate each other, so exact ties are all retained.
    """
    sign = np.array([1.0 if c.direction is Direction.MAXIMIZE else -1.0
                     for c in matrix.criteria])
    values = matrix.values * sign  # larger-is-better everywhere
    m = values.shape[0]
    keep = set()
    for i in range(m):
        at_least = np.all(values >= values[i], axis=1)
        strictly = np.any(values > values[i], axis=1)
        if not np.any(at_least & strictly):
            keep.add(i)
    return keep
