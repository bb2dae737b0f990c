"""Named selection policies and aggregation levels over candidate pools."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import ACTIVATION_ORDER, CandidatePool, CandidateRecord
from .mcdm import CriterionSpec, DecisionMatrix, Direction, pareto_filter, topsis_rank

_MAX = Direction.MAXIMIZE
_MIN = Direction.MINIMIZE


class PolicyId(Enum):
    TRAIN = "Train"
    VALIDATION = "Validation"
    HOLDOUT = "Holdout"
    TEST = "Test"
    THT = "THT"
    TTVH = "TTVH"
    TTVHT = "TTVHT"
    TTVHN = "TTVHN"
    TTVHTN = "TTVHTN"
    THTN = "THTN"
    TTVHNE = "TTVHNE"
    TTVHNB = "TTVHNB"
    THTNB = "THTNB"
    THTNE = "THTNE"
    TTVHTNE = "TTVHTNE"
    TTVHTNB = "TTVHTNB"

    def __str__(self):
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "PolicyId":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(
            f"unknown policy {name!r}; valid: {[m.value for m in cls]}")


SINGLE_SET_POLICIES = {PolicyId.TRAIN: "train", PolicyId.VALIDATION: "validation",
                       PolicyId.HOLDOUT: "holdout", PolicyId.TEST: "test"}

# Criteria per TOPSIS policy, following the letter decomposition: accuracies
# maximize, N = neurons minimize, E = epochs maximize, B = epochs minimize.
_TOPSIS_CRITERIA = {
    PolicyId.THT: [("holdout", _MAX), ("test", _MAX)],
    PolicyId.TTVH: [("train", _MAX), ("validation", _MAX), ("holdout", _MAX)],
    PolicyId.TTVHT: [("train", _MAX), ("validation", _MAX), ("holdout", _MAX),
                     ("test", _MAX)],
    PolicyId.TTVHN: [("train", _MAX), ("validation", _MAX), ("holdout", _MAX),
                     ("neurons", _MIN)],
    PolicyId.TTVHTN: [("train", _MAX), ("validation", _MAX), ("holdout", _MAX),
                      ("test", _MAX), ("neurons", _MIN)],
    PolicyId.THTN: [("holdout", _MAX), ("test", _MAX), ("neurons", _MIN)],
    PolicyId.TTVHNE: [("train", _MAX), ("validation", _MAX), ("holdout", _MAX),
                      ("neurons", _MIN), ("epochs", _MAX)],
    PolicyId.TTVHNB: [("train", _MAX), ("validation", _MAX), ("holdout", _MAX),
                      ("neurons", _MIN), ("epochs", _MIN)],
    PolicyId.THTNB: [("holdout", _MAX), ("test", _MAX), ("neurons", _MIN),
                     ("epochs", _MIN)],
    PolicyId.THTNE: [("holdout", _MAX), ("test", _MAX), ("neurons", _MIN),
                     ("epochs", _MAX)],
    PolicyId.TTVHTNE: [("train", _MAX), ("validation", _MAX), ("holdout", _MAX),
                       ("test", _MAX), ("neurons", _MIN), ("epochs", _MAX)],
    PolicyId.TTVHTNB: [("train", _MAX), ("validation", _MAX), ("holdout", _MAX),
                       ("test", _MAX), ("neurons", _MIN), ("epochs", _MIN)],
}


class AggregationId(Enum):
    INDIVIDUAL = "Individual"
    LOCAL = "Local"
    GLOBAL = "Global"

    @classmethod
    def from_name(cls, name: str) -> "AggregationId":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(
            f"unknown aggregation {name!r}; valid: {[m.value for m in cls]}")


@dataclass
class SelectionResult:
    policy: PolicyId
    aggregation: AggregationId
    run_id: int
    selected: CandidateRecord
    score: float
    tiebreak_trace: list = field(default_factory=list)
    pareto_retained: int = 0


def criteria_of(policy: PolicyId, weights: dict | None = None) -> list:
    """Criteria set implied by the policy name (equal weights by default)."""
    weights = weights or {}
    if policy in SINGLE_SET_POLICIES:
        name = SINGLE_SET_POLICIES[policy]
        return [CriterionSpec(name, _MAX, weights.get(name, 1.0))]
    return [CriterionSpec(name, direction, weights.get(name, 1.0))
            for name, direction in _TOPSIS_CRITERIA[policy]]


def _criterion_value(record: CandidateRecord, name: str) -> float:
    if name == "neurons":
        return float(record.architecture.neurons)
    if name == "epochs":
        return float(record.epochs_trained)
    return getattr(record.metrics, name)


def decision_matrix(policy: PolicyId, records, weights=None) -> DecisionMatrix:
    criteria = criteria_of(policy, weights)
    values = np.array([[_criterion_value(r, c.name) for c in criteria]
                       for r in records])
    return DecisionMatrix(alternatives=list(range(len(records))),
                          values=values, criteria=criteria)


def _tiebreak(records, indices, trace) -> int:
    """Fewest neurons, then activation enumeration order, then repetition."""
    if len(indices) == 1:
        return indices[0]
    for label, keyfn in (
            ("neurons", lambda i: records[i].architecture.neurons),
            ("activation", lambda i: ACTIVATION_ORDER[records[i].architecture.activation]),
            ("repetition", lambda i: records[i].repetition)):
        best = min(keyfn(i) for i in indices)
        indices = [i for i in indices if keyfn(i) == best]
        trace.append(label)
        if len(indices) == 1:
            break
    return indices[0]


def policy_scores(policy: PolicyId, records, weights=None) -> np.ndarray:
    """Higher-is-better scalar each record is ranked by under the policy."""
    if policy in SINGLE_SET_POLICIES:
        name = SINGLE_SET_POLICIES[policy]
        return np.array([getattr(r.metrics, name) for r in records])
    return topsis_rank(decision_matrix(policy, records, weights)).closeness


def competition_ranks(scores: np.ndarray) -> np.ndarray:
    """1 = best; tied scores share the minimum rank."""
    ranks = np.empty(len(scores))
    for i, s in enumerate(scores):
        ranks[i] = 1 + int(np.sum(scores > s))
    return ranks


def select_individual(policy: PolicyId, pool: CandidatePool,
                      weights=None) -> SelectionResult:
    """Pick one record from a single run's pool.

    Single-set policies take the metric argmax. TOPSIS policies rank every
    record by closeness, then restrict to the Pareto non-dominated set for
    the same criteria and pick the best closeness inside it.
    """
    records = pool.records
    if not records:
        raise ValueError("pool must be non-empty")
    trace = []
    if policy in SINGLE_SET_POLICIES:
        scores = policy_scores(policy, records)
        retained = len(records)
        candidates = [i for i in range(len(records)) if scores[i] == scores.max()]
    else:
        matrix = decision_matrix(policy, records, weights)
        scores = topsis_rank(matrix).closeness
        keep = pareto_filter(matrix)
        retained = len(keep)
        best = max(scores[i] for i in keep)
        candidates = sorted(i for i in keep if scores[i] == best)
    pick = _tiebreak(records, candidates, trace)
    return SelectionResult(policy=policy, aggregation=AggregationId.INDIVIDUAL,
                           run_id=records[pick].run_id, selected=records[pick],
                           score=float(scores[pick]), tiebreak_trace=trace,
                           pareto_retained=retained)


def _grouped_by_architecture(records):
    groups = {}
    for i, rec in enumerate(records):
        groups.setdefault(rec.architecture, []).append(i)
    return groups


def _best_architecture(avg_rank_by_arch, trace) -> object:
    best = min(avg_rank_by_arch.values())
    tied = [a for a, r in avg_rank_by_arch.items() if r == best]
    if len(tied) > 1:
        tied.sort(key=lambda a: a.key())
        trace.append("architecture")
    return tied[0]


def select_local(policy: PolicyId, pool: CandidatePool,
                 weights=None) -> SelectionResult:
    """Average per-record ranks within each architecture; best average wins.

    Inside the winning architecture the member with the best individual rank
    under the same policy is returned.
    """
    records = pool.records
    if not records:
        raise ValueError("pool must be non-empty")
    scores = policy_scores(policy, records, weights)
    ranks = competition_ranks(scores)
    groups = _grouped_by_architecture(records)
    avg = {arch: float(np.mean(ranks[idx])) for arch, idx in groups.items()}
    trace = []
    arch = _best_architecture(avg, trace)
    members = groups[arch]
    best_rank = min(ranks[i] for i in members)
    candidates = [i for i in members if ranks[i] == best_rank]
    pick = _tiebreak(records, candidates, trace)
    return SelectionResult(policy=policy, aggregation=AggregationId.LOCAL,
                           run_id=records[pick].run_id, selected=records[pick],
                           score=float(scores[pick]), tiebreak_trace=trace,
                           pareto_retained=len(groups))


def select_global(policy: PolicyId, pools_by_run: dict,
                  weights=None) -> list:
    """Fix one architecture dataset-wide, then pick its best member per run.

    Ranks are computed within each run's pool and averaged per architecture
    across every run's repetitions before the architecture choice.
    """
    if not pools_by_run:
        raise ValueError("at least one run required")
    per_run = {}
    rank_sums, rank_counts = {}, {}
    for run_id in sorted(pools_by_run):
        records = pools_by_run[run_id].records
        scores = policy_scores(policy, records, weights)
        ranks = competition_ranks(scores)
        per_run[run_id] = (records, scores, ranks)
        for i, rec in enumerate(records):
            rank_sums[rec.architecture] = rank_sums.get(rec.architecture, 0.0) + ranks[i]
            rank_counts[rec.architecture] = rank_counts.get(rec.architecture, 0) + 1
    avg = {a: rank_sums[a] / rank_counts[a] for a in rank_sums}
    trace = []
    arch = _best_architecture(avg, trace)
    results = []
    for run_id in sorted(per_run):
        records, scores, ranks = per_run[run_id]
        members = [i for i, r in enumerate(records) if r.architecture == arch]
        if not members:
            raise ValueError(
                f"run {run_id} is missing the chosen architecture {arch}")
        best_rank = min(ranks[i] for i in members)
        candidates = [i for i in members if ranks[i] == best_rank]
        run_trace = list(trace)
        pick = _tiebreak(records, candidates, run_trace)
        results.append(SelectionResult(
            policy=policy, aggregation=AggregationId.GLOBAL, run_id=run_id,
            selected=records[pick], score=float(scores[pick]),
            tiebreak_trace=run_trace, pareto_retained=len(avg)))
    return results


SELECTION_CSV_FIELDS = [
    "policy", "aggregation", "dataset_id", "run_id", "repetition", "neurons",
    "activation", "epochs_trained", "acc_train", "acc_validation",
    "acc_holdout", "acc_test", "closeness",
]


def write_selections_csv(results, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SELECTION_CSV_FIELDS)
        writer.writeheader()
        for res in results:
            rec = res.selected
            writer.writerow({
                "policy": res.policy.value,
                "aggregation": res.aggregation.value,
                "dataset_id": rec.dataset_id,
                "run_id": rec.run_id,
                "repetition": rec.repetition,
                "neurons": rec.architecture.neurons,
                "activation": rec.architecture.activation.value,
                "epochs_trained": rec.epochs_trained,
                "acc_train": repr(rec.metrics.train),
                "acc_validation": repr(rec.metrics.validation),
                "acc_holdout": repr(rec.metrics.holdout),
                "acc_test": repr(rec.metrics.test),
                "closeness": repr(res.score),
            })
