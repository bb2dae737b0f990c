"""Fold layout: fixed test fold, rotating holdout, round-robin validation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .seeding import child_rng


class Role(Enum):
    TRAIN = "Train"
    VALIDATION = "Validation"
    HOLDOUT = "Holdout"
    TEST = "Test"


@dataclass(frozen=True)
class FoldAssignment:
    fold_of_sample: tuple
    k: int
    class_counts_per_fold: tuple  # (class, fold) -> count, as nested tuples

    def indices_of_fold(self, fold: int) -> np.ndarray:
        arr = np.asarray(self.fold_of_sample)
        return np.nonzero(arr == fold)[0]


@dataclass(frozen=True)
class RunSpec:
    run_id: int
    test_fold: int
    holdout_fold: int
    validation_fold_of_repetition: tuple

    @property
    def n_repetitions(self) -> int:
        return len(self.validation_fold_of_repetition)

    def train_folds_of_repetition(self, repetition: int) -> tuple:
        val = self.validation_fold_of_repetition[repetition]
        k = len(self.validation_fold_of_repetition) + 2
        return tuple(f for f in range(k)
                     if f not in (self.test_fold, self.holdout_fold, val))


@dataclass(frozen=True)
class SampleMask:
    role_of_sample: tuple

    def indices(self, role: Role) -> np.ndarray:
        return np.nonzero([r is role for r in self.role_of_sample])[0]


class InfeasibleSplitError(ValueError):
    pass


def stratified_kfold(labels, k: int, seed: int) -> FoldAssignment:
    """Assign each sample a fold, stratified per class.

    Per class the (seeded) shuffled indices are dealt round-robin into the k
    folds, so per-class fold counts differ by at most one. Deterministic for
    fixed (labels, k, seed).
    """
    labels = np.asarray(labels)
    n = len(labels)
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > n:
        raise InfeasibleSplitError(f"k={k} exceeds sample count {n}")
    classes = sorted(set(labels.tolist()))
    fold_of_sample = np.empty(n, dtype=int)
    # Offset the starting fold per class so small classes do not all pile
    # their remainder samples into fold 0.
    offset = 0
    for cls in classes:
        idx = np.nonzero(labels == cls)[0]
        rng = child_rng(seed, "stratify", cls)
        idx = idx[rng.permutation(len(idx))]
        for j, sample in enumerate(idx):
            fold_of_sample[sample] = (offset + j) % k
        offset += len(idx)
    counts = tuple(
        tuple(int(np.sum((labels == cls) & (fold_of_sample == f))) for f in range(k))
        for cls in classes
    )
    return FoldAssignment(fold_of_sample=tuple(int(f) for f in fold_of_sample),
                          k=k, class_counts_per_fold=counts)


def build_run_schedule(k: int, experiment_repeats: int) -> list:
    """Emit experiment_repeats * (k-1) runs.

    The test fold is fixed at k-1 in every run. The holdout fold rotates over
    the k-1 remaining folds once per repeat. Within a run, each of the k-2
    leftover folds serves as the validation fold of one repetition.
    """
    if k < 3:
        raise ValueError("k must be >= 3")
    test_fold = k - 1
    runs = []
    run_id = 0
    for _ in range(experiment_repeats):
        for holdout in range(k - 1):
            validation = tuple(f for f in range(k - 1) if f != holdout)
            runs.append(RunSpec(run_id=run_id, test_fold=test_fold,
                                holdout_fold=holdout,
                                validation_fold_of_repetition=validation))
            run_id += 1
    return runs


def masks_for(assignment: FoldAssignment, run: RunSpec, repetition: int) -> SampleMask:
    """Map each sample to its role for one repetition of a run."""
    if repetition >= run.n_repetitions:
        raise IndexError(
            f"repetition {repetition} out of range ({run.n_repetitions})")
    val_fold = run.validation_fold_of_repetition[repetition]
    roles = []
    for fold in assignment.fold_of_sample:
        if fold == run.test_fold:
            roles.append(Role.TEST)
        elif fold == run.holdout_fold:
            roles.append(Role.HOLDOUT)
        elif fold == val_fold:
            roles.append(Role.VALIDATION)
        else:
            roles.append(Role.TRAIN)
    return SampleMask(role_of_sample=tuple(roles))


def imbalance(class_counts) -> float:
    """Entropy-normalized deviation from a balanced class distribution.

    Returns 1 - H / log(k) with H the Shannon entropy of the class
    proportions (0 * log 0 := 0). Balanced counts give 0; a single class
    gives 1 by convention (log k = 0 there).
    """
    counts = [c for c in class_counts if c > 0]
    if not counts:
        raise ValueError("at least one positive count required")
    k = len(class_counts)
    if k == 1:
        return 1.0
    n = sum(counts)
    h = -sum((c / n) * math.log(c / n) for c in counts)
    return 1.0 - h / math.log(k)


def plan_to_json(assignment: FoldAssignment, runs, seed: int) -> dict:
    return {
        "k": assignment.k,
        "seed": seed,
        "fold_of_sample": list(assignment.fold_of_sample),
        "runs": [
            {
                "run_id": r.run_id,
                "test_fold": r.test_fold,
                "holdout_fold": r.holdout_fold,
                "validation_folds": list(r.validation_fold_of_repetition),
            }
            for r in runs
        ],
    }


def plan_from_json(doc: dict):
    fold_of_sample = tuple(int(f) for f in doc["fold_of_sample"])
    k = int(doc["k"])
    assignment = FoldAssignment(fold_of_sample=fold_of_sample, k=k,
                                class_counts_per_fold=())
    runs = [
        RunSpec(run_id=int(r["run_id"]), test_fold=int(r["test_fold"]),
                holdout_fold=int(r["holdout_fold"]),
                validation_fold_of_repetition=tuple(int(v) for v in r["validation_folds"]))
        for r in doc["runs"]
    ]
    return assignment, runs


def write_plan(path, assignment: FoldAssignment, runs, seed: int) -> None:
    with open(path, "w") as fh:
        json.dump(plan_to_json(assignment, runs, seed), fh, indent=1, sort_keys=True)
        fh.write("\n")


def read_plan(path):
    with open(path) as fh:
        return plan_from_json(json.load(fh))
