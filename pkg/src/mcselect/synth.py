"""Synthetic tasks with per-role label noise and known-truth candidate pools.

Lets each selection policy be scored by regret against the ground-truth
generalization of its pick, which real datasets never expose.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (Activation, Architecture, CandidatePool, CandidateRecord,
                   Provenance, SetMetrics)
from .seeding import child_rng
from .splitplan import Role

ROLES = (Role.TRAIN, Role.VALIDATION, Role.HOLDOUT, Role.TEST)


@dataclass
class NoisyTask:
    features: dict            # role -> (n, d) array
    clean_labels: dict        # role -> (n,) array
    observed_labels: dict     # role -> labels after per-role flip noise
    flipped: dict             # role -> boolean flip mask
    noise_rate: dict          # role -> fraction in [0, 1)
    teacher: dict
    n_classes: int
    seed: int


@dataclass(frozen=True)
class SyntheticCandidate:
    name: str
    p_clean: float   # P(correct prediction on a clean-labeled point)
    p_noise: float   # P(matching a flipped label)
    architecture: Architecture = Architecture(10, Activation.RELU)
    epochs_trained: int = 50

    @property
    def true_generalization(self) -> float:
        return self.p_clean

    @property
    def is_noise_fitter(self) -> bool:
        return self.p_noise > self.p_clean


@dataclass
class RegretReport:
    policy: str
    picked: str
    picked_true: float
    best_true: float
    regret: float
    picked_noise_fitter: bool


def _teacher_labels(teacher: dict, x: np.ndarray) -> np.ndarray:
    kind = teacher.get("kind", "linear")
    if kind == "linear":
        w = np.asarray(teacher["weights"])
        return (x @ w).argmax(axis=1)
    if kind == "rings":
        radii = np.sqrt((x[:, :2] ** 2).sum(axis=1))
        edges = np.asarray(teacher["edges"])
        return np.searchsorted(edges, radii)
    raise ValueError(f"unknown teacher kind {kind!r}")


def make_teacher(spec: dict, seed: int) -> dict:
    """Materialize a generating rule M from a short spec."""
    kind = spec.get("kind", "linear")
    n_features = int(spec.get("n_features", 4))
    n_classes = int(spec.get("n_classes", 2))
    if kind == "linear":
        rng = child_rng(seed, "teacher")
        return {"kind": "linear", "n_features": n_features,
                "n_classes": n_classes,
                "weights": rng.normal(size=(n_features, n_classes))}
    if kind == "rings":
        # class boundaries at equal-probability radii of a 2-D standard normal
        qs = np.linspace(0, 1, n_classes + 1)[1:-1]
        edges = np.sqrt(-2.0 * np.log(1.0 - qs))
        return {"kind": "rings", "n_features": max(n_features, 2),
                "n_classes": n_classes, "edges": edges}
    raise ValueError(f"unknown teacher kind {kind!r}")


def make_noisy_task(n_per_role: int, teacher_spec: dict, noise_rates: dict,
                    seed: int) -> NoisyTask:
    """Sample X per role, label with the teacher, then flip labels per role.

    Each role's observed labels flip each clean label independently with the
    role's rate, to a uniformly random other class.
    """
    for role, eps in noise_rates.items():
        if not (0.0 <= eps < 1.0):
            raise ValueError(f"noise rate for {role} must be in [0, 1)")
    teacher = make_teacher(teacher_spec, seed)
    n_classes = teacher["n_classes"]
    features, clean, observed, flipped = {}, {}, {}, {}
    for role in ROLES:
        rng = child_rng(seed, "task", role.value)
        x = rng.normal(size=(n_per_role, teacher["n_features"]))
        y = _teacher_labels(teacher, x)
        eps = float(noise_rates.get(role, 0.0))
        flip = rng.random(n_per_role) < eps
        y_obs = y.copy()
        if n_classes > 1 and flip.any():
            shift = rng.integers(1, n_classes, size=int(flip.sum()))
            y_obs[flip] = (y[flip] + shift) % n_classes
        else:
            flip = np.zeros(n_per_role, dtype=bool)
        features[role] = x
        clean[role] = y
        observed[role] = y_obs
        flipped[role] = flip
    return NoisyTask(features=features, clean_labels=clean,
                     observed_labels=observed, flipped=flipped,
                     noise_rate={r: float(noise_rates.get(r, 0.0)) for r in ROLES},
                     teacher=teacher, n_classes=n_classes, seed=seed)


def observed_accuracy(cand: SyntheticCandidate, role: Role, task: NoisyTask) -> float:
    """Empirical accuracy of a candidate against one role's observed labels.

    Per sample the candidate agrees with a clean label with probability
    p_clean and with a flipped label with probability p_noise, so the
    expectation is (1 - eps) * p_clean + eps * p_noise. Deterministic for a
    fixed (task seed, candidate, role).
    """
    flip = task.flipped[role]
    rng = child_rng(task.seed, "observe", role.value, cand.name)
    u = rng.random(len(flip))
    correct = np.where(flip, u < cand.p_noise, u < cand.p_clean)
    return float(correct.mean())


def candidate_records(cands, task: NoisyTask, dataset_id: str = "synthetic",
                      run_id: int = 0) -> CandidatePool:
    """Express synthetic candidates in the ordinary candidate-record schema."""
    records = []
    for i, cand in enumerate(cands):
        metrics = SetMetrics(
            train=observed_accuracy(cand, Role.TRAIN, task),
            validation=observed_accuracy(cand, Role.VALIDATION, task),
            holdout=observed_accuracy(cand, Role.HOLDOUT, task),
            test=observed_accuracy(cand, Role.TEST, task),
        )
        records.append(CandidateRecord(
            dataset_id=dataset_id, run_id=run_id, repetition=i,
            architecture=cand.architecture,
            epochs_trained=cand.epochs_trained, max_epochs=100,
            metrics=metrics, seed=task.seed))
    return CandidatePool(records=records, provenance=Provenance.SYNTHETIC)


def sample_candidates(n: int, seed: int, max_neurons: int = 100) -> list:
    """Random candidates whose complexity covariates track their noise appetite.

    Noise-fitters receive more neurons and later stopping epochs so the
    complexity and epoch criteria have signal to work with. The coupling is a
    simulator convention, not a measured relationship.
    """
    rng = child_rng(seed, "candidates")
    cands = []
    for i in range(n):
        p_clean = float(rng.uniform(0.5, 1.0))
        p_noise = float(rng.uniform(0.0, 1.0))
        mix = 0.3 * rng.random() + 0.7 * p_noise
        neurons = int(1 + round((max_neurons - 1) * mix))
        epochs = int(round(100 * (0.2 + 0.8 * rng.random())))
        act = list(Activation)[int(rng.integers(len(Activation)))]
        cands.append(SyntheticCandidate(
            name=f"cand{i}", p_clean=p_clean, p_noise=p_noise,
            architecture=Architecture(neurons, act), epochs_trained=epochs))
    return cands


def evaluate_selection_regret(policy, cands, task: NoisyTask) -> RegretReport:
    """Regret of one policy's pick against the pool's best true generalization.

    `policy` is a PolicyId; selection runs over the candidates' observed
    per-role accuracies exactly as it would over a trained pool.
    """
    from .policies import select_individual
    if not cands:
        raise ValueError("candidate pool must be non-empty")
    pool = candidate_records(cands, task)
    result = select_individual(policy, pool)
    picked = cands[result.selected.repetition]
    best_true = max(c.true_generalization for c in cands)
    return RegretReport(
        policy=str(policy), picked=picked.name,
        picked_true=picked.true_generalization, best_true=best_true,
        regret=best_true - picked.true_generalization,
        picked_noise_fitter=picked.is_noise_fitter)
