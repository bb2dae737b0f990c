"""Canonical data types for trained-model candidates and their metrics."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum


class Activation(Enum):
    IDENTITY = "Identity"
    GELU = "GELU"
    LEAKY_RELU = "LeakyReLU"
    RELU = "ReLU"
    SELU = "SELU"
    SIGMOID = "Sigmoid"
    TANH = "Tanh"

    @classmethod
    def from_name(cls, name: str) -> "Activation":
        for member in cls:
            if member.value == name:
                return member
        raise ValueError(
            f"unknown activation {name!r}; valid: {[m.value for m in cls]}"
        )


# Stable ordering used for tiebreaks.
ACTIVATION_ORDER = {a: i for i, a in enumerate(Activation)}

MAX_NEURONS_DEFAULT = 100

CSV_FIELDS = [
    "dataset_id", "run_id", "repetition", "neurons", "activation",
    "epochs_trained", "max_epochs", "acc_train", "acc_validation",
    "acc_holdout", "acc_test", "seed",
]


@dataclass(frozen=True)
class Architecture:
    """Single-hidden-layer shape: neuron count plus activation function."""

    neurons: int
    activation: Activation

    def key(self) -> tuple:
        return (self.neurons, ACTIVATION_ORDER[self.activation])


@dataclass(frozen=True)
class SetMetrics:
    """Accuracy per data role, stored as fractions in [0, 1]."""

    train: float
    validation: float
    holdout: float
    test: float

    def as_dict(self) -> dict:
        return {
            "train": self.train,
            "validation": self.validation,
            "holdout": self.holdout,
            "test": self.test,
        }


@dataclass(frozen=True)
class CandidateRecord:
    """One trained model: identity, training length and per-set accuracies."""

    dataset_id: str
    run_id: int
    repetition: int
    architecture: Architecture
    epochs_trained: int
    max_epochs: int
    metrics: SetMetrics
    seed: int

    def key(self) -> tuple:
        return (self.dataset_id, self.run_id, self.repetition,
                self.architecture.key())


class Provenance(Enum):
    TRAINED = "Trained"
    SYNTHETIC = "Synthetic"
    INGESTED = "Ingested"


@dataclass
class CandidatePool:
    records: list = field(default_factory=list)
    provenance: Provenance = Provenance.INGESTED


def validate_pool(pool: CandidatePool, max_neurons: int = MAX_NEURONS_DEFAULT) -> list:
    """Check every record invariant plus pool-wide key uniqueness.

    Violations are returned as strings; an empty list means the pool is valid.
    """
    violations = []
    if not pool.records:
        violations.append("pool is empty")
    seen = {}
    for rec in pool.records:
        where = f"record {rec.key()}"
        arch = rec.architecture
        if not (1 <= arch.neurons <= max_neurons):
            violations.append(f"{where}: neurons {arch.neurons} outside [1, {max_neurons}]")
        if not isinstance(arch.activation, Activation):
            violations.append(f"{where}: invalid activation {arch.activation!r}")
        if rec.repetition < 0:
            violations.append(f"{where}: negative repetition")
        if rec.epochs_trained < 0:
            violations.append(f"{where}: negative epochs_trained")
        if rec.max_epochs < 1:
            violations.append(f"{where}: max_epochs < 1")
        if rec.epochs_trained > rec.max_epochs:
            violations.append(
                f"{where}: epochs_trained {rec.epochs_trained} > max_epochs {rec.max_epochs}")
        for name, value in rec.metrics.as_dict().items():
            if not (0.0 <= value <= 1.0):
                violations.append(f"{where}: metric {name}={value} out of [0,1]")
        k = rec.key()
        if k in seen:
            violations.append(f"duplicate record key {k}")
        seen[k] = rec
    return violations


def record_to_row(rec: CandidateRecord) -> dict:
    return {
        "dataset_id": rec.dataset_id,
        "run_id": rec.run_id,
        "repetition": rec.repetition,
        "neurons": rec.architecture.neurons,
        "activation": rec.architecture.activation.value,
        "epochs_trained": rec.epochs_trained,
        "max_epochs": rec.max_epochs,
        "acc_train": repr(rec.metrics.train),
        "acc_validation": repr(rec.metrics.validation),
        "acc_holdout": repr(rec.metrics.holdout),
        "acc_test": repr(rec.metrics.test),
        "seed": rec.seed,
    }


def record_from_row(row: dict) -> CandidateRecord:
    return CandidateRecord(
        dataset_id=str(row["dataset_id"]),
        run_id=int(row["run_id"]),
        repetition=int(row["repetition"]),
        architecture=Architecture(
            neurons=int(row["neurons"]),
            activation=Activation.from_name(str(row["activation"])),
        ),
        epochs_trained=int(row["epochs_trained"]),
        max_epochs=int(row["max_epochs"]),
        metrics=SetMetrics(
            train=float(row["acc_train"]),
            validation=float(row["acc_validation"]),
            holdout=float(row["acc_holdout"]),
            test=float(row["acc_test"]),
        ),
        seed=int(row["seed"]),
    )


def write_pool_csv(pool: CandidatePool, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for rec in pool.records:
            writer.writerow(record_to_row(rec))


def read_pool_csv(path, provenance: Provenance = Provenance.INGESTED) -> CandidatePool:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        records = [record_from_row(row) for row in reader]
    return CandidatePool(records=records, provenance=provenance)


def pool_to_csv_text(pool: CandidatePool) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for rec in pool.records:
        writer.writerow(record_to_row(rec))
    return buf.getvalue()


def write_pool_jsonl(pool: CandidatePool, path) -> None:
    with open(path, "w") as fh:
        for rec in pool.records:
            row = record_to_row(rec)
            for k in ("acc_train", "acc_validation", "acc_holdout", "acc_test"):
                row[k] = float(row[k])
            fh.write(json.dumps(row) + "\n")


def read_pool_jsonl(path, provenance: Provenance = Provenance.INGESTED) -> CandidatePool:
    records = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(record_from_row(json.loads(line)))
    return CandidatePool(records=records, provenance=provenance)
