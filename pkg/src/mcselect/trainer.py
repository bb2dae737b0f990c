"""Trains small single-hidden-layer MLPs with round-robin early stopping."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .core import (Activation, Architecture, CandidatePool, CandidateRecord,
                   Provenance, SetMetrics)
from .seeding import child_rng, child_seed
from .splitplan import Role, masks_for

_SELU_LAMBDA = 1.0507009873554804934193349852946
_SELU_ALPHA = 1.6732632423543772848170429916717


def _activation_fns(act: Activation):
    """Return (forward, derivative-given-preactivation) for one activation."""
    if act is Activation.IDENTITY:
        return (lambda z: z, lambda z: np.ones_like(z))
    if act is Activation.RELU:
        return (lambda z: np.maximum(z, 0.0), lambda z: (z > 0).astype(float))
    if act is Activation.LEAKY_RELU:
        return (lambda z: np.where(z > 0, z, 0.01 * z),
                lambda z: np.where(z > 0, 1.0, 0.01))
    if act is Activation.SIGMOID:
        def sig(z):
            return 1.0 / (1.0 + np.exp(-z))
        return (sig, lambda z: sig(z) * (1.0 - sig(z)))
    if act is Activation.TANH:
        return (np.tanh, lambda z: 1.0 - np.tanh(z) ** 2)
    if act is Activation.SELU:
        def selu(z):
            return _SELU_LAMBDA * np.where(z > 0, z, _SELU_ALPHA * (np.exp(z) - 1.0))

        def dselu(z):
            return _SELU_LAMBDA * np.where(z > 0, 1.0, _SELU_ALPHA * np.exp(z))
        return (selu, dselu)
    if act is Activation.GELU:
        def gelu(z):
            return 0.5 * z * (1.0 + erf(z / np.sqrt(2.0)))

        def dgelu(z):
            cdf = 0.5 * (1.0 + erf(z / np.sqrt(2.0)))
            pdf = np.exp(-0.5 * z ** 2) / np.sqrt(2.0 * np.pi)
            return cdf + z * pdf
        return (gelu, dgelu)
    raise ValueError(f"unsupported activation {act}")


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 100
    patience: int = 10
    batch_size: int = 32
    learning_rate: float = 0.05
    weight_decay: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.patience > self.max_epochs:
            raise ValueError("patience must be <= max_epochs")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class EpochTrace:
    train_losses: list = field(default_factory=list)
    val_losses: list = field(default_factory=list)
    val_accuracies: list = field(default_factory=list)
    best_epoch: int = 0
    warnings: list = field(default_factory=list)
    best_weights: tuple = ()
    final_weights: tuple = ()


class _MLP:
    def __init__(self, n_in: int, n_hidden: int, n_out: int,
                 activation: Activation, rng: np.random.Generator):
        self.act, self.dact = _activation_fns(activation)
        s1 = 1.0 / np.sqrt(n_in)
        s2 = 1.0 / np.sqrt(n_hidden)
        self.w1 = rng.uniform(-s1, s1, size=(n_in, n_hidden))
        self.b1 = rng.uniform(-s1, s1, size=n_hidden)
        self.w2 = rng.uniform(-s2, s2, size=(n_hidden, n_out))
        self.b2 = rng.uniform(-s2, s2, size=n_out)

    def weights(self) -> tuple:
        return (self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())

    def set_weights(self, weights) -> None:
        self.w1, self.b1, self.w2, self.b2 = (w.copy() for w in weights)

    def logits(self, x: np.ndarray) -> np.ndarray:
        return self.act(x @ self.w1 + self.b1) @ self.w2 + self.b2

    def step(self, x: np.ndarray, y: np.ndarray, lr: float, decay: float) -> None:
        z1 = x @ self.w1 + self.b1
        h = self.act(z1)
        logits = h @ self.w2 + self.b2
        p = _softmax(logits)
        n = len(x)
        g_logits = p.copy()
        g_logits[np.arange(n), y] -= 1.0
        g_logits /= n
        g_w2 = h.T @ g_logits + decay * self.w2
        g_b2 = g_logits.sum(axis=0)
        g_h = g_logits @ self.w2.T
        g_z1 = g_h * self.dact(z1)
        g_w1 = x.T @ g_z1 + decay * self.w1
        g_b1 = g_z1.sum(axis=0)
        self.w1 -= lr * g_w1
        self.b1 -= lr * g_b1
        self.w2 -= lr * g_w2
        self.b2 -= lr * g_b2


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _cross_entropy(logits: np.ndarray, y: np.ndarray) -> float:
    shifted = logits - logits.max(axis=1, keepdims=True)
    logp = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-logp[np.arange(len(y)), y].mean())


def _accuracy(model: _MLP, x: np.ndarray, y: np.ndarray) -> float:
    if len(y) == 0:
        return 0.0
    pred = model.logits(x).argmax(axis=1)
    return float(np.mean(pred == y))


def train_candidate(features, labels, mask, arch: Architecture, cfg: TrainConfig,
                    dataset_id: str = "dataset", run_id: int = 0,
                    repetition: int = 0):
    """Train one MLP on Train-role samples, early-stopping on Validation loss.

    Gradients flow from Train-role samples only; the validation fold is read
    but never differentiated through. Training halts once validation loss
    fails to improve for `patience` consecutive epochs (or at max_epochs) and
    the best-epoch weights are restored. Fully deterministic for fixed
    inputs and seed.
    """
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=int)
    roles = np.asarray([r.value for r in mask.role_of_sample])
    idx = {role: np.nonzero(roles == role.value)[0] for role in Role}
    if len(idx[Role.TRAIN]) == 0 or len(idx[Role.VALIDATION]) == 0:
        raise ValueError("mask must contain Train and Validation samples")
    n_classes = int(y.max()) + 1

    trace = EpochTrace()
    if len(set(y[idx[Role.TRAIN]].tolist())) < 2:
        trace.warnings.append("single-class train partition")

    model = _MLP(x.shape[1], arch.neurons, n_classes, arch.activation,
                 child_rng(cfg.seed, "init"))
    x_tr, y_tr = x[idx[Role.TRAIN]], y[idx[Role.TRAIN]]
    x_va, y_va = x[idx[Role.VALIDATION]], y[idx[Role.VALIDATION]]

    best_loss = np.inf
    best_weights = model.weights()
    epochs_done = 0
    for epoch in range(cfg.max_epochs):
        order = child_rng(cfg.seed, "epoch", epoch).permutation(len(x_tr))
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            xb, yb = x_tr[batch], y_tr[batch]
            epoch_loss += _cross_entropy(model.logits(xb), yb)
            n_batches += 1
            model.step(xb, yb, cfg.learning_rate, cfg.weight_decay)
        train_loss = epoch_loss / max(n_batches, 1)
        val_logits = model.logits(x_va)
        val_loss = _cross_entropy(val_logits, y_va)
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            trace.warnings.append(f"non-finite loss at epoch {epoch}; aborted")
            break
        epochs_done = epoch + 1
        trace.train_losses.append(train_loss)
        trace.val_losses.append(val_loss)
        trace.val_accuracies.append(
            float(np.mean(val_logits.argmax(axis=1) == y_va)))
        if val_loss < best_loss:
            best_loss = val_loss
            best_weights = model.weights()
            trace.best_epoch = epoch
        elif epoch - trace.best_epoch >= cfg.patience:
            break

    trace.final_weights = model.weights()
    model.set_weights(best_weights)
    trace.best_weights = best_weights

    metrics = SetMetrics(
        train=_accuracy(model, x[idx[Role.TRAIN]], y[idx[Role.TRAIN]]),
        validation=_accuracy(model, x_va, y_va),
        holdout=_accuracy(model, x[idx[Role.HOLDOUT]], y[idx[Role.HOLDOUT]]),
        test=_accuracy(model, x[idx[Role.TEST]], y[idx[Role.TEST]]),
    )
    record = CandidateRecord(
        dataset_id=dataset_id, run_id=run_id, repetition=repetition,
        architecture=arch, epochs_trained=epochs_done,
        max_epochs=cfg.max_epochs, metrics=metrics, seed=cfg.seed,
    )
    return record, trace


def default_grid(max_neurons: int = 20, activations=(Activation.RELU,
                                                     Activation.TANH,
                                                     Activation.SIGMOID)):
    return [Architecture(n, a) for n in range(1, max_neurons + 1)
            for a in activations]


def _train_unit(args):
    (features, labels, roles, arch_list, cfg_dict, master_seed, dataset_id,
     run_id, repetition) = args
    from .splitplan import SampleMask
    mask = SampleMask(role_of_sample=tuple(Role(r) for r in roles))
    out = []
    for arch in arch_list:
        seed = child_seed(master_seed, "train", dataset_id, run_id, repetition,
                          arch.neurons, arch.activation.value)
        cfg = TrainConfig(**{**cfg_dict, "seed": seed})
        record, _ = train_candidate(features, labels, mask, arch, cfg,
                                    dataset_id=dataset_id, run_id=run_id,
                                    repetition=repetition)
        out.append(record)
    return out


def generate_pool(features, labels, assignment, runs, grid, cfg: TrainConfig,
                  dataset_id: str = "dataset", jobs: int = 1) -> CandidatePool:
    """Train one record per (run, repetition, architecture).

    Repetition r early-stops on its round-robin validation fold. Units fan
    out across processes when jobs > 1; records merge sorted by key so
    parallel and serial sweeps emit identical pools.
    """
    if not grid:
        raise ValueError("architecture grid must be non-empty")
    cfg_dict = {"max_epochs": cfg.max_epochs, "patience": cfg.patience,
                "batch_size": cfg.batch_size, "learning_rate": cfg.learning_rate,
                "weight_decay": cfg.weight_decay}
    tasks = []
    for run in runs:
        for repetition in range(run.n_repetitions):
            mask = masks_for(assignment, run, repetition)
            roles = tuple(r.value for r in mask.role_of_sample)
            tasks.append((features, labels, roles, grid, cfg_dict, cfg.seed,
                          dataset_id, run.run_id, repetition))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_train_unit, tasks))
    else:
        chunks = [_train_unit(t) for t in tasks]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: r.key())
    return CandidatePool(records=records, provenance=Provenance.TRAINED)
