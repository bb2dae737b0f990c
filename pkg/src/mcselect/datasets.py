"""Small built-in classification tasks plus CSV dataset ingestion."""

from __future__ import annotations

import csv

import numpy as np

from .seeding import child_rng


def two_moons(n: int, seed: int, noise: float = 0.1, label_flip: float = 0.0):
    """Two interleaving half-circles, n samples total."""
    rng = child_rng(seed, "two_moons")
    n0 = n // 2
    n1 = n - n0
    t0 = rng.uniform(0, np.pi, n0)
    t1 = rng.uniform(0, np.pi, n1)
    x0 = np.column_stack([np.cos(t0), np.sin(t0)])
    x1 = np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)])
    x = np.vstack([x0, x1]) + rng.normal(scale=noise, size=(n, 2))
    y = np.concatenate([np.zeros(n0, dtype=int), np.ones(n1, dtype=int)])
    perm = rng.permutation(n)
    return _maybe_flip(x[perm], y[perm], 2, label_flip, rng)


def gaussian_blobs(n: int, seed: int, n_classes: int = 4, spread: float = 1.0,
                   label_flip: float = 0.0):
    """Isotropic Gaussian clusters on a circle, one per class."""
    rng = child_rng(seed, "blobs")
    angles = 2 * np.pi * np.arange(n_classes) / n_classes
    centers = 3.0 * np.column_stack([np.cos(angles), np.sin(angles)])
    y = rng.integers(n_classes, size=n)
    x = centers[y] + rng.normal(scale=spread, size=(n, 2))
    return _maybe_flip(x, y, n_classes, label_flip, rng)


def _maybe_flip(x, y, n_classes, label_flip, rng):
    if label_flip > 0.0:
        flip = rng.random(len(y)) < label_flip
        shift = rng.integers(1, n_classes, size=int(flip.sum()))
        y = y.copy()
        y[flip] = (y[flip] + shift) % n_classes
    return x, y


BUILTIN_DATASETS = {"two_moons": two_moons, "blobs": gaussian_blobs}


def load_csv_dataset(path):
    """Feature columns followed by one integer label column; optional header."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                continue  # header line
    if not rows:
        raise ValueError(f"no numeric rows in {path}")
    data = np.array(rows)
    x = data[:, :-1]
    y = data[:, -1].astype(int)
    return x, y
