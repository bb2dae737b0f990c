"""Deterministic child-seed derivation from a master seed."""

from __future__ import annotations

import hashlib

import numpy as np


def child_seed(master_seed: int, *parts) -> int:
    """Derive a 64-bit seed from (master_seed, component name, indices).

    Stable across processes and platforms so parallel and serial sweeps use
    identical randomness.
    """
    payload = repr((int(master_seed),) + tuple(parts)).encode()
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "little")


def child_rng(master_seed: int, *parts) -> np.random.Generator:
    return np.random.default_rng(child_seed(master_seed, *parts))
