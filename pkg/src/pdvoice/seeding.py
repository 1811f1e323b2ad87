"""Deterministic named sub-streams derived from one root seed.

Every source of randomness in the package (split shuffle, weight init,
batch shuffling, dropout) pulls its own generator via ``substream(seed,
label)``. The derived seed is the first 8 bytes of sha256("<seed>:<label>"),
fed to a PCG64 generator, so streams are independent of each other and
stable across platforms and runs: adding one model never perturbs another
model's randomness.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream(root_seed: int, label: str) -> np.random.Generator:
    """Generator for the named purpose, e.g. substream(42, "init.mlp")."""
    digest = hashlib.sha256(f"{root_seed}:{label}".encode("utf-8")).digest()
    derived = int.from_bytes(digest[:8], "big")
    return np.random.Generator(np.random.PCG64(derived))
