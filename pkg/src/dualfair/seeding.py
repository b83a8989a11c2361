"""Deterministic seed derivation.

Every stochastic stage draws from a seed derived from a master seed plus a
stable string tag, so execution order and worker count can never change the
stream a stage sees.
"""

import hashlib

import numpy as np


def derive_seed(master_seed: int, *tags) -> int:
    """Derive a 64-bit child seed from a master seed and arbitrary tags.

    Tags are stringified, so world keys, repeat indices and stage names can
    all be mixed in. The same (master_seed, tags) always yields the same
    child seed, independent of platform hash randomization.
    """
    payload = ":".join([str(int(master_seed))] + [str(t) for t in tags])
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derived_rng(master_seed: int, *tags) -> np.random.Generator:
    """Generator seeded via derive_seed."""
    return np.random.default_rng(derive_seed(master_seed, *tags))
