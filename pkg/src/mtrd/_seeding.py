"""Deterministic seed derivation.

All randomness in the package flows from one master seed through a named
splitting scheme, so parallel/sequential execution order never changes
results.
"""

import hashlib

import numpy as np


def _as_entropy(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFFFFFFFFFF
    if isinstance(part, str):
        digest = hashlib.sha256(part.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"seed parts must be int or str, got {type(part)!r}")


def child_seed(*parts) -> np.random.SeedSequence:
    """Derive a SeedSequence from (master seed, labels/indices...)."""
    return np.random.SeedSequence([_as_entropy(p) for p in parts])


def child_rng(*parts) -> np.random.Generator:
    """Generator seeded from a named split of the master seed."""
    return np.random.default_rng(child_seed(*parts))
