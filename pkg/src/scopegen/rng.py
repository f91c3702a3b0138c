"""Deterministic random-stream derivation.

Every sampled quantity draws from its own counter-based stream keyed by
(master seed, sample index, feature instance id, property name). Streams
are mutually independent, so adding a property or reordering declarations
never perturbs values drawn elsewhere, and any sample can be regenerated
in isolation (the basis of worker-count-independent datasets).
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def stable_hash(text: str) -> int:
    """64-bit hash of a string, stable across processes and platforms."""
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_generator(
    master_seed: int,
    sample_index: int,
    feature_instance_id: str,
    property_name: str,
) -> np.random.Generator:
    """Independent generator for one property of one feature instance."""
    entropy = (
        master_seed & _MASK64,
        sample_index & _MASK64,
        stable_hash(feature_instance_id),
        stable_hash(property_name),
    )
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
