"""Splittable seed derivation."""

from __future__ import annotations

import numpy as np


def derive_seed(master: int, *keys: int) -> int:
    """Derive a 32-bit sub-seed from a master seed and a key path.

    The key path (for example dataset index, purpose, step) becomes the
    SeedSequence spawn key, so the result depends only on the path and never
    on the order in which sub-seeds are requested.
    """
    sequence = np.random.SeedSequence(
        entropy=int(master) & 0xFFFFFFFFFFFFFFFF,
        spawn_key=tuple(int(key) for key in keys),
    )
    return int(sequence.generate_state(1, dtype=np.uint32)[0])

