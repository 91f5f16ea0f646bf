# The MIT License (MIT)
# Copyright © 2025 <kisa134>

import zlib
from typing import Union

import numpy as np

Key = Union[int, str]


def _key_to_int(key: Key) -> int:
    if isinstance(key, str):
        # crc32 is stable across interpreter runs, unlike hash()
        return zlib.crc32(key.encode("utf-8"))
    if key < 0:
        raise ValueError(f"seed keys must be non-negative, got {key}")
    return int(key)


def derive_seed(master: int, *keys: Key) -> int:
    """
    Derives an independent 64-bit seed from a master seed and a key path,
    e.g. ``derive_seed(seed, "tree", 7)``. Equal inputs always give equal
    seeds, so work can be spread over processes without changing results.
    """
    sequence = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(_key_to_int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(master: int, *keys: Key) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *keys))
