"""Small shared helpers: seeded RNG plumbing and exact integer row packing."""

from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.SeedSequence | np.random.Generator"


def make_rng(seed) -> np.random.Generator:
    """Build a Generator from an int seed, a SeedSequence, or pass one through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def child_seed(seed, i: int) -> np.random.SeedSequence:
    """The i-th child SeedSequence, derived statelessly.

    Unlike SeedSequence.spawn this never advances a counter, so deriving
    child i twice gives the same stream; repeated estimator calls with one
    seed are bit-identical.
    """
    if isinstance(seed, np.random.Generator):
        raise TypeError("cannot derive children from a live Generator; pass a seed")
    if isinstance(seed, np.random.SeedSequence):
        seq = seed
    else:
        seq = np.random.SeedSequence(seed)
    return np.random.SeedSequence(seq.entropy, spawn_key=tuple(seq.spawn_key) + (int(i),))


def spawn_seeds(seed, n: int) -> list:
    """Derive n independent child SeedSequences deterministically."""
    return [child_seed(seed, i) for i in range(n)]


def pack_rows(arr: np.ndarray):
    """Injectively encode integer rows as int64 scalars, or None on overflow.

    Packing is exact (mixed-radix over per-column ranges), so equality of
    codes is equality of rows.
    """
    arr = np.asarray(arr, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        return None
    mins = arr.min(axis=0)
    shifted = arr - mins
    ranges = shifted.max(axis=0).astype(object) + 1
    total = 1
    for r in ranges:
        total *= int(r)
    if total >= 2**62:
        return None
    strides = np.empty(arr.shape[1], dtype=np.int64)
    acc = 1
    for col in range(arr.shape[1] - 1, -1, -1):
        strides[col] = acc
        acc *= int(ranges[col])
    return shifted @ strides


def count_distinct_rows(arr: np.ndarray) -> int:
    codes = pack_rows(arr)
    if codes is None:
        return np.unique(np.asarray(arr, dtype=np.int64), axis=0).shape[0]
    return int(np.unique(codes).size)
