"""Bitmask helpers shared by every module.

Component ``i`` (1-based, as users see it) lives at bit ``i - 1``.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np

MAX_N = 20


def check_n(n: int, cap: int = MAX_N) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"component count must be an integer, got {type(n).__name__}")
    n = int(n)
    if not 1 <= n <= cap:
        raise ValueError(f"component count must satisfy 1 <= n <= {cap}, got {n}")
    return n


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """Cardinality of every mask in ``range(2**n)`` (read-only)."""
    size = 1 << n
    out = np.zeros(size, dtype=np.int64)
    masks = np.arange(size, dtype=np.int64)
    for i in range(n):
        out += (masks >> i) & 1
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def level_masks(n: int) -> tuple[np.ndarray, ...]:
    """``level_masks(n)[j]`` lists the masks of cardinality ``j`` in ascending order."""
    pc = popcounts(n)
    levels = []
    for j in range(n + 1):
        idx = np.flatnonzero(pc == j)
        idx.setflags(write=False)
        levels.append(idx)
    assert all(len(lv) == comb(n, j) for j, lv in enumerate(levels))
    return tuple(levels)


@lru_cache(maxsize=None)
def cardinality_order(n: int) -> np.ndarray:
    """All masks of ``range(2**n)`` sorted by (popcount, value)."""
    out = np.concatenate(level_masks(n))
    out.setflags(write=False)
    return out


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_from_components(components, n: int) -> int:
    """1-based component labels to a bitmask, with range checks."""
    mask = 0
    for c in components:
        c = int(c)
        if not 1 <= c <= n:
            raise ValueError(f"component {c} outside 1..{n}")
        mask |= 1 << (c - 1)
    return mask


def components_of(mask: int) -> tuple[int, ...]:
    mask = int(mask)
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i + 1)
        mask >>= 1
        i += 1
    return tuple(out)


def bit_positions(mask: int) -> list[int]:
    return [c - 1 for c in components_of(mask)]


def expand_submasks(compressed: np.ndarray, support: int) -> np.ndarray:
    """Scatter compressed ``m``-bit masks onto the set bits of ``support`` (a pdep).

    Order and cardinality are preserved, which is what lets one sorted table
    of compressed masks serve every support set of the same size.
    """
    out = np.zeros(compressed.shape, dtype=np.int64)
    for j, pos in enumerate(bit_positions(support)):
        out |= ((compressed >> j) & 1) << pos
    return out
