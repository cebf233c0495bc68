"""Bitmask helpers for subsets of a ground set {0, ..., n-1}.

Subsets travel through the toolkit as Python int bitmasks (bit u set means
element u is in the set); every oracle also accepts an iterable of indices.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

SubsetLike = "int | Iterable[int]"

_POP_CHUNK = 11
_POP_LUT = np.array([bin(i).count("1") for i in range(1 << _POP_CHUNK)], dtype=np.int64)


def as_mask(subset: int | Iterable[int], n: int) -> int:
    """Normalize a subset (bitmask or iterable of element indices) to a bitmask."""
    if isinstance(subset, (int, np.integer)):
        mask = int(subset)
        if mask < 0 or mask >> n:
            raise ValueError(f"mask {mask} out of range for ground set of size {n}")
        return mask
    mask = 0
    for u in subset:
        u = int(u)
        if not 0 <= u < n:
            raise ValueError(f"element {u} out of range for ground set of size {n}")
        mask |= 1 << u
    return mask


def indices(mask: int) -> list[int]:
    """Sorted element indices of a bitmask."""
    out = []
    u = 0
    while mask:
        if mask & 1:
            out.append(u)
        mask >>= 1
        u += 1
    return out


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount_array(masks: np.ndarray) -> np.ndarray:
    """Vectorized popcount; valid for masks below 2**44."""
    m = np.asarray(masks, dtype=np.int64)
    return (
        _POP_LUT[m & 2047]
        + _POP_LUT[(m >> 11) & 2047]
        + _POP_LUT[(m >> 22) & 2047]
        + _POP_LUT[(m >> 33) & 2047]
    )


def masks_from_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a boolean (rows, n) matrix into int64 bitmasks, bit u = column u."""
    n = bits.shape[-1]
    if n > 62:
        raise ValueError("vectorized masks support at most 62 elements")
    powers = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
    return bits.astype(np.int64) @ powers
