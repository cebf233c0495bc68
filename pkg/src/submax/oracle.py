"""Brute-force exact solvers: the ground truth behind every approximation-ratio
test.  All of them enumerate bitmasks vectorized in one batch (n <= 22) and
break value ties toward the lexicographically smallest mask.
"""

from __future__ import annotations

import numpy as np

from .polytope import CardinalityPolytope, KnapsackPolytope, PartitionPolytope, Polytope
from .setfn import SetFunction
from .subsets import popcount_array

MAX_BRUTE_N = 22


def _check_size(n: int) -> None:
    if n > MAX_BRUTE_N:
        raise ValueError(f"brute force limited to n <= {MAX_BRUTE_N}, got {n}")
    if n < 0:
        raise ValueError("n must be non-negative")


def _argmax_lowest(masks: np.ndarray, values: np.ndarray) -> tuple[int, float]:
    # np.argmax returns the first maximizer; masks are ascending, so the tie
    # goes to the smallest bitmask.
    i = int(np.argmax(values))
    return int(masks[i]), float(values[i])


def brute_unconstrained(f: SetFunction, n: int | None = None) -> tuple[int, float]:
    """argmax of f over all 2^n subsets."""
    n = f.n if n is None else int(n)
    _check_size(n)
    masks = np.arange(1 << n, dtype=np.int64)
    return _argmax_lowest(masks, f.eval_many(masks))


def brute_cardinality(f: SetFunction, n: int | None, k: int, mode: str = "eq") -> tuple[int, float]:
    """argmax of f over subsets with |S| = k ("eq") or |S| <= k ("le")."""
    if mode not in ("eq", "le"):
        raise ValueError("mode must be 'eq' or 'le'")
    n = f.n if n is None else int(n)
    _check_size(n)
    if not 0 <= k <= n:
        raise ValueError("requires 0 <= k <= n")
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = popcount_array(masks)
    keep = masks[sizes == k] if mode == "eq" else masks[sizes <= k]
    return _argmax_lowest(keep, f.eval_many(keep))


def _integral_members(P: Polytope, masks: np.ndarray, n: int) -> np.ndarray:
    if isinstance(P, CardinalityPolytope):
        return popcount_array(masks) <= P.k
    if isinstance(P, PartitionPolytope):
        ok = np.ones(masks.size, dtype=bool)
        for part, b in zip(P.parts, P.bounds):
            part_mask = np.int64(sum(1 << u for u in part))
            ok &= popcount_array(masks & part_mask) <= b
        return ok
    if isinstance(P, KnapsackPolytope):
        load = np.zeros(masks.size)
        for u in range(n):
            load += P.a[u] * ((masks >> np.int64(u)) & 1)
        return load <= P.b + 1e-9
    # generic fallback through the membership oracle
    out = np.empty(masks.size, dtype=bool)
    for i, m in enumerate(masks):
        x = np.array([(int(m) >> u) & 1 for u in range(n)], dtype=float)
        out[i] = P.membership(x)
    return out


def brute_polytope_integral(f: SetFunction, P: Polytope, n: int | None = None) -> tuple[int, float]:
    """argmax of f over the integral points of P, i.e. {S : 1_S in P}."""
    n = f.n if n is None else int(n)
    _check_size(n)
    masks = np.arange(1 << n, dtype=np.int64)
    keep = masks[_integral_members(P, masks, n)]
    return _argmax_lowest(keep, f.eval_many(keep))
