"""Ground sets, set-function value oracles, and the shipped instance families.

Every objective is wrapped in a :class:`SetFunction`: a value oracle over
bitmask subsets with a declared (audited, not enforced) symmetry flag and a
thread-safe query counter.  Batch evaluation (``eval_many``) is the fast path
used by the exact multilinear tables and the brute-force oracles.
"""

from __future__ import annotations

import json
import threading
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .rng import substream
from .subsets import as_mask, full_mask, indices


@dataclass(frozen=True)
class GroundSet:
    """Elements are the indices 0..n-1; labels are display-only."""

    n: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("ground set size must be non-negative")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels length must equal n")


class _Counter:
    """Thread-safe monotone counter (oracle calls may come from workers)."""

    def __init__(self):
        self._value = 0
        self._lock = threading.Lock()

    def add(self, k: int) -> None:
        with self._lock:
            self._value += k

    @property
    def value(self) -> int:
        return self._value


class SetFunction:
    """Value oracle f: 2^N -> R with a symmetry claim and a query counter.

    ``eval_mask`` maps a bitmask to a float; an optional vectorized
    ``eval_many_masks`` (int64 array -> float array) accelerates batch
    queries.  The counter increases by exactly one per evaluated set.
    """

    def __init__(
        self,
        n: int,
        eval_mask: Callable[[int], float],
        *,
        symmetric: bool = False,
        eval_many_masks: Callable[[np.ndarray], np.ndarray] | None = None,
        kind: str = "custom",
        source=None,
    ):
        self.n = int(n)
        self._eval_mask = eval_mask
        self.symmetric = bool(symmetric)
        self._eval_many = eval_many_masks
        self.kind = kind
        self.source = source
        self._queries = _Counter()

    @property
    def query_count(self) -> int:
        return self._queries.value

    @property
    def ground_set(self) -> GroundSet:
        return GroundSet(self.n)

    def eval(self, subset: int | Iterable[int]) -> float:
        """Oracle value of one subset (bitmask or iterable of indices)."""
        mask = as_mask(subset, self.n)
        self._queries.add(1)
        return float(self._eval_mask(mask))

    def eval_many(self, masks: np.ndarray) -> np.ndarray:
        """Oracle values of a batch of bitmasks; counts one query per mask."""
        masks = np.asarray(masks, dtype=np.int64)
        self._queries.add(int(masks.size))
        if self._eval_many is not None:
            return np.asarray(self._eval_many(masks), dtype=float)
        return np.array([self._eval_mask(int(m)) for m in masks.ravel()], dtype=float).reshape(masks.shape)

    def __call__(self, subset: int | Iterable[int]) -> float:
        return self.eval(subset)


# ---------------------------------------------------------------------------
# instance families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphCutInstance:
    """Weighted undirected graph; f(S) = total weight of edges crossing S."""

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        for u, v, w in self.edges:
            if u == v:
                raise ValueError("self-loops are not allowed")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError("edge endpoint out of range")
            if w < 0:
                raise ValueError("edge weights must be non-negative")


def cut_eval(instance: GraphCutInstance, subset: int | Iterable[int]) -> float:
    """Total weight of edges with exactly one endpoint in the subset."""
    mask = as_mask(subset, instance.n)
    total = 0.0
    for u, v, w in instance.edges:
        if ((mask >> u) ^ (mask >> v)) & 1:
            total += w
    return total


def graph_cut_function(instance: GraphCutInstance) -> SetFunction:
    eu = np.array([e[0] for e in instance.edges], dtype=np.int64)
    ev = np.array([e[1] for e in instance.edges], dtype=np.int64)
    ew = np.array([e[2] for e in instance.edges], dtype=float)

    def many(masks: np.ndarray) -> np.ndarray:
        if eu.size == 0:
            return np.zeros(masks.shape, dtype=float)
        crossing = ((masks[..., None] >> eu) ^ (masks[..., None] >> ev)) & 1
        return crossing @ ew

    return SetFunction(
        instance.n,
        lambda m: cut_eval(instance, m),
        symmetric=True,
        eval_many_masks=many,
        kind="graph_cut",
        source=instance,
    )


@dataclass(frozen=True)
class HypergraphCutInstance:
    """f(S) = total weight of hyperedges with a vertex on each side of (S, N\\S)."""

    n: int
    hyperedges: tuple[tuple[frozenset[int], float], ...]

    def __post_init__(self):
        for verts, w in self.hyperedges:
            if len(verts) < 2:
                raise ValueError("hyperedges need at least 2 distinct vertices")
            if any(not 0 <= v < self.n for v in verts):
                raise ValueError("hyperedge vertex out of range")
            if w < 0:
                raise ValueError("hyperedge weights must be non-negative")


def hypergraph_cut_function(instance: HypergraphCutInstance) -> SetFunction:
    he_masks = np.array(
        [as_mask(sorted(verts), instance.n) for verts, _ in instance.hyperedges], dtype=np.int64
    )
    he_w = np.array([w for _, w in instance.hyperedges], dtype=float)

    def one(mask: int) -> float:
        total = 0.0
        for hm, w in zip(he_masks, he_w):
            inter = mask & int(hm)
            if inter != 0 and inter != int(hm):
                total += w
        return total

    def many(masks: np.ndarray) -> np.ndarray:
        if he_masks.size == 0:
            return np.zeros(masks.shape, dtype=float)
        inter = masks[..., None] & he_masks
        cut = (inter != 0) & (inter != he_masks)
        return cut @ he_w

    return SetFunction(
        instance.n, one, symmetric=True, eval_many_masks=many, kind="hypergraph_cut", source=instance
    )


@dataclass(frozen=True)
class CoverageInstance:
    """Weighted coverage: f(S) = weight of universe items covered by the sets in S.

    ``membership[i]`` lists the universe items covered by ground element i.
    Monotone submodular and (generically) non-symmetric.
    """

    n: int
    universe_weights: tuple[float, ...]
    membership: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.membership) != self.n:
            raise ValueError("membership must list covered items for each of the n sets")
        m = len(self.universe_weights)
        if any(w < 0 for w in self.universe_weights):
            raise ValueError("universe weights must be non-negative")
        for covered in self.membership:
            if any(not 0 <= j < m for j in covered):
                raise ValueError("universe item index out of range")


def coverage_function(instance: CoverageInstance) -> SetFunction:
    m = len(instance.universe_weights)
    # coverers[j] = bitmask of ground elements covering universe item j
    coverers = np.zeros(m, dtype=np.int64)
    for i, covered in enumerate(instance.membership):
        for j in covered:
            coverers[j] |= np.int64(1 << i)
    weights = np.asarray(instance.universe_weights, dtype=float)

    def one(mask: int) -> float:
        return float(weights[(mask & coverers) != 0].sum())

    def many(masks: np.ndarray) -> np.ndarray:
        if m == 0:
            return np.zeros(masks.shape, dtype=float)
        covered = (masks[..., None] & coverers) != 0
        return covered @ weights

    return SetFunction(instance.n, one, symmetric=False, eval_many_masks=many, kind="coverage", source=instance)


def hardness_instance(p: int, q: int) -> SetFunction:
    """Symmetry-gap fixture on 2q elements: value 1 iff exactly one of the two
    cut endpoints (elements 0 and 2q-1) is in the set.

    The parameter p < q fixes the target cardinality 2p of a unit-value set.
    """
    p, q = int(p), int(q)
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    if p >= q:
        raise ValueError("requires p < q")
    n = 2 * q
    inst = GraphCutInstance(n=n, edges=((0, n - 1, 1.0),))
    f = graph_cut_function(inst)
    f.kind = "hardness"
    f.source = {"p": p, "q": q, "instance": inst}
    return f


def modular_function(n: int, coeffs) -> SetFunction:
    """Additive f(S) = sum of coeffs over S (plumbing for offset instances)."""
    c = np.asarray(coeffs, dtype=float)
    if c.shape != (n,):
        raise ValueError("coeffs must have length n")

    def many(masks: np.ndarray) -> np.ndarray:
        bits = (masks[..., None] >> np.arange(n, dtype=np.int64)) & 1
        return bits @ c

    return SetFunction(
        n,
        lambda m: float(sum(c[u] for u in indices(m))),
        symmetric=False,
        eval_many_masks=many,
        kind="modular",
    )


def sum_functions(fs: list[SetFunction], *, symmetric: bool = False, kind: str = "sum") -> SetFunction:
    """Pointwise sum of oracles; submodularity is closed under addition."""
    n = fs[0].n
    if any(g.n != n for g in fs):
        raise ValueError("summands must share a ground set")

    def many(masks: np.ndarray) -> np.ndarray:
        out = fs[0].eval_many(masks)
        for g in fs[1:]:
            out = out + g.eval_many(masks)
        return out

    return SetFunction(
        n,
        lambda m: sum(g.eval(m) for g in fs),
        symmetric=symmetric,
        eval_many_masks=many,
        kind=kind,
    )


# ---------------------------------------------------------------------------
# wrappers
# ---------------------------------------------------------------------------


def complement_function(f: SetFunction) -> SetFunction:
    """Oracle for S -> f(N \\ S); preserves submodularity and the symmetry flag."""
    fm = full_mask(f.n)

    return SetFunction(
        f.n,
        lambda m: f.eval(fm ^ m),
        symmetric=f.symmetric,
        eval_many_masks=lambda masks: f.eval_many(np.bitwise_xor(masks, np.int64(fm))),
        kind=f"complement({f.kind})",
        source=f,
    )


def restrict_function(f: SetFunction, kept: list[int], *, audit_symmetry_limit: int = 12) -> SetFunction:
    """Restriction of f to a sub-ground-set (subsets embed into the original N).

    Restriction preserves submodularity but generally breaks symmetry, so the
    flag is re-audited exhaustively when the restricted ground set is small
    enough, and dropped otherwise.
    """
    kept = [int(u) for u in kept]
    n_new = len(kept)
    kept_arr = np.array(kept, dtype=np.int64)

    def embed_one(mask: int) -> int:
        out = 0
        for i, u in enumerate(kept):
            if (mask >> i) & 1:
                out |= 1 << u
        return out

    def many(masks: np.ndarray) -> np.ndarray:
        out = np.zeros(masks.shape, dtype=np.int64)
        for i, u in enumerate(kept_arr):
            out |= ((masks >> np.int64(i)) & 1) << u
        return f.eval_many(out)

    g = SetFunction(
        n_new,
        lambda m: f.eval(embed_one(m)),
        symmetric=False,
        eval_many_masks=many,
        kind=f"restrict({f.kind})",
        source=f,
    )
    if n_new == f.n:
        g.symmetric = f.symmetric
    elif f.symmetric and 1 <= n_new <= audit_symmetry_limit:
        g.symmetric = audit_symmetry(g)
    return g


# ---------------------------------------------------------------------------
# audits
# ---------------------------------------------------------------------------


def _value_table(f: SetFunction) -> np.ndarray:
    return f.eval_many(np.arange(1 << f.n, dtype=np.int64))


def audit_submodularity(
    f: SetFunction,
    gs: GroundSet | None = None,
    *,
    exhaustive_limit: int = 14,
    trials: int = 2000,
    seed: int = 0,
    tol: float = 1e-9,
) -> bool:
    """True iff f(A) + f(B) >= f(A|B) + f(A&B) on all audited pairs.

    At n <= exhaustive_limit this checks the equivalent diminishing-returns
    condition f(S+u) + f(S+v) >= f(S+u+v) + f(S) for every S and pair u != v,
    which implies the inequality for all (A, B).  Larger n samples random
    (A, B) pairs.
    """
    n = gs.n if gs is not None else f.n
    if n <= exhaustive_limit:
        table = _value_table(f)
        all_masks = np.arange(1 << n, dtype=np.int64)
        for u, v in combinations(range(n), 2):
            bu, bv = 1 << u, 1 << v
            base = all_masks[(all_masks & (bu | bv)) == 0]
            lhs = table[base | bu] + table[base | bv]
            rhs = table[base | bu | bv] + table[base]
            if (lhs + tol < rhs).any():
                return False
        return True
    rng = substream(seed, 0xA0D17)
    for _ in range(trials):
        a = int(rng.integers(0, 1 << n))
        b = int(rng.integers(0, 1 << n))
        if f.eval(a) + f.eval(b) + tol < f.eval(a | b) + f.eval(a & b):
            return False
    return True


def audit_symmetry(
    f: SetFunction,
    gs: GroundSet | None = None,
    *,
    exhaustive_limit: int = 14,
    trials: int = 2000,
    seed: int = 0,
    tol: float = 0.0,
) -> bool:
    """True iff f(S) = f(N\\S) on all audited sets (exact by default)."""
    n = gs.n if gs is not None else f.n
    fm = full_mask(n)
    if n <= exhaustive_limit:
        table = _value_table(f)
        comp = table[np.bitwise_xor(np.arange(1 << n, dtype=np.int64), np.int64(fm))]
        return bool(np.max(np.abs(table - comp)) <= tol)
    rng = substream(seed, 0x5D33)
    for _ in range(trials):
        m = int(rng.integers(0, 1 << n))
        if abs(f.eval(m) - f.eval(fm ^ m)) > tol:
            return False
    return True


def audit_nonnegativity(
    f: SetFunction,
    gs: GroundSet | None = None,
    *,
    exhaustive_limit: int = 14,
    trials: int = 2000,
    seed: int = 0,
    tol: float = 1e-9,
) -> bool:
    n = gs.n if gs is not None else f.n
    if n <= exhaustive_limit:
        return bool(_value_table(f).min() >= -tol)
    rng = substream(seed, 0x2B3F)
    return all(f.eval(int(rng.integers(0, 1 << n))) >= -tol for _ in range(trials))


# ---------------------------------------------------------------------------
# JSON instance files
# ---------------------------------------------------------------------------

_SCHEMAS = {
    "graph_cut": {"type", "n", "edges"},
    "hypergraph_cut": {"type", "n", "hyperedges"},
    "coverage": {"type", "n", "universe_weights", "membership"},
    "hardness": {"type", "p", "q"},
}


def _check_fields(obj: dict, expected: set[str]) -> None:
    got = set(obj.keys())
    if got != expected:
        missing = expected - got
        unknown = got - expected
        parts = []
        if missing:
            parts.append(f"missing fields {sorted(missing)}")
        if unknown:
            parts.append(f"unknown fields {sorted(unknown)}")
        raise ValueError(f"bad instance object: {'; '.join(parts)}")


def set_function_from_json(obj: dict) -> SetFunction:
    """Build a SetFunction from a parsed instance object (strict field names)."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError("instance object must be a dict with a 'type' field")
    kind = obj["type"]
    if kind not in _SCHEMAS:
        raise ValueError(f"unknown instance type {kind!r}")
    _check_fields(obj, _SCHEMAS[kind])
    if kind == "graph_cut":
        edges = tuple((int(u), int(v), float(w)) for u, v, w in obj["edges"])
        return graph_cut_function(GraphCutInstance(n=int(obj["n"]), edges=edges))
    if kind == "hypergraph_cut":
        hes = tuple((frozenset(int(v) for v in verts), float(w)) for verts, w in obj["hyperedges"])
        return hypergraph_cut_function(HypergraphCutInstance(n=int(obj["n"]), hyperedges=hes))
    if kind == "coverage":
        inst = CoverageInstance(
            n=int(obj["n"]),
            universe_weights=tuple(float(w) for w in obj["universe_weights"]),
            membership=tuple(tuple(int(j) for j in row) for row in obj["membership"]),
        )
        return coverage_function(inst)
    return hardness_instance(int(obj["p"]), int(obj["q"]))


def load_set_function(path: str) -> SetFunction:
    with open(path) as fh:
        return set_function_from_json(json.load(fh))
