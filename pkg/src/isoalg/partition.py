"""Labelled partitions of V^k: refinement order, invariance, characters.

A labelled partition is a color array indexed by tuple rank.  All order
comparisons are on the induced equivalence relations; labels only matter
for reporting.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from .graphcore import TupleIndex, check_index_tuple


def _dense_first_occurrence(raw: np.ndarray):
    """Remap values to 0..m-1 in order of first occurrence.

    Returns (dense array, list mapping new id -> original value).
    """
    uniq, first, inverse = np.unique(raw, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    new_of_old = np.empty(len(uniq), dtype=np.int64)
    new_of_old[order] = np.arange(len(uniq))
    return new_of_old[inverse], [uniq[i] for i in order]


@dataclass
class LabelledPartition:
    k: int
    n: int
    colors: np.ndarray          # length n^k, values 0..m-1, every value used
    labels: list | None = None  # optional human-readable label per color

    def __post_init__(self):
        self.colors = np.asarray(self.colors, dtype=np.int64)
        if self.k < 1:
            raise ValueError("width must be >= 1")
        if self.colors.shape != (self.n ** self.k,):
            raise ValueError("color array length does not match n^k")
        m = self.num_colors
        present = np.unique(self.colors)
        if self.colors.size and (present[0] != 0 or present[-1] != m - 1
                                 or len(present) != m):
            raise ValueError("colors must be exactly 0..m-1, each occurring")
        if self.labels is not None and len(self.labels) != m:
            raise ValueError("label count does not match color count")

    @property
    def num_colors(self) -> int:
        return int(self.colors.max()) + 1 if self.colors.size else 0

    @classmethod
    def from_raw(cls, k: int, n: int, raw, labels_of=None):
        """Build from an arbitrary value array; colors assigned densely in
        first-occurrence (tuple-rank) order."""
        dense, originals = _dense_first_occurrence(np.asarray(raw))
        labels = [labels_of(v) for v in originals] if labels_of else None
        return cls(k, n, dense, labels)

    def relabelled(self):
        return LabelledPartition.from_raw(self.k, self.n, self.colors)

    def classes(self):
        """List of arrays of tuple ranks, one per color."""
        order = np.argsort(self.colors, kind="stable")
        bounds = np.searchsorted(self.colors[order], np.arange(self.num_colors))
        return np.split(order, bounds[1:])


def compare_partitions(first: LabelledPartition, second: LabelledPartition) -> str:
    """Order of the induced equivalence relations, label-blind.

    Returns one of "equal", "first_refines_second", "second_refines_first",
    "incomparable".
    """
    if (first.n, first.k) != (second.n, second.k):
        raise ValueError("partitions have different shapes")
    joint = len(np.unique(np.stack([first.colors, second.colors]), axis=1)[0])
    down = joint == first.num_colors   # each first-class inside one second-class
    up = joint == second.num_colors
    if down and up:
        return "equal"
    if down:
        return "first_refines_second"
    if up:
        return "second_refines_first"
    return "incomparable"


def refines(first: LabelledPartition, second: LabelledPartition) -> bool:
    return compare_partitions(first, second) in ("equal", "first_refines_second")


# ---------------------------------------------------------------------------
# invariance and the graph-like property


def _permuted_colors(gamma: LabelledPartition, pi):
    """Color array v -> gamma(v^pi), where (v^pi)_i = v_{pi^-1(i)} (0-based pi)."""
    tindex = TupleIndex(gamma.n, gamma.k)
    d = tindex.digits()
    inv = [0] * gamma.k
    for i, p in enumerate(pi):
        inv[p] = i
    ranks = d[:, inv] @ tindex.weights
    return gamma.colors[ranks]


def is_invariant(gamma: LabelledPartition) -> bool:
    """Closed under coordinate permutations: gamma(u)=gamma(v) implies
    gamma(u^pi)=gamma(v^pi).  Exhaustive over Sym(k); fine for k <= 4."""
    for pi in itertools.permutations(range(gamma.k)):
        moved = _permuted_colors(gamma, pi)
        joint = len(np.unique(np.stack([gamma.colors, moved]), axis=1)[0])
        if joint != gamma.num_colors:
            return False
    return True


def equality_type_partition(n: int, k: int) -> LabelledPartition:
    """Tuples grouped by which positions coincide."""
    tindex = TupleIndex(n, k)
    d = tindex.digits()
    bits = [(d[:, a] == d[:, b]).astype(np.int64)
            for a in range(k) for b in range(a + 1, k)]
    if not bits:
        return LabelledPartition(k, n, np.zeros(tindex.size, dtype=np.int64))
    key = np.stack(bits, axis=1) @ (1 << np.arange(len(bits), dtype=np.int64))
    return LabelledPartition.from_raw(k, n, key)


def is_graph_like(gamma: LabelledPartition) -> bool:
    return is_invariant(gamma) and refines(
        gamma, equality_type_partition(gamma.n, gamma.k))


# ---------------------------------------------------------------------------
# character vectors


@dataclass
class CharacterVector:
    """The family of 0/1 matrices recording, for index tuple i and anchor v,
    which color each 2r-substitution v<i, x.y> lands in.

    Stored compactly as an N x N grid of color ids (N = n^r); the per-color
    indicator matrix chi_sigma is grid == sigma.  The partition-of-ones
    identity (each cell has exactly one color) is asserted on construction.
    """

    index_tuple: tuple
    anchor: tuple
    r: int
    grid: np.ndarray
    num_source_colors: int

    def __post_init__(self):
        nr = self.grid.shape[0]
        if self.grid.shape != (nr, nr):
            raise ValueError("character grid must be square")
        if self.grid.size and not (
                (self.grid >= 0) & (self.grid < self.num_source_colors)).all():
            raise ValueError("character grid contains an unknown color")
        # sum over sigma of chi_sigma = all-ones: each cell has one color
        total = np.zeros_like(self.grid)
        for sigma in self.color_ids:
            total = total + (self.grid == sigma)
        assert (total == 1).all(), "character matrices do not partition J"

    @property
    def color_ids(self):
        return [int(s) for s in np.unique(self.grid)]

    def matrix(self, sigma) -> np.ndarray:
        return (self.grid == sigma).astype(np.int64)


def character_vector(gamma: LabelledPartition, i, v) -> CharacterVector:
    """(i, v)-character vector of gamma; i in [k]^(2r) with distinct
    1-based entries, v in V^k.  Caller guarantees gamma is invariant."""
    i = check_index_tuple(i, gamma.k)
    if len(i) % 2 != 0 or not i:
        raise ValueError("index tuple length must be a positive even number")
    if len(v) != gamma.k:
        raise ValueError("anchor tuple width does not match the partition")
    r = len(i) // 2
    n = gamma.n
    tindex = TupleIndex(n, gamma.k)
    w = tindex.weights
    base = tindex.rank(v) - sum(int(v[p - 1]) * int(w[p - 1]) for p in i)
    sub = TupleIndex(n, 2 * r)
    pos_w = np.array([w[p - 1] for p in i], dtype=np.int64)
    ranks = base + sub.digits() @ pos_w
    grid = gamma.colors[ranks].reshape(n ** r, n ** r)
    return CharacterVector(tuple(i), tuple(v), r, grid, gamma.num_colors)


# ---------------------------------------------------------------------------
# invariant coarsening (for monotonicity tests)


def merge_colors_invariant(gamma: LabelledPartition, c1: int, c2: int) -> LabelledPartition:
    """Coarsen gamma by merging colors c1, c2, closed under the Sym(k)
    action so the result is again invariant."""
    k, m = gamma.k, gamma.num_colors
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
            return True
        return False

    # color action maps: sigma -> color of any pi-image of a sigma-tuple
    maps = []
    uniq, first = np.unique(gamma.colors, return_index=True)
    reps = np.zeros(m, dtype=np.int64)
    reps[uniq] = first
    for pi in itertools.permutations(range(k)):
        moved = _permuted_colors(gamma, pi)
        maps.append(moved[reps])
    union(c1, c2)
    changed = True
    while changed:
        changed = False
        for act in maps:
            for a in range(m):
                for b in range(a + 1, m):
                    if find(a) == find(b) and union(int(act[a]), int(act[b])):
                        changed = True
    merged = np.array([find(c) for c in range(m)], dtype=np.int64)
    return LabelledPartition.from_raw(k, gamma.n, merged[gamma.colors])


# ---------------------------------------------------------------------------
# JSON I/O


def partition_doc(p: LabelledPartition, vertex_names) -> dict:
    tindex = TupleIndex(p.n, p.k)
    classes = []
    for ranks in p.classes():
        classes.append([[vertex_names[x] for x in tindex.unrank(int(r))]
                        for r in sorted(int(r) for r in ranks)])
    classes.sort(key=lambda cls: cls[0])
    return {"k": p.k, "classes": classes}


def save_partition(p: LabelledPartition, vertex_names) -> str:
    return json.dumps(partition_doc(p, vertex_names), indent=2)


def load_partition(text: str, vertex_names) -> LabelledPartition:
    doc = json.loads(text)
    if not isinstance(doc, dict) or "k" not in doc or "classes" not in doc:
        raise ValueError("partition JSON must carry 'k' and 'classes'")
    k = int(doc["k"])
    n = len(vertex_names)
    vid = {name: i for i, name in enumerate(vertex_names)}
    tindex = TupleIndex(n, k)
    colors = np.full(tindex.size, -1, dtype=np.int64)
    for cid, cls in enumerate(doc["classes"]):
        for tup in cls:
            if len(tup) != k:
                raise ValueError(f"tuple {tup!r} does not have width {k}")
            try:
                rank = tindex.rank([vid[name] for name in tup])
            except KeyError as e:
                raise ValueError(f"unknown vertex {e.args[0]!r}") from None
            if colors[rank] != -1:
                raise ValueError(f"tuple {tup!r} listed twice")
            colors[rank] = cid
    if (colors == -1).any():
        raise ValueError("classes do not cover V^k")
    return LabelledPartition.from_raw(k, n, colors)
