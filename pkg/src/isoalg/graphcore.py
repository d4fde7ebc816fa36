"""Edge-colored complete digraphs, the tuple calculus, and brute-force oracles.

A graph is a complete coloring of V x V: every ordered pair carries a color,
loops (the diagonal) use a disjoint color set from off-diagonal pairs.  This
is the model every refinement operator and proof system consumes; a plain
graph is the special case with colors {vertex, edge, non-edge}.

Tuple positions in substitute() are 1-based, matching the index-tuple
convention used throughout (i ranges over [k]).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exactla import ResourceGuardError


class GraphFormatError(ValueError):
    """Malformed graph input: bad JSON shape, conflicting or unknown names."""


DEFAULT_EDGE_COLOR = "edge"
DEFAULT_NONEDGE_COLOR = "non-edge"
DEFAULT_LOOP_COLOR = "vertex"


@dataclass
class ColoredGraph:
    n: int
    colors: np.ndarray            # (n, n) array of color ids
    color_names: list
    vertex_names: list
    undirected: bool = True
    default_color: str = DEFAULT_NONEDGE_COLOR
    loop_color: str = DEFAULT_LOOP_COLOR

    def __post_init__(self):
        self.colors = np.asarray(self.colors, dtype=np.int64)
        if self.colors.shape != (self.n, self.n):
            raise GraphFormatError("color matrix shape does not match n")
        if len(self.vertex_names) != self.n:
            raise GraphFormatError("vertex name count does not match n")
        if len(set(self.vertex_names)) != self.n:
            raise GraphFormatError("duplicate vertex names")
        if self.n and (self.colors.min() < 0
                       or self.colors.max() >= len(self.color_names)):
            raise GraphFormatError("color id out of range")
        if len(set(self.color_names)) != len(self.color_names):
            raise GraphFormatError("duplicate color names")
        diag = {self.color_names[c] for c in np.diag(self.colors)}
        off = self.colors[~np.eye(self.n, dtype=bool)]
        offnames = {self.color_names[c] for c in np.unique(off)}
        if diag & offnames:
            raise GraphFormatError(
                f"loop and edge colors overlap: {sorted(diag & offnames)}")
        self._vindex = {name: i for i, name in enumerate(self.vertex_names)}

    @classmethod
    def from_pairs(cls, vertex_names, pair_colors, undirected=True,
                   default_color=DEFAULT_NONEDGE_COLOR,
                   loop_color=DEFAULT_LOOP_COLOR):
        """Build from a {(u_id, v_id): color_name} dict; unmentioned
        off-diagonal pairs get default_color, loops get loop_color."""
        n = len(vertex_names)
        used = set(pair_colors.values()) | {default_color, loop_color} \
            if n else set(pair_colors.values())
        names = sorted(used)
        idx = {name: i for i, name in enumerate(names)}
        colors = np.full((n, n), idx.get(default_color, 0), dtype=np.int64)
        if n:
            np.fill_diagonal(colors, idx[loop_color])
        for (u, v), cname in pair_colors.items():
            colors[u, v] = idx[cname]
        return cls(n, colors, names, list(vertex_names), undirected,
                   default_color, loop_color)

    def vertex_id(self, name):
        try:
            return self._vindex[name]
        except KeyError:
            raise GraphFormatError(f"unknown vertex {name!r}") from None

    def pair_color_name(self, u, v):
        return self.color_names[self.colors[u, v]]

    def same_as(self, other) -> bool:
        """Semantic equality: same vertices and the same pair color names."""
        if self.n != other.n or self.vertex_names != other.vertex_names:
            return False
        mine = np.array(self.color_names)[self.colors]
        theirs = np.array(other.color_names)[other.colors]
        return bool((mine == theirs).all())


# ---------------------------------------------------------------------------
# JSON I/O


def load_graph(text: str) -> ColoredGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise GraphFormatError("graph JSON must be an object with 'vertices'")
    vnames = list(doc["vertices"])
    if any(not isinstance(v, str) for v in vnames):
        raise GraphFormatError("vertex names must be strings")
    if len(set(vnames)) != len(vnames):
        raise GraphFormatError("duplicate vertex names")
    undirected = bool(doc.get("undirected", True))
    default_color = doc.get("default_color", DEFAULT_NONEDGE_COLOR)
    loop_color = doc.get("loop_color", DEFAULT_LOOP_COLOR)
    vid = {v: i for i, v in enumerate(vnames)}

    pair_colors = {}
    edge_names, loop_names = {default_color}, {loop_color}

    def put(u, v, cname):
        old = pair_colors.get((u, v))
        if old is not None and old != cname:
            raise GraphFormatError(
                f"conflicting colors for pair ({vnames[u]},{vnames[v]}): "
                f"{old!r} vs {cname!r}")
        pair_colors[(u, v)] = cname

    for entry in doc.get("edges", []):
        if len(entry) == 2:
            a, b = entry
            cname = DEFAULT_EDGE_COLOR
        elif len(entry) == 3:
            a, b, cname = entry
        else:
            raise GraphFormatError(f"bad edge entry {entry!r}")
        if a not in vid or b not in vid:
            raise GraphFormatError(f"unknown vertex in edge {entry!r}")
        if a == b:
            raise GraphFormatError(
                f"self-edge {entry!r}: loop colors belong in 'loops'")
        edge_names.add(cname)
        put(vid[a], vid[b], cname)
        if undirected:
            put(vid[b], vid[a], cname)

    for entry in doc.get("loops", []):
        if len(entry) != 2:
            raise GraphFormatError(f"bad loop entry {entry!r}")
        a, cname = entry
        if a not in vid:
            raise GraphFormatError(f"unknown vertex in loop {entry!r}")
        loop_names.add(cname)
        put(vid[a], vid[a], cname)

    if edge_names & loop_names:
        raise GraphFormatError(
            f"colors used for both loops and edges: {sorted(edge_names & loop_names)}")
    return ColoredGraph.from_pairs(vnames, pair_colors, undirected,
                                   default_color, loop_color)


def save_graph(g: ColoredGraph) -> str:
    edges, loops = [], []
    for u in range(g.n):
        cname = g.pair_color_name(u, u)
        if cname != g.loop_color:
            loops.append([g.vertex_names[u], cname])
        for v in range(g.n):
            if u == v or (g.undirected and u > v):
                continue
            cname = g.pair_color_name(u, v)
            if g.undirected and g.pair_color_name(v, u) != cname:
                raise GraphFormatError(
                    "asymmetric colors in a graph marked undirected")
            if cname != g.default_color:
                edges.append([g.vertex_names[u], g.vertex_names[v], cname])
    doc = {"vertices": list(g.vertex_names), "undirected": g.undirected,
           "default_color": g.default_color, "loop_color": g.loop_color,
           "edges": edges}
    if loops:
        doc["loops"] = loops
    return json.dumps(doc, indent=2)


# ---------------------------------------------------------------------------
# tuple calculus


class TupleIndex:
    """Mixed-radix bijection between V^k and 0..n^k-1 (big-endian: the
    first tuple position is the most significant digit)."""

    def __init__(self, n: int, k: int):
        if k < 1:
            raise ValueError("width must be >= 1")
        self.n = n
        self.k = k
        self.size = n ** k
        self.weights = np.array([n ** (k - 1 - i) for i in range(k)],
                                dtype=np.int64)

    def rank(self, v) -> int:
        if len(v) != self.k:
            raise ValueError(f"expected a {self.k}-tuple")
        return int(np.dot(np.asarray(v, dtype=np.int64), self.weights))

    def unrank(self, r: int):
        if not 0 <= r < self.size:
            raise ValueError("rank out of range")
        return tuple((r // self.weights) % self.n)

    def digits(self) -> np.ndarray:
        """(size, k) matrix whose row r is unrank(r)."""
        return (np.arange(self.size, dtype=np.int64)[:, None]
                // self.weights) % self.n


def check_index_tuple(i, k: int, r: int | None = None):
    """Validate an index tuple: 1-based, distinct, within 1..k."""
    i = tuple(int(x) for x in i)
    if r is not None and len(i) != r:
        raise ValueError(f"expected an index tuple of length {r}")
    if len(set(i)) != len(i):
        raise ValueError(f"repeated positions in index tuple {i}")
    if any(not 1 <= x <= k for x in i):
        raise ValueError(f"index tuple {i} out of range 1..{k}")
    return i


def substitute(v, i, u):
    """v<i,u>: the tuple v with u_s placed at (1-based) position i_s."""
    i = check_index_tuple(i, len(v))
    if len(u) != len(i):
        raise ValueError("substitution tuple length does not match index tuple")
    out = list(v)
    for pos, val in zip(i, u):
        out[pos - 1] = val
    return tuple(out)


def extract(v, i):
    """The subtuple of v at the (1-based) positions i."""
    i = check_index_tuple(i, len(v))
    return tuple(v[pos - 1] for pos in i)


def project(v, t: int):
    if not 1 <= t <= len(v):
        raise ValueError(f"projection width {t} out of range")
    return tuple(v[:t])


def project_partition(gamma, t: int):
    """pr_t: color of a t-tuple u is gamma(u_1..u_t, u_t, ..., u_t)."""
    from .partition import LabelledPartition
    k, n = gamma.k, gamma.n
    if not 1 <= t <= k:
        raise ValueError(f"projection width {t} out of range 1..{k}")
    if t == k:
        return gamma.relabelled()
    src = TupleIndex(n, k)
    dst = TupleIndex(n, t)
    d = dst.digits()
    padded = np.concatenate(
        [d, np.repeat(d[:, -1:], k - t, axis=1)], axis=1)
    ranks = padded @ src.weights
    return LabelledPartition.from_raw(t, n, gamma.colors[ranks])


# ---------------------------------------------------------------------------
# atomic types


def atomic_type_partition(g: ColoredGraph, k: int):
    """Partition of V^k by the induced ordered colored subgraph.

    Two tuples share a class iff their k x k pair-color matrices agree.
    Labels are derived from the color matrix itself (via the sorted color
    name order), so graphs with the same color vocabulary produce matching
    labels for matching types.
    """
    from .partition import LabelledPartition
    if k < 1:
        raise ValueError("width must be >= 1")
    tindex = TupleIndex(g.n, k)
    d = tindex.digits()
    # id -> rank of the color's name in sorted order, for canonical labels
    name_rank = np.argsort(np.argsort(np.array(g.color_names)))
    cols = [name_rank[g.colors[d[:, a], d[:, b]]]
            for a in range(k) for b in range(k)]
    key = np.stack(cols, axis=1)
    uniq, inverse = np.unique(key, axis=0, return_inverse=True)
    sorted_names = sorted(g.color_names)
    labels = ["|".join(sorted_names[v] for v in row) for row in uniq]
    return LabelledPartition(k, g.n, inverse.astype(np.int64), labels)


# ---------------------------------------------------------------------------
# brute-force oracles


def _compatible_color_space(g1: ColoredGraph, g2: ColoredGraph):
    """Translate both graphs' color matrices into a shared id space,
    or None when the color vocabularies differ."""
    if g1.n != g2.n or set(g1.color_names) != set(g2.color_names):
        return None
    shared = sorted(g1.color_names)
    m1 = np.array([shared.index(c) for c in g1.color_names])
    m2 = np.array([shared.index(c) for c in g2.color_names])
    return m1[g1.colors], m2[g2.colors]


def _iso_search(c1: np.ndarray, c2: np.ndarray, find_all: bool):
    """Color-preserving bijections mapping the graph of c1 onto c2.

    Returns a list of permutation arrays (all of them, or the first found).
    Backtracking; vertex order chosen by candidate-set size for pruning.
    """
    n = c1.shape[0]
    cand = []
    for u in range(n):
        row = np.sort(c1[u])
        col = np.sort(c1[:, u])
        opts = [w for w in range(n)
                if c1[u, u] == c2[w, w]
                and (row == np.sort(c2[w])).all()
                and (col == np.sort(c2[:, w])).all()]
        cand.append(opts)
    order = sorted(range(n), key=lambda u: len(cand[u]))
    found = []
    perm = [-1] * n
    used = [False] * n

    def rec(depth):
        if depth == n:
            found.append(np.array(perm, dtype=np.int64))
            return not find_all
        u = order[depth]
        for w in cand[u]:
            if used[w]:
                continue
            ok = True
            for a in order[:depth]:
                b = perm[a]
                if c1[u, a] != c2[w, b] or c1[a, u] != c2[b, w]:
                    ok = False
                    break
            if ok:
                perm[u] = w
                used[w] = True
                if rec(depth + 1):
                    return True
                used[w] = False
        perm[u] = -1
        return False

    rec(0)
    return found


def color_isomorphic(g1: ColoredGraph, g2: ColoredGraph) -> bool:
    """True iff a color-name-preserving bijection of vertices exists."""
    pair = _compatible_color_space(g1, g2)
    if pair is None:
        return False
    return bool(_iso_search(pair[0], pair[1], find_all=False))


def automorphisms(g: ColoredGraph, limit: int = 8):
    """All color-preserving permutations, as arrays.  Refuses above limit."""
    if g.n > limit:
        raise ResourceGuardError(
            f"automorphism enumeration limited to {limit} vertices, got {g.n}")
    return _iso_search(g.colors, g.colors, find_all=True)


def brute_force_orbits(g: ColoredGraph, k: int, limit: int = 8):
    """Orbit partition of V^k under the automorphism group (the oracle
    every implemented method approximates).  Refuses above limit."""
    from .partition import LabelledPartition
    perms = automorphisms(g, limit)
    tindex = TupleIndex(g.n, k)
    d = tindex.digits()
    canon = np.full(tindex.size, np.iinfo(np.int64).max, dtype=np.int64)
    for perm in perms:
        np.minimum(canon, perm[d] @ tindex.weights, out=canon)
    _, inverse = np.unique(canon, return_inverse=True)
    return LabelledPartition(k, g.n, inverse.astype(np.int64))
