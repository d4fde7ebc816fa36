"""Generalized CFI instances over Z_p and their disjoint-union families.

Each base vertex v becomes the gadget {(v, f) : f assigns a Z_p value to
every incident edge, values summing to 0 mod p}; each base edge e gets two
groups of p port vertices, one per endpoint.  A gadget vertex connects to
the port carrying its value ("port" edges), and the two port groups of an
edge are wired by a + b = twist(e) mod p ("link" edges).  Loop colors pin
the base origin of every vertex, so color-preserving isomorphisms must
respect the base structure.  The sum of the twists mod p is the only
isomorphism invariant.

For p >= 3 the construction as stated so far has one unwanted symmetry:
negating every gadget assignment and every port value is a color
isomorphism onto the instance with negated twists, collapsing twist
classes t and -t.  To make the total twist a complete invariant, each
port group for p >= 3 additionally carries one "successor" vertex per
value, wired to port a by a "succ-tail" edge and to port a+1 by a
"succ-head" edge.  This directed-cycle structure is preserved by value
shifts (which realize twist redistribution) but not by negation.  For
p = 2 negation is the identity on Z_2, so the successor vertices are
unnecessary and are omitted.

Bases are explicit multigraphs (vertex list plus edge list with repeats
allowed), since the smallest interesting 3-regular base, two vertices
joined by three parallel edges, needs them.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field

from .field import is_prime
from .graphcore import ColoredGraph, GraphFormatError


class CfiError(ValueError):
    """Bad CFI parameters: disconnected base, composite p, bad twists."""


@dataclass
class CfiSpec:
    vertices: list                  # base vertex names
    edges: list                     # (u_name, v_name) pairs; repeats allowed
    p: int
    twists: dict = dc_field(default_factory=dict)   # edge index -> Z_p value

    def __post_init__(self):
        if not is_prime(self.p):
            raise CfiError(f"p must be prime, got {self.p}")
        if len(set(self.vertices)) != len(self.vertices):
            raise CfiError("duplicate base vertex names")
        vset = set(self.vertices)
        self.edges = [tuple(e) for e in self.edges]
        for u, v in self.edges:
            if u not in vset or v not in vset:
                raise CfiError(f"edge ({u},{v}) uses an unknown vertex")
            if u == v:
                raise CfiError("self-loops are not supported in the base")
        self.twists = {int(e): int(t) % self.p for e, t in self.twists.items()}
        if any(not 0 <= e < len(self.edges) for e in self.twists):
            raise CfiError("twist refers to a nonexistent edge index")
        if not _connected(self.vertices, self.edges):
            raise CfiError("base graph must be connected")

    @property
    def total_twist(self) -> int:
        return sum(self.twists.values()) % self.p


def _connected(vertices, edges) -> bool:
    if len(vertices) <= 1:
        return True
    vid = {v: i for i, v in enumerate(vertices)}
    parent = list(range(len(vertices)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(vid[u])] = find(vid[v])
    return len({find(i) for i in range(len(vertices))}) == 1


def load_base(text: str):
    """Base multigraph from graph JSON; every entry in "edges" is one
    edge, so repeated pairs give parallel edges."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise GraphFormatError("base JSON must be an object with 'vertices'")
    vertices = list(doc["vertices"])
    edges = []
    for entry in doc.get("edges", []):
        if len(entry) < 2:
            raise GraphFormatError(f"bad edge entry {entry!r}")
        edges.append((entry[0], entry[1]))
    return vertices, edges


def cfi_build(spec: CfiSpec) -> ColoredGraph:
    p = spec.p
    incident = {v: [] for v in spec.vertices}
    for ei, (u, v) in enumerate(spec.edges):
        incident[u].append(ei)
        incident[v].append(ei)

    names = []
    loops = {}      # name -> loop color
    gadget = {}     # base vertex -> list of (name, {edge index: value})
    for v in spec.vertices:
        inc = incident[v]
        gadget[v] = []
        free = inc[:-1] if inc else []
        for vals in itertools.product(range(p), repeat=len(free)):
            f = dict(zip(free, vals))
            if inc:
                f[inc[-1]] = (-sum(vals)) % p
            name = f"{v}#" + ",".join(str(f[e]) for e in inc)
            names.append(name)
            loops[name] = f"base:{v}"
            gadget[v].append((name, f))
    port = {}       # (edge index, end, value) -> name
    succ = {}       # (edge index, end, value) -> successor-vertex name
    for ei in range(len(spec.edges)):
        for end in (0, 1):
            for a in range(p):
                name = f"e{ei}.{end}.{a}"
                names.append(name)
                loops[name] = f"port:{ei}.{end}"
                port[(ei, end, a)] = name
            if p >= 3:
                for a in range(p):
                    name = f"e{ei}.{end}.{a}>"
                    names.append(name)
                    loops[name] = f"succ:{ei}.{end}"
                    succ[(ei, end, a)] = name

    vid = {name: i for i, name in enumerate(names)}
    pair_colors = {}

    def connect(n1, n2, color):
        pair_colors[(vid[n1], vid[n2])] = color
        pair_colors[(vid[n2], vid[n1])] = color

    for ei, (u, v) in enumerate(spec.edges):
        for end, base_vertex in ((0, u), (1, v)):
            for gname, f in gadget[base_vertex]:
                connect(gname, port[(ei, end, f[ei])], "port")
        twist = spec.twists.get(ei, 0)
        for a in range(p):
            connect(port[(ei, 0, a)], port[(ei, 1, (twist - a) % p)], "link")
        if p >= 3:
            for end in (0, 1):
                for a in range(p):
                    connect(succ[(ei, end, a)], port[(ei, end, a)], "succ-tail")
                    connect(succ[(ei, end, a)], port[(ei, end, (a + 1) % p)],
                            "succ-head")
    for name in names:
        pair_colors[(vid[name], vid[name])] = loops[name]
    return ColoredGraph.from_pairs(names, pair_colors)


def disjoint_union(graphs, prefixes) -> ColoredGraph:
    """Combine vertex-renamed copies; loop and edge colors are shared, so
    same-origin vertices in different copies stay interchangeable."""
    if len(graphs) != len(prefixes) or not graphs:
        raise ValueError("need one prefix per graph")
    default = graphs[0].default_color
    if any(g.default_color != default for g in graphs):
        raise ValueError("graphs disagree on the default pair color")
    names = []
    pair_colors = {}
    offset = 0
    for g, prefix in zip(graphs, prefixes):
        names.extend(prefix + name for name in g.vertex_names)
        for u in range(g.n):
            for v in range(g.n):
                cname = g.pair_color_name(u, v)
                if u != v and cname == default:
                    continue
                pair_colors[(offset + u, offset + v)] = cname
        offset += g.n
    return ColoredGraph.from_pairs(names, pair_colors, default_color=default,
                                   loop_color=graphs[0].loop_color)


def cfi_family(vertices, edges, p: int):
    """The p twist classes over one base: copies with total twist
    0..p-1 (twist carried on the first edge), plus their disjoint union."""
    if not edges:
        raise CfiError("base graph must have at least one edge")
    copies = [cfi_build(CfiSpec(vertices, edges, p, {0: j})) for j in range(p)]
    union = disjoint_union(copies, [f"c{j}:" for j in range(p)])
    return copies, union
