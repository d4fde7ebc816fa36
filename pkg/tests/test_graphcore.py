"""Colored graphs, tuple calculus, atomic types, brute-force oracles."""

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from isoalg.corpus import plain_graph
from isoalg.exactla import ResourceGuardError
from isoalg.graphcore import (ColoredGraph, GraphFormatError, TupleIndex,
                              atomic_type_partition, automorphisms,
                              brute_force_orbits, check_index_tuple,
                              color_isomorphic, extract, load_graph, project,
                              project_partition, save_graph, substitute)
from isoalg.partition import is_graph_like, is_invariant, refines


# ---------------------------------------------------------------------------
# JSON I/O


def test_load_plain_graph():
    g = load_graph(json.dumps({
        "vertices": ["a", "b", "c"],
        "edges": [["a", "b"], ["b", "c"]]}))
    assert g.n == 3 and g.undirected
    assert g.pair_color_name(0, 1) == "edge"
    assert g.pair_color_name(1, 0) == "edge"
    assert g.pair_color_name(0, 2) == "non-edge"
    assert g.pair_color_name(0, 0) == "vertex"


def test_roundtrip_corpus(graphs):
    for name, g in graphs.items():
        assert load_graph(save_graph(g)).same_as(g), name


def test_roundtrip_colored_loops():
    g = load_graph(json.dumps({
        "vertices": ["a", "b"],
        "edges": [["a", "b", "red"]],
        "loops": [["a", "special"]]}))
    assert g.pair_color_name(0, 0) == "special"
    assert g.pair_color_name(1, 1) == "vertex"
    assert g.pair_color_name(0, 1) == "red"
    assert load_graph(save_graph(g)).same_as(g)


def test_directed_graph():
    g = load_graph(json.dumps({
        "vertices": ["a", "b"], "undirected": False,
        "edges": [["a", "b", "fwd"]]}))
    assert g.pair_color_name(0, 1) == "fwd"
    assert g.pair_color_name(1, 0) == "non-edge"
    assert load_graph(save_graph(g)).same_as(g)


@pytest.mark.parametrize("doc,fragment", [
    ({"vertices": ["a", "a"]}, "duplicate"),
    ({"vertices": ["a", "b"], "edges": [["a", "x"]]}, "unknown"),
    ({"vertices": ["a", "b"], "edges": [["a", "a"]]}, "self-edge"),
    ({"vertices": ["a", "b"],
      "edges": [["a", "b", "red"], ["b", "a", "blue"]]}, "conflicting"),
    ({"vertices": ["a", "b"], "edges": [["a", "b", "vertex"]]}, "loops and edges"),
    ({"vertices": ["a"], "loops": [["a"]]}, "bad loop"),
    ({"edges": []}, "vertices"),
])
def test_load_errors(doc, fragment):
    with pytest.raises(GraphFormatError, match=fragment):
        load_graph(json.dumps(doc))


def test_invalid_json_rejected():
    with pytest.raises(GraphFormatError, match="invalid JSON"):
        load_graph("{not json")


# ---------------------------------------------------------------------------
# tuple calculus


def test_tuple_index_roundtrip_exhaustive():
    t = TupleIndex(3, 3)
    for r in range(t.size):
        assert t.rank(t.unrank(r)) == r
    d = t.digits()
    for r in range(t.size):
        assert tuple(d[r]) == t.unrank(r)


@given(st.integers(1, 5), st.integers(1, 4), st.data())
def test_tuple_index_roundtrip_hypothesis(n, k, data):
    t = TupleIndex(n, k)
    v = data.draw(st.tuples(*([st.integers(0, n - 1)] * k)))
    assert t.unrank(t.rank(v)) == v


def test_substitute_examples():
    assert substitute((0, 1, 2), (1, 3), (7, 8)) == (7, 1, 8)
    assert substitute((0, 1, 2), (2,), (9,)) == (0, 9, 2)
    assert extract((5, 6, 7), (3, 1)) == (7, 5)
    assert project((5, 6, 7), 2) == (5, 6)


def test_substitute_extract_exhaustive():
    """extract after substitute returns the substituted values; untouched
    positions keep their original entries."""
    k, n = 3, 2
    for v in itertools.product(range(n), repeat=k):
        for rlen in (1, 2, 3):
            for i in itertools.permutations(range(1, k + 1), rlen):
                for u in itertools.product(range(n), repeat=rlen):
                    w = substitute(v, i, u)
                    assert extract(w, i) == u
                    for pos in range(1, k + 1):
                        if pos not in i:
                            assert w[pos - 1] == v[pos - 1]


def test_check_index_tuple_errors():
    with pytest.raises(ValueError, match="repeated"):
        check_index_tuple((1, 1), 3)
    with pytest.raises(ValueError, match="out of range"):
        check_index_tuple((0,), 3)
    with pytest.raises(ValueError, match="out of range"):
        check_index_tuple((4,), 3)
    with pytest.raises(ValueError, match="length"):
        check_index_tuple((1, 2), 3, r=3)


# ---------------------------------------------------------------------------
# atomic types


def test_atomic_types_path_width2(path3):
    # path a-b-c: classes are loops x {same, edge, non-edge}
    gamma = atomic_type_partition(path3, 2)
    assert gamma.num_colors == 3
    cls = {tuple(sorted(map(int, c))) for c in gamma.classes()}
    t = TupleIndex(3, 2)
    diag = tuple(sorted(t.rank((v, v)) for v in range(3)))
    edges = tuple(sorted(t.rank(p) for p in [(0, 1), (1, 0), (1, 2), (2, 1)]))
    non = tuple(sorted(t.rank(p) for p in [(0, 2), (2, 0)]))
    assert cls == {diag, edges, non}


def test_atomic_types_invariant_graph_like(graphs):
    for name, g in graphs.items():
        if g.n > 5:
            continue
        for k in (1, 2, 3):
            gamma = atomic_type_partition(g, k)
            assert is_graph_like(gamma), (name, k)


def test_atomic_labels_shared_across_graphs(path3, triangle):
    a = atomic_type_partition(path3, 2)
    b = atomic_type_partition(triangle, 2)
    # the loop-pair type and the edge type get identical labels
    assert set(a.labels) & set(b.labels)


def test_project_partition_pads_with_last():
    g = plain_graph(3, [(0, 1)])
    gamma = atomic_type_partition(g, 2)
    pr = project_partition(gamma, 1)
    # color of v under pr is the width-2 color of (v, v): all loops alike
    assert pr.num_colors == 1
    assert project_partition(gamma, 2).num_colors == gamma.num_colors


# ---------------------------------------------------------------------------
# brute-force oracles


def test_color_isomorphic_examples():
    p4a = plain_graph(4, [(0, 1), (1, 2), (2, 3)])
    p4b = plain_graph(4, [(2, 0), (0, 3), (3, 1)])  # relabelled path
    star = plain_graph(4, [(0, 1), (0, 2), (0, 3)])
    assert color_isomorphic(p4a, p4b)
    assert not color_isomorphic(p4a, star)


def test_color_isomorphic_respects_colors():
    a = ColoredGraph.from_pairs(["x", "y"], {(0, 1): "red", (1, 0): "red"})
    b = ColoredGraph.from_pairs(["x", "y"], {(0, 1): "blue", (1, 0): "blue"})
    assert not color_isomorphic(a, b)
    assert color_isomorphic(a, a)


def test_automorphism_counts(path3, triangle):
    assert len(automorphisms(path3)) == 2
    assert len(automorphisms(triangle)) == 6
    assert len(automorphisms(plain_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))) == 8


def test_automorphism_guard():
    g = plain_graph(3, [])
    with pytest.raises(ResourceGuardError):
        automorphisms(g, limit=2)


def test_orbits_path3(path3):
    o1 = brute_force_orbits(path3, 1)
    assert o1.num_colors == 2  # endpoints vs middle
    o2 = brute_force_orbits(path3, 2)
    assert o2.num_colors == 5


def test_orbits_refine_atomic(small_graphs):
    for name, g in small_graphs.items():
        for k in (1, 2):
            orbits = brute_force_orbits(g, k)
            atomic = atomic_type_partition(g, k)
            assert refines(orbits, atomic), (name, k)
            assert is_invariant(orbits), (name, k)


def test_orbit_classes_are_orbits(path3):
    """Every orbit class is closed under every automorphism."""
    t = TupleIndex(3, 2)
    d = t.digits()
    orbits = brute_force_orbits(path3, 2)
    for perm in automorphisms(path3):
        moved = perm[d] @ t.weights
        assert (orbits.colors[moved] == orbits.colors).all()


def test_loop_edge_color_overlap_rejected():
    with pytest.raises(GraphFormatError, match="overlap"):
        ColoredGraph(2, np.array([[0, 0], [0, 0]]), ["c"], ["a", "b"])
