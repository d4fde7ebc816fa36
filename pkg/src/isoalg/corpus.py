"""A fixed corpus of small named graphs (2..6 vertices) used by the
experiment scripts and the acceptance suite."""

from __future__ import annotations

import itertools
import random

from .graphcore import ColoredGraph, DEFAULT_EDGE_COLOR


def plain_graph(n: int, edges) -> ColoredGraph:
    """Undirected plain graph on vertices a, b, c, ... with the given
    edges as index pairs."""
    names = [chr(ord("a") + i) for i in range(n)]
    pair_colors = {}
    for u, v in edges:
        pair_colors[(u, v)] = DEFAULT_EDGE_COLOR
        pair_colors[(v, u)] = DEFAULT_EDGE_COLOR
    return ColoredGraph.from_pairs(names, pair_colors)


def _path(n):
    return plain_graph(n, [(i, i + 1) for i in range(n - 1)])


def _cycle(n):
    return plain_graph(n, [(i, (i + 1) % n) for i in range(n)])


def _complete(n):
    return plain_graph(n, list(itertools.combinations(range(n), 2)))


def _star(n):
    return plain_graph(n, [(0, i) for i in range(1, n)])


def _random_graph(n, seed):
    rng = random.Random(seed)
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.5]
    return plain_graph(n, edges)


def corpus():
    """Name -> graph, in a fixed deterministic order."""
    out = {}
    for n in range(2, 7):
        out[f"path{n}"] = _path(n)
    for n in range(3, 7):
        out[f"cycle{n}"] = _cycle(n)
    for n in range(3, 7):
        out[f"complete{n}"] = _complete(n)
    for n in range(4, 7):
        out[f"star{n}"] = _star(n)
    out["paw"] = plain_graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    out["diamond"] = plain_graph(4, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3)])
    out["bull"] = plain_graph(5, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4)])
    out["2k2"] = plain_graph(4, [(0, 1), (2, 3)])
    out["k3+k2"] = plain_graph(5, [(0, 1), (1, 2), (0, 2), (3, 4)])
    out["2k3"] = plain_graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    out["3k2"] = plain_graph(6, [(0, 1), (2, 3), (4, 5)])
    out["rand5"] = _random_graph(5, 20240501)
    out["rand6"] = _random_graph(6, 20240601)
    return out
