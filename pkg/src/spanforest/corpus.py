"""Shipped corpus of small connected graphs for oracle-backed testing.

Every graph has at most six vertices so spanning structures stay exhaustively
enumerable.  Multigraphs are included deliberately: parallel edges exercise
the slot-uniform walk transitions.  Boundaries are chosen where a graph has a
natural rim; the rest get two far-apart vertices so boundary-dependent
statistics have something to chew on.
"""

from __future__ import annotations

from .graphs import Graph


def _complete(n, boundary=()):
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return Graph(n, edges, boundary)


def _cycle(n, boundary=()):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)], boundary)


def _path(n, boundary=None):
    if boundary is None:
        boundary = (0, n - 1)
    return Graph(n, [(i, i + 1) for i in range(n - 1)], boundary)


def _star(leaves):
    g = Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)], range(1, leaves + 1))
    return g


def corpus() -> dict[str, Graph]:
    """Name -> graph mapping; insertion order is the canonical corpus order."""
    graphs: dict[str, Graph] = {}

    graphs["k2"] = _path(2)
    graphs["path3"] = _path(3)
    graphs["path4"] = _path(4)
    graphs["path5"] = _path(5)
    graphs["path6"] = _path(6)
    graphs["cycle3"] = _cycle(3, boundary=(0,))
    graphs["cycle4"] = _cycle(4, boundary=(0, 2))
    graphs["cycle5"] = _cycle(5, boundary=(0, 2))
    graphs["cycle6"] = _cycle(6, boundary=(0, 3))
    graphs["k4"] = _complete(4, boundary=(0,))
    graphs["k5"] = _complete(5, boundary=(0,))
    graphs["k6"] = _complete(6, boundary=(0,))
    graphs["star3"] = _star(3)
    graphs["star4"] = _star(4)
    graphs["star5"] = _star(5)

    # complete bipartite
    graphs["k23"] = Graph(5, [(i, j) for i in (0, 1) for j in (2, 3, 4)], (2, 3, 4))
    graphs["k33"] = Graph(6, [(i, j) for i in (0, 1, 2) for j in (3, 4, 5)], (3, 4, 5))

    # cycles with extras
    graphs["k4_minus_edge"] = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)], (1, 3))
    graphs["cycle5_chord"] = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)], (3,))
    graphs["cycle6_chord"] = Graph(
        6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)], (1, 4)
    )

    # named small graphs
    graphs["bull"] = Graph(5, [(0, 1), (1, 2), (2, 0), (1, 3), (2, 4)], (3, 4))
    graphs["butterfly"] = Graph(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)], (0, 3))
    graphs["house"] = Graph(5, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 4)], (2, 3))
    graphs["prism"] = Graph(
        6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5)], (0,)
    )
    graphs["wheel5"] = Graph(
        6,
        [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 0), (5, 1), (5, 2), (5, 3), (5, 4)],
        (0, 2),
    )
    graphs["octahedron_minus"] = Graph(
        6,
        [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (0, 3), (1, 4), (2, 5), (0, 4), (1, 5)],
        (2, 3),
    )

    # multigraphs: parallel edges are distinct slots with equal weight
    graphs["double_edge"] = Graph(2, [(0, 1), (0, 1)], (0,))
    graphs["triangle_doubled"] = Graph(3, [(0, 1), (0, 1), (1, 2), (2, 0)], (2,))
    graphs["path3_doubled"] = Graph(3, [(0, 1), (1, 2), (1, 2)], (0, 2))
    graphs["theta"] = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], (1, 3))

    return graphs


def corpus_names() -> list[str]:
    return list(corpus().keys())
