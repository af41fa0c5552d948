"""Uniform spanning tree and rooted spanning forest sampling.

Wilson's algorithm: repeatedly run a random walk from the lowest-id unvisited
vertex until it hits the growing tree, loop-erase the walk chronologically,
and graft the erased path on.  The walk keeps only the last exit taken from
each vertex, which is equivalent to chronological loop erasure and is how the
inner loop below works.  On multigraphs the walk picks uniformly among
incident edge slots, so parallel edges double the transition weight, which is
exactly what the uniform tree law of a quotient graph requires.

Everything here is a pure function of (graph, roots, RandomStream); the fixed
ascending visit order makes output forests byte-reproducible while leaving
the sampled law untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DisconnectedGraphError, SpanforestError, ValidationError
from .graphs import Contraction, Forest, Graph, contract
from .randomness import RandomStream

#: Abort any single random walk after this many steps (pathological inputs).
WALK_STEP_LIMIT = 10**9


class WalkLimitError(SpanforestError):
    """A single random walk exceeded WALK_STEP_LIMIT steps."""


@dataclass(frozen=True)
class WalkPath:
    """A vertex walk; consecutive entries must be adjacent in the host."""

    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) == 0:
            raise ValidationError("walk must be nonempty")

    def __len__(self):
        return len(self.vertices)


def loop_erase(path: WalkPath) -> WalkPath:
    """Chronological loop erasure.

    Scan forward; on revisiting a vertex, drop the cycle back to its first
    occurrence.  The result is self-avoiding with the same endpoints.
    """
    out: list[int] = []
    position: dict[int, int] = {}
    for v in path.vertices:
        if v in position:
            cut = position[v] + 1
            for w in out[cut:]:
                del position[w]
            del out[cut:]
        else:
            position[v] = len(out)
            out.append(v)
    return WalkPath(vertices=tuple(out))


def _wilson_parents(g: Graph, in_tree: bytearray, rng: RandomStream):
    """Core Wilson loop. Mutates in_tree; returns parent vertex/edge arrays.

    in_tree must mark a nonempty absorbing set.  Unvisited vertices are
    processed in ascending id order.
    """
    n = g.n
    parent_vertex = [-1] * n
    parent_edge = [-1] * n
    incidence = g.incidence
    randint = rng.randint
    next_vertex = [-1] * n
    next_edge = [-1] * n
    for start in range(n):
        if in_tree[start]:
            continue
        u = start
        steps = 0
        while not in_tree[u]:
            slots = incidence[u]
            if not slots:
                raise DisconnectedGraphError("walk stranded at an isolated vertex")
            v, eid = slots[randint(len(slots))]
            next_vertex[u] = v  # last exit wins: implicit loop erasure
            next_edge[u] = eid
            u = v
            steps += 1
            if steps > WALK_STEP_LIMIT:
                raise WalkLimitError(f"walk from {start} exceeded {WALK_STEP_LIMIT} steps")
        u = start
        while not in_tree[u]:
            in_tree[u] = 1
            parent_vertex[u] = next_vertex[u]
            parent_edge[u] = next_edge[u]
            u = next_vertex[u]
    return parent_vertex, parent_edge


def wilson_tree(g: Graph, root: int, rng: RandomStream) -> Forest:
    """Uniform spanning tree of a connected graph, grown from ``root``."""
    if not g.is_connected:
        raise DisconnectedGraphError("wilson_tree requires a connected graph")
    if not 0 <= root < g.n:
        raise ValidationError(f"root {root} out of range")
    in_tree = bytearray(g.n)
    in_tree[root] = 1
    _, parent_edge = _wilson_parents(g, in_tree, rng)
    edges = [e for e in parent_edge if e >= 0]
    return Forest(g, edges)


def wilson_rooted_forest(g: Graph, roots, rng: RandomStream) -> Forest:
    """Uniform spanning forest with exactly one of ``roots`` per component.

    Sampled as a uniform spanning tree of the quotient in which the roots are
    joined into one vertex, pulled back through the edge correspondence.
    """
    if not g.is_connected:
        raise DisconnectedGraphError("wilson_rooted_forest requires a connected graph")
    roots = sorted(set(int(r) for r in roots))
    if not roots:
        raise ValidationError("roots must be nonempty")
    if any(not 0 <= r < g.n for r in roots):
        raise ValidationError("root out of range")
    if len(roots) == 1:
        tree = wilson_tree(g, roots[0], rng)
        return Forest(g, tree.edge_ids, roots=roots)
    ctr = contract(g, [roots])
    q = ctr.graph
    q_root = ctr.vertex_map[roots[0]]
    in_tree = bytearray(q.n)
    in_tree[q_root] = 1
    _, parent_edge = _wilson_parents(q, in_tree, rng)
    edges = ctr.pull_back_edges(e for e in parent_edge if e >= 0)
    return Forest(g, edges, roots=roots)


def sample_boundary_mode(g: Graph, mode: str, rng: RandomStream) -> Forest:
    """Spanning structure under free or wired boundary conditions.

    free: uniform spanning tree (rooted at vertex 0 for reproducibility).
    wired: uniform spanning tree of the graph with the whole boundary joined
    to one vertex, pulled back; components then each hold one boundary vertex.
    """
    if mode == "free":
        return wilson_tree(g, 0, rng)
    if mode == "wired":
        if not g.boundary:
            raise ValidationError("wired mode needs a nonempty boundary")
        return wilson_rooted_forest(g, g.boundary, rng)
    raise ValidationError(f"unknown boundary mode {mode!r}")


class RootedSampler:
    """Reusable sampler of rooted forests exposing parent structure.

    Contracts once, then yields (parent_vertex, parent_edge) arrays per draw
    in quotient coordinates together with the maps needed to read paths off
    in host coordinates.  The batch estimators use this to avoid rebuilding
    Forest objects in tight loops; the sampled law is that of
    :func:`wilson_rooted_forest`.
    """

    def __init__(self, g: Graph, roots):
        if not g.is_connected:
            raise DisconnectedGraphError("sampler requires a connected graph")
        self.host = g
        self.roots = sorted(set(int(r) for r in roots))
        if not self.roots:
            raise ValidationError("roots must be nonempty")
        self.contraction: Contraction = contract(g, [self.roots]) if len(self.roots) > 1 else None
        if self.contraction is not None:
            self.graph = self.contraction.graph
            self.root_vertex = self.contraction.vertex_map[self.roots[0]]
        else:
            self.graph = g
            self.root_vertex = self.roots[0]

    def draw_parents(self, rng: RandomStream):
        in_tree = bytearray(self.graph.n)
        in_tree[self.root_vertex] = 1
        return _wilson_parents(self.graph, in_tree, rng)

    def draw_forest(self, rng: RandomStream) -> Forest:
        _, parent_edge = self.draw_parents(rng)
        edges = [e for e in parent_edge if e >= 0]
        if self.contraction is not None:
            edges = self.contraction.pull_back_edges(edges)
        return Forest(self.host, edges, roots=self.roots)

    def host_path_from(self, b: int, parent_vertex, parent_edge) -> list[int]:
        """Host-coordinate path from b to the root it attaches to."""
        if self.contraction is None:
            q = b
            path = [b]
            while parent_vertex[q] != -1:
                q = parent_vertex[q]
                path.append(q)
            return path
        vm = self.contraction.vertex_map
        edges = self.host.edges
        path = [b]
        q = vm[b]
        cur = b
        while parent_vertex[q] != -1:
            eid = parent_edge[q]
            u, v = edges[eid]
            cur = v if u == cur else u
            path.append(cur)
            q = parent_vertex[q]
        return path
