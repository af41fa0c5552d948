"""Window boundary relations and conditional resampling.

Two equivalence relations on the inner boundary of a window drive everything
here: connectivity through edges *outside* the window (including straddling
edges, which we assign to the outside) and connectivity through forest edges
*inside* it.  The strong resampler redraws the window as a uniform spanning
tree of the window graph with outside-equivalent boundary vertices joined; it
is a valid conditional update only on finite graphs, which is all this
package handles.  The weak resampler redraws the window uniformly among edge
sets that reproduce the current inside relation, touch the window boundary
with every component, and stay acyclic; that set depends on the outside
configuration only through the inside relation, which is what makes the
update exactly law-preserving for boundary-rooted forest measures on strictly
interior windows.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapacityError, SpanforestError, ValidationError
from .graphs import Forest, Graph, UnionFind, Window, contract
from .randomness import RandomStream
from .sampler import WalkPath, wilson_rooted_forest, wilson_tree

#: Windows with at most this many internal edges are resampled by exhaustive
#: pattern enumeration (cached per window); larger windows fall back to
#: direct proposal sampling where the target partition allows it.
ENUMERATION_INTERNAL_EDGE_CAP = 20


@dataclass(frozen=True)
class BoundaryPartition:
    """Partition of a window's inner boundary vertices.

    ``canonical_form`` (blocks as sorted tuples, ordered by minimal member)
    is the comparison key; partition equality is exact, never tolerance-based.
    """

    window: Window
    classes: tuple

    @staticmethod
    def from_blocks(window: Window, blocks) -> "BoundaryPartition":
        cleaned = [tuple(sorted(b)) for b in blocks if b]
        cleaned.sort(key=lambda b: b[0])
        flat = [v for b in cleaned for v in b]
        if len(flat) != len(set(flat)) or set(flat) != set(window.window_boundary):
            raise ValidationError("blocks must partition the window boundary")
        return BoundaryPartition(window=window, classes=tuple(cleaned))

    @property
    def canonical_form(self) -> tuple:
        return self.classes

    def block_count(self) -> int:
        return len(self.classes)


def _partition_from_unionfind(window: Window, uf: UnionFind) -> BoundaryPartition:
    blocks: dict[int, list[int]] = {}
    for b in window.window_boundary:
        blocks.setdefault(uf.find(b), []).append(b)
    return BoundaryPartition.from_blocks(window, blocks.values())


def outside_relation(g: Graph, w: Window, f_outside) -> BoundaryPartition:
    """Boundary partition by connectivity through edges outside the window.

    ``f_outside`` is a Forest (or iterable of edge ids) containing no edge
    with both endpoints inside the window; straddling edges are legal and do
    connect through outside vertices.
    """
    edge_ids = f_outside.edge_ids if isinstance(f_outside, Forest) else tuple(f_outside)
    internal = set(w.internal_edges)
    uf = UnionFind(g.n)
    for eid in edge_ids:
        if eid in internal:
            raise ValidationError(f"edge {eid} lies inside the window")
        u, v = g.edges[eid]
        uf.union(u, v)
    return _partition_from_unionfind(w, uf)


def inside_relation(w: Window, f_inside) -> BoundaryPartition:
    """Boundary partition by forest connectivity inside the window."""
    edge_ids = f_inside.edge_ids if isinstance(f_inside, Forest) else tuple(f_inside)
    internal = set(w.internal_edges)
    g = w.host
    uf = UnionFind(g.n)
    for eid in edge_ids:
        if eid not in internal:
            raise ValidationError(f"edge {eid} is not internal to the window")
        u, v = g.edges[eid]
        if not uf.union(u, v):
            raise ValidationError("inside restriction contains a cycle")
    return _partition_from_unionfind(w, uf)


def split_forest_at_window(f: Forest, w: Window):
    """Partition a forest's edges into (inside window, outside window)."""
    internal = set(w.internal_edges)
    inside = tuple(e for e in f.edge_ids if e in internal)
    outside = tuple(e for e in f.edge_ids if e not in internal)
    return inside, outside


# -- strong resampling -------------------------------------------------------------


def strong_gibbs_resample(g: Graph, w: Window, f: Forest, rng: RandomStream) -> Forest:
    """Redraw the window of a spanning tree from its exact conditional law.

    Keeps every edge outside the window, computes the outside relation, and
    replaces the inside edges with a uniform spanning tree of the window
    graph with outside-equivalent boundary vertices identified.  The output
    is again a spanning tree of g.
    """
    if not g.is_connected:
        raise ValidationError("strong resampling needs a connected host")
    if not f.is_spanning_tree():
        raise ValidationError("strong resampling needs a spanning tree")
    _, outside = split_forest_at_window(f, w)
    if not w.internal_edges:
        return f

    relation = outside_relation(g, w, outside)

    # Window graph in local coordinates, then the quotient under the relation.
    local = {v: i for i, v in enumerate(sorted(w.vertices))}
    local_edges = [(local[g.edges[e][0]], local[g.edges[e][1]]) for e in w.internal_edges]
    window_graph = Graph(len(local), local_edges)
    classes = [
        [local[v] for v in block] for block in relation.classes if len(block) > 1
    ]
    if classes:
        ctr = contract(window_graph, classes)
        quotient = ctr.graph
    else:
        ctr = None
        quotient = window_graph
    if not quotient.is_connected:
        raise SpanforestError(
            "window quotient is disconnected; input was not a spanning tree conditional"
        )
    tree = wilson_tree(quotient, 0, rng)
    picked = tree.edge_ids if ctr is None else ctr.pull_back_edges(tree.edge_ids)
    new_inside = [w.internal_edges[e] for e in picked]
    return Forest(g, list(outside) + new_inside)


# -- weak resampling ---------------------------------------------------------------


def admissible_window_patterns(w: Window) -> dict[tuple, list[tuple]]:
    """All admissible inside edge sets, grouped by the partition they induce.

    Admissible: acyclic, and every component of the window's vertex set
    (isolated vertices included) contains a window-boundary vertex.  Interior
    vertices may not be stranded; boundary vertices may sit alone.  Keys are
    canonical partitions, values are edge-id tuples in ascending mask order.
    """
    edges = w.internal_edges
    if len(edges) > ENUMERATION_INTERNAL_EDGE_CAP:
        raise CapacityError(
            f"window has {len(edges)} internal edges, enumeration cap is "
            f"{ENUMERATION_INTERNAL_EDGE_CAP}"
        )
    g = w.host
    verts = sorted(w.vertices)
    local = {v: i for i, v in enumerate(verts)}
    nloc = len(verts)
    boundary_local = {local[v] for v in w.window_boundary}
    ends = [(local[g.edges[e][0]], local[g.edges[e][1]]) for e in edges]

    groups: dict[tuple, list[tuple]] = {}
    order = sorted(range(len(edges)), key=lambda i: edges[i])
    parent = list(range(nloc))
    size = [1] * nloc

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    chosen: list[int] = []

    def record():
        comp: dict[int, list[int]] = {}
        for v in range(nloc):
            comp.setdefault(find(v), []).append(v)
        blocks = []
        for vs in comp.values():
            bd = [verts[v] for v in vs if v in boundary_local]
            if not bd:
                return  # stranded interior component
            blocks.append(tuple(sorted(bd)))
        blocks.sort(key=lambda b: b[0])
        key = tuple(blocks)
        ids = tuple(sorted(edges[i] for i in chosen))
        groups.setdefault(key, []).append(ids)

    def rec(i):
        if i == len(order):
            record()
            return
        rec(i + 1)
        u, v = ends[order[i]]
        ru, rv = find(u), find(v)
        if ru != rv:
            if size[ru] > size[rv]:
                ru, rv = rv, ru
            parent[ru] = rv
            size[rv] += size[ru]
            chosen.append(order[i])
            rec(i + 1)
            chosen.pop()
            size[rv] -= size[ru]
            parent[ru] = ru

    rec(0)
    for key in groups:
        groups[key].sort()
    return groups


_pattern_cache: dict[tuple, dict] = {}


def _patterns_for(w: Window) -> dict[tuple, list[tuple]]:
    key = (id(w.host), tuple(sorted(w.vertices)))
    if key not in _pattern_cache:
        _pattern_cache[key] = admissible_window_patterns(w)
    return _pattern_cache[key]


def compatible_window_sets(w: Window, partition: BoundaryPartition) -> list[tuple]:
    """The admissible inside edge sets inducing exactly this partition."""
    return _patterns_for(w).get(partition.canonical_form, [])


def weak_gibbs_resample(g: Graph, w: Window, f: Forest, rng: RandomStream) -> Forest:
    """Redraw the window uniformly among edge sets with the same inside relation.

    Every edge outside the window is kept.  The replacement inside edge set is
    uniform over the admissible sets that induce the current boundary
    partition; preserving the partition is what keeps the global configuration
    acyclic and keeps every component in contact with its outside attachments.
    """
    if w.is_full():
        raise ValidationError("window must be strictly smaller than the graph")
    inside, outside = split_forest_at_window(f, w)
    current = inside_relation(w, inside)

    if len(w.internal_edges) <= ENUMERATION_INTERNAL_EDGE_CAP:
        pool = compatible_window_sets(w, current)
        if not pool:
            raise SpanforestError("current window pattern missing from its own class")
        pick = pool[rng.randint(len(pool))]
    else:
        pick = _sample_pattern_unenumerated(w, current, rng)
    return Forest(g, list(outside) + list(pick))


def _sample_pattern_unenumerated(w: Window, partition: BoundaryPartition, rng):
    """Sampling path for windows too big to enumerate.

    The only proposal distribution available is the rooted-forest law of the
    window graph rooted at its boundary.  Its draws always induce the
    all-singletons partition and cover every vertex, so for that partition the
    first proposal is accepted; for any other partition no proposal can ever
    match and we fail fast instead of burning the rejection budget.
    """
    singletons = tuple((b,) for b in sorted(w.window_boundary))
    if partition.canonical_form != singletons:
        raise CapacityError(
            "window exceeds the enumeration cap and its boundary partition is "
            "not all singletons; no sampler is available for this class"
        )
    g = w.host
    verts = sorted(w.vertices)
    local = {v: i for i, v in enumerate(verts)}
    local_edges = [(local[g.edges[e][0]], local[g.edges[e][1]]) for e in w.internal_edges]
    wg = Graph(len(verts), local_edges)
    if not wg.is_connected:
        raise CapacityError("disconnected window beyond the enumeration cap")
    roots_local = sorted(local[v] for v in w.window_boundary)
    proposal = wilson_rooted_forest(wg, roots_local, rng)
    return tuple(sorted(w.internal_edges[e] for e in proposal.edge_ids))


# -- escape and trunk closures ------------------------------------------------------


@dataclass(frozen=True)
class EscapeClosure:
    """Escape points of a vertex set and the region they seal off.

    ``c_f`` holds the vertices of C that start a forest path to the host
    boundary meeting C only at its first vertex; ``c_tilde`` adds every vertex
    whose forest component, after deleting c_f, fails to reach the host
    boundary.
    """

    window: frozenset
    c_f: frozenset
    c_tilde: frozenset


def escape_closure(g: Graph, f: Forest, C) -> EscapeClosure:
    C = frozenset(int(v) for v in C)
    if any(not 0 <= v < g.n for v in C):
        raise ValidationError("closure vertex out of range")
    adj = _forest_adjacency(g, f)
    boundary = g.boundary

    c_f = set()
    for v in C:
        # search within the forest, banning C vertices after the start
        stack = [v]
        seen = {v}
        reached = v in boundary
        while stack and not reached:
            u = stack.pop()
            for nb in adj[u]:
                if nb in seen or (nb in C and nb != v):
                    continue
                if nb in boundary:
                    reached = True
                    break
                seen.add(nb)
                stack.append(nb)
        if reached:
            c_f.add(v)

    # components of the forest minus c_f; those missing the boundary are sealed
    c_tilde = set(c_f)
    seen_global: set[int] = set()
    for v in range(g.n):
        if v in c_f or v in seen_global:
            continue
        comp = [v]
        seen_global.add(v)
        stack = [v]
        touches = v in boundary
        while stack:
            u = stack.pop()
            for nb in adj[u]:
                if nb in c_f or nb in seen_global:
                    continue
                seen_global.add(nb)
                comp.append(nb)
                stack.append(nb)
                if nb in boundary:
                    touches = True
        if not touches:
            c_tilde.update(comp)
    return EscapeClosure(window=C, c_f=frozenset(c_f), c_tilde=frozenset(c_tilde))


@dataclass(frozen=True)
class TrunkClosure:
    """Region sealed off by the first and last crossing of a trunk through C."""

    window: frozenset
    c_1: int
    c_2: int
    region: frozenset


def trunk_closure(g: Graph, f: Forest, trunk: WalkPath, C) -> TrunkClosure:
    """Seal the stretch of a trunk between its first and last visit to C.

    The region is the forest component, after deleting the two cut vertices,
    that contains the trunk segment strictly between them, kept only when it
    cannot reach the host boundary; the cut vertices themselves always belong
    to the region.
    """
    C = frozenset(int(v) for v in C)
    hits = [v for v in trunk.vertices if v in C]
    if not hits:
        raise ValidationError("trunk does not meet C")
    c_1, c_2 = hits[0], hits[-1]
    if c_1 == c_2:
        return TrunkClosure(window=C, c_1=c_1, c_2=c_2, region=frozenset({c_1}))

    i1 = trunk.vertices.index(c_1)
    i2 = len(trunk.vertices) - 1 - tuple(reversed(trunk.vertices)).index(c_2)
    between = trunk.vertices[i1 + 1 : i2]

    adj = _forest_adjacency(g, f)
    cut = {c_1, c_2}
    region = {c_1, c_2}
    if between:
        start = between[0]
        comp = {start}
        stack = [start]
        touches_boundary = start in g.boundary
        while stack:
            u = stack.pop()
            for nb in adj[u]:
                if nb in cut or nb in comp:
                    continue
                comp.add(nb)
                stack.append(nb)
                if nb in g.boundary:
                    touches_boundary = True
        if not touches_boundary:
            region |= comp
    return TrunkClosure(window=C, c_1=c_1, c_2=c_2, region=frozenset(region))


def _forest_adjacency(g: Graph, f: Forest) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for eid in f.edge_ids:
        u, v = g.edges[eid]
        adj[u].append(v)
        adj[v].append(u)
    return adj
