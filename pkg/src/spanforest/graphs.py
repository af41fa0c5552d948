"""Finite multigraphs, lattice boxes and tori, windows, and vertex quotients.

Vertices are dense integers ``0..n-1`` and edges are dense integer ids into an
ordered edge list.  Parallel edges and self-loops are first class: quotient
construction creates both, samplers treat parallel edges as distinct slots
with equal weight, and self-loops stay in the edge list (flagged) so edge ids
remain stable across quotients.

Graphs and windows are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .errors import CapacityError, ValidationError

#: Hard cap on generated lattice sizes; keeps exact linear algebra and edge
#: bit-sets practical at desk scale.
VERTEX_LIMIT = 1 << 24


class UnionFind:
    """Union-find with path halving, for acyclicity and component tracking."""

    __slots__ = ("parent", "merges")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.merges = 0

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        """Merge the classes of a and b; False if already joined."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra < rb:  # keep the smaller id as representative
            self.parent[rb] = ra
        else:
            self.parent[ra] = rb
        self.merges += 1
        return True

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v in range(len(self.parent)):
            out.setdefault(self.find(v), []).append(v)
        return out


class Graph:
    """Immutable finite multigraph with a designated boundary vertex set.

    Parameters
    ----------
    n : number of vertices (ids 0..n-1)
    edges : iterable of (u, v) pairs; order fixes the edge ids
    boundary : vertex ids forming the boundary (may be empty)
    coords : optional tuple mapping vertex -> integer coordinate tuple
    orbit_label : optional tuple mapping vertex -> small integer orbit class
    """

    __slots__ = (
        "n",
        "edges",
        "boundary",
        "coords",
        "orbit_label",
        "incidence",
        "self_loops",
        "is_connected",
        "_hash_cache",
    )

    def __init__(self, n, edges, boundary=(), coords=None, orbit_label=None):
        if n < 0:
            raise ValidationError("vertex count must be nonnegative")
        edges = tuple((int(u), int(v)) for u, v in edges)
        for eid, (u, v) in enumerate(edges):
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge {eid} endpoint out of range: ({u}, {v})")
        boundary = frozenset(int(b) for b in boundary)
        if any(not 0 <= b < n for b in boundary):
            raise ValidationError("boundary vertex out of range")
        self.n = n
        self.edges = edges
        self.boundary = boundary
        self.coords = tuple(tuple(c) for c in coords) if coords is not None else None
        self.orbit_label = tuple(orbit_label) if orbit_label is not None else None
        if self.coords is not None and len(self.coords) != n:
            raise ValidationError("coords must cover every vertex")
        if self.orbit_label is not None and len(self.orbit_label) != n:
            raise ValidationError("orbit_label must cover every vertex")

        # Incident (neighbor, edge_id) slots per vertex; self-loops excluded
        # (walks never traverse them, trees never contain them).
        inc: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        loops = []
        for eid, (u, v) in enumerate(edges):
            if u == v:
                loops.append(eid)
                continue
            inc[u].append((v, eid))
            inc[v].append((u, eid))
        self.incidence = tuple(tuple(s) for s in inc)
        self.self_loops = frozenset(loops)
        self.is_connected = self._check_connected()
        self._hash_cache = None

    def _check_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = bytearray(self.n)
        stack = [0]
        seen[0] = 1
        count = 1
        while stack:
            u = stack.pop()
            for v, _ in self.incidence[u]:
                if not seen[v]:
                    seen[v] = 1
                    count += 1
                    stack.append(v)
        return count == self.n

    # -- queries ---------------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        """Number of incident non-loop edge slots."""
        return len(self.incidence[v])

    def edge_between(self, u: int, v: int):
        """Lowest edge id joining u and v, or None."""
        for w, eid in self.incidence[u]:
            if w == v:
                return eid
        return None

    def vertex_at(self, coord) -> int:
        """Vertex id carrying the given lattice coordinate."""
        if self.coords is None:
            raise ValidationError("graph has no coordinates")
        coord = tuple(coord)
        for v, c in enumerate(self.coords):
            if c == coord:
                return v
        raise ValidationError(f"no vertex at {coord}")

    def bfs_distances(self, sources, cutoff=None) -> list[int]:
        """Hop distance from the source set to every vertex (-1 = unreached)."""
        dist = [-1] * self.n
        frontier = []
        for s in sources:
            if dist[s] == -1:
                dist[s] = 0
                frontier.append(s)
        d = 0
        while frontier and (cutoff is None or d < cutoff):
            d += 1
            nxt = []
            for u in frontier:
                for v, _ in self.incidence[u]:
                    if dist[v] == -1:
                        dist[v] = d
                        nxt.append(v)
            frontier = nxt
        return dist

    def canonical_text(self) -> str:
        """Serialized form; also the hashing basis for forest files."""
        lines = [f"{self.n} {len(self.edges)} {len(self.boundary)}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        lines.append(" ".join(str(b) for b in sorted(self.boundary)))
        return "\n".join(lines) + "\n"

    def content_hash(self) -> str:
        if self._hash_cache is None:
            self._hash_cache = hashlib.sha256(self.canonical_text().encode()).hexdigest()
        return self._hash_cache

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self.edges)}, boundary={len(self.boundary)})"


class Forest:
    """Edge subset of a host graph inducing no cycle.

    Component structure is derived on construction (which is also the
    acyclicity check).  ``roots``, when given, must hit every component.
    """

    __slots__ = ("host", "edge_ids", "roots", "_uf", "_mask")

    def __init__(self, host: Graph, edge_ids, roots=None):
        self.host = host
        edge_ids = tuple(sorted(set(int(e) for e in edge_ids)))
        uf = UnionFind(host.n)
        for eid in edge_ids:
            if not 0 <= eid < len(host.edges):
                raise ValidationError(f"unknown edge id {eid}")
            u, v = host.edges[eid]
            if u == v or not uf.union(u, v):
                raise ValidationError(f"edge {eid} closes a cycle")
        self.edge_ids = edge_ids
        self._uf = uf
        self._mask = None
        if roots is not None:
            roots = frozenset(int(r) for r in roots)
            covered = {uf.find(r) for r in roots}
            all_comps = {uf.find(v) for v in range(host.n)}
            if covered < all_comps:
                raise ValidationError("some component has no root")
        self.roots = roots

    @property
    def mask(self) -> int:
        """Edge bit-set as an integer (bit i = edge i present)."""
        if self._mask is None:
            m = 0
            for eid in self.edge_ids:
                m |= 1 << eid
            self._mask = m
        return self._mask

    def component_id(self, v: int) -> int:
        return self._uf.find(v)

    def component_count(self) -> int:
        return self.host.n - self._uf.merges

    def components(self) -> list[list[int]]:
        """Vertex lists of all components, ordered by smallest member."""
        groups = self._uf.groups()
        return [groups[k] for k in sorted(groups)]

    def connected(self, u: int, v: int) -> bool:
        return self._uf.find(u) == self._uf.find(v)

    def is_spanning_tree(self) -> bool:
        return self.component_count() == 1 and len(self.edge_ids) == self.host.n - 1

    def __eq__(self, other):
        return (
            isinstance(other, Forest)
            and self.host is other.host
            and self.edge_ids == other.edge_ids
        )

    def __hash__(self):
        return hash((id(self.host), self.edge_ids))

    def __repr__(self):
        return f"Forest(edges={len(self.edge_ids)}, components={self.component_count()})"


@dataclass(frozen=True)
class Window:
    """Induced vertex window of a host graph.

    ``window_boundary`` is computed, never supplied: it is exactly the set of
    window vertices adjacent to a host vertex outside the window.
    ``internal_edges`` have both ends inside; ``straddling_edges`` exactly one.
    """

    host: Graph
    vertices: frozenset
    window_boundary: frozenset
    internal_edges: tuple
    straddling_edges: tuple

    def is_full(self) -> bool:
        return len(self.vertices) == self.host.n


def induced_window(g: Graph, vertices) -> Window:
    """Window on the given vertex set with its computed inner boundary."""
    vset = frozenset(int(v) for v in vertices)
    if not vset:
        raise ValidationError("window needs at least one vertex")
    if any(not 0 <= v < g.n for v in vset):
        raise ValidationError("window vertex out of range")
    internal, straddling = [], []
    wb = set()
    for eid, (u, v) in enumerate(g.edges):
        inside = (u in vset) + (v in vset)
        if inside == 2:
            internal.append(eid)
        elif inside == 1:
            straddling.append(eid)
            wb.add(u if u in vset else v)
    return Window(
        host=g,
        vertices=vset,
        window_boundary=frozenset(wb),
        internal_edges=tuple(internal),
        straddling_edges=tuple(straddling),
    )


# -- lattice generators ----------------------------------------------------------


def _check_capacity(dim: int, side: int):
    if dim < 1 or side < 1:
        raise ValidationError("dim and side must be positive")
    if side**dim > VERTEX_LIMIT:
        raise CapacityError(f"{side}^{dim} vertices exceeds the {VERTEX_LIMIT} limit")


def build_box(dim: int, side: int) -> Graph:
    """Axis-aligned lattice box on {0..side-1}^dim with nearest-neighbor edges.

    The boundary is the set of vertices adjacent, inside the infinite lattice,
    to a vertex outside the box, i.e. those with some coordinate 0 or side-1.
    """
    _check_capacity(dim, side)
    n = side**dim
    coords = []
    for v in range(n):
        c, rest = [], v
        for _ in range(dim):
            c.append(rest % side)
            rest //= side
        coords.append(tuple(c))
    edges = []
    strides = [side**a for a in range(dim)]
    for v in range(n):
        c = coords[v]
        for axis in range(dim):
            if c[axis] + 1 < side:
                edges.append((v, v + strides[axis]))
    boundary = [v for v in range(n) if any(x in (0, side - 1) for x in coords[v])]
    return Graph(n, edges, boundary, coords=coords, orbit_label=[0] * n)


def build_torus(dim: int, side: int) -> Graph:
    """Lattice torus (Z/side)^dim; vertex transitive, empty boundary.

    side >= 3 keeps the nearest-neighbor edges free of parallel duplicates.
    """
    if side < 3:
        raise ValidationError("torus needs side >= 3")
    _check_capacity(dim, side)
    n = side**dim
    coords = []
    for v in range(n):
        c, rest = [], v
        for _ in range(dim):
            c.append(rest % side)
            rest //= side
        coords.append(tuple(c))
    strides = [side**a for a in range(dim)]
    edges = []
    for v in range(n):
        c = coords[v]
        for axis in range(dim):
            x = c[axis]
            wrap = v - x * strides[axis] + ((x + 1) % side) * strides[axis]
            edges.append((v, wrap))
    return Graph(n, edges, (), coords=coords, orbit_label=[0] * n)


# -- quotients ---------------------------------------------------------------------


@dataclass(frozen=True)
class Contraction:
    """Quotient graph plus correspondence maps back to the original.

    ``vertex_map[v]`` is the quotient id of original vertex v, and quotient
    edge i is original edge ``edge_map[i]`` (the edge multiset is preserved,
    so the map is the identity; kept explicit for composed quotients).
    """

    graph: Graph
    vertex_map: tuple
    edge_map: tuple

    def pull_back_edges(self, quotient_edge_ids) -> list[int]:
        return [self.edge_map[e] for e in quotient_edge_ids]


def contract(g: Graph, classes) -> Contraction:
    """Quotient of g identifying each class of vertices to a single vertex.

    Classes must be disjoint; singleton and empty classes are rejected as
    likely caller errors.  Edges keep their ids; an edge inside one class
    becomes a flagged self-loop.  Quotient vertex ids are assigned by first
    appearance in original vertex order, so the result is deterministic.
    """
    cleaned = []
    seen = set()
    for cls in classes:
        cls = sorted(int(v) for v in cls)
        if not cls:
            raise ValidationError("empty contraction class")
        for v in cls:
            if not 0 <= v < g.n:
                raise ValidationError(f"unknown vertex {v} in contraction class")
            if v in seen:
                raise ValidationError(f"vertex {v} appears in two classes")
            seen.add(v)
        cleaned.append(cls)

    rep = list(range(g.n))
    for cls in cleaned:
        for v in cls:
            rep[v] = cls[0]

    vertex_map = [-1] * g.n
    nxt = 0
    for v in range(g.n):
        if vertex_map[rep[v]] == -1:
            vertex_map[rep[v]] = nxt
            nxt += 1
        vertex_map[v] = vertex_map[rep[v]]

    q_edges = [(vertex_map[u], vertex_map[v]) for u, v in g.edges]
    q_boundary = {vertex_map[b] for b in g.boundary}
    quotient = Graph(nxt, q_edges, q_boundary)
    return Contraction(
        graph=quotient,
        vertex_map=tuple(vertex_map),
        edge_map=tuple(range(len(g.edges))),
    )


# -- text formats ------------------------------------------------------------------


def save_graph(g: Graph, path):
    """Write the graph text format: header, edge lines, boundary line."""
    with open(path, "w") as fh:
        fh.write(g.canonical_text())


def load_graph(path) -> Graph:
    with open(path) as fh:
        text = fh.read()
    return parse_graph(text)


def parse_graph(text: str) -> Graph:
    lines = text.splitlines()
    if not lines:
        raise ValidationError("empty graph file")
    try:
        n, m, b = (int(x) for x in lines[0].split())
    except ValueError as exc:
        raise ValidationError(f"bad graph header: {lines[0]!r}") from exc
    if len(lines) < 1 + m + 1:
        raise ValidationError("graph file truncated")
    edges = []
    for i in range(m):
        parts = lines[1 + i].split()
        if len(parts) != 2:
            raise ValidationError(f"bad edge line: {lines[1 + i]!r}")
        edges.append((int(parts[0]), int(parts[1])))
    boundary = [int(x) for x in lines[1 + m].split()]
    if len(boundary) != b:
        raise ValidationError(f"boundary line has {len(boundary)} ids, header says {b}")
    return Graph(n, edges, boundary)


def save_forest(f: Forest, path):
    """Forest text format: host hash line, then the included edge ids."""
    with open(path, "w") as fh:
        fh.write(f.host.content_hash() + "\n")
        fh.write(" ".join(str(e) for e in f.edge_ids) + "\n")


def load_forest(path, host: Graph) -> Forest:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValidationError("empty forest file")
    if lines[0].strip() != host.content_hash():
        raise ValidationError("forest file host hash does not match the given graph")
    ids = [int(x) for x in lines[1].split()] if len(lines) > 1 else []
    return Forest(host, ids)
