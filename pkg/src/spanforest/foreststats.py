"""Component, trunk, and near-intersection statistics, plus exact hitting
probabilities.

A *trunk* here is the finite stand-in for the two-sided spine of a tree: the
forest path joining two boundary contacts of a component, with the contact
pair chosen deterministically (longest path, ties by smallest vertex ids).
Near-intersection counting treats "at distance k" as "within distance k",
measured by exact BFS in the host graph.  The ``estimate_nu_A`` Monte Carlo
follows the rooted-forest construction: sample a forest rooted at a target
set, read off the paths from a source set, and score disjointness together
with the near-intersection count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ValidationError
from .graphs import Forest, Graph
from .randomness import RandomStream
from .sampler import RootedSampler, WalkPath

# -- component statistics -----------------------------------------------------------


@dataclass(frozen=True)
class ComponentStats:
    component_count: int
    size_histogram: dict
    boundary_touch_count: int


def component_stats(f: Forest) -> ComponentStats:
    """Exact component counts from the forest's union-find."""
    comps = f.components()
    hist: dict[int, int] = {}
    touch = 0
    boundary = f.host.boundary
    for vs in comps:
        hist[len(vs)] = hist.get(len(vs), 0) + 1
        if any(v in boundary for v in vs):
            touch += 1
    return ComponentStats(
        component_count=len(comps),
        size_histogram=hist,
        boundary_touch_count=touch,
    )


# -- trunk detection ----------------------------------------------------------------


@dataclass(frozen=True)
class TrunkSet:
    """Vertex-disjoint boundary-to-boundary forest paths, one per component.

    ``orientation[i]`` flips trunk i end to end when reading off its first
    and last vertices; detection emits all-False and `orient` draws fair
    coins, one per trunk.
    """

    forest: Forest
    trunks: tuple
    orientation: tuple

    def __post_init__(self):
        seen: set[int] = set()
        boundary = self.forest.host.boundary
        for t in self.trunks:
            if t.vertices[0] not in boundary or t.vertices[-1] not in boundary:
                raise ValidationError("trunk endpoints must lie on the host boundary")
            for v in t.vertices:
                if v in seen:
                    raise ValidationError("trunks must be vertex-disjoint")
                seen.add(v)

    def oriented_vertices(self, i: int) -> tuple:
        vs = self.trunks[i].vertices
        return tuple(reversed(vs)) if self.orientation[i] else vs

    def first_points(self) -> list[int]:
        """Entry ends of the trunks under the current orientation."""
        return [self.oriented_vertices(i)[0] for i in range(len(self.trunks))]

    def last_points(self) -> list[int]:
        """Exit ends of the trunks under the current orientation."""
        return [self.oriented_vertices(i)[-1] for i in range(len(self.trunks))]

    def orient(self, rng: RandomStream) -> "TrunkSet":
        flips = tuple(rng.coin() for _ in self.trunks)
        return TrunkSet(forest=self.forest, trunks=self.trunks, orientation=flips)


def detect_trunks(g: Graph, f: Forest) -> TrunkSet:
    """Extract one trunk per component that touches the boundary twice.

    Within a component the trunk joins the pair of boundary contacts with the
    longest forest path between them; ties break toward the smallest (u, v)
    pair.  Components with fewer than two boundary contacts emit nothing.
    """
    if not g.boundary:
        raise ValidationError("trunk detection needs a nonempty boundary")
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for eid in f.edge_ids:
        u, v = g.edges[eid]
        adj[u].append(v)
        adj[v].append(u)

    trunks = []
    for comp in f.components():
        contacts = sorted(v for v in comp if v in g.boundary)
        if len(contacts) < 2:
            continue
        best = None  # (-length, u, v)
        dist_cache = {}
        for u in contacts:
            dist_cache[u] = _tree_distances(adj, u)
        for i, u in enumerate(contacts):
            du = dist_cache[u]
            for v in contacts[i + 1 :]:
                cand = (-du[v], u, v)
                if best is None or cand < best:
                    best = cand
        _, u, v = best
        trunks.append(WalkPath(vertices=tuple(_tree_path(adj, u, v))))
    trunks.sort(key=lambda t: t.vertices[0])
    return TrunkSet(forest=f, trunks=tuple(trunks), orientation=(False,) * len(trunks))


def _tree_distances(adj, source) -> dict[int, int]:
    dist = {source: 0}
    frontier = [source]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = d
                    nxt.append(v)
        frontier = nxt
    return dist


def _tree_path(adj, u, v) -> list[int]:
    parent = {u: None}
    stack = [u]
    while stack:
        x = stack.pop()
        if x == v:
            break
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                stack.append(y)
    path = [v]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def trunk_root_targets(g: Graph, f: Forest, trunks: TrunkSet) -> frozenset:
    """Exit points of all trunks plus one boundary contact per trunkless tree.

    The augmentation vertex for a trunkless component is its smallest
    boundary contact; components that never touch the boundary contribute
    nothing.
    """
    targets = set(trunks.last_points())
    trunk_components = {f.component_id(t.vertices[0]) for t in trunks.trunks}
    for comp in f.components():
        cid = f.component_id(comp[0])
        if cid in trunk_components:
            continue
        contacts = sorted(v for v in comp if v in g.boundary)
        if contacts:
            targets.add(contacts[0])
    return frozenset(targets)


# -- near intersections -------------------------------------------------------------


@dataclass(frozen=True)
class NearIntersectionConfig:
    """Counting radius and eligibility filter.

    ``margin`` is the minimum distance from the host boundary for a vertex to
    be counted (defaults to k); ``orbit_filter`` restricts counting to one
    orbit label when the host carries labels.
    """

    k: int
    orbit_filter: int | None = None
    margin: int | None = None

    def __post_init__(self):
        if self.k < 0:
            raise ValidationError("k must be nonnegative")
        if self.margin is not None and self.margin < 0:
            raise ValidationError("margin must be nonnegative")

    @property
    def effective_margin(self) -> int:
        return self.k if self.margin is None else self.margin


def eligible_vertices(g: Graph, cfg: NearIntersectionConfig) -> set:
    """Vertices counted by the near-intersection statistics.

    At least ``margin`` from the host boundary and, when a filter is set,
    carrying the matching orbit label.  An empty host boundary means no
    margin constraint.
    """
    out = set()
    if g.boundary:
        dist = g.bfs_distances(g.boundary)
    else:
        dist = [10**9] * g.n
    for v in range(g.n):
        if dist[v] < cfg.effective_margin and dist[v] >= 0:
            continue
        if cfg.orbit_filter is not None:
            if g.orbit_label is None or g.orbit_label[v] != cfg.orbit_filter:
                continue
        out.add(v)
    return out


def count_near_intersections(g: Graph, trunks: TrunkSet, cfg: NearIntersectionConfig) -> int:
    """Ordered-pair near-intersection count over a trunk set.

    For each ordered pair of distinct trunks (R1, R2), count eligible vertices
    on R1 whose BFS distance to R2 is at most k.
    """
    paths = [t.vertices for t in trunks.trunks]
    return count_path_near_intersections(g, paths, cfg)


def count_path_near_intersections(g: Graph, paths, cfg: NearIntersectionConfig) -> int:
    eligible = eligible_vertices(g, cfg)
    total = 0
    for j, pj in enumerate(paths):
        dist_j = g.bfs_distances(pj, cutoff=cfg.k)
        near_j = {v for v in range(g.n) if 0 <= dist_j[v] <= cfg.k}
        for i, pi in enumerate(paths):
            if i == j:
                continue
            total += sum(1 for v in pi if v in eligible and v in near_j)
    return total


def count_fncp(g: Graph, paths, cfg: NearIntersectionConfig) -> list[int]:
    """Fresh near collision points per path, greedy scan in path order.

    For path r (r >= 2 in the given order), scan its vertices: the next FNCP
    is the first eligible vertex within distance k of some earlier path and
    at distance at least k from the previous FNCP.  The first path always
    scores zero.
    """
    vertex_lists = [p.vertices if isinstance(p, WalkPath) else tuple(p) for p in paths]
    eligible = eligible_vertices(g, cfg)
    counts = []
    earlier: set[int] = set()
    for r, verts in enumerate(vertex_lists):
        if r == 0:
            counts.append(0)
            earlier.update(verts)
            continue
        dist_earlier = g.bfs_distances(earlier, cutoff=cfg.k) if earlier else [-1] * g.n
        n_fncp = 0
        last_fncp = None
        for v in verts:
            if v not in eligible:
                continue
            if not 0 <= dist_earlier[v] <= cfg.k:
                continue
            if last_fncp is not None and _bfs_distance(g, last_fncp, v) < cfg.k:
                continue
            n_fncp += 1
            last_fncp = v
        counts.append(n_fncp)
        earlier.update(verts)
    return counts


def _bfs_distance(g: Graph, u: int, v: int) -> int:
    if u == v:
        return 0
    dist = g.bfs_distances([u])
    return dist[v] if dist[v] >= 0 else 10**9


# -- nu(A) Monte Carlo --------------------------------------------------------------


@dataclass(frozen=True)
class NuEstimate:
    """Monte Carlo estimate of the disjoint-paths near-intersection event."""

    m: int
    samples: int
    hits: int
    estimate: float
    ci_low: float
    ci_high: float


def wilson_score_interval(hits: int, n: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    p = hits / n
    denom = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def estimate_nu_A(
    g: Graph,
    c_b,
    c_f_bar,
    m: int,
    cfg: NearIntersectionConfig,
    rng: RandomStream,
    samples: int,
) -> NuEstimate:
    """Estimate the probability that the paths from ``c_b`` are disjoint and
    carry at least ``m`` near intersections.

    Samples forests rooted at ``c_f_bar``, reads off the forest path from each
    source vertex to its root, and scores the event.  Empty source or root
    sets give estimate zero by convention.
    """
    result = estimate_nu_A_curve(g, c_b, c_f_bar, [m], cfg, rng, samples)
    return result[0]


def estimate_nu_A_curve(
    g: Graph,
    c_b,
    c_f_bar,
    m_values,
    cfg: NearIntersectionConfig,
    rng: RandomStream,
    samples: int,
) -> list[NuEstimate]:
    """Estimates for several thresholds m from one shared sample batch.

    Shared samples make the estimates exactly monotone in m, which the decay
    experiments rely on.
    """
    m_values = [int(m) for m in m_values]
    if any(m < 0 for m in m_values):
        raise ValidationError("m must be nonnegative")
    if samples <= 0:
        raise ValidationError("need a positive sample count")
    c_b = sorted(set(int(v) for v in c_b))
    c_f_bar = sorted(set(int(v) for v in c_f_bar))
    if not c_b or not c_f_bar:
        return [
            NuEstimate(m=m, samples=samples, hits=0, estimate=0.0, ci_low=0.0, ci_high=0.0)
        for m in m_values]
    if set(c_b) & set(c_f_bar):
        raise ValidationError("source and root sets must be disjoint")

    eligible = eligible_vertices(g, cfg)
    ball = _distance_balls(g, cfg.k)
    sampler = RootedSampler(g, c_f_bar)

    hits = {m: 0 for m in m_values}
    max_m = max(m_values)
    for _ in range(samples):
        pv, pe = sampler.draw_parents(rng)
        paths = [sampler.host_path_from(b, pv, pe) for b in c_b]
        path_sets = [set(p) for p in paths]
        if sum(len(s) for s in path_sets) != len(set().union(*path_sets)):
            continue  # paths collide
        count = _near_count_from_paths(paths, path_sets, eligible, ball, max_m)
        for m in m_values:
            if count >= m:
                hits[m] += 1

    out = []
    for m in m_values:
        h = hits[m]
        lo, hi = wilson_score_interval(h, samples)
        out.append(
            NuEstimate(
                m=m,
                samples=samples,
                hits=h,
                estimate=h / samples,
                ci_low=lo,
                ci_high=hi,
            )
        )
    return out


def _distance_balls(g: Graph, k: int) -> list[frozenset]:
    balls = []
    for v in range(g.n):
        dist = g.bfs_distances([v], cutoff=k)
        balls.append(frozenset(u for u in range(g.n) if 0 <= dist[u] <= k))
    return balls


def _near_count_from_paths(paths, path_sets, eligible, ball, stop_at) -> int:
    total = 0
    for i, pi in enumerate(paths):
        for j, sj in enumerate(path_sets):
            if i == j:
                continue
            for v in pi:
                if v in eligible and ball[v] & sj:
                    total += 1
            if total >= stop_at:
                return total
    return total


def fit_log_decay_slope(estimates: list[NuEstimate]):
    """Least-squares slope of log estimate against m, with a worst-case bound.

    Returns (slope, slope_upper): the point slope through the log estimates
    and the most adverse slope consistent with each point sitting anywhere in
    its confidence interval.  Zero estimates poison the log; callers should
    check ``ci_low > 0`` first.
    """
    ms = np.array([e.m for e in estimates], dtype=float)
    if len(ms) < 2:
        raise ValidationError("need at least two thresholds to fit a slope")
    if any(e.hits == 0 or e.ci_low <= 0 for e in estimates):
        raise ValidationError("zero-hit estimate; slope of logs undefined")
    ys = np.log([e.estimate for e in estimates])
    xbar = ms.mean()
    weights = (ms - xbar) / np.sum((ms - xbar) ** 2)
    slope = float(np.dot(weights, ys))
    worst = 0.0
    for w, e in zip(weights, estimates):
        worst += w * (math.log(e.ci_high) if w > 0 else math.log(e.ci_low))
    return slope, float(worst)


# -- hitting probabilities and harmonicity ------------------------------------------


def hitting_probability_exact(g: Graph, target, absorbing) -> np.ndarray:
    """P(random walk hits the target set before the absorbing set), per vertex.

    Solves the discrete Dirichlet problem: one on the target, zero on the
    absorbing set, harmonic elsewhere.  Vertices in both sets count as target.
    The solve is verified to residual 1e-10 and refined once if needed.
    """
    target = set(int(v) for v in target)
    absorbing = set(int(v) for v in absorbing) - target
    if not target and not absorbing:
        raise ValidationError("target and absorbing sets are both empty")
    if not g.is_connected:
        raise ValidationError("hitting probabilities need a connected graph")
    values = np.zeros(g.n)
    for v in target:
        values[v] = 1.0
    interior = [v for v in range(g.n) if v not in target and v not in absorbing]
    if not interior:
        return values
    idx = {v: i for i, v in enumerate(interior)}
    k = len(interior)
    rows, cols, vals = [], [], []
    rhs = np.zeros(k)
    diag = np.zeros(k)
    for u, v in g.edges:
        if u == v:
            continue
        iu, iv = idx.get(u), idx.get(v)
        if iu is not None:
            diag[iu] += 1
            if iv is None:
                rhs[iu] += values[v]
        if iv is not None:
            diag[iv] += 1
            if iu is None:
                rhs[iv] += values[u]
        if iu is not None and iv is not None:
            rows.extend((iu, iv))
            cols.extend((iv, iu))
            vals.extend((-1.0, -1.0))
    rows.extend(range(k))
    cols.extend(range(k))
    vals.extend(diag)
    L = sp.csc_matrix((vals, (rows, cols)), shape=(k, k))
    lu = spla.splu(L)
    x = lu.solve(rhs)
    residual = L @ x - rhs
    if np.max(np.abs(residual)) > 1e-10:
        x = x - lu.solve(residual)
        residual = L @ x - rhs
        if np.max(np.abs(residual)) > 1e-10:
            raise ValidationError("Dirichlet solve failed to reach residual 1e-10")
    for v, i in idx.items():
        values[v] = x[i]
    return values


@dataclass(frozen=True)
class HarmonicityReport:
    """Harmonic defect off the pinned sets and subharmonic margin on target.

    ``max_defect`` is max |value - neighbor mean| over free vertices;
    ``target_margin`` is min (neighbor mean - value) over target vertices,
    nonnegative exactly when the field is subharmonic where it is pinned.
    """

    max_defect: float
    max_defect_vertex: int | None
    target_margin: float
    target_margin_vertex: int | None
    defects: dict = field(repr=False, default_factory=dict)


def check_harmonicity(values, g: Graph, target, absorbing=None) -> HarmonicityReport:
    """Measure the harmonicity of a field pinned on target/absorbing sets.

    ``absorbing`` defaults to the host boundary minus the target.  Degree
    counts parallel edges, matching the walk's slot-uniform transitions.
    """
    target = set(int(v) for v in target)
    if absorbing is None:
        absorbing = set(g.boundary) - target
    else:
        absorbing = set(int(v) for v in absorbing) - target
    values = np.asarray(values, dtype=float)
    if values.shape != (g.n,):
        raise ValidationError("values must assign one number per vertex")

    neighbor_mean = np.zeros(g.n)
    for v in range(g.n):
        slots = g.incidence[v]
        if slots:
            neighbor_mean[v] = sum(values[u] for u, _ in slots) / len(slots)
        else:
            neighbor_mean[v] = values[v]

    max_defect = 0.0
    max_vertex = None
    defects = {}
    for v in range(g.n):
        if v in target or v in absorbing:
            continue
        d = abs(values[v] - neighbor_mean[v])
        defects[v] = d
        if d > max_defect:
            max_defect = d
            max_vertex = v

    margin = math.inf
    margin_vertex = None
    for v in sorted(target):
        m = neighbor_mean[v] - values[v]
        if m < margin:
            margin = m
            margin_vertex = v
    if margin is math.inf:
        margin = 0.0
    return HarmonicityReport(
        max_defect=max_defect,
        max_defect_vertex=max_vertex,
        target_margin=float(margin),
        target_margin_vertex=margin_vertex,
        defects=defects,
    )


# -- deterministic competitor forests ------------------------------------------------


def all_horizontal_forest(g: Graph) -> Forest:
    """Every axis-0 edge of a lattice box: one path per lattice row."""
    if g.coords is None:
        raise ValidationError("needs a coordinate-carrying lattice graph")
    ids = []
    for eid, (u, v) in enumerate(g.edges):
        cu, cv = g.coords[u], g.coords[v]
        if cu[1:] == cv[1:] and abs(cu[0] - cv[0]) == 1:
            ids.append(eid)
    return Forest(g, ids)
