"""Entropy per site: exact log-counts, a quadrature limit oracle, and plug-in
estimation from samples.

For a uniform measure the per-site entropy of a finite graph is just
log(support size)/|V|, so the exact methods reduce to counting.  The
two-dimensional limit constant is evaluated independently by quadrature of
log(4 - 2cos x - 2cos y) over the torus of frequencies; the integrand has an
integrable log singularity at the origin, handled by an offset (midpoint)
tensor grid plus one Richardson step, which pushes the quadrature error below
1e-8 at 512 points per axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graphs import Forest, Graph, Window, build_box, build_torus, induced_window
from .kirchhoff import count_rooted_forests, count_spanning_trees, enumerate_forests
from .randomness import RandomStream
from .sampler import sample_boundary_mode

#: plug-in estimation caps: window pattern space and minimum sample count.
PLUGIN_INTERNAL_EDGE_CAP = 24
PLUGIN_MIN_SAMPLES = 100


@dataclass(frozen=True)
class EntropyRecord:
    descriptor: str
    vertex_count: int
    log_count: float
    per_site: float
    method: str


@dataclass(frozen=True)
class EntropyReport:
    records: tuple
    limit_estimate: float | None = None

    def __post_init__(self):
        for r in self.records:
            if r.per_site < -1e-12:
                raise ValidationError("per-site entropy cannot be negative")


def per_site_entropy_sequence(dim: int, sides, method: str) -> EntropyReport:
    """Per-site log-counts across box sides.

    ``wired-exact`` counts forests rooted at the box boundary (one root per
    component) by Laplacian minors.  ``mu-gn-enumerated`` counts forests in
    which every component touches the boundary, by exhaustive enumeration,
    and is therefore limited to small boxes.
    """
    if method not in ("wired-exact", "mu-gn-enumerated"):
        raise ValidationError(f"unknown entropy method {method!r}")
    records = []
    for side in sides:
        g = build_box(dim, side)
        if method == "wired-exact":
            if g.boundary:
                lc = count_rooted_forests(g, g.boundary)
            else:
                lc = count_spanning_trees(g)
            log_count = lc.value
        else:
            forests = enumerate_forests(g, "boundary-at-least-one")
            log_count = math.log(len(forests))
        records.append(
            EntropyRecord(
                descriptor=f"box {dim}d side {side}",
                vertex_count=g.n,
                log_count=log_count,
                per_site=log_count / g.n,
                method=method,
            )
        )
    limit = torus_entropy_oracle(dim) if dim in (1, 2) else None
    return EntropyReport(records=tuple(records), limit_estimate=limit)


def torus_entropy_oracle(dim: int, quadrature_points: int = 512) -> float:
    """Limit of the per-site log spanning-tree count on growing tori.

    dim 1 is exactly zero.  dim 2 integrates log(4 - 2cos x - 2cos y) over
    the full period with a tensor midpoint rule at ``quadrature_points`` and
    ``quadrature_points // 2`` per axis, Richardson-combined to cancel the
    h^2 term the corner singularity leaves behind.
    """
    if dim == 1:
        return 0.0
    if dim != 2:
        raise ValidationError("oracle available for dim 1 and 2 only")
    if quadrature_points < 64:
        raise ValidationError("need at least 64 quadrature points")

    def midpoint(n: int) -> float:
        x = (np.arange(n) + 0.5) * (2.0 * math.pi / n)
        c = 2.0 * np.cos(x)
        return float(np.mean(np.log(4.0 - c[:, None] - c[None, :])))

    coarse = midpoint(quadrature_points // 2)
    fine = midpoint(quadrature_points)
    return (4.0 * fine - coarse) / 3.0


def torus_tree_per_site(side: int) -> float:
    """Exact per-site log spanning-tree count of the 2D torus (matrix-tree)."""
    g = build_torus(2, side)
    return count_spanning_trees(g).value / g.n


# -- plug-in estimation --------------------------------------------------------------


def window_pattern(f: Forest, w: Window) -> tuple:
    internal = set(w.internal_edges)
    return tuple(e for e in f.edge_ids if e in internal)


def plugin_entropy(samples, window: Window):
    """Plug-in entropy of the window pattern distribution, per window vertex.

    Returns (estimate, jackknife standard error).  Plug-in estimates bias low;
    callers compare with tolerances that absorb that.
    """
    samples = list(samples)
    n = len(samples)
    if n < PLUGIN_MIN_SAMPLES:
        raise ValidationError(f"need at least {PLUGIN_MIN_SAMPLES} samples")
    if not window.internal_edges:
        raise ValidationError("degenerate window: no internal edges")
    if len(window.internal_edges) > PLUGIN_INTERNAL_EDGE_CAP:
        raise ValidationError(
            f"window pattern space exceeds 2^{PLUGIN_INTERNAL_EDGE_CAP}"
        )
    counts: dict[tuple, int] = {}
    for f in samples:
        p = window_pattern(f, window)
        counts[p] = counts.get(p, 0) + 1
    norm = len(window.vertices)

    def plug(count_items, total):
        h = 0.0
        for c in count_items:
            if c > 0:
                q = c / total
                h -= q * math.log(q)
        return h / norm

    estimate = plug(counts.values(), n)

    # leave-one-out values grouped by the pattern of the removed sample
    loo = {}
    for pattern in counts:
        reduced = [counts[k] - (1 if k == pattern else 0) for k in counts]
        loo[pattern] = plug(reduced, n - 1)
    mean_loo = sum(counts[p] * loo[p] for p in counts) / n
    var = sum(counts[p] * (loo[p] - mean_loo) ** 2 for p in counts)
    se = math.sqrt((n - 1) / n * var)
    return estimate, se


# -- entropy gap experiment ----------------------------------------------------------


@dataclass(frozen=True)
class GapReport:
    side: int
    competitor: str
    competitor_entropy: float
    competitor_se: float
    wired_per_site: float
    torus_oracle: float
    gap_declared: bool


def entropy_gap_experiment(
    side: int,
    competitor="all-horizontal",
    samples: int = 400,
    seed: int = 0,
    window_corner=None,
    window_extent=(2, 2),
) -> GapReport:
    """Compare a competitor measure's window entropy with the wired per-site value.

    The competitor is either the deterministic all-horizontal-edges forest or
    a callable ``(graph, stream) -> Forest``.  A gap is declared when the
    competitor plug-in entropy plus three standard errors still sits below
    the wired-exact per-site value.
    """
    if side < 4:
        raise ValidationError("need side >= 4")
    g = build_box(2, side)
    if window_corner is None:
        c = side // 2 - 1
        window_corner = (c, c)
    verts = [
        g.vertex_at((window_corner[0] + dx, window_corner[1] + dy))
        for dx in range(window_extent[0])
        for dy in range(window_extent[1])
    ]
    w = induced_window(g, verts)

    if competitor == "all-horizontal":
        from .foreststats import all_horizontal_forest

        name = "all-horizontal"
        fixed = all_horizontal_forest(g)
        draws = [fixed] * max(samples, PLUGIN_MIN_SAMPLES)
    elif callable(competitor):
        name = getattr(competitor, "__name__", "user-sampler")
        rng = RandomStream(seed)
        draws = [competitor(g, rng) for _ in range(max(samples, PLUGIN_MIN_SAMPLES))]
    else:
        raise ValidationError("competitor must be 'all-horizontal' or callable")

    comp_entropy, comp_se = plugin_entropy(draws, w)
    wired = count_rooted_forests(g, g.boundary).value / g.n
    oracle = torus_entropy_oracle(2)
    return GapReport(
        side=side,
        competitor=name,
        competitor_entropy=comp_entropy,
        competitor_se=comp_se,
        wired_per_site=wired,
        torus_oracle=oracle,
        gap_declared=comp_entropy + 3 * comp_se < wired,
    )


def wired_sampler(g: Graph, rng: RandomStream) -> Forest:
    """Competitor callable drawing from the wired measure."""
    return sample_boundary_mode(g, "wired", rng)
