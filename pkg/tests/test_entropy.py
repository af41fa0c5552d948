"""Per-site entropy sequences, the quadrature oracle, plug-in estimation, gaps."""

import math

import pytest

from spanforest import (
    Forest,
    RandomStream,
    UnionFind,
    ValidationError,
    build_box,
    contract,
    count_spanning_trees,
    entropy_gap_experiment,
    enumerate_forests,
    induced_window,
    per_site_entropy_sequence,
    plugin_entropy,
    sample_boundary_mode,
    torus_entropy_oracle,
    torus_tree_per_site,
)
from spanforest.entropy import wired_sampler
from spanforest.graphs import Graph


class TestPerSiteSequences:
    def test_1d_enumerated_is_log_n_over_n(self):
        rep = per_site_entropy_sequence(1, [2, 3, 5, 8], "mu-gn-enumerated")
        for r, n in zip(rep.records, [2, 3, 5, 8]):
            assert r.per_site == pytest.approx(math.log(n) / n, abs=1e-12)

    def test_1d_wired_is_log_nminus1_over_n(self):
        rep = per_site_entropy_sequence(1, [3, 5, 8, 20], "wired-exact")
        for r, n in zip(rep.records, [3, 5, 8, 20]):
            assert r.per_site == pytest.approx(math.log(n - 1) / n, abs=1e-12)

    def test_1d_tends_to_zero(self):
        rep = per_site_entropy_sequence(1, [4, 16, 64, 256], "wired-exact")
        vals = [r.per_site for r in rep.records]
        assert vals[0] > vals[1] > vals[2] > vals[3]
        assert vals[-1] < 0.03

    def test_2d_wired_monotone_below_oracle(self):
        rep = per_site_entropy_sequence(2, [4, 8, 16, 32], "wired-exact")
        vals = [r.per_site for r in rep.records]
        assert vals == sorted(vals)
        oracle = torus_entropy_oracle(2)
        assert all(v < oracle + 1e-3 for v in vals)

    def test_enumerated_vs_wired_gap_dim1(self):
        enum = per_site_entropy_sequence(1, [4, 6, 8], "mu-gn-enumerated")
        wired = per_site_entropy_sequence(1, [4, 6, 8], "wired-exact")
        gaps = [
            e.per_site - w.per_site for e, w in zip(enum.records, wired.records)
        ]
        for gap, n in zip(gaps, [4, 6, 8]):
            assert gap == pytest.approx((math.log(n) - math.log(n - 1)) / n, abs=1e-12)
        assert gaps[0] > gaps[1] > gaps[2]

    def test_unknown_method(self):
        with pytest.raises(ValidationError):
            per_site_entropy_sequence(1, [3], "magic")


class TestTorusOracle:
    def test_dim1_zero(self):
        assert torus_entropy_oracle(1) == 0.0

    def test_dim2_value(self):
        catalan = 0.915965594177219015
        assert torus_entropy_oracle(2, 512) == pytest.approx(4 * catalan / math.pi, abs=1e-6)

    def test_self_convergence(self):
        assert abs(torus_entropy_oracle(2, 1024) - torus_entropy_oracle(2, 512)) < 1e-6

    def test_matrix_tree_tori_converge(self):
        oracle = torus_entropy_oracle(2)
        diffs = [abs(torus_tree_per_site(side) - oracle) for side in (8, 16, 32)]
        assert diffs[0] > diffs[1] > diffs[2]
        assert diffs[-1] < 0.01

    def test_too_few_points(self):
        with pytest.raises(ValidationError):
            torus_entropy_oracle(2, 32)


class TestPluginEntropy:
    def test_deterministic_measure_zero(self):
        g = build_box(2, 4)
        w = _central_window(g, (1, 1), (2, 2))
        f = sample_boundary_mode(g, "wired", RandomStream(1))
        est, se = plugin_entropy([f] * 200, w)
        assert est == 0.0
        assert se == 0.0

    def test_two_pattern_half_half(self):
        g = build_box(1, 4)
        w = induced_window(g, [1, 2])  # one internal edge
        with_edge = Forest(g, [1])
        without = Forest(g, [])
        samples = [with_edge, without] * 300
        est, se = plugin_entropy(samples, w)
        assert est == pytest.approx(math.log(2) / 2, abs=1e-9)
        assert se < 0.02

    def test_needs_enough_samples(self):
        g = build_box(1, 4)
        w = induced_window(g, [1, 2])
        with pytest.raises(ValidationError):
            plugin_entropy([Forest(g, [])] * 10, w)

    def test_degenerate_window(self):
        g = build_box(2, 5)
        w = induced_window(g, [g.vertex_at((2, 2))])
        with pytest.raises(ValidationError):
            plugin_entropy([Forest(g, [])] * 200, w)

    def test_matches_exact_window_entropy_wired_6x6(self):
        g = build_box(2, 6)
        w = _central_window(g, (2, 2), (2, 2))
        exact = _exact_window_entropy_wired(g, w)
        rng = RandomStream(23)
        draws = [sample_boundary_mode(g, "wired", rng) for _ in range(4000)]
        est, se = plugin_entropy(draws, w)
        assert abs(est - exact) <= 3 * se + 1e-3

    def test_se_scales_like_inverse_sqrt(self):
        g = build_box(2, 4)
        w = _central_window(g, (1, 1), (2, 2))
        ratios = []
        for trial in range(10):
            rng = RandomStream(100, trial)
            draws = [sample_boundary_mode(g, "wired", rng) for _ in range(800)]
            _, se_small = plugin_entropy(draws[:400], w)
            _, se_big = plugin_entropy(draws, w)
            ratios.append(se_big / se_small)
        mean_ratio = sum(ratios) / len(ratios)
        assert 0.8 / math.sqrt(2) <= mean_ratio <= 1.2 / math.sqrt(2)


class TestEntropyGap:
    def test_all_horizontal_gap_at_side8(self):
        rep = entropy_gap_experiment(8, "all-horizontal")
        assert rep.competitor_entropy == 0.0
        assert rep.competitor_se == 0.0
        assert rep.wired_per_site > 0.5
        assert rep.gap_declared

    def test_wired_sampler_self_comparison_no_gap(self):
        rep = entropy_gap_experiment(6, wired_sampler, samples=300, seed=4)
        assert not rep.gap_declared

    def test_side_floor(self):
        with pytest.raises(ValidationError):
            entropy_gap_experiment(3, "all-horizontal")


def _central_window(g, corner, extent):
    verts = [
        g.vertex_at((corner[0] + dx, corner[1] + dy))
        for dx in range(extent[0])
        for dy in range(extent[1])
    ]
    return induced_window(g, verts)


def _exact_window_entropy_wired(g, w):
    """Exact plug-in entropy of the window pattern under the wired law.

    For each subset S of the window's internal edges, the pattern probability
    is (trees of the wired quotient containing S and avoiding the rest) over
    all trees, computed by contraction and deletion.
    """
    quotient = contract(g, [sorted(g.boundary)]).graph
    total = count_spanning_trees(quotient).exact_count
    edges = list(w.internal_edges)
    probs = []
    for mask in range(1 << len(edges)):
        keep = [edges[i] for i in range(len(edges)) if mask >> i & 1]
        drop = {edges[i] for i in range(len(edges)) if not mask >> i & 1}
        # delete the complement, then contract the kept edges
        remaining = [quotient.edges[eid] for eid in range(len(quotient.edges)) if eid not in drop]
        kept_pairs = [quotient.edges[eid] for eid in keep]
        shrunk = Graph(quotient.n, remaining, quotient.boundary)
        uf = UnionFind(quotient.n)
        acyclic = True
        for u, v in kept_pairs:
            if not uf.union(u, v):
                acyclic = False
                break
        if not acyclic:
            continue
        classes = [vs for vs in uf.groups().values() if len(vs) > 1]
        target = contract(shrunk, classes).graph if classes else shrunk
        # remove the kept edges themselves (now self-loops, ignored anyway)
        n_s = count_spanning_trees(target)
        if n_s.is_zero:
            continue
        probs.append(n_s.exact_count / total)
    assert abs(sum(probs) - 1.0) < 1e-9
    return -sum(p * math.log(p) for p in probs if p > 0) / len(w.vertices)
