"""Loop erasure, Wilson sampling laws, boundary modes, determinism."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chi2

from spanforest import (
    DisconnectedGraphError,
    Forest,
    Graph,
    RandomStream,
    ValidationError,
    WalkPath,
    build_box,
    corpus,
    enumerate_forests,
    loop_erase,
    sample_boundary_mode,
    wilson_rooted_forest,
    wilson_tree,
)


class TestLoopErase:
    def test_single_vertex(self):
        assert loop_erase(WalkPath((5,))).vertices == (5,)

    def test_single_loop(self):
        assert loop_erase(WalkPath((0, 1, 0, 2))).vertices == (0, 2)

    def test_interior_loop(self):
        assert loop_erase(WalkPath((0, 1, 2, 3, 1, 4))).vertices == (0, 1, 4)

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            WalkPath(())

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(0, 6), min_size=1, max_size=30))
    def test_output_self_avoiding_same_endpoints(self, verts):
        out = loop_erase(WalkPath(tuple(verts))).vertices
        assert len(set(out)) == len(out)
        assert out[0] == verts[0]
        assert out[-1] == verts[-1]
        # erasure never invents vertices
        assert set(out) <= set(verts)


def _freq_test(counts, n_samples, n_outcomes, tolerance):
    for key, c in counts.items():
        assert abs(c / n_samples - 1 / n_outcomes) <= tolerance, key


class TestWilsonTree:
    def test_k2(self):
        f = wilson_tree(corpus()["k2"], 0, RandomStream(1))
        assert f.edge_ids == (0,)

    def test_spanning_and_acyclic_every_sample(self):
        g = build_box(2, 3)
        rng = RandomStream(11)
        for _ in range(200):
            f = wilson_tree(g, 4, rng)
            assert f.is_spanning_tree()

    def test_triangle_uniform(self):
        g = corpus()["cycle3"]
        rng = RandomStream(5)
        counts = {}
        n = 30_000
        for _ in range(n):
            f = wilson_tree(g, 0, rng)
            counts[f.edge_ids] = counts.get(f.edge_ids, 0) + 1
        assert len(counts) == 3
        _freq_test(counts, n, 3, 0.02)

    def test_4cycle_uniform(self):
        g = build_box(2, 2)
        rng = RandomStream(6)
        counts = {}
        n = 40_000
        for _ in range(n):
            f = wilson_tree(g, 0, rng)
            counts[f.edge_ids] = counts.get(f.edge_ids, 0) + 1
        assert len(counts) == 4
        _freq_test(counts, n, 4, 0.02)

    def test_chi_square_on_sample_graphs(self):
        # deeper uniformity check on a few corpus graphs with parallel edges
        for name in ("k4", "triangle_doubled", "theta"):
            g = corpus()[name]
            trees = {f.edge_ids: 0 for f in enumerate_forests(g, "all-trees")}
            n = 20_000
            rng = RandomStream(17)
            for _ in range(n):
                f = wilson_tree(g, 0, rng)
                trees[f.edge_ids] += 1
            k = len(trees)
            expected = n / k
            stat = sum((c - expected) ** 2 / expected for c in trees.values())
            assert stat < chi2.isf(1e-3, k - 1), name

    def test_root_choice_does_not_change_law(self):
        g = corpus()["cycle4"]
        n = 20_000
        for root in (0, 2):
            rng = RandomStream(23)
            counts = {}
            for _ in range(n):
                f = wilson_tree(g, root, rng)
                counts[f.edge_ids] = counts.get(f.edge_ids, 0) + 1
            _freq_test(counts, n, 4, 0.02)

    def test_determinism(self):
        g = build_box(2, 4)
        a = wilson_tree(g, 0, RandomStream(99, 3))
        b = wilson_tree(g, 0, RandomStream(99, 3))
        assert a.edge_ids == b.edge_ids
        c = wilson_tree(g, 0, RandomStream(99, 4))
        assert a.edge_ids != c.edge_ids  # overwhelmingly likely

    def test_disconnected_rejected(self):
        g = Graph(4, [(0, 1), (2, 3)])
        with pytest.raises(DisconnectedGraphError):
            wilson_tree(g, 0, RandomStream(0))


class TestWilsonRootedForest:
    def test_all_roots_gives_empty_forest(self):
        g = build_box(2, 3)
        f = wilson_rooted_forest(g, range(g.n), RandomStream(0))
        assert f.edge_ids == ()
        assert f.component_count() == g.n

    def test_path3_half_half(self):
        g = build_box(1, 3)
        rng = RandomStream(8)
        counts = {(0,): 0, (1,): 0}
        n = 20_000
        for _ in range(n):
            f = wilson_rooted_forest(g, {0, 2}, rng)
            counts[f.edge_ids] += 1
        _freq_test(counts, n, 2, 0.02)

    def test_component_count_equals_roots(self):
        g = build_box(2, 3)
        rng = RandomStream(9)
        roots = sorted(g.boundary)
        for _ in range(100):
            f = wilson_rooted_forest(g, roots, rng)
            assert f.component_count() == len(roots)
            # one root per component
            for comp in f.components():
                assert sum(1 for v in comp if v in g.boundary) >= 1

    def test_rooted_law_matches_enumeration(self):
        g = corpus()["cycle5"]
        roots = [0, 2]
        pool = {f.edge_ids: 0 for f in enumerate_forests(g, "rooted-exactly-one", roots=roots)}
        rng = RandomStream(14)
        n = 30_000
        for _ in range(n):
            f = wilson_rooted_forest(g, roots, rng)
            pool[f.edge_ids] += 1
        k = len(pool)
        expected = n / k
        stat = sum((c - expected) ** 2 / expected for c in pool.values())
        assert stat < chi2.isf(1e-3, k - 1)


class TestBoundaryModes:
    def test_free_on_k2(self):
        f = sample_boundary_mode(corpus()["k2"], "free", RandomStream(0))
        assert f.edge_ids == (0,)

    def test_wired_equals_rooted_construction(self):
        g = build_box(1, 3)
        a = sample_boundary_mode(g, "wired", RandomStream(4, 2))
        b = wilson_rooted_forest(g, g.boundary, RandomStream(4, 2))
        assert a.edge_ids == b.edge_ids

    def test_wired_3x3_edge_count(self):
        g = build_box(2, 3)
        quotient_n = g.n - len(g.boundary) + 1
        rng = RandomStream(12)
        for _ in range(50):
            f = sample_boundary_mode(g, "wired", rng)
            assert len(f.edge_ids) == quotient_n - 1

    def test_wired_needs_boundary(self):
        g = Graph(3, [(0, 1), (1, 2)])
        with pytest.raises(ValidationError):
            sample_boundary_mode(g, "wired", RandomStream(0))

    def test_unknown_mode(self):
        with pytest.raises(ValidationError):
            sample_boundary_mode(corpus()["k2"], "periodic", RandomStream(0))
