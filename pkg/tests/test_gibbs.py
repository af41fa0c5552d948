"""Boundary relations, window resampling laws, escape/trunk closures."""

import pytest
from scipy.stats import chi2

from spanforest import (
    Forest,
    RandomStream,
    ValidationError,
    WalkPath,
    build_box,
    compatible_window_sets,
    corpus,
    enumerate_forests,
    escape_closure,
    induced_window,
    inside_relation,
    outside_relation,
    sample_boundary_mode,
    strong_gibbs_resample,
    trunk_closure,
    weak_gibbs_resample,
    wilson_tree,
)
from spanforest.gibbs import split_forest_at_window


def central_window(g, side, corner, extent):
    verts = [
        g.vertex_at((corner[0] + dx, corner[1] + dy))
        for dx in range(extent[0])
        for dy in range(extent[1])
    ]
    return induced_window(g, verts)


class TestRelations:
    def test_outside_empty_gives_singletons(self):
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        p = outside_relation(g, w, [])
        assert all(len(b) == 1 for b in p.classes)
        assert p.block_count() == len(w.window_boundary)

    def test_outside_single_connection(self):
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        a = g.vertex_at((1, 1))
        b = g.vertex_at((2, 1))
        # connect a and b through the outside corner path (1,0)-(2,0)
        e1 = g.edge_between(a, g.vertex_at((1, 0)))
        e2 = g.edge_between(g.vertex_at((1, 0)), g.vertex_at((2, 0)))
        e3 = g.edge_between(g.vertex_at((2, 0)), b)
        p = outside_relation(g, w, [e1, e2, e3])
        blocks = {frozenset(blk) for blk in p.classes}
        assert frozenset({a, b}) in blocks
        assert p.block_count() == 3

    def test_outside_ring_tree_connects_everything(self):
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        ring = sorted(set(range(g.n)) - set(w.vertices))
        ring_edges = [
            eid
            for eid, (u, v) in enumerate(g.edges)
            if u not in w.vertices and v not in w.vertices
        ]
        # spanning tree of the ring: greedily add acyclic ring edges
        tree = []
        for eid in ring_edges:
            try:
                Forest(g, tree + [eid])
                tree.append(eid)
            except ValidationError:
                continue
        assert len(tree) == len(ring) - 1
        # hook each window vertex into the ring with one straddling edge
        hooks = []
        for v in sorted(w.window_boundary):
            x, y = g.coords[v]
            outside_nb = g.vertex_at((x, y - 1)) if y == 1 else g.vertex_at((x, y + 1))
            hooks.append(g.edge_between(v, outside_nb))
        p = outside_relation(g, w, tree + hooks)
        assert p.block_count() == 1
        assert set(p.classes[0]) == set(w.window_boundary)

    def test_outside_rejects_internal_edge(self):
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        with pytest.raises(ValidationError):
            outside_relation(g, w, [w.internal_edges[0]])

    def test_inside_empty_and_single_edge(self):
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        p = inside_relation(w, [])
        assert all(len(b) == 1 for b in p.classes)
        e = w.internal_edges[0]
        u, v = g.edges[e]
        p = inside_relation(w, [e])
        assert (min(u, v), max(u, v)) in {tuple(sorted(b)) for b in p.classes}

    def test_inside_l_path_three_block(self):
        g = build_box(2, 5)
        w = central_window(g, 5, (1, 1), (3, 3))
        # L-shaped pair of edges along the window ring, touching 3 ring vertices
        a = g.vertex_at((1, 2))
        c = g.vertex_at((1, 1))
        b = g.vertex_at((2, 1))
        p = inside_relation(w, [g.edge_between(a, c), g.edge_between(c, b)])
        blocks = {frozenset(blk) for blk in p.classes}
        assert frozenset({a, b, c}) in blocks

    def test_inside_rejects_cycle(self):
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        with pytest.raises(ValidationError):
            inside_relation(w, list(w.internal_edges))  # full 4-cycle

    def test_inside_rejects_outside_edge(self):
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        with pytest.raises(ValidationError):
            inside_relation(w, [w.straddling_edges[0]])


class TestWeakResample:
    def test_partition_preserved_and_acyclic(self):
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        rng = RandomStream(31)
        for _ in range(300):
            f = sample_boundary_mode(g, "wired", rng)
            before = inside_relation(w, split_forest_at_window(f, w)[0])
            f2 = weak_gibbs_resample(g, w, f, rng)
            after = inside_relation(w, split_forest_at_window(f2, w)[0])
            assert before.canonical_form == after.canonical_form
            # outside untouched
            assert split_forest_at_window(f, w)[1] == split_forest_at_window(f2, w)[1]
            # components still all touch the boundary
            for comp in f2.components():
                assert any(v in g.boundary for v in comp)

    def test_singleton_class_unchanged(self):
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        # all-singletons partition on the 2x2 window admits only the empty set
        f = sample_boundary_mode(g, "wired", RandomStream(41))
        stripped = Forest(g, split_forest_at_window(f, w)[1])
        out = weak_gibbs_resample(g, w, stripped, RandomStream(42))
        assert out.edge_ids == stripped.edge_ids

    def test_uniform_over_class_center_attachment(self):
        # 3x3 window in a 5x5 box: singleton partition leaves exactly the
        # four center attachments as the compatible class
        g = build_box(2, 5)
        w = central_window(g, 5, (1, 1), (3, 3))
        center = g.vertex_at((2, 2))
        north = g.edge_between(center, g.vertex_at((2, 3)))
        f = Forest(g, [north])
        pool = compatible_window_sets(w, inside_relation(w, [north]))
        assert len(pool) == 4
        rng = RandomStream(77)
        counts = {p: 0 for p in pool}
        n = 50_000
        for _ in range(n):
            out = weak_gibbs_resample(g, w, f, rng)
            counts[out.edge_ids] += 1
        for c in counts.values():
            assert abs(c / n - 0.25) <= 0.02

    def test_uniform_over_class_spanning_paths(self):
        # single-block partition on the 2x2 window: the four 3-edge paths
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        ids = list(w.internal_edges)
        f = Forest(g, ids[:2] + ids[3:])  # three edges of the window 4-cycle
        p = inside_relation(w, f.edge_ids)
        assert p.block_count() == 1
        pool = compatible_window_sets(w, p)
        assert len(pool) == 4
        rng = RandomStream(78)
        counts = {q: 0 for q in pool}
        n = 40_000
        for _ in range(n):
            out = weak_gibbs_resample(g, w, f, rng)
            counts[out.edge_ids] += 1
        for c in counts.values():
            assert abs(c / n - 0.25) <= 0.02

    def test_support_grows_when_class_is_rich(self):
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        rng = RandomStream(5150)
        f = wilson_tree(g, 0, rng)
        pool = compatible_window_sets(w, inside_relation(w, split_forest_at_window(f, w)[0]))
        seen = set()
        for _ in range(300):
            seen.add(weak_gibbs_resample(g, w, f, rng).edge_ids)
        assert (len(pool) > 1) == (len(seen) > 1)

    def test_full_window_rejected(self):
        g = build_box(2, 3)
        w = induced_window(g, range(g.n))
        f = wilson_tree(g, 0, RandomStream(0))
        with pytest.raises(ValidationError):
            weak_gibbs_resample(g, w, f, RandomStream(1))

    def test_window_marginals_stable_under_resample(self):
        # light version of the invariance experiment
        g = build_box(2, 4)
        w = central_window(g, 4, (1, 1), (2, 2))
        rng = RandomStream(90)
        n = 20_000
        before = {e: 0 for e in w.internal_edges}
        after = {e: 0 for e in w.internal_edges}
        for _ in range(n):
            f = sample_boundary_mode(g, "wired", rng)
            f2 = weak_gibbs_resample(g, w, f, rng)
            for e in w.internal_edges:
                before[e] += e in set(f.edge_ids)
                after[e] += e in set(f2.edge_ids)
        for e in w.internal_edges:
            pb, pa = before[e] / n, after[e] / n
            se = (pb * (1 - pb) / n + pa * (1 - pa) / n) ** 0.5
            assert abs(pb - pa) <= 4 * se + 1e-12


class TestStrongResample:
    def test_single_vertex_window_unchanged(self):
        g = corpus()["k4"]
        w = induced_window(g, [2])
        f = wilson_tree(g, 0, RandomStream(3))
        out = strong_gibbs_resample(g, w, f, RandomStream(4))
        assert out.edge_ids == f.edge_ids

    def test_two_parallel_quotient_half(self):
        g = build_box(2, 2)  # cycle 0-1-3-2
        w = induced_window(g, [0, 1, 3])
        assert len(w.internal_edges) == 2
        outside = [eid for eid in range(4) if eid not in w.internal_edges]
        f = Forest(g, outside + [w.internal_edges[0]])
        assert f.is_spanning_tree()
        counts = {w.internal_edges[0]: 0, w.internal_edges[1]: 0}
        rng = RandomStream(55)
        n = 20_000
        for _ in range(n):
            out = strong_gibbs_resample(g, w, f, rng)
            inner = set(out.edge_ids) & set(w.internal_edges)
            assert len(inner) == 1
            counts[inner.pop()] += 1
            assert out.is_spanning_tree()
        for c in counts.values():
            assert abs(c / n - 0.5) <= 0.02

    def test_preserves_uniform_law_on_k4(self):
        g = corpus()["k4"]
        w = induced_window(g, [0, 1, 2])
        trees = {f.edge_ids: 0 for f in enumerate_forests(g, "all-trees")}
        rng = RandomStream(60)
        n = 20_000
        for _ in range(n):
            f = wilson_tree(g, 0, rng)
            out = strong_gibbs_resample(g, w, f, rng)
            trees[out.edge_ids] += 1
        expected = n / len(trees)
        stat = sum((c - expected) ** 2 / expected for c in trees.values())
        assert stat < chi2.isf(1e-3, len(trees) - 1)

    def test_requires_spanning_tree(self):
        g = build_box(2, 3)
        w = central_window(g, 3, (1, 1), (1, 1))
        f = sample_boundary_mode(g, "wired", RandomStream(1))
        if not f.is_spanning_tree():
            with pytest.raises(ValidationError):
                strong_gibbs_resample(g, w, f, RandomStream(2))


class TestEscapeClosure:
    def test_interior_c_is_contained(self):
        g = build_box(2, 4)
        f = wilson_tree(g, 0, RandomStream(7))
        C = set(range(g.n)) - set(g.boundary)
        ec = escape_closure(g, f, C)
        assert ec.c_f <= frozenset(C)
        assert ec.c_f <= ec.c_tilde
        assert frozenset(C) <= ec.c_tilde

    def test_1d_single_interior_vertex(self):
        g = build_box(1, 7)
        f = Forest(g, range(6))  # the full path
        ec = escape_closure(g, f, {3})
        assert ec.c_f == {3}
        assert ec.c_tilde == {3}

    def test_5x5_brute_force_invariant(self):
        g = build_box(2, 5)
        rng = RandomStream(101)
        C = {g.vertex_at((x, y)) for x in (1, 2, 3) for y in (1, 2, 3)}
        for _ in range(20):
            f = wilson_tree(g, 0, rng)
            ec = escape_closure(g, f, C)
            adj = [[] for _ in range(g.n)]
            for eid in f.edge_ids:
                u, v = g.edges[eid]
                adj[u].append(v)
                adj[v].append(u)

            def reaches_boundary_avoiding(start, banned):
                stack, seen = [start], {start}
                while stack:
                    x = stack.pop()
                    if x in g.boundary:
                        return True
                    for y in adj[x]:
                        if y not in seen and y not in banned:
                            seen.add(y)
                            stack.append(y)
                return False

            for v in ec.c_tilde - ec.c_f:
                assert not reaches_boundary_avoiding(v, ec.c_f)
            for v in set(range(g.n)) - ec.c_tilde:
                assert reaches_boundary_avoiding(v, ec.c_f)


class TestTrunkClosure:
    def test_single_hit(self):
        g = build_box(1, 7)
        f = Forest(g, range(6))
        t = WalkPath(tuple(range(7)))
        tc = trunk_closure(g, f, t, {3})
        assert tc.c_1 == tc.c_2 == 3
        assert tc.region == {3}

    def test_1d_middle_three(self):
        g = build_box(1, 9)
        f = Forest(g, range(8))
        t = WalkPath(tuple(range(9)))
        tc = trunk_closure(g, f, t, {3, 4, 5})
        assert (tc.c_1, tc.c_2) == (3, 5)
        assert tc.region == {3, 4, 5}

    def test_region_avoids_boundary(self):
        g = build_box(2, 5)
        rng = RandomStream(200)
        C = {g.vertex_at((x, y)) for x in (1, 2, 3) for y in (1, 2, 3)}
        found = 0
        for _ in range(40):
            f = wilson_tree(g, 0, rng)
            # trunk: path between two boundary vertices through the tree
            from spanforest import detect_trunks

            trunks = detect_trunks(g, f)
            for t in trunks.trunks:
                if any(v in C for v in t.vertices):
                    tc = trunk_closure(g, f, t, C)
                    assert not (tc.region & g.boundary)
                    found += 1
        assert found > 0

    def test_trunk_missing_c(self):
        g = build_box(1, 5)
        f = Forest(g, range(4))
        with pytest.raises(ValidationError):
            trunk_closure(g, f, WalkPath((0, 1)), {3})
