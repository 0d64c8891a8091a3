"""Subdivision policy, delegation and quad-tree equivalence."""
import numpy as np
import pytest

from hiergrid import (
    BinCoord,
    GridIndex,
    HierConfig,
    HierGridIndex,
    Point2D,
    PointCollection,
    SubGridSource,
    match_battery,
    oracle_quadtree,
    resolve_bin,
    uniform_points,
)


def pc(*pts) -> PointCollection:
    return PointCollection(list(pts))


def leaf_key(leaves):
    return sorted(
        (rect.min.x, rect.min.y, rect.max.x, rect.max.y, ids) for rect, ids in leaves
    )


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            HierConfig(max_bin_records=0)
        with pytest.raises(ValueError):
            HierConfig(max_bin_records=1, smallest_bin_dimension=0.0)
        with pytest.raises(ValueError):
            HierConfig(max_bin_records=1, sub_divisions=(1, 1))

    def test_single_bin_grid_rejected(self):
        with pytest.raises(ValueError):
            HierGridIndex(pc((0.0, 0.0)), 1, 1, HierConfig(max_bin_records=1))


class TestSubdivisionPolicy:
    def test_no_subdivision_below_threshold(self):
        idx = HierGridIndex(
            pc((10.0, 10.0), (90.0, 10.0), (10.0, 90.0), (90.0, 90.0)),
            2,
            2,
            HierConfig(max_bin_records=1),
        )
        assert idx.sub_indexes == []

    def test_overfull_bins_get_sub_indexes(self):
        pts = uniform_points(5000, seed=42)
        idx = HierGridIndex(pts, 10, 10, HierConfig(max_bin_records=1))
        idx.ensure_built()
        overfull = [
            coord for lst, coord in idx.rendered.registry.items() if len(lst) > 1
        ]
        assert len(idx.sub_indexes) == len(overfull)
        for coord in overfull:
            assert idx.sub_at(coord) is not None

    def test_aliased_bins_share_the_sub_index(self):
        # one crowded cluster plus a far record: most bins are gap-filled
        # aliases of the cluster's list and must reuse its sub-index
        rng = np.random.default_rng(2)
        pts = np.vstack([rng.normal(10.0, 0.5, (30, 2)), [[90.0, 90.0]]])
        idx = HierGridIndex(PointCollection(pts), 6, 6, HierConfig(max_bin_records=2))
        idx.ensure_built()
        cluster_list = None
        for lst, coord in idx.rendered.registry.items():
            if len(lst) > 2:
                cluster_list = lst
                home = coord
        assert cluster_list is not None
        home_sub = idx.sub_at(home)
        assert home_sub is not None
        aliases = 0
        for j in range(6):
            for i in range(6):
                c = BinCoord(i, j)
                if idx.rendered.at(c) is None and idx.filled.at(c) is cluster_list:
                    aliases += 1
                    assert idx.sub_at(c) is home_sub
        assert aliases > 0

    def test_sub_sources_are_proxies_over_parent(self):
        pts = uniform_points(400, seed=7)
        idx = HierGridIndex(pts, 5, 5, HierConfig(max_bin_records=4))
        for sub in idx.sub_indexes:
            assert isinstance(sub.source, SubGridSource)
            assert sub.source.parent is pts

    def test_size_floor_blocks_subdivision(self):
        idx = HierGridIndex(
            uniform_points(500, seed=1),
            5,
            5,
            HierConfig(max_bin_records=1, smallest_bin_dimension=1e9),
        )
        assert idx.sub_indexes == []

    def test_sub_divisions_override(self):
        idx = HierGridIndex(
            uniform_points(500, seed=1),
            5,
            5,
            HierConfig(max_bin_records=4, sub_divisions=(3, 2)),
        )
        subs = idx.sub_indexes
        assert subs
        for sub in subs:
            assert (sub.divisions_x, sub.divisions_y) == (3, 2)

    def test_divisions_inherited_by_default(self):
        idx = HierGridIndex(uniform_points(600, seed=2), 4, 3, HierConfig(max_bin_records=3))
        for sub in idx.sub_indexes:
            assert (sub.divisions_x, sub.divisions_y) == (4, 3)


class TestTermination:
    def test_coincident_records(self):
        idx = HierGridIndex(
            PointCollection([[5.0, 5.0]] * 12), 2, 2, HierConfig(max_bin_records=1)
        )
        leaves = idx.leaf_occupancies()
        assert len(leaves) == 1
        assert leaves[0][1] == tuple(range(12))

    def test_cluster_with_outlier(self):
        pts = [[5.0, 5.0]] * 9 + [[100.0, 100.0]]
        idx = HierGridIndex(PointCollection(pts), 2, 2, HierConfig(max_bin_records=1))
        leaves = idx.leaf_occupancies()
        assert len(leaves) == 2
        assert sorted(len(ids) for _, ids in leaves) == [1, 9]

    def test_collinear_duplicates(self):
        pts = [[float(i % 3), 7.0] for i in range(30)]
        idx = HierGridIndex(PointCollection(pts), 3, 2, HierConfig(max_bin_records=2))
        leaves = idx.leaf_occupancies()
        assert sorted(i for _, ids in leaves for i in ids) == list(range(30))


class TestLeafOccupancies:
    def test_leaves_partition_all_records(self):
        idx = HierGridIndex(uniform_points(2000, seed=5), 6, 6, HierConfig(max_bin_records=3))
        leaves = idx.leaf_occupancies()
        ids = sorted(i for _, ids in leaves for i in ids)
        assert ids == list(range(2000))

    def test_leaves_respect_bucket_or_floor(self):
        idx = HierGridIndex(uniform_points(1500, seed=8), 5, 5, HierConfig(max_bin_records=4))
        floor = idx.ensure_built().size_floor
        for rect, ids in idx.leaf_occupancies():
            assert len(ids) <= 4 or rect.width <= floor or rect.height <= floor

    def test_matches_reference_quadtree(self):
        rng = np.random.default_rng(123)
        for _ in range(40):
            n = int(rng.integers(1, 65))
            pts = rng.uniform(0, 100, (n, 2))
            bucket = int(rng.integers(1, 5))
            idx = HierGridIndex(
                PointCollection(pts), 2, 2, HierConfig(max_bin_records=bucket)
            )
            got = leaf_key(idx.leaf_occupancies())
            want = leaf_key((l.rect, l.ids) for l in oracle_quadtree(
                [tuple(p) for p in pts], bucket
            ))
            assert got == want


class TestQueriesDelegate:
    def test_identical_to_flat_when_nothing_subdivides(self):
        pts_a = uniform_points(800, seed=3)
        pts_b = uniform_points(800, seed=3)
        flat = GridIndex(pts_a, 7, 5)
        hier = HierGridIndex(pts_b, 7, 5, HierConfig(max_bin_records=10**9))
        assert hier.sub_indexes == []
        rng = np.random.default_rng(5)
        for _ in range(300):
            q = Point2D(*(float(v) for v in rng.uniform(-500, 1500, 2)))
            a, b = flat.nearest(q), hier.nearest(q)
            assert (a.record, a.distance, a.records_examined, a.short_circuit) == (
                b.record,
                b.distance,
                b.records_examined,
                b.short_circuit,
            )

    def test_home_delegation_returns_sub_result(self):
        pts = uniform_points(5000, seed=42)
        idx = HierGridIndex(pts, 10, 10, HierConfig(max_bin_records=1))
        idx.ensure_built()
        shape = idx.shape
        rng = np.random.default_rng(6)
        pos = pts.positions
        delegated = 0
        for rid in rng.integers(0, 5000, 80):
            q = Point2D(float(pos[rid, 0]), float(pos[rid, 1]))
            c = resolve_bin(q, shape)
            if idx.sub_at(c) is None:
                continue
            delegated += 1
            res = idx.nearest(q)
            assert res.distance == 0.0
            assert res.record == rid or (pos[res.record] == pos[rid]).all()
            assert not res.short_circuit  # delegation never claims the flag
        assert delegated > 50

    def test_single_record_reachable_through_nesting(self):
        pts = [[50.0, 50.0]] * 20 + [[50.2, 50.2]]
        idx = HierGridIndex(PointCollection(pts), 4, 4, HierConfig(max_bin_records=1))
        res = idx.nearest(Point2D(50.19, 50.19))
        assert res.record == 20

    def test_cost_never_exceeds_flat(self):
        pts_a = uniform_points(3000, seed=12)
        pts_b = uniform_points(3000, seed=12)
        flat = GridIndex(pts_a, 8, 8)
        hier = HierGridIndex(pts_b, 8, 8, HierConfig(max_bin_records=2))
        rng = np.random.default_rng(13)
        for _ in range(300):
            q = Point2D(*(float(v) for v in rng.uniform(-1000, 2000, 2)))
            assert hier.nearest(q).records_examined <= flat.nearest(q).records_examined

    def test_match_rate_high_and_short_circuits_exact(self):
        idx = HierGridIndex(uniform_points(4000, seed=20), 10, 10, HierConfig(max_bin_records=1))
        report = match_battery(idx, queries=600, seed=99)
        assert report.sc_inexact == 0
        assert report.match_rate > 0.9  # delegation approximates, mildly

    def test_range_query_unaffected_by_subdivision(self):
        from hiergrid import Extents, oracle_range

        pts = uniform_points(1000, seed=30)
        idx = HierGridIndex(pts, 6, 6, HierConfig(max_bin_records=1))
        rng = np.random.default_rng(31)
        idx.ensure_built()
        ext = idx.shape.extents.scaled(2.0)
        for _ in range(60):
            xs = rng.uniform(ext.min.x, ext.max.x, 2)
            ys = rng.uniform(ext.min.y, ext.max.y, 2)
            rect = Extents(
                Point2D(float(xs.min()), float(ys.min())),
                Point2D(float(xs.max()), float(ys.max())),
            )
            assert idx.range_query(rect) == oracle_range(pts, rect)

    def test_outside_queries_stay_cheap_with_subdivision(self):
        idx = HierGridIndex(uniform_points(5000, seed=42), 10, 10, HierConfig(max_bin_records=1))
        rng = np.random.default_rng(40)
        worst = 0
        for _ in range(200):
            side = rng.integers(0, 4)
            along = float(rng.uniform(-500, 1500))
            away = float(rng.uniform(50, 500))
            if side == 0:
                q = Point2D(along, -away)
            elif side == 1:
                q = Point2D(along, 1000 + away)
            elif side == 2:
                q = Point2D(-away, along)
            else:
                q = Point2D(1000 + away, along)
            res = idx.nearest(q)
            worst = max(worst, res.records_examined)
            assert 0 <= res.record < 5000
        assert worst < 50  # pruned edge scan, not a 1000-record sweep


class TestLazyRebuild:
    def test_subdivision_tracks_mutations(self):
        src = pc((10.0, 10.0), (90.0, 90.0))
        idx = HierGridIndex(src, 2, 2, HierConfig(max_bin_records=1))
        assert idx.sub_indexes == []
        for _ in range(5):
            src.append(11.0, 11.0)
        assert len(idx.sub_indexes) == 1
        res = idx.nearest(Point2D(11.0, 11.0))
        assert res.distance == 0.0
