from __future__ import annotations

import math

import numpy as np
import pytest
import scipy.cluster.hierarchy as sch

from conftest import two_blob_pointset
from poikit import (
    PointSet,
    RslParams,
    build_rsl_tree,
    components_at_radius,
    condense_tree,
    core_distances,
    default_k,
    level_set_oracle,
    rsl_merge_radius,
)
from poikit.clustertree import DEFAULT_ALPHA
from poikit.spatial import distance_matrix


def scipy_single_linkage_distances(coords: np.ndarray) -> np.ndarray:
    """Independent single-linkage implementation used as the oracle."""
    z = sch.linkage(coords, method="single")
    return np.sort(z[:, 2])


class TestMergeRadius:
    def test_formula_with_nearest_neighbor_radii(self) -> None:
        ps = PointSet.from_points([(0, 0), (1, 0), (5, 0)])
        cd = core_distances(ps, 2)  # nearest-neighbor distances: 1, 1, 4
        assert rsl_merge_radius(ps, cd, 1.0, 0, 1) == max(1.0, 1.0, 1.0)
        assert rsl_merge_radius(ps, cd, 1.0, 1, 2) == max(1.0, 4.0, 4.0)

    def test_coincident_points_k1_gives_zero(self) -> None:
        ps = PointSet.from_points([(2, 3), (2, 3)])
        cd = core_distances(ps, 1)
        assert rsl_merge_radius(ps, cd, 1.0, 0, 1) == 0.0

    def test_same_index_rejected(self) -> None:
        ps = PointSet.from_points([(0, 0), (1, 1)])
        cd = core_distances(ps, 1)
        with pytest.raises(ValueError):
            rsl_merge_radius(ps, cd, 1.0, 0, 0)

    def test_edge_rule_equals_algorithm_conditions(self) -> None:
        # The smallest radius making (i, j) a connected node pair must agree
        # with checking the two conditions directly over a grid of radii:
        # both nodes present (r_k <= r) and separation within alpha * r.
        rng = np.random.default_rng(5)
        ps = PointSet(rng.uniform(0, 20, (8, 2)))
        alpha = DEFAULT_ALPHA
        cd = core_distances(ps, 3)
        dm = distance_matrix(ps)
        radii = sorted(
            set(float(v) for v in cd.r)
            | set(float(dm[i, j] / alpha) for i in range(8) for j in range(i + 1, 8))
        )
        for i in range(8):
            for j in range(i + 1, 8):
                w = rsl_merge_radius(ps, cd, alpha, i, j)
                for r in radii:
                    direct = cd.r[i] <= r and cd.r[j] <= r and dm[i, j] <= alpha * r
                    assert (w <= r) == direct

    def test_monotone_in_alpha_and_k(self) -> None:
        rng = np.random.default_rng(19)
        ps = PointSet(rng.uniform(0, 30, (10, 2)))
        for i in range(10):
            for j in range(i + 1, 10):
                w_a1 = rsl_merge_radius(ps, core_distances(ps, 3), 1.0, i, j)
                w_a2 = rsl_merge_radius(ps, core_distances(ps, 3), 2.0, i, j)
                assert w_a2 <= w_a1
                w_k2 = rsl_merge_radius(ps, core_distances(ps, 2), 1.5, i, j)
                w_k5 = rsl_merge_radius(ps, core_distances(ps, 5), 1.5, i, j)
                assert w_k5 >= w_k2


class TestBuildTree:
    def test_two_points(self) -> None:
        ps = PointSet.from_points([(0, 0), (3, 0)])
        params = RslParams(alpha=1.5, k=2)
        dend = build_rsl_tree(ps, params)
        cd = core_distances(ps, 2)
        assert len(dend.merges) == 1
        assert dend.merges[0].radius == rsl_merge_radius(ps, cd, 1.5, 0, 1)

    def test_single_point_rejected(self) -> None:
        with pytest.raises(ValueError):
            build_rsl_tree(PointSet.from_points([(0, 0)]), RslParams(alpha=1.0, k=1))

    def test_k_larger_than_n_rejected(self) -> None:
        ps = PointSet.from_points([(0, 0), (1, 0)])
        with pytest.raises(ValueError):
            build_rsl_tree(ps, RslParams(alpha=1.0, k=3))

    def test_merge_radii_non_decreasing_and_sizes(self) -> None:
        rng = np.random.default_rng(3)
        ps = PointSet(rng.uniform(0, 50, (30, 2)))
        dend = build_rsl_tree(ps, RslParams.defaults(30))
        radii = dend.merge_radii()
        assert all(a <= b for a, b in zip(radii, radii[1:]))
        assert dend.merges[-1].size == 30
        seen_children = [m.left for m in dend.merges] + [m.right for m in dend.merges]
        assert len(seen_children) == len(set(seen_children))

    def test_single_linkage_special_case_matches_oracle(self) -> None:
        # alpha = 1, k = 2 must reproduce classical single linkage exactly.
        rng = np.random.default_rng(11)
        for trial in range(5):
            coords = rng.uniform(0, 100, (25, 2))
            dend = build_rsl_tree(PointSet(coords), RslParams(alpha=1.0, k=2))
            ours = np.sort(dend.merge_radii())
            oracle = scipy_single_linkage_distances(coords)
            assert np.allclose(ours, oracle, rtol=1e-12, atol=0.0)

    def test_deterministic(self) -> None:
        rng = np.random.default_rng(13)
        coords = rng.uniform(0, 10, (20, 2))
        params = RslParams(alpha=DEFAULT_ALPHA, k=4)
        assert build_rsl_tree(PointSet(coords), params) == build_rsl_tree(
            PointSet(coords), params
        )


class TestLevelSetOracle:
    def test_below_every_core_radius_no_nodes(self) -> None:
        ps = PointSet.from_points([(0, 0), (1, 0), (2, 0)])
        params = RslParams(alpha=1.0, k=2)
        levels = level_set_oracle(ps, params)
        cd = core_distances(ps, 2)
        for r, parts in levels:
            if r < cd.r.min():
                assert parts == []

    def test_max_radius_single_component(self) -> None:
        rng = np.random.default_rng(7)
        ps = PointSet(rng.uniform(0, 10, (9, 2)))
        levels = level_set_oracle(ps, RslParams(alpha=1.0, k=3))
        r, parts = levels[-1]
        assert parts == [list(range(9))]

    def test_three_blob_layout(self) -> None:
        rng = np.random.default_rng(17)
        blobs = [rng.normal(c, 0.3, (4, 2)) for c in ((0, 0), (50, 0), (0, 50))]
        ps = PointSet(np.vstack(blobs))
        params = RslParams(alpha=1.0, k=2)
        levels = level_set_oracle(ps, params)
        # Between blob formation and blob joining there must be a level
        # with exactly the three visual groups.
        expected = [list(range(0, 4)), list(range(4, 8)), list(range(8, 12))]
        assert any(parts == expected for _, parts in levels)

    def test_oracle_matches_tree_replay(self) -> None:
        rng = np.random.default_rng(23)
        for trial in range(10):
            n = int(rng.integers(6, 13))
            ps = PointSet(rng.uniform(0, 20, (n, 2)))
            params = RslParams(alpha=DEFAULT_ALPHA, k=3)
            dend = build_rsl_tree(ps, params)
            cd = core_distances(ps, 3)
            for r, expected in level_set_oracle(ps, params):
                assert components_at_radius(dend, cd, r) == expected


class TestCondense:
    def test_two_blobs_root_has_two_children(self) -> None:
        ps, _ = two_blob_pointset(seed=5, per_blob=5, separation=100.0, spread=0.4)
        params = RslParams(alpha=DEFAULT_ALPHA, k=3)
        dend = build_rsl_tree(ps, params)
        cd = core_distances(ps, 3)
        tree = condense_tree(dend, cd, 3)
        tree.validate()
        assert len(tree.root.children) == 2
        kids = [tree.cluster(c) for c in tree.root.children]
        kid_members = sorted(sorted(p for p, _ in k.members) for k in kids)
        assert kid_members == [[0, 1, 2, 3, 4], [5, 6, 7, 8, 9]]
        # The split the children record must also exist as a level-set
        # partition just above the root's death radius.
        r_split = 1.0 / kids[0].lambda_birth
        parts = components_at_radius(dend, cd, r_split * 0.999)
        assert sorted(parts) == kid_members

    def test_min_cluster_size_n_single_cluster(self) -> None:
        rng = np.random.default_rng(29)
        ps = PointSet(rng.uniform(0, 10, (12, 2)))
        dend = build_rsl_tree(ps, RslParams(alpha=1.0, k=2))
        tree = condense_tree(dend, core_distances(ps, 2), 12)
        tree.validate()
        assert len(tree.clusters) == 1
        assert tree.root.children == ()
        assert tree.root.size == 12

    def test_chain_fixture_manual_lambda_bookkeeping(self) -> None:
        # Two 6-point colinear blobs (spacing 0.5) bridged by three points,
        # alpha = 1, k = 3. Hand computation: within-blob merge radii are
        # 0.5 and 1.0; the bridges attach at radii 9.5, 9.5 and 10.0, and
        # the final merge is at 10.0. With min_cluster_size = 4 the walk
        # splits once into the two blob sides (7 and 8 points), the bridges
        # fall out as point departures at levels 1/10 and 1/9.5, and both
        # blob clusters dissolve at level 1/0.5 = 2.
        xs = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 12.0, 20.0, 28.0, 37.5, 38.0, 38.5, 39.0, 39.5, 40.0]
        ps = PointSet.from_points([(x, 0.0) for x in xs])
        params = RslParams(alpha=1.0, k=3)
        dend = build_rsl_tree(ps, params)
        tree = condense_tree(dend, core_distances(ps, 3), 4)
        tree.validate()
        assert len(tree.clusters) == 3
        assert len(tree.root.children) == 2
        assert tree.root.lambda_birth == pytest.approx(1.0 / 10.0)
        departures = {}
        for cid in (0, 1, 2):
            for p, lam in tree.cluster(cid).members:
                if p in (6, 7, 8):
                    departures.setdefault(p, []).append((cid, lam))
        # Each bridge departs from exactly one child cluster, never forms
        # one, and never reaches a deeper cluster.
        bridge_final = {p: max(lam for _, lam in recs) for p, recs in departures.items()}
        assert bridge_final[6] == pytest.approx(1.0 / 10.0)
        assert bridge_final[7] == pytest.approx(1.0 / 9.5)
        assert bridge_final[8] == pytest.approx(1.0 / 9.5)
        for cid in tree.root.children:
            kid = tree.cluster(cid)
            assert kid.children == ()
            assert kid.lambda_death == pytest.approx(2.0)
        sizes = sorted(tree.cluster(c).size for c in tree.root.children)
        assert sizes == [7, 8]

    def test_min_cluster_size_validation(self) -> None:
        ps, _ = two_blob_pointset(seed=3, per_blob=3)
        dend = build_rsl_tree(ps, RslParams(alpha=1.0, k=2))
        cd = core_distances(ps, 2)
        with pytest.raises(ValueError):
            condense_tree(dend, cd, 1)
        with pytest.raises(ValueError):
            condense_tree(dend, cd, 7)

    def test_duplicate_points_capped_levels(self) -> None:
        ps = PointSet.from_points([(0, 0), (0, 0), (0, 0), (5, 0), (5, 0), (5, 0)])
        dend = build_rsl_tree(ps, RslParams(alpha=1.0, k=2))
        tree = condense_tree(dend, core_distances(ps, 2), 3)
        tree.validate()
        for c in tree.clusters:
            assert math.isfinite(c.lambda_birth) and math.isfinite(c.lambda_death)

    def test_member_bookkeeping_counts(self) -> None:
        # Every point appears once in the root; within any cluster, the
        # points reaching its children are exactly the members departing at
        # the cluster's death level minus those shed strictly earlier.
        rng = np.random.default_rng(31)
        ps = PointSet(rng.uniform(0, 40, (40, 2)))
        dend = build_rsl_tree(ps, RslParams(alpha=DEFAULT_ALPHA, k=4))
        tree = condense_tree(dend, core_distances(ps, 4), 4)
        tree.validate()
        assert sorted(p for p, _ in tree.root.members) == list(range(40))
        for c in tree.clusters:
            child_points = set()
            for cid in c.children:
                child_points |= {p for p, _ in tree.cluster(cid).members}
            if c.children:
                survivors = {p for p, lam in c.members if lam == c.lambda_death}
                assert child_points <= survivors


class TestHartiganSanity:
    def test_two_gaussians_top_split_small(self) -> None:
        # Scaled-down version of the statistical invariant; the acceptance
        # suite runs the full n in {200, 800} protocol.
        rng = np.random.default_rng(101)
        n = 200
        a = rng.normal((0.0, 0.0), 1.0, (n // 2, 2))
        b = rng.normal((20.0, 0.0), 1.0, (n // 2, 2))
        ps = PointSet(np.vstack([a, b]))
        k = default_k(n)
        dend = build_rsl_tree(ps, RslParams(alpha=DEFAULT_ALPHA, k=k))
        tree = condense_tree(dend, core_distances(ps, k), k)
        assert len(tree.root.children) == 2
        kid_a, kid_b = (set(p for p, _ in tree.cluster(c).members) for c in tree.root.children)
        truth_a = set(range(n // 2))
        truth_b = set(range(n // 2, n))
        agreement = max(
            len(kid_a & truth_a) + len(kid_b & truth_b),
            len(kid_a & truth_b) + len(kid_b & truth_a),
        ) / n
        assert agreement >= 0.99
