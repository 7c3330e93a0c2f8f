"""Shared fixtures and independent oracle implementations.

The oracles here deliberately avoid the library's own code paths: pair
counting instead of contingency tables, explicit density-connectivity
enumeration instead of the wave-expansion DBSCAN, and exhaustive branch
enumeration instead of the bottom-up stability sweep.
"""

from __future__ import annotations

import itertools

import numpy as np

from poikit import CondensedTree, PointSet


def two_blob_pointset(
    seed: int = 7, per_blob: int = 8, separation: float = 100.0, spread: float = 0.5
) -> tuple[PointSet, list[int]]:
    """Two tight Gaussian blobs far apart; returns points and truth labels."""
    rng = np.random.default_rng(seed)
    a = rng.normal((0.0, 0.0), spread, (per_blob, 2))
    b = rng.normal((separation, 0.0), spread, (per_blob, 2))
    ps = PointSet(np.vstack([a, b]))
    return ps, [1] * per_blob + [2] * per_blob


def pair_counting_ari(a: list[int], b: list[int]) -> float:
    """Adjusted Rand index by direct enumeration of all point pairs."""
    n = len(a)
    assert len(b) == n and n >= 2
    n11 = n10 = n01 = 0
    total = 0
    for i, j in itertools.combinations(range(n), 2):
        total += 1
        same_a = a[i] == a[j]
        same_b = b[i] == b[j]
        if same_a and same_b:
            n11 += 1
        elif same_a:
            n10 += 1
        elif same_b:
            n01 += 1
    expected = (n11 + n10) * (n11 + n01) / total
    max_index = ((n11 + n10) + (n11 + n01)) / 2.0
    if max_index == expected:
        blocks_a = {}
        blocks_b = {}
        for i, (la, lb) in enumerate(zip(a, b)):
            blocks_a.setdefault(la, set()).add(i)
            blocks_b.setdefault(lb, set()).add(i)
        same = {frozenset(s) for s in blocks_a.values()} == {
            frozenset(s) for s in blocks_b.values()
        }
        return 1.0 if same else 0.0
    return (n11 - expected) / (max_index - expected)


def pair_counting_ri(a: list[int], b: list[int]) -> float:
    """Rand index by direct enumeration of all point pairs."""
    n = len(a)
    agree = 0
    total = 0
    for i, j in itertools.combinations(range(n), 2):
        total += 1
        if (a[i] == a[j]) == (b[i] == b[j]):
            agree += 1
    return agree / total


def singleton_noise(labels: list[int]) -> list[int]:
    """Replace each 0 with a fresh unique label (the default ARI convention)."""
    fresh = max(labels, default=0)
    out = []
    for l in labels:
        if l == 0:
            fresh += 1
            out.append(fresh)
        else:
            out.append(l)
    return out


def brute_force_dbscan(coords: np.ndarray, eps: float, min_pts: int) -> list[int]:
    """DBSCAN by explicit density-connectivity enumeration.

    Cores are clustered by transitive closure over core-core adjacency;
    border points take the smallest adjacent core cluster id, matching the
    ascending-seed scan-order convention.
    """
    n = len(coords)
    dm = np.sqrt(((coords[:, None, :] - coords[None, :, :]) ** 2).sum(-1))
    adjacent = dm <= eps
    core = [int(adjacent[i].sum()) >= min_pts for i in range(n)]
    cluster_of = {}
    cluster_id = 0
    for i in range(n):
        if not core[i] or i in cluster_of:
            continue
        cluster_id += 1
        # transitive closure over core-core adjacency
        component = {i}
        grew = True
        while grew:
            grew = False
            for u in list(component):
                for v in range(n):
                    if core[v] and v not in component and adjacent[u, v]:
                        component.add(v)
                        grew = True
        for u in component:
            cluster_of[u] = cluster_id
    labels = [0] * n
    for i in range(n):
        if core[i]:
            labels[i] = cluster_of[i]
        else:
            candidates = [cluster_of[j] for j in range(n) if core[j] and adjacent[i, j]]
            labels[i] = min(candidates) if candidates else 0
    return labels


def enumerate_optimal_selection(
    tree: CondensedTree, scores: dict[int, float]
) -> tuple[float, frozenset[int]]:
    """Best branch-constrained selection by exhaustive enumeration.

    Every leaf-to-root path must contain exactly one selected cluster and
    the root is never selectable. Only feasible for small trees.
    """

    def options(cid: int) -> list[frozenset[int]]:
        cluster = tree.cluster(cid)
        own = [] if cluster.parent is None else [frozenset([cid])]
        if not cluster.children:
            return own or [frozenset()]
        combos = [frozenset()]
        for child in cluster.children:
            combos = [acc | pick for acc in combos for pick in options(child)]
        return own + combos

    root = tree.root
    if not root.children:
        return 0.0, frozenset()
    best_j = -1.0
    best = frozenset()
    for selection in options(root.id):
        j = sum(scores[cid] for cid in selection)
        if j > best_j:
            best_j = j
            best = selection
    return best_j, best


def selection_covers_each_branch_once(tree: CondensedTree, selected: frozenset[int]) -> bool:
    """Check the per-branch constraint on every leaf-to-root path."""
    for leaf in tree.leaf_ids():
        count = 0
        cid = leaf
        while cid is not None:
            if cid in selected:
                count += 1
            cid = tree.cluster(cid).parent
        if count != 1:
            return False
    return True
