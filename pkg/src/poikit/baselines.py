"""Reference clusterers for the comparison harness.

Classical single linkage and DBSCAN are implemented here; other baseline
algorithms enter the harness through external label files of the same
shape the flat clusterings serialize to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustertree import Dendrogram, _prim_mst, _replay_merges, _UnionFind
from .spatial import PointSet, distance_matrix
from .stability import NOISE_LABEL, FlatClustering


@dataclass(frozen=True)
class DbscanParams:
    """Scale threshold (meters) and minimum neighborhood size."""

    eps: float
    min_pts: int

    def __post_init__(self):
        if not (self.eps > 0.0):
            raise ValueError("eps must be strictly positive")
        if self.min_pts < 1:
            raise ValueError("min_pts must be at least 1")


def single_linkage(ps: PointSet) -> Dendrogram:
    """Classical single-linkage dendrogram over Euclidean distances."""
    if ps.n < 2:
        raise ValueError("single linkage needs at least two points")
    weights = distance_matrix(ps).astype(float)
    np.fill_diagonal(weights, np.inf)
    edges = _prim_mst(weights)
    edges.sort(key=lambda e: (e[2], e[0], e[1]))
    return Dendrogram(n=ps.n, merges=_replay_merges(ps.n, edges))


def cut_dendrogram(dend: Dendrogram, num_clusters: int) -> FlatClustering:
    """Stop the merge replay when exactly ``num_clusters`` components remain.

    Components are labeled 1..num_clusters in order of their smallest
    contained point index; there is no noise label.
    """
    n = dend.n
    if not (1 <= num_clusters <= n):
        raise ValueError(f"num_clusters must lie in 1..{n}, got {num_clusters}")
    uf = _UnionFind(n)
    rep = {i: i for i in range(n)}
    for idx, m in enumerate(dend.merges[: n - num_clusters]):
        uf.union(rep[m.left], rep[m.right])
        rep[n + idx] = rep[m.left]
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    components = sorted(groups.values(), key=lambda g: g[0])
    labels = [0] * n
    for label, comp in enumerate(components, start=1):
        for i in comp:
            labels[i] = label
    return FlatClustering(labels=tuple(labels), m=num_clusters)


def dbscan(
    ps: PointSet, params: DbscanParams, *, precomputed: np.ndarray | None = None
) -> FlatClustering:
    """Standard DBSCAN over Euclidean distances.

    Core points have at least ``min_pts`` points (self included) within
    ``eps``; clusters are density-connected sets of core points plus
    border points. Scanning seeds ascending by point index makes border
    assignment deterministic: a border point joins the lowest-numbered
    adjacent core cluster, which is the first one to reach it.

    ``precomputed`` may carry a full distance matrix to amortize repeated
    runs over one point set (as the sweep harness does).
    """
    n = ps.n
    dm = distance_matrix(ps) if precomputed is None else precomputed
    if dm.shape != (n, n):
        raise ValueError("precomputed distance matrix has the wrong shape")
    adjacency = dm <= params.eps
    degree = adjacency.sum(axis=1)
    core = degree >= params.min_pts

    labels = np.zeros(n, dtype=int)
    cluster_id = 0
    for seed in range(n):
        if not core[seed] or labels[seed] != 0:
            continue
        cluster_id += 1
        frontier = np.zeros(n, dtype=bool)
        frontier[seed] = True
        labels[seed] = cluster_id
        while frontier.any():
            reached = adjacency[frontier].any(axis=0)
            fresh = reached & (labels == 0)
            labels[fresh] = cluster_id
            frontier = fresh & core
    # Border points adjacent to clusters seeded earlier keep their first
    # assignment; the wave above already guarantees the minimum cluster id.
    return FlatClustering(labels=tuple(int(l) for l in labels), m=cluster_id)
