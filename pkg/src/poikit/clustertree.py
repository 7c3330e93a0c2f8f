"""Robust single linkage hierarchy and its condensed cluster tree.

The hierarchy is built by growing a radius r: a point becomes a node once
its k-neighborhood radius r_k is within r, and two nodes connect once
their separation is within alpha * r. The smallest r at which points i, j
are connected directly is therefore max(r_k(i), r_k(j), d(i, j) / alpha),
and the whole hierarchy is the minimum spanning tree under that edge
weight, replayed in ascending weight order. Classical single linkage is
the special case alpha = 1, k = 2.

Density levels are the reciprocal radii lambda = 1 / r. Condensation
walks the dendrogram from the top: splits where both sides reach a
minimum size become new clusters, while smaller side-branches are
recorded as points departing (falling out as noise) at that level.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .spatial import CoreDistances, PointSet, core_distances, distance_matrix

DEFAULT_ALPHA = math.sqrt(2.0)

#: Test-only oracle bound; explicit graph construction is quadratic per radius.
ORACLE_MAX_POINTS = 64


def default_k(n: int, d: int = 2) -> int:
    """Default neighborhood count: max(2, ceil(d * ln n))."""
    if n < 1:
        raise ValueError("n must be positive")
    return max(2, math.ceil(d * math.log(n)))


@dataclass(frozen=True)
class RslParams:
    """Scale factor and neighborhood count of the hierarchy estimator."""

    alpha: float = DEFAULT_ALPHA
    k: int = 2

    def __post_init__(self):
        if not (self.alpha >= 1.0):
            raise ValueError("alpha must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    @classmethod
    def defaults(cls, n: int, d: int = 2) -> "RslParams":
        """Operational defaults: alpha = sqrt(2), k = max(2, ceil(d ln n))."""
        return cls(alpha=DEFAULT_ALPHA, k=default_k(n, d))


@dataclass(frozen=True)
class Merge:
    """One dendrogram merge: nodes ``left`` and ``right`` join at ``radius``."""

    left: int
    right: int
    radius: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Full merge hierarchy over n leaves.

    Node ids: leaves are 0..n-1; merge m (0-based) creates internal node
    n + m, so the root is 2n - 2. Merge radii are non-decreasing.
    """

    n: int
    merges: tuple[Merge, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a dendrogram needs at least two leaves")
        if len(self.merges) != self.n - 1:
            raise ValueError(f"expected {self.n - 1} merges, got {len(self.merges)}")

    @property
    def root(self) -> int:
        return 2 * self.n - 2

    def merge_radii(self) -> list[float]:
        return [m.radius for m in self.merges]

    def children(self, node: int) -> tuple[int, int]:
        """Children of internal node ``node``."""
        if not (self.n <= node <= self.root):
            raise ValueError(f"{node} is not an internal node")
        m = self.merges[node - self.n]
        return (m.left, m.right)

    def node_radius(self, node: int) -> float:
        return self.merges[node - self.n].radius

    def leaf_count(self, node: int) -> int:
        if node < self.n:
            return 1
        return self.merges[node - self.n].size

    def leaves_under(self, node: int) -> list[int]:
        """All leaf indices in the subtree of ``node`` (ascending)."""
        out: list[int] = []
        stack = [node]
        while stack:
            v = stack.pop()
            if v < self.n:
                out.append(v)
            else:
                stack.extend(self.children(v))
        out.sort()
        return out


def rsl_merge_radius(ps: PointSet, cd: CoreDistances, alpha: float, i: int, j: int) -> float:
    """Smallest radius at which points i and j are nodes and directly linked."""
    n = ps.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"point index out of range: ({i}, {j}) with n = {n}")
    if i == j:
        raise ValueError("merge radius is defined for distinct points")
    if cd.n != n:
        raise ValueError("core distances were computed for a different point set")
    if not (alpha >= 1.0):
        raise ValueError("alpha must be >= 1")
    diff = ps.coords[i] - ps.coords[j]
    d = float(np.sqrt((diff * diff).sum()))
    return max(float(cd.r[i]), float(cd.r[j]), d / alpha)


def _merge_weights(ps: PointSet, cd: CoreDistances, alpha: float) -> np.ndarray:
    """Dense matrix of pairwise merge radii, diagonal set to +inf."""
    dm = distance_matrix(ps) / alpha
    w = np.maximum(dm, np.maximum(cd.r[:, None], cd.r[None, :]))
    np.fill_diagonal(w, np.inf)
    return w


def _prim_mst(weights: np.ndarray) -> list[tuple[int, int, float]]:
    """Minimum spanning tree of a dense weight matrix (Prim's algorithm).

    Deterministic: ties are resolved toward the lowest point index, both in
    the frontier scan and in the best-edge bookkeeping.
    """
    n = weights.shape[0]
    in_tree = np.zeros(n, dtype=bool)
    best_w = np.full(n, np.inf)
    best_src = np.full(n, -1, dtype=int)
    edges: list[tuple[int, int, float]] = []
    current = 0
    in_tree[0] = True
    for _ in range(n - 1):
        row = weights[current]
        better = (~in_tree) & (row < best_w)
        best_w[better] = row[better]
        best_src[better] = current
        masked = np.where(in_tree, np.inf, best_w)
        nxt = int(np.argmin(masked))
        u, w = int(best_src[nxt]), float(best_w[nxt])
        edges.append((min(u, nxt), max(u, nxt), w))
        in_tree[nxt] = True
        current = nxt
    return edges


class _UnionFind:
    """Union-find over point indices with path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        self.parent[self.find(a)] = self.find(b)


def _replay_merges(n: int, edges: Sequence[tuple[int, int, float]]) -> tuple[Merge, ...]:
    """Turn sorted spanning-tree edges into a dendrogram merge sequence."""
    uf = _UnionFind(n)
    node_of: dict[int, int] = {i: i for i in range(n)}
    size_of: dict[int, int] = {i: 1 for i in range(n)}
    merges: list[Merge] = []
    next_node = n
    for u, v, w in edges:
        ru, rv = uf.find(u), uf.find(v)
        if ru == rv:
            continue
        a, b = node_of[ru], node_of[rv]
        size = size_of[ru] + size_of[rv]
        merges.append(Merge(left=min(a, b), right=max(a, b), radius=w, size=size))
        uf.union(ru, rv)
        root = uf.find(ru)
        node_of[root] = next_node
        size_of[root] = size
        next_node += 1
    return tuple(merges)


def build_rsl_tree(ps: PointSet, params: RslParams) -> Dendrogram:
    """Build the merge hierarchy over ``ps`` under ``params``.

    Computes the minimum spanning tree of the complete graph weighted by
    :func:`rsl_merge_radius`, sorts its edges ascending (ties by index
    pair), and replays them through a union-find. For any radius r, the
    connected components of the partial tree restricted to edges of weight
    <= r equal the components of the level-set graph at r.
    """
    if ps.n < 2:
        raise ValueError("the hierarchy needs at least two points")
    if params.k > ps.n:
        raise ValueError(f"k = {params.k} exceeds the number of points n = {ps.n}")
    cd = core_distances(ps, params.k)
    weights = _merge_weights(ps, cd, params.alpha)
    edges = _prim_mst(weights)
    edges.sort(key=lambda e: (e[2], e[0], e[1]))
    return Dendrogram(n=ps.n, merges=_replay_merges(ps.n, edges))


def components_at_radius(dend: Dendrogram, cd: CoreDistances, r: float) -> list[list[int]]:
    """Partition of active points implied by the dendrogram at radius r.

    A point is active (a node) once its core radius is within r; two
    active points share a component when joined by merges of radius <= r.
    Components are sorted lists of point indices, ordered by first member.
    """
    n = dend.n
    if cd.n != n:
        raise ValueError("core distances were computed for a different point set")
    rep = {i: i for i in range(n)}
    for idx, m in enumerate(dend.merges):
        rep[n + idx] = rep[m.left]
    uf = _UnionFind(n)
    for m in dend.merges:
        if m.radius > r:
            break
        uf.union(rep[m.left], rep[m.right])
    groups: dict[int, list[int]] = {}
    for i in range(n):
        if cd.r[i] <= r:
            groups.setdefault(uf.find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def level_set_oracle(
    ps: PointSet, params: RslParams
) -> list[tuple[float, list[list[int]]]]:
    """Brute-force level-set partitions at every critical radius.

    Test-only oracle (n <= 64): enumerates the critical radii, which are
    the core radii r_k(x_i) together with all scaled separations
    d(i, j) / alpha, and at each radius builds the graph explicitly. Points
    whose core radius exceeds r are absent from the node set.
    """
    n = ps.n
    if n > ORACLE_MAX_POINTS:
        raise ValueError(f"oracle limited to {ORACLE_MAX_POINTS} points, got {n}")
    if params.k > n:
        raise ValueError(f"k = {params.k} exceeds the number of points n = {n}")
    cd = core_distances(ps, params.k)
    dm = distance_matrix(ps)
    critical = set(float(v) for v in cd.r)
    iu, ju = np.triu_indices(n, k=1)
    critical.update(float(v) for v in dm[iu, ju] / params.alpha)
    out = []
    for r in sorted(critical):
        active = [i for i in range(n) if cd.r[i] <= r]
        uf = _UnionFind(n)
        for a_idx in range(len(active)):
            for b_idx in range(a_idx + 1, len(active)):
                i, j = active[a_idx], active[b_idx]
                if dm[i, j] <= params.alpha * r:
                    uf.union(i, j)
        groups: dict[int, list[int]] = {}
        for i in active:
            groups.setdefault(uf.find(i), []).append(i)
        out.append((r, sorted(groups.values(), key=lambda g: g[0])))
    return out


@dataclass(frozen=True)
class CondensedCluster:
    """One cluster of the condensed tree.

    ``members`` lists every point present when the cluster is born, paired
    with the level at which it leaves this cluster: either the level of a
    small-side split it fell out of, or the cluster's death level if it
    persisted (into a child cluster, or until dissolution).
    """

    id: int
    parent: int | None
    lambda_birth: float
    lambda_death: float
    children: tuple[int, ...]
    members: tuple[tuple[int, float], ...]

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CondensedTree:
    """Hierarchy of density clusters with birth/death levels.

    Cluster ids are breadth-first creation order, so the root has id 0 and
    every parent id is smaller than its children's ids.
    """

    n: int
    clusters: tuple[CondensedCluster, ...]

    def cluster(self, cid: int) -> CondensedCluster:
        if not (0 <= cid < len(self.clusters)):
            raise KeyError(f"unknown cluster id {cid}")
        return self.clusters[cid]

    @property
    def root(self) -> CondensedCluster:
        return self.clusters[0]

    def subtree_ids(self, cid: int) -> list[int]:
        """Ids of ``cid`` and all its descendants (preorder)."""
        out = []
        stack = [cid]
        while stack:
            v = stack.pop()
            out.append(v)
            stack.extend(reversed(self.cluster(v).children))
        return out

    def leaf_ids(self) -> list[int]:
        return [c.id for c in self.clusters if not c.children]

    def validate(self) -> None:
        """Check structural invariants; raises ValueError on violation."""
        seen_points: dict[int, int] = {}
        for c in self.clusters:
            if c.lambda_birth > c.lambda_death:
                raise ValueError(f"cluster {c.id}: birth level exceeds death level")
            if c.parent is not None:
                parent = self.cluster(c.parent)
                if c.id not in parent.children:
                    raise ValueError(f"cluster {c.id} missing from parent's children")
                if c.parent >= c.id:
                    raise ValueError("parent ids must precede child ids")
                if c.lambda_birth != parent.lambda_death:
                    raise ValueError(
                        f"cluster {c.id}: birth level must equal parent's death level"
                    )
                member_set = {p for p, _ in self.cluster(c.parent).members}
                if not all(p in member_set for p, _ in c.members):
                    raise ValueError(f"cluster {c.id}: members not a subset of parent's")
            for p, lam_dep in c.members:
                if not (c.lambda_birth <= lam_dep <= c.lambda_death):
                    raise ValueError(
                        f"cluster {c.id}: departure level of point {p} outside lifetime"
                    )
                seen_points[p] = seen_points.get(p, 0) + 1
        root_points = {p for p, _ in self.root.members}
        if len(root_points) != self.n or len(self.root.members) != self.n:
            raise ValueError("root must contain every point exactly once")
        siblings: dict[int | None, list[int]] = {}
        for c in self.clusters:
            siblings.setdefault(c.parent, []).append(c.id)
        for parent_id, kids in siblings.items():
            if parent_id is None:
                continue
            covered: set[int] = set()
            for kid in kids:
                pts = {p for p, _ in self.cluster(kid).members}
                if covered & pts:
                    raise ValueError("sibling clusters must have disjoint members")
                covered |= pts

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "clusters": [
                {
                    "id": c.id,
                    "parent": c.parent,
                    "lambda_birth": c.lambda_birth,
                    "lambda_death": c.lambda_death,
                    "children": list(c.children),
                    "members": [[p, lam] for p, lam in c.members],
                }
                for c in self.clusters
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CondensedTree":
        clusters = tuple(
            CondensedCluster(
                id=int(c["id"]),
                parent=None if c["parent"] is None else int(c["parent"]),
                lambda_birth=float(c["lambda_birth"]),
                lambda_death=float(c["lambda_death"]),
                children=tuple(int(x) for x in c["children"]),
                members=tuple((int(p), float(lam)) for p, lam in c["members"]),
            )
            for c in sorted(data["clusters"], key=lambda c: int(c["id"]))
        )
        tree = cls(n=int(data["n"]), clusters=clusters)
        tree.validate()
        return tree


def _lambda_cap(radii: Sequence[float]) -> float:
    """Finite level assigned to zero radii: twice the largest finite level."""
    positive = [r for r in radii if r > 0.0]
    if not positive:
        return 1.0
    return 2.0 / min(positive)


def condense_tree(dend: Dendrogram, cd: CoreDistances, min_cluster_size: int) -> CondensedTree:
    """Condense a dendrogram into clusters of at least ``min_cluster_size``.

    Walks the hierarchy from the top with lambda = 1 / r. A split whose
    sides both hold at least ``min_cluster_size`` points ends the current
    cluster and births two children at that level. A split with one
    smaller side sheds those points as departures at that level and the
    cluster continues down the larger side. When both sides are smaller,
    the cluster dissolves: every remaining point departs at that level.

    The root cluster is born at the level of the final merge. Zero merge
    radii (exact duplicate points) would map to an infinite level; they are
    capped at twice the reciprocal of the smallest positive radius in the
    tree so every level stays finite and order-correct.
    """
    n = dend.n
    if min_cluster_size < 2:
        raise ValueError("min_cluster_size must be at least 2")
    if min_cluster_size > n:
        raise ValueError(f"min_cluster_size = {min_cluster_size} exceeds n = {n}")
    if cd.n != n:
        raise ValueError("core distances were computed for a different point set")

    cap = _lambda_cap(dend.merge_radii())

    def lam(r: float) -> float:
        return cap if r <= 0.0 else min(1.0 / r, cap)

    records: dict[int, CondensedCluster] = {}
    next_id = 0
    queue: deque[tuple[int, int, float, int | None]] = deque()

    def alloc(start_node: int, birth: float, parent: int | None) -> int:
        nonlocal next_id
        cid = next_id
        next_id += 1
        queue.append((cid, start_node, birth, parent))
        return cid

    alloc(dend.root, lam(dend.merges[-1].radius), None)
    while queue:
        cid, start_node, birth, parent = queue.popleft()
        departures: dict[int, float] = {}
        node = start_node
        while True:
            left, right = dend.children(node)
            level = lam(dend.node_radius(node))
            big_l = dend.leaf_count(left) >= min_cluster_size
            big_r = dend.leaf_count(right) >= min_cluster_size
            if big_l and big_r:
                death = level
                # Child order by smallest contained point for stable ids.
                first, second = sorted((left, right), key=lambda v: dend.leaves_under(v)[0])
                child_ids = (alloc(first, death, cid), alloc(second, death, cid))
                break
            if not big_l and not big_r:
                death = level
                child_ids = ()
                break
            small, node = (left, right) if not big_l else (right, left)
            for p in dend.leaves_under(small):
                departures[p] = level
        members = tuple(
            (p, departures.get(p, death)) for p in dend.leaves_under(start_node)
        )
        records[cid] = CondensedCluster(
            id=cid,
            parent=parent,
            lambda_birth=birth,
            lambda_death=death,
            children=child_ids,
            members=members,
        )
    clusters = tuple(records[cid] for cid in range(next_id))
    return CondensedTree(n=n, clusters=clusters)
