"""Cluster stability scoring and optimal flat extraction.

Each condensed cluster is scored by how much density mass it holds above
its birth level. The global score (excess of mass) integrates every point
of the cluster's full subtree up to where it finally leaves that subtree;
it grows monotonically toward the root and cannot rank clusters across
levels. The local variant (relative excess of mass) caps each point's
contribution at the cluster's own death level, making scores comparable
between a parent and its children.

The flat extraction maximizes the summed relative excess of mass over a
selection containing exactly one cluster per leaf-to-root branch, with the
root itself excluded. This is solved exactly by one bottom-up sweep: a
parent replaces its children's selection whenever its own score is at
least their propagated sum.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .clustertree import CondensedTree

NOISE_LABEL = 0

LABELS_CSV_HEADER = ("point_index", "label")


@dataclass(frozen=True)
class FlatClustering:
    """Point labels with 0 reserved for noise and clusters numbered 1..m."""

    labels: tuple[int, ...]
    m: int

    def __post_init__(self):
        if not self.labels:
            raise ValueError("a flat clustering needs at least one point")
        present = set(self.labels)
        if any(l < 0 or l > self.m for l in present):
            raise ValueError(f"labels must lie in 0..{self.m}")
        missing = set(range(1, self.m + 1)) - present
        if missing:
            raise ValueError(f"cluster labels must all occur; missing {sorted(missing)}")

    @property
    def n(self) -> int:
        return len(self.labels)

    @classmethod
    def from_labels(cls, labels: Iterable[int]) -> "FlatClustering":
        """Build from arbitrary integer labels.

        Zero stays the noise label; any other values are renumbered 1..m in
        order of first appearance.
        """
        raw = [int(l) for l in labels]
        remap: dict[int, int] = {}
        out = []
        for l in raw:
            if l == NOISE_LABEL:
                out.append(NOISE_LABEL)
                continue
            if l not in remap:
                remap[l] = len(remap) + 1
            out.append(remap[l])
        return cls(labels=tuple(out), m=len(remap))


@dataclass(frozen=True)
class StabilityReport:
    """Relative excess of mass per cluster and the selected flat solution."""

    scores: dict[int, float]
    selected: frozenset[int]
    objective: float

    def to_json_dict(self) -> dict:
        return {
            "objective": self.objective,
            "selected": sorted(self.selected),
            "scores": {str(cid): self.scores[cid] for cid in sorted(self.scores)},
        }


def excess_of_mass(tree: CondensedTree, cluster_id: int) -> float:
    """Total mass of the cluster's subtree above its birth level.

    Sums, over every point in the full subtree, the gap between the level
    at which the point finally leaves the subtree and the cluster's birth
    level.
    """
    cluster = tree.cluster(cluster_id)
    final_departure: dict[int, float] = {}
    for cid in tree.subtree_ids(cluster_id):
        for p, lam_dep in tree.cluster(cid).members:
            prev = final_departure.get(p)
            if prev is None or lam_dep > prev:
                final_departure[p] = lam_dep
    birth = cluster.lambda_birth
    return float(sum(lam - birth for lam in final_departure.values()))


def relative_excess_of_mass(tree: CondensedTree, cluster_id: int) -> float:
    """Stability of one cluster: mass within its own lifetime.

    Points shed as noise contribute up to their departure level; points
    persisting into children contribute up to the cluster's death level.
    Always bounded above by :func:`excess_of_mass` of the same cluster.
    """
    cluster = tree.cluster(cluster_id)
    birth = cluster.lambda_birth
    return float(sum(lam_dep - birth for _, lam_dep in cluster.members))


def _label_order(tree: CondensedTree, cluster_ids: Iterable[int]) -> list[int]:
    return sorted(cluster_ids, key=lambda cid: (tree.cluster(cid).lambda_birth, cid))


def _labels_from_selection(tree: CondensedTree, selected: Sequence[int]) -> FlatClustering:
    labels = [NOISE_LABEL] * tree.n
    for label, cid in enumerate(_label_order(tree, selected), start=1):
        for p, _ in tree.cluster(cid).members:
            labels[p] = label
    return FlatClustering(labels=tuple(labels), m=len(selected))


def extract_optimal(tree: CondensedTree) -> tuple[StabilityReport, FlatClustering]:
    """Solve the branch-constrained stability maximization.

    Bottom-up over the condensed tree: leaves start selected with their own
    score; an internal cluster (never the root) takes over from its
    children whenever its score reaches the sum it would otherwise
    propagate, with ties resolved toward the parent. Each point is then
    labeled by the selected cluster it was a member of, if any; points
    departing above every selected cluster are noise.

    A tree that never splits has nothing selectable (the root is excluded
    by construction), and degenerates to a single all-points cluster with
    an objective of zero.
    """
    ids = [c.id for c in tree.clusters]
    scores = {cid: relative_excess_of_mass(tree, cid) for cid in ids}
    sigma: dict[int, float] = {}
    chosen: dict[int, list[int]] = {}
    for cid in sorted(ids, reverse=True):
        cluster = tree.cluster(cid)
        if not cluster.children:
            sigma[cid] = scores[cid]
            chosen[cid] = [cid]
            continue
        child_sum = sum(sigma[ch] for ch in cluster.children)
        if cluster.parent is not None and scores[cid] >= child_sum:
            sigma[cid] = scores[cid]
            chosen[cid] = [cid]
        else:
            sigma[cid] = child_sum
            chosen[cid] = [cid2 for ch in cluster.children for cid2 in chosen[ch]]

    root = tree.root
    if root.children:
        selected = frozenset(chosen[root.id])
        objective = float(sum(scores[cid] for cid in selected))
        flat = _labels_from_selection(tree, sorted(selected))
    else:
        selected = frozenset()
        objective = 0.0
        flat = FlatClustering(labels=tuple([1] * tree.n), m=1)
    report = StabilityReport(scores=scores, selected=selected, objective=objective)
    return report, flat


def extract_at_lambda(tree: CondensedTree, lam: float) -> FlatClustering:
    """Flat clustering from a single global density level.

    A cluster covers ``lam`` when the level falls inside its lifetime
    (the root covers everything from level zero up to its death); a point
    belongs to the covering cluster when it has not yet departed. Points
    without such a cluster are noise. At level zero this is one cluster
    holding every point; above the tree's maximum level everything is
    noise.
    """
    if lam < 0.0:
        raise ValueError("the density level must be non-negative")
    covered: list[tuple[int, list[int]]] = []
    for c in tree.clusters:
        if c.parent is None:
            covers = lam <= c.lambda_death
        else:
            covers = c.lambda_birth < lam <= c.lambda_death
        if not covers:
            continue
        present = [p for p, lam_dep in c.members if lam_dep >= lam]
        if present:
            covered.append((c.id, present))
    labels = [NOISE_LABEL] * tree.n
    order = _label_order(tree, [cid for cid, _ in covered])
    rank = {cid: i + 1 for i, cid in enumerate(order)}
    for cid, present in covered:
        for p in present:
            labels[p] = rank[cid]
    return FlatClustering(labels=tuple(labels), m=len(covered))


def write_labels_csv(fc: FlatClustering, stream: IO[str]) -> None:
    """Write ``point_index,label`` rows (noise = 0)."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(LABELS_CSV_HEADER)
    for i, label in enumerate(fc.labels):
        writer.writerow([i, label])


def read_labels_csv(stream: IO[str] | Iterable[str]) -> FlatClustering:
    """Read a ``point_index,label`` file; labels are compacted to 1..m.

    Rows must cover point indices 0..n-1 exactly, in ascending order.
    """
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty label file: missing header row") from None
    if tuple(h.strip() for h in header) != LABELS_CSV_HEADER:
        raise ValueError(f"label header must be {','.join(LABELS_CSV_HEADER)}")
    labels = []
    for row in reader:
        if not row or all(field.strip() == "" for field in row):
            continue
        try:
            idx, label = int(row[0]), int(row[1])
        except (ValueError, IndexError) as exc:
            raise ValueError(f"bad label row {row!r} ({exc})") from None
        if idx != len(labels):
            raise ValueError(f"point indices must ascend from 0; got {idx} at row {len(labels)}")
        labels.append(label)
    if not labels:
        raise ValueError("label file contains no rows")
    return FlatClustering.from_labels(labels)
