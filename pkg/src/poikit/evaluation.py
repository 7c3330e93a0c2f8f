"""Partition agreement metrics and the non-noise validity rule.

Noise (label 0) needs a convention before pair-counting indices apply.
The default treats every noise point as its own singleton cluster, which
penalizes over-noising against a labeled truth without discarding data.
The alternative drops points that are noise in either labeling, for
sensitivity analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stability import NOISE_LABEL, FlatClustering

NOISE_MODES = ("singleton", "exclude")


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Co-assignment counts between two labelings of the same points."""

    counts: np.ndarray
    row_totals: np.ndarray
    col_totals: np.ndarray
    n: int

    @classmethod
    def from_labels(cls, a: list[int], b: list[int]) -> "ContingencyTable":
        if len(a) != len(b):
            raise ValueError(f"labelings differ in length: {len(a)} vs {len(b)}")
        ua = {l: i for i, l in enumerate(sorted(set(a)))}
        ub = {l: i for i, l in enumerate(sorted(set(b)))}
        counts = np.zeros((len(ua), len(ub)), dtype=np.int64)
        for la, lb in zip(a, b):
            counts[ua[la], ub[lb]] += 1
        return cls(
            counts=counts,
            row_totals=counts.sum(axis=1),
            col_totals=counts.sum(axis=0),
            n=len(a),
        )


def _apply_noise_mode(
    a: FlatClustering, b: FlatClustering, noise_mode: str
) -> tuple[list[int], list[int]]:
    if a.n != b.n:
        raise ValueError(f"labelings differ in length: {a.n} vs {b.n}")
    if noise_mode not in NOISE_MODES:
        raise ValueError(f"noise_mode must be one of {NOISE_MODES}, got {noise_mode!r}")
    if noise_mode == "exclude":
        keep = [
            i for i in range(a.n) if a.labels[i] != NOISE_LABEL and b.labels[i] != NOISE_LABEL
        ]
        return [a.labels[i] for i in keep], [b.labels[i] for i in keep]
    # singleton: give each noise point a fresh label of its own
    out = []
    for fc in (a, b):
        fresh = fc.m
        labels = []
        for l in fc.labels:
            if l == NOISE_LABEL:
                fresh += 1
                labels.append(fresh)
            else:
                labels.append(l)
        out.append(labels)
    return out[0], out[1]


def _comb2(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float((x * (x - 1.0) / 2.0).sum())


def _partitions_equal(a: list[int], b: list[int]) -> bool:
    blocks_a: dict[int, set[int]] = {}
    blocks_b: dict[int, set[int]] = {}
    for i, (la, lb) in enumerate(zip(a, b)):
        blocks_a.setdefault(la, set()).add(i)
        blocks_b.setdefault(lb, set()).add(i)
    return {frozenset(s) for s in blocks_a.values()} == {frozenset(s) for s in blocks_b.values()}


def rand_index(a: FlatClustering, b: FlatClustering, *, noise_mode: str = "singleton") -> float:
    """Fraction of point pairs on which the two partitions agree."""
    la, lb = _apply_noise_mode(a, b, noise_mode)
    if len(la) < 2:
        raise ValueError("the Rand index needs at least two points after noise handling")
    table = ContingencyTable.from_labels(la, lb)
    total_pairs = table.n * (table.n - 1) / 2.0
    together_both = _comb2(table.counts)
    together_a = _comb2(table.row_totals)
    together_b = _comb2(table.col_totals)
    agreements = total_pairs + 2.0 * together_both - together_a - together_b
    return float(agreements / total_pairs)


def adjusted_rand_index(
    a: FlatClustering, b: FlatClustering, *, noise_mode: str = "singleton"
) -> float:
    """Hubert-Arabie chance-corrected Rand index.

    Returns 1 for identical partitions and can be negative. When the
    correction denominator vanishes (both labelings degenerate), returns
    1.0 if the partitions coincide and 0.0 otherwise.
    """
    la, lb = _apply_noise_mode(a, b, noise_mode)
    if len(la) < 2:
        raise ValueError("the adjusted Rand index needs at least two points after noise handling")
    table = ContingencyTable.from_labels(la, lb)
    total_pairs = table.n * (table.n - 1) / 2.0
    index = _comb2(table.counts)
    sum_a = _comb2(table.row_totals)
    sum_b = _comb2(table.col_totals)
    expected = sum_a * sum_b / total_pairs
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0 if _partitions_equal(la, lb) else 0.0
    return float((index - expected) / (max_index - expected))


def non_noise_fraction(c: FlatClustering) -> float:
    """Fraction of points carrying a non-noise label."""
    return sum(1 for l in c.labels if l != NOISE_LABEL) / c.n
