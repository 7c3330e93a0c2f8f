"""Planar metric-space queries over exemplar coordinates.

Everything here is brute-force over the full distance matrix on purpose:
it is the reference path against which any accelerated index must be
checked for exact equality. Point counts in this toolkit are exemplar
counts (thousands, not millions), so O(n^2) is the pragmatic choice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True, eq=False)
class PointSet:
    """Immutable set of planar points (meters).

    Parameters
    ----------
    coords : array-like, shape (n, d)
        Finite coordinates, one row per point. The reference pipeline uses
        d = 2; nothing below assumes more than d >= 1.
    """

    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 2 or c.shape[1] < 1:
            raise ValueError(f"coords must be a 2-d (n, d) array, got shape {c.shape}")
        if c.shape[0] < 1:
            raise ValueError("a PointSet needs at least one point")
        if not np.all(np.isfinite(c)):
            raise ValueError("coordinates must be finite")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]]) -> "PointSet":
        return cls(np.asarray(list(points), dtype=float))


@dataclass(frozen=True, eq=False)
class CoreDistances:
    """Per-point radius of the smallest closed ball holding k points.

    The point itself counts as its own first neighbor, so k = 1 gives all
    zeros and k = 2 gives nearest-neighbor distances.
    """

    k: int
    r: np.ndarray

    def __post_init__(self):
        rr = np.asarray(self.r, dtype=float)
        if rr.ndim != 1:
            raise ValueError("core-distance radii must be a 1-d array")
        if np.any(rr < 0) or not np.all(np.isfinite(rr)):
            raise ValueError("core-distance radii must be finite and non-negative")
        rr = rr.copy()
        rr.flags.writeable = False
        object.__setattr__(self, "r", rr)

    @property
    def n(self) -> int:
        return self.r.shape[0]


def distance_matrix(ps: PointSet) -> np.ndarray:
    """Full Euclidean distance matrix, shape (n, n)."""
    diff = ps.coords[:, None, :] - ps.coords[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def pairwise_distance(ps: PointSet, i: int, j: int) -> float:
    """Euclidean distance between points i and j.

    Uses the same arithmetic as :func:`distance_matrix`, so single lookups
    agree bit-for-bit with matrix entries.
    """
    n = ps.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"point index out of range: ({i}, {j}) with n = {n}")
    diff = ps.coords[i] - ps.coords[j]
    return float(np.sqrt((diff * diff).sum()))


def core_distances(ps: PointSet, k: int) -> CoreDistances:
    """Distance from each point to its k-th nearest point, self included.

    Parameters
    ----------
    ps : PointSet
    k : int
        Neighborhood count, 1 <= k <= n.

    Returns
    -------
    CoreDistances
        r[i] is the smallest radius whose closed ball around point i
        contains at least k points of the set.
    """
    if not (1 <= k <= ps.n):
        raise ValueError(f"k must satisfy 1 <= k <= n = {ps.n}, got {k}")
    dm = distance_matrix(ps)
    # k-th smallest per row; the zero self-distance occupies rank 1.
    r = np.partition(dm, k - 1, axis=1)[:, k - 1]
    return CoreDistances(k=k, r=r)


def condensed_distances(ps: PointSet) -> np.ndarray:
    """The n(n-1)/2 distinct-pair distances, in (i < j) row-major order."""
    dm = distance_matrix(ps)
    iu = np.triu_indices(ps.n, k=1)
    return dm[iu]


def distance_quantiles(ps: PointSet, probs: Sequence[float]) -> list[float]:
    """Empirical quantiles of the distinct-pair distance distribution.

    Uses linear interpolation between closest order statistics. Requires
    n >= 2 so that at least one pair exists.
    """
    if ps.n < 2:
        raise ValueError("distance quantiles need at least two points")
    p = np.asarray(list(probs), dtype=float)
    if p.size == 0:
        return []
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("quantile probabilities must lie in [0, 1]")
    d = condensed_distances(ps)
    return [float(q) for q in np.quantile(d, p, method="linear")]
