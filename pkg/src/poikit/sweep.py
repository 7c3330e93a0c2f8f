"""Parameter-sweep harness: grid generation, batch execution, summaries.

Grids follow two rules. Cut-based algorithms vary the extracted cluster
count over the integer range from 2 to the number of true sites. Density
algorithms derive their neighborhood sizes from quantiles of the true
per-site exemplar counts and their scale thresholds from low quantiles of
the pairwise distance distribution, then take the cross product.

Solutions that mark too much of the data as noise are flagged invalid and
never scored; the threshold defaults to requiring 75% non-noise.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import IO, Mapping, Sequence

import numpy as np

from .baselines import DbscanParams, cut_dendrogram, dbscan, single_linkage
from .clustertree import DEFAULT_ALPHA, RslParams, build_rsl_tree, condense_tree, default_k
from .evaluation import adjusted_rand_index, non_noise_fraction, rand_index
from .spatial import PointSet, core_distances, distance_matrix, distance_quantiles
from .stability import FlatClustering, extract_optimal

DEFAULT_VALIDITY_MIN_NON_NOISE = 0.75

MIN_PTS_QUANTILE_PROBS = (0.10, 0.95, 0.025)
EPS_QUANTILE_PROBS = (0.01, 0.20, 0.01)

RESULTS_CSV_HEADER = (
    "algorithm",
    "param_string",
    "ari",
    "ri",
    "non_noise_fraction",
    "num_clusters",
    "valid",
    "error",
)


@dataclass(frozen=True)
class SweepPlan:
    """One algorithm plus the parameter assignments to run it under."""

    algorithm: str
    grid: tuple[Mapping, ...]
    validity_min_non_noise: float = DEFAULT_VALIDITY_MIN_NON_NOISE

    def __post_init__(self):
        if self.algorithm not in ("rsl", "sl", "dbscan", "external"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not self.grid:
            raise ValueError("a sweep plan needs a non-empty grid")
        if not (0.0 <= self.validity_min_non_noise <= 1.0):
            raise ValueError("validity_min_non_noise must lie in [0, 1]")


@dataclass(frozen=True)
class SweepResult:
    """Outcome of one configuration; scores are None when not computed."""

    algorithm: str
    param_string: str
    valid: bool
    ari: float | None
    ri: float | None
    non_noise_fraction: float
    num_clusters: int
    error: str = ""


def seq(x: float, y: float, s: float) -> list:
    """Sequential range from x to y with step s, both endpoints included.

    Integer inputs yield integers. The upper endpoint is appended when the
    stepping does not land on it exactly, so seq(1, 10, 4) is 1, 5, 9, 10.
    """
    if x > y:
        raise ValueError(f"seq requires x <= y, got ({x}, {y})")
    if s <= 0:
        raise ValueError(f"seq requires a positive step, got {s}")
    integral = (
        isinstance(x, int) and isinstance(y, int) and isinstance(s, int)
    )
    if integral:
        values: list = list(range(x, y + 1, s))
        if values[-1] != y:
            values.append(y)
        return values
    steps = int(math.floor((y - x) / s + 1e-9))
    values = [x + i * s for i in range(steps + 1)]
    tol = 1e-9 * max(1.0, abs(y))
    if abs(values[-1] - y) <= tol:
        values[-1] = y
    else:
        values.append(y)
    return values


def build_grid_hierarchical(n_true: int) -> SweepPlan:
    """Cut grid for hierarchy baselines: cluster counts 2..n_true."""
    if n_true < 2:
        raise ValueError("the hierarchical grid needs at least two true clusters")
    grid = tuple({"num_clusters": c} for c in seq(2, n_true, 1))
    return SweepPlan(algorithm="sl", grid=grid)


def min_pts_quantile_values(truth_sizes: Sequence[int]) -> list[int]:
    """Neighborhood sizes from quantiles of the true per-site counts.

    Quantiles at probabilities 0.10, 0.125, ..., 0.95 are rounded half-up,
    clamped to at least 2, and deduplicated in ascending order.
    """
    if not truth_sizes:
        raise ValueError("truth sizes must be non-empty")
    probs = seq(*MIN_PTS_QUANTILE_PROBS)
    qs = np.quantile(np.asarray(truth_sizes, dtype=float), probs, method="linear")
    out: list[int] = []
    for q in qs:
        v = max(2, int(math.floor(float(q) + 0.5)))
        if not out or v != out[-1]:
            out.append(v)
    return out


def build_grid_density(truth_sizes: Sequence[int], ps: PointSet) -> SweepPlan:
    """DBSCAN grid: quantile-derived min_pts crossed with eps quantiles."""
    min_pts_values = min_pts_quantile_values(truth_sizes)
    eps_raw = distance_quantiles(ps, seq(*EPS_QUANTILE_PROBS))
    eps_values: list[float] = []
    for e in eps_raw:
        if not eps_values or e != eps_values[-1]:
            eps_values.append(e)
    grid = tuple(
        {"min_pts": m, "eps": e} for m in min_pts_values for e in eps_values
    )
    return SweepPlan(algorithm="dbscan", grid=grid)


def build_grid_rsl(
    truth_sizes: Sequence[int], n: int, *, d: int = 2, alpha: float = DEFAULT_ALPHA
) -> SweepPlan:
    """Neighborhood grid for the hierarchy estimator at fixed alpha.

    Uses the same truth-size quantiles as the density grid, restricted to
    k of at least ceil(d ln n); falls back to that single default when the
    restriction empties the grid.
    """
    ks = [k for k in min_pts_quantile_values(truth_sizes) if k >= math.ceil(d * math.log(n))]
    if not ks:
        ks = [default_k(n, d)]
    ks = [k for k in ks if k <= n]
    if not ks:
        raise ValueError("no feasible k values: dataset smaller than every candidate")
    grid = tuple({"k": k, "alpha": alpha} for k in ks)
    return SweepPlan(algorithm="rsl", grid=grid)


def _param_string(config: Mapping) -> str:
    parts = []
    for key in sorted(config):
        if key == "labels":
            continue
        parts.append(f"{key}={config[key]!r}" if isinstance(config[key], float) else f"{key}={config[key]}")
    return ",".join(parts)


def _execute(algorithm: str, config: Mapping, ps: PointSet, shared: dict) -> FlatClustering:
    if algorithm == "sl":
        if "sl_dendrogram" not in shared:
            shared["sl_dendrogram"] = single_linkage(ps)
        return cut_dendrogram(shared["sl_dendrogram"], int(config["num_clusters"]))
    if algorithm == "dbscan":
        if "distances" not in shared:
            shared["distances"] = distance_matrix(ps)
        params = DbscanParams(eps=float(config["eps"]), min_pts=int(config["min_pts"]))
        return dbscan(ps, params, precomputed=shared["distances"])
    if algorithm == "rsl":
        k = int(config["k"])
        params = RslParams(alpha=float(config.get("alpha", DEFAULT_ALPHA)), k=k)
        dend = build_rsl_tree(ps, params)
        cd = core_distances(ps, k)
        mcs = int(config.get("min_cluster_size", k))
        tree = condense_tree(dend, cd, mcs)
        _, flat = extract_optimal(tree)
        return flat
    if algorithm == "external":
        return FlatClustering.from_labels(config["labels"])
    raise ValueError(f"unknown algorithm {algorithm!r}")


def run_sweep(
    plan: SweepPlan,
    ps: PointSet,
    truth: FlatClustering,
    *,
    noise_mode: str = "singleton",
) -> list[SweepResult]:
    """Execute every configuration of ``plan`` and score the valid ones.

    A configuration is invalid when its non-noise fraction falls below the
    plan's threshold; invalid rows keep their place in the output but are
    never scored. Execution errors are recorded per row rather than
    aborting the sweep, so the output always has one row per grid entry.
    """
    if truth.n != ps.n:
        raise ValueError(f"truth has {truth.n} labels but the point set has {ps.n} points")
    shared: dict = {}
    results: list[SweepResult] = []
    for config in plan.grid:
        pstr = _param_string(config)
        try:
            flat = _execute(plan.algorithm, config, ps, shared)
            if flat.n != ps.n:
                raise ValueError(
                    f"configuration produced {flat.n} labels for {ps.n} points"
                )
            frac = non_noise_fraction(flat)
            valid = frac >= plan.validity_min_non_noise
            if valid:
                ari = adjusted_rand_index(flat, truth, noise_mode=noise_mode)
                ri = rand_index(flat, truth, noise_mode=noise_mode)
            else:
                ari = ri = None
            results.append(
                SweepResult(
                    algorithm=plan.algorithm,
                    param_string=pstr,
                    valid=valid,
                    ari=ari,
                    ri=ri,
                    non_noise_fraction=frac,
                    num_clusters=flat.m,
                )
            )
        except Exception as exc:  # per-row failure, sweep continues
            results.append(
                SweepResult(
                    algorithm=plan.algorithm,
                    param_string=pstr,
                    valid=False,
                    ari=None,
                    ri=None,
                    non_noise_fraction=0.0,
                    num_clusters=0,
                    error=str(exc),
                )
            )
    return results


def write_results_csv(results: Sequence[SweepResult], stream: IO[str]) -> None:
    """Write sweep rows; unscored cells are left empty."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RESULTS_CSV_HEADER)
    for r in results:
        writer.writerow(
            [
                r.algorithm,
                r.param_string,
                "" if r.ari is None else repr(r.ari),
                "" if r.ri is None else repr(r.ri),
                repr(r.non_noise_fraction),
                r.num_clusters,
                int(r.valid),
                r.error,
            ]
        )


def summarize(results: Sequence[SweepResult]) -> dict:
    """Per-algorithm score distribution over the scored rows."""
    by_algo: dict[str, list[SweepResult]] = {}
    for r in results:
        by_algo.setdefault(r.algorithm, []).append(r)
    summary: dict = {}
    for algo in sorted(by_algo):
        rows = by_algo[algo]
        scored = [r.ari for r in rows if r.ari is not None]
        summary[algo] = {
            "configurations": len(rows),
            "valid": sum(1 for r in rows if r.valid),
            "ari_min": min(scored) if scored else None,
            "ari_mean": sum(scored) / len(scored) if scored else None,
            "ari_max": max(scored) if scored else None,
        }
    return summary
