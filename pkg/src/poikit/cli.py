"""Command-line front end for the POI discovery pipeline.

Subcommands chain through files: ``exemplars`` turns raw trajectory
records into exemplar positions, ``poi`` clusters exemplars into
points of interest, ``eval`` scores two label files against each other,
``sweep`` runs parameter grids for the comparison harness, and ``synth``
generates labeled synthetic scenes. Every command is deterministic given
its inputs and flags. Exit codes: 0 on success, 2 on usage errors, 1 on
runtime failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import IO

from . import baselines, sweep as sweep_mod, synth as synth_mod
from .clustertree import DEFAULT_ALPHA, RslParams, build_rsl_tree, condense_tree, default_k
from .evaluation import adjusted_rand_index, non_noise_fraction, rand_index
from .spatial import PointSet, core_distances
from .stability import (
    FlatClustering,
    extract_at_lambda,
    extract_optimal,
    read_labels_csv,
    write_labels_csv,
)
from .trajectory import (
    Exemplar,
    StayPointConfig,
    extract_stay_points,
    parse_trajectories,
    project_equirectangular,
    read_exemplars_csv,
    write_exemplars_csv,
)


def _open_read(path: str) -> IO[str]:
    try:
        return open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise ValueError(f"cannot read {path}: {exc.strerror}") from None


def _open_write(path: str) -> IO[str]:
    try:
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise ValueError(f"cannot write {path}: {exc.strerror}") from None


def _read_exemplars(path: str) -> list[Exemplar]:
    with _open_read(path) as fh:
        try:
            return read_exemplars_csv(fh)
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None


def _read_labels(path: str) -> FlatClustering:
    with _open_read(path) as fh:
        try:
            return read_labels_csv(fh)
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None


def _point_set(exemplars: list[Exemplar]) -> PointSet:
    return PointSet.from_points([(e.x, e.y) for e in exemplars])


def _write_json(data: dict, path: str) -> None:
    with _open_write(path) as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_exemplars(args: argparse.Namespace) -> int:
    with _open_read(args.input) as fh:
        try:
            trajectories = parse_trajectories(fh)
        except ValueError as exc:
            raise ValueError(f"{args.input}: {exc}") from None
    if not trajectories:
        raise ValueError(f"{args.input}: no trajectory records found")
    if args.latlon:
        trajectories = project_equirectangular(trajectories)
    cfg = StayPointConfig(dist_threshold=args.dist_threshold, time_threshold=args.time_threshold)
    exemplars = [e for traj in trajectories for e in extract_stay_points(traj, cfg)]
    with _open_write(args.output) as fh:
        write_exemplars_csv(exemplars, fh)
    print(f"exemplars {len(exemplars)}")
    return 0


def cmd_poi(args: argparse.Namespace) -> int:
    exemplars = _read_exemplars(args.input)
    n = len(exemplars)
    if n < 2:
        raise ValueError(f"{args.input}: POI extraction needs at least 2 exemplars, got {n}")
    ps = _point_set(exemplars)
    k = args.k if args.k is not None else default_k(n)
    if k > n:
        raise ValueError(f"k = {k} exceeds the number of exemplars n = {n}")
    params = RslParams(alpha=args.alpha, k=k)
    dend = build_rsl_tree(ps, params)

    if args.cut is not None:
        flat = baselines.cut_dendrogram(dend, args.cut)
    else:
        cd = core_distances(ps, k)
        mcs = args.min_cluster_size if args.min_cluster_size is not None else k
        tree = condense_tree(dend, cd, mcs)
        if args.tree_out:
            _write_json(tree.to_json_dict(), args.tree_out)
        if args.lam is not None:
            flat = extract_at_lambda(tree, args.lam)
        else:
            report, flat = extract_optimal(tree)
            if args.stability_out:
                _write_json(report.to_json_dict(), args.stability_out)
    with _open_write(args.labels_out) as fh:
        write_labels_csv(flat, fh)
    print(f"pois {flat.m}")
    print(f"noise_fraction {1.0 - non_noise_fraction(flat)!r}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    a = _read_labels(args.labels_a)
    b = _read_labels(args.labels_b)
    ari = adjusted_rand_index(a, b, noise_mode=args.noise_mode)
    ri = rand_index(a, b, noise_mode=args.noise_mode)
    frac = non_noise_fraction(a)
    print(f"ari {ari!r}")
    print(f"ri {ri!r}")
    print(f"non_noise_fraction {frac!r}")
    if args.output:
        with _open_write(args.output) as fh:
            fh.write("algorithm,param_string,ari,ri,non_noise_fraction,num_clusters\n")
            fh.write(
                f"eval,noise_mode={args.noise_mode},{ari!r},{ri!r},{frac!r},{a.m}\n"
            )
    return 0


def _truth_sizes(truth: FlatClustering) -> list[int]:
    counts: dict[int, int] = {}
    for label in truth.labels:
        if label != 0:
            counts[label] = counts.get(label, 0) + 1
    return [counts[label] for label in sorted(counts)]


def cmd_sweep(args: argparse.Namespace) -> int:
    exemplars = _read_exemplars(args.input)
    if len(exemplars) < 2:
        raise ValueError(f"{args.input}: sweeping needs at least 2 exemplars")
    ps = _point_set(exemplars)
    truth = _read_labels(args.truth)
    if truth.n != ps.n:
        raise ValueError(
            f"truth file has {truth.n} labels but {args.input} has {ps.n} exemplars"
        )
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    sizes = _truth_sizes(truth)
    plans: list[sweep_mod.SweepPlan] = []
    for algo in algorithms:
        if algo == "rsl":
            if args.k:
                grid = tuple({"k": k, "alpha": args.alpha} for k in args.k)
                plan = sweep_mod.SweepPlan(algorithm="rsl", grid=grid)
            else:
                plan = sweep_mod.build_grid_rsl(sizes, ps.n, alpha=args.alpha)
        elif algo == "sl":
            plan = sweep_mod.build_grid_hierarchical(truth.m)
        elif algo == "dbscan":
            if args.eps and args.min_pts:
                grid = tuple(
                    {"min_pts": m, "eps": e} for m in args.min_pts for e in args.eps
                )
                plan = sweep_mod.SweepPlan(algorithm="dbscan", grid=grid)
            else:
                plan = sweep_mod.build_grid_density(sizes, ps)
        else:
            raise ValueError(f"unknown algorithm {algo!r} (expected rsl, sl, dbscan)")
        plans.append(
            dataclasses.replace(plan, validity_min_non_noise=args.validity_min_non_noise)
        )
    for entry in args.external or []:
        name, _, path = entry.partition("=")
        if not path:
            raise ValueError(f"--external expects name=path, got {entry!r}")
        labels = _read_labels(path)
        plans.append(
            sweep_mod.SweepPlan(
                algorithm="external",
                grid=({"name": name, "labels": labels.labels},),
                validity_min_non_noise=args.validity_min_non_noise,
            )
        )
    results: list[sweep_mod.SweepResult] = []
    for plan in plans:
        results.extend(sweep_mod.run_sweep(plan, ps, truth, noise_mode=args.noise_mode))
    with _open_write(args.results_out) as fh:
        sweep_mod.write_results_csv(results, fh)
    summary = sweep_mod.summarize(results)
    if args.summary_out:
        _write_json(summary, args.summary_out)
    for algo in sorted(summary):
        s = summary[algo]
        print(
            f"{algo} configurations {s['configurations']} valid {s['valid']} "
            f"ari_mean {s['ari_mean']!r}"
        )
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    with _open_read(args.scene) as fh:
        try:
            spec = synth_mod.SceneSpec.load(fh)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"{args.scene}: bad scene specification ({exc})") from None
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    ps, truth = synth_mod.generate_scene(spec)
    exemplars = [
        Exemplar(
            x=float(x),
            y=float(y),
            source_object=f"site_{label}" if label != 0 else "clutter",
            t_start=0.0,
            t_end=0.0,
            support=1,
        )
        for (x, y), label in zip(ps.coords, truth.labels)
    ]
    with _open_write(args.output) as fh:
        write_exemplars_csv(exemplars, fh)
    with _open_write(args.truth_out) as fh:
        write_labels_csv(truth, fh)
    print(f"points {ps.n}")
    print(f"sites {truth.m}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poikit",
        description="Intrinsic point-of-interest discovery from trajectory data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exemplars", help="extract stay-point exemplars from trajectories")
    p.add_argument("--input", required=True, help="trajectory CSV (object_id,t,x,y)")
    p.add_argument("--output", required=True, help="exemplar CSV to write")
    p.add_argument("--dist-threshold", type=float, required=True, help="dwell radius in meters")
    p.add_argument("--time-threshold", type=float, required=True, help="dwell time in seconds")
    p.add_argument(
        "--latlon",
        action="store_true",
        help="treat x,y as lon,lat degrees and project to meters first",
    )
    p.set_defaults(func=cmd_exemplars)

    p = sub.add_parser("poi", help="extract points of interest from exemplars")
    p.add_argument("--input", required=True, help="exemplar CSV")
    p.add_argument("--labels-out", required=True, help="labels CSV to write")
    p.add_argument("--tree-out", help="condensed tree JSON to write")
    p.add_argument("--stability-out", help="stability report JSON to write")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="scale factor (>= 1)")
    p.add_argument("--k", type=int, help="neighborhood count (default: max(2, ceil(2 ln n)))")
    p.add_argument("--min-cluster-size", type=int, help="condensation threshold (default: k)")
    p.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        help="cut the condensed tree at this density level instead of optimizing",
    )
    p.add_argument(
        "--cut",
        type=int,
        help="cut the dendrogram into this many clusters instead of condensing",
    )
    p.set_defaults(func=cmd_poi)

    p = sub.add_parser("eval", help="score two label files against each other")
    p.add_argument("labels_a", help="labels CSV (the clustering under evaluation)")
    p.add_argument("labels_b", help="labels CSV (the reference)")
    p.add_argument("--noise-mode", choices=["singleton", "exclude"], default="singleton")
    p.add_argument("--output", help="metrics row CSV to write")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="run parameter grids and score against truth")
    p.add_argument("--input", required=True, help="exemplar CSV")
    p.add_argument("--truth", required=True, help="truth labels CSV")
    p.add_argument("--results-out", required=True, help="per-configuration CSV to write")
    p.add_argument("--summary-out", help="per-algorithm summary JSON to write")
    p.add_argument(
        "--algorithms",
        default="rsl,sl,dbscan",
        help="comma list among rsl, sl, dbscan (default: all three)",
    )
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="scale factor for rsl")
    p.add_argument("--k", type=int, action="append", help="rsl k override (repeatable)")
    p.add_argument("--eps", type=float, action="append", help="dbscan eps override (repeatable)")
    p.add_argument(
        "--min-pts", type=int, action="append", help="dbscan min_pts override (repeatable)"
    )
    p.add_argument("--noise-mode", choices=["singleton", "exclude"], default="singleton")
    p.add_argument(
        "--validity-min-non-noise",
        type=float,
        default=sweep_mod.DEFAULT_VALIDITY_MIN_NON_NOISE,
        help="minimum non-noise fraction for a density solution to be scored",
    )
    p.add_argument(
        "--external",
        action="append",
        help="score an external label file, as name=path (repeatable)",
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="generate a labeled synthetic scene")
    p.add_argument("--scene", required=True, help="scene specification JSON")
    p.add_argument("--seed", type=int, help="override the scene seed")
    p.add_argument("--output", required=True, help="exemplar CSV to write")
    p.add_argument("--truth-out", required=True, help="truth labels CSV to write")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
