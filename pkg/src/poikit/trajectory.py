"""Trajectory ingestion and stay-point exemplar extraction.

Raw records are (object_id, t, x, y) rows. Parsing groups them into
per-object trajectories; extraction aggregates dwell segments into
exemplar positions that feed the clustering pipeline downstream.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

EARTH_RADIUS_M = 6371000.0

EXEMPLAR_CSV_HEADER = ("x", "y", "object_id", "t_start", "t_end", "support")


class TrajectoryParseError(ValueError):
    """Malformed trajectory input; message carries the 1-based line number."""

    def __init__(self, message: str, line_num: int | None = None):
        if line_num is not None:
            message = f"line {line_num}: {message}"
        super().__init__(message)
        self.line_num = line_num


@dataclass(frozen=True)
class TrajectoryPoint:
    """One time-indexed spatial sample of a moving object."""

    object_id: str
    t: float
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and self.t >= 0.0):
            raise ValueError(f"timestamp must be finite and non-negative, got {self.t!r}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"coordinates must be finite, got ({self.x!r}, {self.y!r})")


@dataclass(frozen=True)
class Trajectory:
    """Chronologically ordered samples of a single object."""

    object_id: str
    points: tuple[TrajectoryPoint, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("a trajectory needs at least one point")
        for p in self.points:
            if p.object_id != self.object_id:
                raise ValueError(
                    f"point object_id {p.object_id!r} does not match trajectory {self.object_id!r}"
                )
        for a, b in zip(self.points, self.points[1:]):
            if b.t <= a.t:
                raise ValueError(
                    f"timestamps must be strictly increasing within object {self.object_id!r} "
                    f"(t = {a.t} followed by t = {b.t})"
                )

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Exemplar:
    """Aggregated significant position derived from a trajectory segment."""

    x: float
    y: float
    source_object: str
    t_start: float
    t_end: float
    support: int

    def __post_init__(self):
        if self.t_end < self.t_start:
            raise ValueError("exemplar time window must satisfy t_start <= t_end")
        if self.support < 1:
            raise ValueError("exemplar support must be at least 1")


@dataclass(frozen=True)
class StayPointConfig:
    """Dwell thresholds for stay-point extraction."""

    dist_threshold: float
    time_threshold: float

    def __post_init__(self):
        if not (self.dist_threshold > 0.0):
            raise ValueError("dist_threshold must be strictly positive")
        if not (self.time_threshold > 0.0):
            raise ValueError("time_threshold must be strictly positive")


@dataclass(frozen=True)
class TrajectoryFormat:
    """Column layout of a delimited trajectory file."""

    delimiter: str = ","
    object_id_col: str = "object_id"
    t_col: str = "t"
    x_col: str = "x"
    y_col: str = "y"


def parse_trajectories(
    stream: IO[str] | Iterable[str], fmt: TrajectoryFormat = TrajectoryFormat()
) -> list[Trajectory]:
    """Parse delimited trajectory records into per-object trajectories.

    The stream must start with a header row naming at least the four
    configured columns. Rows are grouped by object id and sorted by
    timestamp; duplicate (object_id, t) pairs are rejected.

    Returns trajectories sorted by object id for deterministic output.
    """
    reader = csv.reader(stream, delimiter=fmt.delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise TrajectoryParseError("empty input: missing header row") from None
    wanted = (fmt.object_id_col, fmt.t_col, fmt.x_col, fmt.y_col)
    try:
        cols = {name: header.index(name) for name in wanted}
    except ValueError:
        raise TrajectoryParseError(
            f"header must contain columns {wanted}, got {tuple(header)}", line_num=1
        ) from None

    groups: dict[str, list[tuple[TrajectoryPoint, int]]] = {}
    for row in reader:
        line = reader.line_num
        if not row or all(field.strip() == "" for field in row):
            continue
        if len(row) < len(header):
            raise TrajectoryParseError(f"expected {len(header)} fields, got {len(row)}", line)
        oid = row[cols[fmt.object_id_col]].strip()
        if not oid:
            raise TrajectoryParseError("empty object_id", line)
        try:
            t = float(row[cols[fmt.t_col]])
            x = float(row[cols[fmt.x_col]])
            y = float(row[cols[fmt.y_col]])
        except ValueError as exc:
            raise TrajectoryParseError(f"non-numeric field ({exc})", line) from None
        try:
            point = TrajectoryPoint(object_id=oid, t=t, x=x, y=y)
        except ValueError as exc:
            raise TrajectoryParseError(str(exc), line) from None
        groups.setdefault(oid, []).append((point, line))

    trajectories = []
    for oid in sorted(groups):
        entries = sorted(groups[oid], key=lambda e: e[0].t)
        for (a, _), (b, line_b) in zip(entries, entries[1:]):
            if b.t == a.t:
                raise TrajectoryParseError(
                    f"duplicate timestamp t = {b.t} for object {oid!r}", line_b
                )
        trajectories.append(Trajectory(object_id=oid, points=tuple(p for p, _ in entries)))
    return trajectories


def _euclid(a: TrajectoryPoint, b: TrajectoryPoint) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def _mean_exemplar(window: Sequence[TrajectoryPoint]) -> Exemplar:
    mx = sum(p.x for p in window) / len(window)
    my = sum(p.y for p in window) / len(window)
    return Exemplar(
        x=mx,
        y=my,
        source_object=window[0].object_id,
        t_start=window[0].t,
        t_end=window[-1].t,
        support=len(window),
    )


def extract_stay_points(traj: Trajectory, cfg: StayPointConfig) -> list[Exemplar]:
    """Extract dwell exemplars with an anchor scan.

    From anchor index i, the window grows to the maximal j such that every
    point p_i..p_j lies within ``dist_threshold`` of the anchor p_i. If the
    window spans at least ``time_threshold`` seconds, one exemplar is
    emitted at the window's mean coordinate and the scan resumes at j + 1;
    otherwise the anchor advances by one. Emitted windows never share raw
    points, so supports sum to at most len(traj).
    """
    pts = traj.points
    n = len(pts)
    out: list[Exemplar] = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and _euclid(pts[i], pts[j + 1]) <= cfg.dist_threshold:
            j += 1
        if pts[j].t - pts[i].t >= cfg.time_threshold:
            out.append(_mean_exemplar(pts[i : j + 1]))
            i = j + 1
        else:
            i += 1
    return out


def extract_mean_speed_exemplars(
    traj: Trajectory, segment_len: int, speed_threshold: float
) -> list[Exemplar]:
    """Alternative aggregation: mean coordinates of fast segments.

    Slides non-overlapping windows of ``segment_len`` consecutive points
    and emits the window mean whenever the average speed over the window
    (path length / elapsed time) strictly exceeds ``speed_threshold``.
    Demonstrates that the aggregation step is pluggable; the default
    pipelines use stay points instead.
    """
    if segment_len < 2:
        raise ValueError("segment_len must be at least 2")
    pts = traj.points
    out: list[Exemplar] = []
    for start in range(0, len(pts) - segment_len + 1, segment_len):
        window = pts[start : start + segment_len]
        path = sum(_euclid(a, b) for a, b in zip(window, window[1:]))
        elapsed = window[-1].t - window[0].t
        if path / elapsed > speed_threshold:
            out.append(_mean_exemplar(window))
    return out


def project_equirectangular(trajectories: Sequence[Trajectory]) -> list[Trajectory]:
    """Project lat/lon degrees to planar meters (equirectangular).

    Interprets each point's x as longitude and y as latitude, both in
    degrees, and maps them to meters with x = R * lon * cos(lat0) and
    y = R * lat (radians, R = 6371000 m), where lat0 is the mean latitude
    over every point of the dataset.
    """
    all_points = [p for traj in trajectories for p in traj.points]
    if not all_points:
        return []
    lat0 = math.radians(sum(p.y for p in all_points) / len(all_points))
    cos_lat0 = math.cos(lat0)
    projected = []
    for traj in trajectories:
        pts = tuple(
            TrajectoryPoint(
                object_id=p.object_id,
                t=p.t,
                x=EARTH_RADIUS_M * math.radians(p.x) * cos_lat0,
                y=EARTH_RADIUS_M * math.radians(p.y),
            )
            for p in traj.points
        )
        projected.append(Trajectory(object_id=traj.object_id, points=pts))
    return projected


def write_exemplars_csv(exemplars: Iterable[Exemplar], stream: IO[str]) -> None:
    """Write exemplars as CSV with the documented column order."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(EXEMPLAR_CSV_HEADER)
    for e in exemplars:
        writer.writerow([repr(e.x), repr(e.y), e.source_object, repr(e.t_start), repr(e.t_end), e.support])


def read_exemplars_csv(stream: IO[str] | Iterable[str]) -> list[Exemplar]:
    """Read exemplars written by :func:`write_exemplars_csv`."""
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise TrajectoryParseError("empty exemplar file: missing header row") from None
    if tuple(h.strip() for h in header) != EXEMPLAR_CSV_HEADER:
        raise TrajectoryParseError(
            f"exemplar header must be {','.join(EXEMPLAR_CSV_HEADER)}", line_num=1
        )
    out = []
    for row in reader:
        line = reader.line_num
        if not row or all(field.strip() == "" for field in row):
            continue
        try:
            out.append(
                Exemplar(
                    x=float(row[0]),
                    y=float(row[1]),
                    source_object=row[2],
                    t_start=float(row[3]),
                    t_end=float(row[4]),
                    support=int(row[5]),
                )
            )
        except (ValueError, IndexError) as exc:
            raise TrajectoryParseError(f"bad exemplar row ({exc})", line) from None
    return out
