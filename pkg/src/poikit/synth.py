"""Labeled synthetic exemplar scenes for acceptance testing.

Scenes mimic how truth is defined for stop-point data: stops happen
inside buildings and around junctions, so exemplars drawn around one site
share that site's label, and uniform background clutter is labeled noise.
Everything is a pure function of the scene specification; per-site
generators are derived from the scene seed so sites could be sampled
independently without changing the output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO

import numpy as np

from .spatial import PointSet
from .stability import NOISE_LABEL, FlatClustering


@dataclass(frozen=True)
class BuildingSpec:
    """Axis-aligned rectangle with stops spread over its interior."""

    rect: tuple[float, float, float, float]  # (xmin, ymin, xmax, ymax)
    expected_stops: float
    dispersion: float

    def __post_init__(self):
        xmin, ymin, xmax, ymax = self.rect
        if not (xmax > xmin and ymax > ymin):
            raise ValueError(f"degenerate rectangle {self.rect}")
        if self.expected_stops < 0:
            raise ValueError("expected_stops must be non-negative")
        if not (self.dispersion > 0):
            raise ValueError("dispersion must be strictly positive")


@dataclass(frozen=True)
class JunctionSpec:
    """Point site with stops scattered around it."""

    site: tuple[float, float]
    expected_stops: float
    dispersion: float

    def __post_init__(self):
        if self.expected_stops < 0:
            raise ValueError("expected_stops must be non-negative")
        if not (self.dispersion > 0):
            raise ValueError("dispersion must be strictly positive")


@dataclass(frozen=True)
class SceneSpec:
    """Buildings, junctions, background clutter rate, and the seed."""

    buildings: tuple[BuildingSpec, ...]
    junctions: tuple[JunctionSpec, ...]
    clutter_rate: float
    seed: int

    def __post_init__(self):
        if not self.buildings and not self.junctions:
            raise ValueError("a scene needs at least one building or junction")
        if self.clutter_rate < 0:
            raise ValueError("clutter_rate must be non-negative")

    def to_json_dict(self) -> dict:
        return {
            "seed": self.seed,
            "clutter_rate": self.clutter_rate,
            "buildings": [
                {
                    "rect": list(b.rect),
                    "expected_stops": b.expected_stops,
                    "dispersion": b.dispersion,
                }
                for b in self.buildings
            ],
            "junctions": [
                {
                    "site": list(j.site),
                    "expected_stops": j.expected_stops,
                    "dispersion": j.dispersion,
                }
                for j in self.junctions
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SceneSpec":
        return cls(
            buildings=tuple(
                BuildingSpec(
                    rect=tuple(float(v) for v in b["rect"]),
                    expected_stops=float(b["expected_stops"]),
                    dispersion=float(b["dispersion"]),
                )
                for b in data.get("buildings", [])
            ),
            junctions=tuple(
                JunctionSpec(
                    site=tuple(float(v) for v in j["site"]),
                    expected_stops=float(j["expected_stops"]),
                    dispersion=float(j["dispersion"]),
                )
                for j in data.get("junctions", [])
            ),
            clutter_rate=float(data.get("clutter_rate", 0.0)),
            seed=int(data["seed"]),
        )

    @classmethod
    def load(cls, stream: IO[str]) -> "SceneSpec":
        return cls.from_json_dict(json.load(stream))


def _bounding_box(spec: SceneSpec) -> tuple[float, float, float, float]:
    xs: list[float] = []
    ys: list[float] = []
    for b in spec.buildings:
        xs += [b.rect[0], b.rect[2]]
        ys += [b.rect[1], b.rect[3]]
    for j in spec.junctions:
        xs.append(j.site[0])
        ys.append(j.site[1])
    dispersions = [b.dispersion for b in spec.buildings] + [j.dispersion for j in spec.junctions]
    pad = 3.0 * max(dispersions)
    return (min(xs) - pad, min(ys) - pad, max(xs) + pad, max(ys) + pad)


def generate_scene(spec: SceneSpec) -> tuple[PointSet, FlatClustering]:
    """Sample a scene into exemplar coordinates plus truth labels.

    Per-site stop counts are Poisson with the configured expectation.
    Building stops are uniform over the rectangle convolved with Gaussian
    dispersion; junction stops are Gaussian around the site; clutter is
    uniform over the padded bounding box and labeled noise. Sites are
    labeled 1..m in specification order (buildings first); sites that draw
    zero stops are skipped, with the remaining labels compacted.
    """
    sites: list[BuildingSpec | JunctionSpec] = list(spec.buildings) + list(spec.junctions)
    root = np.random.SeedSequence(spec.seed)
    streams = root.spawn(len(sites) + 1)
    coords: list[np.ndarray] = []
    labels: list[int] = []
    next_label = 0
    for site, stream in zip(sites, streams[:-1]):
        rng = np.random.default_rng(stream)
        count = int(rng.poisson(site.expected_stops))
        if count == 0:
            continue
        if isinstance(site, BuildingSpec):
            xmin, ymin, xmax, ymax = site.rect
            base = np.column_stack(
                [rng.uniform(xmin, xmax, count), rng.uniform(ymin, ymax, count)]
            )
            pts = base + rng.normal(0.0, site.dispersion, size=(count, 2))
        else:
            pts = rng.normal(np.asarray(site.site), site.dispersion, size=(count, 2))
        next_label += 1
        coords.append(pts)
        labels.extend([next_label] * count)
    clutter_rng = np.random.default_rng(streams[-1])
    clutter_count = int(clutter_rng.poisson(spec.clutter_rate)) if spec.clutter_rate > 0 else 0
    if clutter_count > 0:
        xmin, ymin, xmax, ymax = _bounding_box(spec)
        pts = np.column_stack(
            [
                clutter_rng.uniform(xmin, xmax, clutter_count),
                clutter_rng.uniform(ymin, ymax, clutter_count),
            ]
        )
        coords.append(pts)
        labels.extend([NOISE_LABEL] * clutter_count)
    if not coords:
        raise ValueError("scene generated no points; raise the expected stop counts")
    ps = PointSet(np.vstack(coords))
    truth = FlatClustering(labels=tuple(labels), m=next_label)
    return ps, truth
