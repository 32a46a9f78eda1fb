"""UE mobility traces: loading, interpolation, GPS projection and resampling."""
from __future__ import annotations

import bisect
import csv
import logging
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .messages import Location

log = logging.getLogger(__name__)

EARTH_RADIUS = 6_371_008.8  # mean radius, m


@dataclass
class MobilityTrace:
    ue_id: str
    times: list[float]
    points: list[Location]

    def __post_init__(self):
        if not self.times:
            raise ValueError(f"trace of {self.ue_id} is empty")
        if len(self.times) != len(self.points):
            raise ValueError("times and points differ in length")
        for a, b in zip(self.times, self.times[1:]):
            if not b > a:
                raise ValueError(f"trace of {self.ue_id}: timestamps not strictly increasing")
        self.points = [(float(x), float(y)) for x, y in self.points]

    @classmethod
    def static(cls, ue_id: str, location: Location) -> "MobilityTrace":
        return cls(ue_id, [0.0], [tuple(location)])

    @property
    def start(self) -> float:
        return self.times[0]

    @property
    def end(self) -> float:
        return self.times[-1]

    def __call__(self, t: float) -> Location:
        return position(self, t)


def position(trace: MobilityTrace, t: float) -> Location:
    """Linear interpolation, clamped to the first/last sample outside the span."""
    times = trace.times
    if t <= times[0]:
        return trace.points[0]
    if t >= times[-1]:
        return trace.points[-1]
    i = bisect.bisect_right(times, t)
    t0, t1 = times[i - 1], times[i]
    (x0, y0), (x1, y1) = trace.points[i - 1], trace.points[i]
    w = (t - t0) / (t1 - t0)
    return (x0 + w * (x1 - x0), y0 + w * (y1 - y0))


# ---------------------------------------------------------------------------
# trace files

def read_traces(path: str | Path) -> list[MobilityTrace]:
    """Read a ``ue_id,epoch_s,x_m,y_m`` or ``ue_id,epoch_s,lat,lon`` CSV file.

    Geographic files are projected to metres around their centroid.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        columns = set(reader.fieldnames or ())
        rows = list(reader)
    if {"ue_id", "epoch_s", "x_m", "y_m"} <= columns:
        samples = defaultdict(list)
        for row in rows:
            samples[row["ue_id"]].append((float(row["epoch_s"]), float(row["x_m"]), float(row["y_m"])))
        return _build_traces(samples)
    if {"ue_id", "epoch_s", "lat", "lon"} <= columns:
        return ingest_gps(path, target_rate=None)
    raise ValueError(f"{path}: unrecognised trace header {sorted(columns)}")


def write_traces(traces: Iterable[MobilityTrace], path: str | Path) -> None:
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ue_id", "epoch_s", "x_m", "y_m"])
        for trace in traces:
            for t, (x, y) in zip(trace.times, trace.points):
                writer.writerow([trace.ue_id, repr(t), repr(x), repr(y)])


def _build_traces(samples: dict[str, list[tuple[float, float, float]]]) -> list[MobilityTrace]:
    traces = []
    for ue_id in sorted(samples):
        rows = samples[ue_id]
        times, points, last = [], [], -math.inf
        for t, x, y in rows:
            if t <= last:
                log.warning("trace %s: dropping out-of-order sample at %s", ue_id, t)
                continue
            last = t
            times.append(t)
            points.append((x, y))
        traces.append(MobilityTrace(ue_id, times, points))
    return traces


@dataclass(frozen=True)
class Projection:
    """Equirectangular projection about a reference point."""

    lat0: float
    lon0: float

    def to_xy(self, lat: float, lon: float) -> Location:
        x = math.radians(lon - self.lon0) * EARTH_RADIUS * math.cos(math.radians(self.lat0))
        y = math.radians(lat - self.lat0) * EARTH_RADIUS
        return (x, y)

    def to_latlon(self, x: float, y: float) -> tuple[float, float]:
        lat = self.lat0 + math.degrees(y / EARTH_RADIUS)
        lon = self.lon0 + math.degrees(x / (EARTH_RADIUS * math.cos(math.radians(self.lat0))))
        return (lat, lon)


def haversine(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp, dl = p2 - p1, math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS * math.asin(math.sqrt(a))


def resample(trace: MobilityTrace, target_rate: float) -> MobilityTrace:
    """Linear resampling at ``target_rate`` samples/s, keeping both endpoints."""
    if len(trace.times) < 2 or target_rate is None:
        return trace
    step = 1.0 / target_rate
    span = trace.end - trace.start
    n = int(math.floor(span / step + 1e-9))
    times = [trace.start + k * step for k in range(n + 1)]
    if trace.end - times[-1] > 1e-9:
        times.append(trace.end)
    else:
        times[-1] = trace.end
    return MobilityTrace(trace.ue_id, times, [position(trace, t) for t in times])


def ingest_gps(path: str | Path, target_rate: float | None = 0.1,
               projection: Projection | None = None) -> list[MobilityTrace]:
    """Load ``ue_id,epoch_s,lat,lon`` rows, project them and resample."""
    samples = defaultdict(list)
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            samples[row["ue_id"]].append((float(row["epoch_s"]), float(row["lat"]), float(row["lon"])))
    if projection is None:
        lats = [lat for rows in samples.values() for _, lat, _ in rows]
        lons = [lon for rows in samples.values() for _, _, lon in rows]
        projection = Projection(float(np.mean(lats)), float(np.mean(lons)))
    projected = {ue: [(t, *projection.to_xy(lat, lon)) for t, lat, lon in rows]
                 for ue, rows in samples.items()}
    traces = _build_traces(projected)
    if target_rate is not None:
        traces = [resample(tr, target_rate) for tr in traces]
    return traces


def synthetic_traces(n: int, duration: float, area: tuple[float, float, float, float],
                     seed: int = 0, speed: tuple[float, float] = (5.0, 15.0),
                     sample_period: float = 10.0, static_fraction: float = 0.0) -> list[MobilityTrace]:
    """Random-waypoint traces inside ``area = (xmin, ymin, xmax, ymax)``."""
    rng = random.Random(seed)
    xmin, ymin, xmax, ymax = area
    traces = []
    for i in range(n):
        ue_id = f"ue_{i}"
        here = (rng.uniform(xmin, xmax), rng.uniform(ymin, ymax))
        if rng.random() < static_fraction:
            traces.append(MobilityTrace.static(ue_id, here))
            continue
        waypoints_t, waypoints = [0.0], [here]
        t = 0.0
        while t < duration:
            target = (rng.uniform(xmin, xmax), rng.uniform(ymin, ymax))
            v = rng.uniform(*speed)
            dt = max(math.dist(here, target) / v, 1.0)
            t += dt
            waypoints_t.append(t)
            waypoints.append(target)
            here = target
        raw = MobilityTrace(ue_id, waypoints_t, waypoints)
        times = [k * sample_period for k in range(int(duration // sample_period) + 1)]
        if times[-1] < duration:
            times.append(duration)
        traces.append(MobilityTrace(ue_id, times, [position(raw, s) for s in times]))
    return traces


@dataclass
class Geometry:
    """Where every radio node is, and the antenna gain it uses."""

    fixed: dict[str, Location] = field(default_factory=dict)
    traces: dict[str, MobilityTrace] = field(default_factory=dict)
    gains: dict[str, float] = field(default_factory=dict)

    def locate(self, node: str, t: float) -> Location:
        if node in self.fixed:
            return self.fixed[node]
        return position(self.traces[node], t)

    def gain(self, node: str) -> float:
        return self.gains.get(node, 0.0)


def bounding_box(traces: Sequence[MobilityTrace]) -> tuple[float, float, float, float]:
    xs = [x for tr in traces for x, _ in tr.points]
    ys = [y for tr in traces for _, y in tr.points]
    return (min(xs), min(ys), max(xs), max(ys))
