"""Simulation runner and transducers: CSV streams plus a summary file.

Every stream uses the long layout ``time,entity,metric,value,ref``;
``events.csv`` carries all records with an extra leading ``stream`` column.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .base import TransducerRecord
from .devs import Coordinator
from .scenario import FogNetwork, Scenario

STREAMS = ("delay", "power", "bandwidth", "mcs")
COLUMNS = ("time", "entity", "metric", "value", "ref")


@dataclass
class RunResult:
    scenario: Scenario
    network: FogNetwork
    records: list[TransducerRecord]
    summary: dict


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def collect(coordinator: Coordinator) -> list[TransducerRecord]:
    return [r.value for r in coordinator.log if isinstance(r.value, TransducerRecord)]


def simulate_scenario(scenario: Scenario) -> tuple[FogNetwork, list[TransducerRecord]]:
    network = FogNetwork(scenario)
    coordinator = Coordinator(network, trace="root")
    coordinator.simulate(until=scenario.end)
    return network, collect(coordinator)


def write_streams(records: Iterable[TransducerRecord], out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    records = list(records)
    for stream in STREAMS:
        with (out / f"{stream}.csv").open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(COLUMNS)
            for r in records:
                if r.stream == stream:
                    writer.writerow([_fmt(r.time), r.entity, r.metric, _fmt(r.value), r.ref])
    with (out / "events.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("stream",) + COLUMNS)
        for r in records:
            writer.writerow([r.stream, _fmt(r.time), r.entity, r.metric, _fmt(r.value), r.ref])


def read_stream(path: Path) -> list[dict]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        row["time"] = float(row["time"])
        row["value"] = float(row["value"])
    return rows


def power_profile(rows: list[dict]) -> list[tuple[float, float]]:
    """Federation power as a step function: (time, total W) at every change."""
    per_edc: dict[str, float] = {}
    profile: list[tuple[float, float]] = []
    for row in rows:
        per_edc[row["entity"]] = row["value"]
        total = math.fsum(per_edc[e] for e in sorted(per_edc))
        if profile and profile[-1][0] == row["time"]:
            profile[-1] = (row["time"], total)
        else:
            profile.append((row["time"], total))
    return profile


def time_weighted_mean(profile: list[tuple[float, float]], end: float) -> float:
    if not profile or end <= 0:
        return 0.0
    parts = []
    for (t0, v), (t1, _) in zip(profile, profile[1:] + [(end, 0.0)]):
        parts.append(v * (min(t1, end) - min(t0, end)))
    return math.fsum(parts) / end


def summarize(out: Path, end: float) -> dict:
    """Summary statistics recomputed from the CSV streams alone."""
    out = Path(out)
    delays = [r["value"] for r in read_stream(out / "delay.csv")]
    power = power_profile(read_stream(out / "power.csv"))
    by_kind: dict[str, list[float]] = {}
    for r in read_stream(out / "delay.csv"):
        by_kind.setdefault(r["metric"], []).append(r["value"])
    summary = {
        "end_s": end,
        "delay_samples": len(delays),
        "mean_delay_s": math.fsum(delays) / len(delays) if delays else 0.0,
        "peak_delay_s": max(delays, default=0.0),
        "mean_power_w": time_weighted_mean(power, end),
        "peak_power_w": max((v for _, v in power), default=0.0),
    }
    for kind in sorted(by_kind):
        values = by_kind[kind]
        summary[f"{kind}_mean_delay_s"] = math.fsum(values) / len(values)
        summary[f"{kind}_peak_delay_s"] = max(values)
    return summary


def run(scenario: Scenario, out: str | Path | None = None) -> RunResult:
    """Run ``scenario``; write streams and ``summary.json`` under ``out`` if given."""
    network, records = simulate_scenario(scenario)
    summary: dict = {}
    if out is not None:
        out = Path(out)
        write_streams(records, out)
        summary = summarize(out, scenario.end)
        summary["scenario"] = scenario.name
        summary["seed"] = scenario.seed
        (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return RunResult(scenario, network, records, summary)
