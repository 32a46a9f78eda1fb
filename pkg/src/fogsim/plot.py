"""Post-hoc time-series plots of the transducer CSV streams."""
from __future__ import annotations

import logging
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .run import read_stream  # noqa: E402

log = logging.getLogger(__name__)

LABELS = {
    "delay": ("perceived delay [s]", "metric"),
    "power": ("EDC power [W]", "entity"),
    "mcs": ("spectral efficiency [bps/Hz]", "metric"),
}


def _series(rows, key: str, metric: str | None = None):
    series = defaultdict(lambda: ([], []))
    for row in rows:
        if metric is not None and row["metric"] != metric:
            continue
        xs, ys = series[row[key]]
        xs.append(row["time"])
        ys.append(row["value"])
    return dict(sorted(series.items()))


def bit_rate_series(bandwidth_rows, mcs_rows, direction: str = "dl") -> dict[str, list[tuple[float, float]]]:
    """Per-UE bit rate recomputed as bandwidth share x spectral efficiency."""
    events = [(r["time"], 0, r) for r in bandwidth_rows if r["metric"] == "bandwidth_hz"]
    events += [(r["time"], 1, r) for r in mcs_rows if r["metric"] == f"{direction}_efficiency"]
    events.sort(key=lambda e: (e[0], e[1]))
    share: dict[str, float] = {}
    efficiency: dict[str, float] = {}
    out: dict[str, list[tuple[float, float]]] = defaultdict(list)
    for t, kind, row in events:
        ue = row["entity"]
        (share if kind == 0 else efficiency)[ue] = row["value"]
        rate = share.get(ue, 0.0) * efficiency.get(ue, 0.0)
        points = out[ue]
        if points and points[-1][0] == t:
            points[-1] = (t, rate)
        else:
            points.append((t, rate))
    return dict(out)


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path


def _step_plot(ax, series, legend_limit: int = 12):
    for name, (xs, ys) in series.items():
        ax.step(xs, ys, where="post", label=name, linewidth=0.8)
    if 0 < len(series) <= legend_limit:
        ax.legend(fontsize="small")


def plot_stream(stream: str, rows, out: Path) -> Path:
    ylabel, key = LABELS[stream]
    fig, ax = plt.subplots(figsize=(8, 4))
    series = _series(rows, key)
    if stream == "delay":
        for name, (xs, ys) in series.items():
            ax.plot(xs, ys, ".", markersize=2, label=name)
        if series:
            ax.legend(fontsize="small")
    else:
        _step_plot(ax, series)
    ax.set_xlabel("time [s]")
    ax.set_ylabel(ylabel)
    ax.set_title(stream)
    return _save(fig, out / f"{stream}.png")


def plot_radio(bandwidth_rows, mcs_rows, out: Path) -> Path:
    """Bandwidth share and downlink bit rate per UE, one panel each."""
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    shares = _series(bandwidth_rows, "entity", "bandwidth_hz")
    _step_plot(top, {k: (xs, [y / 1e6 for y in ys]) for k, (xs, ys) in shares.items()})
    top.set_ylabel("bandwidth [MHz]")
    rates = bit_rate_series(bandwidth_rows, mcs_rows)
    _step_plot(bottom, {ue: ([t for t, _ in pts], [r / 1e6 for _, r in pts]) for ue, pts in
                        sorted(rates.items())})
    bottom.set_ylabel("downlink bit rate [Mbps]")
    bottom.set_xlabel("time [s]")
    return _save(fig, out / "bandwidth.png")


def plot_dir(source: str | Path, out: str | Path) -> list[Path]:
    source, out = Path(source), Path(out)
    out.mkdir(parents=True, exist_ok=True)
    streams = {}
    for name in ("delay", "power", "bandwidth", "mcs"):
        path = source / f"{name}.csv"
        if not path.exists():
            log.warning("stream %s missing in %s; skipped", name, source)
            continue
        streams[name] = read_stream(path)
    written = [plot_stream(name, streams[name], out) for name in ("delay", "power", "mcs")
               if name in streams]
    if "bandwidth" in streams:
        written.append(plot_radio(streams["bandwidth"], streams.get("mcs", []), out))
    return written
