import csv
import json
import logging
import math

import pytest

from fogsim.cli import main
from fogsim.plot import bit_rate_series, plot_dir
from fogsim.radio import SPEED_OF_LIGHT
from fogsim.run import STREAMS, power_profile, read_stream, run, summarize, time_weighted_mean
from fogsim.scenario import parse_scenario

from netkit import run_network, scenario, select, static


def test_time_weighted_mean():
    profile = [(0.0, 0.0), (2.0, 100.0), (6.0, 50.0)]
    assert time_weighted_mean(profile, 10.0) == pytest.approx((4 * 100 + 4 * 50) / 10)
    assert time_weighted_mean([], 10.0) == 0.0


def test_power_profile_sums_edcs():
    rows = [{"time": 0.0, "entity": "a", "value": 10.0}, {"time": 0.0, "entity": "b", "value": 5.0},
            {"time": 3.0, "entity": "a", "value": 0.0}]
    assert power_profile(rows) == [(0.0, 15.0), (3.0, 5.0)]


def test_single_ue_request_delay_matches_hand_sum():
    scn = scenario(aps=((-400.0, 0.0),), duration=30.0, drain=5.0)
    _, records = run_network(scn, [static("ue_0", -350.0)])
    (ul,) = {r.value for r in select(records, "mcs", "ul_efficiency")}
    (dl,) = {r.value for r in select(records, "mcs", "dl_efficiency")}
    assert (ul, dl) == (7.4063, 5.5547)
    radio_hop, xh_hop = 50.0 / SPEED_OF_LIGHT, 400.0 / SPEED_OF_LIGHT
    expected = (1e6 / (100e6 * ul) + radio_hop     # uplink data channel
                + 1e6 / 10e9 + xh_hop              # AP to EDC
                + 0.001                            # processing
                + 1e3 / 10e9 + xh_hop              # EDC to AP
                + 1e3 / (100e6 * dl) + radio_hop)  # downlink data channel
    delays = [r.value for r in select(records, "delay", "request")]
    assert len(delays) >= 20
    assert all(d == pytest.approx(expected, rel=1e-9) for d in delays)


def test_idle_federation_draws_nothing(tmp_path):
    doc = {
        "duration": 20.0, "drain": 0.0,
        "aps": [{"id": "ap_0", "location": [0, 0]}],
        "edcs": [{"id": "edc_0", "location": [0, 0], "hardware": "power_off_idle", "pus": 3}],
        "apps": [{"id": "app"}],
        "ues": {"synthetic": {"n": 0, "area": [0, 0, 1, 1]}},
    }
    result = run(parse_scenario(doc), tmp_path)
    rows = read_stream(tmp_path / "power.csv")
    assert rows and all(r["value"] == 0.0 for r in rows)
    assert result.summary["mean_power_w"] == 0.0


def test_streams_written_sorted_with_schema(toy_runs, tmp_path):
    for stream in STREAMS:
        path = out_dir(toy_runs, "I") / f"{stream}.csv"
        with path.open() as fh:
            header = next(csv.reader(fh))
        assert header == ["time", "entity", "metric", "value", "ref"]
        times = [r["time"] for r in read_stream(path)]
        assert times == sorted(times)
    with (out_dir(toy_runs, "I") / "events.csv").open() as fh:
        assert next(csv.reader(fh))[0] == "stream"


def out_dir(toy_runs, name):
    return toy_runs[name].out


def test_summary_recomputes_exactly(toy_runs):
    for name in ("I", "II"):
        directory = out_dir(toy_runs, name)
        stored = json.loads((directory / "summary.json").read_text())
        again = summarize(directory, toy_runs[name].scenario.end)
        for key, value in again.items():
            assert stored[key] == value


def test_plots_round_trip(toy_runs, tmp_path):
    written = plot_dir(out_dir(toy_runs, "I"), tmp_path)
    names = sorted(p.name for p in written)
    assert names == ["bandwidth.png", "delay.png", "mcs.png", "power.png"]
    assert all(p.stat().st_size > 0 for p in written)


def test_plots_are_deterministic(toy_runs, tmp_path):
    a = plot_dir(out_dir(toy_runs, "I"), tmp_path / "a")
    b = plot_dir(out_dir(toy_runs, "I"), tmp_path / "b")
    assert [p.read_bytes() for p in a] == [p.read_bytes() for p in b]


def test_missing_stream_skipped_and_empty_stream_plotted(tmp_path, caplog):
    src = tmp_path / "src"
    src.mkdir()
    (src / "delay.csv").write_text("time,entity,metric,value,ref\n")
    with caplog.at_level(logging.WARNING):
        written = plot_dir(src, tmp_path / "img")
    assert [p.name for p in written] == ["delay.png"]
    assert "power" in caplog.text


def test_bit_rate_recomputed_matches_simulator(toy_runs):
    directory = out_dir(toy_runs, "I")
    bandwidth = read_stream(directory / "bandwidth.csv")
    mcs = read_stream(directory / "mcs.csv")
    recomputed = bit_rate_series(bandwidth, mcs, "dl")
    emitted = {}
    for r in bandwidth:
        if r["metric"] == "dl_rate_bps":
            emitted.setdefault(r["entity"], []).append((r["time"], r["value"]))
    for ue, points in emitted.items():
        series = recomputed[ue]
        for t, value in points:
            at_t = [v for s, v in series if s <= t][-1]
            assert at_t == pytest.approx(value)


# -- command line ---------------------------------------------------------------

def test_cli_simulate_and_plot(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["simulate", "--scenario", "sanfrancisco.toy", "--out", str(out), "--duration", "15"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["end_s"] == 75.0
    assert main(["plot", "--in", str(out), "--out", str(tmp_path / "img")]) == 0
    assert (tmp_path / "img" / "power.png").exists()


def test_cli_validation_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('duration = -1\n')
    assert main(["simulate", "--scenario", str(bad), "--out", str(tmp_path / "o")]) == 1
    assert "duration" in capsys.readouterr().err


def test_cli_fault_exit_code(tmp_path, capsys, monkeypatch):
    from fogsim import run as run_module
    from fogsim.devs import SimulationFault

    def boom(scenario):
        raise SimulationFault("broken model", path="fog.x", time=1.0)

    monkeypatch.setattr(run_module, "simulate_scenario", boom)
    assert main(["simulate", "--scenario", "sanfrancisco.toy", "--out", str(tmp_path / "o")]) == 2
    assert "fog.x" in capsys.readouterr().err


def test_cli_allocate(tmp_path, capsys):
    traces = tmp_path / "traces.csv"
    from fogsim.mobility import synthetic_traces, write_traces
    write_traces(synthetic_traces(30, 200.0, (0, 0, 1000, 1000), seed=1), traces)
    out = tmp_path / "placement.json"
    code = main(["allocate", "--traces", str(traces), "--cell-size", "100", "--window", "60",
                 "--aps", "3", "--replication", "2", "--out", str(out)])
    assert code == 0
    placement = json.loads(out.read_text())
    assert len(placement["aps"]) == 3 and len(placement["edcs"]) == 2
