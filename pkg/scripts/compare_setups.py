#!/usr/bin/env python3
"""Run a scenario under both reference set-ups and print their summaries side by side.

    python3 scripts/compare_setups.py [--scenario sanfrancisco.toy] [--out runs/]
"""
import argparse
from pathlib import Path

from fogsim.invariants import cold_start_violations, session_balance
from fogsim.run import run
from fogsim.scenario import EXPERIMENTS, experiment, load_scenario

ROWS = ("mean_delay_s", "peak_delay_s", "create_peak_delay_s", "mean_power_w", "peak_power_w")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--scenario", default="sanfrancisco.toy")
    parser.add_argument("--out", default="runs")
    args = parser.parse_args()

    base = load_scenario(args.scenario)
    results = {}
    for name in EXPERIMENTS:
        results[name] = run(experiment(base, name), Path(args.out) / name)

    print(f"{'':22s}" + "".join(f"{name:>14s}" for name in results))
    for row in ROWS:
        print(f"{row:22s}" + "".join(f"{r.summary.get(row, 0.0):14.4f}" for r in results.values()))
    for name, r in results.items():
        balance = session_balance(r.records)
        print(f"{name}: sessions opened {balance['opened']} closed {balance['closed']}, "
              f"cold-start violations {len(cold_start_violations(r.records))}")
    one, two = results["I"].summary, results["II"].summary
    saving = 1 - two["mean_power_w"] / one["mean_power_w"]
    print(f"II uses {saving:.0%} less mean power; peak delay {two['peak_delay_s']:.2f} s "
          f"vs {one['peak_delay_s']:.2f} s")


if __name__ == "__main__":
    main()
