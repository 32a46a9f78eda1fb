#!/usr/bin/env python3
"""Place APs and EDCs for synthetic traffic and print a scenario fragment.

    python3 scripts/placement_demo.py [--ues 100] [--replication 3]
"""
import argparse
import json

import numpy as np

from fogsim.allocation import allocate, peak_concurrent_ues
from fogsim.mobility import synthetic_traces


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--ues", type=int, default=100)
    parser.add_argument("--replication", type=int, default=3)
    parser.add_argument("--cell-size", type=float, default=100.0)
    parser.add_argument("--window", type=float, default=60.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    traces = synthetic_traces(args.ues, 600.0, (-2000, -1000, 2000, 1000), seed=args.seed)
    placement = allocate(traces, args.cell_size, args.window, aps=None,
                         replication=args.replication, seed=args.seed)
    density = placement.density
    _, weights = density.nonzero()
    print(f"peak concurrent UEs {peak_concurrent_ues(traces, args.window)}, "
          f"{int((density.counts > 0).sum())} occupied cells, total weight {weights.sum():.0f}")
    print(f"{len(placement.aps)} APs, {placement.edc_count} EDCs x {placement.pus_per_edc} PUs")
    spread = np.array([a for a in placement.aps])
    print(f"AP bounding box x [{spread[:, 0].min():.0f}, {spread[:, 0].max():.0f}] "
          f"y [{spread[:, 1].min():.0f}, {spread[:, 1].max():.0f}]")
    print(json.dumps(placement.to_config(), indent=2))


if __name__ == "__main__":
    main()
