#!/usr/bin/env python3
"""Run every named experiment at desk scale into out/<name>/ directories.

Each run writes manifest.json, results.csv, summary.json (and reference.csv
where the experiment has a reference curve).  Pass --full for the
acceptance-scale parameters (slow; see tests/test_acceptance.py for the
gated version).
"""

import argparse
import json
import sys

from treeprofile.cli import run as cli_run

GEO = {"kind": "geometric", "params": {"q": 0.5}, "coeffs": []}
POI = {"kind": "poisson", "params": {"lam": 1.0}, "coeffs": []}
FACT = {"kind": "factorial_unrooted", "params": {}, "coeffs": []}

QUICK = {
    "profile-mean": {"weights": GEO, "n": 10_000, "reps": 3_000},
    "distance-profile-mean": {"weights": GEO, "n": 2_000, "reps": 2_000},
    "width": {"weights": GEO, "ns": [10_000, 100_000], "reps": [1_000, 1_000]},
    "wiener": {"weights": FACT, "sampler": "edgemark", "n": 10_000,
               "reps": 2_000},
    "root-degree": {"weights": GEO, "root_weights": POI, "n": 2_000,
                    "reps": 4_000},
    # demo scale uses the stabilised 90th percentile; the acceptance suite
    # runs the literal (and red) 99th-percentile gate
    "big-branch": {"kind": "edge_marked", "weights": FACT,
                   "ns": [1_000, 10_000], "reps": 3_000, "pctl": 0.9},
    "moment-bounds": {"weights": GEO, "ns": [256, 1_024],
                      "reps": [1_500, 800]},
    "fourier-decay": {"weights": GEO, "ns": [64, 128, 256], "mc_reps": 4_000,
                      "mc_n": 256, "n48": 512},
    "holder": {"weights": GEO, "ns": [1_000, 10_000], "reps": [500, 200]},
    "leafbias-proximity": {"weights": FACT, "ns": [1_000, 10_000],
                           "reps": 3_000},
}

FULL = {
    "profile-mean": {"weights": GEO, "n": 10_000, "reps": 20_000},
    "distance-profile-mean": {"weights": GEO, "n": 10_000, "reps": 20_000},
    "width": {"weights": GEO, "ns": [1_000, 10_000, 100_000],
              "reps": [2_000, 2_000, 10_000]},
    "wiener": {"weights": FACT, "sampler": "edgemark", "n": 100_000,
               "reps": 10_000},
    "root-degree": {"weights": GEO, "root_weights": POI, "n": 10_000,
                    "reps": 10_000},
    "big-branch": {"kind": "edge_marked", "weights": FACT,
                   "ns": [1_000, 10_000], "reps": 4_000},
    "moment-bounds": {"weights": GEO, "ns": [256, 1_024, 4_096],
                      "reps": [4_000, 2_000, 1_000]},
    "fourier-decay": {"weights": GEO},
    "holder": {"weights": GEO, "ns": [1_000, 10_000, 100_000],
               "reps": [2_000, 600, 200]},
    "leafbias-proximity": {"weights": FACT, "ns": [1_000, 10_000],
                           "reps": 4_000},
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out")
    ap.add_argument("--only", help="comma list of experiment names")
    args = ap.parse_args()
    table = FULL if args.full else QUICK
    names = args.only.split(",") if args.only else list(table)
    status = 0
    for name in names:
        cfg_path = f"{args.out}-{name}.json"
        with open(cfg_path, "w") as fh:
            json.dump(table[name], fh)
        code = cli_run(["experiment", name, "--config", cfg_path,
                        "--seed", str(args.seed),
                        "--out", f"{args.out}/{name}"])
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main())
