#!/usr/bin/env python3
"""Distance-profile benchmark: doubling sizes, CSV to stdout.

Demonstrates the n log^2 n regime of the centroid pass; the naive
quadratic profile is included up to --naive-upto as the checksum oracle.
"""

import argparse
import sys

from treeprofile.cli import run as cli_run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", default="16384,32768,65536,131072,262144,"
                    "524288,1048576")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--naive-upto", type=int, default=4096)
    args = ap.parse_args()
    return cli_run(["bench", "--sizes", args.sizes, "--seed", str(args.seed),
                    "--naive-upto", str(args.naive_upto)])


if __name__ == "__main__":
    sys.exit(main())
