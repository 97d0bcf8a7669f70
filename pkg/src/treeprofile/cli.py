"""Command-line interface: sampling, profiles, exact moments, experiments.

Exit codes: 0 success, 1 usage error, 2 numerical/feasibility error.
Every output is deterministic for a fixed argv + seed; output directories
receive manifest.json before any result file, and result files appear
atomically, so interrupted runs are detectable by a missing results file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from . import genfun
from .distprofile import bench_rows, distance_profile_fast, wiener_fast
from .experiments import EXPERIMENTS, run_experiment
from .oracle import OracleError, exact_conditioned_law
from .rng import RngStream
from .sampler import (SamplingError, sample_conditioned_gw, sample_modified_gw,
                      sample_unrooted_edgemark, sample_unrooted_leafmark,
                      sample_unrooted_vertexmark)
from .treecore import (LabelledTree, OrderedTree, TreeError, height_profile,
                       wiener_index, distance_profile_naive)
from .weights import (WeightError, criticalize, unrooted_model,
                      weights_from_json, weights_to_json)
from .experiments.base import ConfigError

__all__ = ["main", "run"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _write_csv(rows: list[dict], stream) -> None:
    if not rows:
        stream.write("\n")
        return
    cols = list(rows[0].keys())
    stream.write(",".join(cols) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(row.get(c, "")) for c in cols) + "\n")


def _csv_text(rows: list[dict]) -> str:
    import io
    buf = io.StringIO()
    _write_csv(rows, buf)
    return buf.getvalue()


def _atomic_write(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _load_weights(path: str | None, default: dict | None = None):
    if path is None:
        if default is None:
            raise _UsageError("--weights FILE is required")
        return weights_from_json(default)
    with open(path) as fh:
        return weights_from_json(json.load(fh))


def _load_tree(path: str):
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("("):
        return OrderedTree.from_parenthesis(text)
    return LabelledTree.from_csv(text)


def _seed_of(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("TREEPROFILE_SEED")
    return int(env) if env else 0


def _tree_line(t) -> str:
    if isinstance(t, OrderedTree):
        return t.to_parenthesis()
    return " ".join(f"{int(u)},{int(v)}" for u, v in t.edges)


def _cmd_sample(args) -> int:
    ws = _load_weights(args.weights)
    seed = _seed_of(args)
    lines = []
    for r in range(args.reps):
        rng = RngStream(seed, r)
        if ws.kind == "unrooted_w":
            model = unrooted_model(ws)
            fn = {"vertexmark": sample_unrooted_vertexmark,
                  "edgemark": sample_unrooted_edgemark,
                  "leafmark": sample_unrooted_leafmark}[args.sampler or "vertexmark"]
            t = fn(model, args.n, rng)
        else:
            p, _, _ = criticalize(ws)
            if (args.sampler or "rooted") == "rooted":
                t = sample_conditioned_gw(p, args.n, rng)
            else:
                t = sample_modified_gw(p, p, args.n, rng)
        lines.append(_tree_line(t))
    body = "\n".join(lines) + "\n"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        manifest = {"command": "sample", "weights": weights_to_json(ws),
                    "n": args.n, "count": args.reps, "seed": seed,
                    "stream": list(range(args.reps)) if args.reps <= 16 else
                    {"base": 0, "count": args.reps},
                    "sampler": args.sampler or
                    ("vertexmark" if ws.kind == "unrooted_w" else "rooted"),
                    "version": __version__}
        _atomic_write(os.path.join(args.out, "manifest.json"),
                      json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        _atomic_write(os.path.join(args.out, "trees.txt"), body)
    else:
        sys.stdout.write(body)
    return 0


def _cmd_profile(args) -> int:
    t = _load_tree(args.tree)
    if isinstance(t, LabelledTree):
        t = t.rooted_at(1)
    prof = height_profile(t)
    rows = [{"i": i, "L": int(c)} for i, c in enumerate(prof.counts)]
    sys.stdout.write(_csv_text(rows))
    return 0


def _cmd_dist_profile(args) -> int:
    t = _load_tree(args.tree)
    dp = distance_profile_naive(t) if args.naive else distance_profile_fast(t)
    rows = [{"i": i, "Lambda": int(c)} for i, c in enumerate(dp.counts)]
    sys.stdout.write(_csv_text(rows))
    return 0


def _cmd_wiener(args) -> int:
    t = _load_tree(args.tree)
    if args.naive:
        value = wiener_index(distance_profile_naive(t))
    else:
        value = wiener_fast(t)
    sys.stdout.write(f"{value}\n")
    return 0


def _cmd_exact(args) -> int:
    ws = _load_weights(args.weights)
    if ws.kind == "unrooted_w":
        p = unrooted_model(ws).p
    else:
        p, _, _ = criticalize(ws)
    EL, ELam = genfun.expected_profiles(p, args.n)
    rows = [{"n": args.n, "k": k, "EL": float(EL[k]), "ELambda": float(ELam[k])}
            for k in range(len(EL))]
    sys.stdout.write(_csv_text(rows))
    return 0


def _cmd_fourier_exact(args) -> int:
    ws = _load_weights(args.weights)
    p = unrooted_model(ws).p if ws.kind == "unrooted_w" else criticalize(ws)[0]
    xis = [float(x) for x in args.xi.split(",")] if args.xi else [0.25, 0.5, 1.0, 2.0]
    rows = []
    for xi in xis:
        el2, elam2 = genfun.fourier_second_moments(p, args.n, xi)
        rows.append({"n": args.n, "xi": xi, "EL2hat": el2, "ELambda2hat": elam2})
    sys.stdout.write(_csv_text(rows))
    return 0


def _cmd_enumerate(args) -> int:
    ws = _load_weights(args.weights)
    ensemble = exact_conditioned_law(
        ws if ws.kind == "unrooted_w" else criticalize(ws)[0], args.n,
        leaf_biased=args.leaf_biased)
    rows = [{"tree": _tree_line(t).replace(",", "-"), "weight": wt,
             "probability": wt / ensemble.total}
            for t, wt in ensemble.items]
    sys.stdout.write(_csv_text(rows))
    return 0


def _cmd_bench(args) -> int:
    ws = _load_weights(args.weights, default={"kind": "geometric",
                                              "params": {"q": 0.5}, "coeffs": []})
    p, _, _ = criticalize(ws)
    seed = _seed_of(args)
    sizes = [int(s) for s in args.sizes.split(",")]

    def make_tree(n):
        return sample_conditioned_gw(p, n, RngStream(seed, n))

    rows = bench_rows(sizes, make_tree, include_naive_upto=args.naive_upto)
    text = _csv_text(rows)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        manifest = {"command": "bench", "sizes": sizes, "seed": seed,
                    "weights": weights_to_json(ws), "version": __version__}
        _atomic_write(os.path.join(args.out, "manifest.json"),
                      json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        _atomic_write(os.path.join(args.out, "results.csv"), text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_experiment(args) -> int:
    name = args.name
    if name not in EXPERIMENTS:
        raise _UsageError(f"unknown experiment {name!r}; "
                          f"choose from {sorted(EXPERIMENTS)}")
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    if args.n is not None:
        cfg["n"] = args.n
    if args.reps is not None:
        cfg["reps"] = args.reps
    if args.bins is not None:
        cfg["bin_width"] = args.bins
    seed = _seed_of(args)
    out = args.out or f"out-{name}"
    os.makedirs(out, exist_ok=True)
    manifest = {"command": "experiment", "experiment": name, "config": cfg,
                "seed": seed, "jobs": args.jobs, "version": __version__}
    _atomic_write(os.path.join(out, "manifest.json"),
                  json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    result = run_experiment(EXPERIMENTS[name], cfg, seed, jobs=args.jobs)
    _atomic_write(os.path.join(out, "results.csv"), _csv_text(result.rows))
    if result.reference:
        _atomic_write(os.path.join(out, "reference.csv"),
                      _csv_text(result.reference))
    _atomic_write(os.path.join(out, "summary.json"),
                  json.dumps(result.summary, sort_keys=True, indent=2,
                             default=float) + "\n")
    status = "pass" if result.summary.get("pass", True) else "FAIL"
    sys.stdout.write(f"{name}: {status} {json.dumps(result.summary, default=float, sort_keys=True)}\n")
    return 0


def _build_parser() -> _Parser:
    p = _Parser(prog="treeprofile",
                description="simply generated random trees: samplers, profiles, "
                            "exact moments, experiments")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, tree=False):
        sp.add_argument("--weights", help="JSON weight spec file")
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--reps", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None,
                        help="falls back to TREEPROFILE_SEED, then 0")
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--bins", type=float, default=None)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        if tree:
            sp.add_argument("--tree", required=True, help="tree file "
                            "(parenthesis string or edge-list CSV)")

    sp = sub.add_parser("sample", help="sample trees at exact size")
    common(sp)
    sp.add_argument("--sampler", choices=("rooted", "modified", "vertexmark",
                                          "edgemark", "leafmark"))
    sp.set_defaults(fn=_cmd_sample, n=None, reps=1)

    sp = sub.add_parser("profile", help="height profile of a tree file")
    common(sp, tree=True)
    sp.set_defaults(fn=_cmd_profile)

    sp = sub.add_parser("dist-profile", help="distance profile of a tree file")
    common(sp, tree=True)
    sp.add_argument("--naive", action="store_true")
    sp.set_defaults(fn=_cmd_dist_profile)

    sp = sub.add_parser("wiener", help="Wiener index of a tree file")
    common(sp, tree=True)
    sp.add_argument("--naive", action="store_true")
    sp.set_defaults(fn=_cmd_wiener)

    sp = sub.add_parser("exact", help="exact profile expectations E L, E Lambda")
    common(sp)
    sp.set_defaults(fn=_cmd_exact)

    sp = sub.add_parser("fourier-exact",
                        help="exact second moments of profile Fourier transforms")
    common(sp)
    sp.add_argument("--xi", help="comma list of lattice frequencies")
    sp.set_defaults(fn=_cmd_fourier_exact)

    sp = sub.add_parser("enumerate", help="exhaustive small-size law")
    common(sp)
    sp.add_argument("--leaf-biased", action="store_true")
    sp.set_defaults(fn=_cmd_enumerate)

    sp = sub.add_parser("bench", help="distance-profile benchmark harness")
    common(sp)
    sp.add_argument("--sizes", default="4096,16384,65536")
    sp.add_argument("--naive-upto", type=int, default=4096)
    sp.set_defaults(fn=_cmd_bench)

    sp = sub.add_parser("experiment", help="run a named experiment")
    sp.add_argument("name")
    common(sp)
    sp.add_argument("--config", help="JSON config file")
    sp.set_defaults(fn=_cmd_experiment)
    return p


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    try:
        needs_n = args.cmd in ("sample", "exact", "fourier-exact", "enumerate")
        if needs_n and args.n is None:
            raise _UsageError(f"{args.cmd} requires --n")
        return args.fn(args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    except (WeightError, SamplingError, OracleError, TreeError, ConfigError,
            ZeroDivisionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
