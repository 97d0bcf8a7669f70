"""Shared experiment plumbing: estimates, binning, chunked replication.

Replications are processed in fixed-size chunks; replication r always uses
stream id r of the experiment seed, and chunk partial states are merged in
chunk order.  Results are therefore byte-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

__all__ = ["EstimateWithError", "BinnedDensity", "ExperimentResult",
           "ConfigError", "config_from_dict", "chunk_ranges", "run_experiment",
           "welford_rows", "LatticeBins"]

_CHUNK = 512


class ConfigError(ValueError):
    """Unknown or invalid experiment configuration field."""


def config_from_dict(cls, data: dict):
    """Strict dataclass construction: unknown fields are rejected."""
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown config fields for {cls.__name__}: {sorted(unknown)}")
    return cls(**data)


@dataclass(frozen=True)
class EstimateWithError:
    """Monte Carlo estimate with its standard error and provenance."""

    value: float
    stderr: float
    reps: int
    seed: int
    stream_base: int = 0

    def __post_init__(self):
        if self.reps < 2:
            raise ConfigError("an estimate needs reps >= 2")

    def z_against(self, reference: float) -> float:
        return (self.value - reference) / self.stderr if self.stderr > 0 else np.inf


@dataclass
class BinnedDensity:
    """Uniform-bin mass container; density mode divides masses by width."""

    edges: np.ndarray
    mass: np.ndarray
    mode: str = "density"

    def __post_init__(self):
        if self.mode not in ("density", "raw"):
            raise ConfigError(f"unknown normalisation mode {self.mode!r}")
        if len(self.edges) != len(self.mass) + 1:
            raise ConfigError("edges must be one longer than masses")

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def densities(self) -> np.ndarray:
        return self.mass / self.widths if self.mode == "density" else self.mass

    def integral(self) -> float:
        if self.mode == "density":
            return float(self.mass.sum())
        return float((self.mass * self.widths).sum())


@dataclass
class ExperimentResult:
    """Rows for results.csv, reference rows, and a summary dict."""

    name: str
    rows: list
    reference: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    seed: int = 0


def chunk_ranges(reps: int, chunk: int = _CHUNK) -> list[tuple[int, int]]:
    return [(lo, min(lo + chunk, reps)) for lo in range(0, reps, chunk)]


def run_experiment(exp_cls, cfg_dict: dict, seed: int, jobs: int = 1) -> ExperimentResult:
    """Drive an experiment class: chunked accumulation, ordered merge."""
    cfg = config_from_dict(exp_cls.Config, cfg_dict or {})
    ranges = chunk_ranges(exp_cls.total_reps(cfg))
    if jobs > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_chunk_call,
                                  [(exp_cls, cfg, seed, lo, hi) for lo, hi in ranges]))
    else:
        parts = [exp_cls.chunk(cfg, seed, lo, hi) for lo, hi in ranges]
    state = parts[0] if parts else None
    for part in parts[1:]:
        state = exp_cls.merge(state, part)
    result = exp_cls.finish(cfg, seed, state)
    result.seed = seed
    result.config = dict(cfg_dict or {})
    return result


def _chunk_call(args):
    exp_cls, cfg, seed, lo, hi = args
    return exp_cls.chunk(cfg, seed, lo, hi)


def welford_rows(total: dict, prefix: str = "") -> tuple[np.ndarray, np.ndarray]:
    """(mean, stderr) vectors from accumulated sum/sumsq/count triples."""
    cnt = total[prefix + "count"]
    mean = total[prefix + "sum"] / cnt
    var = np.maximum(total[prefix + "sumsq"] / cnt - mean * mean, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        stderr = np.sqrt(var / np.maximum(cnt - 1, 1))
    return mean, stderr


class LatticeBins:
    """Uniform bins in scaled position x = k / sqrt(n) over lattice k.

    Bin j covers lattice points k with x in [j d, (j+1) d); estimates are
    averages over the exact lattice points of a bin, and the reference is
    evaluated at the mean lattice position, which removes the boundary
    wobble of the integer lattice.
    """

    def __init__(self, n: int, delta: float, xmax: float):
        self.n = n
        self.delta = delta
        self.sqrt_n = float(np.sqrt(n))
        self.nbins = int(np.ceil(xmax / delta))
        self.kmax = int(np.ceil(xmax * self.sqrt_n))
        k = np.arange(self.kmax + 1)
        self.bin_of_k = np.minimum((k / (self.delta * self.sqrt_n)).astype(np.int64),
                                   self.nbins - 1)
        hi = np.searchsorted(self.bin_of_k, np.arange(self.nbins), side="right")
        lo = np.searchsorted(self.bin_of_k, np.arange(self.nbins), side="left")
        self.counts = (hi - lo).astype(np.int64)
        sums = np.bincount(self.bin_of_k, weights=k, minlength=self.nbins)
        with np.errstate(invalid="ignore"):
            self.x_centers = np.where(self.counts > 0,
                                      sums / np.maximum(self.counts, 1) / self.sqrt_n,
                                      np.nan)
        self.edges = np.arange(self.nbins + 1) * delta

    def bin_means(self, values: np.ndarray) -> np.ndarray:
        """Average `values[k]` over the lattice points of each bin."""
        v = np.zeros(self.kmax + 1)
        m = min(len(values), self.kmax + 1)
        v[:m] = values[:m]
        sums = np.bincount(self.bin_of_k, weights=v, minlength=self.nbins)
        return sums / np.maximum(self.counts, 1)
