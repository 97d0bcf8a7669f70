"""The named experiments: limit-curve, width, Wiener, root-degree,
big-branch, moment-bound, Fourier, Holder and leaf-bias checks.

Every experiment is a class with a strict Config dataclass and the chunk /
merge / finish protocol of :func:`..base.run_experiment`.  Replication r
always draws from stream id r, conservation identities are asserted per
replication, and all reference values come from
:mod:`treeprofile.experiments.reference`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import _kernels as K
from .. import genfun
from ..oracle import chi_square_compare
from ..rng import RngStream
from ..sampler import (sample_conditioned_gw, sample_edge_split,
                       sample_forest_sizes, sample_modified_gw,
                       sample_modified_root_degree,
                       sample_unrooted_edgemark_structure,
                       sample_unrooted_leafmark_structure)
from ..distprofile import distance_profile_fast
from ..weights import (OffspringDistribution, criticalize, root_degree_limit,
                       unrooted_model, weights_from_json)
from . import reference as ref
from .base import ConfigError, LatticeBins, welford_rows, ExperimentResult

__all__ = ["EXPERIMENTS"]


def _merge_sums(a, b):
    return {"sum": a["sum"] + b["sum"], "sumsq": a["sumsq"] + b["sumsq"],
            "count": a["count"] + b["count"]}


def _merge_grids(a, b):
    return {"sums": a["sums"] + b["sums"], "count": a["count"] + b["count"]}

_GEO = {"kind": "geometric", "params": {"q": 0.5}, "coeffs": []}
_FACT = {"kind": "factorial_unrooted", "params": {}, "coeffs": []}


def _as_offspring(spec: dict) -> OffspringDistribution:
    """A probability law taken literally (no tilt), e.g. a root law."""
    ws = weights_from_json(spec)
    if ws.family == "geometric":
        return OffspringDistribution.geometric(ws.param_dict["q"])
    if ws.family == "poisson":
        return OffspringDistribution.poisson(ws.param_dict["lam"])
    if ws.family == "binary":
        return OffspringDistribution.binomial2(ws.param_dict["q"])
    if ws.family == "table":
        tab = np.asarray(ws.coeffs, dtype=float) * ws.scale
        return OffspringDistribution.from_table(tab / tab.sum())
    raise ConfigError(f"no direct offspring law for weights kind {ws.family}")


class _Ctx:
    """Resolved sampling context: body law, optional root law / model."""

    def __init__(self, weights: dict, sampler: str, root_weights: dict | None):
        self.sampler = sampler
        ws = weights_from_json(weights or _GEO)
        if ws.kind == "unrooted_w":
            self.model = unrooted_model(ws)
            self.p = self.model.p
            self.p0 = self.model.p0
        else:
            self.model = None
            self.p, _, _ = criticalize(ws)
            self.p0 = _as_offspring(root_weights) if root_weights else self.p
        if sampler in ("vertexmark", "edgemark", "leafmark") and self.model is None:
            raise ConfigError(f"sampler {sampler!r} needs unrooted weights")
        self.sigma = math.sqrt(self.p.sigma2)

    def structure(self, n: int, rng):
        """Label-free tree (an OrderedTree) from the configured sampler."""
        if self.sampler == "rooted":
            return sample_conditioned_gw(self.p, n, rng)
        if self.sampler == "modified":
            return sample_modified_gw(self.p, self.p0, n, rng)
        if self.sampler == "vertexmark":
            return sample_modified_gw(self.p, self.p0, n, rng)
        if self.sampler == "edgemark":
            return sample_unrooted_edgemark_structure(self.model, n, rng)
        if self.sampler == "leafmark":
            return sample_unrooted_leafmark_structure(self.model, n, rng)
        raise ConfigError(f"unknown sampler {self.sampler!r}")


def _per_n_layout(ns, reps):
    """Map a flat replication index onto (n, local_rep) blocks."""
    if isinstance(reps, int):
        reps = [reps] * len(ns)
    if len(reps) != len(ns):
        raise ConfigError("reps must be scalar or match ns")
    offsets = np.concatenate([[0], np.cumsum(reps)])
    return list(map(int, reps)), offsets


def _locate(offsets, r):
    i = int(np.searchsorted(offsets, r, side="right")) - 1
    return i, r - int(offsets[i])


# --- profile mean curves -------------------------------------------------------

@dataclass(frozen=True)
class _CurveConfig:
    weights: dict = field(default_factory=lambda: dict(_GEO))
    sampler: str = "rooted"
    root_weights: dict | None = None
    n: int = 10_000
    reps: int = 20_000
    bin_width: float = 0.1
    xmax: float = 4.0
    ref_floor: float = 0.05       # bins with smaller reference are not gated
    rel_tol: float = 0.05
    z_tol: float = 4.0


class _CurveBase:
    Config = _CurveConfig
    distance = False

    @classmethod
    def total_reps(cls, cfg) -> int:
        return cfg.reps

    @classmethod
    def chunk(cls, cfg, seed, lo, hi):
        ctx = _Ctx(cfg.weights, cfg.sampler, cfg.root_weights)
        bins = LatticeBins(cfg.n, cfg.bin_width, cfg.xmax)
        acc = np.zeros(bins.nbins)
        acc2 = np.zeros(bins.nbins)
        n = cfg.n
        for r in range(lo, hi):
            rng = RngStream(seed, r)
            t = ctx.structure(n, rng)
            if cls.distance:
                lam = distance_profile_fast(t).counts
                assert int(lam.sum()) == n * n and int(lam[0]) == n
                vals = bins.bin_means(lam.astype(float)) * n ** -1.5
            else:
                prof = np.bincount(t.depths())
                assert int(prof.sum()) == n
                vals = bins.bin_means(prof.astype(float)) * n ** -0.5
            acc += vals
            acc2 += vals * vals
        return {"sum": acc, "sumsq": acc2, "count": hi - lo}

    merge = staticmethod(_merge_sums)

    @classmethod
    def finish(cls, cfg, seed, state) -> ExperimentResult:
        ctx = _Ctx(cfg.weights, cfg.sampler, cfg.root_weights)
        bins = LatticeBins(cfg.n, cfg.bin_width, cfg.xmax)
        mean, stderr = welford_rows(state)
        refv = ref.profile_mean_reference(np.nan_to_num(bins.x_centers), ctx.sigma)
        refedge = ref.profile_mean_reference(bins.edges, ctx.sigma)
        rows, worst = [], 0.0
        gate_ok = True
        for j in range(bins.nbins):
            if bins.counts[j] == 0:
                continue
            err = abs(mean[j] - refv[j])
            z = (mean[j] - refv[j]) / stderr[j] if stderr[j] > 0 else np.inf
            # gate on the bin's minimal reference: boundary bins where the
            # limit curve vanishes are reported but not gated
            gated = min(refedge[j], refedge[j + 1]) >= cfg.ref_floor
            ok = err <= max(cfg.z_tol * stderr[j], cfg.rel_tol * refv[j]) if gated else True
            gate_ok &= ok
            if gated:
                worst = max(worst, err / refv[j])
            rows.append({"x": round(float(bins.x_centers[j]), 6),
                         "estimate": mean[j], "stderr": stderr[j],
                         "reference": refv[j], "zscore": z, "gated": int(gated),
                         "ok": int(ok)})
        name = "distance-profile-mean" if cls.distance else "profile-mean"
        return ExperimentResult(
            name, rows,
            reference=[{"x": r["x"], "reference": r["reference"]} for r in rows],
            summary={"pass": bool(gate_ok), "worst_rel_err": worst,
                     "sigma": ctx.sigma, "reps": int(state["count"])})


class ProfileMean(_CurveBase):
    name = "profile-mean"
    distance = False


class DistanceProfileMean(_CurveBase):
    name = "distance-profile-mean"
    distance = True


# --- width ---------------------------------------------------------------------

@dataclass(frozen=True)
class _WidthConfig:
    weights: dict = field(default_factory=lambda: dict(_GEO))
    sampler: str = "rooted"
    root_weights: dict | None = None
    ns: tuple = (1_000, 10_000, 100_000)
    reps: object = (2_000, 2_000, 10_000)
    rel_tol: float = 0.05
    ratio_tol: float = 1.5


class Width:
    name = "width"
    Config = _WidthConfig

    @classmethod
    def total_reps(cls, cfg):
        reps, _ = _per_n_layout(cfg.ns, cfg.reps)
        return int(sum(reps))

    @classmethod
    def chunk(cls, cfg, seed, lo, hi):
        ctx = _Ctx(cfg.weights, cfg.sampler, cfg.root_weights)
        reps, offsets = _per_n_layout(cfg.ns, cfg.reps)
        sums = np.zeros((len(cfg.ns), 4))
        count = np.zeros(len(cfg.ns), dtype=np.int64)
        for r in range(lo, hi):
            i, _ = _locate(offsets, r)
            n = int(cfg.ns[i])
            rng = RngStream(seed, r)
            t = ctx.structure(n, rng)
            prof = np.bincount(t.depths())
            assert int(prof.sum()) == n
            x = float(prof.max()) / math.sqrt(n)   # W / sqrt(n)
            sums[i] += [x, x * x, x ** 3, x ** 4]
            count[i] += 1
        return {"sums": sums, "count": count}

    merge = staticmethod(_merge_grids)

    @classmethod
    def finish(cls, cfg, seed, state) -> ExperimentResult:
        ctx = _Ctx(cfg.weights, cfg.sampler, cfg.root_weights)
        target = ref.width_mean_constant(ctx.sigma)
        rows = []
        w2_means = []
        for i, n in enumerate(cfg.ns):
            c = int(state["count"][i])
            m1 = state["sums"][i, 0] / c
            m2 = state["sums"][i, 1] / c           # E[W^2] / n
            m4 = state["sums"][i, 3] / c
            se1 = math.sqrt(max(m2 - m1 * m1, 0.0) / (c - 1))
            se2 = math.sqrt(max(m4 - m2 * m2, 0.0) / (c - 1))
            w2_means.append(m2)
            rows.append({"n": int(n), "mean_w_scaled": m1, "stderr": se1,
                         "reference": target, "mean_w2_scaled": m2,
                         "stderr_w2": se2, "reps": c})
        ratio = max(w2_means) / min(w2_means)
        rel = abs(rows[-1]["mean_w_scaled"] - target) / target
        return ExperimentResult(
            "width", rows,
            reference=[{"constant": "sigma*sqrt(pi/2)", "value": target}],
            summary={"pass": bool(rel <= cfg.rel_tol and ratio <= cfg.ratio_tol),
                     "rel_err_largest_n": rel, "w2_ratio": ratio})


# --- Wiener index ----------------------------------------------------------------

@dataclass(frozen=True)
class _WienerConfig:
    weights: dict = field(default_factory=lambda: dict(_FACT))
    sampler: str = "edgemark"
    root_weights: dict | None = None
    n: int = 100_000
    reps: int = 10_000
    rel_tol: float = 0.05


class Wiener:
    name = "wiener"
    Config = _WienerConfig

    @classmethod
    def total_reps(cls, cfg):
        return cfg.reps

    @classmethod
    def chunk(cls, cfg, seed, lo, hi):
        ctx = _Ctx(cfg.weights, cfg.sampler, cfg.root_weights)
        s = s2 = 0.0
        n = cfg.n
        for r in range(lo, hi):
            rng = RngStream(seed, r)
            t = ctx.structure(n, rng)
            x = K.wiener_from_parent(t.parent) / n ** 2.5
            s += x
            s2 += x * x
        return {"sum": np.array([s]), "sumsq": np.array([s2]), "count": hi - lo}

    merge = staticmethod(_merge_sums)

    @classmethod
    def finish(cls, cfg, seed, state) -> ExperimentResult:
        ctx = _Ctx(cfg.weights, cfg.sampler, cfg.root_weights)
        mean, stderr = welford_rows(state)
        target = ref.wiener_mean_constant(ctx.sigma)
        rel = abs(float(mean[0]) - target) / target
        rows = [{"n": cfg.n, "mean_scaled": float(mean[0]),
                 "stderr": float(stderr[0]), "reference": target,
                 "reps": int(state["count"])}]
        return ExperimentResult(
            "wiener", rows,
            reference=[{"constant": "(1/sigma)(1/2)sqrt(pi/2)", "value": target}],
            summary={"pass": bool(rel <= cfg.rel_tol), "rel_err": rel})


# --- root degree -----------------------------------------------------------------

@dataclass(frozen=True)
class _RootDegreeConfig:
    weights: dict = field(default_factory=lambda: dict(_GEO))
    root_weights: dict | None = field(
        default_factory=lambda: {"kind": "poisson", "params": {"lam": 1.0},
                                 "coeffs": []})
    n: int = 10_000
    reps: int = 10_000
    kmax: int = 64
    p_floor: float = 1e-3
    dominance: float = 2.5


class RootDegree:
    name = "root-degree"
    Config = _RootDegreeConfig

    @classmethod
    def total_reps(cls, cfg):
        return cfg.reps

    @classmethod
    def chunk(cls, cfg, seed, lo, hi):
        ctx = _Ctx(cfg.weights, "modified", cfg.root_weights)
        hist = np.zeros(cfg.kmax + 1, dtype=np.int64)
        for r in range(lo, hi):
            rng = RngStream(seed, r)
            k = sample_modified_root_degree(ctx.p, ctx.p0, cfg.n, rng)
            hist[min(k, cfg.kmax)] += 1
        return {"hist": hist, "count": hi - lo}

    @staticmethod
    def merge(a, b):
        return {"hist": a["hist"] + b["hist"], "count": a["count"] + b["count"]}

    @classmethod
    def finish(cls, cfg, seed, state) -> ExperimentResult:
        ctx = _Ctx(cfg.weights, "modified", cfg.root_weights)
        limit = root_degree_limit(ctx.p0, cfg.kmax + 1)
        limit = limit / limit.sum()
        hist = state["hist"]
        reps = int(state["count"])
        stat, pval = chi_square_compare(limit, hist)
        rows, max_ratio = [], 0.0
        for k in range(1, cfg.kmax + 1):
            expected = limit[k] * reps
            if expected >= 5.0:
                ratio = hist[k] / expected if expected > 0 else 0.0
                max_ratio = max(max_ratio, ratio)
                rows.append({"k": k, "observed": int(hist[k]),
                             "expected": expected, "ratio": ratio})
        ok = pval > cfg.p_floor and max_ratio <= cfg.dominance
        return ExperimentResult(
            "root-degree", rows,
            reference=[{"k": k, "limit": float(limit[k])}
                       for k in range(1, cfg.kmax + 1) if limit[k] > 0],
            summary={"pass": bool(ok), "chi2": stat, "p_value": pval,
                     "max_ratio": max_ratio, "reps": reps})


# --- big branch ------------------------------------------------------------------

@dataclass(frozen=True)
class _BigBranchConfig:
    weights: dict = field(default_factory=lambda: dict(_FACT))
    root_weights: dict | None = None
    kind: str = "edge_marked"            # forest | modified | edge_marked
    m: int = 3
    ns: tuple = (1_000, 10_000)
    reps: object = 4_000
    pctl: float = 0.99
    ratio_tol: float = 1.5
    p_floor: float = 1e-3
    small_kmax: int = 64


class BigBranch:
    name = "big-branch"
    Config = _BigBranchConfig

    @classmethod
    def total_reps(cls, cfg):
        reps, _ = _per_n_layout(cfg.ns, cfg.reps)
        return int(sum(reps))

    @classmethod
    def chunk(cls, cfg, seed, lo, hi):
        ctx = (_Ctx(cfg.weights, "edgemark", None) if cfg.kind == "edge_marked"
               else _Ctx(cfg.weights, "modified", cfg.root_weights))
        reps, offsets = _per_n_layout(cfg.ns, cfg.reps)
        cap = 1 << 14
        deficits = np.zeros((len(cfg.ns), cap), dtype=np.int64)
        small = np.zeros(cfg.small_kmax + 1, dtype=np.int64)
        for r in range(lo, hi):
            i, _ = _locate(offsets, r)
            n = int(cfg.ns[i])
            rng = RngStream(seed, r)
            if cfg.kind == "forest":
                sizes = sample_forest_sizes(ctx.p, n, cfg.m, rng)
                d = n - int(sizes.max())
                order = np.sort(sizes)[:-1]
                for s in order:
                    small[min(int(s), cfg.small_kmax)] += 1
            elif cfg.kind == "modified":
                k = sample_modified_root_degree(ctx.p, ctx.p0, n, rng)
                sizes = sample_forest_sizes(ctx.p, n - 1, k, rng)
                d = n - int(sizes.max())
            else:
                m = sample_edge_split(ctx.model, n, rng)
                d = min(m, n - m)
                small[min(d, cfg.small_kmax)] += 1
            deficits[i, min(d, cap - 1)] += 1
        return {"deficits": deficits, "small": small, "count": hi - lo}

    @staticmethod
    def merge(a, b):
        return {"deficits": a["deficits"] + b["deficits"],
                "small": a["small"] + b["small"], "count": a["count"] + b["count"]}

    @classmethod
    def finish(cls, cfg, seed, state) -> ExperimentResult:
        rows, pctls = [], []
        for i, n in enumerate(cfg.ns):
            hist = state["deficits"][i]
            total = hist.sum()
            cum = np.cumsum(hist)
            q = int(np.searchsorted(cum, cfg.pctl * total, side="left"))
            pctls.append(q)
            mean_d = float((np.arange(len(hist)) * hist).sum() / max(total, 1))
            rows.append({"n": int(n), "pctl99_deficit": q, "mean_deficit": mean_d,
                         "reps": int(total)})
        ratio = max(pctls) / max(min(pctls), 1)
        summary = {"pass": bool(ratio <= cfg.ratio_tol), "pctl_ratio": ratio}
        if cfg.kind in ("edge_marked", "forest"):
            ctx = (_Ctx(cfg.weights, "edgemark", None)
                   if cfg.kind == "edge_marked"
                   else _Ctx(cfg.weights, "modified", cfg.root_weights))
            a = genfun.gw_size_coeffs(ctx.p, cfg.small_kmax + 1)
            probs = a[: cfg.small_kmax + 1].copy()
            probs[0] = 0.0
            tail = max(1.0 - probs.sum(), 0.0)
            probs[cfg.small_kmax] += tail
            stat, pval = chi_square_compare(probs, state["small"])
            summary["small_chi2_p"] = pval
            summary["pass"] = bool(summary["pass"] and pval > cfg.p_floor)
        return ExperimentResult("big-branch", rows, summary=summary)


# --- moment bounds ---------------------------------------------------------------

@dataclass(frozen=True)
class _MomentConfig:
    weights: dict = field(default_factory=lambda: dict(_GEO))
    r_values: tuple = (1, 2)
    c_grid: tuple = (1, 2, 3, 4, 5, 6, 7, 8)
    ns: tuple = (256, 1_024, 4_096)
    reps: object = (4_000, 2_000, 1_000)
    stability_tol: float = 2.0


class MomentBounds:
    name = "moment-bounds"
    Config = _MomentConfig

    @classmethod
    def total_reps(cls, cfg):
        reps, _ = _per_n_layout(cfg.ns, cfg.reps)
        return int(sum(reps))

    @classmethod
    def chunk(cls, cfg, seed, lo, hi):
        ctx = _Ctx(cfg.weights, "rooted", None)
        reps, offsets = _per_n_layout(cfg.ns, cfg.reps)
        nn, nc, nr = len(cfg.ns), len(cfg.c_grid), len(cfg.r_values)
        lam_sums = np.zeros((nn, nc, nr))
        l_sums = np.zeros((nn, nc, nr))
        count = np.zeros(nn, dtype=np.int64)
        ivals = [[max(1, int(round(c * math.sqrt(n)))) for c in cfg.c_grid]
                 for n in cfg.ns]
        for r in range(lo, hi):
            i, _ = _locate(offsets, r)
            n = int(cfg.ns[i])
            rng = RngStream(seed, r)
            t = ctx.structure(n, rng)
            lam = distance_profile_fast(t).counts
            assert int(lam.sum()) == n * n
            prof = np.bincount(t.depths())
            for j, iv in enumerate(ivals[i]):
                lv = float(lam[iv]) if iv < len(lam) else 0.0
                pv = float(prof[iv]) if iv < len(prof) else 0.0
                for u, rr in enumerate(cfg.r_values):
                    lam_sums[i, j, u] += lv ** rr
                    l_sums[i, j, u] += pv ** rr
            count[i] += 1
        return {"lam": lam_sums, "l": l_sums, "count": count}

    @staticmethod
    def merge(a, b):
        return {"lam": a["lam"] + b["lam"], "l": a["l"] + b["l"],
                "count": a["count"] + b["count"]}

    @classmethod
    def finish(cls, cfg, seed, state) -> ExperimentResult:
        rows = []
        sup_poly = np.zeros((len(cfg.r_values), len(cfg.ns)))
        sup_gauss = np.zeros_like(sup_poly)
        chat = {}
        for u, rr in enumerate(cfg.r_values):
            # fit the Gaussian-decay constant on the smallest n, then freeze
            n0 = int(cfg.ns[0])
            i0 = [max(1, int(round(c * math.sqrt(n0)))) for c in cfg.c_grid]
            e0 = state["lam"][0, :, u] / state["count"][0]
            mask = e0 > 0
            x = np.array([iv * iv / n0 for iv in i0])[mask]
            y = np.log(e0[mask])
            A = np.vstack([np.ones_like(x), -x]).T
            sol, *_ = np.linalg.lstsq(A, y, rcond=None)
            chat[rr] = float(sol[1])
            for i, n in enumerate(cfg.ns):
                n = int(n)
                ivs = [max(1, int(round(c * math.sqrt(n)))) for c in cfg.c_grid]
                for j, iv in enumerate(ivs):
                    e_lam = state["lam"][i, j, u] / state["count"][i]
                    e_l = state["l"][i, j, u] / state["count"][i]
                    poly = e_lam / (iv ** rr * float(n) ** rr)
                    gauss = e_lam / (float(n) ** (1.5 * rr)
                                     * math.exp(-chat[rr] * iv * iv / n))
                    sup_poly[u, i] = max(sup_poly[u, i], poly)
                    sup_gauss[u, i] = max(sup_gauss[u, i], gauss)
                    rows.append({"r": rr, "n": n, "i": iv,
                                 "E_lambda_r": e_lam, "E_l_r": e_l,
                                 "ratio_poly": poly, "ratio_gauss": gauss})
        stab = {}
        ok = True
        for u, rr in enumerate(cfg.r_values):
            sp = sup_poly[u]
            sg = sup_gauss[u]
            stab[f"poly_r{rr}"] = float(sp.max() / sp.min())
            stab[f"gauss_r{rr}"] = float(sg.max() / sg.min())
            ok &= stab[f"poly_r{rr}"] <= cfg.stability_tol
            ok &= stab[f"gauss_r{rr}"] <= cfg.stability_tol
        return ExperimentResult(
            "moment-bounds", rows,
            summary={"pass": bool(ok), "stability": stab,
                     "chat": {str(k): v for k, v in chat.items()}})


# --- Fourier decay ---------------------------------------------------------------

@dataclass(frozen=True)
class _FourierConfig:
    weights: dict = field(default_factory=lambda: dict(_GEO))
    ns: tuple = (64, 128, 256, 512, 1_024)
    xis: tuple = (0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0)
    mode: str = "both"                   # exact | montecarlo | both
    mc_n: int = 512
    mc_reps: int = 20_000
    mc_xis: tuple = (0.5, 1.0, 2.0, 4.0)
    n48: int = 2_048
    xis48: tuple = (4.0, 5.0, 6.0, 7.0, 8.0)
    headroom: float = 1.5
    tol48: float = 0.25
    z_tol: float = 3.0


class FourierDecay:
    name = "fourier-decay"
    Config = _FourierConfig

    @classmethod
    def total_reps(cls, cfg):
        return cfg.mc_reps if cfg.mode in ("montecarlo", "both") else 0

    @classmethod
    def chunk(cls, cfg, seed, lo, hi):
        ctx = _Ctx(cfg.weights, "rooted", None)
        n = cfg.mc_n
        thetas = np.array(cfg.mc_xis) / math.sqrt(n)
        s = np.zeros(len(thetas))
        s2 = np.zeros(len(thetas))
        for r in range(lo, hi):
            rng = RngStream(seed, r)
            t = ctx.structure(n, rng)
            lam = distance_profile_fast(t).counts.astype(float)
            assert int(lam.sum()) == n * n
            k = np.arange(len(lam))
            for j, th in enumerate(thetas):
                z = np.dot(lam, np.exp(1j * th * k))
                v = abs(z) ** 2
                s[j] += v
                s2[j] += v * v
        return {"sum": s, "sumsq": s2, "count": hi - lo}

    merge = staticmethod(_merge_sums)

    @classmethod
    def finish(cls, cfg, seed, state) -> ExperimentResult:
        ctx = _Ctx(cfg.weights, "rooted", None)
        sigma = ctx.sigma
        rows, summary = [], {}
        exact_cache = {}
        if cfg.mode in ("exact", "both"):
            ratios_l = np.zeros((len(cfg.ns), len(cfg.xis)))
            ratios_lam = np.zeros_like(ratios_l)
            for i, n in enumerate(cfg.ns):
                for j, xi in enumerate(cfg.xis):
                    el2, elam2 = genfun.fourier_second_moments(
                        ctx.p, int(n), xi / math.sqrt(n))
                    exact_cache[(int(n), float(xi))] = (el2, elam2)
                    rl = el2 / (n ** 2 * ref.fourier_shape_l(xi))
                    rlam = elam2 / (n ** 4 * ref.fourier_shape_lambda(xi))
                    ratios_l[i, j] = rl
                    ratios_lam[i, j] = rlam
                    rows.append({"kind": "exact", "n": int(n), "xi": xi,
                                 "EL2": el2, "ELambda2": elam2,
                                 "ratio_l": rl, "ratio_lambda": rlam})
            c_l = float(ratios_l[0].max())
            c_lam = float(ratios_lam[0].max())
            ok_shape = bool(np.all(ratios_l <= cfg.headroom * c_l)
                            and np.all(ratios_lam <= cfg.headroom * c_lam))
            summary.update({"C_l": c_l, "C_lambda": c_lam,
                            "shape_pass": ok_shape})
            # scaled fourth-power statistic against the limit constant 48;
            # the gate is on the window-fitted constant because the limit
            # curve itself carries a large next-order (xi^-6) correction
            # that only dies out as xi grows
            stats48 = []
            for xi in cfg.xis48:
                theta = xi / math.sqrt(cfg.n48)
                _, elam2 = genfun.fourier_second_moments(ctx.p, cfg.n48, theta)
                tau2 = float(ref.interpolation_factor(np.array([theta]))[0]) ** 2
                val = (2 * xi / sigma) ** 4 * tau2 * elam2 / cfg.n48 ** 4
                stats48.append(val)
                rows.append({"kind": "limit48", "n": cfg.n48, "xi": xi,
                             "stat": val, "target": 48.0})
            fitted = float(np.exp(np.mean(np.log(stats48))))
            dev = abs(fitted - 48.0) / 48.0
            summary["fitted48"] = fitted
            summary["dev48"] = dev
            summary["dev48_pointwise_max"] = max(abs(v - 48.0) / 48.0
                                                 for v in stats48)
            summary["pass48"] = bool(dev <= cfg.tol48)
        if cfg.mode in ("montecarlo", "both") and state["count"] > 0:
            mean, stderr = welford_rows(state)
            zs = []
            for j, xi in enumerate(cfg.mc_xis):
                exact = exact_cache.get((cfg.mc_n, float(xi)))
                if exact is None:
                    _, elam2 = genfun.fourier_second_moments(
                        ctx.p, cfg.mc_n, xi / math.sqrt(cfg.mc_n))
                else:
                    elam2 = exact[1]
                z = (mean[j] - elam2) / stderr[j] if stderr[j] > 0 else np.inf
                zs.append(abs(z))
                rows.append({"kind": "montecarlo", "n": cfg.mc_n, "xi": xi,
                             "estimate": mean[j], "stderr": stderr[j],
                             "exact": elam2, "zscore": z})
            summary["max_mc_z"] = max(zs)
            summary["mc_pass"] = bool(max(zs) <= cfg.z_tol)
        summary["pass"] = bool(all(summary.get(k, True)
                                   for k in ("shape_pass", "pass48", "mc_pass")))
        return ExperimentResult("fourier-decay", rows, summary=summary)


# --- Holder statistic -------------------------------------------------------------

@dataclass(frozen=True)
class _HolderConfig:
    weights: dict = field(default_factory=lambda: dict(_GEO))
    alpha: float = 0.9
    ns: tuple = (1_000, 10_000, 100_000)
    reps: object = (2_000, 600, 200)
    ratio_tol: float = 1.5


class HolderStatistic:
    name = "holder"
    Config = _HolderConfig

    @classmethod
    def total_reps(cls, cfg):
        reps, _ = _per_n_layout(cfg.ns, cfg.reps)
        return int(sum(reps))

    @classmethod
    def chunk(cls, cfg, seed, lo, hi):
        ctx = _Ctx(cfg.weights, "rooted", None)
        reps, offsets = _per_n_layout(cfg.ns, cfg.reps)
        sums = np.zeros((len(cfg.ns), 4))
        count = np.zeros(len(cfg.ns), dtype=np.int64)
        for r in range(lo, hi):
            i, _ = _locate(offsets, r)
            n = int(cfg.ns[i])
            rng = RngStream(seed, r)
            t = ctx.structure(n, rng)
            lam = distance_profile_fast(t).counts.astype(float)
            assert int(lam.sum()) == n * n
            g = lam * n ** -1.5
            sem = K.holder_seminorm_sq(g, cfg.alpha, 1.0 / math.sqrt(n))
            lip = float(np.max(np.abs(np.diff(lam)))) / n if len(lam) > 1 else 0.0
            sums[i] += [sem, sem * sem, lip, lip * lip]
            count[i] += 1
        return {"sums": sums, "count": count}

    merge = staticmethod(_merge_grids)

    @classmethod
    def finish(cls, cfg, seed, state) -> ExperimentResult:
        rows, means = [], []
        for i, n in enumerate(cfg.ns):
            c = int(state["count"][i])
            m = state["sums"][i, 0] / c
            se = math.sqrt(max(state["sums"][i, 1] / c - m * m, 0.0) / (c - 1))
            ml = state["sums"][i, 2] / c
            sel = math.sqrt(max(state["sums"][i, 3] / c - ml * ml, 0.0) / (c - 1))
            means.append(m)
            rows.append({"n": int(n), "seminorm_sq_mean": m, "stderr": se,
                         "lipschitz_mean": ml, "lipschitz_stderr": sel, "reps": c})
        ratio = max(means) / min(means)
        return ExperimentResult(
            "holder", rows,
            summary={"pass": bool(ratio <= cfg.ratio_tol), "ratio": ratio,
                     "alpha": cfg.alpha})


# --- leaf-bias proximity -----------------------------------------------------------

@dataclass(frozen=True)
class _LeafBiasConfig:
    weights: dict = field(default_factory=lambda: dict(_FACT))
    ns: tuple = (1_000, 10_000)
    reps: object = 4_000
    diam_bin: float = 0.25
    diam_max: float = 8.0


class LeafBiasProximity:
    name = "leafbias-proximity"
    Config = _LeafBiasConfig

    @classmethod
    def total_reps(cls, cfg):
        reps, _ = _per_n_layout(cfg.ns, cfg.reps)
        return 2 * int(sum(reps))

    @classmethod
    def chunk(cls, cfg, seed, lo, hi):
        ctx_leaf = _Ctx(cfg.weights, "leafmark", None)
        ctx_edge = _Ctx(cfg.weights, "edgemark", None)
        reps, offsets = _per_n_layout(cfg.ns, cfg.reps)
        per = int(sum(reps))
        nbins = int(cfg.diam_max / cfg.diam_bin)
        hists = np.zeros((2, len(cfg.ns), 3, nbins), dtype=np.int64)
        counts = np.zeros((2, len(cfg.ns)), dtype=np.int64)
        for r in range(lo, hi):
            which, local = divmod(r, per)
            i, _ = _locate(offsets, local)
            n = int(cfg.ns[i])
            rng = RngStream(seed, r)
            ctx = ctx_leaf if which == 0 else ctx_edge
            t = ctx.structure(n, rng)
            off, adj = t.adjacency()
            far, _ = K.farthest_vertex(off, adj, 0, t.n)
            _, diam = K.farthest_vertex(off, adj, far, t.n)
            wien = K.wiener_from_parent(t.parent) / n ** 2.5
            v = int(rng.gen.integers(0, n))
            depths = K.bfs_depths(off, adj, v, t.n)
            width = int(np.bincount(depths).max()) / math.sqrt(n)
            for s, (val, scale) in enumerate([(diam / math.sqrt(n), cfg.diam_bin),
                                              (wien, 0.05),
                                              (width, 0.1)]):
                b = min(int(val / scale), nbins - 1)
                hists[which, i, s, b] += 1
            counts[which, i] += 1
        return {"hists": hists, "counts": counts}

    @staticmethod
    def merge(a, b):
        return {"hists": a["hists"] + b["hists"], "counts": a["counts"] + b["counts"]}

    @staticmethod
    def tv_with_correction(h1, c1, h2, c2):
        """Binned TV with its sampling-noise floor subtracted.

        The raw half-L1 distance of two empirical histograms has positive
        bias ~ sum_b E|noise_b|; subtracting the normal-approximation floor
        per bin makes the proxy consistent for the true (binned) TV.
        """
        p1, p2 = h1 / c1, h2 / c2
        raw = 0.5 * float(np.abs(p1 - p2).sum())
        pbar = 0.5 * (p1 + p2)
        floor = np.sqrt(2.0 * pbar * (1 - pbar) * (1 / c1 + 1 / c2) / np.pi)
        corrected = 0.5 * float(np.maximum(np.abs(p1 - p2) - floor, 0.0).sum())
        return raw, corrected, 0.5 * float(floor.sum())

    @classmethod
    def finish(cls, cfg, seed, state) -> ExperimentResult:
        rows = []
        tv_by_n, floor_by_n = [], []
        stats = ("diameter", "wiener", "width_random_root")
        for i, n in enumerate(cfg.ns):
            tvs, raws, floors = {}, {}, []
            c1 = max(int(state["counts"][0, i]), 1)
            c2 = max(int(state["counts"][1, i]), 1)
            for s, name in enumerate(stats):
                raw, corr, floor = cls.tv_with_correction(
                    state["hists"][0, i, s], c1, state["hists"][1, i, s], c2)
                tvs[name] = corr
                raws[name] = raw
                floors.append(floor)
            tv_by_n.append(float(np.mean(list(tvs.values()))))
            floor_by_n.append(float(np.mean(floors)))
            rows.append({"n": int(n),
                         **{f"tv_{k}": v for k, v in tvs.items()},
                         **{f"tv_raw_{k}": v for k, v in raws.items()},
                         "noise_floor": floor_by_n[-1], "reps": c1})
        # vanishing proximity gap: the corrected proxy must not grow beyond
        # its own noise scale as n increases
        tol = 0.5 * max(floor_by_n)
        decreasing = all(tv_by_n[i + 1] <= tv_by_n[i] + tol
                         for i in range(len(tv_by_n) - 1))
        return ExperimentResult(
            "leafbias-proximity", rows,
            summary={"pass": bool(decreasing), "tv_means": tv_by_n,
                     "noise_floors": floor_by_n})


EXPERIMENTS = {cls.name: cls for cls in
               (ProfileMean, DistanceProfileMean, Width, Wiener, RootDegree,
                BigBranch, MomentBounds, FourierDecay, HolderStatistic,
                LeafBiasProximity)}
