import math

import numpy as np
import pytest

from treeprofile.experiments import EXPERIMENTS, run_experiment
from treeprofile.experiments.base import (BinnedDensity, ConfigError,
                                          EstimateWithError, LatticeBins,
                                          chunk_ranges)
from treeprofile.experiments import reference as ref

GEO = {"kind": "geometric", "params": {"q": 0.5}, "coeffs": []}
FACT = {"kind": "factorial_unrooted", "params": {}, "coeffs": []}


def test_reference_constants():
    # tagged values
    assert ref.local_time_mean_density(0.5) == pytest.approx(2 * math.exp(-0.5))
    assert ref.local_time_mean_density(0.5) == pytest.approx(1.21306, abs=1e-5)
    assert ref.width_mean_constant(1.0) == pytest.approx(1.25331, abs=1e-5)
    sigma = math.sqrt(2.0)
    assert ref.width_mean_constant(sigma) == pytest.approx(1.77245, abs=1e-5)
    assert ref.profile_mean_reference(0.5, sigma) == pytest.approx(0.7788, abs=2e-4)
    assert ref.wiener_mean_constant(1.0) == pytest.approx(0.62666, abs=1e-5)
    assert ref.wiener_mean_constant(sigma) == pytest.approx(0.44311, abs=1e-4)
    assert ref.profile_mean_reference(0.0, sigma) == 0.0


def test_reference_curve_against_quadrature():
    # independent oracle: the first moment of the mean density by quadrature
    xs = np.linspace(0, 10, 200001)
    first_moment = np.trapezoid(xs * ref.local_time_mean_density(xs), xs)
    assert first_moment == pytest.approx(0.5 * math.sqrt(math.pi / 2), rel=1e-8)
    total = np.trapezoid(ref.local_time_mean_density(xs), xs)
    assert total == pytest.approx(1.0, rel=1e-8)


def test_interpolation_factor():
    assert ref.interpolation_factor(np.array([0.0]))[0] == 1.0
    th = np.array([0.3])
    want = (math.sin(0.15) / 0.15) ** 2
    assert ref.interpolation_factor(th)[0] == pytest.approx(want)


def test_estimate_with_error():
    e = EstimateWithError(1.0, 0.1, reps=100, seed=0)
    assert e.z_against(1.25) == pytest.approx(-2.5)
    with pytest.raises(ConfigError):
        EstimateWithError(1.0, 0.1, reps=1, seed=0)


def test_binned_density_integral():
    edges = np.array([0.0, 0.5, 1.0, 1.5])
    d = BinnedDensity(edges, np.array([0.2, 0.5, 0.3]), mode="density")
    assert d.integral() == pytest.approx(1.0)
    r = BinnedDensity(edges, np.array([0.4, 1.0, 0.6]), mode="raw")
    assert r.integral() == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        BinnedDensity(edges, np.array([1.0]), mode="density")


def test_lattice_bins_partition_and_means():
    bins = LatticeBins(400, 0.1, 2.0)
    # bins tile the lattice: counts sum to number of lattice points
    assert bins.counts.sum() == bins.kmax + 1
    vals = np.arange(bins.kmax + 5, dtype=float)
    means = bins.bin_means(vals)
    j = 5
    lo = np.searchsorted(bins.bin_of_k, j, side="left")
    hi = np.searchsorted(bins.bin_of_k, j, side="right")
    assert means[j] == pytest.approx(vals[lo:hi].mean())


def test_config_rejects_unknown_fields():
    with pytest.raises(ConfigError):
        run_experiment(EXPERIMENTS["width"], {"bogus": 1}, seed=0)


def test_chunk_ranges_partition():
    r = chunk_ranges(1300, 512)
    assert r == [(0, 512), (512, 1024), (1024, 1300)]


def test_results_independent_of_jobs():
    cfg = {"ns": [64, 128], "reps": [400, 400]}
    r1 = run_experiment(EXPERIMENTS["width"], cfg, seed=11, jobs=1)
    r2 = run_experiment(EXPERIMENTS["width"], cfg, seed=11, jobs=2)
    assert r1.rows == r2.rows


def test_profile_mean_small_run_reports_bins():
    r = run_experiment(EXPERIMENTS["profile-mean"],
                       {"n": 900, "reps": 600, "xmax": 3.0}, seed=2)
    assert r.rows and {"x", "estimate", "stderr", "reference",
                       "zscore"} <= set(r.rows[0])
    # central bins already land near the curve at this tiny scale
    mid = [row for row in r.rows if 0.4 <= row["x"] <= 1.2]
    assert all(abs(row["estimate"] - row["reference"]) / row["reference"] < 0.25
               for row in mid)


def test_distance_profile_mean_small_run():
    r = run_experiment(EXPERIMENTS["distance-profile-mean"],
                       {"n": 900, "reps": 400, "xmax": 3.0}, seed=2)
    mid = [row for row in r.rows if 0.4 <= row["x"] <= 1.2]
    assert all(abs(row["estimate"] - row["reference"]) / row["reference"] < 0.25
               for row in mid)
    r2 = run_experiment(EXPERIMENTS["distance-profile-mean"],
                        {"n": 900, "reps": 400, "xmax": 3.0,
                         "sampler": "edgemark", "weights": FACT}, seed=2)
    mid2 = [row for row in r2.rows if 0.4 <= row["x"] <= 1.2]
    assert all(abs(row["estimate"] - row["reference"]) / row["reference"] < 0.25
               for row in mid2)


def test_root_degree_small_run():
    r = run_experiment(EXPERIMENTS["root-degree"], {"n": 500, "reps": 3000},
                       seed=4)
    assert r.summary["p_value"] > 1e-3
    assert r.summary["max_ratio"] <= 2.5


def test_fourier_exact_only_small():
    r = run_experiment(EXPERIMENTS["fourier-decay"],
                       {"ns": [64, 128], "xis": [0.5, 1.0, 2.0, 4.0],
                        "mode": "exact", "n48": 256,
                        "xis48": [4.0, 6.0, 8.0]}, seed=0)
    assert r.summary["shape_pass"]
    assert 0 < r.summary["C_lambda"] < 32.0


def test_leafbias_small_run():
    r = run_experiment(EXPERIMENTS["leafbias-proximity"],
                       {"ns": [300, 3000], "reps": 1500}, seed=6)
    tv = r.summary["tv_means"]
    # bias-corrected proxy stays within its noise scale of a decrease
    assert tv[1] <= tv[0] + 0.5 * max(r.summary["noise_floors"])


def test_moment_bounds_small_run():
    r = run_experiment(EXPERIMENTS["moment-bounds"],
                       {"ns": [64, 256], "reps": [600, 300],
                        "c_grid": [1, 2, 4], "r_values": [1, 2]}, seed=8)
    assert r.summary["pass"]
    for row in r.rows:
        if row["i"] == 0:
            continue
        assert row["ratio_poly"] >= 0.0


def test_big_branch_chi_square_small():
    r = run_experiment(EXPERIMENTS["big-branch"],
                       {"kind": "edge_marked", "weights": FACT,
                        "ns": [600], "reps": 4000, "ratio_tol": 100.0}, seed=9)
    assert r.summary["small_chi2_p"] > 1e-3
