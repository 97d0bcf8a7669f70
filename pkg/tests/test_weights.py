import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import treeprofile as tp
from treeprofile import (OffspringDistribution, WeightError, criticalize,
                         mean_variance, root_degree_limit, tilt,
                         unrooted_to_rooted, weights_from_json)
from treeprofile.oracle import exact_conditioned_law


def test_mean_variance_geometric_closed_form_vs_partial_sums():
    ws = tp.geometric_weights(0.5)
    mu, var = mean_variance(ws)
    # independent oracle: partial sums to k = 60
    k = np.arange(61)
    p = 0.5 ** (k + 1)
    mu_ps = float(k @ p)
    var_ps = float((k * k) @ p - mu_ps**2)
    assert mu == pytest.approx(1.0, abs=1e-12)
    assert var == pytest.approx(2.0, abs=1e-10)
    assert mu == pytest.approx(mu_ps, abs=1e-12)
    assert var == pytest.approx(var_ps, abs=1e-10)


def test_mean_variance_binary_and_poisson():
    assert mean_variance(tp.binary_weights(0.5)) == pytest.approx((1.0, 0.5))
    assert mean_variance(tp.poisson_weights(1.0)) == pytest.approx((1.0, 1.0))


def test_mean_variance_divergent():
    with pytest.raises(WeightError, match="moment diverges"):
        mean_variance(tp.factorial_unrooted_weights())


def test_tilt_formula_and_identity():
    ws = tp.table_weights([1.0, 1.0, 1.0])
    tilted = tilt(ws, 2.0, 3.0)
    assert [tilted.coefficient(k) for k in range(3)] == [2.0, 6.0, 18.0]
    same = tilt(ws, 1.0, 1.0)
    assert [same.coefficient(k) for k in range(3)] == [1.0, 1.0, 1.0]


def test_tilt_geometric_scalar_rescale():
    # phi_k = 2^{-k-1} tilted by (a, b) = (2, 1) is phi_k = 2^{-k}
    ws = tp.geometric_weights(0.5)
    tilted = tilt(ws, 2.0, 1.0)
    for k in range(6):
        assert tilted.coefficient(k) == pytest.approx(2.0**-k)


def test_tilt_linear_family_matches_noncrossing_constants():
    # phi_k = k + 1 with (a, b) = (4/9, 1/3) gives p_k = 4 (k+1) 3^{-k-2}
    ws = tp.WeightSequence("rooted_phi", "linear_geometric", (("beta", 1.0),))
    tilted = tilt(ws, 4 / 9, 1 / 3)
    for k in range(8):
        assert tilted.coefficient(k) == pytest.approx(4 * (k + 1) * 3.0 ** (-k - 2))


@settings(max_examples=12, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.2, 2.0))
def test_tilt_preserves_conditioned_law_oracle(a, b):
    # oracle-exact conditional laws are identical coefficientwise
    ws = tp.table_weights([1.0, 0.5, 0.25, 0.125])
    tilted = tilt(ws, a, b)
    for n in (3, 5):
        p1 = exact_conditioned_law(ws, n).probabilities()
        p2 = exact_conditioned_law(tilted, n).probabilities()
        assert set(p1) == set(p2)
        for key in p1:
            assert p1[key] == pytest.approx(p2[key], abs=1e-12)


def test_criticalize_linear_family():
    ws = tp.WeightSequence("rooted_phi", "linear_geometric", (("beta", 1.0),))
    p, a, b = criticalize(ws)
    assert abs(p.mu - 1.0) <= 1e-10
    assert a == pytest.approx(4 / 9, abs=1e-9)
    assert b == pytest.approx(1 / 3, abs=1e-9)
    for k in range(6):
        assert p.pmf(k) == pytest.approx(4 * (k + 1) * 3.0 ** (-k - 2), abs=1e-12)


def test_criticalize_fixed_point_for_mean_one_law():
    p, a, b = criticalize(tp.poisson_weights(1.0))
    assert (a, b) == (pytest.approx(1.0, abs=1e-9), pytest.approx(1.0, abs=1e-9))
    assert p.family == "poisson"


def test_criticalize_geometric_halfweights():
    # phi_k = 2^{-k}: bisection lands on (a, b) = (1/2, 1)
    ws = tp.WeightSequence("rooted_phi", "geometric", (("q", 0.5),))
    p, a, b = criticalize(ws)
    assert a == pytest.approx(0.5, abs=1e-9)
    assert b == pytest.approx(1.0, abs=1e-9)
    mu, var = mean_variance(p)
    assert mu == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("make", [
    lambda: tp.geometric_weights(0.7),
    lambda: tp.binary_weights(0.3),
    lambda: tp.table_weights([1.0, 0.1, 0.0, 2.0]),
])
def test_criticalize_invariants(make):
    p, a, b = criticalize(make())
    assert abs(p.mu - 1.0) <= 1e-10
    tab = p.table_view(p.adaptive_length(1e-15) + 40)
    assert abs(tab.sum() - 1.0) <= 1e-12


def test_criticalize_input_checks():
    with pytest.raises(WeightError):
        criticalize(tp.factorial_unrooted_weights())   # unrooted kind
    with pytest.raises(WeightError):
        criticalize(tp.table_weights([0.0, 1.0], role="root"))  # root law


def test_unrooted_to_rooted_factorial():
    phi, phi0 = unrooted_to_rooted(tp.factorial_unrooted_weights())
    assert [phi.coefficient(k) for k in range(5)] == [1, 2, 3, 4, 5]
    assert [phi0.coefficient(k) for k in range(5)] == [0, 1, 1, 1, 1]


def test_unrooted_to_rooted_tables():
    w = tp.table_weights([0.0, 1.0, 0.0, 1.0], kind="unrooted_w")
    phi, phi0 = unrooted_to_rooted(w)
    assert phi.coefficient(0) == 1.0
    assert phi.coefficient(2) == pytest.approx(1.0 / 2.0)
    assert phi0.coefficient(1) == 1.0
    assert phi0.coefficient(3) == pytest.approx(1.0 / 6.0)

    w1 = tp.table_weights([1.0] * 6, kind="unrooted_w")
    phi, phi0 = unrooted_to_rooted(w1)
    for k in range(4):
        assert phi.coefficient(k) == pytest.approx(1.0 / math.factorial(k))
        assert phi0.coefficient(k) == pytest.approx(1.0 / math.factorial(k))


def test_unrooted_model_same_tilt_for_root_law(factorial_model):
    # same b for body and root: root law is summable and normalised
    m = factorial_model
    assert m.p.family == "neg_binomial2"
    assert m.p0.family == "shifted_geometric"
    assert m.b == pytest.approx(1 / 3, abs=1e-9)
    for k in (1, 2, 3, 5):
        assert m.p0.pmf(k) == pytest.approx(2.0 * 3.0**-k, abs=1e-12)


def test_root_degree_limit_formulas(poisson, geometric):
    lim = root_degree_limit(poisson, 6)
    for k in range(1, 6):
        assert lim[k] == pytest.approx(k * math.exp(-1) / math.factorial(k))
    limg = root_degree_limit(geometric, 8)
    for k in range(1, 8):
        assert limg[k] == pytest.approx(k * 2.0 ** (-k - 1))
    atom = OffspringDistribution.from_table([0.0, 0.0, 1.0])
    lima = root_degree_limit(atom, 4)
    assert lima[2] == pytest.approx(1.0)
    assert lima.sum() == pytest.approx(1.0, abs=1e-12)


def test_root_degree_limit_sums_to_one(factorial_model):
    lim = root_degree_limit(factorial_model.p0)
    assert lim.sum() == pytest.approx(1.0, abs=1e-12)


def test_offspring_validation():
    with pytest.raises(WeightError):
        OffspringDistribution.from_table([0.5, 0.4])  # sums to 0.9
    with pytest.raises(WeightError):
        OffspringDistribution("geometric", (("q", 0.5),), mu=2.0, sigma2=2.0)


def test_span_computation():
    assert OffspringDistribution.from_table([0.5, 0.0, 0.5]).span == 2
    assert OffspringDistribution.from_table([0.3, 0.2, 0.5]).span == 1
    assert OffspringDistribution.from_table([0.5, 0, 0, 0.25, 0, 0, 0.25]).span == 3


def test_json_round_trip():
    for spec in (
        {"kind": "geometric", "params": {"q": 0.5}, "coeffs": []},
        {"kind": "poisson", "params": {"lam": 1.0}, "coeffs": []},
        {"kind": "binary", "params": {"q": 0.25}, "coeffs": []},
        {"kind": "table", "params": {}, "coeffs": [1.0, 0.5, 0.25]},
        {"kind": "factorial_unrooted", "params": {}, "coeffs": []},
    ):
        ws = weights_from_json(spec)
        back = tp.weights_to_json(ws)
        assert back["kind"] == spec["kind"]
    with pytest.raises(WeightError):
        weights_from_json({"kind": "geometric", "bogus": 1})
    with pytest.raises(WeightError):
        weights_from_json({"kind": "unknown"})


def test_weight_sequence_invariants():
    with pytest.raises(WeightError):
        tp.table_weights([0.0, 1.0])              # phi_0 = 0
    with pytest.raises(WeightError):
        tp.table_weights([1.0, 1.0])              # no phi_k > 0 with k >= 2
    with pytest.raises(WeightError):
        tp.table_weights([1.0, 0.0, 1.0], kind="unrooted_w")   # w_1 = 0
    with pytest.raises(WeightError):
        tp.table_weights([-1.0, 0.0, 1.0])
    # root-law sequences only need some positive weight
    tp.table_weights([0.0, 1.0], role="root")
