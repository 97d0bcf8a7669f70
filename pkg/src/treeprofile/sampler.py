"""Exact-size samplers for conditioned, modified and unrooted random trees.

The conditioned tree of size n is drawn by (1) sampling the n offspring
values jointly conditioned on summing to n-1, (2) applying the unique
cyclic rotation whose lattice-path prefix sums stay nonnegative until the
final step, and (3) building the tree depth-first.

Step (1) is plain i.i.d. rejection in general (expected ~sqrt(n) retries
for aperiodic laws with finite variance).  For the built-in analytic
families the conditional law collapses to a uniform combinatorial object
(compositions, multinomial slots), which the fast paths sample in O(n)
with the *same* exact law; the chi-square suites cover both paths.
"""

from __future__ import annotations

import numpy as np

from . import genfun
from .rng import RngStream
from .treecore import LabelledTree, OrderedTree
from .weights import OffspringDistribution, UnrootedModel, unrooted_model

__all__ = [
    "SamplingError",
    "sample_conditioned_gw",
    "sample_forest",
    "sample_forest_sizes",
    "sample_modified_gw",
    "sample_modified_shape",
    "sample_modified_root_degree",
    "sample_conditioned_shape",
    "sample_edge_split",
    "sample_unrooted_vertexmark",
    "sample_unrooted_edgemark",
    "sample_unrooted_edgemark_structure",
    "sample_unrooted_leafmark",
    "sample_unrooted_leafmark_structure",
    "random_labelling",
    "draw_conditioned_offspring",
]

_REJECTION_CAP = 10_000_000  # attempts before giving up with diagnostics


class SamplingError(RuntimeError):
    """Infeasible size request or rejection cap exceeded."""


def _rng_of(rng) -> np.random.Generator:
    return rng.gen if isinstance(rng, RngStream) else rng


# --- conditional offspring vectors ------------------------------------------

def _uniform_composition(s: int, parts: int, g: np.random.Generator) -> np.ndarray:
    """Uniformly random (x_1..x_parts) >= 0 with sum s (stars and bars)."""
    if parts == 1:
        return np.array([s], dtype=np.int64)
    if s == 0:
        return np.zeros(parts, dtype=np.int64)
    slots = s + parts - 1
    bars = np.sort(g.choice(slots, size=parts - 1, replace=False))
    ext = np.empty(parts + 1, dtype=np.int64)
    ext[0] = -1
    ext[1:parts] = bars
    ext[parts] = slots
    return np.diff(ext) - 1


def draw_conditioned_offspring(p: OffspringDistribution, n: int, rng) -> np.ndarray:
    """Offspring vector of length n conditioned on total n-1, exact law."""
    g = _rng_of(rng)
    s = n - 1
    if p.family == "geometric":
        # weights prod q^{x_i} are constant on the sum: uniform composition
        return _uniform_composition(s, n, g)
    if p.family == "poisson":
        # weights prod 1/x_i!: multinomial occupancy of s balls in n boxes
        return np.bincount(g.integers(0, n, size=s), minlength=n)
    if p.family == "binomial2":
        # two Bernoulli slots per vertex; choose which s of the 2n are hits
        idx = g.choice(2 * n, size=s, replace=False)
        return np.bincount(idx // 2, minlength=n)
    if p.family == "neg_binomial2":
        # x_i = pair sums of 2n geometric slots: uniform composition on 2n
        comp = _uniform_composition(s, 2 * n, g)
        return comp[0::2] + comp[1::2]
    return _rejection_offspring(p, n, g)


def _rejection_offspring(p: OffspringDistribution, n: int, g) -> np.ndarray:
    s = n - 1
    if (s % p.span) != 0:
        raise SamplingError(
            f"size n={n} infeasible: need n == 1 (mod {p.span}) for this law")
    if p.family == "table" and not _reachable_sum(p, s):
        raise SamplingError(f"size n={n} infeasible for the table support")
    tab = p.table_view(p.adaptive_length(1e-18))
    cdf = np.cumsum(tab)
    cdf[-1] = 1.0
    batch = max(1, min(256, _REJECTION_CAP // max(n, 1)))
    attempts = 0
    while attempts < _REJECTION_CAP:
        u = g.random((batch, n))
        draws = np.searchsorted(cdf, u, side="right").astype(np.int64)
        hits = np.nonzero(draws.sum(axis=1) == s)[0]
        attempts += batch
        if len(hits):
            return draws[hits[0]]
    raise SamplingError(
        f"rejection cap exceeded: n={n}, target sum {s}, mean {p.mu:.6f}, "
        f"attempts {attempts}")


def _reachable_sum(p: OffspringDistribution, s: int) -> bool:
    support = [k for k in range(len(p.table)) if p.table[k] > 0 and k >= 1]
    reach = np.zeros(s + 1, dtype=bool)
    reach[0] = True
    for c in support:
        for t in range(c, s + 1):
            if reach[t - c]:
                reach[t] = True
    return bool(reach[s])


def _cycle_rotate(xi: np.ndarray) -> np.ndarray:
    """The unique rotation whose lattice path stays nonnegative until the end."""
    n = len(xi)
    walk = np.cumsum(xi - 1)
    r = int(np.argmin(walk)) + 1  # first position attaining the minimum
    if r < n:
        xi = np.concatenate([xi[r:], xi[:r]])
        walk = np.cumsum(xi - 1)
    # uniqueness/validity assertion for the rotated path
    if walk[-1] != -1 or (n > 1 and walk[:-1].min() < 0):
        raise SamplingError("cycle rotation failed to produce a valid path")
    return xi


def sample_conditioned_shape(p: OffspringDistribution, n: int, rng) -> np.ndarray:
    """Preorder outdegree sequence of the conditioned tree (cheaper than
    materialising the tree; the sequence is the canonical shape)."""
    if n < 1:
        raise SamplingError("n must be >= 1")
    if ((n - 1) % p.span) != 0:
        raise SamplingError(
            f"size n={n} infeasible: need n == 1 (mod {p.span}) for this law")
    if n == 1:
        if p.pmf(0) <= 0:
            raise SamplingError("n=1 needs p_0 > 0")
        return np.zeros(1, dtype=np.int64)
    return _cycle_rotate(draw_conditioned_offspring(p, n, rng))


def sample_conditioned_gw(p: OffspringDistribution, n: int, rng) -> OrderedTree:
    """Critical conditioned tree of exactly n vertices."""
    return OrderedTree.from_offspring(sample_conditioned_shape(p, n, rng))


# --- forests ------------------------------------------------------------------

def sample_forest_sizes(p: OffspringDistribution, n: int, m: int, rng) -> np.ndarray:
    """Component sizes (n_1..n_m) with probability proportional to
    prod a_{n_i}, sampled sequentially from coefficient arrays of A^j."""
    if not 1 <= m <= n:
        raise SamplingError(f"need 1 <= m <= n, got m={m}, n={n}")
    if ((n - m) % p.span) != 0:
        raise SamplingError(f"forest (n={n}, m={m}) infeasible for span {p.span}")
    g = _rng_of(rng)
    sizes = np.empty(m, dtype=np.int64)
    rem, k = n, m
    a = genfun.gw_size_coeffs(p, n)
    while k > 1:
        rest = genfun.apow_coeffs(p, k - 1, rem)
        jmax = rem - (k - 1)
        w = a[1: jmax + 1] * rest[rem - 1: rem - jmax - 1: -1]
        total = w.sum()
        if total <= 0:
            raise SamplingError(f"forest size split infeasible at rem={rem}, k={k}")
        j = 1 + int(np.searchsorted(np.cumsum(w), g.random() * total, side="right"))
        j = min(j, jmax)
        sizes[m - k] = j
        rem -= j
        k -= 1
    sizes[m - 1] = rem
    return sizes


def sample_forest(p: OffspringDistribution, n: int, m: int, rng) -> list[OrderedTree]:
    """Conditioned forest: m trees, total size exactly n."""
    sizes = sample_forest_sizes(p, n, m, rng)
    return [sample_conditioned_gw(p, int(sz), rng) for sz in sizes]


# --- modified (root-law) trees -------------------------------------------------

_ROOT_DEGREE_CACHE: dict = {}


def _root_degree_cdf(p: OffspringDistribution, p0: OffspringDistribution,
                     n: int) -> np.ndarray:
    """Normalised cdf of the root degree at size n, from the unnormalised
    weights p0_k (k/(n-1)) P(S_{n-1} = n-1-k)."""
    key = (p.key, p0.key, n)
    cdf = _ROOT_DEGREE_CACHE.get(key)
    if cdf is None:
        s = genfun.sum_pmf(p, n - 1, n)
        kmax = min(n - 1, p0.adaptive_length(1e-18))
        k = np.arange(kmax + 1, dtype=np.int64)
        w = p0.table_view(kmax + 1) * k / (n - 1) * s[n - 1 - k]
        w[0] = 0.0
        total = w.sum()
        if total <= 0:
            raise SamplingError(f"no feasible root degree at n={n}")
        cdf = np.cumsum(w) / total
        if len(_ROOT_DEGREE_CACHE) > 64:
            _ROOT_DEGREE_CACHE.clear()
        _ROOT_DEGREE_CACHE[key] = cdf
    return cdf


def sample_modified_root_degree(p: OffspringDistribution,
                                p0: OffspringDistribution, n: int, rng) -> int:
    g = _rng_of(rng)
    cdf = _root_degree_cdf(p, p0, n)
    return int(np.searchsorted(cdf, g.random(), side="right"))


def sample_modified_shape(p: OffspringDistribution, p0: OffspringDistribution,
                          n: int, rng) -> np.ndarray:
    """Preorder outdegree sequence of the modified conditioned tree."""
    if n < 1:
        raise SamplingError("n must be >= 1")
    if n == 1:
        if p0.pmf(0) <= 0:
            raise SamplingError("n=1 needs a root law with mass at 0")
        return np.zeros(1, dtype=np.int64)
    k = sample_modified_root_degree(p, p0, n, rng)
    sizes = sample_forest_sizes(p, n - 1, k, rng)
    parts = [np.array([k], dtype=np.int64)]
    parts += [sample_conditioned_shape(p, int(sz), rng) for sz in sizes]
    return np.concatenate(parts)


def sample_modified_gw(p: OffspringDistribution, p0: OffspringDistribution,
                       n: int, rng) -> OrderedTree:
    """Conditioned tree whose root offspring follows p0, everyone else p."""
    return OrderedTree.from_offspring(sample_modified_shape(p, p0, n, rng))


# --- unrooted samplers ----------------------------------------------------------

def random_labelling(t: OrderedTree, rng) -> LabelledTree:
    """Forget root/order and attach a uniformly random labelling 1..n."""
    g = _rng_of(rng)
    return t.as_labelled(g.permutation(t.n) + 1)


def _model_of(w) -> UnrootedModel:
    return w if isinstance(w, UnrootedModel) else unrooted_model(w)


def sample_unrooted_vertexmark(w, n: int, rng) -> LabelledTree:
    """Unrooted simply generated tree via the marked-vertex construction."""
    model = _model_of(w)
    t = sample_modified_gw(model.p, model.p0, n, rng)
    return random_labelling(t, rng)


def _edge_split_cdf(p: OffspringDistribution, n: int) -> np.ndarray:
    key = (p.key, n)
    cdf = _EDGE_SPLIT_CACHE.get(key)
    if cdf is None:
        a = genfun.gw_size_coeffs(p, n)
        wts = a[1:n] * a[n - 1: 0: -1]
        total = wts.sum()
        if total <= 0:
            raise SamplingError(f"no feasible edge split at n={n}")
        cdf = np.cumsum(wts) / total
        if len(_EDGE_SPLIT_CACHE) > 32:
            _EDGE_SPLIT_CACHE.clear()
        _EDGE_SPLIT_CACHE[key] = cdf
    return cdf


_EDGE_SPLIT_CACHE: dict = {}


def sample_edge_split(w, n: int, rng) -> int:
    """Size of the first component in the marked-edge construction."""
    model = _model_of(w)
    if n < 2:
        raise SamplingError("edge marking needs n >= 2")
    g = _rng_of(rng)
    cdf = _edge_split_cdf(model.p, n)
    m = 1 + int(np.searchsorted(cdf, g.random(), side="right"))
    return min(m, n - 1)


def sample_unrooted_edgemark_structure(w, n: int, rng) -> OrderedTree:
    """The marked-edge construction, kept rooted at one endpoint of the
    marked edge (the unrooted structure is label-free)."""
    model = _model_of(w)
    m = sample_edge_split(model, n, rng)
    t1 = sample_conditioned_gw(model.p, m, rng)
    t2 = sample_conditioned_gw(model.p, n - m, rng)
    # root the pair at t1's root; grafting t2's root as the last child
    # keeps the concatenated outdegrees a valid preorder sequence
    xi1 = t1.offspring()
    xi = np.concatenate([[xi1[0] + 1], xi1[1:], t2.offspring()]).astype(np.int64)
    return OrderedTree.from_offspring(xi)


def sample_unrooted_edgemark(w, n: int, rng) -> LabelledTree:
    """Unrooted simply generated tree via the marked-edge construction."""
    t = sample_unrooted_edgemark_structure(w, n, rng)
    return random_labelling(t, rng)


def sample_unrooted_leafmark_structure(w, n: int, rng) -> OrderedTree:
    """Leaf-biased construction: a size n-1 tree planted under a new root."""
    model = _model_of(w)
    if n < 2:
        raise SamplingError("leaf marking needs n >= 2")
    t = sample_conditioned_gw(model.p, n - 1, rng)
    xi = np.concatenate([[1], t.offspring()]).astype(np.int64)
    return OrderedTree.from_offspring(xi)


def sample_unrooted_leafmark(w, n: int, rng) -> LabelledTree:
    """Leaf-biased unrooted tree (law proportional to N_0(T) w(T))."""
    t = sample_unrooted_leafmark_structure(w, n, rng)
    return random_labelling(t, rng)
