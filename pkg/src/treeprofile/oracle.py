"""Brute-force exact computation on small trees.

Everything here trades time for trust: exhaustive enumeration of ordered
rooted trees (Catalan many) and labelled unrooted trees (Cayley many),
exact conditioned laws as weighted ensembles, exact moments, the
measure-preservation check for the pointed rerooting surgery, and a
pooled chi-square comparator for sampler validation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import chi2

from .treecore import (LabelledTree, OrderedTree, PointedTree, fringe_shape,
                       height_profile, distance_profile_naive, reroot_transform)
from .weights import OffspringDistribution, WeightSequence

__all__ = [
    "OracleError",
    "WeightedEnsemble",
    "enumerate_ordered",
    "enumerate_labelled",
    "exact_conditioned_law",
    "exact_moments",
    "exact_profile_moments",
    "labelled_total_weights",
    "check_reroot_preservation",
    "chi_square_compare",
]

_MAX_ORDERED = 12
_MAX_LABELLED = 8


class OracleError(ValueError):
    """Enumeration bounds exceeded or degenerate law."""


@dataclass
class WeightedEnsemble:
    """Trees with nonnegative weights; probabilities are weight/total."""

    items: list          # (tree, weight) pairs, deterministic order
    total: float

    def __post_init__(self):
        s = math.fsum(wt for _, wt in self.items)
        if not (self.total > 0) or abs(s - self.total) > 1e-12 * max(1.0, s):
            raise OracleError("ensemble total inconsistent or zero")

    def probabilities(self) -> dict:
        """Canonical key -> probability (keys: shape tuple or edge tuple)."""
        out = {}
        for t, wt in self.items:
            key = t.shape_key() if isinstance(t, OrderedTree) else t.edge_key()
            out[key] = out.get(key, 0.0) + wt / self.total
        return out

    def expectation(self, statistic) -> float:
        return math.fsum(wt * statistic(t) for t, wt in self.items) / self.total


@lru_cache(maxsize=None)
def _ordered_offspring_seqs(n: int) -> tuple:
    """All preorder outdegree sequences of ordered rooted trees of size n,
    in lexicographic order."""
    seqs = []
    seq = [0] * n

    def rec(pos: int, placed_sum: int):
        if pos == n:
            if placed_sum == n - 1:
                seqs.append(tuple(seq))
            return
        open_slots = placed_sum - pos + 1
        if open_slots <= 0:
            return
        for d in range(0, n - 1 - placed_sum + 1):
            seq[pos] = d
            rec(pos + 1, placed_sum + d)
        seq[pos] = 0

    rec(0, 0)
    return tuple(seqs)


def enumerate_ordered(n: int) -> list[OrderedTree]:
    """All ordered rooted trees with n vertices (Catalan(n-1) many)."""
    if not 1 <= n <= _MAX_ORDERED:
        raise OracleError(f"ordered enumeration supports 1 <= n <= {_MAX_ORDERED}")
    return [OrderedTree.from_offspring(np.array(s, dtype=np.int64))
            for s in _ordered_offspring_seqs(n)]


def _prufer_to_edges(seq: tuple, n: int) -> np.ndarray:
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    edges = []
    ptr = 1
    leaf = 0
    # standard linear decode with a moving pointer
    avail = degree[:]
    used = [False] * (n + 1)
    for x in seq:
        for v in range(ptr, n + 1):
            if avail[v] == 1 and not used[v]:
                leaf = v
                ptr = v
                break
        edges.append((leaf, x))
        used[leaf] = True
        avail[x] -= 1
        if avail[x] == 1 and x < ptr:
            ptr = x
    last = [v for v in range(1, n + 1) if not used[v] and avail[v] >= 1]
    edges.append((last[0], last[1]))
    return np.array(edges, dtype=np.int64)


def enumerate_labelled(n: int) -> list[LabelledTree]:
    """All labelled unrooted trees on 1..n (n^(n-2) many)."""
    if not 1 <= n <= _MAX_LABELLED:
        raise OracleError(f"labelled enumeration supports 1 <= n <= {_MAX_LABELLED}")
    if n == 1:
        return [LabelledTree(1, np.empty((0, 2), dtype=np.int64))]
    if n == 2:
        return [LabelledTree(2, np.array([[1, 2]], dtype=np.int64))]
    out = []
    for seq in itertools.product(range(1, n + 1), repeat=n - 2):
        out.append(LabelledTree(n, _prufer_to_edges(seq, n)))
    return out


# --- exact laws ---------------------------------------------------------------

def _phi_weight(t: OrderedTree, coeff) -> float:
    w = 1.0
    for d in t.offspring():
        w *= coeff(int(d))
        if w == 0.0:
            return 0.0
    return w


def _modified_weight(t: OrderedTree, coeff, coeff0) -> float:
    xi = t.offspring()
    w = coeff0(int(xi[0]))
    for d in xi[1:]:
        if w == 0.0:
            return 0.0
        w *= coeff(int(d))
    return w


def _labelled_weight(t: LabelledTree, wcoeff) -> float:
    w = 1.0
    for d in t.degrees():
        w *= wcoeff(int(d))
        if w == 0.0:
            return 0.0
    return w


def _coeff_fn(obj):
    if isinstance(obj, OffspringDistribution):
        return obj.pmf
    if isinstance(obj, WeightSequence):
        return obj.coefficient
    raise OracleError(f"cannot weight trees by {obj!r}")


def exact_conditioned_law(spec, n: int, leaf_biased: bool = False) -> WeightedEnsemble:
    """Exact conditional law at size n.

    ``spec``: an offspring law / rooted weights (ordered trees), a pair
    (body, root) of laws (modified ordered trees), or unrooted weights
    (labelled trees; ``leaf_biased=True`` biases by the leaf count N_0).
    """
    if isinstance(spec, tuple):
        body, root = spec
        cf, cf0 = _coeff_fn(body), _coeff_fn(root)
        items = [(t, _modified_weight(t, cf, cf0)) for t in enumerate_ordered(n)]
    elif isinstance(spec, WeightSequence) and spec.kind == "unrooted_w":
        cf = spec.coefficient
        items = []
        for t in enumerate_labelled(n):
            wt = _labelled_weight(t, cf)
            if leaf_biased:
                if n == 1:
                    nleaves = 0
                elif n == 2:
                    nleaves = 2
                else:
                    nleaves = int(np.sum(t.degrees() == 1))
                wt *= nleaves
            items.append((t, wt))
    else:
        if leaf_biased:
            raise OracleError("leaf bias applies to unrooted weights only")
        cf = _coeff_fn(spec)
        items = [(t, _phi_weight(t, cf)) for t in enumerate_ordered(n)]
    total = math.fsum(wt for _, wt in items)
    if total <= 0:
        raise OracleError(f"zero total weight at n={n}")
    return WeightedEnsemble(items, total)


def exact_moments(ensemble: WeightedEnsemble, statistic) -> float:
    """Exact expectation of a scalar statistic under the ensemble."""
    return ensemble.expectation(statistic)


def exact_profile_moments(ensemble: WeightedEnsemble) -> tuple[np.ndarray, np.ndarray]:
    """(E[L(k)], E[Lambda(k)]) arrays under the ensemble (zero padded)."""
    n = ensemble.items[0][0].n
    EL = np.zeros(n)
    ELam = np.zeros(n)
    for t, wt in ensemble.items:
        if wt == 0.0:
            continue
        pr = wt / ensemble.total
        if isinstance(t, OrderedTree):
            prof = height_profile(t).counts
            EL[: len(prof)] += pr * prof
        lam = distance_profile_naive(t).counts
        ELam[: len(lam)] += pr * lam
    return EL, ELam


def labelled_total_weights(w: WeightSequence, n_max: int) -> np.ndarray:
    """b[m] = total weight of all labelled trees of size m, m <= n_max."""
    b = np.zeros(n_max + 1)
    for m in range(1, n_max + 1):
        for t in enumerate_labelled(m):
            b[m] += _labelled_weight(t, w.coefficient)
    return b


# --- rerooting measure preservation --------------------------------------------

def check_reroot_preservation(p: OffspringDistribution, n_max: int = 6) -> float:
    """Max discrepancy between the joint laws of
    (|T^v|, depth of mark, fringe shape at mark) before and after the
    pointed rerooting surgery, under the sigma-finite pointed measure that
    gives a pointed tree the unconditioned probability of its tree.
    """
    if n_max > 7:
        raise OracleError("pointed enumeration capped at n_max = 7")
    worst = 0.0
    for n in range(1, n_max + 1):
        before: dict = {}
        after: dict = {}
        for t in enumerate_ordered(n):
            wt = _phi_weight(t, p.pmf)
            if wt == 0.0:
                continue
            depths = t.depths()
            sizes = t.subtree_sizes()
            for v in range(n):
                pt = PointedTree(t, v)
                key = (n - int(sizes[v]) + 1, int(depths[v]), fringe_shape(pt))
                before[key] = before.get(key, 0.0) + wt
                rt = reroot_transform(pt)
                rdepths = rt.tree.depths()
                rsizes = rt.tree.subtree_sizes()
                rkey = (rt.tree.n - int(rsizes[rt.mark]) + 1,
                        int(rdepths[rt.mark]), fringe_shape(rt))
                after[rkey] = after.get(rkey, 0.0) + wt
        for key in set(before) | set(after):
            worst = max(worst, abs(before.get(key, 0.0) - after.get(key, 0.0)))
    return worst


# --- chi-square comparison ------------------------------------------------------

def chi_square_compare(expected_probs, observed_counts,
                       min_expected: float = 5.0) -> tuple[float, float]:
    """Pearson chi-square of observed counts against expected probabilities.

    Cells are pooled smallest-expected-first until every retained cell has
    expected count >= min_expected.  Returns (statistic, p_value).
    """
    probs = np.asarray(expected_probs, dtype=float)
    obs = np.asarray(observed_counts, dtype=float)
    if probs.shape != obs.shape:
        raise OracleError("shape mismatch between probabilities and counts")
    total = obs.sum()
    exp = probs / probs.sum() * total
    order = np.argsort(exp)
    pooled_exp, pooled_obs = [], []
    acc_e = acc_o = 0.0
    for i in order:
        acc_e += exp[i]
        acc_o += obs[i]
        if acc_e >= min_expected:
            pooled_exp.append(acc_e)
            pooled_obs.append(acc_o)
            acc_e = acc_o = 0.0
    if acc_e > 0:
        if pooled_exp:
            pooled_exp[-1] += acc_e
            pooled_obs[-1] += acc_o
        else:
            raise OracleError("not enough mass to form two cells")
    if len(pooled_exp) < 2:
        raise OracleError("fewer than 2 cells after pooling")
    pe = np.array(pooled_exp)
    po = np.array(pooled_obs)
    stat = float(np.sum((po - pe) ** 2 / pe))
    dof = len(pe) - 1
    return stat, float(chi2.sf(stat, dof))
