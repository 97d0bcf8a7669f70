import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import treeprofile as tp
from treeprofile import (OrderedTree, convolve_counts, distance_profile_fast,
                         distance_profile_naive, wiener_fast, wiener_index)
from treeprofile.distprofile import centroid_decomposition
from treeprofile.sampler import sample_conditioned_gw


def test_convolve_examples():
    assert list(convolve_counts([1, 1], [1, 1])) == [1, 2, 1]
    assert list(convolve_counts([1, 0, 2], [3])) == [3, 0, 6]
    assert list(convolve_counts([], [1, 2])) == []


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=40),
       st.lists(st.integers(0, 10**6), min_size=1, max_size=40))
def test_convolve_matches_schoolbook(a, b):
    got = convolve_counts(a, b)
    want = np.convolve(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
    assert np.array_equal(got, want)


def test_convolve_large_fft_path_exact():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 1000, size=10_000).astype(np.int64)
    b = rng.integers(0, 1000, size=10_000).astype(np.int64)
    got = convolve_counts(a, b)
    # schoolbook oracle on a prefix
    want = np.convolve(a[:1000], b[:1000])
    assert np.array_equal(got[:500], want[:500])
    assert got.dtype == np.int64


def test_convolve_guard_falls_back_to_exact():
    # bound too large for the FFT rounding guard: schoolbook, still int64
    a = np.full(3000, 2**20, dtype=np.int64)
    b = np.full(3000, 2**20, dtype=np.int64)
    got = convolve_counts(a, b)
    assert got.dtype == np.int64
    assert int(got[0]) == 2**40
    assert int(got[2999]) == 3000 * 2**40  # > 2^53: FFT could not have rounded
    # beyond int64: exact big-integer result
    big = convolve_counts(np.full(100, 2**55, dtype=np.int64),
                          np.full(100, 2**55, dtype=np.int64))
    assert big.dtype == object
    assert int(big[99]) == 100 * 2**110


def test_fast_profile_examples():
    path4 = OrderedTree.from_offspring([1, 1, 1, 0])
    star3 = OrderedTree.from_offspring([3, 0, 0, 0])
    assert list(distance_profile_fast(path4).counts) == [4, 6, 4, 2]
    assert list(distance_profile_fast(star3).counts) == [4, 6, 6]
    assert wiener_fast(path4) == 10
    assert wiener_fast(star3) == 9


@pytest.mark.parametrize("law", ["geometric", "binary", "poisson"])
def test_fast_equals_naive_random_trees(law):
    p = {"geometric": tp.OffspringDistribution.geometric(0.5),
         "binary": tp.OffspringDistribution.binomial2(0.5),
         "poisson": tp.OffspringDistribution.poisson(1.0)}[law]
    rng = tp.RngStream(11, hash(law) % 2**32)
    sizes = [2, 3, 4, 7, 33, 128, 700, 2048]
    for n in sizes:
        t = sample_conditioned_gw(p, n, rng)
        fast = distance_profile_fast(t)
        naive = distance_profile_naive(t)
        assert np.array_equal(fast.counts, naive.counts)
        assert wiener_fast(t) == wiener_index(naive)


def test_fast_on_adversarial_shapes():
    # tall path and broom: exercises the FFT task path and mixed branches
    n = 4000
    path = OrderedTree.from_offspring(np.r_[np.ones(n - 1, dtype=np.int64), 0])
    assert np.array_equal(distance_profile_fast(path).counts,
                          distance_profile_naive(path).counts)
    broom = OrderedTree.from_offspring(
        np.r_[np.ones(n // 2, dtype=np.int64), n // 2 - 1,
              np.zeros(n // 2 - 1, dtype=np.int64)])
    assert np.array_equal(distance_profile_fast(broom).counts,
                          distance_profile_naive(broom).counts)


def test_centroid_decomposition_invariants():
    p = tp.OffspringDistribution.geometric(0.5)
    for n in (2, 17, 500, 3000):
        t = sample_conditioned_gw(p, n, tp.RngStream(5, n))
        root = centroid_decomposition(t)
        assert root.size == n
        assert root.depth <= int(np.log2(n)) + 1

        seen = []

        def walk(node):
            seen.append(node.centroid)
            for ch in node.children:
                assert ch.size <= node.size // 2 + (node.size % 2)
                walk(ch)

        walk(root)
        assert sorted(seen) == list(range(n))


def test_labelled_input():
    lt = tp.LabelledTree(4, np.array([[1, 2], [2, 3], [3, 4]]))
    assert list(distance_profile_fast(lt).counts) == [4, 6, 4, 2]
