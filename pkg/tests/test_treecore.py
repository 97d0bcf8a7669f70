import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import treeprofile as tp
from treeprofile import (LabelledTree, OrderedTree, PointedTree, TreeError,
                         distance_profile_from_rootings, distance_profile_naive,
                         height_profile, interpolate, reroot_transform,
                         wiener_index, width_height_diameter)
from treeprofile.sampler import sample_conditioned_gw
from treeprofile.treecore import fringe_shape, wiener_via_edge_cuts

PATH3 = OrderedTree.from_offspring([1, 1, 0])
PATH4 = OrderedTree.from_offspring([1, 1, 1, 0])
STAR3 = OrderedTree.from_offspring([3, 0, 0, 0])
SINGLE = OrderedTree.from_offspring([0])


def random_shapes(seed=7, sizes=(2, 3, 5, 17, 50, 120)):
    p = tp.OffspringDistribution.geometric(0.5)
    return [sample_conditioned_gw(p, n, tp.RngStream(seed, n)) for n in sizes]


def test_height_profile_examples():
    assert list(height_profile(PATH3).counts) == [1, 1, 1]
    assert list(height_profile(STAR3).counts) == [1, 3]
    assert list(height_profile(SINGLE).counts) == [1]


def test_profile_conservation_and_integral():
    for t in random_shapes():
        prof = height_profile(t)
        assert prof.size == t.n
        # integral of the interpolation over [-1, len] equals the sum
        xs = np.linspace(-1.5, prof.height + 1.5, 20001)
        integral = np.trapezoid(interpolate(prof, xs), xs)
        assert integral == pytest.approx(t.n, rel=1e-6)


def test_interpolate_examples():
    assert interpolate(height_profile(PATH3), 0.5) == pytest.approx(1.0)
    assert interpolate(height_profile(STAR3), 0.5) == pytest.approx(2.0)
    assert interpolate(height_profile(STAR3), -1.0) == 0.0
    assert interpolate(height_profile(STAR3), 99.0) == 0.0
    # exact at integers
    assert interpolate(height_profile(STAR3), 1) == 3.0


def test_distance_profile_examples():
    assert list(distance_profile_naive(PATH3).counts) == [3, 4, 2]
    assert list(distance_profile_naive(PATH4).counts) == [4, 6, 4, 2]
    assert list(distance_profile_naive(STAR3).counts) == [4, 6, 6]
    assert list(distance_profile_naive(SINGLE).counts) == [1]


def test_distance_profile_conservation():
    for t in random_shapes():
        dp = distance_profile_naive(t)
        assert int(dp.counts.sum()) == t.n * t.n
        assert dp.counts[0] == t.n
        assert np.all(dp.counts[1:] % 2 == 0)


def test_wiener_examples():
    assert wiener_index(distance_profile_naive(PATH4)) == 10
    assert wiener_index(distance_profile_naive(STAR3)) == 9
    assert wiener_index(distance_profile_naive(SINGLE)) == 0


def test_wiener_matches_double_loop():
    # direct double-loop oracle on trees up to n = 200
    for t in random_shapes(sizes=(2, 9, 60, 200)):
        off, adj = t.adjacency()
        from treeprofile._kernels import bfs_depths
        total = 0
        for v in range(t.n):
            total += int(bfs_depths(off, adj, v, t.n).sum())
        assert wiener_index(distance_profile_naive(t)) == total // 2
        assert wiener_via_edge_cuts(t) == total // 2


def test_distance_profile_from_rootings_equals_naive():
    rng = tp.RngStream(3, 1)
    p = tp.OffspringDistribution.geometric(0.5)
    for n in (2, 3, 7, 50):
        t = sample_conditioned_gw(p, n, rng)
        lt = t.as_labelled(rng.gen.permutation(n) + 1)
        a = distance_profile_from_rootings(lt)
        b = distance_profile_naive(lt)
        assert np.array_equal(a.counts, b.counts)


def test_width_height_diameter():
    assert width_height_diameter(PATH3) == (1, 2, 2)
    assert width_height_diameter(STAR3) == (3, 1, 2)
    assert width_height_diameter(SINGLE) == (1, 0, 0)


def test_parenthesis_round_trip():
    for t in random_shapes():
        s = t.to_parenthesis()
        assert s.count("(") == t.n
        t2 = OrderedTree.from_parenthesis(s)
        assert np.array_equal(t.offspring(), t2.offspring())
    assert SINGLE.to_parenthesis() == "()"
    with pytest.raises(TreeError):
        OrderedTree.from_parenthesis("(()")
    with pytest.raises(TreeError):
        OrderedTree.from_parenthesis("()()")


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 60), st.randoms(use_true_random=False))
def test_labelled_round_trip_and_validation(n, rnd):
    # random labelled tree via random parent attachment
    edges = []
    for v in range(2, n + 1):
        edges.append((rnd.randint(1, v - 1), v))
    lt = LabelledTree(n, np.array(edges))
    text = lt.to_csv()
    back = LabelledTree.from_csv(text)
    assert back.edge_key() == lt.edge_key()


def test_labelled_validation_errors():
    with pytest.raises(TreeError):
        LabelledTree(3, np.array([[1, 2], [1, 2]]))  # cycle (duplicate edge)
    with pytest.raises(TreeError):
        LabelledTree(3, np.array([[1, 2], [4, 3]]))  # label out of range
    with pytest.raises(TreeError):
        LabelledTree(4, np.array([[1, 2], [3, 4], [2, 1]]))


def test_rooted_at_child_order_ascending():
    lt = LabelledTree(4, np.array([[3, 1], [1, 4], [1, 2]]))
    t = lt.rooted_at(1)
    assert list(t.offspring()) == [3, 0, 0, 0]
    t3 = lt.rooted_at(3)
    assert list(t3.offspring()) == [1, 2, 0, 0]  # leaf root, centre, leaves 2 < 4


def test_reroot_transform_identity_at_root():
    t = PATH4
    pt = PointedTree(t, 0)
    rt = reroot_transform(pt)
    assert rt is pt


def test_reroot_transform_path_example():
    # path 0 -> 1 -> 2 marked at 2: fringe stays a point, new root is old 1
    pt = PointedTree(PATH3, 2)
    rt = reroot_transform(pt)
    assert fringe_shape(rt) == (0,)
    # new tree: root (old 1) with children (old 0 -> old 2 reattached below 0)
    depths = rt.tree.depths()
    assert rt.tree.n == 3
    assert sorted(depths) == [0, 1, 2]
    assert rt.mark == 2  # the mark sits at depth 2 in the new indexing
    assert depths[rt.mark] == 2


def test_reroot_preserves_fringe_and_complement_size():
    p = tp.OffspringDistribution.geometric(0.5)
    for t in random_shapes(sizes=(5, 9, 40)):
        sizes = t.subtree_sizes()
        for v in range(t.n):
            pt = PointedTree(t, v)
            rt = reroot_transform(pt)
            assert fringe_shape(rt) == fringe_shape(pt)
            rsizes = rt.tree.subtree_sizes()
            assert (t.n - int(sizes[v])) == (rt.tree.n - int(rsizes[rt.mark]))
            assert t.depths()[v] == rt.tree.depths()[rt.mark]


def test_lambda_interpolation_support():
    dp = distance_profile_naive(PATH4)
    assert interpolate(dp, -1.0) == 0.0
    assert interpolate(dp, dp.diameter + 1.0) == 0.0
    assert interpolate(dp, 0.0) == 4.0


def test_validate_catches_corruption():
    t = OrderedTree.from_offspring([2, 0, 0])
    t.validate()
    bad = OrderedTree(3, np.array([-1, 0, 0]), np.array([0, 2, 2, 2]),
                      np.array([1, 2]))
    bad.validate()
    with pytest.raises(TreeError):
        OrderedTree.from_offspring([2, 0])
    with pytest.raises(TreeError):
        OrderedTree.from_offspring([0, 2, 0])
