import numpy as np
import pytest

from pcqlab.cloud import PointCloud
from pcqlab.errors import MissingAttributeError
from pcqlab.neighbors import NeighborIndex, build_index, transfer_colors

from conftest import make_cloud
from oracles import nn_brute


def test_nearer_point_wins():
    index = NeighborIndex(np.array([[0.0, 0, 0], [10.0, 0, 0]]))
    assert index.query_one([1.0, 0, 0]) == 0


def test_equidistant_tie_breaks_to_lowest_index():
    index = NeighborIndex(np.array([[0.0, 0, 0], [10.0, 0, 0]]))
    assert index.query_one([5.0, 0, 0]) == 0
    # and with the points swapped the lower index still wins
    swapped = NeighborIndex(np.array([[10.0, 0, 0], [0.0, 0, 0]]))
    assert swapped.query_one([5.0, 0, 0]) == 0


def test_duplicate_points_resolve_to_first_occurrence():
    pts = np.array([[3.0, 3, 3], [1.0, 1, 1], [1.0, 1, 1], [1.0, 1, 1]])
    index = NeighborIndex(pts)
    assert index.query_one([1.0, 1, 1]) == 1
    assert index.query_one([0.9, 1, 1]) == 1


def test_single_point_cloud():
    index = NeighborIndex(np.array([[2.0, 2, 2]]))
    assert index.query_one([100.0, 0, 0]) == 0


def test_matches_brute_force_on_random_clouds(rng):
    pts = rng.uniform(0, 100, size=(2000, 3))
    queries = rng.uniform(0, 100, size=(500, 3))
    index = NeighborIndex(pts)
    idx, sq = index.query(queries)
    oracle_idx, oracle_sq = nn_brute(queries, pts)
    np.testing.assert_array_equal(idx, oracle_idx)
    np.testing.assert_allclose(sq, oracle_sq, rtol=0, atol=0)


def test_matches_brute_force_on_voxel_grid_with_ties(rng):
    # integer voxel coordinates force many exact ties
    pts = rng.integers(0, 6, size=(800, 3)).astype(np.float64)
    queries = rng.integers(0, 6, size=(300, 3)).astype(np.float64) + 0.5
    index = NeighborIndex(pts)
    idx, _ = index.query(queries)
    oracle_idx, _ = nn_brute(queries, pts)
    np.testing.assert_array_equal(idx, oracle_idx)


def test_agrees_with_linear_scan_querying_own_points(rng):
    cloud = make_cloud(rng, 1500, integer=True)
    index = build_index(cloud)
    idx, _ = index.query(cloud.positions)
    oracle_idx, _ = nn_brute(cloud.positions, cloud.positions)
    np.testing.assert_array_equal(idx, oracle_idx)


def test_exhaustive_agreement_on_5000_point_cloud(rng):
    # every point of a 5000-point voxel cloud queried against itself and
    # against offset probes; the oracle scan runs in row blocks
    pts = rng.integers(0, 40, size=(5000, 3)).astype(np.float64)
    index = NeighborIndex(pts)
    probes = np.vstack([pts, pts[:500] + 0.5])
    got_idx, got_sq = index.query(probes)
    for start in range(0, probes.shape[0], 500):
        block = probes[start:start + 500]
        oracle_idx, oracle_sq = nn_brute(block, pts)
        np.testing.assert_array_equal(got_idx[start:start + 500], oracle_idx)
        np.testing.assert_array_equal(got_sq[start:start + 500], oracle_sq)


def test_transfer_identity_keeps_colors(rng):
    cloud = make_cloud(rng, 64)
    out = transfer_colors(cloud, cloud)
    np.testing.assert_array_equal(out.colors, cloud.colors)


def test_transfer_picks_nearer_source():
    source = PointCloud(np.array([[0.0, 0, 0], [10.0, 0, 0]]),
                        colors=np.array([[255, 0, 0], [0, 0, 255]]), bit_depth=4)
    target = PointCloud(np.array([[1.0, 0, 0]]), bit_depth=4)
    out = transfer_colors(source, target)
    np.testing.assert_array_equal(out.colors, [[255, 0, 0]])


def test_transfer_matches_brute_force(rng):
    source = make_cloud(rng, 1000, name="src")
    target = make_cloud(rng, 700, colors=False, name="dst")
    out = transfer_colors(source, target)
    idx, _ = nn_brute(target.positions, source.positions)
    np.testing.assert_array_equal(out.colors, source.colors[idx])


def test_transfer_is_idempotent_on_identity(rng):
    cloud = make_cloud(rng, 50)
    once = transfer_colors(cloud, cloud)
    twice = transfer_colors(once, once)
    np.testing.assert_array_equal(once.colors, twice.colors)


def test_transfer_requires_source_colors(rng):
    bare = make_cloud(rng, 20, colors=False)
    with pytest.raises(MissingAttributeError):
        transfer_colors(bare, bare)
