import numpy as np
import pytest

from chamferkit import (
    PointCloud,
    gen_shape,
    match_brute,
    match_indexed,
    pair_sq,
    resolve_workers,
)
from chamferkit.matching import WORKERS_ENV_VAR

from testutil import mixed_cloud, snapped_cloud, sorted_nearest, uniform_cloud


def assert_matches_equal(m1, m2):
    np.testing.assert_array_equal(m1.fwd_idx, m2.fwd_idx)
    np.testing.assert_array_equal(m1.bwd_idx, m2.bwd_idx)
    # squared distances must agree to the bit, not just approximately
    np.testing.assert_array_equal(m1.fwd_sq, m2.fwd_sq)
    np.testing.assert_array_equal(m1.bwd_sq, m2.bwd_sq)


class TestMatchBrute:
    def test_identity_matching(self):
        c = PointCloud([[0, 0, 0], [1, 0, 0]])
        m = match_brute(c, c)
        np.testing.assert_array_equal(m.fwd_idx, [0, 1])
        np.testing.assert_array_equal(m.bwd_idx, [0, 1])
        assert (m.fwd_sq == 0).all() and (m.bwd_sq == 0).all()

    def test_hand_enumeration(self):
        a = PointCloud([[0, 0, 0]])
        b = PointCloud([[1, 0, 0], [0, 2, 0]])
        m = match_brute(a, b)
        np.testing.assert_array_equal(m.fwd_idx, [0])
        np.testing.assert_array_equal(m.fwd_sq, [1.0])
        np.testing.assert_array_equal(m.bwd_idx, [0, 0])
        np.testing.assert_array_equal(m.bwd_sq, [1.0, 4.0])

    def test_duplicate_targets_tie_to_smallest_index(self):
        b_pts = np.ones((6, 3)) * 9
        b_pts[3] = (1, 0, 0)
        b_pts[5] = (1, 0, 0)
        m = match_brute(PointCloud([[1, 0, 0]]), PointCloud(b_pts))
        assert m.fwd_idx[0] == 3

    def test_equidistant_tie_to_smallest_index(self):
        # query at the midpoint of two distinct points
        b = PointCloud([[2, 0, 0], [0, 0, 0]])
        m = match_brute(PointCloud([[1, 0, 0]]), b)
        assert m.fwd_idx[0] == 0

    def test_matches_python_sort_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(15):
            a = mixed_cloud(rng, int(rng.integers(1, 60)))
            b = mixed_cloud(rng, int(rng.integers(1, 60)))
            m = match_brute(a, b)
            np.testing.assert_array_equal(m.fwd_idx, sorted_nearest(a, b))
            np.testing.assert_array_equal(m.bwd_idx, sorted_nearest(b, a))

    def test_sq_recomputable_and_minimal(self):
        rng = np.random.default_rng(8)
        a = uniform_cloud(rng, 80)
        b = uniform_cloud(rng, 90)
        m = match_brute(a, b)
        np.testing.assert_array_equal(m.fwd_sq, pair_sq(a.points, b.points[m.fwd_idx]))
        np.testing.assert_array_equal(m.bwd_sq, pair_sq(a.points[m.bwd_idx], b.points))
        diff = a.points[:, None, :] - b.points[None, :, :]
        sq = (diff * diff).sum(axis=2)
        assert (m.fwd_sq[:, None] <= sq).all()
        assert (m.bwd_sq[None, :] <= sq).all()
        assert (m.fwd_sq >= 0).all() and np.isfinite(m.fwd_sq).all()

    def test_chunked_path_consistent(self):
        # force many row chunks by exceeding the scratch budget
        rng = np.random.default_rng(9)
        a = uniform_cloud(rng, 4096)
        b = uniform_cloud(rng, 3000)
        m = match_brute(a, b)
        np.testing.assert_array_equal(m.fwd_sq, pair_sq(a.points, b.points[m.fwd_idx]))
        sample = rng.integers(0, len(a), 64)
        for j in sample:
            sq_row = pair_sq(a.points[j], b.points)
            assert m.fwd_sq[j] == sq_row.min()
            assert m.fwd_idx[j] == sq_row.argmin()


class TestMatchIndexed:
    def test_single_point_clouds(self):
        a = PointCloud([[0, 0, 0]])
        b = PointCloud([[3, 4, 0]])
        assert_matches_equal(match_indexed(a, b), match_brute(a, b))

    def test_random_pairs_equal_brute(self):
        rng = np.random.default_rng(10)
        for _ in range(40):
            a = mixed_cloud(rng, int(rng.integers(1, 300)))
            b = mixed_cloud(rng, int(rng.integers(1, 300)))
            assert_matches_equal(match_indexed(a, b), match_brute(a, b))

    def test_tie_heavy_clouds_equal_brute(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            a = snapped_cloud(rng, int(rng.integers(50, 400)), grid=0.5)
            b = snapped_cloud(rng, int(rng.integers(50, 400)), grid=0.5)
            assert_matches_equal(match_indexed(a, b), match_brute(a, b))

    def test_all_identical_points(self):
        a = PointCloud(np.zeros((5, 3)))
        b = PointCloud(np.ones((7, 3)))
        m = match_indexed(a, b)
        assert (m.fwd_idx == 0).all() and (m.bwd_idx == 0).all()
        assert (m.fwd_sq == 3.0).all()

    def test_large_pair_equal_brute(self):
        rng = np.random.default_rng(12)
        a = uniform_cloud(rng, 8192)
        b = uniform_cloud(rng, 8192)
        assert_matches_equal(match_indexed(a, b), match_brute(a, b))

    def test_worker_count_does_not_change_result(self):
        rng = np.random.default_rng(13)
        a = snapped_cloud(rng, 500, grid=0.25)
        b = snapped_cloud(rng, 500, grid=0.25)
        assert_matches_equal(match_indexed(a, b, workers=1), match_indexed(a, b, workers=2))

    def test_sphere_to_cropped_sphere(self):
        full = gen_shape("sphere-surface", 1024, seed=3)
        partial = PointCloud(full.points[256:])
        assert_matches_equal(match_indexed(partial, full), match_brute(partial, full))


class TestResolveWorkers:
    def test_default_is_serial(self, monkeypatch):
        monkeypatch.delenv(WORKERS_ENV_VAR, raising=False)
        assert resolve_workers() == 1

    def test_env_var_respected(self, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV_VAR, "4")
        assert resolve_workers() == 4
        assert resolve_workers(2) == 2  # explicit argument wins

    def test_invalid_values_rejected(self, monkeypatch):
        monkeypatch.setenv(WORKERS_ENV_VAR, "many")
        with pytest.raises(ValueError):
            resolve_workers()
        monkeypatch.delenv(WORKERS_ENV_VAR)
        with pytest.raises(ValueError):
            resolve_workers(0)
