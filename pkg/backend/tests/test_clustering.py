"""Tests for DBSCAN and region splitting."""

import numpy as np
import pytest

from firefront.errors import ConfigError
from firefront.models import NOISE
from firefront.services import clustering_service
from firefront.services.clustering_service import dbscan, split_regions
from tests.oracles import dbscan_bruteforce


def _random_points(seed: int, n: int, span: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    pts = rng.integers(0, span, size=(n, 2))
    return np.unique(pts, axis=0)


class TestDbscan:
    """Tests for dbscan against a brute-force oracle."""

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_oracle(self, seed):
        """Test labels match the exhaustive implementation on up to 2000 points."""
        rng = np.random.default_rng(2000 + seed)
        n = int(rng.integers(10, 2001))
        eps = float(rng.choice([0.5, 1.0, 1.5, 2.0, 3.0, 5.0]))
        min_pts = int(rng.integers(1, 9))
        pts = _random_points(seed, n, int(rng.integers(20, 150)))
        labels = dbscan(pts, eps, min_pts).labels
        np.testing.assert_array_equal(labels, dbscan_bruteforce(pts, eps, min_pts))

    @pytest.mark.parametrize("seed", range(20))
    def test_kd_tree_path_matches_oracle(self, monkeypatch, seed):
        """Test the sparse path gives the same labels as the exhaustive implementation."""
        monkeypatch.setattr(clustering_service, "MAX_RASTER_CELLS", 0)
        pts = _random_points(100 + seed, 600, 80)
        labels = dbscan(pts, 4.0, 5).labels
        np.testing.assert_array_equal(labels, dbscan_bruteforce(pts, 4.0, 5))

    def test_order_independent(self):
        """Test shuffling the input permutes labels without renaming clusters."""
        pts = _random_points(7, 200, 40)
        perm = np.random.default_rng(8).permutation(len(pts))
        base = dbscan(pts, 3.0, 4).labels
        shuffled = dbscan(pts[perm], 3.0, 4).labels
        np.testing.assert_array_equal(shuffled, base[perm])

    def test_two_separated_blobs(self):
        """Test two dense squares far apart form two clusters, scan-ordered."""
        a = np.array([(x, y) for x in range(5) for y in range(5)])
        b = a + 50
        clustering = dbscan(np.concatenate([b, a]), eps=1.5, min_pts=3)
        assert clustering.n_clusters == 2
        assert (clustering.labels[25:] == 0).all()
        assert (clustering.labels[:25] == 1).all()

    def test_isolated_points_are_noise(self):
        """Test points without neighbors are labeled noise."""
        clustering = dbscan([(0, 0), (10, 10), (20, 20)], eps=2.0, min_pts=2)
        assert (clustering.labels == NOISE).all()
        assert clustering.n_noise == 3

    def test_empty_input(self):
        """Test no points gives no labels."""
        assert dbscan(np.empty((0, 2)), 1.0, 1).labels.size == 0

    def test_bad_parameters(self):
        """Test eps <= 0 and min_pts < 1 raise ConfigError."""
        with pytest.raises(ConfigError):
            dbscan([(0, 0)], 0.0, 1)
        with pytest.raises(ConfigError):
            dbscan([(0, 0)], 1.0, 0)

    def test_duplicates_rejected(self):
        """Test duplicate coordinates are rejected."""
        with pytest.raises(ValueError):
            dbscan([(1, 1), (1, 1)], 1.0, 1)


class TestSplitRegions:
    """Tests for split_regions."""

    def test_sorted_by_size(self):
        """Test the larger blob comes first and noise is dropped."""
        mask = np.zeros((40, 40), dtype=bool)
        mask[2:6, 2:6] = True
        mask[20:30, 20:30] = True
        mask[38, 0] = True

        regions = split_regions(mask, eps=1.5, min_pts=3)

        assert [len(r) for r in regions] == [100, 16]

    def test_equal_sizes_ordered_by_first_pixel(self):
        """Test same-size regions are ordered by their smallest (y, x) member."""
        mask = np.zeros((20, 20), dtype=bool)
        mask[10:13, 1:4] = True
        mask[2:5, 15:18] = True
        regions = split_regions(mask, eps=1.0, min_pts=2)
        assert tuple(regions[0][0]) == (15, 2)
        assert tuple(regions[1][0]) == (1, 10)
