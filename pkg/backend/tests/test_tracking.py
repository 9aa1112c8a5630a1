"""Tests for boundary matching and velocity conversion."""

import numpy as np
import pytest

from firefront.errors import InsufficientSequenceError
from firefront.models import DisplacementField
from firefront.schemas.config import SequenceMeta
from firefront.services.tracking_service import (
    default_max_dist_px,
    greedy_match,
    to_velocities,
    track_sequence,
)
from tests.oracles import nearest_bruteforce


def _circle(radius: float, n: int = 200) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n) / n
    pts = np.column_stack([100 + radius * np.cos(theta), 100 + radius * np.sin(theta)])
    return np.unique(np.rint(pts).astype(np.int64), axis=0)


class TestGreedyMatch:
    """Tests for greedy_match."""

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_oracle(self, seed):
        """Test pairs equal exhaustive nearest-neighbor search with lowest-(y, x) ties."""
        rng = np.random.default_rng(seed)
        span = int(rng.integers(10, 120))
        src = np.unique(rng.integers(0, span, size=(int(rng.integers(1, 501)), 2)), axis=0)
        dst = np.unique(rng.integers(0, span, size=(int(rng.integers(1, 501)), 2)), axis=0)
        max_dist = float(rng.choice([1.0, 2.5, 5.0, 12.0, np.inf]))

        field = greedy_match(src, dst, max_dist)

        got = [(tuple(s), tuple(d)) for s, d in zip(field.src, field.dst, strict=True)]
        expected = nearest_bruteforce(src, dst, max_dist)
        assert got == expected
        assert field.unmatched == len(src) - len(expected)

    def test_tie_goes_to_lowest_yx(self):
        """Test equidistant candidates resolve to the row-major smallest."""
        field = greedy_match([(5, 5)], [(6, 5), (5, 6), (4, 5), (5, 4)], max_dist_px=2.0)
        assert tuple(field.dst[0]) == (5, 4)

    def test_many_to_one_allowed(self):
        """Test two src points may share one dst point."""
        field = greedy_match([(0, 0), (2, 0)], [(1, 0)], max_dist_px=5.0)
        assert len(field) == 2
        assert (field.dst == [1, 0]).all()

    def test_out_of_range_unmatched(self):
        """Test src points with nothing within max_dist_px are counted, not emitted."""
        field = greedy_match([(0, 0), (50, 50)], [(1, 0)], max_dist_px=3.0)
        assert len(field) == 1
        assert field.unmatched == 1

    def test_empty_destination(self):
        """Test an empty dst boundary matches nothing."""
        field = greedy_match([(0, 0), (1, 1)], np.empty((0, 2)), max_dist_px=3.0)
        assert len(field) == 0
        assert field.unmatched == 2

    def test_invalid_max_dist(self):
        """Test max_dist_px <= 0 is rejected."""
        with pytest.raises(ValueError):
            greedy_match([(0, 0)], [(1, 1)], max_dist_px=0.0)


class TestToVelocities:
    """Tests for to_velocities."""

    def test_units_and_rotation(self):
        """Test v = d / RES / dt and the longitudinal axis rotates the components."""
        field = DisplacementField(
            src=np.array([[0, 0]]), dst=np.array([[3, 4]]), dt_s=0.5, region=np.array([0])
        )
        v = to_velocities(field, res_px_per_cm=2.0, axis_deg=90.0)
        assert (v.vx[0], v.vy[0]) == pytest.approx((3.0, 4.0))
        assert v.longitudinal[0] == pytest.approx(4.0)
        assert v.transverse[0] == pytest.approx(-3.0)
        assert v.magnitude[0] == pytest.approx(5.0)

    def test_rotation_preserves_magnitude(self):
        """Test longitudinal^2 + transverse^2 equals vx^2 + vy^2."""
        rng = np.random.default_rng(4)
        src = rng.integers(0, 50, size=(30, 2))
        dst = src + rng.integers(-5, 6, size=(30, 2))
        field = DisplacementField(src=src, dst=dst, dt_s=1.0, region=np.zeros(30, dtype=int))
        v = to_velocities(field, 1.27, axis_deg=37.0)
        np.testing.assert_allclose(
            v.longitudinal**2 + v.transverse**2, v.vx**2 + v.vy**2, rtol=1e-9
        )

    @pytest.mark.parametrize("seed", range(10))
    def test_halving_dt_doubles_every_velocity(self, seed):
        """Test doubling the sampling rate exactly doubles velocities for the same displacements."""
        rng = np.random.default_rng(seed)
        src = rng.integers(0, 200, size=(50, 2))
        dst = src + rng.integers(-20, 21, size=(50, 2))
        dt = float(rng.choice([1.0, 0.5, 1.0 / 3.0, 0.2]))
        region = np.zeros(50, dtype=int)
        slow, fast = (
            to_velocities(DisplacementField(src=src, dst=dst, dt_s=step, region=region), 1.27, 25.0)
            for step in (dt, dt / 2.0)
        )
        for name in ("vx", "vy", "longitudinal", "transverse"):
            np.testing.assert_array_equal(getattr(fast, name), 2.0 * getattr(slow, name))

    def test_invalid_resolution(self):
        """Test a nonpositive resolution is rejected."""
        field = DisplacementField(
            src=np.zeros((0, 2), int), dst=np.zeros((0, 2), int), dt_s=1.0, region=np.zeros(0)
        )
        with pytest.raises(ValueError):
            to_velocities(field, 0.0)


class TestTrackSequence:
    """Tests for track_sequence."""

    def test_translation_recovered_exactly(self):
        """Test sparse points shifted by (3, -2) px per frame give that displacement everywhere."""
        base = np.array([(x, y) for x in range(20, 200, 20) for y in range(20, 200, 20)])
        boundaries = [(base + t * np.array([3, -2]), np.zeros(len(base), int)) for t in range(4)]
        result = track_sequence(boundaries, res_px_per_cm=1.0, sample_rate_hz=1.0)
        assert len(result.samples) == 3 * len(base)
        assert (result.samples.vx == 3.0).all()
        assert (result.samples.vy == -2.0).all()
        assert result.match_rate == 1.0

    def test_expanding_circle_speed(self):
        """Test a circle growing 6 px per frame reads about 6 cm/s at RES 1, f_s 1."""
        boundaries = [(_circle(20 + 6 * t, 400), None) for t in range(4)]
        boundaries = [(pts, np.zeros(len(pts), int)) for pts, _ in boundaries]
        result = track_sequence(boundaries, res_px_per_cm=1.0, sample_rate_hz=1.0)
        assert result.samples.magnitude.mean() == pytest.approx(6.0, rel=0.1)

    def test_pair_counts_and_empty_frame_warning(self):
        """Test an empty boundary is reported per pair instead of raising."""
        pts = _circle(10)
        boundaries = [(pts, np.zeros(len(pts), int)), (np.empty((0, 2), int), np.empty(0, int))]
        result = track_sequence(boundaries, 1.0, 1.0)
        assert result.pair_counts[0].unmatched == len(pts)
        assert result.warnings
        assert result.match_rate == 0.0

    def test_threads_do_not_change_results(self):
        """Test parallel pairs give identical samples."""
        boundaries = [(_circle(15 + 2 * t), None) for t in range(6)]
        boundaries = [(pts, np.zeros(len(pts), int)) for pts, _ in boundaries]
        one = track_sequence(boundaries, 1.27, 2.0, threads=1).samples
        many = track_sequence(boundaries, 1.27, 2.0, threads=4).samples
        np.testing.assert_array_equal(one.vx, many.vx)
        np.testing.assert_array_equal(one.t_index, many.t_index)

    def test_single_frame_rejected(self):
        """Test fewer than two frames raise InsufficientSequenceError."""
        with pytest.raises(InsufficientSequenceError):
            track_sequence([(np.zeros((1, 2), int), np.zeros(1, int))], 1.0, 1.0)

    def test_default_max_dist_is_half_fov(self):
        """Test the default match radius is FOV/2 pixels."""
        meta = SequenceMeta(fov_px=253, resolution_px_per_cm=1.27, sample_rate_hz=2.0)
        assert default_max_dist_px(meta) == pytest.approx(126.5)
