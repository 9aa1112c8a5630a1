"""Tests for frame loading, subsampling, color conversion and cropping."""

import cv2
import numpy as np
import pandas as pd
import pytest

from firefront.errors import BoundsError, DimensionMismatchError, EmptyInputError, LoadError
from firefront.models import Frame
from firefront.schemas.config import Roi, SequenceMeta
from firefront.services.imagery_service import (
    crop,
    hsv_to_rgb_image,
    load_sequence,
    read_mask_png,
    resample,
    rgb_to_hsv,
    rgb_to_hsv_image,
    write_frame,
)
from tests.frames import make_visual


def _write_pngs(directory, count: int, shape=(8, 10)):
    directory.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        image = np.full((*shape, 3), i % 256, dtype=np.uint8)
        cv2.imwrite(str(directory / f"frame_{i:06d}.png"), image)


def _random_roi(rng, width: int, height: int) -> Roi:
    w, h = int(rng.integers(1, width + 1)), int(rng.integers(1, height + 1))
    x, y = int(rng.integers(0, width - w + 1)), int(rng.integers(0, height - h + 1))
    return Roi(x=x, y=y, width=w, height=h)


class TestLoadSequence:
    """Tests for load_sequence."""

    def test_stride_keeps_every_nth_file(self, tmp_path):
        """Test 30 Hz frames sampled at 10 Hz keep indices 0, 3, 6."""
        _write_pngs(tmp_path, 9)
        meta = SequenceMeta(frame_rate_hz=30.0, sample_rate_hz=10.0)

        frames = load_sequence(tmp_path, meta)

        assert [f.index for f in frames] == [0, 3, 6]
        assert [f.timestamp_s for f in frames] == pytest.approx([0.0, 0.1, 0.2])
        assert frames[1].pixels[0, 0, 0] == 3

    def test_one_second_clip_at_one_hertz(self, tmp_path):
        """Test a 30-frame clip at f=30 Hz, f_s=1 Hz gives a single frame."""
        _write_pngs(tmp_path, 30)
        frames = load_sequence(tmp_path, SequenceMeta(frame_rate_hz=30.0, sample_rate_hz=1.0))
        assert len(frames) == 1

    def test_max_duration_truncates(self, tmp_path):
        """Test frames at or past max_duration_s are dropped."""
        _write_pngs(tmp_path, 10)
        meta = SequenceMeta(frame_rate_hz=10.0, sample_rate_hz=10.0, max_duration_s=0.5)
        assert len(load_sequence(tmp_path, meta)) == 5

    def test_empty_directory(self, tmp_path):
        """Test a directory without frames raises EmptyInputError."""
        with pytest.raises(EmptyInputError):
            load_sequence(tmp_path, SequenceMeta())

    def test_missing_directory(self, tmp_path):
        """Test a missing directory raises LoadError."""
        with pytest.raises(LoadError):
            load_sequence(tmp_path / "nope", SequenceMeta())

    def test_corrupt_file(self, tmp_path):
        """Test an undecodable PNG raises LoadError."""
        (tmp_path / "frame_000000.png").write_bytes(b"not a png")
        with pytest.raises(LoadError):
            load_sequence(tmp_path, SequenceMeta(frame_rate_hz=1.0, sample_rate_hz=1.0))

    def test_shape_mismatch(self, tmp_path):
        """Test frames of differing size raise DimensionMismatchError."""
        _write_pngs(tmp_path, 1, shape=(8, 10))
        cv2.imwrite(str(tmp_path / "frame_000001.png"), np.zeros((9, 10, 3), dtype=np.uint8))
        meta = SequenceMeta(frame_rate_hz=1.0, sample_rate_hz=1.0)
        with pytest.raises(DimensionMismatchError):
            load_sequence(tmp_path, meta)

    def test_roi_outside_frame(self, tmp_path):
        """Test an ROI larger than the frame raises BoundsError."""
        _write_pngs(tmp_path, 1)
        meta = SequenceMeta(
            frame_rate_hz=1.0, sample_rate_hz=1.0, roi=Roi(x=0, y=0, width=20, height=4)
        )
        with pytest.raises(BoundsError):
            load_sequence(tmp_path, meta)

    def test_infrared_csv_round_trip(self, tmp_path):
        """Test an infrared grid written by write_frame loads back exactly."""
        grid = np.random.default_rng(0).uniform(15.0, 900.0, size=(6, 7))
        frame = Frame(index=0, timestamp_s=0.0, kind="infrared", pixels=grid)
        write_frame(tmp_path / "frame_000000.csv", frame)

        meta = SequenceMeta(kind="infrared", frame_rate_hz=1.0, sample_rate_hz=1.0)
        loaded = load_sequence(tmp_path, meta)

        np.testing.assert_array_equal(loaded[0].pixels, grid)

    def test_non_finite_csv(self, tmp_path):
        """Test a CSV holding NaN raises LoadError."""
        pd.DataFrame([[1.0, float("nan")]]).to_csv(
            tmp_path / "frame_000000.csv", header=False, index=False
        )
        meta = SequenceMeta(kind="infrared", frame_rate_hz=1.0, sample_rate_hz=1.0)
        with pytest.raises(LoadError):
            load_sequence(tmp_path, meta)


class TestSequenceMeta:
    """Tests for the sampling-rate validation."""

    def test_non_integer_stride_rejected(self):
        """Test f / f_s must be an integer."""
        with pytest.raises(ValueError, match="integer frame stride"):
            SequenceMeta(frame_rate_hz=30.0, sample_rate_hz=4.0)

    def test_sample_rate_above_frame_rate_rejected(self):
        """Test f_s > f is rejected."""
        with pytest.raises(ValueError):
            SequenceMeta(frame_rate_hz=10.0, sample_rate_hz=20.0)


class TestResampleAndCrop:
    """Tests for resample and crop."""

    def test_resample_halves_sequence(self):
        """Test resampling 2 Hz to 1 Hz keeps every other frame."""
        frames = [make_visual(np.zeros((2, 2, 3)), index=i) for i in range(6)]
        out = resample(frames, 2.0, 1.0)
        assert [f.index for f in out] == [0, 2, 4]
        assert [f.timestamp_s for f in out] == [0.0, 1.0, 2.0]

    def test_crop_extracts_roi(self):
        """Test crop returns the ROI's pixels."""
        pixels = np.arange(5 * 6 * 3, dtype=np.uint8).reshape(5, 6, 3)
        out = crop(make_visual(pixels), Roi(x=1, y=2, width=3, height=2))
        np.testing.assert_array_equal(out.pixels, pixels[2:4, 1:4])

    @pytest.mark.parametrize("seed", range(20))
    def test_nested_crops_equal_one_crop(self, seed):
        """Test cropping an inner ROI out of an outer crop equals one crop at the inner ROI."""
        rng = np.random.default_rng(seed)
        pixels = rng.integers(0, 256, size=(40, 50, 3), dtype=np.uint8)
        outer = _random_roi(rng, 50, 40)
        inner = _random_roi(rng, outer.width, outer.height)

        twice = crop(crop(make_visual(pixels), outer), inner)
        absolute = inner.model_copy(update={"x": outer.x + inner.x, "y": outer.y + inner.y})
        np.testing.assert_array_equal(twice.pixels, crop(make_visual(pixels), absolute).pixels)

    @pytest.mark.parametrize(
        ("f", "mid", "low"), [(30.0, 10.0, 5.0), (30.0, 15.0, 5.0), (12.0, 6.0, 2.0)]
    )
    def test_resample_composes(self, f, mid, low):
        """Test resampling f -> mid -> low equals resampling f -> low directly."""
        frames = [make_visual(np.full((2, 2, 3), i % 256), index=i) for i in range(61)]
        twice = resample(resample(frames, f, mid), mid, low)
        once = resample(frames, f, low)
        assert [(fr.index, fr.timestamp_s) for fr in twice] == [
            (fr.index, fr.timestamp_s) for fr in once
        ]
        for a, b in zip(twice, once, strict=True):
            np.testing.assert_array_equal(a.pixels, b.pixels)

    def test_crop_out_of_bounds(self):
        """Test an ROI past the frame edge raises BoundsError."""
        with pytest.raises(BoundsError):
            crop(make_visual(np.zeros((4, 4, 3))), Roi(x=2, y=0, width=3, height=1))


class TestColorConversion:
    """Tests for RGB/HSV conversion."""

    def test_primary_colors(self):
        """Test hue in degrees for pure red, green and blue."""
        assert rgb_to_hsv((255, 0, 0)).h == pytest.approx(0.0)
        assert rgb_to_hsv((0, 255, 0)).h == pytest.approx(120.0)
        assert rgb_to_hsv((0, 0, 255)).h == pytest.approx(240.0)

    def test_gray_has_zero_hue_and_saturation(self):
        """Test gray pixels have h = 0 and s = 0."""
        p = rgb_to_hsv((128, 128, 128))
        assert (p.h, p.s) == (0.0, 0.0)
        assert p.v == pytest.approx(128 / 255)

    def test_out_of_range_channel(self):
        """Test channels outside [0, 255] are rejected."""
        with pytest.raises(ValueError):
            rgb_to_hsv((256, 0, 0))

    def test_inverse_within_one_level(self):
        """Test RGB -> HSV -> RGB reconstructs 10^5 random pixels within +-1."""
        rgb = np.random.default_rng(7).integers(0, 256, size=(100_000, 1, 3), dtype=np.uint8)
        back = hsv_to_rgb_image(rgb_to_hsv_image(rgb))
        assert np.abs(back.astype(int) - rgb.astype(int)).max() <= 1


class TestReadMask:
    """Tests for read_mask_png."""

    def test_nonzero_pixels_are_set(self, tmp_path):
        """Test any nonzero gray value marks the pixel."""
        image = np.zeros((4, 5), dtype=np.uint8)
        image[1, 2] = 1
        image[3, 4] = 255
        cv2.imwrite(str(tmp_path / "mask.png"), image)

        mask = read_mask_png(tmp_path / "mask.png")

        assert mask.sum() == 2
        assert mask[1, 2] and mask[3, 4]

    def test_shape_check(self, tmp_path):
        """Test a mask of the wrong shape raises DimensionMismatchError."""
        cv2.imwrite(str(tmp_path / "mask.png"), np.zeros((4, 5), dtype=np.uint8))
        with pytest.raises(DimensionMismatchError):
            read_mask_png(tmp_path / "mask.png", shape=(5, 5))
