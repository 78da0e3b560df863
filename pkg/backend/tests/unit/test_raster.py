"""Unit tests for raster types, PNG I/O and overlays."""

from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from src.schemas.config import OverlaySpec
from src.services.raster import (
    BinaryMask,
    DimensionMismatchError,
    PixelCoord,
    RasterDecodeError,
    RasterNotFoundError,
    RgbImage,
    UnsupportedRasterError,
    ZoneKind,
    load_image,
    load_mask,
    luma,
    render_overlay,
    save_image,
    save_mask,
)


def _write_gray(path: Path, values: list[list[int]]) -> Path:
    Image.fromarray(np.asarray(values, dtype=np.uint8)).save(path, format="PNG")
    return path


class TestLoadImage:
    def test_decodes_pixels_in_row_major_order(self, tmp_path: Path) -> None:
        pixels = np.array(
            [[[0, 0, 0], [255, 255, 255]], [[255, 0, 0], [0, 0, 255]]], dtype=np.uint8
        )
        Image.fromarray(pixels).save(tmp_path / "px.png", format="PNG")

        image = load_image(tmp_path / "px.png")

        assert (image.width, image.height) == (2, 2)
        assert image.pixels.tolist() == pixels.tolist()

    def test_single_white_pixel(self, tmp_path: Path) -> None:
        path = _write_gray(tmp_path / "white.png", [[255]])

        image = load_image(path)

        assert (image.width, image.height) == (1, 1)
        assert image.pixels[0, 0].tolist() == [255, 255, 255]

    def test_grayscale_expands_to_three_equal_channels(self, tmp_path: Path) -> None:
        path = _write_gray(tmp_path / "g.png", [[10, 20], [30, 40]])

        image = load_image(path)

        assert image.pixels[1, 0].tolist() == [30, 30, 30]

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(RasterNotFoundError):
            load_image(tmp_path / "nope.png")

    def test_truncated_file_raises_decode_error(self, tmp_path: Path) -> None:
        noise = np.random.default_rng(3).integers(0, 256, size=(48, 48, 3), dtype=np.uint8)
        full = tmp_path / "full.png"
        Image.fromarray(noise).save(full, format="PNG")
        data = full.read_bytes()
        cut = tmp_path / "cut.png"
        cut.write_bytes(data[: len(data) // 2])

        with pytest.raises(RasterDecodeError):
            load_image(cut)

    def test_rejects_non_png(self, tmp_path: Path) -> None:
        path = tmp_path / "photo.png"
        Image.new("RGB", (4, 4), (200, 10, 10)).save(path, format="JPEG")

        with pytest.raises(UnsupportedRasterError):
            load_image(path)

    def test_rejects_sixteen_bit_png(self, tmp_path: Path) -> None:
        path = tmp_path / "deep.png"
        Image.fromarray(np.full((4, 4), 40000, dtype=np.uint16)).save(path, format="PNG")

        with pytest.raises(UnsupportedRasterError):
            load_image(path)

    def test_save_then_load_is_identity(self, tmp_path: Path) -> None:
        pixels = np.random.default_rng(5).integers(0, 256, size=(9, 13, 3), dtype=np.uint8)
        image = RgbImage(pixels)

        save_image(image, tmp_path / "rt.png")

        assert load_image(tmp_path / "rt.png") == image


class TestLoadMask:
    def test_zero_and_255(self, tmp_path: Path) -> None:
        path = _write_gray(tmp_path / "m.png", [[0, 255], [255, 0]])

        assert load_mask(path).bits.tolist() == [[False, True], [True, False]]

    def test_threshold_boundary(self, tmp_path: Path) -> None:
        path = _write_gray(tmp_path / "m.png", [[127, 128]])

        assert load_mask(path).bits.tolist() == [[False, True]]

    def test_rgb_mask_matches_grayscale(self, tmp_path: Path) -> None:
        rgb = np.array([[[255, 255, 255], [0, 0, 0]]], dtype=np.uint8)
        Image.fromarray(rgb).save(tmp_path / "rgb.png", format="PNG")
        gray = _write_gray(tmp_path / "gray.png", [[255, 0]])

        assert load_mask(tmp_path / "rgb.png") == load_mask(gray)

    def test_custom_threshold(self, tmp_path: Path) -> None:
        path = _write_gray(tmp_path / "soft.png", [[60, 200]])

        assert load_mask(path, threshold=50).bits.tolist() == [[True, True]]


class TestSaveMask:
    def test_round_trip_random_masks(self, tmp_path: Path, rng: np.random.Generator) -> None:
        for k in range(10):
            mask = BinaryMask(rng.random((16, 16)) < 0.5)
            save_mask(mask, tmp_path / f"m{k}.png")
            assert load_mask(tmp_path / f"m{k}.png") == mask

    def test_empty_mask_writes_zeros(self, tmp_path: Path) -> None:
        save_mask(BinaryMask.empty(5, 3), tmp_path / "e.png")

        with Image.open(tmp_path / "e.png") as img:
            assert img.mode == "L"
            assert np.asarray(img).max() == 0

    def test_full_mask_writes_255(self, tmp_path: Path) -> None:
        save_mask(BinaryMask.full(5, 3), tmp_path / "f.png")

        with Image.open(tmp_path / "f.png") as img:
            assert np.asarray(img).min() == 255


class TestRenderOverlay:
    def test_no_zones_returns_input(self) -> None:
        image = RgbImage(np.full((4, 4, 3), 77, dtype=np.uint8))

        assert render_overlay(image, [], OverlaySpec()) == image

    def test_opaque_full_zone_paints_constant_color(self) -> None:
        image = RgbImage(np.zeros((3, 5, 3), dtype=np.uint8))
        spec = OverlaySpec(fuzzy=(12, 34, 56), alpha=1.0)

        out = render_overlay(image, [(BinaryMask.full(5, 3), ZoneKind.FUZZY)], spec)

        assert np.all(out.pixels == np.array([12, 34, 56], dtype=np.uint8))

    def test_half_blend_rounds_half_up(self) -> None:
        image = RgbImage(np.zeros((1, 1, 3), dtype=np.uint8))

        out = render_overlay(
            image, [(BinaryMask.full(1, 1), ZoneKind.TRUE_FOREGROUND)], OverlaySpec()
        )

        assert out.pixels[0, 0].tolist() == [0, 128, 0]

    def test_later_zones_paint_over_earlier(self) -> None:
        image = RgbImage(np.zeros((1, 2, 3), dtype=np.uint8))
        spec = OverlaySpec(alpha=1.0)
        left = BinaryMask(np.array([[True, False]]))
        both = BinaryMask.full(2, 1)

        out = render_overlay(
            image, [(both, ZoneKind.TRUE_FOREGROUND), (left, ZoneKind.REFINED_CONTOUR)], spec
        )

        assert out.pixels[0].tolist() == [[0, 0, 255], [0, 255, 0]]

    def test_dimension_mismatch(self) -> None:
        image = RgbImage(np.zeros((4, 4, 3), dtype=np.uint8))

        with pytest.raises(DimensionMismatchError):
            render_overlay(image, [(BinaryMask.full(3, 4), ZoneKind.FUZZY)], OverlaySpec())


class TestBinaryMask:
    def test_bits_are_read_only(self) -> None:
        mask = BinaryMask(np.zeros((2, 2), dtype=bool))

        with pytest.raises(ValueError):
            mask.bits[0, 0] = True

    def test_coords_in_raster_order(self) -> None:
        mask = BinaryMask.from_coords(3, 2, [PixelCoord(2, 1), PixelCoord(0, 0), PixelCoord(1, 1)])

        assert list(mask.coords()) == [PixelCoord(0, 0), PixelCoord(1, 1), PixelCoord(2, 1)]

    def test_set_operators(self) -> None:
        a = BinaryMask(np.array([[True, True, False]]))
        b = BinaryMask(np.array([[False, True, True]]))

        assert (a | b).count() == 3
        assert (a & b).count() == 1
        assert (a - b).bits.tolist() == [[True, False, False]]
        assert (a ^ b).count() == 2
        assert (~a).bits.tolist() == [[False, False, True]]
        assert (a & b).issubset(a)
        assert (a - b).isdisjoint(b)

    def test_operators_require_same_shape(self) -> None:
        with pytest.raises(DimensionMismatchError):
            _ = BinaryMask.empty(2, 2) | BinaryMask.empty(3, 2)


class TestLuma:
    def test_extremes_and_rounding(self) -> None:
        rgb = np.array([[[255, 255, 255], [0, 0, 0], [255, 0, 0]]], dtype=np.uint8)

        # 0.299 * 255 = 76.245
        assert luma(rgb).tolist() == [[255, 0, 76]]
