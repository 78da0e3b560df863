"""Unit tests for synthetic scenes, mask degradation and the colour baseline."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from src.schemas.synth import DegradeSpec, HsvThresholds, SynthSpec
from src.services.metrics import evaluate
from src.services.morphology import SeShape, dilate, erode, make_se
from src.services.raster import BinaryMask, RgbImage, load_image, load_mask
from src.services.synth import (
    MANIFEST_NAME,
    baseline_detect,
    degrade_mask,
    synth_generate,
    threshold_hsv,
    write_corpus,
)


def _boundary(mask: BinaryMask) -> BinaryMask:
    cross = make_se(SeShape.CROSS, 1)
    return dilate(mask, cross) ^ erode(mask, cross)


class TestSynthSpec:
    def test_rejects_empty_range(self) -> None:
        with pytest.raises(ValidationError):
            SynthSpec(blob_count=(3, 1))

    def test_rejects_blobs_larger_than_the_frame(self) -> None:
        with pytest.raises(ValidationError):
            SynthSpec(width=64, height=64, blob_scale=(10, 40))

    def test_rejects_unknown_fields(self) -> None:
        with pytest.raises(ValidationError):
            SynthSpec.model_validate({"blobs": 3})


class TestSynthGenerate:
    def test_no_blobs_gives_empty_truth(self) -> None:
        image, truth = synth_generate(SynthSpec(blob_count=(0, 0), seed=4))

        assert not truth.any()
        assert (image.width, image.height) == (128, 128)

    def test_same_seed_is_bit_identical(self) -> None:
        spec = SynthSpec(seed=11)

        assert synth_generate(spec) == synth_generate(spec)

    def test_different_seeds_differ(self) -> None:
        a, _ = synth_generate(SynthSpec(seed=1))
        b, _ = synth_generate(SynthSpec(seed=2))

        assert a != b

    def test_single_blob_area_envelope(self) -> None:
        for seed in range(20):
            spec = SynthSpec(width=64, height=64, blob_count=(1, 1), blob_scale=(10, 10), seed=seed)

            _, truth = synth_generate(spec)

            assert math.pi * 5**2 * 0.5 <= truth.count() <= math.pi * 15**2


class TestDegradeMask:
    def test_identity_settings(self) -> None:
        _, truth = synth_generate(SynthSpec(seed=3))

        out = degrade_mask(truth, DegradeSpec(jitter=0, downscale=1, flip_rate=0.0))

        assert out == truth

    def test_changes_stay_near_the_boundary(self) -> None:
        for seed in range(10):
            _, truth = synth_generate(SynthSpec(seed=seed))
            spec = DegradeSpec(jitter=3, downscale=8, flip_rate=0.4, seed=seed)

            out = degrade_mask(truth, spec)

            band = dilate(_boundary(truth), make_se(SeShape.SQUARE, spec.jitter + spec.downscale))
            assert (out ^ truth).issubset(band)

    def test_flips_only_within_the_jitter_band(self) -> None:
        _, truth = synth_generate(SynthSpec(seed=5))
        spec = DegradeSpec(jitter=2, downscale=1, flip_rate=0.5, seed=5)

        out = degrade_mask(truth, spec)

        band = dilate(_boundary(truth), make_se(SeShape.SQUARE, spec.jitter - 1))
        assert (out ^ truth).any()
        assert (out ^ truth).issubset(band)

    def test_same_seed_same_mask(self) -> None:
        _, truth = synth_generate(SynthSpec(seed=8))
        spec = DegradeSpec(seed=8)

        assert degrade_mask(truth, spec) == degrade_mask(truth, spec)


class TestBaselineDetect:
    def test_blue_image_has_no_rust(self) -> None:
        image = RgbImage(np.full((16, 16, 3), (0, 0, 255), dtype=np.uint8))

        assert not baseline_detect(image, HsvThresholds()).any()

    def test_constant_in_range_color_is_all_foreground(self) -> None:
        image = RgbImage(np.full((16, 16, 3), (150, 75, 40), dtype=np.uint8))

        assert baseline_detect(image, HsvThresholds()) == BinaryMask.full(16, 16)

    def test_wrapping_hue_range(self) -> None:
        pixels = np.zeros((1, 2, 3), dtype=np.uint8)
        pixels[0, 0] = (200, 20, 60)  # hue just below 255
        pixels[0, 1] = (20, 200, 20)  # green

        mask = threshold_hsv(RgbImage(pixels), HsvThresholds(hue=(230, 20)))

        assert mask.bits.tolist() == [[True, False]]

    def test_opening_drops_speckle(self) -> None:
        pixels = np.full((9, 9, 3), (128, 128, 128), dtype=np.uint8)
        pixels[4, 4] = (150, 75, 40)
        image = RgbImage(pixels)

        assert threshold_hsv(image, HsvThresholds()).count() == 1
        assert not baseline_detect(image, HsvThresholds()).any()

    def test_default_scene_f1_floor(self) -> None:
        for seed in range(5):
            image, truth = synth_generate(SynthSpec(seed=seed))

            report = evaluate(baseline_detect(image, HsvThresholds()), truth)

            assert report.f1 >= 0.7


class TestWriteCorpus:
    def test_writes_triples_and_manifest(self, tmp_path: Path) -> None:
        manifest = write_corpus(tmp_path, 3, 40, SynthSpec(), DegradeSpec())

        assert [item.scene for item in manifest.items] == [
            "scene_0000.png",
            "scene_0001.png",
            "scene_0002.png",
        ]
        on_disk = json.loads((tmp_path / MANIFEST_NAME).read_text())
        assert on_disk["count"] == 3
        image, truth = synth_generate(SynthSpec(seed=41))
        assert load_image(tmp_path / "scene_0001.png") == image
        assert load_mask(tmp_path / "truth_0001.png") == truth

    def test_zero_count_writes_manifest_only(self, tmp_path: Path) -> None:
        write_corpus(tmp_path, 0, 0, SynthSpec(), DegradeSpec())

        assert [p.name for p in tmp_path.iterdir()] == [MANIFEST_NAME]

    def test_same_seed_same_bytes(self, tmp_path: Path) -> None:
        write_corpus(tmp_path / "a", 2, 5, SynthSpec(), DegradeSpec(), workers=2)
        write_corpus(tmp_path / "b", 2, 5, SynthSpec(), DegradeSpec())

        for name in ("scene_0001.png", "coarse_0000.png", MANIFEST_NAME):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
