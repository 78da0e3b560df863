"""Synthetic corrosion scenes, simulated coarse network masks, and a colour baseline detector."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
import numpy.typing as npt
from PIL import Image

from src.schemas.report import CorpusItem, CorpusManifest
from src.schemas.synth import DegradeSpec, HsvThresholds, SynthSpec
from src.services.morphology import SeShape, dilate_bits, erode_bits, make_se
from src.services.raster import BinaryMask, RgbImage, save_image, save_mask

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
# Second entropy word keeps the degradation stream apart from the scene stream.
_DEGRADE_STREAM = 1


def _textured(
    rng: np.random.Generator, color: npt.NDArray[np.int64], shape: tuple[int, int], amplitude: int
) -> npt.NDArray[np.int64]:
    noise = rng.integers(-amplitude, amplitude + 1, size=(*shape, 3))
    return color[None, None, :] + noise


def _blob(rng: np.random.Generator, spec: SynthSpec) -> npt.NDArray[np.bool_]:
    """Union of one to three jittered, rotated ellipses around a random centre."""
    scale = rng.uniform(*spec.blob_scale)
    half = scale / 2
    cx = rng.uniform(scale, spec.width - 1 - scale)
    cy = rng.uniform(scale, spec.height - 1 - scale)
    ys, xs = np.ogrid[: spec.height, : spec.width]
    out = np.zeros((spec.height, spec.width), dtype=bool)
    for k in range(int(rng.integers(1, 4))):
        ox, oy = (0.0, 0.0) if k == 0 else rng.uniform(-0.6 * half, 0.6 * half, size=2)
        a, b = rng.uniform(0.8 * half, 1.2 * half, size=2)
        theta = rng.uniform(0.0, math.pi)
        dx = xs - (cx + ox)
        dy = ys - (cy + oy)
        u = dx * math.cos(theta) + dy * math.sin(theta)
        v = -dx * math.sin(theta) + dy * math.cos(theta)
        out |= (u / a) ** 2 + (v / b) ** 2 <= 1.0
    return out


def synth_generate(spec: SynthSpec) -> tuple[RgbImage, BinaryMask]:
    """Rust-textured blobs over a steel-textured background, with exact ground truth."""
    rng = np.random.default_rng(spec.seed)
    shape = (spec.height, spec.width)

    bg_color = np.asarray(spec.background_palette[rng.integers(len(spec.background_palette))])
    pixels = _textured(rng, bg_color.astype(np.int64), shape, spec.noise_amplitude)
    truth = np.zeros(shape, dtype=bool)

    for _ in range(int(rng.integers(spec.blob_count[0], spec.blob_count[1] + 1))):
        blob = _blob(rng, spec)
        mean = np.asarray(spec.rust_palette[rng.integers(len(spec.rust_palette))], dtype=np.int64)
        color = mean + rng.integers(-spec.rust_jitter, spec.rust_jitter + 1, size=3)
        rust = _textured(rng, color, shape, spec.noise_amplitude)
        pixels[blob] = rust[blob]
        truth |= blob

    image = RgbImage(np.clip(pixels, 0, 255).astype(np.uint8))
    return image, BinaryMask(truth)


def degrade_mask(truth: BinaryMask, spec: DegradeSpec) -> BinaryMask:
    """Quantize contours by nearest-neighbour down/up-scaling, then flip pixels near the boundary.

    Changes stay within dilate(boundary, square(jitter + downscale)) of the true boundary.
    """
    bits = truth.bits
    f = spec.downscale
    upscaled = np.repeat(np.repeat(bits[::f, ::f], f, axis=0), f, axis=1)
    coarse = upscaled[: truth.height, : truth.width]

    if spec.jitter == 0 or spec.flip_rate == 0.0:
        return BinaryMask(coarse)
    cross = make_se(SeShape.CROSS, 1)
    boundary = dilate_bits(bits, cross) ^ erode_bits(bits, cross)
    band = dilate_bits(boundary, make_se(SeShape.SQUARE, spec.jitter - 1))
    rng = np.random.default_rng([spec.seed, _DEGRADE_STREAM])
    flips = band & (rng.random(bits.shape) < spec.flip_rate)
    return BinaryMask(coarse ^ flips)


def _hue_in(hue: npt.NDArray[np.uint8], lo: int, hi: int) -> npt.NDArray[np.bool_]:
    if lo <= hi:
        return (hue >= lo) & (hue <= hi)
    return (hue >= lo) | (hue <= hi)


def threshold_hsv(image: RgbImage, thresholds: HsvThresholds) -> BinaryMask:
    """Per-pixel HSV box test on Pillow's 0-255 HSV scale."""
    hsv = np.asarray(Image.fromarray(np.asarray(image.pixels)).convert("HSV"), dtype=np.uint8)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    inside = (
        _hue_in(h, *thresholds.hue)
        & (s >= thresholds.saturation[0])
        & (s <= thresholds.saturation[1])
        & (v >= thresholds.value[0])
        & (v <= thresholds.value[1])
    )
    return BinaryMask(inside)


def baseline_detect(image: RgbImage, thresholds: HsvThresholds) -> BinaryMask:
    """HSV threshold followed by an opening with disk(1) to drop speckle.

    The opening runs on an edge-replicated copy so detections touching the frame survive.
    """
    raw = threshold_hsv(image, thresholds).bits
    se = make_se(SeShape.DISK, 1)
    padded = np.pad(raw, 1, mode="edge")
    opened = dilate_bits(erode_bits(padded, se), se)
    return BinaryMask(opened[1:-1, 1:-1])


def _write_item(
    out_dir: Path, index: int, seed: int, synth: SynthSpec, degrade: DegradeSpec
) -> CorpusItem:
    image, truth = synth_generate(synth.model_copy(update={"seed": seed + index}))
    coarse = degrade_mask(truth, degrade.model_copy(update={"seed": seed + index}))
    item = CorpusItem(
        index=index,
        scene=f"scene_{index:04d}.png",
        truth=f"truth_{index:04d}.png",
        coarse=f"coarse_{index:04d}.png",
    )
    logger.debug("writing corpus item %d (seed %d)", index, seed + index)
    save_image(image, out_dir / item.scene)
    save_mask(truth, out_dir / item.truth)
    save_mask(coarse, out_dir / item.coarse)
    return item


def write_corpus(
    out_dir: Path,
    count: int,
    seed: int,
    synth: SynthSpec,
    degrade: DegradeSpec,
    workers: int = 1,
) -> CorpusManifest:
    """Write *count* scene/truth/coarse PNG triples and manifest.json; item i uses seed + i."""
    out_dir.mkdir(parents=True, exist_ok=True)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        items = list(
            pool.map(lambda i: _write_item(out_dir, i, seed, synth, degrade), range(count))
        )
    manifest = CorpusManifest(seed=seed, count=count, synth=synth, degrade=degrade, items=items)
    (out_dir / MANIFEST_NAME).write_text(manifest.model_dump_json(indent=2) + "\n")
    logger.info("wrote %d synthetic samples to %s", count, out_dir)
    return manifest
