"""Raster types, PNG I/O and overlay rendering."""

from __future__ import annotations

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from PIL import Image, UnidentifiedImageError

from src.schemas.config import OverlaySpec

logger = logging.getLogger(__name__)

# Pillow modes that decode to 8 bits per channel.
_EIGHT_BIT_MODES = {"1", "L", "LA", "P", "PA", "RGB", "RGBA"}


class RasterError(Exception):
    """Base class for raster file failures."""


class RasterNotFoundError(RasterError):
    """Raised when a raster path does not exist."""


class UnsupportedRasterError(RasterError):
    """Raised when a file is not a PNG or not 8 bits per channel."""


class RasterDecodeError(RasterError):
    """Raised when a PNG is truncated or corrupt."""


class DimensionMismatchError(ValueError):
    """Raised when rasters that must share a shape do not."""


class PixelCoord(NamedTuple):
    x: int
    y: int


def _frozen(array: npt.NDArray[np.generic]) -> npt.NDArray[np.generic]:
    out = np.ascontiguousarray(array)
    if out is array:
        out = array.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class RgbImage:
    """8-bit RGB raster, shape (height, width, 3)."""

    pixels: npt.NDArray[np.uint8]

    def __post_init__(self) -> None:
        p = self.pixels
        if p.ndim != 3 or p.shape[2] != 3 or p.dtype != np.uint8:
            raise ValueError(f"expected (h, w, 3) uint8 pixels, got {p.shape} {p.dtype}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        object.__setattr__(self, "pixels", _frozen(p))

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    def crop(self, rows: slice, cols: slice) -> RgbImage:
        return RgbImage(self.pixels[rows, cols])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RgbImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Boolean raster, shape (height, width). Also used for window-local pixel sets."""

    bits: npt.NDArray[np.bool_]

    def __post_init__(self) -> None:
        b = self.bits
        if b.ndim != 2:
            raise ValueError(f"expected a 2-D mask, got shape {b.shape}")
        if b.dtype != np.bool_:
            b = b.astype(bool)
        object.__setattr__(self, "bits", _frozen(b))

    @classmethod
    def empty(cls, width: int, height: int) -> BinaryMask:
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def full(cls, width: int, height: int) -> BinaryMask:
        return cls(np.ones((height, width), dtype=bool))

    @classmethod
    def from_coords(cls, width: int, height: int, coords: Sequence[PixelCoord]) -> BinaryMask:
        bits = np.zeros((height, width), dtype=bool)
        for x, y in coords:
            bits[y, x] = True
        return cls(bits)

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def any(self) -> bool:
        return bool(self.bits.any())

    def coords(self) -> Iterator[PixelCoord]:
        """Foreground pixels in raster order."""
        ys, xs = np.nonzero(self.bits)
        for y, x in zip(ys.tolist(), xs.tolist(), strict=True):
            yield PixelCoord(x, y)

    def issubset(self, other: BinaryMask) -> bool:
        require_same_shape(self, other)
        return not bool(np.any(self.bits & ~other.bits))

    def isdisjoint(self, other: BinaryMask) -> bool:
        require_same_shape(self, other)
        return not bool(np.any(self.bits & other.bits))

    def __or__(self, other: BinaryMask) -> BinaryMask:
        require_same_shape(self, other)
        return BinaryMask(self.bits | other.bits)

    def __and__(self, other: BinaryMask) -> BinaryMask:
        require_same_shape(self, other)
        return BinaryMask(self.bits & other.bits)

    def __sub__(self, other: BinaryMask) -> BinaryMask:
        require_same_shape(self, other)
        return BinaryMask(self.bits & ~other.bits)

    def __xor__(self, other: BinaryMask) -> BinaryMask:
        require_same_shape(self, other)
        return BinaryMask(self.bits ^ other.bits)

    def __invert__(self) -> BinaryMask:
        return BinaryMask(~self.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    __hash__ = None  # type: ignore[assignment]


class ZoneKind(Enum):
    TRUE_FOREGROUND = "true_foreground"
    FUZZY = "fuzzy"
    REFINED_CONTOUR = "refined_contour"


def require_same_shape(a: RgbImage | BinaryMask, b: RgbImage | BinaryMask) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise DimensionMismatchError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def luma(rgb: npt.NDArray[np.uint8]) -> npt.NDArray[np.int64]:
    """round(0.299r + 0.587g + 0.114b) with halves rounded up, in integer arithmetic."""
    c = rgb.astype(np.int64)
    return (299 * c[..., 0] + 587 * c[..., 1] + 114 * c[..., 2] + 500) // 1000


def _open_png(path: Path) -> Image.Image:
    if not path.exists():
        raise RasterNotFoundError(f"no such file: {path}")
    try:
        img = Image.open(path)
    except UnidentifiedImageError as exc:
        raise UnsupportedRasterError(f"{path} is not a recognised image") from exc
    except OSError as exc:
        raise RasterDecodeError(f"cannot read {path}: {exc}") from exc
    if img.format != "PNG":
        img.close()
        raise UnsupportedRasterError(f"{path} is {img.format}, only PNG is supported")
    if img.mode not in _EIGHT_BIT_MODES:
        img.close()
        raise UnsupportedRasterError(f"{path} has unsupported mode {img.mode} (need 8-bit)")
    try:
        img.load()
    except (OSError, SyntaxError, ValueError) as exc:
        img.close()
        raise RasterDecodeError(f"cannot decode {path}: {exc}") from exc
    return img


def _to_rgb_array(img: Image.Image) -> npt.NDArray[np.uint8]:
    if img.mode in ("1", "L"):
        gray = np.asarray(img.convert("L"), dtype=np.uint8)
        return np.repeat(gray[:, :, None], 3, axis=2)
    return np.asarray(img.convert("RGB"), dtype=np.uint8)


def load_image(path: Path) -> RgbImage:
    """Decode an 8-bit PNG into an RgbImage; grayscale is expanded to three channels."""
    with _open_png(Path(path)) as img:
        logger.debug("decoding %s (%s, %dx%d)", path, img.mode, img.width, img.height)
        return RgbImage(_to_rgb_array(img))


def load_mask(path: Path, threshold: int = 128) -> BinaryMask:
    """Decode a PNG mask; a pixel is foreground iff its luma is >= *threshold*."""
    with _open_png(Path(path)) as img:
        if img.mode in ("1", "L", "LA"):
            values = np.asarray(img.convert("L"), dtype=np.int64)
        else:
            values = luma(np.asarray(img.convert("RGB"), dtype=np.uint8))
    return BinaryMask(values >= threshold)


def save_mask(mask: BinaryMask, path: Path) -> None:
    """Write an 8-bit grayscale PNG: foreground 255, background 0."""
    data = np.where(mask.bits, np.uint8(255), np.uint8(0)).astype(np.uint8)
    Image.fromarray(data).save(Path(path), format="PNG")


def save_image(image: RgbImage, path: Path) -> None:
    Image.fromarray(np.asarray(image.pixels)).save(Path(path), format="PNG")


def render_overlay(
    image: RgbImage,
    zones: Sequence[tuple[BinaryMask, ZoneKind]],
    spec: OverlaySpec,
) -> RgbImage:
    """Alpha-blend zone colors over *image*; later zones paint over earlier ones.

    Each channel becomes round_half_up(alpha * zone + (1 - alpha) * base).
    """
    colors = {
        ZoneKind.TRUE_FOREGROUND: spec.true_foreground,
        ZoneKind.FUZZY: spec.fuzzy,
        ZoneKind.REFINED_CONTOUR: spec.refined_contour,
    }
    for mask, _ in zones:
        require_same_shape(image, mask)

    out = image.pixels.astype(np.float64)
    for mask, kind in zones:
        color = np.asarray(colors[kind], dtype=np.float64)
        blended = np.floor(spec.alpha * color + (1.0 - spec.alpha) * out[mask.bits] + 0.5)
        out[mask.bits] = blended
    return RgbImage(np.clip(out, 0, 255).astype(np.uint8))
