"""Binary erosion and dilation with explicit structuring elements.

Pixels outside the raster count as background for both operators.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from src.services.raster import BinaryMask


class SeShape(Enum):
    SQUARE = "square"
    DISK = "disk"
    CROSS = "cross"


@dataclass(frozen=True)
class StructuringElement:
    shape: SeShape
    size: int
    offsets: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if (0, 0) not in self.offsets:
            raise ValueError("structuring element must contain the origin")
        if any((-dx, -dy) not in self.offsets for dx, dy in self.offsets):
            raise ValueError("structuring element must be point-symmetric")

    @property
    def radius(self) -> int:
        return max(max(abs(dx), abs(dy)) for dx, dy in self.offsets)

    def footprint(self) -> npt.NDArray[np.bool_]:
        """Centered boolean array of side 2 * radius + 1, indexed [dy, dx]."""
        r = self.radius
        fp = np.zeros((2 * r + 1, 2 * r + 1), dtype=bool)
        for dx, dy in self.offsets:
            fp[dy + r, dx + r] = True
        return fp


def make_se(shape: SeShape | str, size: int) -> StructuringElement:
    if size < 0:
        raise ValueError(f"structuring element size must be >= 0, got {size}")
    shape = SeShape(shape)
    rng = range(-size, size + 1)
    if shape is SeShape.SQUARE:
        offsets = {(dx, dy) for dx in rng for dy in rng}
    elif shape is SeShape.DISK:
        offsets = {(dx, dy) for dx in rng for dy in rng if dx * dx + dy * dy <= size * size}
    else:
        offsets = {(dx, dy) for dx in rng for dy in rng if abs(dx) + abs(dy) <= size}
    return StructuringElement(shape=shape, size=size, offsets=frozenset(offsets))


def erode_bits(bits: npt.NDArray[np.bool_], se: StructuringElement) -> npt.NDArray[np.bool_]:
    if se.radius == 0 or not bits.any():
        return bits.copy()
    out: npt.NDArray[np.bool_] = ndimage.binary_erosion(
        bits, structure=se.footprint(), border_value=0
    )
    return out


def dilate_bits(bits: npt.NDArray[np.bool_], se: StructuringElement) -> npt.NDArray[np.bool_]:
    if se.radius == 0 or not bits.any():
        return bits.copy()
    out: npt.NDArray[np.bool_] = ndimage.binary_dilation(
        bits, structure=se.footprint(), border_value=0
    )
    return out


def erode(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """p is foreground iff every p + offset is in bounds and foreground."""
    return BinaryMask(erode_bits(mask.bits, se))


def dilate(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """p is foreground iff some p + offset is in bounds and foreground."""
    return BinaryMask(dilate_bits(mask.bits, se))


def opening(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    return dilate(erode(mask, se), se)


def mask_contour(mask: BinaryMask) -> BinaryMask:
    """Inner one-pixel boundary of the foreground."""
    return mask - erode(mask, make_se(SeShape.CROSS, 1))
