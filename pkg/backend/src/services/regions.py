"""Connected detection regions and their true-foreground / fuzzy partitions."""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numpy.typing as npt
from scipy import ndimage

from src.services.morphology import SeShape, dilate_bits, erode_bits, make_se
from src.services.raster import BinaryMask, PixelCoord

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


class Window(NamedTuple):
    """Half-open pixel rectangle [top, bottom) x [left, right) of a source raster."""

    top: int
    left: int
    bottom: int
    right: int

    @property
    def slices(self) -> tuple[slice, slice]:
        return slice(self.top, self.bottom), slice(self.left, self.right)

    @property
    def width(self) -> int:
        return self.right - self.left

    @property
    def height(self) -> int:
        return self.bottom - self.top

    def expand(self, pad: int, width: int, height: int) -> Window:
        return Window(
            max(self.top - pad, 0),
            max(self.left - pad, 0),
            min(self.bottom + pad, height),
            min(self.right + pad, width),
        )

    def within(self, outer: Window) -> tuple[slice, slice]:
        """Slices selecting this window inside *outer*, which must contain it."""
        top, left = self.top - outer.top, self.left - outer.left
        return slice(top, top + self.height), slice(left, left + self.width)


def label_components(bits: npt.NDArray[np.bool_]) -> tuple[npt.NDArray[np.int32], int]:
    """8-connected labels 1..n, numbered in raster order of each component's first pixel."""
    labels, n = ndimage.label(bits, structure=_EIGHT_CONNECTED)
    if n == 0:
        return labels.astype(np.int32), 0
    flat = labels.ravel()
    ids, first = np.unique(flat, return_index=True)
    keep = ids != 0
    ids, first = ids[keep], first[keep]
    remap = np.zeros(n + 1, dtype=np.int32)
    remap[ids[np.argsort(first, kind="stable")]] = np.arange(1, n + 1, dtype=np.int32)
    return remap[labels], int(n)


@dataclass(frozen=True, eq=False)
class Region:
    """One maximal 8-connected detection R_j, stored as a mask over its bounding box."""

    id: int
    bbox: Window
    local: BinaryMask
    frame_width: int
    frame_height: int

    @property
    def area(self) -> int:
        """m_j, the number of pixels in the region."""
        return self.local.count()

    def pixels(self) -> Iterator[PixelCoord]:
        for p in self.local.coords():
            yield PixelCoord(p.x + self.bbox.left, p.y + self.bbox.top)

    def bits_in(self, window: Window) -> npt.NDArray[np.bool_]:
        """Region mask cropped to *window*, which must contain the bounding box."""
        out = np.zeros((window.height, window.width), dtype=bool)
        out[self.bbox.within(window)] = self.local.bits
        return out


@dataclass(frozen=True, eq=False)
class RegionSet:
    regions: tuple[Region, ...]
    width: int
    height: int

    def __len__(self) -> int:
        return len(self.regions)

    def __iter__(self) -> Iterator[Region]:
        return iter(self.regions)

    def union(self) -> BinaryMask:
        bits = np.zeros((self.height, self.width), dtype=bool)
        for region in self.regions:
            bits[region.bbox.slices] |= region.local.bits
        return BinaryMask(bits)

    @property
    def background(self) -> BinaryMask:
        """R^B: every pixel outside all regions."""
        return ~self.union()


@dataclass(frozen=True, eq=False)
class RegionPartition:
    """R_j^T, R_j^F and R_j^F+ as masks over a shared window of the source raster."""

    region: Region
    window: Window
    true_fg: BinaryMask
    fuzzy: BinaryMask
    extended_fuzzy: BinaryMask

    @property
    def degenerate(self) -> bool:
        """True when erosion left no high-confidence core."""
        return not self.true_fg.any()

    @property
    def extended_mask(self) -> BinaryMask:
        """R_j^T ∪ R_j^F+, the watershed domain."""
        return self.true_fg | self.extended_fuzzy

    def region_bits(self) -> npt.NDArray[np.bool_]:
        return self.region.bits_in(self.window)


def zone_masks(
    partitions: Iterable[RegionPartition], width: int, height: int
) -> tuple[BinaryMask, BinaryMask]:
    """Full-frame unions of every partition's R^T and R^F+."""
    true_fg = np.zeros((height, width), dtype=bool)
    fuzzy = np.zeros((height, width), dtype=bool)
    for p in partitions:
        true_fg[p.window.slices] |= p.true_fg.bits
        fuzzy[p.window.slices] |= p.extended_fuzzy.bits
    return BinaryMask(true_fg), BinaryMask(fuzzy)


def extract_regions(mask: BinaryMask) -> RegionSet:
    labels, n = label_components(mask.bits)
    regions: list[Region] = []
    for j, found in enumerate(ndimage.find_objects(labels), start=1):
        if found is None:
            continue
        rows, cols = found
        bbox = Window(rows.start, cols.start, rows.stop, cols.stop)
        regions.append(
            Region(
                id=j,
                bbox=bbox,
                local=BinaryMask(labels[rows, cols] == j),
                frame_width=mask.width,
                frame_height=mask.height,
            )
        )
    return RegionSet(regions=tuple(regions), width=mask.width, height=mask.height)


def partition_region(
    region: Region,
    erosion_radius: int,
    dilation_radius: int,
    shape: SeShape = SeShape.DISK,
) -> RegionPartition:
    """R^T = erode(R), R^F = R minus R^T, R^F+ = dilate(R) minus R^T.

    Both operators run on the region's own mask, so neighbouring regions never
    bleed into each other's bands.
    """
    if erosion_radius < 0 or dilation_radius < 0:
        raise ValueError("radii must be >= 0")
    window = region.bbox.expand(dilation_radius, region.frame_width, region.frame_height)
    bits = region.bits_in(window)
    true_fg = erode_bits(bits, make_se(shape, erosion_radius))
    extended = dilate_bits(bits, make_se(shape, dilation_radius))
    return RegionPartition(
        region=region,
        window=window,
        true_fg=BinaryMask(true_fg),
        fuzzy=BinaryMask(bits & ~true_fg),
        extended_fuzzy=BinaryMask(extended & ~true_fg),
    )
