"""Marker-based watershed colour segmentation over a region's extended mask."""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from numba import njit
from scipy import ndimage

from src.services.raster import BinaryMask, RgbImage, require_same_shape
from src.services.regions import RegionPartition, label_components

logger = logging.getLogger(__name__)

# 8-neighbourhood in raster order; the flood visits neighbours in this order.
_NEIGHBOUR_DY = np.array([-1, -1, -1, 0, 0, 1, 1, 1], dtype=np.int64)
_NEIGHBOUR_DX = np.array([-1, 0, 1, -1, 1, -1, 0, 1], dtype=np.int64)

# One pixel for the Sobel kernel, one for the box filter.
_GRADIENT_HALO = 2
_BOX_3X3 = np.full((3, 3), 1.0 / 9.0)


class DegeneratePartitionError(Exception):
    """Raised when a partition has no true foreground to segment against."""


@dataclass(frozen=True, eq=False)
class GradientField:
    values: npt.NDArray[np.float64]
    domain: BinaryMask

    def __post_init__(self) -> None:
        if self.values.shape != self.domain.shape:
            raise ValueError("gradient values and domain must share a shape")

    @property
    def width(self) -> int:
        return self.domain.width

    @property
    def height(self) -> int:
        return self.domain.height


@dataclass(frozen=True, eq=False)
class SegmentMap:
    """Labels 1..count on domain pixels, 0 elsewhere."""

    labels: npt.NDArray[np.int32]
    count: int

    @property
    def domain(self) -> BinaryMask:
        return BinaryMask(self.labels > 0)


def color_gradient(image: RgbImage, domain: BinaryMask, *, smooth: bool = False) -> GradientField:
    """Channel-wise max of the Sobel magnitude with replicate padding.

    With *smooth*, the magnitude is passed through a 3x3 box filter before it is
    restricted to the domain.
    """
    require_same_shape(image, domain)
    channels = image.pixels.astype(np.float64)
    magnitude = np.zeros(domain.shape, dtype=np.float64)
    for c in range(3):
        gx = ndimage.sobel(channels[:, :, c], axis=1, mode="nearest")
        gy = ndimage.sobel(channels[:, :, c], axis=0, mode="nearest")
        np.maximum(magnitude, np.hypot(gx, gy), out=magnitude)
    if smooth:
        magnitude = ndimage.correlate(magnitude, _BOX_3X3, mode="nearest")
    return GradientField(values=np.where(domain.bits, magnitude, 0.0), domain=domain)


def find_markers(gradient: GradientField) -> SegmentMap:
    """Seeds are 8-connected plateaus of pixels equal to their in-domain neighbourhood minimum."""
    inside = gradient.domain.bits
    values = np.where(inside, gradient.values, np.inf)
    neighbourhood_min = ndimage.minimum_filter(values, size=3, mode="constant", cval=np.inf)
    labels, n = label_components(inside & (values == neighbourhood_min))
    return SegmentMap(labels=labels, count=n)


@njit(cache=True, nogil=True)  # type: ignore[misc]
def _priority_flood(
    values: npt.NDArray[np.float64],
    inside: npt.NDArray[np.bool_],
    labels: npt.NDArray[np.int32],
    width: int,
    seeds: npt.NDArray[np.int64],
    dy: npt.NDArray[np.int64],
    dx: npt.NDArray[np.int64],
) -> None:
    # Flat raster-order arrays; labels is filled in place.
    height = labels.shape[0] // width
    # Entries are (value, insertion sequence, flat index); the sequence breaks ties.
    heap = [(values[seeds[0]], np.int64(0), seeds[0])]
    seq = np.int64(1)
    for k in range(1, seeds.shape[0]):
        heapq.heappush(heap, (values[seeds[k]], seq, seeds[k]))
        seq += 1
    while len(heap) > 0:
        _, _, index = heapq.heappop(heap)
        y = index // width
        x = index % width
        label = labels[index]
        for k in range(8):
            ny = y + dy[k]
            nx = x + dx[k]
            if ny < 0 or ny >= height or nx < 0 or nx >= width:
                continue
            neighbour = ny * width + nx
            if not inside[neighbour] or labels[neighbour] != 0:
                continue
            # Every queued copy of a pixel shares its key, so the first push wins.
            labels[neighbour] = label
            heapq.heappush(heap, (values[neighbour], seq, neighbour))
            seq += 1


def watershed_flood(gradient: GradientField, markers: SegmentMap) -> SegmentMap:
    """Priority-flood from the markers until every domain pixel carries a basin label.

    Keys are (gradient value, insertion sequence); no watershed-line pixels are left.
    """
    if markers.labels.shape != gradient.values.shape:
        raise ValueError("markers and gradient must share a shape")
    inside = np.ascontiguousarray(gradient.domain.bits)
    if np.any((markers.labels > 0) & ~inside):
        raise ValueError("markers must lie inside the gradient domain")
    seeds = np.flatnonzero(markers.labels).astype(np.int64)
    if seeds.size == 0:
        raise ValueError("at least one marker is required")

    labels = np.array(markers.labels, dtype=np.int32, copy=True, order="C")
    values = np.ascontiguousarray(gradient.values, dtype=np.float64)
    _priority_flood(
        values.reshape(-1),
        inside.reshape(-1),
        labels.reshape(-1),
        gradient.width,
        seeds,
        _NEIGHBOUR_DY,
        _NEIGHBOUR_DX,
    )
    if np.any(inside & (labels == 0)):
        raise ValueError("a domain component has no marker")
    return SegmentMap(labels=labels, count=markers.count)


def region_gradient(
    image: RgbImage, partition: RegionPartition, *, smooth: bool = True
) -> GradientField:
    """color_gradient over the partition's window, equal to the full-image gradient there.

    The crop carries a halo of _GRADIENT_HALO pixels, clipped to the image, so the
    replicate padding only applies at the image border.
    """
    halo = partition.window.expand(_GRADIENT_HALO, image.width, image.height)
    inner = partition.window.within(halo)
    domain = partition.extended_mask
    halo_domain = np.zeros((halo.height, halo.width), dtype=bool)
    halo_domain[inner] = domain.bits
    rows, cols = halo.slices
    field = color_gradient(image.crop(rows, cols), BinaryMask(halo_domain), smooth=smooth)
    return GradientField(values=np.ascontiguousarray(field.values[inner]), domain=domain)


def segment_extended_region(
    image: RgbImage, partition: RegionPartition, *, smooth: bool = True
) -> SegmentMap:
    """Watershed segments s_ij over R_j^T ∪ R_j^F+, in the partition's window coordinates."""
    if partition.degenerate:
        raise DegeneratePartitionError(f"region {partition.region.id} has an empty true foreground")
    gradient = region_gradient(image, partition, smooth=smooth)
    markers = find_markers(gradient)
    segments = watershed_flood(gradient, markers)
    logger.debug(
        "region %d: %d segments over %d px",
        partition.region.id,
        segments.count,
        gradient.domain.count(),
    )
    return segments
