"""Projection of watershed segments onto the high-confidence core, and final assembly."""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from src.services.raster import BinaryMask
from src.services.regions import Region, RegionPartition, Window
from src.services.watershed import SegmentMap


@dataclass(frozen=True, eq=False)
class RefinedRegion:
    region_id: int
    window: Window
    accepted: frozenset[int]
    accepted_pixels: BinaryMask
    final: BinaryMask


def project_segments(segments: SegmentMap, partition: RegionPartition) -> RefinedRegion:
    """Accept every segment that shares at least one pixel with R_j^T.

    The final region is R_j^T ∪ R_j^(a), so high-confidence pixels always survive.
    """
    if segments.labels.shape != partition.true_fg.shape or not np.array_equal(
        segments.labels > 0, partition.extended_mask.bits
    ):
        raise ValueError("segment domain must equal R^T ∪ R^F+ of the partition")
    touched = np.unique(segments.labels[partition.true_fg.bits])
    accepted = touched[touched > 0]
    accepted_bits = np.isin(segments.labels, accepted)
    return RefinedRegion(
        region_id=partition.region.id,
        window=partition.window,
        accepted=frozenset(int(s) for s in accepted),
        accepted_pixels=BinaryMask(accepted_bits),
        final=BinaryMask(accepted_bits | partition.true_fg.bits),
    )


def assemble_final_mask(
    refined: Sequence[RefinedRegion],
    passthrough: Sequence[Region],
    width: int,
    height: int,
) -> BinaryMask:
    """Union of every refined region's final pixels and every pass-through region."""
    bits = np.zeros((height, width), dtype=bool)
    for r in refined:
        bits[r.window.slices] |= r.final.bits
    for region in passthrough:
        bits[region.bbox.slices] |= region.local.bits
    return BinaryMask(bits)
