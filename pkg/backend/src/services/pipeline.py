"""Refinement pipeline: regions -> partitions -> watershed -> projection -> final mask."""

import logging
import time
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor, as_completed
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

from src.schemas.config import PipelineConfig
from src.schemas.report import ImageFailure, ImageReport, RegionSummary, RunReport
from src.schemas.synth import HsvThresholds
from src.services.metrics import aggregate, evaluate
from src.services.morphology import SeShape, mask_contour
from src.services.projection import RefinedRegion, assemble_final_mask, project_segments
from src.services.raster import (
    BinaryMask,
    RasterError,
    RgbImage,
    ZoneKind,
    load_image,
    load_mask,
    render_overlay,
    require_same_shape,
    save_image,
    save_mask,
)
from src.services.regions import (
    Region,
    RegionPartition,
    extract_regions,
    partition_region,
    zone_masks,
)
from src.services.synth import baseline_detect
from src.services.watershed import segment_extended_region

logger = logging.getLogger(__name__)


@dataclass
class RefinementResult:
    refined: BinaryMask
    partitions: list[RegionPartition]
    refined_regions: list[RefinedRegion]
    passthrough: list[Region]
    summaries: list[RegionSummary]
    timings_ms: dict[str, float] = field(default_factory=dict)

    def zones(self) -> list[tuple[BinaryMask, ZoneKind]]:
        """R^T, R^F+ and the refined contour as full-frame masks, in paint order."""
        true_fg, fuzzy = zone_masks(self.partitions, self.refined.width, self.refined.height)
        return [
            (true_fg, ZoneKind.TRUE_FOREGROUND),
            (fuzzy, ZoneKind.FUZZY),
            (mask_contour(self.refined), ZoneKind.REFINED_CONTOUR),
        ]


@contextmanager
def _stage(timings: dict[str, float], name: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[name] = timings.get(name, 0.0) + (time.perf_counter() - start) * 1000.0


def partition_all(coarse: BinaryMask, config: PipelineConfig) -> list[RegionPartition]:
    shape = SeShape(config.se_shape)
    return [
        partition_region(r, config.erosion_radius, config.dilation_radius, shape)
        for r in extract_regions(coarse)
    ]


def refine_mask(image: RgbImage, coarse: BinaryMask, config: PipelineConfig) -> RefinementResult:
    """Run the full refinement on one image. Degenerate regions pass through unrefined."""
    require_same_shape(image, coarse)
    timings: dict[str, float] = {}
    with _stage(timings, "extract_regions"):
        regions = extract_regions(coarse)
    shape = SeShape(config.se_shape)

    partitions: list[RegionPartition] = []
    refined_regions: list[RefinedRegion] = []
    passthrough: list[Region] = []
    summaries: list[RegionSummary] = []
    for region in regions:
        with _stage(timings, "partition"):
            partition = partition_region(
                region, config.erosion_radius, config.dilation_radius, shape
            )
        partitions.append(partition)
        if partition.degenerate:
            logger.info(
                "region %d degenerate (%d px); passing through unrefined", region.id, region.area
            )
            passthrough.append(region)
            summaries.append(
                RegionSummary(
                    id=region.id, pixels=region.area, segments=0, accepted=0, degenerate=True
                )
            )
            continue
        with _stage(timings, "watershed"):
            segments = segment_extended_region(image, partition, smooth=config.smooth_gradient)
        with _stage(timings, "projection"):
            refined = project_segments(segments, partition)
        refined_regions.append(refined)
        summaries.append(
            RegionSummary(
                id=region.id,
                pixels=region.area,
                segments=segments.count,
                accepted=len(refined.accepted),
                degenerate=False,
            )
        )

    with _stage(timings, "assemble"):
        final = assemble_final_mask(refined_regions, passthrough, coarse.width, coarse.height)
    return RefinementResult(
        refined=final,
        partitions=partitions,
        refined_regions=refined_regions,
        passthrough=passthrough,
        summaries=summaries,
        timings_ms=timings,
    )


@dataclass(frozen=True)
class RefineJob:
    name: str
    image: Path
    coarse: Path | None
    out: Path
    truth: Path | None = None
    overlay: Path | None = None


def run_job(
    job: RefineJob, config: PipelineConfig, thresholds: HsvThresholds | None = None
) -> ImageReport:
    """Load, refine and write one image; returns its report entry.

    A job without a coarse mask path is refined from the HSV baseline detection.
    """
    image = load_image(job.image)
    if job.coarse is None:
        coarse = baseline_detect(image, thresholds or HsvThresholds())
    else:
        coarse = load_mask(job.coarse, config.mask_threshold)
    truth = load_mask(job.truth, config.mask_threshold) if job.truth else None
    if truth is not None:
        require_same_shape(image, truth)

    logger.info("refining %s (%dx%d)", job.name, image.width, image.height)
    result = refine_mask(image, coarse, config)
    save_mask(result.refined, job.out)
    if job.overlay is not None:
        save_image(render_overlay(image, result.zones(), config.overlay), job.overlay)
    logger.info("refined %s: %d regions", job.name, len(result.summaries))

    return ImageReport(
        name=job.name,
        width=image.width,
        height=image.height,
        region_count=len(result.summaries),
        regions=result.summaries,
        before=evaluate(coarse, truth) if truth is not None else None,
        after=evaluate(result.refined, truth) if truth is not None else None,
        timings_ms=result.timings_ms,
    )


def run_batch(jobs: list[RefineJob], config: PipelineConfig) -> RunReport:
    """Refine every job on a pool of config.workers threads.

    Per-image failures are logged and recorded, never fatal.
    """
    reports: dict[str, ImageReport] = {}
    failures: list[ImageFailure] = []
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        futures = {pool.submit(run_job, job, config): job for job in jobs}
        for fut in as_completed(futures):
            job = futures[fut]
            try:
                reports[job.name] = fut.result()
            except (RasterError, OSError, ValueError) as exc:
                logger.exception("refine failed for %s", job.name)
                failures.append(ImageFailure(name=job.name, error=str(exc)))

    images = [reports[job.name] for job in jobs if job.name in reports]
    return with_aggregates(
        RunReport(images=images, failures=sorted(failures, key=lambda f: f.name))
    )


def with_aggregates(run: RunReport) -> RunReport:
    """Attach micro/macro before and after aggregates when ground truth was scored."""
    before = [r.before for r in run.images if r.before is not None]
    after = [r.after for r in run.images if r.after is not None]
    if not before or not after:
        return run
    return run.model_copy(update={"before": aggregate(before), "after": aggregate(after)})
