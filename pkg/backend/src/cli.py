"""Command-line entry point: refine, evaluate, synth, split, overlay.

Exit codes: 0 ok, 2 usage or shape error, 3 I/O or decode error.
"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from src.config import load_environment, load_pipeline_config, log_level, read_json
from src.schemas.config import PipelineConfig
from src.schemas.report import CorpusManifest, EvaluatedImage, EvaluationReport, RunReport
from src.schemas.synth import DegradeSpec, HsvThresholds, SynthSpec
from src.services.metrics import aggregate, evaluate, split_dataset
from src.services.morphology import mask_contour
from src.services.pipeline import RefineJob, partition_all, run_batch, run_job, with_aggregates
from src.services.raster import (
    RasterError,
    ZoneKind,
    load_image,
    load_mask,
    render_overlay,
    require_same_shape,
    save_image,
)
from src.services.regions import zone_masks
from src.services.reporting import write_json
from src.services.synth import write_corpus

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class UsageError(Exception):
    """Raised when arguments are individually valid but inconsistent."""


def _config(args: argparse.Namespace) -> PipelineConfig:
    overrides: dict[str, Any] = {
        "erosion_radius": args.erosion_radius,
        "dilation_radius": args.dilation_radius,
        "se_shape": args.se_shape,
        "smooth_gradient": args.smooth_gradient,
        "mask_threshold": args.mask_threshold,
        "workers": args.workers,
        "overlay_path": getattr(args, "overlay", None),
        "report_path": getattr(args, "report", None),
    }
    return load_pipeline_config(args.config, overrides)


def _seed(args: argparse.Namespace) -> int:
    return load_pipeline_config(args.config, {"seed": args.seed}).seed


def _batch_jobs(args: argparse.Namespace, config: PipelineConfig) -> list[RefineJob]:
    image_dir: Path = args.image
    mask_dir: Path | None = None if args.detect else args.mask
    if not args.detect and (mask_dir is None or not mask_dir.is_dir()):
        raise UsageError("batch refine needs a mask directory next to the image directory")
    args.out.mkdir(parents=True, exist_ok=True)
    if config.overlay_path is not None:
        config.overlay_path.mkdir(parents=True, exist_ok=True)
    jobs = []
    for image_path in sorted(image_dir.glob("*.png")):
        name = image_path.name
        jobs.append(
            RefineJob(
                name=name,
                image=image_path,
                coarse=mask_dir / name if mask_dir else None,
                out=args.out / name,
                truth=args.truth / name if args.truth else None,
                overlay=config.overlay_path / name if config.overlay_path else None,
            )
        )
    return jobs


def cmd_refine(args: argparse.Namespace) -> int:
    config = _config(args)
    if args.image.is_dir():
        jobs = _batch_jobs(args, config)
        report = run_batch(jobs, config)
        logger.info("batch done: %d refined, %d failed", len(report.images), len(report.failures))
    else:
        if args.mask is None and not args.detect:
            raise UsageError("a coarse mask is required unless --detect is given")
        job = RefineJob(
            name=args.image.name,
            image=args.image,
            coarse=None if args.detect else args.mask,
            out=args.out,
            truth=args.truth,
            overlay=config.overlay_path,
        )
        report = with_aggregates(RunReport(images=[run_job(job, config, HsvThresholds())]))
    write_json(report, config.report_path)
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    preds: list[Path] = args.pred
    truths: list[Path] = args.truth
    if len(preds) != len(truths):
        raise UsageError(f"got {len(preds)} predictions but {len(truths)} truth masks")
    if not preds:
        raise UsageError("nothing to evaluate")
    images = []
    for pred_path, truth_path in zip(preds, truths, strict=True):
        pred = load_mask(pred_path, args.mask_threshold)
        truth = load_mask(truth_path, args.mask_threshold)
        images.append(
            EvaluatedImage(
                prediction=pred_path.name, truth=truth_path.name, metrics=evaluate(pred, truth)
            )
        )
    report = EvaluationReport(images=images, aggregate=aggregate([i.metrics for i in images]))
    write_json(report, args.report)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    specs: dict[str, Any] = read_json(args.spec) if args.spec else {}
    synth = SynthSpec.model_validate(specs.get("synth", {}))
    degrade = DegradeSpec.model_validate(specs.get("degrade", {}))
    write_corpus(args.out_dir, args.count, _seed(args), synth, degrade, workers=args.workers)
    return EXIT_OK


def cmd_split(args: argparse.Namespace) -> int:
    manifest = read_json(args.manifest)
    if isinstance(manifest, dict):
        items = [item.scene for item in CorpusManifest.model_validate(manifest).items]
    elif isinstance(manifest, list):
        items = [str(item) for item in manifest]
    else:
        raise UsageError(f"{args.manifest} holds neither a corpus manifest nor a list")
    write_json(split_dataset(items, _seed(args)), args.report)
    return EXIT_OK


def cmd_overlay(args: argparse.Namespace) -> int:
    config = _config(args)
    image = load_image(args.image)
    coarse = load_mask(args.mask, config.mask_threshold)
    require_same_shape(image, coarse)
    partitions = partition_all(coarse, config)
    true_fg, fuzzy = zone_masks(partitions, image.width, image.height)
    zones = [(true_fg, ZoneKind.TRUE_FOREGROUND), (fuzzy, ZoneKind.FUZZY)]
    if args.refined is not None:
        refined = load_mask(args.refined, config.mask_threshold)
        zones.append((mask_contour(refined), ZoneKind.REFINED_CONTOUR))
    save_image(render_overlay(image, zones, config.overlay), args.out)
    logger.info("overlay of %d regions written to %s", len(partitions), args.out)
    return EXIT_OK


def _pipeline_flags() -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--config", type=Path, default=None, help="JSON pipeline config")
    flags.add_argument("--erosion-radius", type=int, default=None, help="R^T erosion")
    flags.add_argument("--dilation-radius", type=int, default=None, help="R^F+ dilation")
    flags.add_argument("--se-shape", choices=["disk", "square", "cross"], default=None)
    flags.add_argument(
        "--no-smooth-gradient",
        dest="smooth_gradient",
        action="store_const",
        const=False,
        default=None,
        help="skip the 3x3 box filter on the watershed gradient",
    )
    flags.add_argument("--mask-threshold", type=int, default=None, help="luma cut (default 128)")
    flags.add_argument("--workers", type=int, default=None, help="threads for batch refine")
    return flags


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrosion-refine",
        description="Refine coarse corrosion masks by projecting watershed colour segments.",
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default INFO)")
    sub = parser.add_subparsers(dest="command", required=True)
    flags = _pipeline_flags()

    refine = sub.add_parser("refine", parents=[flags], help="refine one image or a directory pair")
    refine.add_argument("image", type=Path, help="scene PNG, or a directory of scenes")
    refine.add_argument("mask", type=Path, nargs="?", help="coarse mask PNG or directory")
    refine.add_argument("--out", type=Path, required=True, help="refined mask PNG or directory")
    refine.add_argument("--truth", type=Path, default=None, help="ground truth PNG or directory")
    refine.add_argument("--overlay", type=Path, default=None, help="overlay PNG or directory")
    refine.add_argument("--report", type=Path, default=None, help="RunReport JSON (default stdout)")
    refine.add_argument(
        "--detect", action="store_true", help="use the HSV baseline detector as the coarse mask"
    )
    refine.set_defaults(handler=cmd_refine)

    ev = sub.add_parser("evaluate", help="pixel metrics of predictions against ground truth")
    ev.add_argument("--pred", type=Path, nargs="+", required=True)
    ev.add_argument("--truth", type=Path, nargs="+", required=True)
    ev.add_argument("--mask-threshold", type=int, default=128)
    ev.add_argument("--report", type=Path, default=None)
    ev.set_defaults(handler=cmd_evaluate)

    synth = sub.add_parser("synth", help="write a synthetic scene/truth/coarse corpus")
    synth.add_argument("--out-dir", type=Path, required=True)
    synth.add_argument("--count", type=int, default=50)
    synth.add_argument("--seed", type=int, default=None, help="default: seed from the config")
    synth.add_argument("--config", type=Path, default=None, help="JSON pipeline config")
    synth.add_argument("--spec", type=Path, default=None, help="JSON synth and degrade specs")
    synth.add_argument("--workers", type=int, default=1)
    synth.set_defaults(handler=cmd_synth)

    split = sub.add_parser("split", help="80/20 then 75/25 train/val/test split")
    split.add_argument("manifest", type=Path, help="corpus manifest.json or a JSON list")
    split.add_argument("--seed", type=int, default=None, help="default: seed from the config")
    split.add_argument("--config", type=Path, default=None, help="JSON pipeline config")
    split.add_argument("--report", type=Path, default=None)
    split.set_defaults(handler=cmd_split)

    overlay = sub.add_parser("overlay", parents=[flags], help="render R^T / R^F+ zones")
    overlay.add_argument("image", type=Path)
    overlay.add_argument("mask", type=Path)
    overlay.add_argument("--out", type=Path, required=True)
    overlay.add_argument("--refined", type=Path, default=None, help="refined mask to outline")
    overlay.set_defaults(handler=cmd_overlay)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    load_environment()
    parser = build_parser()
    args = parser.parse_args(argv)
    level = log_level(args.log_level)
    if level not in logging.getLevelNamesMapping():
        parser.error(f"unknown log level {level!r}")
    logging.basicConfig(level=level, format=_LOG_FORMAT, datefmt="%H:%M:%S", stream=sys.stderr)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (RasterError, OSError) as exc:
        logger.error("%s", exc, exc_info=logger.isEnabledFor(logging.DEBUG))
        return EXIT_IO
    except (UsageError, ValueError) as exc:
        logger.error("%s", exc, exc_info=logger.isEnabledFor(logging.DEBUG))
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
