"""Regenerate the committed golden refinement case.

Writes a 64x64 synthetic scene, its degraded coarse mask, the refined mask, the
timing-free RunReport and the EvaluationReport of the coarse and refined masks into
tests/golden/. The determinism tests compare fresh runs against these files byte for
byte, so only rerun this after an intentional change to the pipeline's output.

Usage:
    uv run python scripts/freeze_golden.py [--out-dir tests/golden] [--seed 7]
"""

import argparse
import logging
import sys
from pathlib import Path

_BACKEND_DIR = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(_BACKEND_DIR))

from src.schemas.config import PipelineConfig  # noqa: E402
from src.schemas.report import EvaluatedImage, EvaluationReport, RunReport  # noqa: E402
from src.schemas.synth import DegradeSpec, SynthSpec  # noqa: E402
from src.services.metrics import aggregate, evaluate  # noqa: E402
from src.services.pipeline import RefineJob, run_job, with_aggregates  # noqa: E402
from src.services.raster import load_mask, save_image, save_mask  # noqa: E402
from src.services.reporting import to_json  # noqa: E402
from src.services.synth import degrade_mask, synth_generate  # noqa: E402

logger = logging.getLogger("freeze_golden")

GOLDEN_SIZE = 64


def golden_specs(seed: int) -> tuple[SynthSpec, DegradeSpec]:
    synth = SynthSpec(
        width=GOLDEN_SIZE, height=GOLDEN_SIZE, blob_count=(1, 3), blob_scale=(10, 24), seed=seed
    )
    return synth, DegradeSpec(jitter=2, downscale=4, seed=seed)


def freeze(out_dir: Path, seed: int) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    synth, degrade = golden_specs(seed)
    image, truth = synth_generate(synth)
    coarse = degrade_mask(truth, degrade)
    save_image(image, out_dir / "scene.png")
    save_mask(truth, out_dir / "truth.png")
    save_mask(coarse, out_dir / "coarse.png")

    job = RefineJob(
        name="scene.png",
        image=out_dir / "scene.png",
        coarse=out_dir / "coarse.png",
        out=out_dir / "refined.png",
        truth=out_dir / "truth.png",
    )
    report = with_aggregates(RunReport(images=[run_job(job, PipelineConfig())]))
    (out_dir / "report.json").write_text(to_json(report, timings=False))

    # Same pairing as `evaluate --pred coarse.png refined.png --truth truth.png truth.png`.
    truth_mask = load_mask(out_dir / "truth.png")
    images = [
        EvaluatedImage(
            prediction=name,
            truth="truth.png",
            metrics=evaluate(load_mask(out_dir / name), truth_mask),
        )
        for name in ("coarse.png", "refined.png")
    ]
    evaluation = EvaluationReport(images=images, aggregate=aggregate([i.metrics for i in images]))
    (out_dir / "evaluate.json").write_text(to_json(evaluation))
    logger.info("golden case written to %s", out_dir)


def main() -> None:
    parser = argparse.ArgumentParser(description="Regenerate the golden refinement case.")
    parser.add_argument("--out-dir", type=Path, default=_BACKEND_DIR / "tests" / "golden")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    freeze(args.out_dir, args.seed)


if __name__ == "__main__":
    main()
