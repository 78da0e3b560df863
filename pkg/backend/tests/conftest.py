"""Shared pytest fixtures."""

from pathlib import Path

import numpy as np
import pytest

from src.schemas.config import PipelineConfig
from src.services.raster import BinaryMask, RgbImage, save_image, save_mask


@pytest.fixture()
def rng() -> np.random.Generator:
    """Seeded generator so property loops are reproducible."""
    return np.random.default_rng(20240611)


@pytest.fixture()
def config() -> PipelineConfig:
    return PipelineConfig()


@pytest.fixture()
def write_pair(tmp_path: Path):  # type: ignore[no-untyped-def]
    """Write an image and mask to tmp_path and return their paths."""

    def _write(image: RgbImage, mask: BinaryMask, stem: str = "case") -> tuple[Path, Path]:
        image_path = tmp_path / f"{stem}_image.png"
        mask_path = tmp_path / f"{stem}_mask.png"
        save_image(image, image_path)
        save_mask(mask, mask_path)
        return image_path, mask_path

    return _write
