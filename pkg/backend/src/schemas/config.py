"""Pydantic schemas for pipeline configuration."""

from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field

Channel = Annotated[int, Field(ge=0, le=255)]
Rgb = tuple[Channel, Channel, Channel]

SeShapeName = Literal["square", "disk", "cross"]


class OverlaySpec(BaseModel):
    """Zone colors and blend factor for rendered overlays."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    true_foreground: Rgb = (0, 255, 0)
    fuzzy: Rgb = (255, 255, 0)
    refined_contour: Rgb = (0, 0, 255)
    alpha: float = Field(default=0.5, ge=0.0, le=1.0)


class PipelineConfig(BaseModel):
    """Refinement settings. CLI flags override values loaded from a JSON file."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    erosion_radius: int = Field(default=3, ge=0)
    dilation_radius: int = Field(default=3, ge=0)
    se_shape: SeShapeName = "disk"
    smooth_gradient: bool = True
    mask_threshold: int = Field(default=128, ge=1, le=255)
    # synth and split fall back to this when --seed is not given
    seed: int = 0
    workers: int = Field(default=1, ge=1)
    overlay_path: Path | None = None
    report_path: Path | None = None
    overlay: OverlaySpec = Field(default_factory=OverlaySpec)
