"""Pydantic schemas for synthetic scenes, mask degradation and the colour baseline."""

from typing import Annotated, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.schemas.config import Channel, Rgb

HueRange = tuple[Channel, Channel]


def _check_range(name: str, lo: float, hi: float) -> None:
    if lo > hi:
        raise ValueError(f"{name} range is empty: [{lo}, {hi}]")


class SynthSpec(BaseModel):
    """Parameters of one synthetic corrosion scene."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    width: int = Field(default=128, ge=32)
    height: int = Field(default=128, ge=32)
    blob_count: tuple[Annotated[int, Field(ge=0)], Annotated[int, Field(ge=0)]] = (1, 4)
    blob_scale: tuple[Annotated[float, Field(gt=0)], Annotated[float, Field(gt=0)]] = (16.0, 40.0)
    rust_palette: list[Rgb] = Field(
        default_factory=lambda: [(150, 75, 40), (120, 60, 30), (170, 95, 50)], min_length=1
    )
    rust_jitter: int = Field(default=10, ge=0, le=127)
    background_palette: list[Rgb] = Field(
        default_factory=lambda: [(128, 128, 128), (110, 120, 135), (150, 150, 155)],
        min_length=1,
    )
    noise_amplitude: int = Field(default=8, ge=0, le=127)
    seed: int = 0

    @model_validator(mode="after")
    def _check_ranges(self) -> Self:
        _check_range("blob_count", *self.blob_count)
        _check_range("blob_scale", *self.blob_scale)
        if 2 * self.blob_scale[1] > min(self.width, self.height) - 1:
            raise ValueError("blob scale too large: need 2 * scale <= smaller side - 1")
        return self


class DegradeSpec(BaseModel):
    """Simulated coarseness of a segmentation network's output."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    jitter: int = Field(default=3, ge=0)
    downscale: int = Field(default=8, ge=1)
    flip_rate: float = Field(default=0.25, ge=0.0, lt=1.0)
    seed: int = 0


class HsvThresholds(BaseModel):
    """Inclusive HSV box on Pillow's 0-255 scale for every channel.

    A hue range with lo > hi wraps around red (e.g. (235, 40)).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    hue: HueRange = (235, 40)
    saturation: tuple[Channel, Channel] = (90, 255)
    value: tuple[Channel, Channel] = (40, 255)

    @model_validator(mode="after")
    def _check_ranges(self) -> Self:
        _check_range("saturation", *self.saturation)
        _check_range("value", *self.value)
        return self
