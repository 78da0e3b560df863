"""Pydantic schemas for metrics, run reports, dataset splits and corpus manifests."""

from pydantic import BaseModel, Field

from src.schemas.synth import DegradeSpec, SynthSpec


class MetricsReport(BaseModel):
    tp: int
    fp: int
    fn: int
    tn: int
    precision: float
    recall: float
    f1: float
    iou: float
    no_positive_prediction: bool
    no_positive_truth: bool


class MacroAverages(BaseModel):
    precision: float
    recall: float
    f1: float
    iou: float
    images: int = Field(description="images with positive truth that entered the means")


class AggregateReport(BaseModel):
    micro: MetricsReport
    macro: MacroAverages


class RegionSummary(BaseModel):
    id: int
    pixels: int
    segments: int
    accepted: int
    degenerate: bool


class ImageReport(BaseModel):
    name: str
    width: int
    height: int
    region_count: int
    regions: list[RegionSummary]
    before: MetricsReport | None = None
    after: MetricsReport | None = None
    timings_ms: dict[str, float] = Field(default_factory=dict)


class ImageFailure(BaseModel):
    name: str
    error: str


class RunReport(BaseModel):
    images: list[ImageReport]
    before: AggregateReport | None = None
    after: AggregateReport | None = None
    failures: list[ImageFailure] = Field(default_factory=list)


class EvaluatedImage(BaseModel):
    prediction: str
    truth: str
    metrics: MetricsReport


class EvaluationReport(BaseModel):
    images: list[EvaluatedImage]
    aggregate: AggregateReport


class DatasetSplit(BaseModel):
    train: list[str]
    val: list[str]
    test: list[str]


class CorpusItem(BaseModel):
    index: int
    scene: str
    truth: str
    coarse: str


class CorpusManifest(BaseModel):
    seed: int
    count: int
    synth: SynthSpec
    degrade: DegradeSpec
    items: list[CorpusItem]
