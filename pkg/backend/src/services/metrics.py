"""Pixel-level evaluation and dataset splitting."""

from collections.abc import Sequence

import numpy as np

from src.schemas.report import AggregateReport, DatasetSplit, MacroAverages, MetricsReport
from src.services.raster import BinaryMask, require_same_shape

TEST_PERCENT = 20
VAL_PERCENT = 25
MIN_SPLIT_ITEMS = 5


class DatasetTooSmallError(ValueError):
    """Raised when a dataset has too few items to split three ways."""


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def _f1(precision: float, recall: float) -> float:
    total = precision + recall
    return 2 * precision * recall / total if total else 0.0


def report_from_counts(tp: int, fp: int, fn: int, tn: int) -> MetricsReport:
    """Metrics for a confusion matrix; zero denominators yield 0 plus a flag."""
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    return MetricsReport(
        tp=tp,
        fp=fp,
        fn=fn,
        tn=tn,
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        iou=_ratio(tp, tp + fp + fn),
        no_positive_prediction=tp + fp == 0,
        no_positive_truth=tp + fn == 0,
    )


def evaluate(pred: BinaryMask, truth: BinaryMask) -> MetricsReport:
    require_same_shape(pred, truth)
    p, t = pred.bits, truth.bits
    tp = int(np.count_nonzero(p & t))
    fp = int(np.count_nonzero(p & ~t))
    fn = int(np.count_nonzero(~p & t))
    tn = p.size - tp - fp - fn
    return report_from_counts(tp, fp, fn, tn)


def aggregate(reports: Sequence[MetricsReport]) -> AggregateReport:
    """Micro (pooled counts) and macro (mean of per-image metrics) averages.

    Macro means skip images without positive truth, whose metrics are undefined.
    """
    if not reports:
        raise ValueError("cannot aggregate an empty list of reports")
    micro = report_from_counts(
        sum(r.tp for r in reports),
        sum(r.fp for r in reports),
        sum(r.fn for r in reports),
        sum(r.tn for r in reports),
    )
    scored = [r for r in reports if not r.no_positive_truth]
    if scored:
        macro = MacroAverages(
            precision=float(np.mean([r.precision for r in scored])),
            recall=float(np.mean([r.recall for r in scored])),
            f1=float(np.mean([r.f1 for r in scored])),
            iou=float(np.mean([r.iou for r in scored])),
            images=len(scored),
        )
    else:
        macro = MacroAverages(precision=0.0, recall=0.0, f1=0.0, iou=0.0, images=0)
    return AggregateReport(micro=micro, macro=macro)


def _percent_half_up(n: int, percent: int) -> int:
    return (n * percent + 50) // 100


def split_dataset(items: Sequence[str], seed: int) -> DatasetSplit:
    """Shuffle with PCG64(seed); 20% test, then 25% of the rest validation, the remainder train."""
    n = len(items)
    if n < MIN_SPLIT_ITEMS:
        raise DatasetTooSmallError(f"need at least {MIN_SPLIT_ITEMS} items to split, got {n}")
    order = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    shuffled = [items[i] for i in order.tolist()]
    n_test = _percent_half_up(n, TEST_PERCENT)
    n_val = _percent_half_up(n - n_test, VAL_PERCENT)
    return DatasetSplit(
        test=shuffled[:n_test],
        val=shuffled[n_test : n_test + n_val],
        train=shuffled[n_test + n_val :],
    )
