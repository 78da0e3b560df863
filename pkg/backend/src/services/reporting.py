"""Stable JSON rendering for reports: sorted keys, floats at 9 significant digits."""

from __future__ import annotations

import json
from pathlib import Path
from typing import TypeAlias

from pydantic import BaseModel

SIGNIFICANT_DIGITS = 9
TIMING_KEY = "timings_ms"

JsonValue: TypeAlias = None | bool | int | float | str | list["JsonValue"] | dict[str, "JsonValue"]


def _stabilize(value: JsonValue) -> JsonValue:
    if isinstance(value, float):
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, dict):
        return {k: _stabilize(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_stabilize(v) for v in value]
    return value


def strip_timings(value: JsonValue) -> JsonValue:
    """Drop wall-clock fields, the only nondeterministic part of a report."""
    if isinstance(value, dict):
        return {k: strip_timings(v) for k, v in value.items() if k != TIMING_KEY}
    if isinstance(value, list):
        return [strip_timings(v) for v in value]
    return value


def to_json(model: BaseModel | JsonValue, *, timings: bool = True) -> str:
    data: JsonValue = model.model_dump(mode="json") if isinstance(model, BaseModel) else model
    if not timings:
        data = strip_timings(data)
    return json.dumps(_stabilize(data), sort_keys=True, indent=2) + "\n"


def write_json(model: BaseModel | JsonValue, path: Path | None, *, timings: bool = True) -> None:
    """Write to *path*, or to stdout when no path is given."""
    text = to_json(model, timings=timings)
    if path is None:
        print(text, end="")
    else:
        path.write_text(text)
