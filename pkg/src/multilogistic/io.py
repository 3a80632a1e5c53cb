"""File formats: series CSV, model JSON, scalogram CSV/JSON, trace JSON."""

from __future__ import annotations

import csv
import io
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

import numpy as np

from multilogistic.diffcwt import Scalogram
from multilogistic.errors import DomainError
from multilogistic.scurve import LogisticWave, MultilogisticModel, SampledSeries

PathLike = Union[str, Path]


class FormatError(DomainError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def fmt(x: float) -> str:
    """Storage format: 17 significant digits, always with a '.' decimal point."""
    return format(float(x), ".17g")


def _read_text(path: PathLike) -> str:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return fh.read()


def parse_series(text: str) -> SampledSeries:
    """Parse ``t,y`` CSV text; extra columns are ignored."""
    rows = csv.reader(io.StringIO(text))
    try:
        header = next(rows)
    except StopIteration:
        raise FormatError("empty file", 1) from None
    names = [h.strip().lstrip("﻿").lower() for h in header]
    if "t" not in names or "y" not in names:
        raise FormatError(f"header must name columns 't' and 'y', got {header!r}", 1)
    it, iy = names.index("t"), names.index("y")
    t, y = [], []
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            t.append(float(row[it]))
            y.append(float(row[iy]))
        except (IndexError, ValueError):
            raise FormatError(f"cannot parse row {row!r}", lineno) from None
    if len(t) < 3:
        raise FormatError(f"need at least 3 data rows, got {len(t)}")
    t_arr = np.array(t)
    bad = np.nonzero(np.diff(t_arr) <= 0)[0]
    if bad.size:
        raise FormatError("t must be strictly increasing", int(bad[0]) + 3)
    return SampledSeries(t_arr, np.array(y))


def read_series(path: PathLike) -> SampledSeries:
    return parse_series(_read_text(path))


def format_series(series: SampledSeries, extra: Optional[dict] = None) -> str:
    extra = extra or {}
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "y", *extra])
    cols = [np.asarray(v) for v in extra.values()]
    for k, (t, y) in enumerate(zip(series.t, series.y)):
        w.writerow([fmt(t), fmt(y), *(fmt(c[k]) for c in cols)])
    return out.getvalue()


def write_series(series: SampledSeries, path: PathLike, extra: Optional[dict] = None) -> None:
    Path(path).write_text(format_series(series, extra), encoding="utf-8")


def model_to_dict(m: MultilogisticModel, source: str = "", version: str = "") -> dict:
    return {
        "waves": [{"a": w.a, "b": w.b, "y_sat": w.y_sat} for w in m.waves],
        "meta": {
            "source": source,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "tool_version": version,
        },
    }


def model_from_dict(d: dict) -> MultilogisticModel:
    try:
        waves = d["waves"]
        return MultilogisticModel(
            tuple(LogisticWave(float(w["a"]), float(w["b"]), float(w["y_sat"])) for w in waves)
        )
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed model file: {exc}") from None


def write_model(m: MultilogisticModel, path: PathLike, source: str = "") -> None:
    from multilogistic import __version__

    # json writes floats with repr(), which round-trips exactly
    Path(path).write_text(json.dumps(model_to_dict(m, source, __version__), indent=2) + "\n", encoding="utf-8")


def read_model(path: PathLike) -> MultilogisticModel:
    try:
        d = json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno) from None
    return model_from_dict(d)


def format_scalogram_csv(s: Scalogram) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["scale", *(fmt(b) for b in s.shifts)])
    for a, row in zip(s.scales, s.index):
        w.writerow([fmt(a), *(fmt(v) for v in row)])
    return out.getvalue()


def parse_scalogram_csv(text: str) -> Scalogram:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if len(rows) < 2:
        raise FormatError("scalogram needs a header and at least one row")
    try:
        shifts = np.array([float(v) for v in rows[0][1:]])
        scales = np.array([float(r[0]) for r in rows[1:]])
        index = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    return Scalogram(scales=scales, shifts=shifts, index=index)


def write_scalogram_csv(s: Scalogram, path: PathLike) -> None:
    Path(path).write_text(format_scalogram_csv(s), encoding="utf-8")


def read_scalogram_csv(path: PathLike) -> Scalogram:
    return parse_scalogram_csv(_read_text(path))


def scalogram_to_dict(s: Scalogram) -> dict:
    return {"scales": s.scales.tolist(), "shifts": s.shifts.tolist(), "index": s.index.tolist()}


def scalogram_from_dict(d: dict) -> Scalogram:
    return Scalogram(
        scales=np.asarray(d["scales"], dtype=float),
        shifts=np.asarray(d["shifts"], dtype=float),
        index=np.asarray(d["index"], dtype=float).reshape(len(d["scales"]), len(d["shifts"])),
    )


def write_json(obj: dict, path: PathLike) -> None:
    def default(o):
        if isinstance(o, (np.floating, np.integer)):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        raise TypeError(type(o).__name__)

    Path(path).write_text(json.dumps(obj, indent=2, default=default, allow_nan=False) + "\n", encoding="utf-8")


def read_json(path: PathLike) -> dict:
    return json.loads(_read_text(path))
