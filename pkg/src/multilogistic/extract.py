"""Reading logistic waves off scalogram extrema, and the residual loop."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from multilogistic.diffcwt import (
    Scalogram,
    central_diff,
    default_scales,
    saturation_from_index,
    scalogram,
)
from multilogistic.errors import DomainError
from multilogistic.scurve import LogisticWave, MultilogisticModel, SampledSeries, multilogistic_eval

logger = logging.getLogger(__name__)

MAXIMUM = "maximum"
MINIMUM = "minimum"


@dataclass(frozen=True)
class ScalogramExtremum:
    a: float
    b: float
    index_value: float
    kind: str

    def __post_init__(self):
        if self.kind not in (MAXIMUM, MINIMUM):
            raise DomainError(f"unknown extremum kind {self.kind!r}")

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "index_value": self.index_value, "kind": self.kind}


@dataclass(frozen=True)
class DecompositionConfig:
    """Knobs of the decomposition loop.

    ``waves_per_pass`` gives how many waves each pass may take; the last entry
    applies to all later passes.  ``saturation_floor`` overrides the floor
    derived from ``min_saturation_fraction`` when set.
    """

    max_waves: int = 3
    min_saturation_fraction: float = 0.02
    saturation_floor: Optional[float] = None
    exclusion_octaves: float = 0.5
    exclusion_widths: float = 2.0
    waves_per_pass: tuple[int, ...] = (1, 2)
    voices_per_octave: int = 16
    min_scale: float = 1.0
    max_scale: Optional[float] = None
    workers: Optional[int] = None
    subgrid: bool = True

    def __post_init__(self):
        if self.max_waves < 1:
            raise DomainError("max_waves must be >= 1")
        if not 0 < self.min_saturation_fraction < 1:
            raise DomainError("min_saturation_fraction must lie in (0, 1)")
        if self.saturation_floor is not None and self.saturation_floor < 0:
            raise DomainError("saturation_floor must be nonnegative")
        if not self.waves_per_pass or min(self.waves_per_pass) < 1:
            raise DomainError("waves_per_pass entries must be >= 1")
        if self.exclusion_octaves < 0 or self.exclusion_widths < 0:
            raise DomainError("exclusion radii must be nonnegative")

    def pass_quota(self, k: int) -> int:
        return self.waves_per_pass[min(k, len(self.waves_per_pass) - 1)]

    def scales_for(self, series: SampledSeries) -> np.ndarray:
        span = float(series.t[-1] - series.t[0])
        return default_scales(span, self.min_scale * series.step, self.max_scale, self.voices_per_octave)


@dataclass
class IterationRecord:
    iteration: int
    residual: np.ndarray
    scalogram: Scalogram
    extrema: list[ScalogramExtremum]
    waves: list[LogisticWave]

    @property
    def residual_id(self) -> str:
        return f"residual-{self.iteration}"

    @property
    def scalogram_id(self) -> str:
        return f"scalogram-{self.iteration}"


@dataclass
class DecompositionTrace:
    t: np.ndarray
    y: np.ndarray
    saturation_floor: float
    iterations: list[IterationRecord] = field(default_factory=list)
    stop_reason: str = ""
    final_residual: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        return {
            "saturation_floor": self.saturation_floor,
            "stop_reason": self.stop_reason,
            "iterations": [
                {
                    "iteration": it.iteration,
                    "residual_id": it.residual_id,
                    "scalogram_id": it.scalogram_id,
                    "residual_max_abs": float(np.max(np.abs(it.residual))),
                    "extrema": [e.to_dict() for e in it.extrema],
                    "waves": [{"a": w.a, "b": w.b, "y_sat": w.y_sat} for w in it.waves],
                }
                for it in self.iterations
            ],
        }


class WeakWaveError(DomainError):
    """Estimated saturation below the admissibility floor."""


def find_extrema(
    s: Scalogram,
    cfg: Optional[DecompositionConfig] = None,
) -> list[ScalogramExtremum]:
    """Strict interior local extrema of the Index, strongest first.

    A cell qualifies when it is strictly above (or below) all eight
    neighbours.  Candidates are then taken greedily by |Index|, dropping any
    that fall within the exclusion radius of one already kept.
    """
    cfg = cfg or DecompositionConfig()
    m = s.index
    if m.shape[0] < 3 or m.shape[1] < 3:
        return []
    core = m[1:-1, 1:-1]
    is_max = np.ones_like(core, dtype=bool)
    is_min = np.ones_like(core, dtype=bool)
    rows, cols = m.shape
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = m[1 + di : rows - 1 + di, 1 + dj : cols - 1 + dj]
            is_max &= core > nb
            is_min &= core < nb

    candidates = []
    for mask, kind in ((is_max, MAXIMUM), (is_min, MINIMUM)):
        for i, j in zip(*np.nonzero(mask)):
            if cfg.subgrid:
                a, b, v = _subgrid_peak(s, i + 1, j + 1)
            else:
                a, b, v = float(s.scales[i + 1]), float(s.shifts[j + 1]), float(core[i, j])
            candidates.append(ScalogramExtremum(a=a, b=b, index_value=v, kind=kind))
    # ties broken by grid position so the order is reproducible
    candidates.sort(key=lambda e: (-abs(e.index_value), e.a, e.b))

    kept: list[ScalogramExtremum] = []
    for e in candidates:
        if e.index_value == 0:
            continue
        if any(_within_exclusion(e, k, cfg) for k in kept):
            continue
        kept.append(e)
    return kept


def _parabola_vertex(fm: float, f0: float, fp: float) -> tuple[float, float]:
    """Offset in (-0.5, 0.5) and value of the vertex through three equispaced points."""
    curv = fm - 2.0 * f0 + fp
    if curv == 0:
        return 0.0, f0
    off = 0.5 * (fm - fp) / curv
    off = min(max(off, -0.5), 0.5)
    return off, f0 - 0.25 * (fm - fp) * off


def _subgrid_peak(s: Scalogram, i: int, j: int) -> tuple[float, float, float]:
    """Refine a grid extremum by separable parabolic interpolation.

    Scales are interpolated in log space (the grid is geometric), shifts
    linearly.
    """
    m = s.index
    di, vi = _parabola_vertex(m[i - 1, j], m[i, j], m[i + 1, j])
    dj, vj = _parabola_vertex(m[i, j - 1], m[i, j], m[i, j + 1])
    la = math.log(s.scales[i]) + di * (math.log(s.scales[i + 1]) - math.log(s.scales[i - 1])) / 2.0
    b = s.shifts[j] + dj * (s.shifts[j + 1] - s.shifts[j - 1]) / 2.0
    # both corrections move away from the grid value in the same direction
    v = vi + vj - m[i, j]
    return math.exp(la), float(b), float(v)


def _within_exclusion(e: ScalogramExtremum, k: ScalogramExtremum, cfg: DecompositionConfig) -> bool:
    return (
        abs(math.log2(e.a / k.a)) <= cfg.exclusion_octaves
        and abs(e.b - k.b) <= cfg.exclusion_widths * k.a
    )


def _near_wave(e: ScalogramExtremum, w: LogisticWave, cfg: DecompositionConfig) -> bool:
    # a leftover shoulder of an extracted wave, not a new component
    return abs(math.log2(e.a / w.a)) <= cfg.exclusion_octaves and abs(e.b - w.b) <= cfg.exclusion_widths * w.a


def estimate_saturation(e: ScalogramExtremum) -> float:
    if not e.a > 0:
        raise DomainError(f"scale must be positive, got {e.a!r}")
    return saturation_from_index(e.a, e.index_value)


def extremum_to_wave(e: ScalogramExtremum, floor: float = 0.0) -> LogisticWave:
    y_sat = estimate_saturation(e)
    if y_sat == 0 or abs(y_sat) < floor:
        raise WeakWaveError(f"|y_sat|={abs(y_sat):.6g} below floor {floor:.6g}")
    return LogisticWave(a=e.a, b=e.b, y_sat=y_sat)


def decompose(
    series: SampledSeries,
    cfg: Optional[DecompositionConfig] = None,
) -> tuple[MultilogisticModel, DecompositionTrace]:
    """Peel logistic waves off a series one scalogram at a time.

    Each pass takes the second differences of the current residual, builds
    the scalogram, converts the strongest admissible extrema to waves and
    subtracts them.  The loop ends at ``max_waves`` or when a pass finds
    nothing above the saturation floor.
    """
    cfg = cfg or DecompositionConfig()
    if len(series) < 8:
        raise DomainError(f"decomposition needs at least 8 samples, got {len(series)}")
    y = series.y
    data_range = float(np.max(y) - np.min(y))
    floor = cfg.saturation_floor if cfg.saturation_floor is not None else cfg.min_saturation_fraction * data_range
    trace = DecompositionTrace(t=series.t, y=y, saturation_floor=floor)
    waves: list[LogisticWave] = []
    scales = cfg.scales_for(series)

    residual = y.copy()
    if data_range == 0:
        trace.stop_reason = "degenerate"
        trace.final_residual = residual
        logger.info("constant series, nothing to decompose")
        return MultilogisticModel(()), trace

    k = 0
    while len(waves) < cfg.max_waves:
        s = scalogram(central_diff(series.with_values(residual), 2), scales, workers=cfg.workers)
        extrema = find_extrema(s, cfg)
        quota = min(cfg.pass_quota(k), cfg.max_waves - len(waves))
        taken: list[LogisticWave] = []
        for e in extrema:
            if len(taken) == quota:
                break
            if any(_near_wave(e, w, cfg) for w in waves):
                continue
            try:
                taken.append(extremum_to_wave(e, floor))
            except WeakWaveError:
                continue
        trace.iterations.append(IterationRecord(k, residual, s, extrema, taken))
        if not taken:
            trace.stop_reason = "exhausted"
            break
        waves.extend(taken)
        logger.debug("pass %d: %s", k, taken)
        # recompute from the source rather than subtracting incrementally
        residual = y - multilogistic_eval(MultilogisticModel(waves), series.t)
        k += 1
    else:
        trace.stop_reason = "max_waves"

    trace.final_residual = residual
    return MultilogisticModel(waves), trace
