"""Central differences and the logistic-wavelet scalogram.

The scalogram entry at scale ``a`` and shift ``b`` is the discrete inner
product

    Index(a, b) = sum_n  d2_n * psi2_{a,b}(t_n) / h

where ``d2`` are central second differences and ``h`` the sample spacing
(``h = 1`` gives the plain sum).  For a logistic wave y_sat / (1 + e^{-(t-b)/a})
the maximum over the grid sits at (a, b) and equals y_sat / (sqrt(30) a^1.5).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from multilogistic.errors import DomainError
from multilogistic.logwavelet import SQRT30, SUPPORT_HALF_WIDTH, mother_psi2
from multilogistic.scurve import LogisticWave, SampledSeries


@dataclass(frozen=True)
class DiffSeries:
    order: int
    t: np.ndarray
    d: np.ndarray
    step: float = 1.0
    provenance: str = ""

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class Scalogram:
    scales: np.ndarray
    shifts: np.ndarray
    index: np.ndarray

    def __post_init__(self):
        if self.index.shape != (len(self.scales), len(self.shifts)):
            raise DomainError(
                f"index shape {self.index.shape} does not match grids "
                f"({len(self.scales)}, {len(self.shifts)})"
            )

    @property
    def shape(self):
        return self.index.shape

    def argmax(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmax(self.index), self.index.shape)
        return float(self.scales[i]), float(self.shifts[j])

    def argmin(self) -> tuple[float, float]:
        i, j = np.unravel_index(np.argmin(self.index), self.index.shape)
        return float(self.scales[i]), float(self.shifts[j])

    def value_at(self, a: float, b: float) -> float:
        i = int(np.argmin(np.abs(np.log(self.scales / a))))
        j = int(np.argmin(np.abs(self.shifts - b)))
        return float(self.index[i, j])


def central_diff(series: SampledSeries, order: int = 2) -> DiffSeries:
    """Central differences at the interior samples.

    order 1: (y[n+1] - y[n-1]) / 2;  order 2: y[n+1] - 2 y[n] + y[n-1].
    Neither is divided by the spacing.
    """
    if order not in (1, 2):
        raise DomainError(f"difference order must be 1 or 2, got {order!r}")
    if len(series) < 3:
        raise DomainError("central differences need at least 3 samples")
    h = series.step
    y = series.y
    if order == 1:
        d = (y[2:] - y[:-2]) / 2.0
    else:
        d = y[2:] - 2.0 * y[1:-1] + y[:-2]
    return DiffSeries(order=order, t=series.t[1:-1].copy(), d=d, step=h, provenance=f"diff{order}")


def diff_from_values(t, d, step: float = 1.0, provenance: str = "") -> DiffSeries:
    """Wrap precomputed second-difference values (e.g. exact h^2 * y'')."""
    t = np.asarray(t, dtype=float)
    d = np.asarray(d, dtype=float)
    if t.shape != d.shape or t.ndim != 1:
        raise DomainError("t and d must be one-dimensional and the same length")
    return DiffSeries(order=2, t=t, d=d, step=step, provenance=provenance)


def _check_scale(a: float):
    if not (math.isfinite(a) and a > 0):
        raise DomainError(f"scale must be positive, got {a!r}")


def _index_row(diff2: DiffSeries, a: float, shifts: np.ndarray) -> np.ndarray:
    # rows are contiguous, so numpy reduces each one by pairwise summation
    w = mother_psi2((diff2.t[None, :] - shifts[:, None]) / a) / math.sqrt(a)
    return np.sum(w * diff2.d[None, :], axis=1) / diff2.step


def cwt_index(diff2: DiffSeries, a: float, b: float) -> float:
    _check_scale(a)
    if diff2.order != 2:
        raise DomainError("Index is defined on second differences")
    return float(_index_row(diff2, a, np.array([float(b)]))[0])


def default_scales(
    span: float,
    min_scale: float = 1.0,
    max_scale: Optional[float] = None,
    voices_per_octave: int = 16,
) -> np.ndarray:
    """Geometric scale grid from ``min_scale`` to ``span / 8``."""
    if max_scale is None:
        max_scale = span / 8.0
    if not (min_scale > 0 and max_scale > min_scale):
        raise DomainError(f"bad scale range [{min_scale}, {max_scale}]")
    if voices_per_octave < 1:
        raise DomainError("voices_per_octave must be >= 1")
    n = math.floor(voices_per_octave * math.log2(max_scale / min_scale) + 1e-9)
    return min_scale * 2.0 ** (np.arange(n + 1) / voices_per_octave)


def default_shifts(diff2: DiffSeries) -> np.ndarray:
    return diff2.t.copy()


def scalogram(
    diff2: DiffSeries,
    scales: Optional[Sequence[float]] = None,
    shifts: Optional[Sequence[float]] = None,
    workers: Optional[int] = None,
) -> Scalogram:
    """Index matrix over a (scale, shift) grid; rows are scales.

    Rows are independent; with ``workers > 1`` they are evaluated in a thread
    pool and assembled in grid order, so the result does not depend on the
    number of workers.
    """
    if diff2.order != 2:
        raise DomainError("scalogram is defined on second differences")
    if scales is None:
        scales = default_scales(float(diff2.t[-1] - diff2.t[0]) + 2 * diff2.step)
    if shifts is None:
        shifts = default_shifts(diff2)
    scales = np.asarray(scales, dtype=float)
    shifts = np.asarray(shifts, dtype=float)
    if scales.size == 0 or shifts.size == 0:
        raise DomainError("scale and shift grids must be nonempty")
    if np.any(scales <= 0) or np.any(np.diff(scales) <= 0):
        raise DomainError("scales must be positive and strictly ascending")
    if np.any(np.diff(shifts) <= 0):
        raise DomainError("shifts must be strictly ascending")

    if workers is not None and workers > 1 and len(scales) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda a: _index_row(diff2, a, shifts), scales))
    else:
        rows = [_index_row(diff2, a, shifts) for a in scales]
    return Scalogram(scales=scales, shifts=shifts, index=np.vstack(rows))


def saturation_from_index(a: float, index_value: float) -> float:
    """y_sat = sqrt(30) * a^1.5 * Index."""
    return SQRT30 * a**1.5 * index_value


def index_from_saturation(a: float, y_sat: float) -> float:
    """Peak Index expected for a logistic wave of dilation ``a``."""
    return y_sat / (SQRT30 * a**1.5)


def exact_second_difference(wave: LogisticWave, t, step: float = 1.0) -> np.ndarray:
    """h^2 times the analytic second derivative of the wave at ``t``.

    y''(t) = y_sat / (sqrt(30) a^1.5) * psi2_{a,b}(t).
    """
    t = np.asarray(t, dtype=float)
    return step**2 * wave.y_sat / (SQRT30 * wave.a**2) * mother_psi2((t - wave.b) / wave.a)


class GridBracketError(DomainError):
    """The grid does not enclose the wave parameters."""


def lemma_oracle(
    wave: LogisticWave,
    scales: Sequence[float],
    shifts: Sequence[float],
    step: float = 1.0,
) -> tuple[float, float]:
    """Arg-extremum of the scalogram of a wave's exact second derivative.

    Returns the argmax for positive saturation and the argmin for negative
    saturation.  For a fine enough grid this is the grid point nearest to
    (wave.a, wave.b).
    """
    scales = np.asarray(scales, dtype=float)
    shifts = np.asarray(shifts, dtype=float)
    if not (scales[0] <= wave.a <= scales[-1]):
        raise GridBracketError(f"scales [{scales[0]}, {scales[-1]}] do not bracket a={wave.a}")
    if not (shifts[0] <= wave.b <= shifts[-1]):
        raise GridBracketError(f"shifts [{shifts[0]}, {shifts[-1]}] do not bracket b={wave.b}")
    reach = SUPPORT_HALF_WIDTH * max(scales[-1], wave.a)
    lo = step * math.floor((min(shifts[0], wave.b) - reach) / step)
    hi = step * math.ceil((max(shifts[-1], wave.b) + reach) / step)
    t = lo + step * np.arange(int(round((hi - lo) / step)) + 1)
    diff2 = diff_from_values(t, exact_second_difference(wave, t, step), step, "lemma")
    s = scalogram(diff2, scales, shifts)
    return s.argmax() if wave.y_sat > 0 else s.argmin()
