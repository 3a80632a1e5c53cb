"""Gompertz, logistic and multilogistic curves.

All curves are evaluated from their closed forms.  The differential
equations they solve are only used as self-checks (see the ``*_ode_residual``
helpers).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np
from scipy.special import expit

from multilogistic.errors import DomainError

# exp(700) is still finite in double precision
_MAX_EXP = 700.0


@dataclass(frozen=True)
class GompertzParams:
    """x(t) = x_sat * exp(-exp(-s * (t - t0)))."""

    x_sat: float
    s: float
    t0: float

    def __post_init__(self):
        if not (math.isfinite(self.x_sat) and self.x_sat > 0):
            raise DomainError(f"x_sat must be positive, got {self.x_sat!r}")
        if not (math.isfinite(self.s) and self.s > 0):
            raise DomainError(f"growth rate s must be positive, got {self.s!r}")
        if not math.isfinite(self.t0):
            raise DomainError(f"t0 must be finite, got {self.t0!r}")

    @property
    def x0(self) -> float:
        """Value at t = 0."""
        return gompertz_eval(self, 0.0)


@dataclass(frozen=True)
class LogisticWave:
    """y(t) = y_sat / (1 + exp(-(t - b) / a)).

    ``a`` is the dilation (reciprocal of the growth rate), ``b`` the
    inflection time, ``y_sat`` the signed saturation level.
    """

    a: float
    b: float
    y_sat: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"dilation a must be positive, got {self.a!r}")
        if not math.isfinite(self.b):
            raise DomainError(f"center b must be finite, got {self.b!r}")
        if not math.isfinite(self.y_sat) or self.y_sat == 0:
            raise DomainError(f"y_sat must be finite and nonzero, got {self.y_sat!r}")

    @property
    def rate(self) -> float:
        return dilation_to_rate(self.a)

    def shifted(self, delta: float) -> "LogisticWave":
        return LogisticWave(self.a, self.b + delta, self.y_sat)

    def scaled(self, factor: float) -> "LogisticWave":
        return LogisticWave(self.a, self.b, self.y_sat * factor)


@dataclass(frozen=True)
class MultilogisticModel:
    waves: tuple[LogisticWave, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "waves", tuple(self.waves))

    def __len__(self):
        return len(self.waves)

    def __iter__(self):
        return iter(self.waves)

    def __add__(self, other: "MultilogisticModel") -> "MultilogisticModel":
        return MultilogisticModel(self.waves + other.waves)

    @property
    def total_saturation(self) -> float:
        return float(sum(w.y_sat for w in self.waves))


@dataclass(frozen=True)
class SampledSeries:
    t: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if t.ndim != 1 or y.ndim != 1:
            raise DomainError("t and y must be one-dimensional")
        if len(t) != len(y):
            raise DomainError(f"length mismatch: len(t)={len(t)}, len(y)={len(y)}")
        if len(t) < 3:
            raise DomainError(f"a series needs at least 3 samples, got {len(t)}")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(y)):
            raise DomainError("series contains non-finite values")
        if np.any(np.diff(t) <= 0):
            raise DomainError("sample times must be strictly increasing")
        t.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return len(self.t)

    @property
    def step(self) -> float:
        """Sample spacing; raises if the grid is not uniform."""
        steps = np.diff(self.t)
        h = float(steps.mean())
        if np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
            raise DomainError("sample times are not uniformly spaced")
        return h

    def with_values(self, y) -> "SampledSeries":
        return SampledSeries(self.t, y)


Curve = Union[GompertzParams, LogisticWave, MultilogisticModel, Callable]


def dilation_to_rate(a: float) -> float:
    return 1.0 / a


def rate_to_dilation(s: float) -> float:
    return 1.0 / s


def gompertz_eval(p: GompertzParams, t):
    u = np.minimum(-p.s * (np.asarray(t, dtype=float) - p.t0), _MAX_EXP)
    out = p.x_sat * np.exp(-np.exp(u))
    return float(out) if out.ndim == 0 else out


def gompertz_inflection(p: GompertzParams) -> float:
    return p.t0


def logistic_eval(w: LogisticWave, t):
    # expit saturates cleanly at both tails
    out = w.y_sat * expit((np.asarray(t, dtype=float) - w.b) / w.a)
    return float(out) if out.ndim == 0 else out


def multilogistic_eval(m: MultilogisticModel, t):
    if len(m.waves) == 0:
        raise DomainError("cannot evaluate an empty multilogistic model")
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for w in m.waves:
        out = out + logistic_eval(w, t)
    return float(out) if out.ndim == 0 else out


def curve_eval(f: Curve, t):
    """Evaluate any supported curve description at ``t``."""
    if isinstance(f, GompertzParams):
        return gompertz_eval(f, t)
    if isinstance(f, LogisticWave):
        return logistic_eval(f, t)
    if isinstance(f, MultilogisticModel):
        return multilogistic_eval(f, t)
    if callable(f):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(f(t), dtype=float), t.shape).copy()
    raise TypeError(f"unsupported curve type {type(f).__name__}")


def sample_grid(t_start: float, t_end: float, step: float) -> np.ndarray:
    """Uniform grid from t_start to t_end inclusive."""
    if not step > 0:
        raise DomainError(f"step must be positive, got {step!r}")
    if not t_end > t_start:
        raise DomainError(f"empty range [{t_start}, {t_end}]")
    n = math.floor((t_end - t_start) / step + 1e-9) + 1
    return t_start + step * np.arange(n)


def sample_curve(f: Curve, t_start: float, t_end: float, step: float = 1.0) -> SampledSeries:
    t = sample_grid(t_start, t_end, step)
    return SampledSeries(t, curve_eval(f, t))


def _central_derivative(fn, t: float, h: float) -> float:
    return (fn(t + h) - fn(t - h)) / (2.0 * h)


def gompertz_ode_residual(p: GompertzParams, t: float, h: float = 1e-4) -> float:
    """Centered-difference x'(t) minus s * x * log(x_sat / x)."""
    if not h > 0:
        raise DomainError(f"step h must be positive, got {h!r}")
    x = gompertz_eval(p, t)
    if x <= 0:
        raise DomainError(f"Gompertz value underflows to {x!r} at t={t!r}")
    return _central_derivative(lambda u: gompertz_eval(p, u), t, h) - p.s * x * math.log(p.x_sat / x)


def logistic_ode_residual(w: LogisticWave, t: float, h: float = 1e-4) -> float:
    """Centered-difference x'(t) minus (s / y_sat) * x * (y_sat - x), s = 1/a."""
    if not h > 0:
        raise DomainError(f"step h must be positive, got {h!r}")
    x = logistic_eval(w, t)
    return _central_derivative(lambda u: logistic_eval(w, u), t, h) - w.rate / w.y_sat * x * (w.y_sat - x)

