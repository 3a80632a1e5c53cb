"""Second-order logistic wavelet.

psi2(t) = sqrt(30) * (exp(-2t) - exp(-t)) / (1 + exp(-t))**3, which is
sqrt(30) times the second derivative of 1 / (1 + exp(-t)).  The factor
sqrt(30) makes the L2 norm equal to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from multilogistic.errors import DomainError

SQRT30 = math.sqrt(30.0)

# |psi2| < 1e-16 outside [-40, 40]
SUPPORT_HALF_WIDTH = 40.0


class TruncationError(DomainError):
    """Quadrature window too narrow for the requested tolerance."""


@dataclass(frozen=True)
class ChildWaveletParams:
    a: float
    b: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"dilation a must be positive, got {self.a!r}")
        if not math.isfinite(self.b):
            raise DomainError(f"translation b must be finite, got {self.b!r}")


def mother_psi2(t):
    t = np.asarray(t, dtype=float)
    # evaluate on |t| and restore the sign: avoids overflow of exp(-2t) for t << 0
    e = np.exp(-np.abs(t))
    v = SQRT30 * (e * e - e) / (1.0 + e) ** 3
    out = np.where(t < 0, -v, v)
    return float(out) if out.ndim == 0 else out


def child_psi2(p: ChildWaveletParams, t):
    t = np.asarray(t, dtype=float)
    out = mother_psi2((t - p.b) / p.a) / math.sqrt(p.a)
    return float(out) if np.ndim(out) == 0 else out


def _quadrature_grid(step: float, half_width: float, p: ChildWaveletParams):
    if not step > 0:
        raise DomainError(f"quadrature step must be positive, got {step!r}")
    if not half_width > 0:
        raise DomainError(f"half_width must be positive, got {half_width!r}")
    n = int(round(half_width / step))
    # symmetric about the wavelet center so odd integrands cancel pairwise
    return p.b + step * np.arange(-n, n + 1)


def psi2_l2_norm(
    quadrature_step: float = 1e-3,
    half_width: float = SUPPORT_HALF_WIDTH,
    params: Optional[ChildWaveletParams] = None,
    tol: float = 1e-6,
) -> float:
    """Squared L2 norm of psi2 (or a child) by the composite trapezoid rule.

    ``half_width`` is measured in units of the mother wavelet, i.e. the window
    for a child is ``b +- a * half_width``.
    """
    p = params or ChildWaveletParams(1.0, 0.0)
    # tail of psi2**2 beyond W is below 15 * exp(-2W) on each side
    if 30.0 * math.exp(-2.0 * half_width) > tol:
        raise TruncationError(f"half_width={half_width} leaves a tail above {tol}")
    t = _quadrature_grid(quadrature_step * p.a, half_width * p.a, p)
    return float(np.trapezoid(child_psi2(p, t) ** 2, t))


def psi2_zero_mean(
    quadrature_step: float = 1e-3,
    half_width: float = SUPPORT_HALF_WIDTH,
    params: Optional[ChildWaveletParams] = None,
    tol: float = 1e-10,
) -> float:
    """Integral of psi2 (or a child) by the composite trapezoid rule."""
    p = params or ChildWaveletParams(1.0, 0.0)
    # |psi2(t)| <= sqrt(30) * exp(-|t|)
    if 2.0 * SQRT30 * math.sqrt(p.a) * math.exp(-half_width) > tol:
        raise TruncationError(f"half_width={half_width} leaves a tail above {tol}")
    t = _quadrature_grid(quadrature_step * p.a, half_width * p.a, p)
    return float(np.trapezoid(child_psi2(p, t), t))
