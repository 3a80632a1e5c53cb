"""Fit metrics and derivative-free refinement of multilogistic models.

Refinement runs Nelder-Mead on the 3k wave parameters.  Dilations are
optimized in log space so they stay positive, times are measured from the
first sample and values are divided by the data range; this keeps the search
invariant (up to rounding) under time shifts and value rescaling.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import expit

from multilogistic.errors import DomainError
from multilogistic.scurve import LogisticWave, MultilogisticModel, SampledSeries, multilogistic_eval

MINIMAX = "minimax"
LEAST_SQUARES = "least_squares"


@dataclass(frozen=True)
class FitReport:
    max_abs_error: float
    rmse: float
    r_squared: float
    residuals: np.ndarray
    converged: Optional[bool] = None
    evaluations: int = 0

    def metrics(self) -> tuple[float, float, float]:
        return self.max_abs_error, self.rmse, self.r_squared

    def to_dict(self) -> dict:
        return {
            "max_abs_error": self.max_abs_error,
            "rmse": self.rmse,
            "r_squared": None if math.isnan(self.r_squared) else self.r_squared,
            "converged": self.converged,
            "evaluations": self.evaluations,
            "residuals": [float(r) for r in self.residuals],
        }


@dataclass(frozen=True)
class RefineConfig:
    objective: str = MINIMAX
    max_evaluations: int = 20000
    initial_step_fraction: float = 0.05
    restarts: int = 3
    seed: int = 0
    jitter: float = 0.02
    xtol: float = 1e-8
    ftol: float = 1e-6
    warm_start: bool = True

    def __post_init__(self):
        if self.objective not in (MINIMAX, LEAST_SQUARES):
            raise DomainError(f"unknown objective {self.objective!r}")
        if self.max_evaluations <= 0:
            raise DomainError("max_evaluations must be positive")
        if not 0 < self.initial_step_fraction < 0.5:
            raise DomainError("initial_step_fraction must lie in (0, 0.5)")
        if self.restarts < 0:
            raise DomainError("restarts must be nonnegative")


def fit_metrics(series: SampledSeries, m: MultilogisticModel) -> FitReport:
    """Residuals y - f(t) with max |r|, RMSE and R^2.

    R^2 is NaN for a constant series.
    """
    r = series.y - multilogistic_eval(m, series.t)
    ss_res = float(np.sum(r * r))
    ss_tot = float(np.sum((series.y - series.y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else math.nan
    return FitReport(
        max_abs_error=float(np.max(np.abs(r))),
        rmse=math.sqrt(ss_res / len(r)),
        r_squared=r2,
        residuals=r,
    )


def residual_tail_gap(series: SampledSeries, m: MultilogisticModel, plateau_tol: float = 0.01) -> float:
    """Final series value minus the summed saturation levels of the model.

    The last tenth of the series must be flat to within ``plateau_tol`` of the
    data range, otherwise the final value is not a usable plateau.
    """
    y = series.y
    tail = y[-max(2, len(y) // 10) :]
    span = float(np.max(y) - np.min(y))
    if float(np.max(tail) - np.min(tail)) > plateau_tol * span:
        raise DomainError(f"series has not plateaued: last {len(tail)} samples vary by more than {plateau_tol:.0%} of the range")
    return float(y[-1] - m.total_saturation)


@dataclass
class NelderMeadResult:
    x: np.ndarray
    fun: float
    evaluations: int
    converged: bool


def nelder_mead(
    fun: Callable[[np.ndarray], float],
    x0: np.ndarray,
    steps: np.ndarray,
    max_evaluations: int,
    xtol: float = 1e-8,
    ftol: float = 1e-6,
    f0: Optional[float] = None,
) -> NelderMeadResult:
    """Adaptive Nelder-Mead (dimension-dependent coefficients).

    Stops when every vertex lies within ``xtol`` (relative) of the best one,
    or when the objective spread across the simplex drops below ``ftol``.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    alpha, gamma = 1.0, 1.0 + 2.0 / n
    rho, sigma = 0.75 - 1.0 / (2.0 * n), 1.0 - 1.0 / n

    sim = np.vstack([x0] + [x0 + steps[k] * np.eye(n)[k] for k in range(n)])
    nfev = 0

    def f(x):
        nonlocal nfev
        nfev += 1
        return fun(x)

    fsim = np.empty(n + 1)
    if f0 is None:
        fsim[0] = f(sim[0])
    else:
        fsim[0] = f0
    for k in range(1, n + 1):
        fsim[k] = f(sim[k])

    converged = False
    while True:
        order = np.argsort(fsim, kind="stable")
        sim, fsim = sim[order], fsim[order]
        scale = np.maximum(1.0, np.abs(sim[0]))
        if np.max(np.abs(sim[1:] - sim[0]) / scale) <= xtol or fsim[-1] - fsim[0] <= ftol:
            converged = True
            break
        if nfev >= max_evaluations:
            break

        centroid = sim[:-1].mean(axis=0)
        xr = centroid + alpha * (centroid - sim[-1])
        fr = f(xr)
        if fr < fsim[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                sim[-1], fsim[-1] = xe, fe
            else:
                sim[-1], fsim[-1] = xr, fr
            continue
        if fr < fsim[-2]:
            sim[-1], fsim[-1] = xr, fr
            continue
        if fr < fsim[-1]:
            xc = centroid + rho * (xr - centroid)
            fc = f(xc)
            if fc <= fr:
                sim[-1], fsim[-1] = xc, fc
                continue
        else:
            xc = centroid + rho * (sim[-1] - centroid)
            fc = f(xc)
            if fc < fsim[-1]:
                sim[-1], fsim[-1] = xc, fc
                continue
        # shrink towards the best vertex
        for k in range(1, n + 1):
            sim[k] = sim[0] + sigma * (sim[k] - sim[0])
            fsim[k] = f(sim[k])

    best = int(np.argmin(fsim))
    return NelderMeadResult(sim[best].copy(), float(fsim[best]), nfev, converged)


class _Problem:
    """Multilogistic fit in normalized coordinates."""

    def __init__(self, series: SampledSeries, objective: str):
        self.t_ref = float(series.t[0])
        self.u = series.t - self.t_ref
        span = float(np.max(series.y) - np.min(series.y))
        self.y_scale = span if span > 0 else max(float(np.max(np.abs(series.y))), 1.0)
        self.z = series.y / self.y_scale
        self.objective = objective

    def encode(self, m: MultilogisticModel) -> np.ndarray:
        return np.array(
            [v for w in m.waves for v in (math.log(w.a), w.b - self.t_ref, w.y_sat / self.y_scale)]
        )

    def decode(self, x: np.ndarray) -> MultilogisticModel:
        return MultilogisticModel(
            tuple(
                LogisticWave(a=math.exp(la), b=float(b + self.t_ref), y_sat=float(z * self.y_scale))
                for la, b, z in x.reshape(-1, 3)
            )
        )

    def __call__(self, x: np.ndarray) -> float:
        p = x.reshape(-1, 3)
        f = np.zeros_like(self.u)
        for la, b, z in p:
            f = f + z * expit((self.u - b) * math.exp(-la))
        r = self.z - f
        if self.objective == MINIMAX:
            return float(np.max(np.abs(r)))
        return math.sqrt(float(np.mean(r * r)))

    def steps(self, x: np.ndarray, fraction: float) -> np.ndarray:
        p = x.reshape(-1, 3)
        s = np.empty_like(p)
        s[:, 0] = fraction
        # shift steps proportional to the wave width, not to |b|
        s[:, 1] = fraction * np.exp(p[:, 0])
        s[:, 2] = fraction * np.where(p[:, 2] != 0, np.abs(p[:, 2]), 1.0)
        return s.ravel()


def _search(problem: _Problem, x0, f0, cfg: RefineConfig, budget: int, rng) -> tuple[np.ndarray, float, int, bool]:
    """Nelder-Mead from x0, then restarts from jittered copies of the best point."""
    best_x, best_f = x0, f0
    used = 0
    converged = True
    for attempt in range(cfg.restarts + 1):
        remaining = budget - used
        if remaining <= 0:
            converged = False
            break
        if attempt == 0:
            start, f_start = best_x, best_f
        else:
            start = best_x * (1.0 + cfg.jitter * rng.standard_normal(best_x.size))
            f_start = None
        res = nelder_mead(
            problem,
            start,
            problem.steps(start, cfg.initial_step_fraction),
            remaining,
            xtol=cfg.xtol,
            ftol=cfg.ftol,
            f0=f_start,
        )
        used += res.evaluations
        converged = converged and res.converged
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun
    return best_x, best_f, used, converged


def refine(
    series: SampledSeries,
    m0: MultilogisticModel,
    cfg: Optional[RefineConfig] = None,
) -> tuple[MultilogisticModel, FitReport]:
    """Improve ``m0`` under the configured objective; never returns a worse model.

    Runs one Nelder-Mead search from ``m0`` followed by ``cfg.restarts``
    searches from jittered copies of the best point found so far, all drawing
    on one evaluation budget.  For the minimax objective the same search is
    first run on the least-squares objective (with half the budget) and its
    result used as the starting point when it is better in the max norm.
    ``report.converged`` is False when the budget ran out before a search met
    its stopping test.
    """
    cfg = cfg or RefineConfig()
    if len(m0.waves) == 0:
        raise DomainError("cannot refine an empty model")
    problem = _Problem(series, cfg.objective)
    rng = np.random.default_rng(cfg.seed)

    x0 = problem.encode(m0)
    f0 = problem(x0)
    start_x, start_f = x0, f0
    used = 1
    converged = True

    if cfg.objective == MINIMAX and cfg.warm_start:
        # the max-norm surface has kinks where a simplex tends to stall
        ls = _Problem(series, LEAST_SQUARES)
        x_ls, _, n, ok = _search(ls, x0, ls(x0), cfg, cfg.max_evaluations // 2, rng)
        used += n + 2
        converged = ok
        f_ls = problem(x_ls)
        if f_ls < start_f:
            start_x, start_f = x_ls, f_ls

    best_x, best_f, n, ok = _search(problem, start_x, start_f, cfg, cfg.max_evaluations - used, rng)
    used += n
    converged = converged and ok

    model = m0 if best_f >= f0 else problem.decode(best_x)
    report = fit_metrics(series, model)
    return model, dataclasses.replace(report, converged=converged, evaluations=used)


def objective_value(series: SampledSeries, m: MultilogisticModel, objective: str = MINIMAX) -> float:
    """Objective in series units (max |r| or RMSE)."""
    rep = fit_metrics(series, m)
    return rep.max_abs_error if objective == MINIMAX else rep.rmse
