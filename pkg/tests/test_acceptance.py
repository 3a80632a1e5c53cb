"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import math
import time

import numpy as np
import pytest

import property_suites
from conftest import ACCEPTANCE_LINES, GOMPERTZ, OPTIMIZED_WAVES
from multilogistic.diffcwt import central_diff, index_from_saturation, scalogram
from multilogistic.extract import decompose
from multilogistic.logwavelet import psi2_l2_norm, psi2_zero_mean
from multilogistic.refine import RefineConfig, fit_metrics, refine, residual_tail_gap
from multilogistic.scurve import LogisticWave, MultilogisticModel, sample_curve


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE_LINES.append(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def series():
    return sample_curve(GOMPERTZ, 0.0, 201.0, 1.0)


@pytest.fixture(scope="module")
def extraction(series):
    t0 = time.perf_counter()
    model, trace = decompose(series)
    return model, trace, time.perf_counter() - t0


def test_criterion_1_wavelet_axioms():
    t0 = time.perf_counter()
    mean = psi2_zero_mean(1e-3, 40.0)
    norm = psi2_l2_norm(1e-3, 40.0)
    dt = time.perf_counter() - t0
    ok = abs(mean) <= 1e-10 and abs(norm - 1) <= 1e-6 and dt < 1.0
    record(1, ok, f"int psi={mean:.3e}, int psi^2={norm:.12f}, {dt:.3f}s")


def test_criterion_2_lemma_reproduction():
    t0 = time.perf_counter()
    wave = LogisticWave(6.115, 50.0, 87959.0)
    s = scalogram(central_diff(sample_curve(wave, 0, 201, 1), 2))
    a, b = s.argmax()
    nearest_a = s.scales[np.argmin(np.abs(np.log(s.scales / wave.a)))]
    nearest_b = s.shifts[np.argmin(np.abs(s.shifts - wave.b))]
    expected = index_from_saturation(wave.a, wave.y_sat)
    peak = float(s.index.max())
    dt = time.perf_counter() - t0
    ok = a == nearest_a and b == nearest_b and abs(peak / expected - 1) <= 0.03 and dt < 5.0
    record(2, ok, f"argmax=({a:.4f}, {b:g}) nearest=({nearest_a:.4f}, {nearest_b:g}), Index={peak:.2f} vs {expected:.2f}, {dt:.2f}s")


def test_criterion_3_first_pass(extraction):
    _, trace, dt = extraction
    w = trace.iterations[0].waves[0]
    ok = abs(w.b - 50) <= 1 and 5.5 <= w.a <= 6.8 and 83500 <= w.y_sat <= 92500 and dt < 10.0
    record(3, ok, f"wave a={w.a:.4f} b={w.b:.3f} y_sat={w.y_sat:.0f} (want a in [5.5,6.8], |b-50|<=1, y_sat in [83500,92500]), {dt:.2f}s")


def test_criterion_4_second_pass(extraction):
    _, trace, dt = extraction
    second = trace.iterations[1].waves
    neg = [w for w in second if w.y_sat < 0]
    pos = [w for w in second if w.y_sat > 0]
    ok = len(neg) == 1 and len(pos) == 1
    detail = f"{len(neg)} negative, {len(pos)} positive"
    if ok:
        n, p = neg[0], pos[0]
        ok = (
            32 <= n.b <= 36
            and -12500 <= n.y_sat <= -9300
            and 64 <= p.b <= 68
            and 19500 <= p.y_sat <= 24000
            and dt < 10.0
        )
        detail = (
            f"negative b={n.b:.2f} y_sat={n.y_sat:.0f} (want [32,36], [-12500,-9300]); "
            f"positive b={p.b:.2f} y_sat={p.y_sat:.0f} (want [64,68], [19500,24000])"
        )
    record(4, ok, detail)


def test_criterion_5_unrefined_fit(series, extraction):
    model, _, _ = extraction
    rep = fit_metrics(series, model)
    ok = rep.max_abs_error <= 2200 and rep.rmse <= 1200 and rep.r_squared >= 0.9996
    record(5, ok, f"max={rep.max_abs_error:.1f} rmse={rep.rmse:.1f} R2={rep.r_squared:.6f} (want <=2200, <=1200, >=0.9996)")


def test_criterion_6_refined_minimax(series, extraction):
    model, _, _ = extraction
    t0 = time.perf_counter()
    _, rep = refine(series, model, RefineConfig())
    dt = time.perf_counter() - t0
    ok = rep.max_abs_error <= 600 and rep.rmse <= 250 and rep.r_squared >= 0.99997 and dt < 60.0
    record(6, ok, f"max={rep.max_abs_error:.1f} rmse={rep.rmse:.1f} R2={rep.r_squared:.7f}, {dt:.2f}s")


def test_criterion_7_metrics_oracle(series):
    rep = fit_metrics(series, OPTIMIZED_WAVES)
    ok = abs(rep.max_abs_error - 525) <= 2 and abs(rep.rmse - 160) <= 2 and abs(rep.r_squared - 0.999985) <= 1e-5
    record(7, ok, f"max={rep.max_abs_error:.2f} rmse={rep.rmse:.2f} R2={rep.r_squared:.7f}")


def test_criterion_8_saturation_gap(series):
    raw = MultilogisticModel(
        (LogisticWave(6.115, 50.0, 87959.0), LogisticWave(4.028, 34.0, -10910.0), LogisticWave(6.74, 66.0, 21698.0))
    )
    gap = residual_tail_gap(series, raw)
    record(8, abs(gap - 1253) <= 5, f"gap={gap:.3f}")


PROPERTY_SUITES = [
    "test_second_difference_annihilates_affine",
    "test_scalogram_linearity",
    "test_psi2_antisymmetry",
    "test_refine_never_worsens",
    "test_refine_shift_equivariance",
    "test_refine_scale_equivariance",
    "test_refine_scale_equivariance_general_factor",
    "test_decompose_trace_consistency",
]


@pytest.mark.parametrize("name", PROPERTY_SUITES)
def test_criterion_9_property_suites(name):
    fn = getattr(property_suites, name)
    assert fn.hypothesis.inner_test is not None
    try:
        fn()
    except Exception as exc:
        record(9, False, f"{name}: {type(exc).__name__}")
    record(9, True, f"{name}: 200 examples")


def test_criterion_10_round_trip():
    rng = np.random.default_rng(20241018)
    hits = 0
    misses = []
    for trial in range(100):
        a = rng.uniform(3.0, 12.0)
        n = math.ceil(20 * a)
        b = rng.uniform(0.4 * n, 0.6 * n)
        y_sat = rng.choice([-1.0, 1.0]) * 10 ** rng.uniform(2, 5)
        truth = LogisticWave(a, b, y_sat)
        s = sample_curve(truth, 0, n, 1)
        model, _ = decompose(s)
        if len(model) == 0:
            misses.append(trial)
            continue
        fitted, _ = refine(s, model, RefineConfig(seed=trial))
        w = max(fitted.waves, key=lambda v: abs(v.y_sat))
        if abs(w.a / a - 1) <= 0.005 and abs(w.b - b) <= 0.05 and abs(w.y_sat / y_sat - 1) <= 0.005:
            hits += 1
        else:
            misses.append(trial)
    record(10, hits >= 95, f"{hits}/100 trials recovered (misses: {misses[:10]})")
