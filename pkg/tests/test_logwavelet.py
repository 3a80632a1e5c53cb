import math

import mpmath
import numpy as np
import pytest

from multilogistic.errors import DomainError
from multilogistic.logwavelet import (
    ChildWaveletParams,
    TruncationError,
    child_psi2,
    mother_psi2,
    psi2_l2_norm,
    psi2_zero_mean,
)


def test_zero_at_origin():
    assert mother_psi2(0.0) == 0.0


def test_value_at_one_high_precision():
    mpmath.mp.dps = 40
    e = mpmath.e
    expected = float(mpmath.sqrt(30) * (e**-2 - e**-1) / (1 + e**-1) ** 3)
    assert mother_psi2(1.0) == pytest.approx(expected, rel=1e-14)
    assert mother_psi2(-1.0) == -mother_psi2(1.0)


def test_product_form_agrees():
    t = np.linspace(-8, 8, 161)
    sig = 1 / (1 + np.exp(-t))
    np.testing.assert_allclose(mother_psi2(t), math.sqrt(30) * sig * (1 - sig) * (1 - 2 * sig), atol=1e-15)


def test_far_tails_are_zero_and_finite():
    with np.errstate(over="raise", invalid="raise"):
        v = mother_psi2(np.array([-1000.0, -400.0, 400.0, 1000.0]))
    assert np.all(np.abs(v) < 1e-170)
    assert v[0] == 0.0 and v[-1] == 0.0
    assert v[1] == -v[2]


def test_second_derivative_of_logistic():
    h = 1e-4
    t = np.linspace(-10, 10, 201)
    sig = lambda u: 1 / (1 + np.exp(-u))
    d2 = (sig(t + h) - 2 * sig(t) + sig(t - h)) / h**2
    np.testing.assert_allclose(mother_psi2(t), math.sqrt(30) * d2, atol=1e-6)


class TestChild:
    def test_identity_child(self):
        t = np.linspace(-5, 5, 11)
        np.testing.assert_array_equal(child_psi2(ChildWaveletParams(1.0, 0.0), t), mother_psi2(t))

    def test_zero_at_center(self):
        assert child_psi2(ChildWaveletParams(4.0, 10.0), 10.0) == 0.0

    def test_dilation(self):
        assert child_psi2(ChildWaveletParams(4.0, 10.0), 14.0) == 0.5 * mother_psi2(1.0)

    def test_invalid_dilation(self):
        with pytest.raises(DomainError):
            ChildWaveletParams(0.0, 1.0)
        with pytest.raises(DomainError):
            ChildWaveletParams(-2.0, 1.0)


class TestQuadrature:
    def test_unit_norm(self):
        assert psi2_l2_norm(1e-3, 40.0) == pytest.approx(1.0, abs=1e-6)

    def test_norm_step_refinement(self):
        assert abs(psi2_l2_norm(1e-3, 40.0) - psi2_l2_norm(5e-4, 40.0)) < 1e-9

    def test_norm_exact_value(self):
        # 30 * int sigma''(t)^2 dt = 30 / 30
        mpmath.mp.dps = 30
        f = lambda u: 30 * (mpmath.exp(-2 * u) - mpmath.exp(-u)) ** 2 / (1 + mpmath.exp(-u)) ** 6
        assert float(mpmath.quad(f, [-mpmath.inf, 0, mpmath.inf])) == pytest.approx(1.0, abs=1e-20)

    def test_zero_mean(self):
        assert abs(psi2_zero_mean(1e-3, 40.0)) < 1e-10

    @pytest.mark.parametrize("a, b", [(3.0, 7.0), (0.25, -2.0), (11.0, 100.0)])
    def test_child_norm_and_mean(self, a, b):
        p = ChildWaveletParams(a, b)
        assert psi2_l2_norm(1e-3, 40.0, p) == pytest.approx(1.0, abs=1e-6)
        assert abs(psi2_zero_mean(1e-3, 40.0, p)) < 1e-10

    def test_narrow_window_flagged(self):
        with pytest.raises(TruncationError):
            psi2_l2_norm(1e-3, 3.0)
        with pytest.raises(TruncationError):
            psi2_zero_mean(1e-3, 10.0)
