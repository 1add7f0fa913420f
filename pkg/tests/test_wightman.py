import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from euqoe.errors import DomainError
from euqoe.wightman import (DetectorPairKinematics, bessel_k_imag, cross_kernel_1p3,
                            exchange_pair, g11_kernel_1p1, g12_kernel_1p1, g_kernel_1p3,
                            rescaled_pair, same_kernel_1p3)


def test_kinematics_validation():
    with pytest.raises(DomainError):
        DetectorPairKinematics(1.0, 0.0)
    with pytest.raises(DomainError):
        DetectorPairKinematics(0.0, 0.5)
    kin = DetectorPairKinematics.from_second(0.0, 2.0)
    assert (kin.a1, kin.a2) == (0.0, 2.0)
    assert DetectorPairKinematics(1.5, 0.5).a2 == 3.0


def test_cross_weight_example():
    rec = g12_kernel_1p1(1.0, DetectorPairKinematics(1.0, 1.0))
    assert rec.weight == pytest.approx(1 / (4 * math.pi * math.sinh(math.pi)), rel=1e-14)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 1.0])
def test_large_k_ratio_tends_to_one(alpha):
    a1 = 1.7
    k = 50 * a1 / math.pi
    rec = g12_kernel_1p1(k, DetectorPairKinematics(a1, alpha))
    ratio = 4 * math.pi * k * float(rec.weight) * math.sinh(math.pi * k * (1 + alpha) / (2 * a1))
    assert ratio == pytest.approx(1.0, abs=1e-12)


def test_same_detector_small_k_divergence():
    # the coth(pi k / a) / k weight behaves like a / (pi k^2)
    a1 = 0.8
    k = 1e-5
    rec = g11_kernel_1p1(k, a1)
    coth_over_k = 2 * math.pi * float(rec.sum)
    assert coth_over_k * math.pi * k * k / a1 == pytest.approx(1.0, rel=1e-8)


@given(st.floats(1e-4, 40), st.floats(0.1, 5), st.floats(0.05, 1))
def test_kernel_parts_consistent(k, a1, alpha):
    rec = g12_kernel_1p1(k, DetectorPairKinematics(a1, alpha))
    assert rec.plus > 0 and rec.minus >= 0 and rec.difference > 0
    assert rec.difference == pytest.approx(rec.plus - rec.minus, rel=1e-10)
    assert rec.weight ** 2 == pytest.approx(rec.plus * rec.minus, rel=1e-10)


@pytest.mark.parametrize("k", [0.0, -1.0, math.nan])
def test_kernel_rejects_nonpositive_frequency(k):
    with pytest.raises(DomainError):
        g12_kernel_1p1(k, DetectorPairKinematics(1.0, 1.0))


@settings(max_examples=100)
@given(st.floats(0.2, 5), st.floats(0.05, 1), st.floats(0.01, 20), st.floats(-5, 5),
       st.floats(-5, 5))
def test_exchange_identity(a1, alpha, k, tp, tpp):
    lhs, rhs = exchange_pair(k, tp, tpp, DetectorPairKinematics(a1, alpha))
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


@settings(max_examples=100)
@given(st.floats(0.2, 5), st.floats(0.05, 1), st.floats(0.01, 20), st.floats(-5, 5),
       st.floats(-5, 5))
def test_rescaling_identity(a1, alpha, y, tp, tpp):
    g22, g11 = rescaled_pair(y, tp, tpp, DetectorPairKinematics(a1, alpha))
    assert abs(g22 - g11) <= 1e-12 * abs(g11)


def test_k0_example():
    assert bessel_k_imag(0.0, 1.0) == pytest.approx(0.42102444, abs=5e-9)
    assert bessel_k_imag(0.0, 1.0) == pytest.approx(float(mpmath.besselk(0, 1)), rel=1e-12)


@pytest.mark.parametrize("nu, x", [(0.5, 0.3), (1.0, 5.0), (3.0, 1.0), (12.0, 2.0),
                                   (40.0, 0.5), (8.0, 30.0)])
def test_imaginary_order_against_mpmath(nu, x):
    want = float(mpmath.re(mpmath.besselk(1j * nu, x)))
    scale = math.exp(-0.5 * math.pi * nu) * math.sqrt(math.pi / (2 * x)) * math.exp(-x)
    assert abs(bessel_k_imag(nu, x) - want) < 1e-10 * max(abs(want), scale)


def test_imaginary_order_is_even():
    assert bessel_k_imag(-2.5, 1.3) == bessel_k_imag(2.5, 1.3)


def test_self_convergence_in_step():
    assert bessel_k_imag(1.0, 5.0, tol=1e-6) == pytest.approx(bessel_k_imag(1.0, 5.0), rel=1e-6)


def test_bessel_rejects_nonpositive_argument():
    with pytest.raises(DomainError):
        bessel_k_imag(1.0, 0.0)


def test_transverse_kernel_is_bessel_square_for_equal_accelerations():
    kin = DetectorPairKinematics(1.3, 1.0)
    kp = np.array([0.2, 1.0, 3.0])
    rec = g_kernel_1p3(2.0, kp, kin)
    kb = np.array([float(mpmath.re(mpmath.besselk(2j / 1.3, v / 1.3))) for v in kp])
    pref = 2.0 / (2 * math.pi) ** 4 / 1.3 * 2 * math.pi * kp
    np.testing.assert_allclose(rec.weight, pref * kb * kb, rtol=1e-10)


def test_transverse_kernel_decays_exponentially():
    kin = DetectorPairKinematics(1.0, 0.5)
    kp = np.array([10.0, 20.0, 40.0])
    plus = g_kernel_1p3(1.0, kp, kin).plus
    assert np.all(plus > 0)
    # K(x/a1) K(x/a2) ~ exp(-x (1/a1 + 1/a2)) = exp(-1.5 x)
    assert plus[1] / plus[0] < math.exp(-1.4 * 10)
    assert plus[2] / plus[1] < math.exp(-1.4 * 20)


def test_polar_measure_on_radial_function():
    flat, _ = integrate.dblquad(lambda y, x: math.exp(-(x * x + y * y)), -8, 8, -8, 8)
    polar, _ = integrate.quad(lambda r: 2 * math.pi * r * math.exp(-r * r), 0, np.inf)
    assert flat == pytest.approx(polar, rel=1e-10)
    assert polar == pytest.approx(math.pi, rel=1e-12)


@pytest.mark.parametrize("omega, alpha", [(0.5, 1.0), (2.0, 0.6), (4.0, 0.3)])
def test_closed_transverse_integral_matches_bessel_quadrature(omega, alpha):
    kin = DetectorPairKinematics(1.0, alpha)
    numeric, _ = integrate.quad(lambda kp: float(g_kernel_1p3(omega, kp, kin).plus), 0, 60,
                                epsabs=0, epsrel=1e-11, limit=400)
    assert float(cross_kernel_1p3(omega, kin).plus) == pytest.approx(numeric, rel=1e-8)


def test_same_kernel_is_equal_acceleration_cross_kernel():
    w = np.array([0.3, 1.0, 5.0])
    np.testing.assert_allclose(same_kernel_1p3(w, 0.7).plus,
                               cross_kernel_1p3(w, DetectorPairKinematics(0.7, 1.0)).plus,
                               rtol=1e-15)
    # equal accelerations: (a^2/2) (pi nu / sinh pi nu) e^{pi nu} per unit measure
    nu = w / 0.7
    want = 2 / (2 * math.pi) ** 4 / 0.7 * 2 * math.pi * 0.5 * 0.49 * (
        math.pi * nu / np.sinh(math.pi * nu)) * np.exp(math.pi * nu)
    np.testing.assert_allclose(same_kernel_1p3(w, 0.7).plus, want, rtol=1e-12)
