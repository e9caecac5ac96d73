import math

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import exp1, gamma as cgamma

from heckecv.kernels import (
    CertificateError,
    ToleranceError,
    complex_inc_gamma,
    inc_gamma_ratio,
    log_kernel,
    log_kernel_by_quadrature,
    log_kernel_ratio,
    log_kernel_ratio_bound,
    log_weight_integral,
    log_weight_integral_bound,
    upper_gamma,
    vertical_line_integral,
    zeta_line,
)


def test_inc_gamma_ratio_values():
    assert inc_gamma_ratio(1, 0.0) == 1.0
    assert inc_gamma_ratio(2, 1.0) == pytest.approx(2.0 / math.e, abs=1e-15)
    assert inc_gamma_ratio(3, 0.0) == 1.0
    assert inc_gamma_ratio(1, 800.0) == 0.0  # graceful underflow


def test_inc_gamma_ratio_against_quadrature():
    for k in range(1, 7):
        for x in np.linspace(0.0, 50.0, 26):
            num, _ = quad(lambda t: math.exp(-t) * t ** (k - 1), x, x + 80.0, limit=200)
            assert abs(inc_gamma_ratio(k, x) - num / math.factorial(k - 1)) < 1e-10


def test_inc_gamma_ratio_monotone_and_bounded():
    xs = np.linspace(0.0, 100.0, 400)
    for k in (1, 2, 4):
        vals = inc_gamma_ratio(k, xs)
        assert np.all(np.diff(vals) <= 1e-16)
        assert np.all((0.0 <= vals) & (vals <= 1.0))


def test_log_kernel_e1_case():
    # G_1(x) = E_1(x)
    assert log_kernel(1, 1.0) == pytest.approx(0.21938393439552062, abs=1e-12)
    xs = np.array([0.1, 0.7, 2.0, 9.0])
    assert np.allclose(log_kernel(1, xs), exp1(xs), atol=1e-13)


def test_log_kernel_against_defining_integral():
    # oracle: direct quadrature of int_x^inf e^-t t^(k-1) log(t/x) dt
    for k in (1, 2, 3):
        for x in (0.2, 1.0, 3.5, 8.0):
            num, _ = quad(lambda t: math.exp(-t) * t ** (k - 1) * math.log(t / x),
                          x, x + 90.0, limit=300)
            assert abs(log_kernel(k, x) - num) < 1e-9, (k, x)


def test_log_kernel_quadrature_route():
    for k in (1, 2):
        for x in (0.5, 2.0):
            a = log_kernel(k, x)
            b = log_kernel_by_quadrature(k, x, tol=1e-10)
            assert abs(a - b) < 1e-9


def test_log_kernel_positive_decreasing():
    xs = np.linspace(0.05, 30.0, 300)
    for k in (1, 2):
        vals = log_kernel(k, xs)
        assert np.all(vals > 0)
        assert np.all(np.diff(vals) < 0)


def test_log_kernel_derivative_identity():
    # d G_k / dx = -Gamma(k, x)/x by central differences
    for k in (1, 2, 3):
        for x in (0.5, 1.0, 4.0):
            h = 1e-6
            fd = (log_kernel(k, x + h) - log_kernel(k, x - h)) / (2 * h)
            assert abs(fd + upper_gamma(k, x) / x) < 1e-7


def test_log_kernel_ratio_bound_dominates():
    ys = np.linspace(0.2, 40.0, 100)
    for k in (1, 2):
        assert np.all(log_kernel_ratio_bound(k, ys) >= log_kernel_ratio(k, ys) - 1e-15)


def test_complex_inc_gamma():
    assert complex_inc_gamma(1, 0.0) == pytest.approx(1.0, abs=1e-8)
    assert complex_inc_gamma(2, 1.0) == pytest.approx(2.0 / math.e, abs=1e-8)
    a = complex_inc_gamma(1 + 1j, 1.0)
    b = complex_inc_gamma(1 - 1j, 1.0)
    assert a.conjugate() == pytest.approx(b, abs=1e-10)
    # mpmath oracle
    ref = complex(mp.gammainc(mp.mpc(1, 1), 1, mp.inf))
    assert a == pytest.approx(ref, abs=1e-8)
    with pytest.raises(ValueError):
        complex_inc_gamma(-1, 1.0)


def test_zeta_line_values():
    assert zeta_line(6).real == pytest.approx(math.pi ** 6 / 945, abs=1e-12)
    assert zeta_line(3).real == pytest.approx(1.2020569031595943, abs=1e-12)
    s = 3 + 4j
    assert zeta_line(s.conjugate()) == pytest.approx(zeta_line(s).conjugate(), abs=1e-13)
    with pytest.raises(ValueError):
        zeta_line(2.0)


def test_zeta_line_against_mpmath():
    mp.mp.dps = 25
    for s in (2.5, 3.0 + 7j, 6.0 - 11j, 4.5 + 30j):
        ref = complex(mp.zeta(s))
        assert zeta_line(s) == pytest.approx(ref, abs=1e-12)


def test_log_weight_integral_constant():
    assert log_weight_integral(4.0, tol=1e-8) > 0.0351


def test_log_weight_integral_positive_grid():
    for x in np.geomspace(0.25, 64.0, 17):
        assert log_weight_integral(float(x), tol=1e-8) > 0.0


def test_log_weight_integral_tolerance_consistency():
    for x in (0.5, 1.0, 2.0, 8.0, 32.0):
        a = log_weight_integral(x, tol=1e-8)
        b = log_weight_integral(x, tol=1e-10)
        assert abs(a - b) <= 1e-8


def test_log_weight_integral_against_slow_quadrature():
    # independent route: fresh composite quadrature with its own height
    from heckecv.kernels import _iweight_profile

    for x in (0.7, 4.0, 40.0):
        T = 24.0
        nodes, wts = np.polynomial.legendre.leggauss(40)
        total = 0.0
        panels = 96
        for p in range(panels):
            a, b = T * p / panels, T * (p + 1) / panels
            t = 0.5 * (b - a) * nodes + 0.5 * (a + b)
            w = 0.5 * (b - a) * wts
            total += float(np.dot(w, (x ** (1 + 1j * t) * _iweight_profile(t)).real))
        assert log_weight_integral(x) == pytest.approx(total / math.pi, abs=1e-10)


def test_log_weight_bound_dominates():
    for x in (0.01, 0.1, 0.5, 0.9):
        assert log_weight_integral_bound(x) >= abs(log_weight_integral(x)) - 1e-14


def test_vertical_line_integral_mellin_case():
    # f = Gamma(s)/(s-1)^2 on Re s = 2 equals int_1^inf e^-t log t dt = E_1(1)
    f = lambda s: cgamma(s) / (s - 1) ** 2
    v = vertical_line_integral(f, 2.0, 1.0, 1e-9, decay=(10.0, 1.4))
    assert v.real == pytest.approx(exp1(1.0), abs=1e-9)
    assert abs(v.imag) < 1e-9


def test_vertical_line_integral_linearity():
    f = lambda s: cgamma(s) / (s - 1) ** 2
    g = lambda s: 3.0 * cgamma(s) / (s - 1) ** 2
    vf = vertical_line_integral(f, 2.0, 1.0, 1e-9, decay=(10.0, 1.4))
    vg = vertical_line_integral(g, 2.0, 1.0, 1e-9, decay=(30.0, 1.4))
    assert vg == pytest.approx(3.0 * vf, abs=1e-9)


def test_vertical_line_certificate_enforced():
    # a certificate that decays too fast gets caught by the sampled check
    f = lambda s: cgamma(s) / (s - 1) ** 2
    with pytest.raises(CertificateError):
        vertical_line_integral(f, 2.0, 1.0, 1e-9, decay=(1e-6, 3.0))
    with pytest.raises(CertificateError):
        vertical_line_integral(f, 2.0, 1.0, 1e-9, decay=(-1.0, 1.0))


def test_kernels_finite_at_large_argument():
    for k in (1, 2):
        assert np.isfinite(inc_gamma_ratio(k, 1e4))
        assert inc_gamma_ratio(k, 1e4) == 0.0
        assert np.isfinite(log_kernel_ratio(k, 1e4))
