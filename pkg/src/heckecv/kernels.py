"""Special-function machinery for the smoothed central-value sums.

Everything the summation layers need: the normalized upper incomplete
gamma Gamma(k,x)/Gamma(k) in exact closed form for integer k, the
log-weighted kernel G_k(x) = int_x^inf e^-t t^(k-1) log(t/x) dt, the
complex incomplete gamma by quadrature, the Riemann zeta function on
vertical lines Re s >= 2.5 by Euler-Maclaurin with a certified
remainder, a generic truncated vertical-line integrator driven by
caller-supplied decay certificates, and the positive Mellin transform
I(x) = (1/2 pi i) int_(2) x^(s-1) Gamma(s) zeta(4s-2)/zeta(2s-1) ds/(s-1)^2
used by the rational-part lower bound (I(x) > 0.0351 for x >= 4).

All tolerances are absolute: central values near zero are the regime
that matters.  Hot paths use exact finite sums; adaptive quadrature of
the defining integrals is kept alongside as the independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import exp1 as _scipy_exp1
from scipy.special import gamma as _cgamma

EULER_GAMMA = 0.57721566490153286061

# B_2, B_4, ..., B_24
_BERNOULLI = (
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6,
    -3617 / 510, 43867 / 798, -174611 / 330, 854513 / 138, -236364091 / 2730,
)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


class ToleranceError(ArithmeticError):
    """Requested absolute tolerance could not be certified."""

    def __init__(self, msg: str, achieved: float | None = None):
        super().__init__(msg if achieved is None else f"{msg} (achieved bound {achieved:.3e})")
        self.achieved = achieved


class CertificateError(ValueError):
    """A decay certificate was missing or failed its sampled check."""


@dataclass(frozen=True)
class AccuracyBudget:
    abs_tol: float
    achieved_bound: float
    truncation_height: float

    @property
    def ok(self) -> bool:
        return self.achieved_bound <= self.abs_tol


def inc_gamma_ratio(k: int, x):
    """Gamma(k, x)/Gamma(k) = e^-x sum_{j<k} x^j/j! for integer k >= 1.

    Accepts scalars or numpy arrays; monotone decreasing in x, values
    in [0, 1], underflows to 0 gracefully for large x.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    x = np.asarray(x, dtype=np.float64)
    s = np.ones_like(x)
    term = np.ones_like(x)
    for j in range(1, k):
        term = term * x / j
        s = s + term
    out = np.exp(-x) * s
    return float(out) if out.ndim == 0 else out


def upper_gamma(k: int, x):
    """Unnormalized Gamma(k, x) for integer k >= 1."""
    return math.factorial(k - 1) * inc_gamma_ratio(k, x)


def exp1(x):
    """Exponential integral E_1(x) for x > 0 (scipy ufunc, vectorized)."""
    return _scipy_exp1(x)


def log_kernel_ratio(k: int, x):
    """G_k(x)/Gamma(k) where G_k(x) = int_x^inf e^-t t^(k-1) log(t/x) dt.

    Uses G_k(x) = int_x^inf Gamma(k,t) dt/t, which for integer k
    collapses to E_1(x) + sum_{j=1}^{k-1} Gamma(j,x)/j!.  Positive and
    decreasing in x; dG_k/dx = -Gamma(k,x)/x.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    x = np.asarray(x, dtype=np.float64)
    out = _scipy_exp1(x)
    for j in range(1, k):
        out = out + upper_gamma(j, x) / math.factorial(j)
    return float(out) if np.ndim(out) == 0 else out


def log_kernel(k: int, x):
    """G_k(x) = int_x^inf e^-t t^(k-1) log(t/x) dt, unnormalized."""
    return math.factorial(k - 1) * log_kernel_ratio(k, x)


def log_kernel_by_quadrature(k: int, x: float, tol: float = 1e-10) -> float:
    """G_k(x) by adaptive quadrature of int_x^inf Gamma(k,t) dt/t.

    Independent of the closed form above; raises ToleranceError when the
    certified truncation-plus-quadrature bound exceeds ``tol``.
    """
    if x <= 0:
        raise ValueError("x must be positive")

    def tail_bound(T: float) -> float:
        # int_T^inf Gamma(k,t)/t dt <= (Gamma(k+1,T) - T Gamma(k,T)) / T
        return (upper_gamma(k + 1, T) - T * upper_gamma(k, T)) / T

    T = max(x + 10.0, 4.0 * k)
    while tail_bound(T) > 0.5 * tol and T < 800:
        T *= 1.5
    cuts = list(np.arange(x, T, 8.0)) + [T]
    val = err = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        v, e = quad(lambda t: upper_gamma(k, t) / t, a, b,
                    epsabs=0.2 * tol / (len(cuts) - 1), epsrel=1e-13, limit=200)
        val += v
        err += e
    achieved = err + tail_bound(T)
    if achieved > tol:
        raise ToleranceError("log_kernel quadrature tolerance not achievable", achieved)
    return val


def log_kernel_ratio_bound(k: int, y):
    """Upper bound for G_k(y)/Gamma(k): (Gamma(k+1,y) - y Gamma(k,y)) / (y Gamma(k))."""
    y = np.asarray(y, dtype=np.float64)
    out = (k * inc_gamma_ratio(k + 1, y) - y * inc_gamma_ratio(k, y)) / np.maximum(y, 1e-300)
    return float(out) if np.ndim(out) == 0 else out


def complex_inc_gamma(s: complex, y: float, tol: float = 1e-8) -> complex:
    """int_y^inf e^-t t^(s-1) dt for Re s > 0 by adaptive quadrature."""
    s = complex(s)
    if s.real <= 0:
        raise ValueError("need Re s > 0")
    if y < 0:
        raise ValueError("need y >= 0")
    # tail beyond T: |t^(s-1)| = t^(Re s - 1); int_T^inf e^-t t^(sig-1) dt <= 2 e^-T T^(sig-1) for T >= 2 sig
    sig = s.real
    T = max(2.0 * sig + 10.0, y + 10.0)
    while 2.0 * math.exp(-T) * T ** max(sig - 1.0, 0.0) > 0.5 * tol and T < 900:
        T *= 1.4
    lo = max(y, 0.0)

    def f_re(t):
        return math.exp(-t) * (t ** (s - 1)).real if t > 0 else 0.0

    def f_im(t):
        return math.exp(-t) * (t ** (s - 1)).imag if t > 0 else 0.0

    cuts = [lo]
    while cuts[-1] + 8.0 < T:
        cuts.append(cuts[-1] + 8.0)
    cuts.append(T)
    nseg = len(cuts) - 1
    re = im = err = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        r, er = quad(f_re, a, b, epsabs=0.1 * tol / nseg, epsrel=1e-13, limit=200)
        i, ei = quad(f_im, a, b, epsabs=0.1 * tol / nseg, epsrel=1e-13, limit=200)
        re += r
        im += i
        err += er + ei
    achieved = err + 2.0 * math.exp(-T) * T ** max(sig - 1.0, 0.0)
    if achieved > tol:
        raise ToleranceError("complex incomplete gamma tolerance not achievable", achieved)
    return complex(re, im)


def _zeta_em(s: np.ndarray, N: int, J: int) -> tuple[np.ndarray, float]:
    """Euler-Maclaurin zeta on an array of points; returns (values, remainder bound)."""
    s = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    ns = np.arange(1, N, dtype=np.float64)
    vals = np.sum(ns[None, :] ** (-s[:, None]), axis=1)
    vals += N ** (1.0 - s) / (s - 1.0) + 0.5 * N ** (-s)
    fac = s.copy()
    for j in range(1, J + 1):
        vals += _BERNOULLI[j - 1] / math.factorial(2 * j) * fac * N ** (-s - (2 * j - 1))
        fac = fac * (s + 2 * j - 1) * (s + 2 * j)
    # remainder <= |first omitted term| * |(s + 2J + 1)/(sigma + 2J + 1)|
    term = np.abs(_BERNOULLI[J] / math.factorial(2 * J + 2) * fac * N ** (-s - (2 * J + 1)))
    slack = np.abs(s + 2 * J + 1) / (s.real + 2 * J + 1)
    bound = float(np.max(term * slack))
    return vals, bound


def zeta_line(s: complex) -> complex:
    """Riemann zeta for Re s >= 2.5, Euler-Maclaurin, certified remainder <= 1e-12."""
    s = complex(s)
    if s.real < 2.5:
        raise ValueError("zeta_line requires Re s >= 2.5")
    vals, bound = _zeta_em(np.array([s]), N=max(24, int(1.0 * abs(s.imag)) + 24), J=9)
    if bound > 1e-12:
        raise ToleranceError("zeta Euler-Maclaurin remainder too large", bound)
    v = complex(vals[0])
    # Re s >= 2.5 keeps |zeta| >= 2 - zeta(2.5) ~ 0.659, safely off the zero set.
    if abs(v) < 0.5:
        raise ArithmeticError("zeta magnitude sanity check failed")
    return v


def _zeta_em_array(s: np.ndarray) -> np.ndarray:
    """Vectorized zeta for arrays on vertical lines; remainder asserted <= 1e-12."""
    tmax = float(np.max(np.abs(s.imag))) if s.size else 0.0
    vals, bound = _zeta_em(s, N=max(24, int(tmax) + 24), J=9)
    if bound > 1e-12:
        raise ToleranceError("zeta Euler-Maclaurin remainder too large", bound)
    return vals


def _gl_panel_sum(f, t0: float, t1: float, panels: int) -> complex:
    """Composite 24-point Gauss-Legendre of f over [t0, t1] with fixed panel count."""
    total = 0.0 + 0.0j
    width = (t1 - t0) / panels
    for p in range(panels):
        a = t0 + p * width
        t = 0.5 * width * _GL_NODES + (a + 0.5 * width)
        w = 0.5 * width * _GL_WEIGHTS
        total += np.sum(w * f(t))
    return total


def vertical_line_integral(f, sigma: float, center: complex, tol: float,
                           decay: tuple[float, float]) -> complex:
    """(1/2 pi i) int f(s) ds along Re s = sigma, truncated by a decay certificate.

    ``decay = (A, c)`` asserts |f(sigma + it)| <= A e^(-c|t - Im center|);
    the certificate is sampled before use and drives the truncation
    height so the discarded tail is below tol/2.  ``f`` must accept a
    numpy array of s values.
    """
    A, c = decay
    if not (A > 0 and c > 0):
        raise CertificateError("decay certificate (A, c) with A, c > 0 is required")
    t0 = complex(center).imag
    T = math.log(max(4.0 * A / (c * 0.5 * tol), 4.0)) / c
    # sampled certificate check
    for tt in (0.6 * T, T):
        sval = np.array([complex(sigma, t0 + tt), complex(sigma, t0 - tt)])
        fv = np.abs(f(sval))
        lim = A * math.exp(-c * tt) * (1.0 + 1e-9) + 1e-300
        if fv.max() > lim:
            raise CertificateError(
                f"decay certificate violated at |t|={tt:.3g}: |f|={fv.max():.3e} > {lim:.3e}")

    def g(t):
        return f(sigma + 1j * (t0 + np.asarray(t)))

    panels = max(8, int(T))
    prev = _gl_panel_sum(g, -T, T, panels)
    for _ in range(5):
        panels *= 2
        cur = _gl_panel_sum(g, -T, T, panels)
        if abs(cur - prev) <= 0.25 * tol:
            prev = cur
            break
        prev = cur
    else:
        raise ToleranceError("vertical line quadrature did not settle", abs(cur - prev))
    # int f ds = i * int f(sigma+it) dt; divide by 2 pi i
    return prev / (2.0 * math.pi)


_IWEIGHT_GRID: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
_IWEIGHT_T = 28.0


def _iweight_profile(t: np.ndarray) -> np.ndarray:
    """Gamma(s) zeta(4s-2)/zeta(2s-1)/(s-1)^2 on s = 2 + it (the x-free factor)."""
    s = 2.0 + 1j * np.asarray(t, dtype=np.float64)
    num = _zeta_em_array(4.0 * s - 2.0)
    den = _zeta_em_array(2.0 * s - 1.0)
    if float(np.min(np.abs(den))) < 0.5:
        raise ArithmeticError("zeta magnitude sanity check failed on Re = 3")
    return _cgamma(s) * num / den / (s - 1.0) ** 2


def _iweight_grid() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cached Gauss-Legendre nodes/weights on [0, T] and the x-free integrand factor.

    Built once; a half-width refinement must agree to 1e-13 on a probe
    value or the cache is rejected.  The probe integrates the most
    oscillatory admissible x.
    """
    global _IWEIGHT_GRID
    if _IWEIGHT_GRID is not None:
        return _IWEIGHT_GRID

    def build(width: float):
        ts, ws = [], []
        for p in range(int(_IWEIGHT_T / width)):
            a = p * width
            ts.append(0.5 * width * _GL_NODES + (a + 0.5 * width))
            ws.append(0.5 * width * _GL_WEIGHTS)
        t = np.concatenate(ts)
        w = np.concatenate(ws)
        return t, w, _iweight_profile(t)

    t, w, g = build(0.5)
    t2, w2, g2 = build(0.25)  # half-width refinement for the self-check
    for xprobe in (0.003, 0.9, 800.0, 5000.0):
        v1 = float(np.dot(w, (xprobe ** (1.0 + 1j * t) * g).real))
        v2 = float(np.dot(w2, (xprobe ** (1.0 + 1j * t2) * g2).real))
        if abs(v1 - v2) > 1e-13 * max(1.0, abs(v1)):
            raise ToleranceError("log-weight quadrature grid failed self-check",
                                 abs(v1 - v2))
    _IWEIGHT_GRID = (t, w, g)
    return _IWEIGHT_GRID


def log_weight_integral(x: float, tol: float = 1e-10) -> float:
    """I(x) = (1/2 pi i) int_(2) x^(s-1) Gamma(s) zeta(4s-2)/zeta(2s-1) ds/(s-1)^2.

    Real and positive for x > 0, with I(x) > 0.0351 once x >= 4; this is
    the term weight in the a_n expansion of the rational-side central
    derivative.  Evaluated on Re s = 2 with conjugate symmetry; the
    truncation height carries a Gamma-decay certificate:
    |Gamma(2+it)| <= sqrt(2.01 pi t (1+t^2)) e^(-pi t/2) for t >= 1 and
    the zeta ratio stays below zeta(6)/(2 - zeta(3)) < 1.275.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    if x > 5000.0:
        raise ValueError("x above the certified grid range")
    tail = 0.66 * max(x, 1.0) * math.exp(-0.5 * math.pi * _IWEIGHT_T)
    if tail > 0.5 * tol:
        raise ToleranceError("log-weight integral truncation too coarse", tail)
    t, w, g = _iweight_grid()
    # conjugate symmetry: full integral = 2 Re(half line); 1/(2 pi) * 2 = 1/pi
    val = float(np.dot(w, (x ** (1.0 + 1j * t) * g).real)) / math.pi
    return val


def log_weight_integral_bound(x: float, sigma: float = 6.0) -> float:
    """Certified bound |I(x)| <= C(sigma) x^(sigma-1), useful for x < 1 tails."""
    C = _iweight_line_constant(sigma)
    return C * x ** (sigma - 1.0)


_IWEIGHT_CONST_CACHE: dict[float, float] = {}


def _iweight_line_constant(sigma: float) -> float:
    """C(sigma) = (1/2 pi) int |Gamma(sigma+it)| Zbound dt / |sigma-1+it|^2 (numeric, cached)."""
    if sigma in _IWEIGHT_CONST_CACHE:
        return _IWEIGHT_CONST_CACHE[sigma]
    zbound = abs(zeta_line(4 * sigma - 2)) / (2.0 - abs(zeta_line(2 * sigma - 1)))
    ts = np.linspace(0.0, 60.0, 6001)
    vals = np.abs(_cgamma(sigma + 1j * ts)) / ((sigma - 1.0) ** 2 + ts ** 2)
    integral = 2.0 * np.trapezoid(vals, ts)
    C = float(zbound * integral / (2.0 * math.pi)) * 1.05  # 5% headroom over the grid rule
    _IWEIGHT_CONST_CACHE[sigma] = C
    return C
