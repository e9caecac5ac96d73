"""Jitted twins of the hot lattice accumulation loops.

Imported lazily and only when the numba backend is selected; every
function here has a vectorized numpy counterpart in ``lattice.py`` that
must agree to reassociation noise.
"""

import math

import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def _e1(x):
    # E_1 by series below 1, modified Lentz continued fraction above.
    if x <= 0.0:
        return math.inf
    if x <= 1.0:
        s = -0.57721566490153286061 - math.log(x)
        term = 1.0
        for n in range(1, 40):
            term *= -x / n
            add = -term / n
            s += add
            if abs(add) < 1e-18 * abs(s) + 1e-300:
                break
        return s
    b = x + 1.0
    c = 1e300
    dd = 1.0 / b
    h = dd
    for i in range(1, 120):
        a = -i * i
        b += 2.0
        dd = 1.0 / (a * dd + b)
        c = b + a / c
        delta = c * dd
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x)


@nb.njit(cache=True, nogil=True)
def _inc_gamma_ratio(k, x):
    s = 1.0
    term = 1.0
    for j in range(1, k):
        term *= x / j
        s += term
    return math.exp(-x) * s


@nb.njit(cache=True, nogil=True)
def _log_kernel_ratio(k, x):
    out = _e1(x)
    for j in range(1, k):
        # Gamma(j, x)/j! = ratio(j, x)/j
        out += _inc_gamma_ratio(j, x) / j
    return out


@nb.njit(cache=True, nogil=True)
def lattice_sum_nb(D, odd_parity, k, scale4, m4max, table, a, b, c, kind):
    """sum over u,v > 0, 4 | (u^2+Dv^2), u^2+Dv^2 <= m4max of
    eps(u,v) * 4*T/(u^2+Dv^2)^k * K((u^2+Dv^2)*scale4), where T is the
    real part of (u + v sqrt(-D))^(2k-1) and K the selected kernel."""
    total = 0.0
    npts = 0
    vmax = int(math.sqrt(m4max / D))
    for v in range(1, vmax + 1):
        rem = m4max - D * v * v
        if rem < 1:
            continue
        umax = int(math.sqrt(rem))
        while (umax + 1) * (umax + 1) <= rem:
            umax += 1
        while umax * umax > rem:
            umax -= 1
        if odd_parity:
            u0 = 1 if (v & 1) else 2
        else:
            u0 = 2
        yr = v % c
        q = (v - yr) // c
        for u in range(u0, umax + 1, 2):
            if odd_parity:
                x = (u - v) >> 1
            else:
                x = u >> 1
            xr = (x - q * b) % a
            e = table[xr, yr]
            if e == 0:
                continue
            n4 = u * u + D * v * v
            if k == 1:
                T = float(u)
                coeff = 4.0 * T / n4
            else:
                # T = Re[(u + v sqrt(-D))^(2k-1)] by the complex recurrence,
                # exact in float64 at desk scale (|T| <= n4^(k-1/2) < 2^53)
                A = float(u)
                B = float(v)
                for _ in range(2 * k - 2):
                    A, B = A * u - B * v * D, A * v + B * u
                T = A
                coeff = 4.0 * T / float(n4) ** k
            y = n4 * scale4
            if kind == 0:
                kv = _inc_gamma_ratio(k, y)
            else:
                kv = _log_kernel_ratio(k, y)
            total += e * coeff * kv
            npts += 1
    return total, npts


@nb.njit(cache=True, nogil=True)
def char_sum_nb(D, odd_parity, v, M, w, table, a, b, c):
    """S_v(w) = sum_{M <= u < w, 4 | (u^2+Dv^2)} eps((u + v sqrt(-D))/2)."""
    total = 0
    nterms = 0
    yr = v % c
    q = (v - yr) // c
    for u in range(M, w):
        if (u * u + D * v * v) % 4 != 0:
            continue
        if odd_parity:
            x = (u - v) >> 1
        else:
            x = u >> 1
        xr = (x - q * b) % a
        total += table[xr, yr]
        nterms += 1
    return total, nterms
