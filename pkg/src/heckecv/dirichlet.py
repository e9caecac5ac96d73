"""Rational-side Dirichlet objects for the twisted quadratic character.

L_D(s) = sum_{n >= 1, (n,d)=1} kronecker(-D, n) n^-s is the (possibly
imprimitive) Dirichlet L-function of the totally multiplicative
character n -> (-D/n) killed at primes dividing d; its period is D|d|.
This module evaluates L_D(1) and L_D'(1) by iterated Abel summation
with exact periodic partial-sum certificates, generates the
nonnegative coefficients a_n of zeta(s) L_D(s) / zeta(2s) from Euler
factors, and assembles the completed-derivative value

    Lambda_k'(1) = psi(k) L_D(1) + log(D* |d| / 2 pi) L_D(1) + 2 L_D'(1)

with psi the digamma function at integer argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kernels import EULER_GAMMA, AccuracyBudget, ToleranceError
from .quadfield import kronecker, prime_factors


@dataclass(frozen=True)
class LValue:
    """An L-value with its imprimitivity bookkeeping and certified bound."""

    value: float
    primitive: float
    euler_correction: float
    budget: AccuracyBudget


def character_row(D: int, d: int) -> np.ndarray:
    """chi(1..P) for chi(n) = kronecker(-D, n) [gcd(n, d) = 1], P = D |d|."""
    P = D * abs(d)
    row = np.empty(P, dtype=np.int64)
    for n in range(1, P + 1):
        v = kronecker(-D, n)
        if abs(d) > 1 and math.gcd(n, d) != 1:
            v = 0
        row[n - 1] = v
    return row


def max_partial_sum(D: int, d: int) -> int:
    """max |sum_{n <= t} chi(n)| over a period (the Abel error certificate)."""
    row = character_row(D, d)
    return int(np.max(np.abs(np.cumsum(row))))


def _abel_moments(row: np.ndarray):
    """Prefix layers S, T, U of the periodic character and their means.

    S(n) is the периodic prefix sum of chi; subtracting its mean m1 and
    prefixing again gives T, then U, each periodic because the previous
    layer was recentered.  The final layer's prefix bound B4 certifies
    the remainder after three summations by parts.
    """
    S = np.cumsum(row)
    m1 = float(S.mean())
    T = np.cumsum(S - m1)
    m2 = float(T.mean())
    U = np.cumsum(T - m2)
    m3 = float(U.mean())
    V = np.cumsum(U - m3)
    B4 = 2.0 * float(np.max(np.abs(V))) + float(np.max(np.abs(U - m3)))
    return S, m1, T, m2, U, m3, B4


def _d3_tail_bound(kind: str, N: int) -> float:
    """Certified sum_{n > N} |third difference of f| for f = 1/n or log(n)/n."""
    M = N - 3
    if kind == "inv":
        # |f'''(t)| <= 6 / t^4
        return 2.0 / M ** 3
    # f = log t / t: |f'''(t)| <= (11 + 6 log t)/t^4
    return (11.0 + 6.0 * math.log(M)) / (3.0 * M ** 3) + 2.0 / (3.0 * M ** 3)


def _abel_series(row: np.ndarray, kind: str, tol: float) -> tuple[float, float]:
    """sum_{n>=1} chi(n) f(n), f = 1/n ('inv') or log(n)/n ('log'), with bound."""
    P = len(row)
    S, m1, T, m2, U, m3, B4 = _abel_moments(row)
    N = max(4 * P, 2048)
    while B4 * _d3_tail_bound(kind, N) > 0.5 * tol:
        if N > 80_000_000:
            raise ToleranceError("Abel summation cutoff exploded",
                                 B4 * _d3_tail_bound(kind, N))
        N *= 2
    rem = B4 * _d3_tail_bound(kind, N)
    ns = np.arange(1, N + 1, dtype=np.float64)
    reps = -(-N // P)
    chiN = np.tile(row, reps)[:N].astype(np.float64)
    if kind == "inv":
        fv = 1.0 / ns
        f1, f2, f3 = 1.0 / (N + 1), 1.0 / (N + 2), 1.0 / (N + 3)
    else:
        fv = np.log(ns) / ns
        f1, f2, f3 = (math.log(N + i) / (N + i) for i in (1, 2, 3))
    base = float(np.dot(chiN, fv))
    SN = float(S[(N - 1) % P])
    TN = float(T[(N - 1) % P])
    UN = float(U[(N - 1) % P])
    corr = (m1 - SN) * f1 + (m2 - TN) * (f1 - f2) + (m3 - UN) * (f1 - 2 * f2 + f3)
    return base + corr, rem


@lru_cache(maxsize=256)
def _primitive_values(D: int, tol: float) -> tuple[float, float, float, float]:
    """(L(1, chi_-D), bound, sum chi log/n, bound) for the primitive character."""
    row = character_row(D, 1)
    v, b = _abel_series(row, "inv", tol)
    vl, bl = _abel_series(row, "log", tol)
    return v, b, vl, bl


def _euler_correction(D: int, d: int) -> float:
    corr = 1.0
    for p in prime_factors(d):
        corr *= 1.0 - kronecker(-D, p) / p
    return corr


def L_D_at_1(D: int, d: int, tol: float = 1e-10) -> LValue:
    """L_D(1), via the primitive value times the Euler factors at primes dividing d.

    The primitive series is summed by three-fold Abel summation whose
    remainder is certified by exact periodic prefix bounds; the direct
    imprimitive series serves as the independent oracle in the tests.
    """
    prim, bound, _, _ = _primitive_values(D, tol)
    corr = _euler_correction(D, d)
    budget = AccuracyBudget(tol, bound * abs(corr), 0.0)
    return LValue(prim * corr, prim, corr, budget)


def L_D_at_1_direct(D: int, d: int, tol: float = 1e-10) -> tuple[float, float]:
    """Direct imprimitive-series route (oracle for L_D_at_1)."""
    return _abel_series(character_row(D, d), "inv", tol)


def L_D_derivative_at_1(D: int, d: int, tol: float = 1e-10) -> tuple[float, float]:
    """L_D'(1) = -sum chi(n) log(n)/n, imprimitivity handled by the product rule."""
    prim, b1, prim_log, b2 = _primitive_values(D, tol)
    Lprim = prim
    Lprim_deriv = -prim_log
    ps = prime_factors(d)
    corr = _euler_correction(D, d)
    # d/ds prod_p (1 - chi(p) p^-s) at s=1 is sum_p chi(p) log(p)/p * prod_{q != p}(...)
    deriv_corr = 0.0
    for p in ps:
        partial = 1.0
        for q in ps:
            if q != p:
                partial *= 1.0 - kronecker(-D, q) / q
        deriv_corr += kronecker(-D, p) * math.log(p) / p * partial
    value = Lprim_deriv * corr + Lprim * deriv_corr
    return value, b2 * abs(corr) + b1 * abs(deriv_corr)


def L_D_derivative_at_1_direct(D: int, d: int, tol: float = 1e-10) -> tuple[float, float]:
    v, b = _abel_series(character_row(D, d), "log", tol)
    return -v, b


def an_coefficients(D: int, d: int, N: int) -> np.ndarray:
    """Coefficients a_1..a_N of zeta(s) L_D(s) / zeta(2s) (index 0 unused).

    Generated multiplicatively from the local factors
    (1 + p^-s)/(1 - chi(p) p^-s): a_{p^j} is 2 for chi(p) = 1 (j >= 1),
    0 for chi(p) = -1, and (1, 0, 0, ...) past j = 1 for chi(p) = 0.
    All values are nonnegative; a negative entry would signal a bug and
    raises.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    a = np.zeros(N + 1, dtype=np.float64)
    a[1] = 1.0
    sieve = np.ones(N + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(N) + 1):
        if sieve[i]:
            sieve[i * i:: i] = False
    for p in np.nonzero(sieve)[0]:
        p = int(p)
        chi = kronecker(-D, p)
        if abs(d) > 1 and d % p == 0:
            chi = 0
        out = a.copy()
        pj, j = p, 1
        while pj <= N:
            if chi == 1:
                loc = 2.0
            elif chi == -1:
                loc = 0.0
            else:
                loc = 1.0 if j == 1 else 0.0
            if loc:
                head = a[1: N // pj + 1]
                out[pj::pj] += loc * head[: out[pj::pj].size]
            pj *= p
            j += 1
        a = out
    if a[1] != 1.0 or np.any(a < 0):
        raise ArithmeticError("coefficient sanity violated")
    return a


def an_coefficients_convolution(D: int, d: int, N: int) -> np.ndarray:
    """Oracle: direct triple Dirichlet convolution of 1, chi, and mu at squares."""
    chi = np.zeros(N + 1, dtype=np.float64)
    for n in range(1, N + 1):
        v = kronecker(-D, n)
        if abs(d) > 1 and math.gcd(n, d) != 1:
            v = 0
        chi[n] = v
    # zeta * L_D
    zl = np.zeros(N + 1)
    for m in range(1, N + 1):
        zl[m::m] += chi[m]
    # mobius
    mu = np.ones(N + 1, dtype=np.int64)
    mu[0] = 0
    primes = [p for p in range(2, N + 1) if all(p % q for q in range(2, math.isqrt(p) + 1))]
    for p in primes:
        mu[p::p] *= -1
        mu[p * p:: p * p] = 0
    out = np.zeros(N + 1)
    m = 1
    while m * m <= N:
        if mu[m]:
            step = m * m
            out[step::step] += mu[m] * zl[1: N // step + 1][: out[step::step].size]
        m += 1
    return out


class DirichletData:
    """Bundled rational-side data for one (D, d): character row, L-values, a_n.

    The character n -> kronecker(-D, n) [gcd(n, d) = 1] is totally
    multiplicative with period D |d|; values and coefficients are cached
    on first access and immutable afterwards.
    """

    def __init__(self, D: int, d: int, tol: float = 1e-10):
        self.D = D
        self.d = d
        self.tol = tol
        self.period = D * abs(d)
        self.chi = character_row(D, d)
        self._L1: LValue | None = None
        self._L1_deriv: tuple[float, float] | None = None
        self._an: np.ndarray | None = None

    def L1(self) -> LValue:
        if self._L1 is None:
            self._L1 = L_D_at_1(self.D, self.d, self.tol)
        return self._L1

    def L1_derivative(self) -> float:
        if self._L1_deriv is None:
            self._L1_deriv = L_D_derivative_at_1(self.D, self.d, self.tol)
        return self._L1_deriv[0]

    def coefficients(self, N: int) -> np.ndarray:
        if self._an is None or len(self._an) <= N:
            self._an = an_coefficients(self.D, self.d, N)
        return self._an[: N + 1]


def digamma_int(k: int) -> float:
    """psi(k) = -gamma + H_{k-1} for integer k >= 1."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return -EULER_GAMMA + sum(1.0 / j for j in range(1, k))


def lambda_k_derivative_at_1(D: int, d: int, k: int, tol: float = 1e-10) -> tuple[float, float]:
    """Lambda_k'(1) = psi(k) L_D(1) + log(D*|d|/2 pi) L_D(1) + 2 L_D'(1)."""
    dstar = D * math.gcd(2, D)
    L = L_D_at_1(D, d, tol)
    Lp, bp = L_D_derivative_at_1(D, d, tol)
    coeff = digamma_int(k) + math.log(dstar * abs(d) / (2.0 * math.pi))
    value = coeff * L.value + 2.0 * Lp
    return value, abs(coeff) * L.budget.achieved_bound + 2.0 * bp
