"""Truncated character-weighted sums over principal-ideal generators.

Two families of sums feed every central-value quantity:

* the rational sum  sum_{n >= 1, (n,d)=1} kronecker(-D,n) n^-1 K(n^2 s)
* the lattice sum   sum_{u,v>0, 4|(u^2+Dv^2)} eps(u,v) 4T/(u^2+Dv^2)^k K((u^2+Dv^2) s/4)

with K the normalized incomplete-gamma kernel (kind 0) or the
log-weighted kernel (kind 1) and T = Re (u + v sqrt(-D))^(2k-1).  The
lattice sum runs conjugate-grouped over v > 0; each (u, v) with v > 0
accounts for the ideal pair {(alpha), (conj alpha)}.

Truncation cutoffs are certified: the reported bound dominates the
discarded tail using kernel monotonicity, the per-shell lattice point
count, and a geometric closure term.  The lattice inner loop dispatches
to the numba kernels unless HECKECV_DISABLE_NUMBA selects the numpy path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .characters import EpsCharacter
from .kernels import inc_gamma_ratio, log_kernel_ratio, log_kernel_ratio_bound
from .quadfield import kronecker

KIND_INC_GAMMA = 0
KIND_LOG = 1


@dataclass(frozen=True)
class SumResult:
    value: float
    tail_bound: float
    cutoff: float
    n_terms: int


def _kernel_vals(kind: int, k: int, y: np.ndarray) -> np.ndarray:
    if kind == KIND_INC_GAMMA:
        return inc_gamma_ratio(k, y)
    return log_kernel_ratio(k, y)


def _kernel_bound(kind: int, k: int, y: np.ndarray) -> np.ndarray:
    """Monotone-decreasing upper bound for the kernel, exact for kind 0."""
    if kind == KIND_INC_GAMMA:
        return inc_gamma_ratio(k, y)
    return np.minimum(log_kernel_ratio_bound(k, y), log_kernel_ratio(k, np.maximum(y, 1e-12)))


def _initial_ycut(kind: int, k: int, tol_share: float) -> float:
    y = 20.0
    while y < 800.0:
        b = _kernel_bound(kind, k, np.array([y]))[0]
        if b < tol_share:
            return y
        y += 4.0
    return y


def rational_tail_bound(kind: int, k: int, scale: float, n_start: int) -> float:
    """Bound for sum_{n > n_start} n^-1 K(n^2 scale) (|chi| <= 1 termwise)."""
    ns = np.arange(n_start + 1, n_start + 41, dtype=np.float64)
    terms = _kernel_bound(kind, k, ns * ns * scale) / ns
    # geometric closure: the kernel falls at least like exp(-(2n+1) scale / 2) per step
    r = math.exp(-min((2 * (n_start + 40) + 1) * scale * 0.5, 700.0))
    closure = terms[-1] * r / (1.0 - r) if r < 1.0 else math.inf
    return float(terms.sum() + closure)


_TAIL_CACHE: dict[tuple, float] = {}


def lattice_tail_bound(D: int, kind: int, k: int, scale4: float, m4_start: int) -> float:
    """Bound for the lattice sum restricted to u^2 + D v^2 > m4_start.

    Per shell m, point count <= sqrt(m/D) + 1 and the coefficient is at
    most 4/sqrt(m); both factors and the kernel decrease in m, so
    strided blocks bounded by their left edge stay rigorous, and the
    infinite remainder closes geometrically.
    """
    key = (D, kind, k, scale4, m4_start)
    if key in _TAIL_CACHE:
        return _TAIL_CACHE[key]
    span = min(int(80.0 / scale4) + 200, 4_000_000)
    stride = max(1, span // 1500)
    ms = np.arange(m4_start + 1, m4_start + span + 1, stride, dtype=np.float64)
    weights = (np.sqrt(ms / D) + 1.0) * 4.0 / np.sqrt(ms)
    terms = stride * weights * _kernel_bound(kind, k, ms * scale4)
    r = math.exp(-min(scale4 * 0.5 * stride, 700.0))
    # kernel decays at least like e^(-y/2) once y >= 2k; terms here satisfy that
    closure = float(terms[-1]) * r / (1.0 - r) if r < 1.0 else math.inf
    out = float(terms.sum() + closure)
    _TAIL_CACHE[key] = out
    return out


def rational_sum(D: int, d: int, k: int, scale: float, kind: int, tol: float) -> SumResult:
    """sum_{n>=1,(n,d)=1} kronecker(-D,n)/n * K(n^2 scale) with certified tail <= tol."""
    ycut = _initial_ycut(kind, k, tol * 0.05)
    n_max = max(4, math.isqrt(int(ycut / scale)) + 1)
    while rational_tail_bound(kind, k, scale, n_max) > tol:
        n_max = int(n_max * 1.3) + 4
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    chi = np.array([kronecker(-D, int(n)) for n in ns], dtype=np.float64)
    if abs(d) > 1:
        co = np.array([math.gcd(int(n), abs(d)) == 1 for n in ns])
        chi = np.where(co, chi, 0.0)
    vals = _kernel_vals(kind, k, ns.astype(np.float64) ** 2 * scale)
    value = float(np.dot(chi / ns, vals))
    return SumResult(value, rational_tail_bound(kind, k, scale, n_max), float(n_max),
                     int(np.count_nonzero(chi)))


def _lattice_numpy(D: int, odd_parity: bool, k: int, scale4: float, m4max: int,
                   table: np.ndarray, a: int, b: int, c: int, kind: int) -> tuple[float, int]:
    vmax = math.isqrt(max(m4max // D, 0))
    us, vs = [], []
    for v in range(1, vmax + 1):
        rem = m4max - D * v * v
        if rem < 1:
            continue
        umax = math.isqrt(rem)
        u0 = (1 if v % 2 else 2) if odd_parity else 2
        if u0 > umax:
            continue
        ur = np.arange(u0, umax + 1, 2, dtype=np.int64)
        us.append(ur)
        vs.append(np.full(ur.shape, v, dtype=np.int64))
    if not us:
        return 0.0, 0
    u = np.concatenate(us)
    v = np.concatenate(vs)
    x = (u - v) >> 1 if odd_parity else u >> 1
    yr = v % c
    q = (v - yr) // c
    xr = (x - q * b) % a
    eps = table[xr, yr].astype(np.float64)
    keep = eps != 0.0
    if not np.any(keep):
        return 0.0, 0
    u, v, eps = u[keep], v[keep], eps[keep]
    n4 = u * u + D * v * v
    if k == 1:
        T = u.astype(np.float64)
        coeff = 4.0 * T / n4
    else:
        A = u.astype(np.float64)
        B = v.astype(np.float64)
        for _ in range(2 * k - 2):
            A, B = A * u - B * v * D, A * v + B * u
        coeff = 4.0 * A / n4.astype(np.float64) ** k
    kv = _kernel_vals(kind, k, n4 * scale4)
    return float(np.dot(eps * coeff, kv)), int(u.size)


def lattice_sum(char: EpsCharacter, k: int, scale: float, kind: int, tol: float) -> SumResult:
    """Conjugate-grouped lattice sum with certified truncation tail <= tol."""
    D = char.field.D
    scale4 = scale / 4.0
    ycut = _initial_ycut(kind, k, tol * 0.02)
    m4max = int(ycut / scale4) + 8
    while lattice_tail_bound(D, kind, k, scale4, m4max) > tol:
        m4max = int(m4max * 1.3) + 8
    table, a, b, c = char.table_pack()
    odd = D % 2 == 1
    if backend.numba_enabled():
        from . import _kernels_numba as nbk

        value, npts = nbk.lattice_sum_nb(D, odd, k, scale4, m4max, table, a, b, c, kind)
    else:
        value, npts = _lattice_numpy(D, odd, k, scale4, m4max, table, a, b, c, kind)
    return SumResult(float(value), lattice_tail_bound(D, kind, k, scale4, m4max),
                     float(m4max), npts)


def lattice_sum_ungrouped(char: EpsCharacter, k: int, scale: float, kind: int,
                          tol: float) -> complex:
    """Oracle: the same sum over v != 0 via exact chi values, no conjugate grouping."""
    from .quadfield import principal_lattice_points

    D = char.field.D
    scale4 = scale / 4.0
    ycut = _initial_ycut(kind, k, tol * 0.02)
    m4max = int(ycut / scale4) + 8
    while lattice_tail_bound(D, kind, k, scale4, m4max) > tol:
        m4max = int(m4max * 1.3) + 8
    total = 0j
    for p in principal_lattice_points(char.field, m4max / 4.0):
        e = char.eps_point(p)
        if not e:
            continue
        chi = char.chi_point(p)
        y = p.norm * scale
        kv = inc_gamma_ratio(k, y) if kind == KIND_INC_GAMMA else log_kernel_ratio(k, y)
        total += chi / p.norm ** k * kv
    return total
