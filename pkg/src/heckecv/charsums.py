"""Empirical apparatus for the short character sums driving the lattice estimates.

S_v(w) = sum_{M <= u < w, 4 | (u^2 + D v^2)} eps((u + v sqrt(-D))/2) is
the inner sum whose cancellation controls the lattice halves of the
central value and derivative.  This module computes S_v(w) directly,
recomputes it through the exact eps = eps0 * eps1 congruence
decomposition (an integer identity, the sharpest test of the character
machinery), checks that the dyadic block partition of the lattice sums
reassembles exactly, and surveys the ratio of |S_v(w)| to the
subconvexity-shaped reference bound |d| + M^(1/2) D^(3/16) |d|^(1/2).
The survey is observational: the reference bound carries an unspecified
constant, so ratios are reported, never asserted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .characters import EpsCharacter, EpsFactorization, factor_eps
from .kernels import inc_gamma_ratio, log_kernel_ratio
from .quadfield import QuadraticField, is_fundamental_discriminant

RATIO_EXPONENT = 3.0 / 16.0


@dataclass(frozen=True)
class CharSumRecord:
    D: int
    d: int
    v: int
    M: int
    w: int
    sum_value: int
    n_terms: int
    bound_ratio: float


def _reference_bound(D: int, d: int, M: int) -> float:
    return abs(d) + math.sqrt(M) * D ** RATIO_EXPONENT * math.sqrt(abs(d))


def char_sum(char: EpsCharacter, v: int, M: int, w: int) -> CharSumRecord:
    """Direct summation of S_v(w); exact integer result."""
    if not (0 < M <= w):
        raise ValueError("need 0 < M <= w")
    D = char.field.D
    d = char.d
    if w == M:
        return CharSumRecord(D, d, v, M, w, 0, 0, 0.0)
    if backend.numba_enabled():
        from . import _kernels_numba as nbk

        table, a, b, c = char.table_pack()
        total, n_terms = nbk.char_sum_nb(D, D % 2 == 1, v, M, w, table, a, b, c)
    else:
        us = np.arange(M, w, dtype=np.int64)
        mask = (us * us + D * v * v) % 4 == 0
        us = us[mask]
        n_terms = int(us.size)
        if n_terms == 0:
            total = 0
        else:
            vs = np.full(us.shape, v, dtype=np.int64)
            total = int(char.eps_uv_arrays(us, vs).astype(np.int64).sum())
    ratio = abs(total) / _reference_bound(D, d, M)
    return CharSumRecord(D, d, v, M, int(w), int(total), int(n_terms), ratio)


def reduction_identity_check(char: EpsCharacter, v: int, M: int, w: int,
                             factorization: EpsFactorization | None = None
                             ) -> tuple[bool, tuple | None, int, int]:
    """Recompute S_v(w) through the congruence decomposition and compare exactly.

    With k0, k1 the least positive integers in the factor conductors,
    every admissible u falls in a class u = k0 j (mod k1), and the inner
    sum collapses to eps0(k1/2) eps1((k0 j + v sqrt(-D))/2) sum_l eps0(l).
    The class j = 0 participates (u divisible by k1 does occur with
    nonvanishing eps), so j runs over 0 <= j < k1.

    Returns (equal, witness, direct_value, decomposed_value); a witness
    (j, u_range) is produced on mismatch.
    """
    fac = factorization if factorization is not None else factor_eps(char)
    D = char.field.D
    direct = char_sum(char, v, M, w).sum_value
    k0, k1 = fac.k0, fac.k1
    assert k1 % 2 == 0
    pref_const = fac.eps0((k1 // 2, 0))
    total = 0
    for j in range(k1):
        if (j * j + D * v * v) % 4:
            continue
        # (k0 j + v sqrt(-D))/2 in basis coordinates
        U = k0 * j
        if (U * U + D * v * v) % 4:
            # k0 is odd for odd D and j is even for 8 | D, so parity is preserved;
            # reaching here signals a conductor bug
            return False, (j, None), direct, total
        if D % 2:
            arg = ((U - v) // 2, v)
        else:
            arg = (U // 2, v)
        e1 = fac.eps1(arg)
        if e1 == 0 or pref_const == 0:
            inner_pref = 0
        else:
            inner_pref = pref_const * e1
        lo = -((k0 * j - M) // k1)  # smallest l with k0 j + k1 l >= M
        hi = -((k0 * j - w) // k1)  # smallest l with k0 j + k1 l >= w
        if inner_pref == 0:
            continue
        ssum = 0
        for l in range(lo, hi):
            ssum += fac.eps0((l, 0))
        total += inner_pref * ssum
    if total == direct:
        return True, None, direct, total
    return False, (None, (M, w)), direct, total


def _lattice_summand_arrays(char: EpsCharacter, k: int, scale4: float,
                            u: np.ndarray, v: np.ndarray, kind: int) -> np.ndarray:
    D = char.field.D
    eps = char.eps_uv_arrays(u, v).astype(np.float64)
    n4 = u * u + D * v * v
    if k == 1:
        coeff = 4.0 * u / n4
    else:
        A = u.astype(np.float64)
        B = v.astype(np.float64)
        for _ in range(2 * k - 2):
            A, B = A * u - B * v * D, A * v + B * u
        coeff = 4.0 * A / n4.astype(np.float64) ** k
    y = n4 * scale4
    kv = inc_gamma_ratio(k, y) if kind == 0 else log_kernel_ratio(k, y)
    return eps * coeff * kv


def dyadic_consistency(D: int, d: int, k: int, char: EpsCharacter,
                       tol: float = 1e-12) -> tuple[bool, dict]:
    """The lattice sums must equal the sum of their dyadic (u, v) blocks exactly.

    Uses the region 0 < u, sqrt(D) v < 2 (D|d|)^(1/2) log(D|d|); the
    blocks are [2^i, 2^(i+1)) x [2^j, 2^(j+1)) intersected with it.
    Equality is up to float reassociation, checked for both kernels;
    the block count must not exceed 4 log2(2 D |d|)^2.
    """
    Ddabs = D * abs(d)
    lim = 2.0 * math.sqrt(Ddabs) * math.log(Ddabs)
    umax = int(lim)
    vmax = int(lim / math.sqrt(D))
    if umax < 1 or vmax < 1:
        return True, {"blocks": 0, "note": "empty region"}
    Q = D * math.gcd(2, D) * abs(d) / (2.0 * math.pi)
    scale4 = 1.0 / (4.0 * Q)
    odd = D % 2 == 1
    us, vs = [], []
    for v in range(1, vmax + 1):
        u0 = (1 if v % 2 else 2) if odd else 2
        if u0 > umax:
            continue
        ur = np.arange(u0, umax + 1, 2, dtype=np.int64)
        us.append(ur)
        vs.append(np.full(ur.shape, v, dtype=np.int64))
    if not us:
        return True, {"blocks": 0, "note": "empty region"}
    u_all = np.concatenate(us)
    v_all = np.concatenate(vs)

    details: dict = {}
    ok = True
    nblocks = 0
    for kind in (0, 1):
        terms = _lattice_summand_arrays(char, k, scale4, u_all, v_all, kind)
        full = float(terms.sum())
        block_total = 0.0
        nblocks = 0
        i = 0
        while (1 << i) <= umax:
            lo_u, hi_u = 1 << i, min((1 << (i + 1)) - 1, umax)
            j = 0
            while (1 << j) <= vmax:
                lo_v, hi_v = 1 << j, min((1 << (j + 1)) - 1, vmax)
                sel = (u_all >= lo_u) & (u_all <= hi_u) & (v_all >= lo_v) & (v_all <= hi_v)
                if np.any(sel):
                    block_total += float(terms[sel].sum())
                nblocks += 1
                j += 1
            i += 1
        diff = abs(full - block_total)
        limit = tol * max(1.0, float(np.abs(terms).sum()))
        details[f"kind{kind}"] = {"full": full, "blocks_sum": block_total, "diff": diff}
        ok = ok and diff <= limit
    bound = 4.0 * math.log2(2.0 * Ddabs) ** 2
    details["blocks"] = nblocks
    details["block_bound"] = bound
    ok = ok and nblocks <= bound
    return ok, details


def ratio_survey(D_values, d_values, samples: int, seed: int,
                 char_factory=None) -> tuple[list[CharSumRecord], dict]:
    """Seeded survey of bound ratios over random (v, M, w) tuples.

    Purely observational; returns the records and a summary with the
    max and distribution of |S_v(w)| / (|d| + M^(1/2) D^(3/16) |d|^(1/2)).
    """
    from .characters import twist_character

    rng = np.random.default_rng(seed)
    records: list[CharSumRecord] = []
    pairs = [(D, d) for D in D_values for d in d_values
             if math.gcd(D, d) == 1 and (d == 1 or is_fundamental_discriminant(d))]
    for D, d in pairs:
        char = (char_factory or (lambda DD, dd: twist_character(QuadraticField(DD), dd, 1, 0)))(D, d)
        vmax = max(2, int(2.0 * math.sqrt(D * abs(d)) * math.log(D * abs(d)) / math.sqrt(D)))
        for _ in range(samples):
            v = int(rng.integers(1, vmax + 1))
            M = int(rng.integers(1, 500))
            w = int(rng.integers(M + 1, 2 * M + 1))
            records.append(char_sum(char, v, M, w))
    ratios = np.array([r.bound_ratio for r in records]) if records else np.zeros(1)
    summary = {
        "n_records": len(records),
        "seed": seed,
        "reference_exponent": RATIO_EXPONENT,
        "max_ratio": float(ratios.max()),
        "mean_ratio": float(ratios.mean()),
        "quantiles": {q: float(np.quantile(ratios, float(q)))
                      for q in ("0.5", "0.9", "0.99")},
    }
    return records, summary


def records_to_csv(records: list[CharSumRecord]) -> str:
    lines = ["D,d,v,M,w,S,bound_ratio"]
    for r in records:
        lines.append(f"{r.D},{r.d},{r.v},{r.M},{r.w},{r.sum_value},{r.bound_ratio:.6g}")
    return "\n".join(lines) + "\n"


def summary_to_json(summary: dict) -> str:
    return json.dumps(summary, sort_keys=True)
