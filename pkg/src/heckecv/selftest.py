"""Desk-scale invariant suites runnable without pytest (the ``selftest`` command)."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import central, charsums, dirichlet, kernels, lattice
from .characters import build_canonical, twist_character, validate_character
from .quadfield import (
    QuadraticField,
    class_number,
    is_fundamental_discriminant,
    kronecker,
    principal_lattice_points,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    witness: str
    seconds: float


def _suite_kronecker() -> str:
    for n in range(3, 200, 2):
        if all(n % p for p in range(2, int(math.isqrt(n)) + 1)):
            residues = {(x * x) % n for x in range(1, n)}
            for a in range(1, n):
                expect = 1 if a % n in residues else -1
                if a % n == 0:
                    expect = 0
                if kronecker(a, n) != expect:
                    return f"kronecker({a},{n}) != Legendre"
    for a, b, n in ((3, 5, 77), (-7, 11, 45), (10, 9, 13)):
        if kronecker(a * b, n) != kronecker(a, n) * kronecker(b, n):
            return f"multiplicativity fails at ({a},{b},{n})"
    return ""


def _suite_class_numbers() -> str:
    for D in range(7, 200, 4):
        if not is_fundamental_discriminant(-D):
            continue
        h = class_number(D)
        L = dirichlet.L_D_at_1(D, 1, 1e-9).value
        approx = math.sqrt(D) * L / math.pi
        if abs(approx - h) > 0.4:
            return f"class number formula mismatch at D={D}: {approx} vs {h}"
    return ""


def _suite_lattice_enum() -> str:
    for D, bound in ((7, 400), (8, 400), (23, 250)):
        field = QuadraticField(D)
        pts = list(principal_lattice_points(field, bound))
        naive = 0
        m4 = 4 * bound
        for u in range(1, int(math.isqrt(m4)) + 1):
            for v in range(-int(math.isqrt(m4 // D)), int(math.isqrt(m4 // D)) + 1):
                if v and (u * u + D * v * v) % 4 == 0 and u * u + D * v * v <= m4:
                    naive += 1
        if len(pts) != naive or len(set((p.u, p.v) for p in pts)) != len(pts):
            return f"lattice enumeration mismatch for D={D}"
    return ""


def _suite_characters() -> str:
    for D in (7, 11, 23, 8, 24):
        field = QuadraticField(D)
        for i, _ in enumerate(build_canonical(field)):
            for d in (1, 5, -3):
                if math.gcd(d, D) != 1:
                    continue
                rep = validate_character(twist_character(field, d, 1, i))
                if not rep.ok:
                    return f"(D={D}, d={d}, variant {i}): " + "; ".join(rep.witnesses())
    return ""


def _suite_fault_injection() -> str:
    field = QuadraticField(7)
    char = twist_character(field, 1, 1)
    tampered = char.table.copy()
    flat = np.flatnonzero(tampered)
    tampered[np.unravel_index(flat[0], tampered.shape)] *= -1
    from .characters import EpsCharacter

    bad = EpsCharacter(field, 1, 1, 0, char.modulus, tampered, char.canonical)
    rep = validate_character(bad)
    if rep.ok:
        return "sign flip not detected"
    return ""


def _suite_kernels() -> str:
    from scipy.integrate import quad

    for k in (1, 2, 3):
        for x in (0.1, 1.0, 4.0, 11.0):
            exact = kernels.inc_gamma_ratio(k, x)
            num, _ = quad(lambda t: math.exp(-t) * t ** (k - 1), x, x + 60.0)
            if abs(exact - num / math.factorial(k - 1)) > 1e-9:
                return f"incomplete gamma ratio mismatch at k={k}, x={x}"
    if not kernels.log_weight_integral(4.0) > 0.0351:
        return "log-weight integral constant violated at x=4"
    return ""


def _suite_backend_agreement() -> str:
    import os

    from . import backend

    if not backend._probe_numba():
        return ""  # nothing to compare on this host
    char = twist_character(QuadraticField(23), 5, 1)
    Q = central.q_parameter(23, 5)
    vals = {}
    saved = os.environ.get(backend.ENV_FLAG)
    try:
        for flag in ("0", "1"):
            os.environ[backend.ENV_FLAG] = flag
            vals[flag] = lattice.lattice_sum(char, 1, 1.0 / Q, lattice.KIND_LOG, 1e-10).value
    finally:
        if saved is None:
            os.environ.pop(backend.ENV_FLAG, None)
        else:
            os.environ[backend.ENV_FLAG] = saved
    if abs(vals["0"] - vals["1"]) > 5e-13:
        return f"backend mismatch: {vals}"
    return ""


def _suite_central() -> str:
    rep = central.central_report(7, 1, 1)
    if rep.W != 1 or not rep.L_central or rep.L_central < 0.9:
        return f"(7,1,1) report unexpected: W={rep.W}, L={rep.L_central}"
    rep = central.central_report(11, 1, 1)
    if rep.W != -1 or rep.predicted_order != "1":
        return f"(11,1,1) report unexpected: W={rep.W}"
    ok, details = charsums.dyadic_consistency(7, 1, 1, twist_character(QuadraticField(7), 1, 1))
    if not ok:
        return f"dyadic partition failed: {details}"
    return ""


def _suite_reduction_identity() -> str:
    rng = np.random.default_rng(1)
    for D in (7, 11, 23):
        for d in (1, 5, -3):
            if math.gcd(D, d) != 1:
                continue
            char = twist_character(QuadraticField(D), d, 1)
            from .characters import factor_eps

            fac = factor_eps(char)
            for _ in range(6):
                v = int(rng.integers(1, 12))
                M = int(rng.integers(1, 400))
                w = int(rng.integers(M, 2 * M + 1))
                ok, witness, direct, via = charsums.reduction_identity_check(
                    char, v, M, w, fac)
                if not ok:
                    return f"(D={D}, d={d}, v={v}, M={M}, w={w}): {direct} != {via}"
    return ""


SUITES = (
    ("kronecker", _suite_kronecker),
    ("class_numbers", _suite_class_numbers),
    ("lattice_enumeration", _suite_lattice_enum),
    ("characters", _suite_characters),
    ("fault_injection", _suite_fault_injection),
    ("analytic_kernels", _suite_kernels),
    ("backend_agreement", _suite_backend_agreement),
    ("central_values", _suite_central),
    ("reduction_identity", _suite_reduction_identity),
)


def run_selftest(verbose: bool = True) -> list[SuiteResult]:
    results = []
    for name, fn in SUITES:
        t0 = time.perf_counter()
        try:
            witness = fn()
        except Exception as exc:  # a crash is a failure with the exception as witness
            witness = f"exception: {exc!r}"
        dt = time.perf_counter() - t0
        results.append(SuiteResult(name, witness == "", witness, dt))
        if verbose:
            status = "PASS" if witness == "" else "FAIL"
            line = f"  {status}  {name:<22s} {dt:7.2f}s"
            if witness:
                line += f"  [{witness}]"
            print(line)
    return results
