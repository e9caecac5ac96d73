"""Acceptance gate: every exit criterion at its stated tolerance.

Each test prints one PASS/FAIL line.  The sweep over admissible
(D, d, k, variant) with D <= 300, |d| <= 8, k in {1, 2} runs once
(single-threaded) and is shared by the criteria that consume it.

Criterion 7 (order determined by the root number over the whole sweep)
is known to fail on exactly one record: (D, d, k) = (19, -8, 1) has
W = +1 with a genuinely vanishing central value (machine zero from two
independent decompositions and both backends), an even-order extra
vanishing far outside the asymptotic range |d| << D^(1/24) where the
order law is proved.  See the decisions ledger for the analysis; the
criterion is asserted as stated rather than weakened.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from heckecv import central
from heckecv.central import q_parameter, r1_via_weight_integral, Rk
from heckecv.characters import build_canonical, twist_character, validate_character
from heckecv.cli import SweepRecord, admissible_cases, main
from heckecv.dirichlet import L_D_at_1, an_coefficients, an_coefficients_convolution
from heckecv.kernels import log_weight_integral
from heckecv.charsums import dyadic_consistency, reduction_identity_check
from heckecv.quadfield import QuadraticField, class_number, is_fundamental_discriminant
from heckecv.characters import factor_eps

TWISTS = "1,-3,-4,5,-7,8,-8"
WEIGHTS = "1,2"
DMAX = 300


def _report(criterion: str, ok: bool, detail: str = "") -> None:
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    print(line)


@pytest.fixture(scope="module")
def sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("acc") / "sweep_t1.jsonl"
    t0 = time.perf_counter()
    rc = main(["sweep", "--dmax", str(DMAX), "--twists", TWISTS,
               "--weights", WEIGHTS, "--tol", "1e-8",
               "--out", str(out), "--threads", "1"])
    dt = time.perf_counter() - t0
    assert rc == 0, "sweep reported per-record errors"
    records = [SweepRecord.from_json(l) for l in out.read_text().strip().split("\n")]
    return records, dt, out


def test_criterion_1_weight_integral_constant():
    t0 = time.perf_counter()
    v4 = log_weight_integral(4.0, tol=1e-8)
    ok = v4 > 0.0351
    grid = np.geomspace(0.25, 64.0, 25)
    positives = [log_weight_integral(float(x), tol=1e-8) > 0.0 for x in grid]
    ok = ok and all(positives)
    dt = time.perf_counter() - t0
    ok = ok and dt < 10.0
    _report("1 (weight-integral constant)", ok, f"I(4)={v4:.6f}, {dt:.2f}s")
    assert v4 > 0.0351
    assert all(positives)
    assert dt < 10.0


def test_criterion_2_coefficient_positivity():
    t0 = time.perf_counter()
    ok = True
    for D in (7, 8, 11, 23, 24):
        for d in (1, 5, -3):
            if math.gcd(D, d) != 1:
                continue
            a = an_coefficients(D, d, 100_000)
            ok = ok and a[1] == 1.0 and bool(np.all(a[1:] >= 0.0))
            b = an_coefficients_convolution(D, d, 10_000)
            ok = ok and bool(np.array_equal(a[:10_001], b))
    dt = time.perf_counter() - t0
    ok = ok and dt < 60.0
    _report("2 (a_n positivity + convolution oracle)", ok, f"{dt:.1f}s")
    assert ok


def test_criterion_3_class_number_cross_check():
    t0 = time.perf_counter()
    checked = 0
    ok = True
    for D in range(7, 501, 2):
        if not is_fundamental_discriminant(-D):
            continue
        L = L_D_at_1(D, 1, tol=1e-9).value
        approx = math.sqrt(D) * L / math.pi
        h = class_number(D)
        ok = ok and round(approx) == h and abs(approx - h) < 0.4
        checked += 1
    l7 = L_D_at_1(7, 1, tol=1e-10).value
    ok = ok and abs(l7 - math.pi / math.sqrt(7)) <= 1e-8
    dt = time.perf_counter() - t0
    ok = ok and dt < 60.0
    _report("3 (class-number formula)", ok, f"{checked} discriminants, {dt:.1f}s")
    assert ok


def test_criterion_4_functional_equation_consistency(sweep):
    records, dt, _ = sweep
    expected = admissible_cases(DMAX, [int(t) for t in TWISTS.split(",")],
                                [int(t) for t in WEIGHTS.split(",")])
    ok = len(records) == len(expected)
    worst_resid = max(r.W_residual for r in records)
    worst_spread = max(r.trunc["x_spread"] / max(1.0, r.scale) for r in records)
    ok = ok and worst_resid <= 1e-4 and worst_spread <= 3e-8 and dt < 600.0
    _report("4 (functional-equation self-consistency)", ok,
            f"{len(records)} records, max |W|-residual {worst_resid:.2e}, "
            f"max x-spread/scale {worst_spread:.2e}, {dt:.0f}s")
    assert len(records) == len(expected)
    assert worst_resid <= 1e-4
    assert worst_spread <= 3e-8
    assert dt < 600.0


def test_criterion_5_dual_route_value(sweep):
    records, _, _ = sweep
    plus = [r for r in records if r.W == 1][:: max(1, len(records) // 20)][:10]
    ok = True
    for r in plus:
        rep = central.central_report(r.D, r.d, r.k, r.variant, tol=1e-8)
        char = twist_character(QuadraticField(r.D), r.d, r.k, r.variant)
        A2, B2, _ = central.lambda_smoothed(r.D, r.d, r.k, char, 2.0, tol=1e-10)
        afe = A2 + rep.W * B2
        ok = ok and abs(rep.L_central - afe) <= 1e-6 * max(1.0, rep.value_scale)
    # closed form vs contour quadrature of the defining integral, 10 cases
    from test_central import _i1_contour

    sampled = [(7, 1, 1), (11, -3, 1), (8, 5, 1), (23, -7, 1), (15, -8, 1),
               (19, 1, 1), (24, 1, 1), (7, -8, 2), (11, 8, 2), (40, 1, 1)]
    worst = 0.0
    for D, d, k in sampled:
        closed = central.I1(D, d, k, tol=1e-10).value
        quadr = _i1_contour(D, d, k)
        worst = max(worst, abs(closed - quadr))
    ok = ok and worst <= 1e-6
    _report("5 (dual-route central value)", ok,
            f"{len(plus)} AFE checks, worst I1 contour diff {worst:.2e}")
    assert ok


def test_criterion_6_r1_two_routes():
    cases = [(7, 1), (11, 1), (8, 5), (23, -7), (19, -8), (24, -7), (31, 1),
             (40, -3), (15, 8), (55, -3)]
    worst = 0.0
    below = []
    ok = True
    for D, d in cases:
        g = Rk(D, d, 1, tol=1e-9, cross_check=False).value
        i = r1_via_weight_integral(D, d, tol=1e-8)
        worst = max(worst, abs(g - i))
        ok = ok and abs(g - i) <= 2e-6
        if D * math.gcd(2, D) * abs(d) >= 8 * math.pi:
            ok = ok and g >= 0.0351
        else:
            below.append((D, d, round(g, 6)))
    _report("6 (R1 route equality + lower bound)", ok,
            f"worst route diff {worst:.2e}; below-threshold cases reported: {below}")
    assert ok


def test_criterion_7_order_law(sweep):
    records, _, _ = sweep
    violations = [(r.D, r.d, r.k, r.variant, r.W, r.value) for r in records
                  if r.predicted_order != str((1 - r.W) // 2)]
    scale_ok = all(abs(r.value) > 1e-6 * r.scale for r in records
                   if r.predicted_order == str((1 - r.W) // 2))
    ok = not violations and scale_ok
    _report("7 (order determined by root number)", ok,
            f"{len(records) - len(violations)}/{len(records)} records; "
            f"violations: {violations}")
    assert scale_ok
    assert not violations, (
        f"order law fails on {violations}: genuine extra vanishing beyond the "
        "root number (see decisions ledger); the asymptotic order law does not "
        "cover |d| this large relative to D")


def test_criterion_8_exact_identities():
    rng = np.random.default_rng(2024)
    checked = 0
    ok = True
    for D in (7, 11, 23):
        for d in (1, 5, -3):
            if math.gcd(D, d) != 1:
                continue
            char = twist_character(QuadraticField(D), d, 1)
            fac = factor_eps(char)
            for _ in range(12):
                v = int(rng.integers(1, 15))
                M = int(rng.integers(1, 500))
                w = int(rng.integers(M, 2 * M + 1))
                good, witness, direct, via = reduction_identity_check(char, v, M, w, fac)
                ok = ok and good
                checked += 1
    ok = ok and checked >= 100
    dyadic_cases = [(7, 1, 1), (11, 1, 1), (23, 5, 1), (8, -3, 1), (24, 1, 1),
                    (15, 1, 1), (31, -7, 1), (40, 1, 1), (7, -8, 2), (19, 5, 2)]
    for D, d, k in dyadic_cases:
        char = twist_character(QuadraticField(D), d, k)
        good, details = dyadic_consistency(D, d, k, char)
        ok = ok and good
    validated = 0
    for D in range(5, 101):
        if not is_fundamental_discriminant(-D) or (D % 2 == 0 and D % 8):
            continue
        field = QuadraticField(D)
        for i in range(len(build_canonical(field))):
            for d in (1, 5, -3, 8, -8):
                if math.gcd(d, D) != 1:
                    continue
                rep = validate_character(twist_character(field, d, 1, i))
                ok = ok and rep.ok
                validated += 1
    _report("8 (exact identities)", ok,
            f"{checked} reduction tuples, {len(dyadic_cases)} dyadic cases, "
            f"{validated} characters validated")
    assert ok


def test_criterion_9_thread_determinism(sweep, tmp_path):
    _, _, path1 = sweep
    out8 = tmp_path / "sweep_t8.jsonl"
    rc = main(["sweep", "--dmax", str(DMAX), "--twists", TWISTS,
               "--weights", WEIGHTS, "--tol", "1e-8",
               "--out", str(out8), "--threads", "8"])
    ok = rc == 0 and path1.read_bytes() == out8.read_bytes()
    _report("9 (thread determinism)", ok,
            f"{out8.stat().st_size} bytes compared")
    assert ok
