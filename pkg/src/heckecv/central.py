"""Central values, central derivatives, and root numbers.

With Q = D*|d|/(2 pi) and chi the twisted character of weight data k,
the completed function Lambda(s) = Q^s Gamma(s) L(s, chi, p) over
principal ideals satisfies Lambda(s) = W Lambda(2k - s) for a sign W.
Everything here works with the ratio-normalized smoothed sums

    Abar(x) = sum over principal ideals of c(a) N(a)^-k
              Gamma(k, N(a)/(Q x)) / Gamma(k),

split into the rational part (ideals (n)) and the conjugate-grouped
lattice part.  Key identities realized in code:

* L(k, chi, p) = Abar(x) + W Bbar(x) for every x, with Bbar(x) = Abar(1/x);
* Abar(1) = I1 + I2 where I1, I2 are the incomplete-gamma closed forms
  of the rational and lattice halves, so L(k) = 2 (I1 + I2) when W = +1;
* (1/2) L'(k, chi, p) = R_k + C via the log-weighted kernel when W = -1,
  with the k = 1 rational part cross-evaluated through the nonnegative
  a_n expansion R_1 = sum a_n n^-1 I(Q / n^2).

W itself is solved from the smoothed sums at x = 1 and x = 2.  The
reciprocal pair {1/2, 2} is unusable: Bbar(x) = Abar(1/x) makes those
two equations proportional whenever W = -1, so x = 1/2 serves as the
post-solve consistency point instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

from .characters import EpsCharacter, build_canonical, twist_character
from .dirichlet import an_coefficients, lambda_k_derivative_at_1
from .kernels import AccuracyBudget, ToleranceError, log_weight_integral, log_weight_integral_bound
from .lattice import KIND_INC_GAMMA, KIND_LOG, SumResult, lattice_sum, rational_sum
from .quadfield import QuadraticField, is_fundamental_discriminant


class RootNumberError(ArithmeticError):
    pass


class RouteMismatchError(ArithmeticError):
    pass


@dataclass
class CentralReport:
    """Everything the harness records for one (D, d, k, variant)."""

    D: int
    d: int
    k: int
    h: int
    variant_index: int
    W: int | None = None
    W_residual: float | None = None
    I1: float | None = None
    I1_bound: float | None = None
    I2: float | None = None
    I2_bound: float | None = None
    Rk: float | None = None
    Rk_bound: float | None = None
    C: float | None = None
    C_bound: float | None = None
    L_central: float | None = None
    L_deriv_central: float | None = None
    predicted_order: str = "inconclusive"
    value_scale: float | None = None
    tol: float = 1e-8
    truncation: dict = dc_field(default_factory=dict)
    notes: list = dc_field(default_factory=list)


ORDER_RATIO = 1e-6  # |value| must exceed ORDER_RATIO * scale to call the order


def _validated_inputs(D: int, d: int, k: int) -> QuadraticField:
    if not is_fundamental_discriminant(-D) or D <= 4 or (D % 2 == 0 and D % 8):
        raise ValueError(f"-{D} not a valid discriminant (must be odd or divisible by 8, "
                         "fundamental, D > 4)")
    if not (d == 1 or is_fundamental_discriminant(d)):
        raise ValueError(f"twist {d} must be 1 or a fundamental discriminant")
    if math.gcd(d, D) != 1:
        raise ValueError("twist shares factor with D")
    field = QuadraticField(D)
    if k < 1:
        raise ValueError("weight parameter k must be a positive integer")
    if math.gcd(2 * k - 1, field.h) != 1:
        raise ValueError("k shares factor with class number")
    return field


def q_parameter(D: int, d: int) -> float:
    return D * math.gcd(2, D) * abs(d) / (2.0 * math.pi)


def I1(D: int, d: int, k: int, tol: float = 1e-10) -> SumResult:
    """Rational half of the central value: sum chi(n)/n Gamma(k, n^2/Q)/Gamma(k)."""
    _validated_inputs(D, d, k)
    return rational_sum(D, d, k, 1.0 / q_parameter(D, d), KIND_INC_GAMMA, tol)


def I2(D: int, d: int, k: int, char: EpsCharacter, tol: float = 1e-10) -> SumResult:
    """Lattice half of the central value, conjugate-grouped."""
    if (char.field.D, char.d, char.k) != (D, d, k):
        raise ValueError("character does not match (D, d, k)")
    return lattice_sum(char, k, 1.0 / q_parameter(D, d), KIND_INC_GAMMA, tol)


def Rk(D: int, d: int, k: int, tol: float = 1e-10, cross_check: bool = True) -> SumResult:
    """Rational half of the central derivative, log-weighted kernel.

    For k = 1 the value is re-derived through the a_n expansion
    R_1 = sum_n a_n n^-1 I(Q/n^2); the two routes must agree within
    2 tol or the computation aborts (a kernel bug, not a data issue).
    """
    _validated_inputs(D, d, k)
    Q = q_parameter(D, d)
    res = rational_sum(D, d, k, 1.0 / Q, KIND_LOG, tol)
    if k == 1 and cross_check:
        alt = r1_via_weight_integral(D, d, tol)
        if abs(alt - res.value) > 2.0 * max(tol, 1e-9):
            raise RouteMismatchError(
                f"R1 route mismatch: log-kernel {res.value:.12g} vs a_n expansion {alt:.12g}")
    return res


def r1_via_weight_integral(D: int, d: int, tol: float = 1e-8) -> float:
    """R_1 = sum_n a_n n^-1 I(Q/n^2), truncated via the line-shift bound on I."""
    Q = q_parameter(D, d)
    # |I(x)| <= C(6) x^5, so terms with a_n <= 2 sqrt(n) are negligible once
    # 2 C(6) Q^5 / n^(10.5) < tol / (2 n_max); solve crudely and refine.
    n_max = 4
    while 2.0 * log_weight_integral_bound(Q / n_max ** 2) / math.sqrt(n_max) * n_max > 0.25 * tol:
        n_max = int(n_max * 1.3) + 2
        if n_max > 100_000:
            raise ToleranceError("a_n weight-integral cutoff exploded")
    a = an_coefficients(D, d, n_max)
    per_term = 0.25 * tol / (1.0 + math.log(n_max))
    total = 0.0
    for n in range(1, n_max + 1):
        if a[n] == 0.0:
            continue
        x = Q / (n * n)
        total += a[n] / n * log_weight_integral(x, tol=max(per_term, 1e-12))
    return total


def C_term(D: int, d: int, k: int, char: EpsCharacter, tol: float = 1e-10) -> SumResult:
    """Lattice half of the central derivative, log-weighted kernel.

    Normalized by 1/Gamma(k) to mirror the incomplete-gamma half; for
    k = 1 the normalization is vacuous.
    """
    if (char.field.D, char.d, char.k) != (D, d, k):
        raise ValueError("character does not match (D, d, k)")
    return lattice_sum(char, k, 1.0 / q_parameter(D, d), KIND_LOG, tol)


def lambda_smoothed(D: int, d: int, k: int, char: EpsCharacter, x: float,
                    tol: float = 1e-10) -> tuple[float, float, float]:
    """(Abar(x), Bbar(x), bound): the two smoothed halves of L(k, chi, p).

    Normalization: L(k, chi, p) = Abar(x) + W Bbar(x) for every x in
    [1/8, 8]; at x = 1 the two halves coincide and equal I1 + I2.
    """
    if not (0.125 <= x <= 8.0):
        raise ValueError("x must lie in [1/8, 8]")
    Q = q_parameter(D, d)
    parts = []
    bound = 0.0
    for sc in (1.0 / (Q * x), x / Q):
        r = rational_sum(D, d, k, sc, KIND_INC_GAMMA, 0.5 * tol)
        l = lattice_sum(char, k, sc, KIND_INC_GAMMA, 0.5 * tol)
        parts.append(r.value + l.value)
        bound = max(bound, r.tail_bound + l.tail_bound)
    return parts[0], parts[1], bound


def root_number(D: int, d: int, k: int, char: EpsCharacter | None = None,
                tol: float = 1e-10) -> tuple[int, float, dict]:
    """Solve W from L = Abar(x_i) + W Bbar(x_i) at x = 1 and x = 2.

    Requires |W_solved| within 1e-4 of 1 and re-checks the functional
    equation at x = 1/2 before returning the rounded sign.
    """
    field = _validated_inputs(D, d, k)
    if char is None:
        char = twist_character(field, d, k, 0)
    A1, B1, b1 = lambda_smoothed(D, d, k, char, 1.0, tol)
    A2, B2, b2 = lambda_smoothed(D, d, k, char, 2.0, tol)
    num = A1 - A2
    den = B2 - B1
    scale = max(abs(A1), abs(A2), abs(B1), abs(B2), 1e-12)
    noise = 50.0 * (b1 + b2 + 1e-15 * scale)
    if abs(den) <= noise:
        raise RootNumberError("indeterminate W: raise precision")
    W = num / den
    if abs(abs(W) - 1.0) > 1e-4:
        raise RootNumberError(
            f"functional equation violated: |W| = {abs(W):.8f} (solved W = {W:.8f})")
    Wint = 1 if W > 0 else -1
    Ah, Bh, bh = lambda_smoothed(D, d, k, char, 0.5, tol)
    L1 = A1 + Wint * B1
    Lh = Ah + Wint * Bh
    L2 = A2 + Wint * B2
    spread = max(abs(L1 - Lh), abs(L1 - L2))
    if spread > 3.0 * max(tol, b1 + b2 + bh) * max(1.0, scale):
        raise RootNumberError(
            f"functional equation violated: smoothed value varies by {spread:.3e} across x")
    diag = {"W_solved": W, "A": (Ah, A1, A2), "B": (Bh, B1, B2),
            "L_afe": L1, "x_spread": spread}
    return Wint, abs(W - Wint), diag


def _report_base(D: int, d: int, k: int, variant_index: int, tol: float) -> tuple[
        QuadraticField, EpsCharacter, CentralReport]:
    field = _validated_inputs(D, d, k)
    canon = build_canonical(field)
    if not 0 <= variant_index < len(canon):
        raise ValueError(f"variant_index {variant_index} out of range (have {len(canon)})")
    char = twist_character(field, d, k, variant_index)
    rep = CentralReport(D=D, d=d, k=k, h=field.h, variant_index=variant_index, tol=tol)
    return field, char, rep


def _fill_value_side(rep: CentralReport, D, d, k, char, tol) -> None:
    i1 = I1(D, d, k, tol)
    i2 = I2(D, d, k, char, tol)
    rep.I1, rep.I1_bound = i1.value, i1.tail_bound
    rep.I2, rep.I2_bound = i2.value, i2.tail_bound
    rep.truncation["I1_cutoff"] = i1.cutoff
    rep.truncation["I2_cutoff"] = i2.cutoff


def _fill_deriv_side(rep: CentralReport, D, d, k, char, tol) -> None:
    rk = Rk(D, d, k, tol)
    c = C_term(D, d, k, char, tol)
    rep.Rk, rep.Rk_bound = rk.value, rk.tail_bound
    rep.C, rep.C_bound = c.value, c.tail_bound
    rep.truncation["Rk_cutoff"] = rk.cutoff
    rep.truncation["C_cutoff"] = c.cutoff
    if k > 1:
        rep.notes.append("C normalized by 1/Gamma(k) to match the value-side convention")


def central_report(D: int, d: int, k: int, variant_index: int = 0,
                   tol: float = 1e-8) -> CentralReport:
    """Root number plus whichever of L(k) / L'(k) the sign makes meaningful."""
    field, char, rep = _report_base(D, d, k, variant_index, tol)
    sum_tol = min(tol * 1e-2, 1e-10)
    W, resid, diag = root_number(D, d, k, char, sum_tol)
    rep.W, rep.W_residual = W, resid
    if W == +1:
        _fill_value_side(rep, D, d, k, char, sum_tol)
        rep.L_central = 2.0 * (rep.I1 + rep.I2)
        rep.value_scale = abs(rep.I1) + abs(rep.I2)
        afe = diag["A"][2] + W * diag["B"][2]  # x = 2 route, independent of x = 1
        if abs(rep.L_central - afe) > 10.0 * tol * max(1.0, rep.value_scale):
            raise RouteMismatchError(
                f"value route mismatch: 2(I1+I2) = {rep.L_central:.12g} vs "
                f"smoothed {afe:.12g}")
        rep.predicted_order = "0" if abs(rep.L_central) > ORDER_RATIO * rep.value_scale \
            else "inconclusive"
    else:
        _fill_deriv_side(rep, D, d, k, char, sum_tol)
        rep.L_deriv_central = 2.0 * (rep.Rk + rep.C)
        rep.value_scale = abs(rep.Rk) + abs(rep.C)
        rep.L_central = 0.0  # structural zero when W = -1
        rep.predicted_order = "1" if abs(rep.L_deriv_central) > ORDER_RATIO * rep.value_scale \
            else "inconclusive"
    rep.truncation["x_spread"] = diag["x_spread"]
    return rep


def central_value(D: int, d: int, k: int, variant_index: int = 0,
                  tol: float = 1e-8) -> CentralReport:
    """L(k, chi, p) = 2 (I1 + I2); meaningful when W = +1."""
    rep = central_report(D, d, k, variant_index, tol)
    if rep.I1 is None:
        _, char, _ = _report_base(D, d, k, variant_index, tol)
        _fill_value_side(rep, D, d, k, char, min(tol * 1e-2, 1e-10))
    if rep.W == -1:
        rep.notes.append("root number -1: value route not meaningful, central value "
                         "vanishes structurally")
    return rep


def central_derivative(D: int, d: int, k: int, variant_index: int = 0,
                       tol: float = 1e-8) -> CentralReport:
    """L'(k, chi, p) = 2 (R_k + C); meaningful when W = -1."""
    rep = central_report(D, d, k, variant_index, tol)
    if rep.Rk is None:
        _, char, _ = _report_base(D, d, k, variant_index, tol)
        _fill_deriv_side(rep, D, d, k, char, min(tol * 1e-2, 1e-10))
        rep.L_deriv_central = 2.0 * (rep.Rk + rep.C)
    if rep.W == +1:
        rep.notes.append("root number +1: derivative route not meaningful here")
    return rep


def variant_count(D: int) -> int:
    return len(build_canonical(QuadraticField(D)))
