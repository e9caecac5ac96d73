"""Exact arithmetic for imaginary quadratic fields Q(sqrt(-D)).

Covers the integer layer everything else sits on: fundamental
discriminant tests, the full Kronecker symbol, integral ideals as
Z-modules in Hermite normal form with respect to the ring basis
{1, omega}, reduced binary quadratic forms / class numbers, and
enumeration of one generator per principal ideal ordered by norm.

Only discriminants -D with D odd or divisible by 8 are admitted; the
ring generator is omega = (1 + sqrt(-D))/2 for odd D and
omega = sqrt(-D)/2 when 8 | D.  All operations are pure and all values
immutable, so everything here is safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator


class ZeroIdealError(ValueError):
    pass


def _squarefree(n: int) -> bool:
    n = abs(n)
    if n == 0:
        return False
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        if n % d == 0:
            n //= d
        d += 1
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of |n| by trial division (small inputs)."""
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def is_fundamental_discriminant(m: int) -> bool:
    """True iff m is the discriminant of a quadratic field.

    The unit discriminant 1 is excluded; otherwise m must be 1 mod 4
    and squarefree, or 4n with n = 2 or 3 mod 4 and n squarefree.
    """
    if m in (0, 1):
        return False
    if m % 4 == 1:
        return _squarefree(m)
    if m % 4 == 0:
        n = m // 4
        return n % 4 in (2, 3) and _squarefree(n)
    return False


def kronecker(a: int, n: int) -> int:
    """Full Kronecker symbol (a/n) for arbitrary integers.

    Conventions: (a/0) = 1 iff |a| = 1; (a/-1) = -1 iff a < 0 (which
    makes (-D/-1) = -1 for D > 0); (a/2) follows the mod-8 rule.
    """
    if n == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    r = 1
    if n < 0:
        n = -n
        if a < 0:
            r = -r
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t % 2 == 1:
        m8 = a % 8
        if m8 in (3, 5):
            r = -r
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                r = -r
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            r = -r
        a %= n
    return r if n == 1 else 0


@dataclass(frozen=True)
class QuadraticField:
    """The order of discriminant -D, with -D fundamental, D > 4, D odd or 8 | D."""

    D: int

    def __post_init__(self) -> None:
        if not is_fundamental_discriminant(-self.D):
            raise ValueError(f"-{self.D} is not a fundamental discriminant")
        if self.D <= 4:
            raise ValueError(f"discriminant -{self.D} excluded: need D > 4")
        if self.D % 2 == 0 and self.D % 8 != 0:
            raise ValueError(f"D = {self.D} must be odd or divisible by 8")

    @property
    def parity_class(self) -> str:
        return "odd" if self.D % 2 else "div8"

    @property
    def omega_kind(self) -> str:
        if self.D % 2:
            return "(1+sqrt(-D))/2"
        return "sqrt(-D)/2"

    @property
    def dstar(self) -> int:
        """D* = D gcd(2, D): the conductor-square root of the completed level."""
        return self.D * math.gcd(2, self.D)

    @property
    def h(self) -> int:
        return class_number(self.D)

    # --- ring basis helpers: elements are pairs (x, y) meaning x + y*omega ---

    def omega_sq(self) -> tuple[int, int]:
        """omega^2 = q + p*omega as integer pair (q, p)."""
        if self.D % 2:
            # omega^2 - omega + (1+D)/4 = 0
            return (-(1 + self.D) // 4, 1)
        return (-self.D // 4, 0)

    def mul_xy(self, p1: tuple[int, int], p2: tuple[int, int]) -> tuple[int, int]:
        x1, y1 = p1
        x2, y2 = p2
        q, p = self.omega_sq()
        yy = y1 * y2
        return (x1 * x2 + q * yy, x1 * y2 + x2 * y1 + p * yy)

    def conj_xy(self, pt: tuple[int, int]) -> tuple[int, int]:
        x, y = pt
        if self.D % 2:
            # conj(omega) = 1 - omega
            return (x + y, -y)
        return (x, -y)

    def norm_xy(self, pt: tuple[int, int]) -> int:
        x, y = pt
        if self.D % 2:
            return x * x + x * y + y * y * (1 + self.D) // 4
        return x * x + y * y * (self.D // 4)

    def sqrt_minus_D(self) -> tuple[int, int]:
        if self.D % 2:
            return (-1, 2)
        return (0, 2)

    def xy_from_uv(self, u: int, v: int) -> tuple[int, int]:
        """Basis coordinates of alpha = (u + v*sqrt(-D))/2; requires 4 | u^2 + D v^2."""
        if (u * u + self.D * v * v) % 4:
            raise ValueError(f"({u} + {v} sqrt(-{self.D}))/2 is not an algebraic integer")
        if self.D % 2:
            return ((u - v) // 2, v)
        return (u // 2, v)


@dataclass(frozen=True)
class LatticePoint:
    """alpha = (u + v*sqrt(-D))/2 subject to the integrality condition 4 | (u^2 + D v^2)."""

    u: int
    v: int
    D: int

    def __post_init__(self) -> None:
        if (self.u * self.u + self.D * self.v * self.v) % 4:
            raise ValueError("4 must divide u^2 + D v^2")

    @property
    def norm(self) -> int:
        return (self.u * self.u + self.D * self.v * self.v) // 4


def _hnf_two_columns(rows: list[list[int]]) -> tuple[int, int, int]:
    """HNF (a, b, c) of the Z-span of integer rows (x, y): span = Z*a + Z*(b + c*omega)."""
    rows = [list(r) for r in rows if r[0] or r[1]]
    if not rows:
        raise ZeroIdealError("zero ideal")

    def euclid_rows(r1: list[int], r2: list[int]) -> tuple[list[int], list[int]]:
        # Zero out r2's omega-coefficient by Euclid steps on column 1.
        a, b = r1[:], r2[:]
        while b[1] != 0:
            q = a[1] // b[1]
            a = [a[0] - q * b[0], a[1] - q * b[1]]
            a, b = b, a
        return a, b

    cur: list[int] | None = None
    ints: list[int] = []
    for r in rows:
        if r[1] == 0:
            ints.append(r[0])
            continue
        if cur is None:
            cur = r
        else:
            cur, z = euclid_rows(cur, r)
            ints.append(z[0])
    a = 0
    for z in ints:
        a = math.gcd(a, abs(z))
    if cur is None:
        raise ZeroIdealError("zero ideal" if a == 0 else "module has rank 1, not an ideal")
    c = abs(cur[1])
    b = cur[0] if cur[1] > 0 else -cur[0]
    if a == 0:
        raise ZeroIdealError("module has rank 1, not an ideal")
    b %= a
    return a, b, c


@dataclass(frozen=True)
class IdealZModule:
    """Nonzero Z-module Z*a + Z*(b + c*omega) in HNF: 0 <= b < a, c | a, c | b.

    Instances produced by :func:`ideal_from_generators` are genuine
    ideals (closed under multiplication by omega); the divisibility
    constraints hold exactly for those.
    """

    field: QuadraticField
    a: int
    b: int
    c: int

    @property
    def norm(self) -> int:
        return self.a * self.c

    @property
    def least_positive_integer(self) -> int:
        return self.a

    def contains(self, pt: tuple[int, int]) -> bool:
        x, y = pt
        if y % self.c:
            return False
        q = y // self.c
        return (x - q * self.b) % self.a == 0

    def reduce(self, pt: tuple[int, int]) -> tuple[int, int]:
        """Canonical residue (x, y) with 0 <= x < a, 0 <= y < c."""
        x, y = pt
        r = y % self.c
        q = (y - r) // self.c
        return ((x - q * self.b) % self.a, r)

    def basis(self) -> list[tuple[int, int]]:
        return [(self.a, 0), (self.b, self.c)]

    def mul(self, other: "IdealZModule") -> "IdealZModule":
        rows = []
        for g1 in self.basis():
            for g2 in other.basis():
                rows.append(list(self.field.mul_xy(g1, g2)))
        a, b, c = _hnf_two_columns(rows)
        return IdealZModule(self.field, a, b, c)

    def conj(self) -> "IdealZModule":
        rows = [list(self.field.conj_xy(g)) for g in self.basis()]
        rows += [list(self.field.mul_xy((0, 1), tuple(r))) for r in rows]
        a, b, c = _hnf_two_columns(rows)
        return IdealZModule(self.field, a, b, c)

    def div_int(self, n: int) -> "IdealZModule":
        """Divide by the rational integer n; every HNF entry must be divisible."""
        n = abs(n)
        if self.a % n or self.b % n or self.c % n:
            raise ValueError(f"ideal not divisible by {n}")
        return IdealZModule(self.field, self.a // n, self.b // n, self.c // n)

    def quotient_by(self, other: "IdealZModule") -> "IdealZModule":
        """The ideal quotient (self : other) = self * conj(other) / N(other); assumes other | self."""
        return self.mul(other.conj()).div_int(other.norm)


def ideal_from_generators(field: QuadraticField, gens: Iterable) -> IdealZModule:
    """Ideal generated by ``gens``: integers n or basis pairs (x, y) = x + y*omega.

    The result is the HNF of the Z-span of {g, g*omega} over all
    generators, which is closed under multiplication by omega by
    construction; closure is asserted.
    """
    rows: list[list[int]] = []
    for g in gens:
        pt = (g, 0) if isinstance(g, int) else (int(g[0]), int(g[1]))
        rows.append(list(pt))
        rows.append(list(field.mul_xy(pt, (0, 1))))
    a, b, c = _hnf_two_columns(rows)
    ideal = IdealZModule(field, a, b, c)
    for bb in ideal.basis():
        if not ideal.contains(field.mul_xy(bb, (0, 1))):
            raise ValueError("generated module is not omega-stable")
    if ideal.a % ideal.c or ideal.b % ideal.c:
        raise ValueError("HNF of an ideal must satisfy c | a, c | b")
    return ideal


def conductor_ideal(field: QuadraticField) -> IdealZModule:
    """The ideal (2 sqrt(-D), D)."""
    s = field.sqrt_minus_D()
    return ideal_from_generators(field, [(2 * s[0], 2 * s[1]), field.D])


@lru_cache(maxsize=None)
def class_number(D: int) -> int:
    """Number of reduced forms (a, b, c), b^2 - 4ac = -D, |b| <= a <= c,
    with b >= 0 whenever |b| = a or a = c."""
    if not is_fundamental_discriminant(-D):
        raise ValueError(f"-{D} is not a fundamental discriminant")
    count = 0
    amax = math.isqrt(D // 3) + 1
    for a in range(1, amax + 1):
        for b in range(-a + 1, a + 1):
            num = b * b + D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and (abs(b) == a or a == c):
                continue
            count += 1
    return count


def principal_lattice_points(field: QuadraticField, norm_bound: float) -> Iterator[LatticePoint]:
    """One generator per principal ideal (alpha), alpha not rational, N(alpha) <= norm_bound.

    Exactly the points u > 0, v != 0 with 4 | (u^2 + D v^2) and
    (u^2 + D v^2)/4 <= norm_bound, emitted by (norm, u, v).  Purely
    imaginary generators (u = 0) are excluded: they are never prime to
    the conductor, so every character of interest vanishes there.
    """
    if norm_bound < 1:
        raise ValueError("norm_bound must be >= 1")
    D = field.D
    m4 = int(4 * norm_bound)
    pts = []
    vmax = math.isqrt(m4 // D)
    for v in range(-vmax, vmax + 1):
        if v == 0:
            continue
        rem = m4 - D * v * v
        if rem < 1:
            continue
        for u in range(1, math.isqrt(rem) + 1):
            if (u * u + D * v * v) % 4 == 0:
                pts.append(LatticePoint(u, v, D))
    pts.sort(key=lambda p: (p.norm, p.u, p.v))
    return iter(pts)
