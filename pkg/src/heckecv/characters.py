"""Canonical quadratic characters on residues modulo (2 sqrt(-D), D) and their twists.

The canonical character eps_can takes the value chi((alpha))/alpha^(2k-1)
on generators of principal ideals prime to the conductor.  For odd D it
has the closed form eps_can(alpha) = kronecker(-D, a) with a an integer
congruent to alpha mod (sqrt(-D)).  For 8 | D no closed form is used;
instead every {+-1}-valued homomorphism on the unit group of
O/(2 sqrt(-D), D) compatible with the integer values kronecker(-D, n)
is found by solving a linear system over GF(2) on a basis of the
square-class group.  Twisting by a fundamental discriminant d multiplies
by kronecker(d, N(alpha)).

Character tables are dense int8 grids over the HNF residue system of
the conductor, built once per (D, d) and shared immutably; the grid
lookup is the innermost operation of every lattice sum.
"""

from __future__ import annotations

import base64
import json
import math
import threading
from dataclasses import dataclass, field as dc_field

import numpy as np

from .quadfield import (
    IdealZModule,
    LatticePoint,
    QuadraticField,
    conductor_ideal,
    ideal_from_generators,
    is_fundamental_discriminant,
    kronecker,
)

BLOB_VERSION = 1


class CharacterSolverError(ArithmeticError):
    pass


class FactorizationError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# residue rings and the GF(2) sign-character solver


class ResidueRing:
    """The finite ring O/I for an HNF ideal I, with unit-group square-class data."""

    def __init__(self, ideal: IdealZModule):
        self.ideal = ideal
        self.field = ideal.field
        self.a = ideal.a
        self.b = ideal.b
        self.c = ideal.c
        self.norm = ideal.norm

    def reduce(self, pt: tuple[int, int]) -> tuple[int, int]:
        return self.ideal.reduce(pt)

    def mul(self, p1: tuple[int, int], p2: tuple[int, int]) -> tuple[int, int]:
        return self.reduce(self.field.mul_xy(p1, p2))

    def is_unit(self, pt: tuple[int, int]) -> bool:
        # alpha is invertible mod I iff N(alpha) is prime to N(I): the
        # prime support of N(I) is exactly the set of rational primes
        # under the prime ideals dividing I here (ramified or d-split).
        return math.gcd(self.field.norm_xy(pt), self.norm) == 1

    def units(self) -> list[tuple[int, int]]:
        out = []
        for x in range(self.a):
            for y in range(self.c):
                if self.is_unit((x, y)):
                    out.append((x, y))
        return out

    def square_class_coords(self) -> tuple[list[tuple[int, int]], dict[tuple[int, int], int]]:
        """Basis of units/(squares) and GF(2) coordinates of every unit as bitmasks.

        The unit group is abelian, so its squares already form a
        subgroup; successive coset doubling then assigns every unit a
        unique coordinate vector over the chosen basis.
        """
        units = self.units()
        coord = {self.mul(u, u): 0 for u in units}
        coord[self.reduce((1, 0))] = 0
        basis: list[tuple[int, int]] = []
        for u in units:
            if u in coord:
                continue
            bit = 1 << len(basis)
            basis.append(u)
            for s, v in list(coord.items()):
                t = self.mul(s, u)
                if t in coord:
                    raise CharacterSolverError("square-class coset overlap")
                coord[t] = v | bit
        if len(coord) != len(units):
            raise CharacterSolverError("unit group closure failed")
        return basis, coord


def _solve_gf2(rows: list[tuple[int, int]], nbits: int) -> list[int] | None:
    """All solutions of the GF(2) system; rows are (coefficient bitmask, target bit).

    Returns the full solution list (as bitmasks over nbits unknowns) or
    None when inconsistent.
    """
    pivots: dict[int, tuple[int, int]] = {}
    for vec, t in rows:
        for p in sorted(pivots, reverse=True):
            if vec >> p & 1:
                pv, pt = pivots[p]
                vec ^= pv
                t ^= pt
        if vec == 0:
            if t:
                return None
            continue
        pivots[vec.bit_length() - 1] = (vec, t)
    free = [i for i in range(nbits) if i not in pivots]
    sols = []
    for m in range(1 << len(free)):
        cur = 0
        for i, fb in enumerate(free):
            if m >> i & 1:
                cur |= 1 << fb
        # each pivot row has its pivot as the top bit, so substitute lowest-first
        for p in sorted(pivots):
            pv, pt = pivots[p]
            val = pt ^ (bin(pv & cur & ~(1 << p)).count("1") & 1)
            cur = (cur & ~(1 << p)) | (val << p)
        sols.append(cur)
    return sols


def _sign_tables_from_solutions(ring: ResidueRing, coord, sols) -> list[np.ndarray]:
    tables = []
    for sol in sols:
        tab = np.zeros((ring.a, ring.c), dtype=np.int8)
        for (x, y), vec in coord.items():
            tab[x, y] = -1 if (bin(sol & vec).count("1") & 1) else 1
        tables.append(tab)
    tables.sort(key=lambda t: t.tobytes())
    return tables


def solve_sign_character(ring: ResidueRing,
                         constraints: list[tuple[tuple[int, int], int]]) -> list[np.ndarray]:
    """All {+-1}-homomorphisms on the units of ``ring`` meeting the constraints.

    Constraints are (residue, +-1) pairs on unit residues.  Returned as
    int8 grids of shape (a, c), zero on non-units, sorted lexicographically.
    """
    basis, coord = ring.square_class_coords()
    rows = []
    for pt, target in constraints:
        r = ring.reduce(pt)
        if r not in coord:
            continue
        rows.append((coord[r], 0 if target == 1 else 1))
    sols = _solve_gf2(rows, len(basis))
    if sols is None:
        raise CharacterSolverError("character constraint system inconsistent")
    return _sign_tables_from_solutions(ring, coord, sols)


# ---------------------------------------------------------------------------
# canonical characters


@dataclass(frozen=True)
class CanonicalCharacter:
    """Untwisted, weight-free sign character on O modulo (2 sqrt(-D), D)."""

    field: QuadraticField
    variant_index: int
    modulus: IdealZModule
    table: np.ndarray  # int8, shape (a, c); zero on non-units

    def value(self, pt: tuple[int, int]) -> int:
        x, y = self.modulus.reduce(pt)
        return int(self.table[x, y])


_canonical_cache: dict[int, tuple[CanonicalCharacter, ...]] = {}
_cache_lock = threading.Lock()


def _closed_form_table(field: QuadraticField, f0: IdealZModule) -> np.ndarray:
    """Odd D: eps_can(x + y*omega) = kronecker(-D, x + y*(D+1)/2 mod D)."""
    D = field.D
    inv2 = (D + 1) // 2  # inverse of 2 mod D
    kron_row = np.array([kronecker(-D, r) for r in range(D)], dtype=np.int8)
    xs = np.arange(f0.a, dtype=np.int64)[:, None]
    ys = np.arange(f0.c, dtype=np.int64)[None, :]
    n_int = (xs + inv2 * ys) % D
    tab = kron_row[n_int]
    # zero out residues not prime to the conductor
    norms = xs * xs + xs * ys + ys * ys * ((1 + D) // 4)
    invertible = np.gcd(norms, f0.norm) == 1
    return np.where(invertible, tab, 0).astype(np.int8)


def build_canonical(field: QuadraticField) -> tuple[CanonicalCharacter, ...]:
    """All canonical sign characters of the field, in lexicographic table order.

    One character (closed form) for odd D; for 8 | D all solutions of
    the GF(2) constraint system, recorded in the order of their packed
    tables.  The empirical solution count is part of the returned data
    rather than being asserted.
    """
    with _cache_lock:
        if field.D in _canonical_cache:
            return _canonical_cache[field.D]
    f0 = conductor_ideal(field)
    if field.D % 2:
        tables = [_closed_form_table(field, f0)]
    else:
        ring = ResidueRing(f0)
        constraints = []
        for n in range(1, f0.a + 1):
            kn = kronecker(-field.D, n)
            if kn:
                constraints.append(((n, 0), kn))
        tables = solve_sign_character(ring, constraints)
    chars = tuple(
        CanonicalCharacter(field, i, f0, tab) for i, tab in enumerate(tables)
    )
    with _cache_lock:
        _canonical_cache[field.D] = chars
    return chars


def solve_canonical(field: QuadraticField) -> list[np.ndarray]:
    """Constraint-solver route for any parity (test cross-check for odd D)."""
    f0 = conductor_ideal(field)
    ring = ResidueRing(f0)
    constraints = []
    for n in range(1, f0.a + 1):
        kn = kronecker(-field.D, n)
        if kn:
            constraints.append(((n, 0), kn))
    return solve_sign_character(ring, constraints)


# ---------------------------------------------------------------------------
# twisted characters


@dataclass(frozen=True)
class EpsCharacter:
    """The quadratic character eps = eps_can * kronecker(d, N(.)) with weight data.

    ``table`` is indexed by the HNF residue system of the conductor
    d (2 sqrt(-D), D): entry [x, y] is eps(x + y*omega), zero when the
    argument is not prime to the conductor.  ``k`` rides along for the
    full character value chi((alpha)) = eps(alpha) alpha^(2k-1).
    """

    field: QuadraticField
    d: int
    k: int
    variant_index: int
    modulus: IdealZModule
    table: np.ndarray
    canonical: CanonicalCharacter = dc_field(repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        if not (self.d == 1 or is_fundamental_discriminant(self.d)):
            raise ValueError(f"twist d = {self.d} must be 1 or a fundamental discriminant")
        if math.gcd(self.d, self.field.D) != 1:
            raise ValueError("twist shares factor with D")
        if self.k < 1:
            raise ValueError("weight parameter k must be >= 1")
        if math.gcd(2 * self.k - 1, self.field.h) != 1:
            raise ValueError("k shares factor with class number")

    # -- scalar evaluation --------------------------------------------------

    def eps_xy(self, pt: tuple[int, int]) -> int:
        x, y = self.modulus.reduce(pt)
        return int(self.table[x, y])

    def eps_uv(self, u: int, v: int) -> int:
        return self.eps_xy(self.field.xy_from_uv(u, v))

    def eps_point(self, p: LatticePoint) -> int:
        return self.eps_uv(p.u, p.v)

    def chi_point(self, p: LatticePoint) -> complex:
        """chi((alpha)) = eps(alpha) alpha^(2k-1), exact integer arithmetic then float."""
        e = self.eps_uv(p.u, p.v)
        if e == 0:
            return 0j
        # (u + v sqrt(-D))^(2k-1) = A + B sqrt(-D) exactly
        A, B = 1, 0
        for _ in range(2 * self.k - 1):
            A, B = A * p.u - B * p.v * self.field.D, A * p.v + B * p.u
        scale = 2 ** (2 * self.k - 1)
        return e * complex(A / scale, B * math.sqrt(self.field.D) / scale)

    # -- vectorized evaluation (hot path) ------------------------------------

    def table_pack(self) -> tuple[np.ndarray, int, int, int]:
        """(table, a, b, c) for the jitted and vectorized lattice kernels."""
        return self.table, self.modulus.a, self.modulus.b, self.modulus.c

    def eps_uv_arrays(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        D = self.field.D
        if D % 2:
            x = (u - v) >> 1
        else:
            x = u >> 1
        a, b, c = self.modulus.a, self.modulus.b, self.modulus.c
        yr = v % c
        q = (v - yr) // c
        xr = (x - q * b) % a
        return self.table[xr, yr]

    # -- serialization -------------------------------------------------------

    def to_blob(self) -> str:
        payload = {
            "version": BLOB_VERSION,
            "D": self.field.D,
            "d": self.d,
            "k": self.k,
            "variant_index": self.variant_index,
            "conductor_hnf": [self.modulus.a, self.modulus.b, self.modulus.c],
            "residue_count": int(self.table.size),
            "table": base64.b64encode(self.table.tobytes()).decode("ascii"),
        }
        return json.dumps(payload, sort_keys=True)

    @staticmethod
    def from_blob(blob: str) -> "EpsCharacter":
        payload = json.loads(blob)
        if payload.get("version") != BLOB_VERSION:
            raise ValueError(f"unsupported character blob version {payload.get('version')!r}")
        field = QuadraticField(payload["D"])
        a, b, c = payload["conductor_hnf"]
        modulus = IdealZModule(field, a, b, c)
        raw = base64.b64decode(payload["table"])
        table = np.frombuffer(raw, dtype=np.int8).reshape(a, c).copy()
        if table.size != payload["residue_count"]:
            raise ValueError("character blob residue count mismatch")
        canon = build_canonical(field)[payload["variant_index"]]
        return EpsCharacter(field, payload["d"], payload["k"],
                            payload["variant_index"], modulus, table, canon)


_twist_cache: dict[tuple[int, int, int], tuple[IdealZModule, np.ndarray]] = {}


def _twisted_table(field: QuadraticField, d: int, canon: CanonicalCharacter
                   ) -> tuple[IdealZModule, np.ndarray]:
    key = (field.D, d, canon.variant_index)
    with _cache_lock:
        if key in _twist_cache:
            return _twist_cache[key]
    f0 = canon.modulus
    f = f0 if abs(d) == 1 else f0.mul(ideal_from_generators(field, [abs(d)]))
    a, b, c = f.a, f.b, f.c
    xs = np.arange(a, dtype=np.int64)[:, None]
    ys = np.arange(c, dtype=np.int64)[None, :]
    if field.D % 2:
        norms = xs * xs + xs * ys + ys * ys * ((1 + field.D) // 4)
    else:
        norms = xs * xs + ys * ys * (field.D // 4)
    invertible = np.gcd(norms, f.norm) == 1
    # canonical part via reduction mod f0
    yr = ys % f0.c
    q = (ys - yr) // f0.c
    xr = (xs - q * f0.b) % f0.a
    canon_vals = canon.table[xr, np.broadcast_to(yr, xr.shape)]
    if abs(d) == 1:
        twist_vals = np.ones_like(canon_vals)
    else:
        kron_row = np.array([kronecker(d, m) for m in range(abs(d))], dtype=np.int8)
        twist_vals = kron_row[norms % abs(d)]
    table = np.where(invertible, canon_vals * twist_vals, 0).astype(np.int8)
    table.setflags(write=False)
    with _cache_lock:
        _twist_cache[key] = (f, table)
    return f, table


def twist_character(field: QuadraticField, d: int, k: int, variant_index: int = 0) -> EpsCharacter:
    """The character eps for (D, d) with weight data k, for one canonical variant."""
    chars = build_canonical(field)
    if not 0 <= variant_index < len(chars):
        raise ValueError(f"variant_index {variant_index} out of range "
                         f"(field has {len(chars)} canonical characters)")
    canon = chars[variant_index]
    modulus, table = _twisted_table(field, d, canon)
    return EpsCharacter(field, d, k, variant_index, modulus, table, canon)


def make_characters(D: int, d: int, k: int) -> list[EpsCharacter]:
    """All (D, d, k) characters, one per canonical variant."""
    field = QuadraticField(D)
    return [twist_character(field, d, k, i) for i in range(len(build_canonical(field)))]


def eps_value(char: EpsCharacter, p: LatticePoint) -> int:
    return char.eps_point(p)


def chi_value(char: EpsCharacter, p: LatticePoint) -> complex:
    return char.chi_point(p)


# ---------------------------------------------------------------------------
# factorization eps = eps0 * eps1


@dataclass(frozen=True)
class EpsFactorization:
    """eps = eps0 * eps1 with conductors sqrt(-D)/(sqrt(-D),4) and d(sqrt(-D),4)."""

    char: EpsCharacter
    ring0: ResidueRing
    ring1: ResidueRing
    table0: np.ndarray
    table1: np.ndarray
    k0: int
    k1: int

    def eps0(self, pt: tuple[int, int]) -> int:
        x, y = self.ring0.reduce(pt)
        return int(self.table0[x, y])

    def eps1(self, pt: tuple[int, int]) -> int:
        x, y = self.ring1.reduce(pt)
        return int(self.table1[x, y])


def _factor_ideals(field: QuadraticField, d: int) -> tuple[IdealZModule, IdealZModule]:
    s = field.sqrt_minus_D()
    sqrtD = ideal_from_generators(field, [s])
    s4 = ideal_from_generators(field, [s, 4])
    i0 = sqrtD.quotient_by(s4)
    i1 = s4 if abs(d) == 1 else ideal_from_generators(field, [abs(d)]).mul(s4)
    return i0, i1


def factor_eps(char: EpsCharacter) -> EpsFactorization:
    """Split eps into eps0 * eps1 on the stated conductors by a joint GF(2) solve.

    Fails with FactorizationError when eps is not constant on residue
    classes modulo the product of the two conductors or the linear
    system is inconsistent (either signals a conductor computation bug).
    """
    field = char.field
    i0, i1 = _factor_ideals(field, char.d)
    ring0, ring1 = ResidueRing(i0), ResidueRing(i1)
    joint = ResidueRing(i0.mul(i1))

    basis0, coord0 = ring0.square_class_coords()
    basis1, coord1 = ring1.square_class_coords()
    t0, t1 = len(basis0), len(basis1)

    gb = joint.ideal.basis()
    rows = []
    for x in range(joint.a):
        for y in range(joint.c):
            if not joint.is_unit((x, y)):
                continue
            e = char.eps_xy((x, y))
            # eps must be constant on classes modulo the joint conductor,
            # otherwise no factorization on these moduli can exist
            for g in gb:
                if char.eps_xy((x + g[0], y + g[1])) != e:
                    raise FactorizationError(
                        "eps is not defined modulo the product of the factor conductors")
            if e == 0:
                continue
            r0 = ring0.reduce((x, y))
            r1 = ring1.reduce((x, y))
            if r0 not in coord0 or r1 not in coord1:
                raise FactorizationError("unit/conductor support mismatch")
            vec = coord0[r0] | (coord1[r1] << t0)
            rows.append((vec, 0 if e == 1 else 1))
    sols = _solve_gf2(rows, t0 + t1)
    if sols is None:
        raise FactorizationError("no eps0 * eps1 factorization on the stated conductors")
    sol = min(sols)
    tab0 = _sign_tables_from_solutions(ring0, coord0, [sol & ((1 << t0) - 1)])[0]
    tab1 = _sign_tables_from_solutions(ring1, coord1, [sol >> t0])[0]
    k1 = 2 * i1.least_positive_integer
    return EpsFactorization(char, ring0, ring1, tab0, tab1,
                            i0.least_positive_integer, k1)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    checks: list[tuple[str, bool, str]]

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def witnesses(self) -> list[str]:
        return [f"{name}: {msg}" for name, passed, msg in self.checks if not passed]


def validate_character(char: EpsCharacter, samples: int = 200, seed: int = 0) -> ValidationReport:
    """Homomorphy, integer compatibility, oddness, closed-form and conjugation checks."""
    rng = np.random.default_rng(seed)
    field = char.field
    mod = char.modulus
    checks: list[tuple[str, bool, str]] = []

    units = [(int(x), int(y)) for x in range(mod.a) for y in range(mod.c)
             if char.table[x, y] != 0]
    if not units:
        return ValidationReport([("nonempty", False, "character table has no units")])

    ok, msg = True, ""
    for _ in range(samples):
        p1 = units[rng.integers(len(units))]
        p2 = units[rng.integers(len(units))]
        prod = field.mul_xy(p1, p2)
        if char.eps_xy(p1) * char.eps_xy(p2) != char.eps_xy(prod):
            ok, msg = False, f"eps({p1})eps({p2}) != eps({p1}*{p2})"
            break
    checks.append(("homomorphism", ok, msg))

    ok, msg = True, ""
    for n in range(1, 1000):
        target = kronecker(-field.D, n) * (kronecker(char.d, n) ** 2 if abs(char.d) > 1 else 1)
        if abs(char.d) > 1 and math.gcd(n, char.d) != 1:
            target = 0
        got = char.eps_xy((n, 0))
        if math.gcd(field.norm_xy((n, 0)), mod.norm) != 1:
            continue
        if got != target:
            ok, msg = False, f"eps({n}) = {got}, expected {target}"
            break
    checks.append(("integer_compatibility", ok, msg))

    odd = char.eps_xy((-1, 0)) == -1
    checks.append(("odd_at_minus_one", odd, "" if odd else "eps(-1) != -1"))

    ok, msg = True, ""
    for _ in range(samples):
        pt = units[rng.integers(len(units))]
        cj = field.conj_xy(pt)
        if char.eps_xy(pt) != char.eps_xy(cj):
            ok, msg = False, f"eps({pt}) != eps(conj {pt})"
            break
    checks.append(("conjugation_symmetric", ok, msg))

    if field.D % 2 and char.d == 1:
        D = field.D
        inv2 = (D + 1) // 2
        ok, msg = True, ""
        for x in range(mod.a):
            for y in range(mod.c):
                got = int(char.table[x, y])
                if got == 0:
                    continue
                if got != kronecker(-D, (x + inv2 * y) % D):
                    ok, msg = False, f"closed form mismatch at ({x},{y})"
                    break
            if not ok:
                break
        checks.append(("closed_form", ok, msg))

    return ValidationReport(checks)
