"""Command-line harness: single computations, sweeps, self-tests, persistence.

Subcommands: value, derivative, rootnumber, charsum, sweep, selftest.
Sweep output is append-only JSON lines keyed by (D, d, k, variant) with
a stable key order; records carry no volatile fields, so reruns and
thread counts cannot change the bytes.  Exit codes: 0 success, 1
selftest/sweep failure, 2 invalid input, 3 tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

from . import central
from .characters import twist_character
from .charsums import ratio_survey, records_to_csv, summary_to_json
from .kernels import CertificateError, ToleranceError
from .quadfield import QuadraticField, is_fundamental_discriminant

SCHEMA_VERSION = 1

_SWEEP_FIELDS = (
    "schema_version", "D", "d", "k", "h", "variant", "W", "W_residual",
    "value", "value_kind", "predicted_order", "tol", "scale", "trunc",
)


@dataclass
class SweepRecord:
    schema_version: int
    D: int
    d: int
    k: int
    h: int
    variant: int
    W: int
    W_residual: float
    value: float
    value_kind: str
    predicted_order: str
    tol: float
    scale: float
    trunc: dict

    def to_json(self) -> str:
        data = asdict(self)
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_json(line: str) -> "SweepRecord":
        data = json.loads(line)
        unknown = set(data) - set(_SWEEP_FIELDS)
        if unknown:
            raise ValueError(f"unknown fields in sweep record: {sorted(unknown)}")
        missing = set(_SWEEP_FIELDS) - set(data)
        if missing:
            raise ValueError(f"missing fields in sweep record: {sorted(missing)}")
        if data["schema_version"] != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {data['schema_version']}")
        return SweepRecord(**data)

    @property
    def key(self) -> tuple:
        return (self.D, self.d, self.k, self.variant)


def _record_from_report(rep: central.CentralReport) -> SweepRecord:
    if rep.W == 1:
        value, kind = rep.L_central, "L"
    else:
        value, kind = rep.L_deriv_central, "Lprime"
    trunc = {k: round(float(v), 12) for k, v in sorted(rep.truncation.items())}
    return SweepRecord(
        schema_version=SCHEMA_VERSION, D=rep.D, d=rep.d, k=rep.k, h=rep.h,
        variant=rep.variant_index, W=rep.W, W_residual=float(f"{rep.W_residual:.3e}"),
        value=value, value_kind=kind, predicted_order=rep.predicted_order,
        tol=rep.tol, scale=rep.value_scale, trunc=trunc,
    )


def admissible_cases(d_max: int, d_set: list[int], k_set: list[int]) -> list[tuple]:
    """Deterministically ordered (D, d, k, variant) tuples for the sweep."""
    cases = []
    for D in range(5, d_max + 1):
        if not is_fundamental_discriminant(-D):
            continue
        if D % 2 == 0 and D % 8:
            continue
        field = QuadraticField(D)
        h = field.h
        nvar = central.variant_count(D)
        for d in d_set:
            if not (d == 1 or is_fundamental_discriminant(d)) or math.gcd(d, D) != 1:
                continue
            for k in k_set:
                if math.gcd(2 * k - 1, h) != 1:
                    continue
                for variant in range(nvar):
                    cases.append((D, d, k, variant))
    return cases


def _print_report(rep: central.CentralReport, as_json: bool) -> None:
    if as_json:
        print(_record_from_report(rep).to_json())
        return
    print(f"D = {rep.D}, d = {rep.d}, k = {rep.k}, h = {rep.h}, variant = {rep.variant_index}")
    print(f"  root number W = {rep.W:+d}   (solve residual {rep.W_residual:.2e})")
    if rep.I1 is not None:
        print(f"  I1 = {rep.I1:.12f}  (tail <= {rep.I1_bound:.1e})")
        print(f"  I2 = {rep.I2:.12f}  (tail <= {rep.I2_bound:.1e})")
    if rep.L_central is not None:
        print(f"  L(k)  = 2(I1+I2) = {rep.L_central:.12f}")
    if rep.Rk is not None:
        print(f"  Rk = {rep.Rk:.12f}  (tail <= {rep.Rk_bound:.1e})")
        print(f"  C  = {rep.C:.12f}  (tail <= {rep.C_bound:.1e})")
    if rep.L_deriv_central is not None:
        print(f"  L'(k) = 2(Rk+C)  = {rep.L_deriv_central:.12f}")
    print(f"  predicted order at the center: {rep.predicted_order}")
    for note in rep.notes:
        print(f"  note: {note}")


def _cmd_value(args) -> int:
    rep = central.central_value(args.disc, args.twist, args.weight, args.variant, args.tol)
    _print_report(rep, args.json)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(_record_from_report(rep).to_json() + "\n")
    return 0


def _cmd_derivative(args) -> int:
    rep = central.central_derivative(args.disc, args.twist, args.weight, args.variant, args.tol)
    if rep.W == 1:
        print("warning: root number +1, derivative route not meaningful for the "
              "order question", file=sys.stderr)
    _print_report(rep, args.json)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(_record_from_report(rep).to_json() + "\n")
    return 0


def _cmd_rootnumber(args) -> int:
    field = QuadraticField(args.disc)
    char = twist_character(field, args.twist, args.weight, args.variant)
    W, resid, diag = central.root_number(args.disc, args.twist, args.weight, char,
                                         min(args.tol * 1e-2, 1e-10))
    print(json.dumps({"D": args.disc, "d": args.twist, "k": args.weight,
                      "variant": args.variant, "W": W, "residual": resid},
                     sort_keys=True))
    return 0


def _cmd_charsum(args) -> int:
    def factory(D, d):
        return twist_character(QuadraticField(D), d, 1, args.variant)

    records, summary = ratio_survey([args.disc], [args.twist], args.samples,
                                    args.seed, char_factory=factory)
    csv_text = records_to_csv(records)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    print(summary_to_json(summary))
    return 0


def _cmd_sweep(args) -> int:
    d_set = [int(t) for t in args.twists.split(",")]
    k_set = [int(t) for t in args.weights.split(",")]
    cases = admissible_cases(args.dmax, d_set, k_set)
    done: dict[tuple, SweepRecord] = {}
    if args.resume:
        try:
            with open(args.out) as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        rec = SweepRecord.from_json(line)
                        done[rec.key] = rec
        except FileNotFoundError:
            pass
    todo = [c for c in cases if c not in done]

    t0 = time.perf_counter()
    failures: list[tuple] = []

    def compute(case):
        D, d, k, variant = case
        try:
            return case, _record_from_report(central.central_report(D, d, k, variant, args.tol))
        except Exception as exc:
            return case, exc

    results: dict[tuple, SweepRecord] = {}
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            for case, out in pool.map(compute, todo):
                results[case] = out
    else:
        for case in todo:
            results[case] = compute(case)[1]

    mode = "a" if (args.resume and done) else "w"
    matches = 0
    total = 0
    with open(args.out, mode) as fh:
        for case in cases:
            if case in done:
                rec = done[case]
            else:
                out = results[case]
                if isinstance(out, Exception):
                    failures.append((case, out))
                    print(f"error at {case}: {out}", file=sys.stderr)
                    continue
                rec = out
                fh.write(rec.to_json() + "\n")
            total += 1
            if rec.predicted_order == str((1 - rec.W) // 2):
                matches += 1
    dt = time.perf_counter() - t0
    print(f"sweep: {total} records, predicted order matches (1-W)/2 in "
          f"{matches}/{total}; {len(failures)} errors; {dt:.1f}s", file=sys.stderr)
    return 1 if failures else 0


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    results = run_selftest(verbose=True)
    bad = [r for r in results if not r.passed]
    total = sum(r.seconds for r in results)
    print(f"selftest: {len(results) - len(bad)}/{len(results)} suites passed "
          f"in {total:.1f}s")
    return 1 if bad else 0


def _add_case_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--disc", type=int, required=True, help="positive D for discriminant -D")
    p.add_argument("--twist", type=int, default=1, help="fundamental twist discriminant d")
    p.add_argument("--weight", type=int, default=1, help="weight parameter k (character power 2k-1)")
    p.add_argument("--variant", type=int, default=0, help="canonical character variant index")
    p.add_argument("--tol", type=float, default=1e-8, help="absolute tolerance")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="heckecv",
        description="Central values and derivatives of twisted canonical Hecke "
                    "L-functions of imaginary quadratic fields.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("value", help="central value L(k) via the smoothed split")
    _add_case_args(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_value)

    p = sub.add_parser("derivative", help="central derivative L'(k)")
    _add_case_args(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_derivative)

    p = sub.add_parser("rootnumber", help="numerical root number from the functional equation")
    _add_case_args(p)
    p.set_defaults(fn=_cmd_rootnumber)

    p = sub.add_parser("charsum", help="character-sum ratio survey (CSV + JSON summary)")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--twist", type=int, default=1)
    p.add_argument("--variant", type=int, default=0)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_charsum)

    p = sub.add_parser("sweep", help="sweep admissible (D, d, k, variant) cases to JSON lines")
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--twists", default="1", help="comma-separated twist set")
    p.add_argument("--weights", default="1", help="comma-separated weight set")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--seed", type=int, default=0, help="unused; reserved for samplers")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("selftest", help="run all module invariant suites")
    p.set_defaults(fn=_cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, CertificateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ToleranceError, central.RootNumberError, central.RouteMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
