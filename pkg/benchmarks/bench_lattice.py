#!/usr/bin/env python3
"""Benchmark: numba-jitted vs pure-numpy lattice kernels.

Times the two implementations of the conjugate-grouped lattice sums
(incomplete-gamma and log-weighted kernels) and the short character
sums on realistic workloads, and reports the speedup.

Usage:
    python benchmarks/bench_lattice.py [--disc 299] [--twist 8] [--repeat 5]
"""

from __future__ import annotations

import argparse
import os
import time

# must be decided before heckecv imports anywhere
os.environ.pop("HECKECV_DISABLE_NUMBA", None)

from heckecv import backend  # noqa: E402
from heckecv.central import q_parameter  # noqa: E402
from heckecv.characters import twist_character  # noqa: E402
from heckecv.charsums import char_sum  # noqa: E402
from heckecv.lattice import KIND_INC_GAMMA, KIND_LOG, lattice_sum  # noqa: E402
from heckecv.quadfield import QuadraticField  # noqa: E402


def time_best(fn, repeat: int) -> tuple[float, object]:
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(disc: int, twist: int, weight: int, repeat: int) -> None:
    if not backend._probe_numba():
        print("numba is not importable here; nothing to compare")
        return
    char = twist_character(QuadraticField(disc), twist, weight)
    Q = q_parameter(disc, twist)
    jobs = [
        ("incomplete-gamma sum", lambda: lattice_sum(char, weight, 1.0 / Q,
                                                     KIND_INC_GAMMA, 1e-10)),
        ("log-kernel sum", lambda: lattice_sum(char, weight, 1.0 / Q,
                                               KIND_LOG, 1e-10)),
        ("wide smoothing (x=2)", lambda: lattice_sum(char, weight, 2.0 / Q,
                                                     KIND_INC_GAMMA, 1e-10)),
        ("character sum S_v(w)", lambda: char_sum(char, 3, 1, 20_000)),
    ]

    print(f"workload: D = {disc}, d = {twist}, k = {weight} "
          f"(level parameter Q = {Q:.1f})")
    print(f"{'kernel':<26} {'numba':>10} {'numpy':>10} {'speedup':>9}  terms")
    print("-" * 68)
    for name, fn in jobs:
        os.environ.pop(backend.ENV_FLAG, None)
        fn()  # warm the jit cache before timing
        t_nb, out_nb = time_best(fn, repeat)
        os.environ[backend.ENV_FLAG] = "1"
        t_np, out_np = time_best(fn, repeat)
        os.environ.pop(backend.ENV_FLAG, None)
        v_nb = getattr(out_nb, "value", getattr(out_nb, "sum_value", None))
        v_np = getattr(out_np, "value", getattr(out_np, "sum_value", None))
        n = getattr(out_nb, "n_terms", "-")
        agree = abs(float(v_nb) - float(v_np)) <= 5e-13 * max(1.0, abs(float(v_nb)))
        flag = "" if agree else "  MISMATCH"
        print(f"{name:<26} {t_nb * 1e3:>8.2f}ms {t_np * 1e3:>8.2f}ms "
              f"{t_np / t_nb:>8.1f}x  {n}{flag}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--disc", type=int, default=299)
    ap.add_argument("--twist", type=int, default=8)
    ap.add_argument("--weight", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    run(args.disc, args.twist, args.weight, args.repeat)


if __name__ == "__main__":
    main()
