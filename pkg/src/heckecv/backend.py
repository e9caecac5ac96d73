"""Backend selection for the hot lattice kernels.

The inner lattice sums ship in two implementations: numba-jitted loops
(the default whenever numba imports cleanly) and a vectorized pure-numpy
fallback.  Set ``HECKECV_DISABLE_NUMBA=1`` in the environment to force
the numpy path; both paths are required to agree to reassociation noise
and are compared by ``benchmarks/bench_lattice.py``.
"""

from __future__ import annotations

import os

ENV_FLAG = "HECKECV_DISABLE_NUMBA"

_numba_ok: bool | None = None


def _probe_numba() -> bool:
    global _numba_ok
    if _numba_ok is None:
        try:
            import numba  # noqa: F401

            _numba_ok = True
        except Exception:
            _numba_ok = False
    return _numba_ok


def numba_enabled() -> bool:
    """True when the jitted kernels should be used."""
    if os.environ.get(ENV_FLAG, "").strip() not in ("", "0"):
        return False
    return _probe_numba()


def backend_name() -> str:
    return "numba" if numba_enabled() else "numpy"
