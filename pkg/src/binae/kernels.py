"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``BINAE_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _fallback

BACKEND = "python"
_impl = _fallback

if not os.environ.get("BINAE_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback

MAX_UNITS = _impl.MAX_UNITS


def _c(a):
    return np.ascontiguousarray(a, dtype=np.uint64)


def and_popcount_rows(rows, x):
    return _impl.and_popcount_rows(_c(rows), _c(x))


def xor_popcount_rows(rows, x):
    return _impl.xor_popcount_rows(_c(rows), _c(x))


def project_codes(masks, codes, kind: int, control: int):
    return _impl.project_codes(_c(masks), _c(codes), int(kind), int(control))


def project_codes_pairwise(upper, codes, kind: int, control: int):
    return _impl.project_codes_pairwise(_c(upper), _c(codes), int(kind), int(control))

THRESHOLD = 0
KWTA = 1


def backends():
    """Return ``{name: module}`` for every importable backend."""
    found = {"python": _fallback}
    try:
        from . import _ckernels

        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
