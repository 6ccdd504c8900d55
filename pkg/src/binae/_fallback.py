"""Numpy implementations of the popcount kernels.

Used when the compiled extension is missing or ``BINAE_PURE_PYTHON`` is set.
Results are bit-identical to ``_ckernels``.
"""

import numpy as np

MAX_UNITS = 64

if hasattr(np, "bitwise_count"):
    _popcount = np.bitwise_count
else:  # numpy < 2.0
    _M1 = np.uint64(0x5555555555555555)
    _M2 = np.uint64(0x3333333333333333)
    _M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
    _H01 = np.uint64(0x0101010101010101)

    def _popcount(a):
        a = np.asarray(a, dtype=np.uint64)
        a = a - ((a >> np.uint64(1)) & _M1)
        a = (a & _M2) + ((a >> np.uint64(2)) & _M2)
        a = (a + (a >> np.uint64(4))) & _M4
        return (a * _H01) >> np.uint64(56)


def and_popcount_rows(rows, x):
    rows = np.asarray(rows, dtype=np.uint64)
    x = np.asarray(x, dtype=np.uint64)
    if rows.shape[1] != x.shape[0]:
        raise ValueError("word count mismatch")
    return _popcount(rows & x).sum(axis=1, dtype=np.int64)


def xor_popcount_rows(rows, x):
    rows = np.asarray(rows, dtype=np.uint64)
    x = np.asarray(x, dtype=np.uint64)
    if rows.shape[1] != x.shape[0]:
        raise ValueError("word count mismatch")
    return _popcount(rows ^ x).sum(axis=1, dtype=np.int64)


def _select(values, kind, control):
    """Row-wise threshold or first-occurrence kWTA; returns packed codes."""
    n, n_out = values.shape
    if kind == 0:
        bits = values >= control
    else:
        bits = np.zeros((n, n_out), dtype=bool)
        k = min(max(int(control), 0), n_out)
        if k:
            order = np.argsort(-values, axis=1, kind="stable")[:, :k]
            np.put_along_axis(bits, order, True, axis=1)
    weights = np.left_shift(np.uint64(1), np.arange(n_out, dtype=np.uint64))
    return (bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def _check_units(*counts):
    if any(c > MAX_UNITS for c in counts):
        raise ValueError("at most 64 units per layer fit a packed code")


def project_codes(masks, codes, kind, control, chunk=1 << 16):
    masks = np.asarray(masks, dtype=np.uint64)
    codes = np.asarray(codes, dtype=np.uint64)
    _check_units(masks.shape[0])
    out = np.empty(codes.shape[0], dtype=np.uint64)
    for s in range(0, codes.shape[0], chunk):
        c = codes[s:s + chunk]
        values = _popcount(c[:, None] & masks[None, :]).astype(np.int64)
        out[s:s + chunk] = _select(values, kind, control)
    return out


def project_codes_pairwise(upper, codes, kind, control, chunk=1 << 14):
    upper = np.asarray(upper, dtype=np.uint64)
    codes = np.asarray(codes, dtype=np.uint64)
    n_out, n_in = upper.shape
    _check_units(n_out, n_in)
    shifts = np.arange(n_in, dtype=np.uint64)
    out = np.empty(codes.shape[0], dtype=np.uint64)
    for s in range(0, codes.shape[0], chunk):
        c = codes[s:s + chunk]
        active = ((c[:, None] >> shifts) & np.uint64(1)).astype(np.int64)
        # pair counts per (input, output unit k), masked by whether k is active
        partial = _popcount(c[:, None, None] & upper[None, :, :]).astype(np.int64)
        values = (partial * active[:, None, :]).sum(axis=2)
        out[s:s + chunk] = _select(values, kind, control)
    return out
