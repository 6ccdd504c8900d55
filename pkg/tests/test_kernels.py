"""Both kernel backends must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binae import kernels
from binae.binvec import make_rng, pack_bits, unpack_bits

BACKENDS = kernels.backends()


def _rows(seed, n, words):
    return make_rng(seed).integers(0, 2**63, size=(n, words), dtype=np.uint64) * np.uint64(2) + np.uint64(seed & 1)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_popcount_rows_against_dense(name):
    mod = BACKENDS[name]
    rows = _rows(1, 17, 3)
    x = _rows(2, 1, 3)[0]
    rb, xb = unpack_bits(rows, 192), unpack_bits(x, 192)
    assert np.array_equal(mod.and_popcount_rows(rows, x), (rb & xb).sum(axis=1))
    assert np.array_equal(mod.xor_popcount_rows(rows, x), (rb != xb).sum(axis=1))


def _dense_project(masks, codes, n_in, kind, control):
    w = unpack_bits(masks[:, None], n_in).astype(np.int64)
    xb = unpack_bits(codes[:, None], n_in).astype(np.int64)
    v = xb @ w.T
    if kind == kernels.THRESHOLD:
        out = (v >= control).astype(np.uint8)
    else:
        out = np.zeros_like(v, dtype=np.uint8)
        idx = np.argsort(-v, axis=1, kind="stable")[:, :control]
        np.put_along_axis(out, idx, 1, axis=1)
    return pack_bits(out)[:, 0]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 64), st.integers(1, 64), st.integers(0, 2**32), st.sampled_from([0, 1]), st.data())
def test_project_codes_backends_agree(n_out, n_in, seed, kind, data):
    rng = make_rng(seed)
    masks = pack_bits((rng.random((n_out, n_in)) < 0.3).astype(np.uint8))[:, 0].copy()
    codes = pack_bits((rng.random((50, n_in)) < 0.5).astype(np.uint8))[:, 0].copy()
    control = data.draw(st.integers(0, n_out if kind else n_in + 1))
    expected = _dense_project(masks, codes, n_in, kind, control)
    for mod in BACKENDS.values():
        assert np.array_equal(mod.project_codes(masks, codes, kind, control), expected)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 20), st.integers(2, 16), st.integers(0, 2**32), st.sampled_from([0, 1]), st.data())
def test_project_pairwise_backends_agree(n_out, n_in, seed, kind, data):
    rng = make_rng(seed)
    upper = np.triu((rng.random((n_out, n_in, n_in)) < 0.4).astype(np.uint8), k=1)
    masks = pack_bits(upper)[..., 0].copy()
    codes = pack_bits((rng.random((40, n_in)) < 0.5).astype(np.uint8))[:, 0].copy()
    xb = unpack_bits(codes[:, None], n_in).astype(np.int64)
    v = np.einsum("mk,jkl,ml->mj", xb, upper.astype(np.int64), xb)
    control = data.draw(st.integers(0, n_out if kind else int(v.max()) + 1))
    if kind == kernels.THRESHOLD:
        bits = (v >= control).astype(np.uint8)
    else:
        bits = np.zeros_like(v, dtype=np.uint8)
        np.put_along_axis(bits, np.argsort(-v, axis=1, kind="stable")[:, :control], 1, axis=1)
    expected = pack_bits(bits)[:, 0]
    for mod in BACKENDS.values():
        assert np.array_equal(mod.project_codes_pairwise(masks, codes, kind, control), expected)


def test_kwta_tie_goes_to_lowest_index():
    masks = np.zeros(5, dtype=np.uint64)  # all pre-activations 0
    for mod in BACKENDS.values():
        assert int(mod.project_codes(masks, np.array([0], dtype=np.uint64), kernels.KWTA, 2)[0]) == 0b11


def test_too_many_units_rejected():
    for mod in BACKENDS.values():
        with pytest.raises(ValueError):
            mod.project_codes(np.zeros(65, dtype=np.uint64), np.zeros(1, dtype=np.uint64), 0, 1)


def test_compiled_backend_is_active_when_built():
    if "cython" not in BACKENDS:
        pytest.skip("extension not built")
    assert kernels.BACKEND == ("python" if os.environ.get("BINAE_PURE_PYTHON") else "cython")


def test_environment_forces_fallback():
    code = "import binae.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, BINAE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
