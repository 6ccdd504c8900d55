"""Threshold, kWTA and binary matching pursuit autoencoders.

All activations and weights are {0, 1}. The hidden layer is ``y = f(w x)``
and the reconstruction is ``x_r = g(w^T y)`` (or a variant decoder), with
``f``/``g`` either a shared threshold (theta(0) = 1) or k-winners-take-all
with ties going to the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import kernels
from .binvec import (
    BinaryVector,
    WeightMatrix,
    make_rng,
    overlaps,
    pack_bits,
    random_rows,
    transpose_overlaps,
)

MODEL_KINDS = ("threshold", "kwta", "bmp")
DECODER_KINDS = ("transpose", "independent-random", "pairwise")


@dataclass(frozen=True)
class ModelParams:
    """Experiment point: layer sizes, densities and the model's control knob.

    ``hidden_control`` is ``t_y`` for the threshold model and ``a_y`` for
    kWTA and BMP. ``lam`` is the BMP inhibition and defaults to the smallest
    valid value ``2 a_x a_w + 1``.
    """

    n_x: int
    n_y: int
    a_x: int
    a_w: int
    model_kind: str = "threshold"
    hidden_control: int = 1
    decoder_kind: str = "transpose"
    lam: int | None = None
    fast_axr: bool = False

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("layer sizes must be >= 1")
        if not 1 <= self.a_x <= self.n_x:
            raise ValueError(f"need 1 <= a_x <= n_x, got a_x={self.a_x}")
        if not 0 <= self.a_w <= self.n_x:
            raise ValueError(f"need 0 <= a_w <= n_x, got a_w={self.a_w}")
        if self.model_kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.model_kind!r}")
        if self.decoder_kind not in DECODER_KINDS:
            raise ValueError(f"unknown decoder kind {self.decoder_kind!r}")
        if self.model_kind == "threshold":
            if not 1 <= self.hidden_control <= min(self.a_x, self.a_w):
                raise ValueError(f"need 1 <= t_y <= min(a_x, a_w), got t_y={self.hidden_control}")
        elif not 1 <= self.hidden_control <= self.n_y:
            raise ValueError(f"need 1 <= a_y <= n_y, got a_y={self.hidden_control}")
        if self.model_kind == "bmp" and self.inhibition <= 2 * self.a_x * self.a_w:
            raise ValueError("BMP inhibition must exceed 2 a_x a_w")

    @property
    def inhibition(self) -> int:
        return self.lam if self.lam is not None else 2 * self.a_x * self.a_w + 1

    @property
    def t_y(self) -> int:
        return self.hidden_control

    @property
    def a_y(self) -> int:
        return self.hidden_control

    def replace(self, **changes) -> "ModelParams":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class EncodeDecodeResult:
    hidden: BinaryVector
    reconstruction: BinaryVector
    chosen: int  # t_x for the threshold model, a_x^r otherwise
    mismatches: int
    error: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "error", self.mismatches / self.reconstruction.length)

    @property
    def sparsity(self) -> float:
        return self.hidden.ones / self.hidden.length


# -- nonlinearities ---------------------------------------------------------

def kwta(z, k: int) -> BinaryVector:
    """Set the ``k`` largest entries of ``z``; ties go to the first index."""
    z = np.asarray(z)
    if not 0 <= k <= z.shape[0]:
        raise ValueError(f"need 0 <= k <= {z.shape[0]}, got k={k}")
    bits = np.zeros(z.shape[0], dtype=np.uint8)
    bits[np.argsort(-z.astype(np.int64), kind="stable")[:k]] = 1
    return BinaryVector.from_bits(bits)


def threshold(z, t: int) -> BinaryVector:
    return BinaryVector.from_bits((np.asarray(z) >= t).astype(np.uint8))


# -- pairwise (sigma-pi) weights --------------------------------------------

class PairwiseWeights:
    """Binary weights on unordered input pairs, one set per output unit.

    ``upper[j, k, l]`` (``k < l``) is 1 when the pair ``(k, l)`` feeds unit
    ``j``. The pre-activation of unit ``j`` is the number of active pairs.
    """

    __slots__ = ("n_out", "n_in", "upper")

    def __init__(self, upper):
        upper = np.array(upper, dtype=np.uint8)
        if upper.ndim != 3 or upper.shape[1] != upper.shape[2]:
            raise ValueError("expected an (n_out, n_in, n_in) array")
        self.n_out, self.n_in = upper.shape[0], upper.shape[1]
        self.upper = np.triu(upper, k=1)
        self.upper.setflags(write=False)

    @classmethod
    def from_encoder(cls, w: WeightMatrix) -> "PairwiseWeights":
        """Decoder pairs from encoder rows: pair (k, l) feeds input j iff w_kj = w_lj = 1."""
        d = w.dense.T.astype(np.uint8)  # (n_x, n_y)
        return cls(d[:, :, None] & d[:, None, :])

    @classmethod
    def random(cls, n_out: int, n_in: int, density: float, seed=None) -> "PairwiseWeights":
        """Each output unit gets exactly ``round(density * C(n_in, 2))`` random pairs."""
        n_pairs = comb(n_in, 2)
        per_unit = int(np.floor(density * n_pairs + 0.5))
        rows = random_rows(make_rng(seed), n_out, n_pairs, per_unit)
        upper = np.zeros((n_out, n_in, n_in), dtype=np.uint8)
        ku, lu = np.triu_indices(n_in, k=1)
        upper[:, ku, lu] = rows
        return cls(upper)

    def sums(self, y: BinaryVector) -> np.ndarray:
        if y.length != self.n_in:
            raise ValueError(f"dimension mismatch: expected length {self.n_in}, got {y.length}")
        idx = y.indices()
        return self.upper[:, idx][:, :, idx].sum(axis=(1, 2), dtype=np.int64)

    def sums_batch(self, bits) -> np.ndarray:
        """Pre-activations for a ``(m, n_in)`` batch of inputs."""
        bits = np.asarray(bits, dtype=np.float32)
        ku, lu = np.triu_indices(self.n_in, k=1)
        pairs = bits[:, ku] * bits[:, lu]
        return np.rint(pairs @ self.upper[:, ku, lu].T.astype(np.float32)).astype(np.int64)

    def upper_masks(self) -> np.ndarray:
        """``(n_out, n_in)`` uint64 partner masks for the packed kernels."""
        return np.ascontiguousarray(pack_bits(self.upper)[..., 0])


# -- encoders and decoders ---------------------------------------------------

def encode_threshold(w: WeightMatrix, x: BinaryVector, t_y: int) -> BinaryVector:
    return threshold(overlaps(w, x), t_y)


def decode_threshold(w: WeightMatrix, y: BinaryVector, t_x: int) -> BinaryVector:
    return threshold(transpose_overlaps(w, y), t_x)


def encode_kwta(w: WeightMatrix, x: BinaryVector, a_y: int) -> BinaryVector:
    return kwta(overlaps(w, x), a_y)


def decode_kwta(w: WeightMatrix, y: BinaryVector, a_x_r: int) -> BinaryVector:
    return kwta(transpose_overlaps(w, y), a_x_r)


def encode_pairwise(pw: PairwiseWeights, x: BinaryVector, a_y: int) -> BinaryVector:
    """Sigma-pi hidden layer: kWTA over counts of active input pairs."""
    return kwta(pw.sums(x), a_y)


def decode_pairwise(w: WeightMatrix, y: BinaryVector, a_x_r: int, pair_weights: PairwiseWeights | None = None) -> BinaryVector:
    """kWTA over pairwise sums of the hidden code.

    Without ``pair_weights`` the pairs are derived from the encoder, in which
    case each pre-activation equals ``C(c_j, 2)`` for the linear column sum
    ``c_j``.
    """
    if w.n_rows != y.length:
        raise ValueError(f"dimension mismatch: matrix has {w.n_rows} rows, vector length {y.length}")
    pw = pair_weights if pair_weights is not None else PairwiseWeights.from_encoder(w)
    return kwta(pw.sums(y), a_x_r)


def decode_independent_random(w_prime: WeightMatrix, y: BinaryVector, control: int, kind: str = "kwta") -> BinaryVector:
    """Decode with an ``n_x x n_y`` matrix in place of ``w^T``."""
    v = overlaps(w_prime, y)
    return kwta(v, control) if kind == "kwta" else threshold(v, control)


def random_decoder(n_x: int, n_y: int, a_w: int, seed=None) -> WeightMatrix:
    """``n_x x n_y`` decoder with ``a_w`` ones per column, independent of the encoder."""
    return WeightMatrix(random_rows(make_rng(seed), n_y, n_x, a_w).T)


def decoder_input(w: WeightMatrix, y: BinaryVector, decoder_kind: str = "transpose", decoder=None) -> np.ndarray:
    """Output-layer pre-activation ``v`` for the chosen decoder."""
    if decoder_kind == "transpose":
        return transpose_overlaps(w, y)
    if decoder_kind == "independent-random":
        if decoder is None:
            raise ValueError("independent-random decoding needs decoder weights")
        return overlaps(decoder, y)
    if decoder_kind == "pairwise":
        pw = decoder if decoder is not None else PairwiseWeights.from_encoder(w)
        return pw.sums(y)
    raise ValueError(f"unknown decoder kind {decoder_kind!r}")


# -- output-layer scans ------------------------------------------------------

def threshold_scan(v, x_bits) -> np.ndarray:
    """Mismatch count for every ``t_x`` in ``[0, max(v) + 1]``."""
    v = np.asarray(v, dtype=np.int64)
    x_bits = np.asarray(x_bits).astype(bool)
    top = int(v.max()) + 1 if v.size else 1
    on = np.bincount(v[x_bits], minlength=top + 1)
    off = np.bincount(v[~x_bits], minlength=top + 1)
    # t: false negatives are ones with v < t, false positives zeros with v >= t
    fn = np.concatenate([[0], np.cumsum(on)[:-1]])
    fp = off.sum() - np.concatenate([[0], np.cumsum(off)[:-1]])
    return fn + fp


def count_scan(v, x_bits) -> np.ndarray:
    """Mismatch count of ``kwta(v, k)`` for every ``k`` in ``[0, n_x]``."""
    x_bits = np.asarray(x_bits, dtype=np.int64)
    order = np.argsort(-np.asarray(v, dtype=np.int64), kind="stable")
    hits = np.concatenate([[0], np.cumsum(x_bits[order])])
    k = np.arange(x_bits.shape[0] + 1)
    return (x_bits.sum() - hits) + (k - hits)


def best_output(v, x: BinaryVector, kind: str) -> tuple[BinaryVector, int, int]:
    """Reconstruction with minimal error; ties go to the smaller control."""
    xb = x.to_array()
    if kind == "threshold":
        errs = threshold_scan(v, xb)
        t = int(np.argmin(errs))
        return threshold(v, t), t, int(errs[t])
    errs = count_scan(v, xb)
    k = int(np.argmin(errs))
    return kwta(v, k), k, int(errs[k])


# -- binary matching pursuit -------------------------------------------------

@dataclass(frozen=True)
class BMPStep:
    hidden: BinaryVector
    reconstruction: BinaryVector
    a_x_r: int
    mismatches: int

    @property
    def error(self) -> float:
        return self.mismatches / self.reconstruction.length


def bmp_encode(w: WeightMatrix, x: BinaryVector, n_steps: int, lam: int | None = None, *,
               fast_axr: bool = False, stop_at_zero: bool = False) -> list[BMPStep]:
    """Greedy binary matching pursuit.

    Step ``n`` adds the unit with the largest overlap with the residual
    ``2x - x_r``, penalising already chosen units by ``lam``, then
    reconstructs with kWTA over ``w^T y``. ``a_x^r`` is re-optimised per step
    unless ``fast_axr`` (then ``a_x^r = a_x``).
    """
    if w.n_cols != x.length:
        raise ValueError(f"dimension mismatch: matrix has {w.n_cols} columns, vector length {x.length}")
    if not 0 <= n_steps <= w.n_rows:
        raise ValueError(f"need 0 <= n_steps <= n_y = {w.n_rows}, got {n_steps}")
    a_w = int(w.row_ones().max())
    if lam is None:
        lam = 2 * x.ones * a_w + 1
    elif lam <= 2 * x.ones * a_w:
        raise ValueError("inhibition must exceed 2 a_x a_w")
    xb = x.to_array()
    z2 = 2 * overlaps(w, x)
    chosen = np.zeros(w.n_rows, dtype=np.int64)
    v = np.zeros(w.n_cols, dtype=np.int64)
    xr = BinaryVector.zeros(w.n_cols)
    steps: list[BMPStep] = []
    for _ in range(n_steps):
        score = z2 - overlaps(w, xr) - lam * chosen
        i = int(np.argmax(score))
        if chosen[i]:
            raise RuntimeError("inhibition too weak: a chosen unit won again")
        chosen[i] = 1
        v += w.dense[i]
        if fast_axr:
            k = x.ones
            xr = kwta(v, k)
            mism = int(np.count_nonzero(xr.to_array() != xb))
        else:
            errs = count_scan(v, xb)
            k = int(np.argmin(errs))
            mism = int(errs[k])
            xr = kwta(v, k)
        steps.append(BMPStep(BinaryVector.from_bits(chosen.astype(np.uint8)), xr, k, mism))
        if stop_at_zero and mism == 0:
            break
    return steps


# -- full pipeline -----------------------------------------------------------

def encode(w: WeightMatrix, x: BinaryVector, params: ModelParams) -> BinaryVector:
    if params.model_kind == "threshold":
        return encode_threshold(w, x, params.hidden_control)
    if params.model_kind == "kwta":
        return encode_kwta(w, x, params.hidden_control)
    return bmp_encode(w, x, params.hidden_control, params.inhibition, fast_axr=params.fast_axr)[-1].hidden


def best_reconstruction(w: WeightMatrix, x: BinaryVector, params: ModelParams, decoder=None) -> EncodeDecodeResult:
    """Encode once, then pick the output threshold / count with minimal error."""
    if w.shape != (params.n_y, params.n_x):
        raise ValueError(f"weights are {w.shape}, params want {(params.n_y, params.n_x)}")
    if params.model_kind == "bmp" and params.decoder_kind == "transpose":
        step = bmp_encode(w, x, params.hidden_control, params.inhibition, fast_axr=params.fast_axr)[-1]
        return EncodeDecodeResult(step.hidden, step.reconstruction, step.a_x_r, step.mismatches)
    y = encode(w, x, params)
    v = decoder_input(w, y, params.decoder_kind, decoder)
    out_kind = "threshold" if params.model_kind == "threshold" else "kwta"
    xr, chosen, mism = best_output(v, x, out_kind)
    return EncodeDecodeResult(y, xr, chosen, mism)


def fixed_reconstruction(w: WeightMatrix, x: BinaryVector, params: ModelParams, control: int, decoder=None) -> EncodeDecodeResult:
    """Encode/decode with a fixed ``t_x`` (threshold) or ``a_x^r`` (otherwise)."""
    y = encode(w, x, params)
    v = decoder_input(w, y, params.decoder_kind, decoder)
    xr = threshold(v, control) if params.model_kind == "threshold" else kwta(v, control)
    mism = int(kernels.xor_popcount_rows(xr.words[None, :], x.words)[0])
    return EncodeDecodeResult(y, xr, control, mism)
