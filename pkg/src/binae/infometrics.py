"""Exact mutual information of deterministic layer maps.

Inputs are uniform over all ``2**n_x`` binary vectors. Because each layer is
a deterministic function, ``I(X, Y) = H(Y)``, and ``H(Y)`` only depends on
how many inputs land on each realised code (the class sizes ``|Omega_i|``).
Input vector ``x`` is enumerated as the integer whose bit ``j`` is ``x_j``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .binvec import WeightMatrix, make_rng, random_weight_matrix, random_rows
from .models import (
    ModelParams,
    PairwiseWeights,
    best_reconstruction,
    bmp_encode,
    random_decoder,
)
from .binvec import BinaryVector

DEFAULT_CAP = 24


class EnumerationCapError(ValueError):
    """Raised when exhaustive enumeration would exceed the configured bit cap."""


@dataclass(frozen=True)
class OmegaCensus:
    """Sizes of the preimage classes of a map over ``{0,1}^n_x``."""

    n_x: int
    keys: np.ndarray
    class_sizes: np.ndarray

    @property
    def total_inputs(self) -> int:
        return 1 << self.n_x

    @property
    def realized_count(self) -> int:
        return int(self.class_sizes.shape[0])

    @property
    def mean_class_size(self) -> float:
        return self.total_inputs / self.realized_count

    def merge(self, other: "OmegaCensus") -> "OmegaCensus":
        """Combine censuses of disjoint input ranges."""
        if other.n_x != self.n_x:
            raise ValueError("cannot merge censuses over different input sizes")
        return _group(self.n_x, np.concatenate([self.keys, other.keys]),
                      np.concatenate([self.class_sizes, other.class_sizes]))

    def pushforward(self, fn: Callable[[np.ndarray], np.ndarray]) -> "OmegaCensus":
        """Census of ``fn . f`` from the census of ``f``: classes with equal image merge."""
        return _group(self.n_x, _as_keys(fn(self.keys)), self.class_sizes)


def _as_keys(out) -> np.ndarray:
    out = np.asarray(out)
    if out.ndim == 1:
        return out
    if out.ndim != 2:
        raise ValueError("encoder output must be 1-d codes or 2-d rows")
    out = np.ascontiguousarray(out)
    return out.view(np.dtype((np.void, out.dtype.itemsize * out.shape[1]))).reshape(-1)


def _group(n_x: int, keys: np.ndarray, sizes: np.ndarray) -> OmegaCensus:
    uniq, inv = np.unique(keys, return_inverse=True)
    counts = np.bincount(inv.reshape(-1), weights=sizes, minlength=uniq.shape[0]).astype(np.int64)
    return OmegaCensus(n_x, uniq, counts)


def input_codes(n_x: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    stop = (1 << n_x) if stop is None else stop
    return np.arange(start, stop, dtype=np.uint64)


def input_bits(codes: np.ndarray, n_x: int) -> np.ndarray:
    return ((codes[:, None] >> np.arange(n_x, dtype=np.uint64)) & np.uint64(1)).astype(np.uint8)


def omega_census(encode_fn: Callable[[np.ndarray], np.ndarray], n_x: int, *, cap: int = DEFAULT_CAP,
                 chunk: int = 1 << 18, workers: int = 1) -> OmegaCensus:
    """Enumerate every input, group by output code.

    ``encode_fn`` maps a 1-d uint64 array of input codes to either 1-d codes
    or 2-d rows (one row per input). The input range is split into chunks;
    partial censuses are merged, so the result does not depend on ``workers``.
    """
    if n_x > cap:
        raise EnumerationCapError(f"n_x={n_x} exceeds the enumeration cap of {cap} bits")
    total = 1 << n_x
    bounds = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]

    def part(b):
        codes = input_codes(n_x, *b)
        keys = _as_keys(encode_fn(codes))
        if keys.shape[0] != codes.shape[0]:
            raise ValueError("encoder must return one code per input")
        return _group(n_x, keys, np.ones(codes.shape[0], dtype=np.int64))

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(part, bounds))
    else:
        parts = [part(b) for b in bounds]
    out = parts[0]
    for p in parts[1:]:
        out = out.merge(p)
    return out


def mutual_information(census: OmegaCensus) -> float:
    """``n_x - 2^-n_x * sum |Omega| log2 |Omega|`` in bits."""
    s = census.class_sizes.astype(np.float64)
    return float(census.n_x - (s * np.log2(s)).sum() / census.total_inputs)


def mi_upper_bound(census: OmegaCensus) -> float:
    """``n_x - log2(mean class size)``, i.e. ``log2`` of the number of realised codes."""
    return float(census.n_x - np.log2(census.mean_class_size))


def decoder_mi(pipeline_fn: Callable[[np.ndarray], np.ndarray], n_x: int, **kwargs) -> float:
    """``H(X_r)`` of a deterministic input-to-reconstruction map."""
    return mutual_information(omega_census(pipeline_fn, n_x, **kwargs))


def joint_mutual_information(encode_fn: Callable[[np.ndarray], np.ndarray], n_x: int) -> float:
    """Reference MI from the explicit joint distribution ``p(x, y)``.

    Sums ``p(x,y) log2(p(x,y) / (p(x) p(y)))`` over the joint table directly;
    intended for small ``n_x`` only.
    """
    codes = input_codes(n_x)
    ys = [bytes(k) if isinstance(k, np.void) else int(k) for k in _as_keys(encode_fn(codes))]
    px = 1.0 / len(codes)
    joint: dict = {}
    for x, y in zip(codes.tolist(), ys):
        joint[(x, y)] = joint.get((x, y), 0.0) + px
    py: dict = {}
    for (_, y), p in joint.items():
        py[y] = py.get(y, 0.0) + p
    return float(sum(p * np.log2(p / (px * py[y])) for (x, y), p in joint.items()))


# -- layer maps over packed codes -------------------------------------------

def _kind_code(kind: str) -> int:
    return kernels.THRESHOLD if kind == "threshold" else kernels.KWTA


def encoder_map(w: WeightMatrix, kind: str, control: int, pair_weights: PairwiseWeights | None = None):
    """Packed encoder ``x -> y`` (``n_x, n_y <= 64``)."""
    if pair_weights is not None:
        upper = pair_weights.upper_masks()
        return lambda codes: kernels.project_codes_pairwise(upper, codes, _kind_code(kind), control)
    masks = w.row_masks()
    if w.n_rows > kernels.MAX_UNITS:
        raise ValueError("packed enumeration needs n_y <= 64")
    return lambda codes: kernels.project_codes(masks, codes, _kind_code(kind), control)


def decoder_map(w: WeightMatrix, kind: str, control: int, decoder_kind: str = "transpose", decoder=None):
    """Packed decoder ``y -> x_r`` with a fixed ``t_x`` / ``a_x^r``."""
    k = _kind_code(kind)
    if decoder_kind == "transpose":
        masks = w.column_masks()
        return lambda codes: kernels.project_codes(masks, codes, k, control)
    if decoder_kind == "independent-random":
        masks = decoder.row_masks()
        return lambda codes: kernels.project_codes(masks, codes, k, control)
    if decoder_kind == "pairwise":
        pw = decoder if decoder is not None else PairwiseWeights.from_encoder(w)
        upper = pw.upper_masks()
        return lambda codes: kernels.project_codes_pairwise(upper, codes, k, control)
    raise ValueError(f"unknown decoder kind {decoder_kind!r}")


def bmp_map(w: WeightMatrix, n_steps: int):
    """BMP encoder over packed inputs (pure Python; small ``n_x`` only).

    The residual uses ``a_x^r`` equal to each input's own popcount.
    """
    n_x = w.n_cols

    def fn(codes):
        out = np.empty(codes.shape[0], dtype=np.uint64)
        for i, c in enumerate(codes.tolist()):
            x = BinaryVector.from_int(c, n_x)
            lam = 2 * max(x.ones, 1) * int(w.row_ones().max()) + 1
            y = bmp_encode(w, x, n_steps, lam, fast_axr=True)[-1].hidden if n_steps else BinaryVector.zeros(w.n_rows)
            out[i] = y.to_int()
        return out

    return fn


def best_decode_map(w: WeightMatrix, enc, n_x: int):
    """Map ``x -> x_r`` with ``a_x^r`` optimised per input (kWTA decoder)."""
    dense = w.dense.astype(np.float32)
    shifts = np.arange(w.n_rows, dtype=np.uint64)
    weights = np.left_shift(np.uint64(1), np.arange(n_x, dtype=np.uint64))

    def fn(codes):
        y = ((enc(codes)[:, None] >> shifts) & np.uint64(1)).astype(np.float32)
        v = np.rint(y @ dense).astype(np.int64)
        xb = input_bits(codes, n_x).astype(np.int64)
        order = np.argsort(-v, axis=1, kind="stable")
        hits = np.concatenate([np.zeros((len(codes), 1), np.int64),
                               np.cumsum(np.take_along_axis(xb, order, axis=1), axis=1)], axis=1)
        k = np.arange(n_x + 1)
        errs = (xb.sum(1, keepdims=True) - hits) + (k - hits)
        best = errs.argmin(axis=1)
        sel = np.arange(n_x)[None, :] < best[:, None]
        bits = np.zeros_like(xb)
        np.put_along_axis(bits, order, sel.astype(np.int64), axis=1)
        return (bits.astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)

    return fn


# -- sweep -------------------------------------------------------------------

@dataclass(frozen=True)
class MIReport:
    a_y: int
    sparsity: float
    h_x: float
    mi_encoder: float
    mi_decoder: float
    upper_bound: float
    realized_codes: int
    error: float = float("nan")

    @property
    def scaled(self) -> dict[str, float]:
        return {
            "upper_bound": self.upper_bound / self.h_x,
            "mi_encoder": self.mi_encoder / self.h_x,
            "mi_decoder": self.mi_decoder / self.h_x,
            "error": self.error,
        }


def default_axr(n_x: int) -> int:
    """Fixed output count for uniform inputs: ``round(n_x / 2)``."""
    return int(np.floor(n_x * 0.5 + 0.5))


def make_decoder(params: ModelParams, seed=None):
    """Decoder weights for ``params.decoder_kind`` (None for transpose / encoder-derived pairs)."""
    if params.decoder_kind == "independent-random":
        return random_decoder(params.n_x, params.n_y, params.a_w, seed)
    return None


def mi_point(w: WeightMatrix, params: ModelParams, a_y: int, *, a_x_r: int | None = None,
             decoder=None, per_input: bool = False, cap: int = DEFAULT_CAP, workers: int = 1) -> MIReport:
    """Encoder MI, decoder MI and bound at one hidden activity level."""
    n_x = params.n_x
    a_x_r = default_axr(n_x) if a_x_r is None else a_x_r
    if params.model_kind == "bmp":
        enc = bmp_map(w, a_y)
    else:
        enc = encoder_map(w, params.model_kind, a_y)
    census = omega_census(enc, n_x, cap=cap, workers=workers)
    if per_input:
        dec_census = omega_census(best_decode_map(w, enc, n_x), n_x, cap=cap, workers=workers)
    else:
        out_kind = "threshold" if params.model_kind == "threshold" else "kwta"
        dec_census = census.pushforward(decoder_map(w, out_kind, a_x_r, params.decoder_kind, decoder))
    return MIReport(
        a_y=a_y,
        sparsity=a_y / params.n_y,
        h_x=float(n_x),
        mi_encoder=mutual_information(census),
        mi_decoder=mutual_information(dec_census),
        upper_bound=mi_upper_bound(census),
        realized_codes=census.realized_count,
    )


def mean_error(w: WeightMatrix, params: ModelParams, a_y: int, n_samples: int, seed, decoder=None) -> float:
    """Mean best-reconstruction error over random inputs with ``params.a_x`` ones."""
    rng = make_rng(seed)
    xs = random_rows(rng, n_samples, params.n_x, params.a_x)
    p = params.replace(hidden_control=a_y)
    return float(np.mean([best_reconstruction(w, BinaryVector.from_bits(x), p, decoder).error for x in xs]))


def mi_sparsity_sweep(params: ModelParams, a_y_values: Sequence[int], seed=0, *, a_x_r: int | None = None,
                      per_input: bool = False, error_samples: int = 200, cap: int = DEFAULT_CAP,
                      workers: int = 1, weights: WeightMatrix | None = None, decoder=None,
                      stream: tuple[int, ...] = ()) -> list[MIReport]:
    """MI curves over hidden activity for one random weight draw.

    Weights come from ``(seed, *stream, 0)``, decoder weights from
    ``(seed, *stream, 1)`` and the error-curve inputs from ``(seed, *stream, 2)``.
    """
    if params.n_x > cap:
        raise EnumerationCapError(f"n_x={params.n_x} exceeds the enumeration cap of {cap} bits")
    w = weights if weights is not None else random_weight_matrix(params.n_y, params.n_x, params.a_w, make_rng(seed, *stream, 0))
    if decoder is None:
        decoder = make_decoder(params, make_rng(seed, *stream, 1))
    reports = []
    for a_y in a_y_values:
        rep = mi_point(w, params, a_y, a_x_r=a_x_r, decoder=decoder, per_input=per_input, cap=cap, workers=workers)
        if error_samples:
            err = mean_error(w, params, a_y, error_samples, make_rng(seed, *stream, 2), decoder)
            rep = MIReport(**{**rep.__dict__, "error": err})
        reports.append(rep)
    return reports
