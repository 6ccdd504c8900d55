"""Similarity preservation: does nearest-neighbour order survive encoding?

A corpus of random inputs is encoded; for each query the ``k`` nearest
neighbours in input space form the relevant set and the ``k`` nearest in
code space form the ranked retrieval list. Both rankings use Hamming distance
with ties broken by corpus index. Average precision scores each query; the
mean over queries and then over weight draws is the mAP.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .binvec import make_rng, pack_bits, random_rows, random_weight_matrix
from .models import ModelParams, PairwiseWeights, bmp_encode
from .binvec import BinaryVector

ENCODERS = ("linear", "pairwise")


def knn_hamming(packed: np.ndarray, query: int, k: int) -> np.ndarray:
    """Indices of the ``k`` rows closest to row ``query``, the query excluded.

    Order is by distance, then by index.
    """
    packed = np.ascontiguousarray(packed, dtype=np.uint64)
    n = packed.shape[0]
    if not 0 <= query < n:
        raise ValueError(f"query index {query} out of range for {n} rows")
    if not 0 <= k < n:
        raise ValueError(f"need 0 <= k < {n}, got k={k}")
    d = kernels.xor_popcount_rows(packed, packed[query])
    d[query] = np.iinfo(np.int64).max
    return np.argsort(d, kind="stable")[:k]


def average_precision(relevant, retrieved, *, normalized: bool = True) -> float:
    """Precision at each hit, averaged over the list length.

    With ``normalized=False`` the raw sum of ``1 / rank`` over hits is
    returned instead; it can exceed 1 and is kept only for comparison.
    """
    rel = set(int(i) for i in relevant)
    retrieved = [int(i) for i in retrieved]
    if not retrieved:
        return 0.0
    hits = 0
    total = 0.0
    for rank, item in enumerate(retrieved, start=1):
        if item in rel:
            hits += 1
            total += hits / rank if normalized else 1.0 / rank
    return total / len(retrieved) if normalized else total


def query_precisions(input_packed, code_packed, queries, k: int, *, normalized: bool = True) -> np.ndarray:
    return np.array([
        average_precision(knn_hamming(input_packed, q, k), knn_hamming(code_packed, q, k), normalized=normalized)
        for q in queries
    ])


# -- batch encoders ----------------------------------------------------------

def kwta_rows(z: np.ndarray, k: int) -> np.ndarray:
    """Row-wise kWTA on a ``(m, n)`` array, lowest index winning ties."""
    z = np.asarray(z)
    out = np.zeros(z.shape, dtype=np.uint8)
    if k:
        idx = np.argsort(-z.astype(np.int64), axis=1, kind="stable")[:, :k]
        np.put_along_axis(out, idx, 1, axis=1)
    return out


def encode_batch(w, bits: np.ndarray, params: ModelParams, pair_weights: PairwiseWeights | None = None) -> np.ndarray:
    """Hidden codes for a ``(m, n_x)`` batch under ``params``' encoder."""
    bits = np.asarray(bits, dtype=np.uint8)
    if params.model_kind == "bmp":
        return np.stack([
            bmp_encode(w, BinaryVector.from_bits(b), params.hidden_control, params.inhibition,
                       fast_axr=True)[-1].hidden.to_array()
            for b in bits
        ])
    if pair_weights is not None:
        z = pair_weights.sums_batch(bits)
    else:
        z = bits.astype(np.int32) @ w.dense.T.astype(np.int32)
    if params.model_kind == "threshold":
        return (z >= params.hidden_control).astype(np.uint8)
    return kwta_rows(z, params.hidden_control)


# -- protocol ----------------------------------------------------------------

@dataclass(frozen=True)
class APReport:
    mean_ap: float
    std: float
    per_trial: tuple[float, ...]
    sparsity: float  # mean realized code density
    n_queries: int
    k: int
    per_query: tuple[tuple[float, ...], ...] = field(repr=False, default=())

    @property
    def trials(self) -> int:
        return len(self.per_trial)


def _trial(params: ModelParams, seed, trial: int, n_corpus: int, n_queries: int, k: int,
           encoder: str, normalized: bool, encode_fn):
    rng = make_rng(seed, trial)
    bits = random_rows(rng, n_corpus, params.n_x, params.a_x)
    queries = rng.choice(n_corpus, size=n_queries, replace=False)
    if encode_fn is not None:
        codes = np.asarray(encode_fn(bits, trial), dtype=np.uint8)
    else:
        w = random_weight_matrix(params.n_y, params.n_x, params.a_w, make_rng(seed, trial, 1))
        pw = None
        if encoder == "pairwise":
            pw = PairwiseWeights.random(params.n_y, params.n_x, params.a_w / params.n_x, make_rng(seed, trial, 2))
        codes = encode_batch(w, bits, params, pw)
    aps = query_precisions(pack_bits(bits), pack_bits(codes), queries, k, normalized=normalized)
    return aps, float(codes.mean())


def mean_average_precision(params: ModelParams, seed=0, *, n_corpus: int = 1000, n_queries: int = 100,
                           k: int = 20, n_weight_trials: int = 10, encoder: str = "linear",
                           normalized: bool = True, workers: int = 1,
                           encode_fn: Callable[[np.ndarray, int], np.ndarray] | None = None) -> APReport:
    """Run the retrieval protocol at one model setting.

    Trial ``t`` draws its corpus and queries from stream ``(seed, t)`` and its
    weights from ``(seed, t, 1)``, so every sparsity in a sweep sees the same
    corpora and weights. ``encode_fn(bits, trial)`` replaces the model
    encoder when given.
    """
    if encoder not in ENCODERS:
        raise ValueError(f"unknown encoder {encoder!r}")
    if not 1 <= n_queries <= n_corpus:
        raise ValueError("need 1 <= n_queries <= n_corpus")
    if not 1 <= k < n_corpus:
        raise ValueError("need 1 <= k < n_corpus")
    if n_weight_trials < 1:
        raise ValueError("need at least one weight trial")

    def run(t):
        return _trial(params, seed, t, n_corpus, n_queries, k, encoder, normalized, encode_fn)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, range(n_weight_trials)))
    else:
        results = [run(t) for t in range(n_weight_trials)]
    means = np.array([aps.mean() for aps, _ in results])
    return APReport(
        mean_ap=float(means.mean()),
        std=float(means.std()),
        per_trial=tuple(float(m) for m in means),
        sparsity=float(np.mean([s for _, s in results])),
        n_queries=n_queries,
        k=k,
        per_query=tuple(tuple(float(a) for a in aps) for aps, _ in results),
    )


def map_sparsity_sweep(params: ModelParams, controls: Sequence[int], seed=0, *,
                       models: Sequence[str] = ("kwta",), encoder: str = "linear", **kwargs) -> dict[str, list[APReport]]:
    """One mAP curve per model kind over hidden controls (``a_y`` or ``t_y``).

    The threshold curve is indexed by ``t_y``; its realized sparsity is in
    each report.
    """
    curves: dict[str, list[APReport]] = {}
    for kind in models:
        curves[kind] = [
            mean_average_precision(params.replace(model_kind=kind, hidden_control=int(c)), seed,
                                   encoder=encoder, **kwargs)
            for c in controls
        ]
    return curves
