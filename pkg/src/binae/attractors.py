"""Iterated encode/decode dynamics and their limit cycles.

The map ``x -> y -> x'`` is applied repeatedly. With a fixed output control
(``t_x`` or ``a_x^r``) it is a pure function of ``x``, so every trajectory
ends in a cycle. Cycle lengths are reported in input-layer states and in
combined steps (two per state, one per layer).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .analytic import approx_optimal_tx, approx_optimal_ty, gaussian_moments, overlap_pmf
from .binvec import BinaryVector, WeightMatrix, make_rng, pack_bits, random_rows, unpack_bits
from .models import ModelParams, PairwiseWeights, count_scan, threshold_scan
from .simprec import kwta_rows

POLICIES = ("fixed", "optimized")


def default_output_control(params: ModelParams) -> int:
    """Fixed decode control: rounded analytic ``t_x`` for threshold, ``a_x`` otherwise."""
    if params.model_kind == "threshold":
        pair = gaussian_moments(params, params.hidden_control)
        return max(1, int(round(approx_optimal_tx(pair, params.a_x, params.n_x))))
    return params.a_x


def matched_kwta_params(params: ModelParams) -> ModelParams:
    """kWTA params whose ``a_y`` matches the threshold model's expected activity at ``t_y``¹."""
    t = approx_optimal_ty(params)
    a_y = int(round(params.n_y * overlap_pmf(params.n_x, params.a_x, params.a_w).tail(t)))
    return params.replace(model_kind="kwta", hidden_control=max(1, min(params.n_y, a_y)))


class StepMap:
    """Batched ``x -> x'`` for a weight matrix and a decode policy."""

    def __init__(self, w: WeightMatrix, params: ModelParams, *, policy: str = "fixed",
                 control: int | None = None, decoder=None):
        if params.model_kind == "bmp":
            raise ValueError("attractor dynamics support the threshold and kwta models")
        if policy not in POLICIES:
            raise ValueError(f"unknown policy {policy!r}")
        if w.shape != (params.n_y, params.n_x):
            raise ValueError(f"weights are {w.shape}, params want {(params.n_y, params.n_x)}")
        self.w = w
        self.params = params
        self.policy = policy
        self.control = default_output_control(params) if control is None else int(control)
        self._enc = w.dense.T.astype(np.int32)
        if params.decoder_kind == "transpose":
            self._dec = w.dense.astype(np.int32)
        elif params.decoder_kind == "independent-random":
            if not isinstance(decoder, WeightMatrix):
                raise ValueError("independent-random decoding needs a decoder matrix")
            self._dec = decoder.dense.T.astype(np.int32)
        else:
            self._dec = decoder if isinstance(decoder, PairwiseWeights) else PairwiseWeights.from_encoder(w)

    def hidden(self, bits: np.ndarray) -> np.ndarray:
        z = bits.astype(np.int32) @ self._enc
        if self.params.model_kind == "threshold":
            return (z >= self.params.hidden_control).astype(np.uint8)
        return kwta_rows(z, self.params.hidden_control)

    def __call__(self, bits: np.ndarray) -> np.ndarray:
        bits = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
        y = self.hidden(bits)
        if isinstance(self._dec, PairwiseWeights):
            v = self._dec.sums_batch(y)
        else:
            v = y.astype(np.int32) @ self._dec
        thr = self.params.model_kind == "threshold"
        if self.policy == "fixed":
            return (v >= self.control).astype(np.uint8) if thr else kwta_rows(v, self.control)
        out = np.empty_like(bits)
        for i in range(bits.shape[0]):
            if thr:
                t = int(np.argmin(threshold_scan(v[i], bits[i])))
                out[i] = v[i] >= t
            else:
                out[i] = kwta_rows(v[i:i + 1], int(np.argmin(count_scan(v[i], bits[i]))))[0]
        return out


@dataclass(frozen=True)
class CycleReport:
    transient_length: int
    cycle_states_x: int
    converged: bool
    cycle: tuple[BinaryVector, ...] = field(repr=False)

    @property
    def cycle_length_combined(self) -> int:
        return 2 * self.cycle_states_x

    @property
    def attractor_key(self) -> bytes:
        """Canonical id: the smallest cycle state's bytes (same for every start in the basin)."""
        return min(s.words.tobytes() for s in self.cycle) if self.cycle else b""


def _report(history: list[bytes], first: int, n_x: int, converged: bool) -> CycleReport:
    if not converged:
        return CycleReport(len(history), 0, False, ())
    states = tuple(BinaryVector(np.frombuffer(h, dtype=np.uint64).copy(), n_x) for h in history[first:])
    return CycleReport(first, len(states), True, states)


def _trajectories(step: StepMap, starts: np.ndarray, max_iter: int) -> list[CycleReport]:
    n_x = step.params.n_x
    n = starts.shape[0]
    seen = [dict() for _ in range(n)]
    hist: list[list[bytes]] = [[] for _ in range(n)]
    out: list[CycleReport | None] = [None] * n
    active = np.arange(n)
    cur = np.asarray(starts, dtype=np.uint8)
    for it in range(max_iter + 1):
        keys = pack_bits(cur)
        keep = []
        for row, i in enumerate(active):
            key = keys[row].tobytes()
            if key in seen[i]:
                out[i] = _report(hist[i], seen[i][key], n_x, True)
            else:
                seen[i][key] = it
                hist[i].append(key)
                keep.append(row)
        if not keep:
            break
        active = active[keep]
        cur = cur[keep]
        if it == max_iter:
            break
        cur = step(cur)
    for i in active:
        if out[i] is None:
            out[i] = _report(hist[i], 0, n_x, False)
    return out  # type: ignore[return-value]


def iterate_to_cycle(w: WeightMatrix, params: ModelParams, x0: BinaryVector, max_iter: int = 1000, *,
                     policy: str = "fixed", control: int | None = None, decoder=None,
                     step: StepMap | None = None) -> CycleReport:
    """Follow ``x0`` until a state repeats or ``max_iter`` steps pass.

    A trajectory that does not close within ``max_iter`` comes back with
    ``converged=False``.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if x0.length != params.n_x:
        raise ValueError(f"start has length {x0.length}, expected {params.n_x}")
    step = step or StepMap(w, params, policy=policy, control=control, decoder=decoder)
    return _trajectories(step, x0.to_array()[None, :], max_iter)[0]


@dataclass
class CensusReport:
    n_samples: int
    histogram: Counter  # (transient_length, cycle_length_combined) -> count
    distinct_attractors: int
    non_converged: int
    counterexamples: list[CycleReport]  # converged cycles longer than 2 combined steps
    output_control: int

    @property
    def fraction_length_two(self) -> float:
        if not self.n_samples:
            return float("nan")
        two = sum(c for (_, length), c in self.histogram.items() if length == 2)
        return two / self.n_samples

    def cycle_lengths(self) -> Counter:
        out: Counter = Counter()
        for (_, length), c in self.histogram.items():
            out[length] += c
        return out


def cycle_census(w: WeightMatrix, params: ModelParams, n_samples: int, seed=0, max_iter: int = 1000, *,
                 policy: str = "fixed", control: int | None = None, decoder=None, starts=None,
                 keep_counterexamples: int = 20) -> CensusReport:
    """Run many random starts (``a_x`` ones each) and tally where they end."""
    if n_samples < 0:
        raise ValueError("n_samples must be >= 0")
    step = StepMap(w, params, policy=policy, control=control, decoder=decoder)
    if starts is None:
        starts = random_rows(make_rng(seed), n_samples, params.n_x, params.a_x)
    starts = np.asarray(starts, dtype=np.uint8).reshape(-1, params.n_x)
    reports = _trajectories(step, starts, max_iter) if starts.shape[0] else []
    hist: Counter = Counter()
    attractors = set()
    bad: list[CycleReport] = []
    stuck = 0
    for r in reports:
        if not r.converged:
            stuck += 1
            hist[(r.transient_length, 0)] += 1
            continue
        hist[(r.transient_length, r.cycle_length_combined)] += 1
        attractors.add(r.attractor_key)
        if r.cycle_length_combined > 2 and len(bad) < keep_counterexamples:
            bad.append(r)
    return CensusReport(len(reports), hist, len(attractors), stuck, bad, step.control)


def cycle_states_array(report: CycleReport) -> np.ndarray:
    return np.stack([unpack_bits(s.words, s.length) for s in report.cycle]) if report.cycle else np.zeros((0, 0))
