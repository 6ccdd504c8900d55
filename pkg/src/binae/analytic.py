"""Closed-form prediction of the mean reconstruction error.

The overlap between a random weight row (``a_w`` ones) and the input
(``a_x`` ones) is hypergeometric. Conditioning on a row's overlap ``k`` gives
the per-position weight probabilities ``p+(k) = k / a_x`` (inside the input's
support) and ``p-(k) = (a_w - k) / (n_x - a_x)`` (outside it). Summing over the
rows that pass the hidden nonlinearity and applying the central limit theorem
turns the output pre-activation into two Gaussians, one for input ones and one
for input zeros; the error is the mass on the wrong side of ``t_x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, floor

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import ndtr

from .models import ModelParams


@dataclass(frozen=True)
class OverlapDistribution:
    support: np.ndarray  # integer overlaps k
    pmf: np.ndarray

    def prob(self, k: int) -> float:
        i = k - int(self.support[0])
        return float(self.pmf[i]) if 0 <= i < self.pmf.shape[0] else 0.0

    def tail(self, t: int) -> float:
        """P(z >= t)."""
        return float(self.pmf[self.support >= t].sum())

    def mean(self) -> float:
        return float((self.support * self.pmf).sum())


@dataclass(frozen=True)
class GaussianPair:
    mu_plus: float
    sigma_plus: float
    mu_minus: float
    sigma_minus: float


def overlap_pmf(n_x: int, a_x: int, a_w: int) -> OverlapDistribution:
    """Hypergeometric pmf of the row/input overlap, from exact binomials."""
    if not (0 <= a_x <= n_x and 0 <= a_w <= n_x):
        raise ValueError(f"need 0 <= a_x, a_w <= n_x, got n_x={n_x}, a_x={a_x}, a_w={a_w}")
    lo, hi = max(0, a_x + a_w - n_x), min(a_x, a_w)
    total = comb(n_x, a_w)
    support = np.arange(lo, hi + 1)
    pmf = np.array([comb(a_x, k) * comb(n_x - a_x, a_w - k) / total for k in support])
    return OverlapDistribution(support, pmf)


def conditional_weight_probs(k: int, n_x: int, a_x: int, a_w: int) -> tuple[float, float]:
    """``(p+(k), p-(k))``: chance a weight is 1 given the row's overlap is ``k``."""
    if a_x < 1:
        raise ValueError("a_x must be >= 1")
    if a_x >= n_x:
        raise ValueError("degenerate input: a_x == n_x leaves no zero positions, p- undefined")
    return k / a_x, (a_w - k) / (n_x - a_x)


def _terms(n_x: int, n_y: int, a_x: int, a_w: int):
    dist = overlap_pmf(n_x, a_x, a_w)
    k = dist.support.astype(float)
    pp = k / a_x
    pm = (a_w - k) / (n_x - a_x)
    counts = dist.pmf * n_y  # expected number of rows with overlap k
    return dist.support, counts, pp, pm


def _moments(counts, pp, pm) -> GaussianPair:
    mu_p = float((pp * counts).sum())
    mu_m = float((pm * counts).sum())
    var_p = float((pp * (1 - pp) * counts).sum())
    var_m = float((pm * (1 - pm) * counts).sum())
    return GaussianPair(mu_p, np.sqrt(var_p), mu_m, np.sqrt(var_m))


def gaussian_moments(params: ModelParams, t_y: int) -> GaussianPair:
    """Moments of ``v_j`` given ``x_j = 1`` / ``x_j = 0`` for hidden threshold ``t_y``."""
    conditional_weight_probs(0, params.n_x, params.a_x, params.a_w)
    k, counts, pp, pm = _terms(params.n_x, params.n_y, params.a_x, params.a_w)
    keep = k >= t_y
    return _moments(counts * keep, pp, pm)


def gaussian_moments_kwta(params: ModelParams, a_y: float) -> GaussianPair:
    """Like :func:`gaussian_moments` but keeping exactly ``a_y`` expected rows.

    Rows are taken from the highest overlap down; the boundary overlap
    contributes fractionally.
    """
    if not 0 <= a_y <= params.n_y:
        raise ValueError(f"need 0 <= a_y <= n_y, got {a_y}")
    conditional_weight_probs(0, params.n_x, params.a_x, params.a_w)
    k, counts, pp, pm = _terms(params.n_x, params.n_y, params.a_x, params.a_w)
    weights = np.zeros_like(counts)
    remaining = float(a_y)
    for i in range(len(k) - 1, -1, -1):
        if remaining <= 0:
            break
        take = min(counts[i], remaining)
        weights[i] = take
        remaining -= take
    return _moments(weights, pp, pm)


def _below(t, mu, sigma, half_correction):
    """P(v < t) for v ~ N(mu, sigma^2); a point mass when sigma == 0."""
    if half_correction:
        t = t - 0.5
    if sigma == 0:
        return np.where(np.asarray(t) > mu, 1.0, 0.0)
    return ndtr((np.asarray(t) - mu) / sigma)


def expected_error(pair: GaussianPair, t_x, a_x: int, n_x: int, *, half_correction: bool = False):
    """Mean Hamming error / n_x: false negatives plus false positives at ``t_x``."""
    fn = _below(t_x, pair.mu_plus, pair.sigma_plus, half_correction) * a_x
    fp = (1.0 - _below(t_x, pair.mu_minus, pair.sigma_minus, half_correction)) * (n_x - a_x)
    out = (fn + fp) / n_x
    return float(out) if np.ndim(out) == 0 else out


def approx_optimal_ty(params: ModelParams) -> int:
    """Hidden threshold maximising ``mu+ - mu-``: ``floor(a_x a_w / n_x) + 1``."""
    t = floor(params.a_x * params.a_w / params.n_x) + 1
    return int(min(max(t, 1), max(1, min(params.a_x, params.a_w))))


def approx_optimal_tx(pair: GaussianPair, a_x: int, n_x: int, *, resolution: float = 1e-3,
                      half_correction: bool = False) -> float:
    """Output threshold minimising :func:`expected_error` (not an integer)."""
    if pair.sigma_plus <= 0 or pair.sigma_minus <= 0:
        return (pair.mu_plus + pair.mu_minus) / 2
    if pair.mu_plus == pair.mu_minus and pair.sigma_plus == pair.sigma_minus:
        return pair.mu_plus
    lo = pair.mu_minus - 4 * pair.sigma_minus
    hi = pair.mu_plus + 4 * pair.sigma_plus
    lo, hi = min(lo, hi), max(lo, hi)
    grid = np.arange(lo, hi + resolution, resolution)
    err = expected_error(pair, grid, a_x, n_x, half_correction=half_correction)
    i = int(np.argmin(err))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    if b <= a:
        return float(grid[i])
    res = minimize_scalar(lambda t: expected_error(pair, t, a_x, n_x, half_correction=half_correction),
                          bounds=(a, b), method="bounded", options={"xatol": resolution * 1e-3})
    return float(res.x) if res.fun <= err[i] else float(grid[i])


def predicted_error(params: ModelParams, t_y: int | None = None, a_y: float | None = None, *,
                    half_correction: bool = False) -> tuple[float, float, float]:
    """``(expected sparsity, optimal t_x, expected error)`` for a threshold or kWTA point."""
    if (t_y is None) == (a_y is None):
        raise ValueError("give exactly one of t_y and a_y")
    if t_y is not None:
        pair = gaussian_moments(params, t_y)
        sparsity = overlap_pmf(params.n_x, params.a_x, params.a_w).tail(t_y)
    else:
        pair = gaussian_moments_kwta(params, a_y)
        sparsity = a_y / params.n_y
    tx = approx_optimal_tx(pair, params.a_x, params.n_x, half_correction=half_correction)
    return sparsity, tx, expected_error(pair, tx, params.a_x, params.n_x, half_correction=half_correction)
