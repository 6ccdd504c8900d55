import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import hypergeom

from binae.analytic import (
    GaussianPair,
    approx_optimal_tx,
    approx_optimal_ty,
    conditional_weight_probs,
    expected_error,
    gaussian_moments,
    gaussian_moments_kwta,
    overlap_pmf,
    predicted_error,
)
from binae.binvec import make_rng, random_rows
from binae.experiments import run_analytic_compare, resolve_config
from binae.models import ModelParams


@settings(max_examples=60)
@given(st.integers(1, 200).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n), st.integers(0, n))))
def test_pmf_normalized_and_matches_scipy(args):
    n_x, a_x, a_w = args
    d = overlap_pmf(n_x, a_x, a_w)
    assert abs(d.pmf.sum() - 1) < 1e-12
    assert (d.pmf >= 0).all()
    ref = hypergeom(n_x, a_x, a_w).pmf(d.support)
    assert np.allclose(d.pmf, ref, rtol=1e-9, atol=1e-15)


def test_pmf_point_masses():
    assert overlap_pmf(50, 20, 0).support.tolist() == [0]
    d = overlap_pmf(50, 50, 30)
    assert d.support.tolist() == [30] and d.pmf[0] == 1
    with pytest.raises(ValueError):
        overlap_pmf(10, 11, 3)


def test_pmf_matches_monte_carlo():
    rng = make_rng(11)
    n = 200_000
    rows = random_rows(rng, n, 50, 30)
    xs = random_rows(rng, n, 50, 20)
    k = (rows & xs).sum(axis=1)
    d = overlap_pmf(50, 20, 30)
    freq = np.bincount(k, minlength=d.support.max() + 1)[d.support] / n
    se = np.sqrt(d.pmf * (1 - d.pmf) / n)
    assert (np.abs(freq - d.pmf) <= 3 * se + 1e-12).all()


def test_conditional_probs():
    assert conditional_weight_probs(14, 50, 20, 30) == pytest.approx((0.7, 16 / 30))
    assert conditional_weight_probs(0, 50, 20, 30)[0] == 0
    assert conditional_weight_probs(30, 50, 35, 30)[1] == 0
    with pytest.raises(ValueError):
        conditional_weight_probs(3, 10, 10, 3)


def test_moments_empty_and_full_sums():
    p = ModelParams(50, 200, 20, 30)
    empty = gaussian_moments(p, 21)
    assert (empty.mu_plus, empty.sigma_plus, empty.mu_minus, empty.sigma_minus) == (0, 0, 0, 0)
    d = overlap_pmf(50, 20, 30)
    full = gaussian_moments(p, int(d.support[0]))
    assert full.mu_plus == pytest.approx(200 * (d.pmf * d.support / 20).sum())


def test_kwta_moments_agree_with_threshold_at_integer_boundary():
    p = ModelParams(50, 200, 20, 30)
    for t in (10, 12, 14):
        a_y = 200 * overlap_pmf(50, 20, 30).tail(t)
        a, b = gaussian_moments(p, t), gaussian_moments_kwta(p, a_y)
        assert np.allclose([a.mu_plus, a.sigma_plus, a.mu_minus, a.sigma_minus],
                           [b.mu_plus, b.sigma_plus, b.mu_minus, b.sigma_minus])
    a, b = gaussian_moments_kwta(p, 200), gaussian_moments(p, 1)
    assert np.allclose([a.mu_plus, a.sigma_plus, a.mu_minus, a.sigma_minus],
                       [b.mu_plus, b.sigma_plus, b.mu_minus, b.sigma_minus])


@pytest.mark.parametrize("t_y", [8, 14])
def test_moments_match_simulated_decoder_sums(t_y):
    p = ModelParams(50, 200, 20, 30)
    pair = gaussian_moments(p, t_y)
    rng = make_rng(5, t_y)
    on, off = [], []
    for _ in range(3000):
        w = random_rows(rng, 200, 50, 30)
        x = random_rows(rng, 1, 50, 20)[0].astype(bool)
        y = (w[:, x].sum(axis=1) >= t_y)
        v = w[y].sum(axis=0)
        on.append(v[x].mean())
        off.append(v[~x].mean())
    assert np.mean(on) == pytest.approx(pair.mu_plus, rel=0.02)
    assert np.mean(off) == pytest.approx(pair.mu_minus, rel=0.02)
    assert pair.mu_plus >= pair.mu_minus


def test_expected_error_limits():
    pair = GaussianPair(40.0, 5.0, 20.0, 4.0)
    assert expected_error(pair, -1e9, 20, 50) == pytest.approx(30 / 50)
    assert expected_error(pair, 1e9, 20, 50) == pytest.approx(20 / 50)
    same = GaussianPair(10.0, 2.0, 10.0, 2.0)
    assert expected_error(same, 10.0, 25, 50) == pytest.approx(0.5)
    step = GaussianPair(5.0, 0.0, 1.0, 0.0)
    assert expected_error(step, 3.0, 20, 50) == 0


def test_approx_ty_examples():
    assert approx_optimal_ty(ModelParams(50, 150, 20, 30)) == 13
    assert approx_optimal_ty(ModelParams(100, 150, 10, 10)) == 2
    assert approx_optimal_ty(ModelParams(10, 20, 1, 1)) == 1  # clamped


def test_approx_tx_degenerate_cases():
    assert approx_optimal_tx(GaussianPair(10.0, 2.0, 10.0, 2.0), 20, 50) == 10.0
    assert approx_optimal_tx(GaussianPair(8.0, 0.0, 2.0, 1.0), 20, 50) == 5.0
    far = GaussianPair(100.0, 2.0, 10.0, 2.0)
    t = approx_optimal_tx(far, 20, 50)
    assert 10 < t < 100 and expected_error(far, t, 20, 50) < 1e-6


@pytest.mark.parametrize("t_y", [6, 10, 13, 16])
def test_approx_tx_matches_fine_grid(t_y):
    pair = gaussian_moments(ModelParams(50, 200, 20, 30), t_y)
    t = approx_optimal_tx(pair, 20, 50)
    grid = np.arange(pair.mu_minus - 4 * pair.sigma_minus, pair.mu_plus + 4 * pair.sigma_plus, 1e-4)
    g = grid[np.argmin(expected_error(pair, grid, 20, 50))]
    assert abs(t - g) <= 1e-3 or expected_error(pair, t, 20, 50) <= expected_error(pair, g, 20, 50) + 1e-12


def test_predicted_error_arguments():
    p = ModelParams(50, 200, 20, 30)
    with pytest.raises(ValueError):
        predicted_error(p)
    with pytest.raises(ValueError):
        predicted_error(p, t_y=3, a_y=10)
    s, _, e = predicted_error(p, a_y=50)
    assert s == 0.25 and 0 < e < 0.5


@pytest.fixture(scope="module")
def kwta_fixed_compare():
    cfg = resolve_config("analytic-compare", model="kwta", n_y=150, trials=400, seed=4, policy="fixed")
    return run_analytic_compare(cfg).rows


def test_kwta_prediction_tracks_simulation(kwta_fixed_compare):
    """kWTA keeps exactly a_y rows, which is what the moment sums assume.

    The comparison decodes with a_x^r = a_x; choosing a_x^r per input with
    knowledge of x beats any closed-form rule.
    """
    diffs = [r["abs_diff"] for r in kwta_fixed_compare if 0.2 <= r["sparsity"] <= 0.9]
    assert max(diffs) < 0.01


@pytest.mark.xfail(strict=True, reason="Gaussian estimate drifts once nearly every hidden unit is active")
def test_kwta_prediction_up_to_full_activity(kwta_fixed_compare):
    diffs = [r["abs_diff"] for r in kwta_fixed_compare if r["sparsity"] >= 0.2]
    assert max(diffs) < 0.01
