"""Experiment drivers behind the ``binae`` command.

Every driver returns a :class:`Table`. Randomness is keyed so that trial
``t`` of sweep point ``i`` always draws from the same substream, whatever
process runs it; trial results are reduced in trial order, so tables do not
depend on the worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .analytic import approx_optimal_ty, predicted_error
from .attractors import cycle_census, matched_kwta_params
from .binvec import BinaryVector, WeightMatrix, make_rng, random_binary_vector, random_weight_matrix
from .infometrics import make_decoder, mi_sparsity_sweep
from .models import (
    ModelParams,
    PairwiseWeights,
    best_reconstruction,
    bmp_encode,
    fixed_reconstruction,
    overlaps,
    random_decoder,
    threshold_scan,
)
from .simprec import mean_average_precision

EXPERIMENTS = (
    "sweep-sparsity", "sweep-ratio", "sweep-ax", "sweep-aw", "mi-curve", "map-curve",
    "analytic-compare", "threshold-approx", "attractor-census", "weights-comparison", "axr-average",
)

FIG1 = dict(n_x=50, n_y=150, a_x=20, a_w=30)

# experiment -> (param defaults, model, decoder, trials)
DEFAULTS: dict[str, dict[str, Any]] = {
    "sweep-sparsity": dict(FIG1, model="threshold", trials=100),
    "sweep-ratio": dict(FIG1, model="bmp", trials=20),
    "sweep-ax": dict(FIG1, model="threshold", trials=100),
    "sweep-aw": dict(FIG1, model="threshold", trials=100),
    "mi-curve": dict(n_x=20, n_y=30, a_x=10, a_w=7, model="kwta", trials=1),
    "map-curve": dict(n_x=50, n_y=200, a_x=20, a_w=30, model="kwta", trials=10),
    "analytic-compare": dict(n_x=50, n_y=200, a_x=20, a_w=30, model="threshold", trials=100),
    "threshold-approx": dict(n_x=50, n_y=200, a_x=20, a_w=30, model="threshold", trials=100),
    "attractor-census": dict(FIG1, model="threshold,kwta", trials=3),
    "weights-comparison": dict(FIG1, model="threshold", trials=100),
    "axr-average": dict(FIG1, model="kwta", trials=200),
}


@dataclass
class Table:
    columns: list[str]
    rows: list[dict[str, Any]]
    summary: list[str] = field(default_factory=list)
    artifacts: dict[str, Any] = field(default_factory=dict)


def pmap(fn: Callable, items: Sequence, workers: int = 1) -> list:
    """Ordered map, in a process pool when ``workers > 1``."""
    items = list(items)
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
    return [fn(i) for i in items]


def _stats(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=float)
    return float(a.mean()), float(a.std())


# -- per-trial error profiles ------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """Best-reconstruction error of one (w, x) pair at every hidden control."""

    controls: np.ndarray
    sparsity: np.ndarray  # realized hidden density per control
    mismatches: np.ndarray
    chosen: np.ndarray  # optimal t_x or a_x^r per control
    n_x: int

    @property
    def error(self) -> np.ndarray:
        return self.mismatches / self.n_x

    def optimum(self) -> int:
        """Index of the smallest sparsity among the minimal-error controls."""
        best = np.flatnonzero(self.mismatches == self.mismatches.min())
        return int(best[np.argmin(self.sparsity[best])])


def _decoder_columns(w: WeightMatrix, decoder_kind: str, decoder) -> np.ndarray:
    """``(n_y, n_x)`` array whose row ``i`` is what hidden unit ``i`` adds to ``v``."""
    if decoder_kind == "transpose":
        return w.dense
    if decoder_kind == "independent-random":
        return decoder.dense.T
    raise ValueError(f"no linear column form for decoder {decoder_kind!r}")


def kwta_profile(w: WeightMatrix, x: BinaryVector, *, decoder_kind: str = "transpose", decoder=None) -> Profile:
    """Errors for every ``a_y`` in ``[1, n_y]`` with per-input optimal ``a_x^r``."""
    xb = x.to_array().astype(np.int64)
    n_y, n_x = w.shape
    order = np.argsort(-overlaps(w, x), kind="stable")
    cols = _decoder_columns(w, decoder_kind, decoder).astype(np.int64)
    v = np.cumsum(cols[order], axis=0)  # row k-1 is v for a_y = k
    out_order = np.argsort(-v, axis=1, kind="stable")
    hits = np.concatenate([np.zeros((n_y, 1), np.int64), np.cumsum(xb[out_order], axis=1)], axis=1)
    k = np.arange(n_x + 1)
    errs = (xb.sum() - hits) + (k - hits)
    chosen = np.argmin(errs, axis=1)
    a_y = np.arange(1, n_y + 1)
    return Profile(a_y, a_y / n_y, errs[np.arange(n_y), chosen], chosen, n_x)


def threshold_profile(w: WeightMatrix, x: BinaryVector, *, decoder_kind: str = "transpose", decoder=None) -> Profile:
    """Errors for every ``t_y`` in ``[1, min(a_x, a_w)]`` with per-input optimal ``t_x``."""
    xb = x.to_array()
    z = overlaps(w, x)
    a_w = int(w.row_ones().max())
    t = np.arange(1, max(1, min(x.ones, a_w)) + 1)
    y = (z[None, :] >= t[:, None]).astype(np.int64)
    v = y @ _decoder_columns(w, decoder_kind, decoder).astype(np.int64)
    mism = np.empty(t.shape[0], np.int64)
    chosen = np.empty(t.shape[0], np.int64)
    for i in range(t.shape[0]):
        e = threshold_scan(v[i], xb)
        chosen[i] = int(np.argmin(e))
        mism[i] = e[chosen[i]]
    return Profile(t, y.mean(axis=1), mism, chosen, x.length)


def bmp_profile(w: WeightMatrix, x: BinaryVector, *, lam: int | None = None, fast_axr: bool = False,
                n_steps: int | None = None) -> Profile:
    n = w.n_rows if n_steps is None else n_steps
    steps = bmp_encode(w, x, n, lam, fast_axr=fast_axr)
    k = np.arange(1, len(steps) + 1)
    return Profile(k, k / w.n_rows, np.array([s.mismatches for s in steps]),
                   np.array([s.a_x_r for s in steps]), x.length)


def generic_profile(w: WeightMatrix, x: BinaryVector, params: ModelParams, controls, decoder=None) -> Profile:
    """Slow path through :func:`best_reconstruction`, any decoder."""
    res = [best_reconstruction(w, x, params.replace(hidden_control=int(c)), decoder) for c in controls]
    return Profile(np.asarray(controls), np.array([r.sparsity for r in res]),
                   np.array([r.mismatches for r in res]), np.array([r.chosen for r in res]), x.length)


def profile(w: WeightMatrix, x: BinaryVector, params: ModelParams, decoder=None) -> Profile:
    if params.model_kind == "bmp":
        if params.decoder_kind != "transpose":
            raise ValueError("the BMP model decodes with the transpose only")
        return bmp_profile(w, x, lam=params.lam, fast_axr=params.fast_axr)
    if params.decoder_kind == "pairwise":
        hi = min(params.a_x, params.a_w) if params.model_kind == "threshold" else params.n_y
        return generic_profile(w, x, params, range(1, hi + 1), decoder)
    fn = threshold_profile if params.model_kind == "threshold" else kwta_profile
    return fn(w, x, decoder_kind=params.decoder_kind, decoder=decoder)


def draw_trial(params: ModelParams, seed, *key: int, bernoulli: bool = False):
    """Weights, input and decoder for one trial, each from its own substream."""
    w = random_weight_matrix(params.n_y, params.n_x, params.a_w, make_rng(seed, *key, 0), bernoulli=bernoulli)
    x = random_binary_vector(params.n_x, params.a_x, make_rng(seed, *key, 1))
    if params.decoder_kind == "independent-random":
        decoder = random_decoder(params.n_x, params.n_y, params.a_w, make_rng(seed, *key, 2))
    elif params.decoder_kind == "pairwise":
        decoder = PairwiseWeights.from_encoder(w)
    else:
        decoder = None
    return w, x, decoder


def trial_profile(params: ModelParams, seed, key: tuple[int, ...], bernoulli: bool = False) -> Profile:
    w, x, decoder = draw_trial(params, seed, *key, bernoulli=bernoulli)
    return profile(w, x, params, decoder)


def _task(args):
    params, seed, key, bernoulli = args
    return trial_profile(params, seed, key, bernoulli)


def profiles(params: ModelParams, seed, trials: int, *, point: int | None = None, workers: int = 1,
             bernoulli: bool = False) -> list[Profile]:
    prefix = () if point is None else (point,)
    return pmap(_task, [(params, seed, prefix + (t,), bernoulli) for t in range(trials)], workers)


def _stack(profs: list[Profile], attr: str) -> np.ndarray:
    """Stack a per-control attribute, truncating to the shortest profile."""
    n = min(len(p.controls) for p in profs)
    return np.stack([getattr(p, attr)[:n] for p in profs])


# -- drivers -----------------------------------------------------------------

@dataclass(frozen=True)
class SparsitySweep:
    model: str
    controls: np.ndarray
    sparsity: np.ndarray
    sparsity_std: np.ndarray
    error: np.ndarray
    error_std: np.ndarray
    optimal_sparsity: np.ndarray  # per trial
    minimal_error: np.ndarray  # per trial
    trials: int

    @property
    def curve_argmin_sparsity(self) -> float:
        best = np.flatnonzero(self.error == self.error.min())
        return float(self.sparsity[best].min())


def sparsity_sweep(params: ModelParams, trials: int, seed=0, *, workers: int = 1, point: int | None = None,
                   bernoulli: bool = False) -> SparsitySweep:
    profs = profiles(params, seed, trials, point=point, workers=workers, bernoulli=bernoulli)
    err = _stack(profs, "error")
    sp = _stack(profs, "sparsity")
    opt = [p.optimum() for p in profs]
    return SparsitySweep(
        params.model_kind, profs[0].controls[: err.shape[1]], sp.mean(0), sp.std(0), err.mean(0), err.std(0),
        np.array([p.sparsity[i] for p, i in zip(profs, opt)]),
        np.array([p.error[i] for p, i in zip(profs, opt)]), trials,
    )


def _params(cfg: dict, model: str | None = None, **over) -> ModelParams:
    kind = model or cfg["model"]
    base = dict(n_x=cfg["n_x"], n_y=cfg["n_y"], a_x=cfg["a_x"], a_w=cfg["a_w"], model_kind=kind,
                decoder_kind=cfg.get("decoder", "transpose"), hidden_control=1)
    base.update(over)
    return ModelParams(**base)


def _models(cfg: dict) -> list[str]:
    return [m.strip() for m in str(cfg["model"]).split(",") if m.strip()]


def run_sweep_sparsity(cfg: dict) -> Table:
    rows, summary = [], []
    for model in _models(cfg):
        s = sparsity_sweep(_params(cfg, model), cfg["trials"], cfg["seed"], workers=cfg["workers"])
        for i, c in enumerate(s.controls):
            rows.append(dict(model=model, control=int(c), sparsity=s.sparsity[i], sparsity_std=s.sparsity_std[i],
                             error=s.error[i], error_std=s.error_std[i], trials=s.trials))
        m, sd = _stats(s.optimal_sparsity)
        summary.append(f"{model}: curve minimum at s_y={s.curve_argmin_sparsity:.4g} "
                       f"(error {s.error.min():.4g}); mean optimal s_y={m:.4g} +- {sd:.4g}")
    return Table(["model", "control", "sparsity", "sparsity_std", "error", "error_std", "trials"], rows, summary)


def _axis_sweep(cfg: dict, axis: str, values: Sequence[int], make: Callable[[int], ModelParams], *,
                bernoulli: bool = False) -> list[dict]:
    rows = []
    for i, val in enumerate(values):
        p = make(int(val))
        s = sparsity_sweep(p, cfg["trials"], cfg["seed"], workers=cfg["workers"], point=i, bernoulli=bernoulli)
        e, e_sd = _stats(s.minimal_error)
        o, o_sd = _stats(s.optimal_sparsity)
        rows.append({"model": p.model_kind, axis: int(val), "n_y": p.n_y, "min_error": e, "min_error_std": e_sd,
                     "opt_sparsity": o, "opt_sparsity_std": o_sd, "trials": s.trials})
    return rows


_AXIS_COLUMNS = ["min_error", "min_error_std", "opt_sparsity", "opt_sparsity_std", "trials"]


def run_sweep_ratio(cfg: dict) -> Table:
    values = cfg.get("values") or list(range(1, 9))
    rows = []
    for model in _models(cfg):
        rows += _axis_sweep(cfg, "ratio", values, lambda r: _params(cfg, model, n_y=r * cfg["n_x"]))
    return Table(["model", "ratio", "n_y"] + _AXIS_COLUMNS, rows)


def run_sweep_ax(cfg: dict) -> Table:
    values = cfg.get("values") or list(range(1, cfg["n_x"]))
    rows = []
    for model in _models(cfg):
        rows += _axis_sweep(cfg, "a_x", values, lambda a: _params(cfg, model, a_x=a))
    return Table(["model", "a_x", "n_y"] + _AXIS_COLUMNS, rows)


def run_sweep_aw(cfg: dict) -> Table:
    values = cfg.get("values") or list(range(1, cfg["n_x"] + 1))
    rows = []
    for model in _models(cfg):
        rows += _axis_sweep(cfg, "a_w", values, lambda a: _params(cfg, model, a_w=a))
    return Table(["model", "a_w", "n_y"] + _AXIS_COLUMNS, rows)


def run_weights_comparison(cfg: dict) -> Table:
    values = cfg.get("values") or list(range(10, 45, 5))
    rows = []
    for model in _models(cfg):
        fixed = _axis_sweep(cfg, "a_w", values, lambda a: _params(cfg, model, a_w=a))
        bern = _axis_sweep(cfg, "a_w", values, lambda a: _params(cfg, model, a_w=a), bernoulli=True)
        for f, b in zip(fixed, bern):
            rows.append(dict(model=model, a_w=f["a_w"], error_fixed=f["min_error"], error_fixed_std=f["min_error_std"],
                             error_bernoulli=b["min_error"], error_bernoulli_std=b["min_error_std"],
                             trials=f["trials"]))
    cols = ["model", "a_w", "error_fixed", "error_fixed_std", "error_bernoulli", "error_bernoulli_std", "trials"]
    return Table(cols, rows)


def run_mi_curve(cfg: dict) -> Table:
    params = _params(cfg)
    values = cfg.get("values") or list(range(1, params.n_y))
    trials = [mi_sparsity_sweep(params, values, cfg["seed"], stream=(t,), workers=cfg["workers"],
                                a_x_r=cfg.get("axr"))
              for t in range(cfg["trials"])]
    rows = []
    keys = ("upper_bound", "mi_encoder", "mi_decoder", "error")
    for i, a_y in enumerate(values):
        row: dict[str, Any] = dict(a_y=int(a_y), sparsity=a_y / params.n_y)
        for k in keys:
            row[k], row[k + "_std"] = _stats([tr[i].scaled[k] for tr in trials])
        row["trials"] = cfg["trials"]
        rows.append(row)
    enc = max(rows, key=lambda r: r["mi_encoder"])
    dec = max(rows, key=lambda r: r["mi_decoder"])
    summary = [f"encoder MI peaks at s_y={enc['sparsity']:.4g}; decoder MI peaks at s_y={dec['sparsity']:.4g}"]
    cols = ["a_y", "sparsity"] + [c for k in keys for c in (k, k + "_std")] + ["trials"]
    return Table(cols, rows, summary)


def run_map_curve(cfg: dict) -> Table:
    rows = []
    n_y = cfg["n_y"]
    for model in _models(cfg):
        if model == "threshold":
            values = cfg.get("values") or list(range(1, min(cfg["a_x"], cfg["a_w"]) + 1))
        else:
            values = cfg.get("values") or sorted({max(1, int(round(s * n_y))) for s in np.arange(0.05, 1.0, 0.05)})
        for c in values:
            rep = mean_average_precision(_params(cfg, model, hidden_control=int(c)), cfg["seed"],
                                         n_weight_trials=cfg["trials"], encoder=cfg.get("encoder", "linear"),
                                         workers=cfg["workers"])
            rows.append(dict(model=model, control=int(c), sparsity=rep.sparsity, map=rep.mean_ap,
                             map_std=rep.std, trials=rep.trials))
    return Table(["model", "control", "sparsity", "map", "map_std", "trials"], rows)


def _fixed_policy_errors(params: ModelParams, controls, seed, trials: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-trial errors and sparsities with a fixed output control.

    kWTA decodes with ``a_x^r = a_x``; the threshold model with the rounded
    analytic ``t_x`` of each ``t_y``.
    """
    if params.model_kind == "threshold":
        out = [max(0, int(round(predicted_error(params, t_y=int(c))[1]))) for c in controls]
    else:
        out = [params.a_x] * len(controls)
    err = np.empty((trials, len(controls)))
    sp = np.empty_like(err)
    for t in range(trials):
        w, x, decoder = draw_trial(params, seed, t)
        for i, (c, o) in enumerate(zip(controls, out)):
            r = fixed_reconstruction(w, x, params.replace(hidden_control=int(c)), o, decoder)
            err[t, i], sp[t, i] = r.error, r.sparsity
    return err, sp


def run_analytic_compare(cfg: dict) -> Table:
    policy = cfg.get("policy") or "optimized"
    if policy not in ("optimized", "fixed"):
        raise ValueError("analytic-compare policy must be optimized or fixed")
    rows = []
    for model in _models(cfg):
        params = _params(cfg, model)
        if model == "bmp":
            raise ValueError("the analytic estimate covers the threshold and kwta models")
        if policy == "optimized":
            s = sparsity_sweep(params, cfg["trials"], cfg["seed"], workers=cfg["workers"])
            controls, sp, err, err_sd = s.controls, s.sparsity, s.error, s.error_std
        else:
            hi = min(params.a_x, params.a_w) if model == "threshold" else params.n_y
            controls = np.arange(1, hi + 1)
            e, spt = _fixed_policy_errors(params, controls, cfg["seed"], cfg["trials"])
            sp, err, err_sd = spt.mean(0), e.mean(0), e.std(0)
        for i, c in enumerate(controls):
            if model == "threshold":
                sp_a, tx, err_a = predicted_error(params, t_y=int(c))
            else:
                sp_a, tx, err_a = predicted_error(params, a_y=int(c))
            rows.append(dict(model=model, policy=policy, control=int(c), sparsity_analytic=sp_a, sparsity=sp[i],
                             error_analytic=err_a, error=err[i], error_std=err_sd[i],
                             abs_diff=abs(err_a - err[i]), t_x_analytic=tx, trials=cfg["trials"]))
    cols = ["model", "policy", "control", "sparsity_analytic", "sparsity", "error_analytic", "error", "error_std",
            "abs_diff", "t_x_analytic", "trials"]
    return Table(cols, rows)


def run_threshold_approx(cfg: dict) -> Table:
    values = cfg.get("values") or list(range(5, 46))
    rows = []
    for i, a_x in enumerate(values):
        params = _params(cfg, "threshold", a_x=int(a_x))
        profs = profiles(params, cfg["seed"], cfg["trials"], point=i, workers=cfg["workers"])
        opt = [int(p.controls[p.optimum()]) for p in profs]
        m, sd = _stats(opt)
        t1 = approx_optimal_ty(params)
        rows.append(dict(a_x=int(a_x), t_y_approx=t1, t_y_optimal=m, t_y_optimal_std=sd, abs_diff=abs(t1 - m),
                         trials=cfg["trials"]))
    return Table(["a_x", "t_y_approx", "t_y_optimal", "t_y_optimal_std", "abs_diff", "trials"], rows)


def run_axr_average(cfg: dict) -> Table:
    values = cfg.get("values") or list(range(10, cfg["n_y"], 10))
    rows = []
    for model in _models(cfg):
        params = _params(cfg, model)
        profs = profiles(params, cfg["seed"], cfg["trials"], workers=cfg["workers"])
        for a_y in values:
            chosen = [int(p.chosen[a_y - 1]) for p in profs]
            err = [float(p.error[a_y - 1]) for p in profs]
            m, sd = _stats(chosen)
            rows.append(dict(model=model, a_y=int(a_y), a_x=params.a_x, axr=m, axr_std=sd,
                             error=float(np.mean(err)), trials=cfg["trials"]))
    return Table(["model", "a_y", "a_x", "axr", "axr_std", "error", "trials"], rows)


def _census_task(args):
    params, seed, trial, samples, policy = args
    w = random_weight_matrix(params.n_y, params.n_x, params.a_w, make_rng(seed, trial, 0))
    decoder = make_decoder(params, make_rng(seed, trial, 2))
    return cycle_census(w, params, samples, make_rng(seed, trial, 1), policy=policy, decoder=decoder)


def census_params(cfg: dict, model: str) -> ModelParams:
    base = _params(cfg, "threshold", hidden_control=1)
    base = base.replace(hidden_control=approx_optimal_ty(base))
    if model == "threshold":
        return base
    if model == "kwta":
        return matched_kwta_params(base)
    raise ValueError("attractor census covers the threshold and kwta models")


def run_attractor_census(cfg: dict) -> Table:
    samples = cfg.get("samples") or 10_000
    policies = [cfg.get("policy") or "fixed"] if cfg.get("policy") != "both" else ["fixed", "optimized"]
    rows, summary, bad = [], [], []
    for model in _models(cfg):
        params = census_params(cfg, model)
        for policy in policies:
            reports = pmap(_census_task, [(params, cfg["seed"], t, samples, policy) for t in range(cfg["trials"])],
                           cfg["workers"])
            frac, frac_sd = _stats([r.fraction_length_two for r in reports])
            longest = max((max(r.cycle_lengths()) for r in reports if r.histogram), default=0)
            rows.append(dict(model=model, policy=policy, control=params.hidden_control,
                             output_control=reports[0].output_control, samples=samples,
                             fraction_length_two=frac, fraction_length_two_std=frac_sd,
                             distinct_attractors=float(np.mean([r.distinct_attractors for r in reports])),
                             non_converged=int(sum(r.non_converged for r in reports)),
                             longest_cycle=int(longest),
                             max_transient=int(max((k[0] for r in reports for k in r.histogram), default=0)),
                             trials=cfg["trials"]))
            for t, r in enumerate(reports):
                for c in r.counterexamples:
                    bad.append(dict(model=model, policy=policy, trial=t, transient=c.transient_length,
                                    cycle_length_combined=c.cycle_length_combined, cycle=[str(s) for s in c.cycle]))
            summary.append(f"{model}/{policy}: {100 * frac:.4g}% of starts end in length-2 cycles")
    cols = ["model", "policy", "control", "output_control", "samples", "fraction_length_two",
            "fraction_length_two_std", "distinct_attractors", "non_converged", "longest_cycle", "max_transient",
            "trials"]
    return Table(cols, rows, summary, {"counterexamples": bad} if bad else {})


DRIVERS: dict[str, Callable[[dict], Table]] = {
    "sweep-sparsity": run_sweep_sparsity,
    "sweep-ratio": run_sweep_ratio,
    "sweep-ax": run_sweep_ax,
    "sweep-aw": run_sweep_aw,
    "mi-curve": run_mi_curve,
    "map-curve": run_map_curve,
    "analytic-compare": run_analytic_compare,
    "threshold-approx": run_threshold_approx,
    "attractor-census": run_attractor_census,
    "weights-comparison": run_weights_comparison,
    "axr-average": run_axr_average,
}


def resolve_config(experiment: str, **overrides) -> dict:
    """Experiment defaults with ``None``-valued overrides ignored."""
    if experiment not in DRIVERS:
        raise ValueError(f"unknown experiment {experiment!r}")
    cfg = dict(DEFAULTS[experiment], seed=0, workers=1, decoder="transpose")
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    cfg["experiment"] = experiment
    if cfg["trials"] < 1:
        raise ValueError("trials must be >= 1")
    if cfg["workers"] < 1:
        raise ValueError("workers must be >= 1")
    if "values" in cfg and not cfg["values"]:
        raise ValueError("the sweep range is empty")
    if not _models(cfg):
        raise ValueError("no model given")
    for m in _models(cfg):
        _params(cfg, m)
    return cfg


def run_experiment(experiment: str, **overrides) -> tuple[dict, Table]:
    cfg = resolve_config(experiment, **overrides)
    return cfg, DRIVERS[experiment](cfg)
