import numpy as np
import pytest

from binae.attractors import (
    StepMap,
    cycle_census,
    default_output_control,
    iterate_to_cycle,
    matched_kwta_params,
)
from binae.binvec import BinaryVector, WeightMatrix, make_rng, random_weight_matrix
from binae.models import ModelParams, decode_kwta, encode_kwta

P = ModelParams(20, 40, 8, 6, "kwta", 10)


def _w(seed=0):
    return random_weight_matrix(40, 20, 6, seed)


def test_fixed_point_has_zero_transient():
    w = _w()
    x = BinaryVector.from_bits(make_rng(1).permutation(np.r_[np.ones(8), np.zeros(12)]).astype(np.uint8))
    # run to the attractor, then restart from it
    r = iterate_to_cycle(w, P, x)
    start = r.cycle[0]
    again = iterate_to_cycle(w, P, start)
    assert again.transient_length == 0
    assert set(again.cycle) == set(r.cycle)
    if r.cycle_states_x == 1:
        assert decode_kwta(w, encode_kwta(w, start, 10), 8) == start
        assert again.cycle_length_combined == 2


def test_constant_decoder_output_is_reached_in_one_step():
    # every column identical: v is constant, so kwta picks the first a_x^r positions
    w = WeightMatrix(np.ones((40, 20), dtype=np.uint8))
    x = BinaryVector.from_indices(20, [15, 16, 17, 18, 19, 1, 2, 3])
    r = iterate_to_cycle(w, P.replace(a_w=20), x)
    assert r.transient_length <= 1 and r.cycle_states_x == 1
    assert r.cycle[0].indices().tolist() == list(range(8))


@pytest.mark.parametrize("seed", range(3))
def test_cycles_are_valid_and_basins_partition(seed):
    w = _w(seed)
    census = cycle_census(w, P, 300, seed=seed)
    assert census.n_samples == 300 and census.non_converged == 0
    step = StepMap(w, P)
    reports = [iterate_to_cycle(w, P, BinaryVector.from_bits(b), step=step)
               for b in (make_rng(seed, 9).random((40, 20)) < 0.4).astype(np.uint8)]
    cycles = {}
    for r in reports:
        states = np.stack([s.to_array() for s in r.cycle])
        cur = states[0]
        for _ in range(r.cycle_states_x):
            cur = step(cur[None, :])[0]
        assert np.array_equal(cur, states[0])
        assert r.cycle_length_combined % 2 == 0
        cycles.setdefault(r.attractor_key, set(r.cycle))
        assert cycles[r.attractor_key] == set(r.cycle)
    sets = list(cycles.values())
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            assert not sets[i] & sets[j]


def test_census_is_deterministic_and_empty_when_asked():
    w = _w(2)
    a = cycle_census(w, P, 200, seed=4)
    b = cycle_census(w, P, 200, seed=4)
    assert a.histogram == b.histogram and a.distinct_attractors == b.distinct_attractors
    empty = cycle_census(w, P, 0)
    assert empty.n_samples == 0 and not empty.histogram and empty.distinct_attractors == 0


def test_identity_like_local_code_makes_every_start_a_fixed_point():
    # hidden unit i copies input i; a_y = a_x = 1 gives x -> x for one-hot starts
    n = 12
    w = WeightMatrix(np.eye(n, dtype=np.uint8))
    p = ModelParams(n, n, 1, 1, "kwta", 1)
    starts = np.eye(n, dtype=np.uint8)
    census = cycle_census(w, p, 0, starts=starts)
    assert census.distinct_attractors == n
    assert census.histogram == {(0, 2): n}


def test_iteration_cap_reports_nonconvergence():
    w = _w(3)
    x = BinaryVector.from_indices(20, range(8))
    r = iterate_to_cycle(w, P, x, max_iter=1)
    assert r.converged or r.transient_length == 2
    with pytest.raises(ValueError):
        iterate_to_cycle(w, P, x, max_iter=0)


def test_policies_and_defaults():
    base = ModelParams(50, 150, 20, 30, "threshold", 13)
    assert default_output_control(base) >= 1
    assert default_output_control(P) == P.a_x
    kw = matched_kwta_params(base)
    assert kw.model_kind == "kwta" and 1 <= kw.hidden_control <= 150
    with pytest.raises(ValueError):
        StepMap(_w(), P, policy="greedy")
    with pytest.raises(ValueError):
        StepMap(_w(), P.replace(model_kind="bmp"))


def test_optimized_policy_is_also_deterministic():
    w = _w(5)
    a = cycle_census(w, P, 100, seed=1, policy="optimized")
    b = cycle_census(w, P, 100, seed=1, policy="optimized")
    assert a.histogram == b.histogram
