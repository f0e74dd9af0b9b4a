"""Picker, Monte Carlo stepping, sweep cadence, and decorrelation."""

import math
import random
from itertools import combinations

import numpy as np
import pytest

from percosweep.backend import available_backends, make_engine
from percosweep.oracle import bfs_partition_sites
from percosweep.rng import MT19937, RngStream
from percosweep.sweep import (
    PythonEngine,
    SitePicker,
    SweepCounters,
    SweepPlan,
    batch_means_tau,
    critical_window,
    estimate_decorrelation,
    mc_step,
    record_sample,
    run_sweeps,
)

BACKENDS = available_backends()


def test_picker_forced_choice():
    picker = SitePicker(4)
    for s in (0, 1, 2):
        picker.mark_occupied(s)
    assert picker.pick_unoccupied(MT19937(1)) == 3
    assert picker.k == 4
    with pytest.raises(ValueError):
        picker.pick_unoccupied(MT19937(1))


def test_picker_empty_error():
    picker = SitePicker(4)
    with pytest.raises(ValueError):
        picker.pick_occupied(MT19937(1))


def test_picker_partition_tracks_marks():
    rng = random.Random(3)
    picker = SitePicker(30)
    occupied = set()
    for _ in range(2000):
        if occupied and rng.random() < 0.5:
            s = rng.choice(sorted(occupied))
            picker.mark_unoccupied(s)
            occupied.discard(s)
        elif len(occupied) < 30:
            s = rng.choice([t for t in range(30) if t not in occupied])
            picker.mark_occupied(s)
            occupied.add(s)
        assert picker.k == len(occupied)
        assert set(picker.perm[:picker.k]) == occupied


def test_pick_unoccupied_uniform_chi_square():
    # frozen example: N=4 empty, 1e6 trials, each site within 4 sigma of 1/4
    gen = MT19937(777)
    counts = [0, 0, 0, 0]
    trials = 10**6
    for _ in range(trials):
        picker = SitePicker(4)
        counts[picker.pick_unoccupied(gen)] += 1
    sigma = math.sqrt(trials * 0.25 * 0.75)
    for c in counts:
        assert abs(c - trials / 4) < 4 * sigma


@pytest.mark.parametrize("backend", BACKENDS)
def test_mc_step_up_and_down(backend):
    eng = make_engine(4, seed=2, backend=backend)
    assert mc_step(eng, "up") == 1
    assert eng.tally()[0] == 1
    assert mc_step(eng, "down") == 0
    with pytest.raises(ValueError):
        mc_step(eng, "sideways")


@pytest.mark.parametrize("backend", BACKENDS)
def test_step_down_from_full_matches_bfs(backend):
    eng = make_engine(2, seed=4, backend=backend)
    eng.sweep_up_to(4)
    eng.step_down()
    part = bfs_partition_sites(2, eng.occupied_sites())
    labels = {s: eng.component_label(s) for s in eng.occupied_sites()}
    assert len(set(labels.values())) == part.component_count()


def test_alternating_steps_preserve_uniform_law():
    # L=2 at n=2: after many up/down pairs every configuration stays
    # equally likely (chi-square over the 6 two-site configurations)
    eng = make_engine(2, seed=31, backend=BACKENDS[0])
    eng.step_up()
    eng.step_up()
    configs = {frozenset(c): 0 for c in combinations(range(4), 2)}
    pairs = 60000
    for _ in range(pairs):
        eng.step_up()
        eng.step_down()
        configs[frozenset(eng.occupied_sites())] += 1
    e = pairs / 6
    stat = sum((c - e) ** 2 / e for c in configs.values())
    # chi-square with 5 dof: 4-sigma tail is at about 28.4
    assert stat < 28.4, configs


def test_record_sample_cases():
    eng = PythonEngine(4, RngStream(seed=1))
    counters = SweepCounters.zeros(4, 0, 16)
    record_sample(counters, eng)
    assert counters.s0[0] == 1 and counters.s1[0] == 0 and counters.s2[0] == 0
    for x in range(4):
        eng.occupy_site(1 * 4 + x)  # spanning row
    record_sample(counters, eng)
    assert counters.s1[4] == 1 and counters.s2[4] == 0
    for s in range(16):
        if not eng.is_occupied(s):
            eng.occupy_site(s)
    record_sample(counters, eng)
    assert counters.s0[16] == counters.s1[16] == counters.s2[16] == 1


def test_record_sample_outside_window_ignored():
    eng = PythonEngine(4, RngStream(seed=1))
    counters = SweepCounters.zeros(4, 5, 10)
    record_sample(counters, eng)  # n=0 outside the window
    assert counters.s0.sum() == 0


@pytest.mark.parametrize("backend", BACKENDS)
def test_window_cadence_sample_count(backend):
    # window [1, 3] on L=2: one cycle records 2 up + 2 down = 4 samples,
    # each turning point once per visit
    eng = make_engine(2, seed=6, backend=backend)
    plan = SweepPlan(mode="window", n_lo=1, n_hi=3, cycles=1, discard_cycles=0)
    counters, _ = run_sweeps(plan, eng)
    assert counters.s0.sum() == 4
    assert list(counters.s0) == [1, 2, 1]
    assert counters.steps == 4


@pytest.mark.parametrize("backend", BACKENDS)
def test_cycle_reversibility(backend):
    eng = make_engine(6, seed=8, backend=backend)
    plan = SweepPlan(mode="window", n_lo=7, n_hi=20, cycles=5, discard_cycles=0)
    counters, _ = run_sweeps(plan, eng)
    assert eng.n == 7
    assert len(eng.occupied_sites()) == 7
    counters.validate()  # s2 <= s1 <= s0


@pytest.mark.parametrize("backend", BACKENDS)
def test_selforg_turns_on_spanning(backend):
    eng = make_engine(5, seed=44, backend=backend)
    plan = SweepPlan(mode="selforg", cycles=20)
    counters, _ = run_sweeps(plan, eng)
    assert not eng.spans(1)  # down phase ends just below spanning
    assert counters.s0.sum() == counters.steps
    counters.validate()
    # some visited level must actually have spanned
    assert counters.s1.sum() > 0


def test_sweep_plan_validation():
    plan = SweepPlan(mode="window", n_lo=10, n_hi=5, cycles=1)
    with pytest.raises(ValueError):
        plan.validate(100)
    SweepPlan(mode="window", n_lo=2474000, n_hi=2498000, cycles=1).validate(2048 * 2048)
    SweepPlan(mode="window", n_lo=2485700, n_hi=2486700, cycles=1).validate(2048 * 2048)
    with pytest.raises(ValueError):
        SweepPlan(mode="bogus", cycles=1).validate(100)


def test_critical_window_scaling():
    n_lo, n_hi = critical_window(64)
    assert 0 <= n_lo < n_hi <= 4096
    width_64 = n_hi - n_lo
    n_lo2, n_hi2 = critical_window(128)
    # width scales as N * L^(-3/4) = L^(5/4): doubling L scales by 2^1.25
    assert (n_hi2 - n_lo2) / width_64 == pytest.approx(2 ** 1.25, rel=0.02)


def test_counters_merge_and_trim():
    a = SweepCounters.zeros(4, 2, 6)
    b = SweepCounters.zeros(4, 2, 6)
    a.record(3, True, False)
    b.record(3, True, True)
    b.record(5, False, False)
    m = a.merge(b)
    assert m.s0[1] == 2 and m.s1[1] == 2 and m.s2[1] == 1
    t = m.trimmed()
    assert (t.n_lo, t.n_hi) == (3, 5)
    with pytest.raises(ValueError):
        a.merge(SweepCounters.zeros(4, 0, 6))


def test_decorrelation_iid_trace():
    rng = np.random.default_rng(1)
    trace = (rng.random(200000) < 0.4).astype(np.int8)
    est = estimate_decorrelation(trace)
    assert est.reliable
    assert est.tau == pytest.approx(0.5, rel=0.10)


def test_decorrelation_doubles_for_duplicated_trace():
    rng = np.random.default_rng(2)
    base = (rng.random(100000) < 0.5).astype(np.int8)
    doubled = np.repeat(base, 2)
    t1 = estimate_decorrelation(base).tau
    t2 = estimate_decorrelation(doubled).tau
    assert t2 == pytest.approx(2.0 * t1, rel=0.15)


def test_decorrelation_short_or_constant_is_unreliable():
    assert not estimate_decorrelation([1, 0, 1]).reliable
    assert not estimate_decorrelation([1] * 1000).reliable


def test_batch_means_tau_iid():
    rng = np.random.default_rng(3)
    trace = (rng.random(100000) < 0.5).astype(np.int8)
    assert batch_means_tau(trace) == pytest.approx(0.5, rel=0.5)
