"""Acceptance criteria for the artifact, one test per criterion.

Each test enforces its stated tolerance and prints a PASS line with the
measured numbers (run with -s or -v to see them).  The suite uses the
fastest available backend; backend equivalence is covered separately.
"""

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from click.testing import CliRunner

import percosweep.cli as cli
from percosweep.analysis import CrossingCriterion, SpanningCurve, crossing_target, estimate_pc
from percosweep.backend import backend_name, make_engine
from percosweep.bench import run_bench
from percosweep.checkpoint import format_checkpoint
from percosweep.cli import RunConfig, run_config
from percosweep.dynamic_graph import GraphArena
from percosweep.oracle import exhaustive_spanning_counts, spanning_census
from percosweep.rng import MT19937
from percosweep.sweep import SweepCounters, estimate_decorrelation
from percosweep.verify import FOUR_SIGMA_P, uniformity_chi_square

PC_REFERENCE = 0.5927460  # published square site percolation threshold


def report(name: str, detail: str) -> None:
    print(f"\nACCEPTANCE PASS {name}: {detail}")


def test_acceptance_oracle_equivalence():
    """10^5 mixed steps on L=16 with a full BFS re-check every 100 steps."""
    engine = make_engine(16, seed=2024, backend="auto")
    driver = random.Random(161616)
    N = engine.N
    checks = 0
    for step in range(100_000):
        n = engine.n
        if n == 0 or (n < N and driver.random() < 0.5):
            engine.step_up()
        else:
            engine.step_down()
        if (step + 1) % 100 == 0:
            census, part = spanning_census(16, engine.occupied_sites())
            assert census == engine.tally(), f"tally mismatch at step {step + 1}"
            groups = {}
            for s in engine.occupied_sites():
                groups.setdefault(engine.component_label(s), set()).add(s)
            assert set(map(frozenset, groups.values())) == \
                set(map(frozenset, part.groups().values())), f"partition at step {step + 1}"
            for s in engine.occupied_sites():
                lab = part.label_of[s]
                stats = engine.cluster_stats(s)
                assert stats[0] == part.orders[lab]
                assert stats[1:] == part.boundary_counts[lab]
            checks += 1
    report("oracle-equivalence",
           f"10^5 steps on L=16, {checks} BFS re-checks, zero discrepancies "
           f"({backend_name()} backend)")


def _mc_vs_exhaustive(L: int, cycles: int, batches: int, seed: int):
    N = L * L
    exact = {}
    for n in range(N + 1):
        s0, s1, s2 = exhaustive_spanning_counts(L, n)
        exact[n] = Fraction(s1 + s2, 2 * s0)
    engine = make_engine(L, seed=seed, backend="auto")
    batch_counters = []
    per_batch = cycles // batches
    for _ in range(batches):
        c = SweepCounters.zeros(L, 0, N)
        engine.run_window(0, N, per_batch, c)
        batch_counters.append(c)
    total = batch_counters[0]
    for c in batch_counters[1:]:
        total = total.merge(c)
    worst_z = 0.0
    for n in range(N + 1):
        i = n
        assert total.s0[i] >= 10**6, f"n={n}: only {total.s0[i]} samples"
        r_hat = (total.s1[i] + total.s2[i]) / (2.0 * total.s0[i])
        ex = float(exact[n])
        if exact[n] == 0:
            assert total.s1[i] == 0 and total.s2[i] == 0, f"n={n}: impossible spanning seen"
            continue
        if exact[n] == 1:
            assert total.s1[i] == total.s0[i] == total.s2[i] + (total.s0[i] - total.s2[i])
            assert total.s1[i] == total.s0[i] and total.s2[i] == total.s0[i], \
                f"n={n}: full lattice must span both dimensions"
            continue
        batch_r = np.array([(c.s1[i] + c.s2[i]) / (2.0 * c.s0[i]) for c in batch_counters])
        sigma = batch_r.std(ddof=1) / math.sqrt(batches)
        assert sigma > 0, f"n={n}: degenerate batch spread"
        z = abs(r_hat - ex) / sigma
        worst_z = max(worst_z, z)
        assert z <= 4.0, f"L={L} n={n}: R={r_hat:.6f} vs exact {ex:.6f}, z={z:.2f}"
    return worst_z


def test_acceptance_exhaustive_correctness():
    """MC spanning probabilities match full enumeration for L=2 and L=3."""
    z2 = _mc_vs_exhaustive(2, cycles=10**6, batches=100, seed=22)
    z3 = _mc_vs_exhaustive(3, cycles=10**6, batches=100, seed=33)
    report("exhaustive-correctness",
           f">=10^6 samples per n; worst |z| = {max(z2, z3):.2f} (L=2: {z2:.2f}, "
           f"L=3: {z3:.2f}), all within 4 sigma of exact enumeration")


def test_acceptance_uniform_visitation():
    """Configurations at each n are visited equally often (L=2, 10^6 cycles)."""
    results = uniformity_chi_square(cycles=10**6, seed=515, backend="auto")
    for n, stat, dof, p in results:
        assert p >= FOUR_SIGMA_P, f"n={n}: chi2={stat:.1f} (dof {dof}), p={p:.2g}"
    detail = ", ".join(f"n={n}: p={p:.3f}" for n, _, _, p in results)
    report("uniform-visitation", f"10^6 cycles on L=2 window [0,4]; {detail}")


def test_acceptance_desk_scale_threshold():
    """L=64 auto-window run reproduces the published threshold within 1e-3."""
    cfg = RunConfig(L=64, auto_window=True, cycles=20_000, seed=4001,
                    rng_kind="mt19937", backend="auto")
    result = run_config(cfg)
    decorr = estimate_decorrelation(result.trace)
    tau = max(decorr.tau, 0.5)
    curve = SpanningCurve.from_counters(result.counters, tau=tau)
    est = estimate_pc(curve, CrossingCriterion(), counters=result.counters)
    deviation = abs(est.pc - PC_REFERENCE)
    assert deviation <= 1e-3, f"pc={est.pc:.7f} deviates {deviation:.2g} > 1e-3"
    assert deviation <= 4.0 * est.total_err, \
        f"deviation {deviation:.3g} inconsistent with reported error {est.total_err:.3g}"
    report("desk-scale-threshold",
           f"pc = {est.pc:.7f} (ref {PC_REFERENCE}), deviation {deviation:.2g}, "
           f"stat err {est.stat_err:.2g}, tau {tau:.2f}, "
           f"{result.counters.cycles} cycles")


def test_acceptance_crossing_target_arithmetic():
    """Finite-size target at L=2048 equals the quoted value exactly."""
    target, err = crossing_target(2048)
    assert target == pytest.approx(0.50015625, abs=1e-15)
    assert err == pytest.approx(0.001 / 2048, rel=1e-12)
    assert f"{err:.8f}" == "0.00000049"
    report("crossing-target", f"0.5 + 0.320/2048 = {target!r} +- {err:.3g}")


def test_acceptance_synthetic_paper_replay(tmp_path):
    """The three published R values fed to cmd_estimate recover the threshold."""
    c = SweepCounters.zeros(2048, 2486156, 2486158)
    s0 = 516_500_000  # gives the published 2.2e-5 standard errors
    for i, r in enumerate((0.500097, 0.500153, 0.500209)):
        c.s0[i] = s0
        c.s1[i] = s0
        c.s2[i] = round(2 * s0 * r) - s0
    ckpt = tmp_path / "published.ckpt"
    ckpt.write_text(format_checkpoint(c))
    res = CliRunner().invoke(cli.main, ["estimate", str(ckpt)], catch_exceptions=False)
    assert res.exit_code == 0
    footer = [ln for ln in res.output.splitlines() if ln.startswith("# pc=")][0]
    pc = float(footer.split()[1].split("=")[1])
    assert abs(pc - PC_REFERENCE) <= 2e-7, footer
    report("synthetic-paper-replay", f"cmd_estimate -> pc = {pc:.9f} "
           f"(|delta| = {abs(pc - PC_REFERENCE):.2g} <= 2e-7)")


def test_acceptance_rng_bit_exactness():
    """MT19937 matches an independent reference on 10^4 outputs for 3+ seeds."""
    seeds = (5489, 1, 20061226, 4294967295)
    for seed in seeds:
        ref = np.random.RandomState(seed)._bit_generator.random_raw(10_000)
        assert (MT19937(seed).words(10_000) == ref).all(), f"seed {seed}"
    words = MT19937(5489).words(10_000)
    assert int(words[-1]) == 4123659995
    report("rng-bit-exactness",
           f"{len(seeds)} seeds x 10^4 words match numpy's reference MT19937; "
           f"10000th output after seed 5489 = {int(words[-1])}")


def test_acceptance_early_termination():
    """Across 10^4 random deletions the host tree is never rebuilt."""
    rng = random.Random(90210)
    preserved = 0
    for trial in range(10_000):
        g = GraphArena()
        n = rng.randrange(3, 36)
        vs = [g.create_vertex() for _ in range(n)]
        for i in range(1, n):
            g.insert_edge(vs[i], vs[rng.randrange(i)])
        extra = rng.randrange(0, 4)
        for _ in range(extra):
            a, b = rng.sample(vs, 2)
            if not g.has_edge(a, b):
                g.insert_edge(a, b)
        victim = rng.choice(vs)
        host = g.find_root(victim)
        order_before = g.root_order(host)
        rep = g.remove_vertex(victim)
        if order_before > 1:
            assert rep.host_root == host, f"trial {trial}: host root handle changed"
            assert rep.roots[-1] == host
            assert g.is_root(host)
            assert rep.extracted == len(rep.roots) - 1, \
                f"trial {trial}: {rep.extracted} extractions for {len(rep.roots)} fragments"
            preserved += 1
        assert g.live_clumps == 0
    report("early-termination",
           f"10^4 random deletions; host root preserved in all {preserved} "
           f"applicable trials; extracted clumps = fragments - 1 throughout")


def test_acceptance_determinism(tmp_path):
    """Identical (config, seed) produces byte-identical checkpoints."""
    args = ["sweep", "--size", "32", "--auto-window", "--cycles", "60",
            "--seed", "777", "--out"]
    a, b = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    for path in (a, b):
        res = CliRunner().invoke(cli.main, args + [str(path)], catch_exceptions=False)
        assert res.exit_code == 0
    ta, tb = a.read_text(), b.read_text()
    strip = lambda t: [ln for ln in t.splitlines() if not ln.startswith("# walltime")]
    assert strip(ta) == strip(tb), "checkpoints differ beyond the timing field"
    diff = [i for i, (x, y) in enumerate(zip(ta.splitlines(), tb.splitlines())) if x != y]
    assert all(ta.splitlines()[i].startswith("# walltime") for i in diff)
    report("determinism", "two identical runs byte-identical (timing comment aside)")


def test_acceptance_performance_sanity():
    """Amortized step cost grows sublinearly in N = L^2 across sizes."""
    sizes = [32, 64, 128, 256]
    rows = run_bench(sizes, cycles=4, backend="auto", seed=7)
    cost = {r.L: 1.0 / r.cycle_steps_per_s for r in rows}
    lines = []
    for r in rows:
        lines.append(f"L={r.L}: {r.cycle_steps_per_s:,.0f} steps/s "
                     f"(up {r.up_steps_per_s:,.0f}, down {r.down_steps_per_s:,.0f})")
    for small, big in zip(sizes, sizes[1:]):
        n_ratio = (big * big) / (small * small)
        cost_ratio = cost[big] / cost[small]
        assert cost_ratio < n_ratio, \
            f"step cost ratio {cost_ratio:.2f} from L={small} to L={big} " \
            f"is not sublinear in N (ratio {n_ratio:.0f})"
    overall = cost[256] / cost[32]
    assert overall < 64.0
    report("performance-sanity",
           f"cost({sizes[-1]})/cost({sizes[0]}) = {overall:.2f} << N ratio 64; " +
           "; ".join(lines))
