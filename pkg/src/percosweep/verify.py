"""Self-check suites behind the `verify` CLI command and the test suite.

Each suite pits the engine against an independent oracle: random graph
operations against BFS repartitioning, the incremental spanning tally
against a full census re-scan, configuration visit frequencies against the
equal-visitation premise, and the generators against reference outputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .backend import make_engine
from .dynamic_graph import GraphArena
from .oracle import bfs_partition_arena, spanning_census
from .rng import MT19937, bounded_uniform
from .sweep import SweepPlan, run_sweeps

# two-sided tail probability of |z| > 4; chi-square tests fail below this
FOUR_SIGMA_P = 6.3342e-5


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


# -- rng suite ---------------------------------------------------------------


def _reference_mt19937(seed: int, count: int):
    """Plain-loop MT19937 coded separately from the production generator."""
    mt = [0] * 624
    mt[0] = seed & 0xFFFFFFFF
    for i in range(1, 624):
        mt[i] = (1812433253 * (mt[i - 1] ^ (mt[i - 1] >> 30)) + i) & 0xFFFFFFFF
    mti = 624
    out = []
    for _ in range(count):
        if mti >= 624:
            for i in range(624):
                y = (mt[i] & 0x80000000) | (mt[(i + 1) % 624] & 0x7FFFFFFF)
                mt[i] = mt[(i + 397) % 624] ^ (y >> 1) ^ (0x9908B0DF if y & 1 else 0)
            mti = 0
        y = mt[mti]
        mti += 1
        y ^= y >> 11
        y ^= (y << 7) & 0x9D2C5680
        y ^= (y << 15) & 0xEFC60000
        y ^= y >> 18
        out.append(y & 0xFFFFFFFF)
    return out


def suite_rng(words: int = 10000, seeds=(5489, 0, 20061226)) -> SuiteResult:
    for seed in seeds:
        got = list(MT19937(seed).words(words))
        want = _reference_mt19937(seed, words)
        if got != want:
            return SuiteResult("rng", False,
                               f"MT19937 output diverges from reference for seed {seed}")
    tenthousandth = _reference_mt19937(5489, 10000)[-1]
    if tenthousandth != 4123659995 or MT19937(5489).words(10000)[-1] != 4123659995:
        return SuiteResult("rng", False, "canonical 10000th output after seed 5489 wrong")
    # bounded draws: exact uniformity over m=3
    gen = MT19937(99)
    draws = 3 * 10**5
    counts = [0, 0, 0]
    for _ in range(draws):
        counts[bounded_uniform(gen, 3)] += 1
    e = draws / 3.0
    stat = sum((c - e) ** 2 / e for c in counts)
    p = float(chi2.sf(stat, 2))
    if p < FOUR_SIGMA_P:
        return SuiteResult("rng", False, f"bounded_uniform chi-square failed (p={p:.2g})")
    return SuiteResult("rng", True,
                       f"{len(seeds)} seeds x {words} words bit-exact; chi2 p={p:.3f}")


# -- dynamic graph vs BFS oracle ------------------------------------------------


def _partition_matches(arena: GraphArena) -> str | None:
    part = bfs_partition_arena(arena)
    by_root = {}
    for v in arena.vertices():
        by_root.setdefault(arena.find_root(v), set()).add(v)
    eng_groups = set(frozenset(g) for g in by_root.values())
    bfs_groups = set(frozenset(g) for g in part.groups().values())
    if eng_groups != bfs_groups:
        return "component partition mismatch"
    for r, grp in by_root.items():
        lab = min(grp)
        if arena.root_order(r) != part.orders[lab]:
            return f"order mismatch at root {r}"
        if arena.root_boundary_counts(r) != part.boundary_counts[lab]:
            return f"boundary counts mismatch at root {r}"
    if arena.live_clumps != 0:
        return "clump records outstanding after operations"
    return None


def suite_oracle_equivalence(ops: int = 20000, vertices: int = 300,
                             seed: int = 1, checks: int = 50) -> SuiteResult:
    rng = random.Random(seed)
    arena = GraphArena()
    alive = []
    alive_pos = {}
    edge_list = []  # list + index map for O(1) random removal
    edge_pos = {}

    def add_vertex():
        v = arena.create_vertex(rng.randrange(16))
        alive_pos[v] = len(alive)
        alive.append(v)

    def drop_vertex(v):
        j = alive_pos.pop(v)
        last = alive.pop()
        if last != v:
            alive[j] = last
            alive_pos[last] = j
        for u in arena.neighbors(v):
            drop_edge((min(u, v), max(u, v)))

    def add_edge(e):
        edge_pos[e] = len(edge_list)
        edge_list.append(e)

    def drop_edge(e):
        j = edge_pos.pop(e)
        last = edge_list.pop()
        if last != e:
            edge_list[j] = last
            edge_pos[last] = j

    every = max(1, ops // checks)
    for step in range(ops):
        roll = rng.random()
        if (roll < 0.3 and len(alive) < vertices) or len(alive) < 4:
            add_vertex()
        elif roll < 0.7:
            a, b = rng.sample(alive, 2)
            if not arena.has_edge(a, b):
                arena.insert_edge(a, b)
                add_edge((min(a, b), max(a, b)))
        elif roll < 0.88 and edge_list:
            e = edge_list[rng.randrange(len(edge_list))]
            drop_edge(e)
            arena.remove_edge(*e)
        else:
            v = alive[rng.randrange(len(alive))]
            drop_vertex(v)
            arena.remove_vertex(v)
        if step % every == 0:
            problem = _partition_matches(arena)
            if problem:
                return SuiteResult("oracle-equivalence", False, f"step {step}: {problem}")
    problem = _partition_matches(arena)
    if problem:
        return SuiteResult("oracle-equivalence", False, problem)
    return SuiteResult("oracle-equivalence", True,
                       f"{ops} mixed ops on <= {vertices} vertices, BFS agrees")


# -- lattice tally vs census -----------------------------------------------------


def _census_matches(engine) -> str | None:
    census, part = spanning_census(engine.L, engine.occupied_sites())
    if census != engine.tally():
        return f"tally {engine.tally()} != census {census}"
    by_label = {}
    for s in engine.occupied_sites():
        by_label.setdefault(engine.component_label(s), set()).add(s)
    if set(map(frozenset, by_label.values())) != set(map(frozenset, part.groups().values())):
        return "cluster partition mismatch"
    for s in engine.occupied_sites():
        stats = engine.cluster_stats(s)
        lab = part.label_of[s]
        if stats[0] != part.orders[lab] or stats[1:] != part.boundary_counts[lab]:
            return f"cluster stats mismatch at site {s}"
    return None


def suite_tally_census(L: int = 16, steps: int = 10000, seed: int = 2,
                       backend: str = "auto", check_every: int = 100,
                       engine=None) -> SuiteResult:
    if engine is None:
        engine = make_engine(L, seed=seed, backend=backend)
    driver = random.Random(seed + 1)
    N = engine.N
    for step in range(steps):
        n = engine.n
        if n == 0 or (n < N and driver.random() < 0.5):
            engine.step_up()
        else:
            engine.step_down()
        if step % check_every == 0:
            problem = _census_matches(engine)
            if problem:
                return SuiteResult("tally-census", False, f"step {step}: {problem}")
    problem = _census_matches(engine)
    if problem:
        return SuiteResult("tally-census", False, problem)
    return SuiteResult("tally-census", True,
                       f"{steps} random steps on L={L}, census re-scan agrees")


# -- uniform visitation -----------------------------------------------------------


def uniformity_chi_square(cycles: int = 20000, seed: int = 3,
                          backend: str = "auto"):
    """Visit-frequency chi-square per occupation level on the 2x2 lattice.

    Returns a list of (n, chi2_stat, dof, p_value) for n with >1 config.
    """
    engine = make_engine(2, seed=seed, backend=backend)
    hist = np.zeros(16, dtype=np.int64)
    plan = SweepPlan(mode="window", n_lo=0, n_hi=4, cycles=cycles, discard_cycles=1)
    run_sweeps(plan, engine, config_hist=hist)
    results = []
    for n in (1, 2, 3):
        masks = [m for m in range(16) if bin(m).count("1") == n]
        counts = hist[masks]
        e = counts.sum() / len(masks)
        stat = float(((counts - e) ** 2 / e).sum())
        dof = len(masks) - 1
        results.append((n, stat, dof, float(chi2.sf(stat, dof))))
    return results


def suite_uniformity(cycles: int = 20000, seed: int = 3, backend: str = "auto") -> SuiteResult:
    results = uniformity_chi_square(cycles, seed, backend)
    worst = min(r[3] for r in results)
    if worst < FOUR_SIGMA_P:
        bad = [r for r in results if r[3] < FOUR_SIGMA_P]
        return SuiteResult("uniformity", False,
                           f"visit frequencies non-uniform at n={[r[0] for r in bad]}")
    return SuiteResult("uniformity", True,
                       f"L=2 config visits uniform over {cycles} cycles "
                       f"(worst p={worst:.3f})")


def run_verify(ops: int = 20000, vertices: int = 300, steps: int = 10000,
               cycles: int = 20000, seed: int = 1, backend: str = "auto"):
    return [
        suite_rng(),
        suite_oracle_equivalence(ops=ops, vertices=vertices, seed=seed),
        suite_tally_census(steps=steps, seed=seed, backend=backend),
        suite_uniformity(cycles=cycles, seed=seed, backend=backend),
    ]
