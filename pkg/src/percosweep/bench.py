"""Step-rate benchmark: up-steps, down-steps and full cycles per backend."""

from __future__ import annotations

import time
from dataclasses import dataclass

from .backend import available_backends, make_engine
from .sweep import critical_window


@dataclass
class BenchRow:
    L: int
    backend: str
    up_steps_per_s: float
    down_steps_per_s: float
    cycle_steps_per_s: float
    steps: int


def bench_one(L: int, cycles: int, backend: str, seed: int = 0) -> BenchRow:
    """Time the up and down phases of `cycles` window cycles at size L."""
    engine = make_engine(L, seed=seed, backend=backend)
    n_lo, n_hi = critical_window(L)
    width = n_hi - n_lo
    engine.sweep_up_to(n_lo)
    # one unmeasured warm-up cycle
    engine.sweep_up_to(n_hi)
    engine.sweep_down_to(n_lo)
    up_time = 0.0
    down_time = 0.0
    for _ in range(cycles):
        t0 = time.perf_counter()
        engine.sweep_up_to(n_hi)
        t1 = time.perf_counter()
        engine.sweep_down_to(n_lo)
        t2 = time.perf_counter()
        up_time += t1 - t0
        down_time += t2 - t1
    steps = 2 * width * cycles
    return BenchRow(
        L=L,
        backend=backend,
        up_steps_per_s=width * cycles / up_time if up_time > 0 else float("inf"),
        down_steps_per_s=width * cycles / down_time if down_time > 0 else float("inf"),
        cycle_steps_per_s=steps / (up_time + down_time) if up_time + down_time > 0 else float("inf"),
        steps=steps,
    )


def run_bench(sizes, cycles: int, backend: str = "auto", seed: int = 0):
    if cycles <= 0:
        return []
    if backend == "both":
        backends = available_backends()
    else:
        backends = (backend,)
    rows = []
    for L in sizes:
        for b in backends:
            rows.append(bench_one(L, cycles, b, seed))
    return rows


def bench_csv(rows) -> str:
    lines = ["L,backend,up_steps_per_s,down_steps_per_s,cycle_steps_per_s,steps"]
    for r in rows:
        lines.append(f"{r.L},{r.backend},{r.up_steps_per_s:.6g},"
                     f"{r.down_steps_per_s:.6g},{r.cycle_steps_per_s:.6g},{r.steps}")
    return "\n".join(lines) + "\n"
