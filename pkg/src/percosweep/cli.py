"""Command line front end.

Exit codes: 0 success, 2 usage error, 3 verification failure, 4 no crossing
found by `estimate`, 130 interrupted.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field

import click

from .analysis import (
    DEFAULT_B,
    DEFAULT_B_ERR,
    CrossingCriterion,
    NoCrossingError,
    SpanningCurve,
    curve_csv,
    estimate_pc,
)
from .backend import backend_name, make_engine
from .bench import bench_csv, run_bench
from .checkpoint import format_checkpoint, merge_checkpoints, read_checkpoint, write_checkpoint
from .sweep import (
    DEFAULT_CENTER_P,
    DEFAULT_WINDOW_SCALE,
    SweepCounters,
    batch_means_tau,
    critical_window,
    estimate_decorrelation,
)
from .verify import run_verify

EXIT_VERIFY_FAILED = 3
EXIT_NO_CROSSING = 4


@dataclass
class RunConfig:
    """Everything one sweep run needs; mirrors the `sweep` command flags."""

    L: int
    mode: str = "window"
    n_lo: int | None = None
    n_hi: int | None = None
    auto_window: bool = False
    center_p: float = DEFAULT_CENTER_P
    window_scale: float = DEFAULT_WINDOW_SCALE
    cycles: int = 100
    discard_cycles: int = 1
    seed: int = 0
    rng_kind: str = "mt19937"
    pairing: str = "single"
    decimation: int = 2
    shards: int = 1
    backend: str = "auto"
    out: str | None = None
    checkpoint_interval: int = 0

    def resolve_window(self):
        if self.mode == "selforg":
            return None
        if self.auto_window:
            return critical_window(self.L, self.center_p, self.window_scale)
        if self.n_lo is None or self.n_hi is None:
            raise ValueError("window mode needs --n-min and --n-max (or --auto-window)")
        N = self.L * self.L
        if not (0 <= self.n_lo < self.n_hi <= N):
            raise ValueError(f"invalid window [{self.n_lo}, {self.n_hi}] for N={N}")
        return self.n_lo, self.n_hi


@dataclass
class RunResult:
    counters: SweepCounters
    manifest: dict
    trace: list = field(default_factory=list)


def _shard_cycles(total: int, shards: int):
    base, rem = divmod(total, shards)
    return [base + (1 if i < rem else 0) for i in range(shards)]


def run_config(cfg: RunConfig) -> RunResult:
    """Run the sweeps described by cfg (shards sequentially) and merge."""
    if cfg.shards < 1:
        raise ValueError("shards must be >= 1")
    if cfg.cycles < 0 or cfg.discard_cycles < 0:
        raise ValueError("cycle counts must be nonnegative")
    window = cfg.resolve_window()
    N = cfg.L * cfg.L
    t0 = time.perf_counter()
    done: SweepCounters | None = None
    trace: list = []
    interrupted = False
    for shard, shard_cycles in enumerate(_shard_cycles(cfg.cycles, cfg.shards)):
        if shard_cycles == 0:
            continue
        engine = make_engine(cfg.L, kind=cfg.rng_kind, seed=cfg.seed, shard=shard,
                             pairing=cfg.pairing, decimation=cfg.decimation,
                             backend=cfg.backend)
        if cfg.mode == "window":
            n_lo, n_hi = window
            current = SweepCounters.zeros(cfg.L, n_lo, n_hi)
        else:
            current = SweepCounters.zeros(cfg.L, 0, N)
        collect = shard == 0 and cfg.mode == "window"
        trace_n = (window[0] + window[1]) // 2 if cfg.mode == "window" else -1
        try:
            if cfg.mode == "window":
                engine.sweep_up_to(n_lo)
                if cfg.discard_cycles:
                    engine.run_window(n_lo, n_hi, cfg.discard_cycles, None)
            remaining = shard_cycles
            while remaining > 0:
                chunk = remaining
                if cfg.checkpoint_interval > 0:
                    chunk = min(chunk, cfg.checkpoint_interval)
                if cfg.mode == "window":
                    engine.run_window(n_lo, n_hi, chunk, current,
                                      trace=trace if collect else None, trace_n=trace_n)
                else:
                    engine.run_selforg(chunk, current)
                remaining -= chunk
                if cfg.checkpoint_interval > 0 and cfg.out and remaining > 0:
                    snapshot = done.merge(current) if done is not None else current
                    manifest = _manifest(cfg, snapshot, trace, time.perf_counter() - t0)
                    manifest["partial"] = "true"  # run still in progress
                    write_checkpoint(cfg.out, _final_counters(snapshot, cfg), manifest)
        except KeyboardInterrupt:
            current.partial = True
            interrupted = True
        done = current if done is None else done.merge(current)
        if interrupted:
            break
    if done is None:
        if cfg.mode == "window":
            done = SweepCounters.zeros(cfg.L, window[0], window[1])
        else:
            done = SweepCounters.zeros(cfg.L, 0, N)
    done = _final_counters(done, cfg)
    manifest = _manifest(cfg, done, trace, time.perf_counter() - t0)
    return RunResult(counters=done, manifest=manifest, trace=trace)


def _final_counters(counters: SweepCounters, cfg: RunConfig) -> SweepCounters:
    # self-organized counters cover only the observed range
    if cfg.mode == "selforg":
        trimmed = counters.trimmed()
        trimmed.partial = counters.partial
        return trimmed
    return counters


def _manifest(cfg: RunConfig, counters: SweepCounters, trace, walltime: float) -> dict:
    manifest = {
        "mode": cfg.mode,
        "rng": cfg.rng_kind,
        "pairing": cfg.pairing,
        "decimation": cfg.decimation,
        "seed": cfg.seed,
        "shards": cfg.shards,
        "cycles": counters.cycles,
        "discarded-cycles": cfg.discard_cycles * cfg.shards if cfg.mode == "window" else 0,
        "steps": counters.steps,
        "partial": "true" if counters.partial else "false",
        "walltime": f"{walltime:.3f}",
    }
    if trace:
        est = estimate_decorrelation(trace)
        manifest["tau-visits"] = f"{est.tau:.4f}" + ("" if est.reliable else " unreliable")
        if cfg.mode == "window":
            # ref level is visited twice per cycle, half a cycle apart
            gap = (counters.n_hi - counters.n_lo)
            manifest["tau-steps"] = f"{est.tau * gap:.1f}"
        bm = batch_means_tau(trace)
        if bm == bm:  # not NaN
            manifest["tau-batch-means"] = f"{bm:.4f}"
    return manifest


@click.group()
def main():
    """Bidirectional-sweep percolation threshold toolkit."""


@main.command("sweep")
@click.option("--size", "-L", "size", type=int, required=True, help="lattice side length")
@click.option("--mode", type=click.Choice(["window", "selforg"]), default="window",
              show_default=True, help="turning condition style")
@click.option("--n-min", type=int, default=None, help="lower turning point (window mode)")
@click.option("--n-max", type=int, default=None, help="upper turning point (window mode)")
@click.option("--auto-window", is_flag=True,
              help="window centered on p=0.5927 with width 4*N*L^(-3/4)")
@click.option("--center-p", type=float, default=DEFAULT_CENTER_P, show_default=True,
              help="auto-window center occupation probability")
@click.option("--window-scale", type=float, default=DEFAULT_WINDOW_SCALE, show_default=True,
              help="auto-window width in units of N*L^(-3/4)")
@click.option("--cycles", type=int, required=True, help="recorded up/down cycles")
@click.option("--discard", "discard_cycles", type=int, default=1, show_default=True,
              help="equilibration cycles discarded before recording")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--rng", "rng_kind", type=click.Choice(["mt19937", "lfg"]), default="mt19937",
              show_default=True)
@click.option("--pairing", type=click.Choice(["single", "xy"]), default="single",
              show_default=True, help="site selection from one stream or an x-y pair")
@click.option("--decimation", type=int, default=2, show_default=True,
              help="lagged-Fibonacci decimation factor")
@click.option("--shards", type=int, default=1, show_default=True,
              help="split cycles across engines seeded by (seed, shard)")
@click.option("--backend", type=click.Choice(["auto", "compiled", "python"]),
              default="auto", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="checkpoint file to write")
@click.option("--checkpoint-interval", type=int, default=0, show_default=True,
              help="rewrite the checkpoint every this many cycles (0 = at end only)")
def cmd_sweep(size, mode, n_min, n_max, auto_window, center_p, window_scale, cycles,
              discard_cycles, seed, rng_kind, pairing, decimation, shards, backend,
              out, checkpoint_interval):
    """Run sweeps and write a counter checkpoint."""
    cfg = RunConfig(L=size, mode=mode, n_lo=n_min, n_hi=n_max, auto_window=auto_window,
                    center_p=center_p, window_scale=window_scale, cycles=cycles,
                    discard_cycles=discard_cycles, seed=seed, rng_kind=rng_kind,
                    pairing=pairing, decimation=decimation, shards=shards,
                    backend=backend, out=out, checkpoint_interval=checkpoint_interval)
    try:
        cfg.resolve_window()
    except ValueError as exc:
        raise click.UsageError(str(exc))
    result = run_config(cfg)
    write_checkpoint(out, result.counters, result.manifest)
    click.echo(f"wrote {out}: L={result.counters.L} "
               f"window [{result.counters.n_lo}, {result.counters.n_hi}] "
               f"cycles={result.counters.cycles} steps={result.counters.steps} "
               f"backend={backend_name(cfg.backend)}", err=True)
    if result.counters.partial:
        sys.exit(130)


@main.command("merge")
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="merged checkpoint path (default: stdout)")
def cmd_merge(files, out):
    """Sum checkpoints with identical headers."""
    counters = [read_checkpoint(f) for f in files]
    try:
        merged = merge_checkpoints(counters)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    manifest = {
        "merged-from": len(files),
        "cycles": merged.cycles,
        "steps": merged.steps,
        "partial": "true" if merged.partial else "false",
    }
    text = format_checkpoint(merged, manifest)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


@main.command("estimate")
@click.argument("checkpoint", type=click.Path(exists=True, dir_okay=False))
@click.option("--b", type=float, default=DEFAULT_B, show_default=True,
              help="finite-size crossing amplitude")
@click.option("--b-err", type=float, default=DEFAULT_B_ERR, show_default=True)
@click.option("--tau", type=float, default=None,
              help="decorrelation time in visit units (default: checkpoint manifest, else 0.5)")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="CSV path (default: stdout)")
def cmd_estimate(checkpoint, b, b_err, tau, out):
    """Spanning-probability curve and threshold estimate from a checkpoint."""
    counters = read_checkpoint(checkpoint)
    if tau is None:
        meta_tau = counters.meta.get("tau-visits", "").split()
        tau = float(meta_tau[0]) if meta_tau and meta_tau[0] else 0.5
    curve = SpanningCurve.from_counters(counters, tau=tau)
    criterion = CrossingCriterion(b=b, b_err=b_err)
    try:
        estimate = estimate_pc(curve, criterion, counters=counters)
    except NoCrossingError as exc:
        click.echo(curve_csv(curve), nl=False)
        click.echo(f"no crossing: {exc}", err=True)
        sys.exit(EXIT_NO_CROSSING)
    text = curve_csv(curve, estimate)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)
    click.echo(f"pc = {estimate.pc:.9f} +- {estimate.stat_err:.2g} (stat) "
               f"+- {estimate.syst_err:.2g} (syst from b)", err=True)


@main.command("verify")
@click.option("--ops", type=int, default=20000, show_default=True,
              help="mixed graph operations for the oracle suite")
@click.option("--vertices", type=int, default=300, show_default=True)
@click.option("--steps", type=int, default=10000, show_default=True,
              help="lattice steps for the tally-census suite")
@click.option("--cycles", type=int, default=20000, show_default=True,
              help="cycles for the uniform-visitation suite")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option("--backend", type=click.Choice(["auto", "compiled", "python"]),
              default="auto", show_default=True)
def cmd_verify(ops, vertices, steps, cycles, seed, backend):
    """Run oracle-equivalence, tally-census, uniformity and RNG suites."""
    results = run_verify(ops=ops, vertices=vertices, steps=steps, cycles=cycles,
                         seed=seed, backend=backend)
    failed = False
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failed = failed or not r.passed
        click.echo(f"{status} {r.name}: {r.detail}")
    if failed:
        sys.exit(EXIT_VERIFY_FAILED)


@main.command("bench")
@click.option("--sizes", default="32,64,128", show_default=True,
              help="comma-separated lattice sizes")
@click.option("--cycles", type=int, default=3, show_default=True)
@click.option("--backend", type=click.Choice(["auto", "compiled", "python", "both"]),
              default="both", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_bench(sizes, cycles, backend, seed, out):
    """Steps-per-second table across lattice sizes and backends."""
    try:
        size_list = [int(s) for s in sizes.split(",") if s.strip()]
    except ValueError:
        raise click.UsageError(f"bad --sizes value: {sizes!r}")
    rows = run_bench(size_list, cycles, backend=backend, seed=seed)
    text = bench_csv(rows)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


if __name__ == "__main__":
    main()
