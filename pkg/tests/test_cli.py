"""Command line behavior: flags, formats, exit codes, determinism."""

import numpy as np
import pytest
from click.testing import CliRunner

import percosweep.cli as cli
from percosweep.backend import HAVE_COMPILED
from percosweep.checkpoint import format_checkpoint, read_checkpoint
from percosweep.lattice import SiteLattice
from percosweep.sweep import SweepCounters
from percosweep.verify import SuiteResult, suite_tally_census


def run_cli(*args):
    return CliRunner().invoke(cli.main, list(args), catch_exceptions=False)


def strip_timing(text: str) -> str:
    return "\n".join(ln for ln in text.splitlines() if not ln.startswith("# walltime"))


def test_sweep_writes_checkpoint_with_header(tmp_path):
    out = tmp_path / "a.ckpt"
    res = run_cli("sweep", "--size", "16", "--auto-window", "--cycles", "50",
                  "--seed", "1", "--out", str(out))
    assert res.exit_code == 0
    counters = read_checkpoint(out)
    assert counters.L == 16
    first_data = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")][0]
    assert first_data == f"16 {counters.n_lo} {counters.n_hi}"
    assert counters.cycles == 50


def test_sweep_determinism_byte_identical(tmp_path):
    args = ["sweep", "--size", "8", "--n-min", "10", "--n-max", "40",
            "--cycles", "40", "--seed", "9"]
    a, b = tmp_path / "a.ckpt", tmp_path / "b.ckpt"
    assert run_cli(*args, "--out", str(a)).exit_code == 0
    assert run_cli(*args, "--out", str(b)).exit_code == 0
    assert strip_timing(a.read_text()) == strip_timing(b.read_text())


def test_sweep_usage_errors(tmp_path):
    out = tmp_path / "x.ckpt"
    res = run_cli("sweep", "--size", "8", "--cycles", "5", "--out", str(out))
    assert res.exit_code == 2  # window mode without bounds
    res = run_cli("sweep", "--size", "8", "--n-min", "40", "--n-max", "10",
                  "--cycles", "5", "--out", str(out))
    assert res.exit_code == 2


@pytest.mark.skipif(not HAVE_COMPILED, reason="needs the compiled backend to be quick")
def test_sweep_accepts_narrow_window_setup(tmp_path):
    # the published narrow-window configuration, at a token cycle count
    out = tmp_path / "narrow.ckpt"
    res = run_cli("sweep", "--size", "2048", "--n-min", "2485700", "--n-max", "2486700",
                  "--cycles", "1", "--discard", "0", "--seed", "1", "--out", str(out))
    assert res.exit_code == 0
    head = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")][0]
    assert head == "2048 2485700 2486700"


def test_sweep_selforg_mode(tmp_path):
    out = tmp_path / "so.ckpt"
    res = run_cli("sweep", "--size", "6", "--mode", "selforg", "--cycles", "30",
                  "--seed", "3", "--out", str(out))
    assert res.exit_code == 0
    counters = read_checkpoint(out)
    assert counters.meta["mode"] == "selforg"
    assert counters.s1.sum() > 0  # spanning reached each cycle


def test_sweep_shards_match_manual_merge(tmp_path):
    sharded = tmp_path / "s2.ckpt"
    res = run_cli("sweep", "--size", "8", "--n-min", "10", "--n-max", "30",
                  "--cycles", "8", "--seed", "4", "--shards", "2", "--out", str(sharded))
    assert res.exit_code == 0
    from percosweep.backend import make_engine
    from percosweep.sweep import SweepPlan, run_sweeps
    parts = []
    for shard in (0, 1):
        eng = make_engine(8, seed=4, shard=shard)
        c, _ = run_sweeps(SweepPlan(mode="window", n_lo=10, n_hi=30, cycles=4), eng)
        parts.append(c)
    manual = parts[0].merge(parts[1])
    got = read_checkpoint(sharded)
    assert (got.s0 == manual.s0).all() and (got.s1 == manual.s1).all()


def test_merge_cli(tmp_path):
    c = SweepCounters.zeros(4, 0, 3)
    c.s0[:] = [1, 2, 2, 1]
    c.s1[:] = [0, 1, 1, 1]
    a = tmp_path / "a.ckpt"
    b = tmp_path / "b.ckpt"
    a.write_text(format_checkpoint(c))
    b.write_text(format_checkpoint(SweepCounters.zeros(4, 0, 3)))
    out = tmp_path / "m.ckpt"
    res = run_cli("merge", str(a), str(b), "--out", str(out))
    assert res.exit_code == 0
    merged = read_checkpoint(out)
    assert (merged.s0 == c.s0).all()  # merging with zeros is the identity
    res_ab = run_cli("merge", str(a), str(b))
    res_ba = run_cli("merge", str(b), str(a))
    assert res_ab.output == res_ba.output


def test_merge_header_mismatch_is_usage_error(tmp_path):
    a = tmp_path / "a.ckpt"
    b = tmp_path / "b.ckpt"
    a.write_text(format_checkpoint(SweepCounters.zeros(4, 0, 3)))
    b.write_text(format_checkpoint(SweepCounters.zeros(4, 0, 4)))
    res = run_cli("merge", str(a), str(b))
    assert res.exit_code == 2


def test_estimate_paper_replay(tmp_path):
    c = SweepCounters.zeros(2048, 2486156, 2486158)
    s0 = 516_500_000
    for i, r in enumerate((0.500097, 0.500153, 0.500209)):
        c.s0[i] = s0
        c.s1[i] = s0
        c.s2[i] = round(2 * s0 * r) - s0
    ckpt = tmp_path / "paper.ckpt"
    ckpt.write_text(format_checkpoint(c))
    res = run_cli("estimate", str(ckpt))
    assert res.exit_code == 0
    footer = [ln for ln in res.output.splitlines() if ln.startswith("# pc=")][0]
    pc = float(footer.split()[1].split("=")[1])
    assert abs(pc - 0.5927460) < 2e-7


def test_estimate_no_crossing_exit_code(tmp_path):
    c = SweepCounters.zeros(16, 100, 104)
    c.s0[:] = 10
    c.s1[:] = 10
    c.s2[:] = 10  # saturated: R = 1 everywhere, never crosses from below
    ckpt = tmp_path / "sat.ckpt"
    ckpt.write_text(format_checkpoint(c))
    res = run_cli("estimate", str(ckpt))
    assert res.exit_code == 4
    assert "no crossing" in res.stderr


def test_estimate_uses_manifest_tau(tmp_path):
    c = SweepCounters.zeros(16, 100, 102)
    c.s0[:] = 10000
    c.s1[:] = [8000, 10000, 10000]
    c.s2[:] = [0, 104, 2000]  # R = 0.4, 0.5052, 0.6
    ckpt = tmp_path / "t.ckpt"
    ckpt.write_text(format_checkpoint(c, {"tau-visits": "2.0"}))
    res = run_cli("estimate", str(ckpt))
    line = [ln for ln in res.output.splitlines() if ln.startswith("101,")][0]
    # stderr deflated by 2*tau = 4 relative to the naive binomial error
    naive = np.sqrt(0.5052 * (1 - 0.5052) / 10000)
    assert float(line.split(",")[3]) == pytest.approx(2 * naive, rel=1e-3)


def test_verify_cli_passes_at_small_scale():
    res = run_cli("verify", "--ops", "2000", "--vertices", "64", "--steps", "1500",
                  "--cycles", "1500", "--seed", "2")
    assert res.exit_code == 0
    assert res.output.count("PASS") == 4


def test_tally_fault_injection_fails_suite(monkeypatch):
    # skipping the decrement half of the tally protocol must be caught
    monkeypatch.setattr(SiteLattice, "_retire_class", lambda self, cls: None)
    result = suite_tally_census(L=8, steps=400, seed=3, backend="python")
    assert not result.passed


def test_verify_cli_exit_code_on_failure(monkeypatch):
    monkeypatch.setattr(cli, "run_verify",
                        lambda **kw: [SuiteResult("tally-census", False, "injected")])
    res = run_cli("verify")
    assert res.exit_code == 3
    assert "FAIL" in res.output


def test_checkpoint_interval_same_final_bytes(tmp_path):
    base = ["sweep", "--size", "8", "--n-min", "10", "--n-max", "30",
            "--cycles", "9", "--seed", "5"]
    plain = tmp_path / "plain.ckpt"
    chunked = tmp_path / "chunked.ckpt"
    assert run_cli(*base, "--out", str(plain)).exit_code == 0
    assert run_cli(*base, "--checkpoint-interval", "2", "--out", str(chunked)).exit_code == 0
    assert strip_timing(plain.read_text()) == strip_timing(chunked.read_text())


@pytest.mark.skipif(not HAVE_COMPILED, reason="compiled backend not built")
def test_backends_produce_identical_checkpoints(tmp_path):
    base = ["sweep", "--size", "8", "--n-min", "8", "--n-max", "32",
            "--cycles", "25", "--seed", "12"]
    a, b = tmp_path / "c.ckpt", tmp_path / "p.ckpt"
    assert run_cli(*base, "--backend", "compiled", "--out", str(a)).exit_code == 0
    assert run_cli(*base, "--backend", "python", "--out", str(b)).exit_code == 0
    assert strip_timing(a.read_text()) == strip_timing(b.read_text())


def test_split_seed_runs_merge_to_same_s0_totals(tmp_path):
    # two single-cycle runs with different seeds vs one two-cycle run:
    # s0 depends only on the cycle count, so the totals agree
    files = []
    for seed in (1, 2):
        f = tmp_path / f"one{seed}.ckpt"
        run_cli("sweep", "--size", "8", "--n-min", "10", "--n-max", "20",
                "--cycles", "1", "--seed", str(seed), "--out", str(f))
        files.append(f)
    merged = tmp_path / "merged.ckpt"
    assert run_cli("merge", str(files[0]), str(files[1]), "--out", str(merged)).exit_code == 0
    two = tmp_path / "two.ckpt"
    run_cli("sweep", "--size", "8", "--n-min", "10", "--n-max", "20",
            "--cycles", "2", "--seed", "3", "--out", str(two))
    m = read_checkpoint(merged)
    t = read_checkpoint(two)
    assert (m.s0 == t.s0).all()
    assert m.cycles == t.cycles == 2


def test_bench_zero_cycles_empty_table():
    res = run_cli("bench", "--sizes", "8,16", "--cycles", "0")
    assert res.exit_code == 0
    assert res.output.strip() == "L,backend,up_steps_per_s,down_steps_per_s,cycle_steps_per_s,steps"


def test_bench_bad_sizes_usage_error():
    res = run_cli("bench", "--sizes", "8,x")
    assert res.exit_code == 2


def test_bench_small_run():
    res = run_cli("bench", "--sizes", "8", "--cycles", "2", "--backend", "auto")
    assert res.exit_code == 0
    lines = res.output.strip().splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("8,")
