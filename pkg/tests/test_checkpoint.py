"""Checkpoint text format and merging."""

import pytest

from percosweep.checkpoint import (
    format_checkpoint,
    merge_checkpoints,
    parse_checkpoint,
    read_checkpoint,
    write_checkpoint,
)
from percosweep.sweep import SweepCounters


def sample_counters():
    c = SweepCounters.zeros(8, 10, 13)
    c.s0[:] = [4, 8, 8, 4]
    c.s1[:] = [0, 2, 5, 4]
    c.s2[:] = [0, 0, 1, 2]
    c.cycles = 4
    c.steps = 24
    return c


def test_roundtrip():
    c = sample_counters()
    text = format_checkpoint(c, {"seed": 1, "rng": "mt19937", "cycles": 4, "steps": 24})
    parsed = parse_checkpoint(text)
    assert parsed.header() == c.header()
    assert (parsed.s0 == c.s0).all() and (parsed.s1 == c.s1).all() and (parsed.s2 == c.s2).all()
    assert parsed.cycles == 4 and parsed.steps == 24
    assert parsed.meta["rng"] == "mt19937"
    # stable bytes
    assert format_checkpoint(parsed, {"seed": 1, "rng": "mt19937",
                                      "cycles": 4, "steps": 24}) == text


def test_file_roundtrip(tmp_path):
    path = tmp_path / "c.ckpt"
    write_checkpoint(path, sample_counters(), {"seed": 5})
    parsed = read_checkpoint(path)
    assert parsed.header() == (8, 10, 13)


def test_header_line_format():
    text = format_checkpoint(sample_counters())
    first_data = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
    assert first_data == "8 10 13"


def test_merge_with_zeros_is_identity():
    c = sample_counters()
    z = SweepCounters.zeros(8, 10, 13)
    m = merge_checkpoints([c, z])
    assert (m.s0 == c.s0).all() and (m.s1 == c.s1).all() and (m.s2 == c.s2).all()


def test_merge_commutes():
    a = sample_counters()
    b = sample_counters()
    b.s1[:] = [0, 1, 2, 3]
    ab = merge_checkpoints([a, b])
    ba = merge_checkpoints([b, a])
    assert (ab.s0 == ba.s0).all() and (ab.s1 == ba.s1).all()
    assert ab.cycles == 8 and ab.steps == 48


def test_merge_header_mismatch():
    with pytest.raises(ValueError):
        merge_checkpoints([sample_counters(), SweepCounters.zeros(8, 10, 14)])
    with pytest.raises(ValueError):
        merge_checkpoints([sample_counters(), SweepCounters.zeros(16, 10, 13)])


def test_parse_rejects_malformed():
    with pytest.raises(ValueError):
        parse_checkpoint("")
    with pytest.raises(ValueError):
        parse_checkpoint("8 10\n")
    with pytest.raises(ValueError):
        parse_checkpoint("8 10 11\n10 1 0 0\n")  # missing row for n=11
    with pytest.raises(ValueError):
        parse_checkpoint("8 10 11\n10 1 0 0\n12 1 0 0\n")  # wrong level
    with pytest.raises(ValueError):
        parse_checkpoint("8 10 10\n10 1 2 0\n")  # s1 > s0


def test_counter_ordering_enforced_on_write():
    c = sample_counters()
    c.s2[0] = 99
    with pytest.raises(ValueError):
        format_checkpoint(c)
