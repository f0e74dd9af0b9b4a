"""Counter checkpoint files.

Text format: comment lines starting with '#' carry the run manifest, the
first non-comment line is the header "L n_lo n_hi", and each following line
is "n s0 s1 s2".  Checkpoints with identical headers merge by elementwise
summation.
"""

from __future__ import annotations

import numpy as np

from .sweep import SweepCounters

# manifest keys written in this fixed order so output bytes are reproducible
_MANIFEST_ORDER = (
    "format", "mode", "rng", "pairing", "decimation", "seed", "shards",
    "shard-seeds", "cycles", "discarded-cycles", "steps", "partial",
    "tau-visits", "tau-steps", "tau-batch-means", "merged-from", "walltime",
)


def format_checkpoint(counters: SweepCounters, manifest: dict | None = None) -> str:
    counters.validate()
    manifest = dict(manifest or {})
    manifest.setdefault("format", "percosweep-checkpoint-1")
    lines = []
    for key in _MANIFEST_ORDER:
        if key in manifest:
            lines.append(f"# {key} {manifest.pop(key)}")
    for key in sorted(manifest):
        lines.append(f"# {key} {manifest[key]}")
    lines.append(f"{counters.L} {counters.n_lo} {counters.n_hi}")
    s0, s1, s2 = counters.s0, counters.s1, counters.s2
    for i, n in enumerate(range(counters.n_lo, counters.n_hi + 1)):
        lines.append(f"{n} {s0[i]} {s1[i]} {s2[i]}")
    return "\n".join(lines) + "\n"


def write_checkpoint(path, counters: SweepCounters, manifest: dict | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_checkpoint(counters, manifest))


def parse_checkpoint(text: str) -> SweepCounters:
    meta = {}
    header = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].strip().split(None, 1)
            if parts:
                meta[parts[0]] = parts[1] if len(parts) > 1 else ""
            continue
        fields = line.split()
        if header is None:
            if len(fields) != 3:
                raise ValueError(f"line {lineno}: header must be 'L n_lo n_hi'")
            header = tuple(int(f) for f in fields)
            continue
        if len(fields) != 4:
            raise ValueError(f"line {lineno}: expected 'n s0 s1 s2'")
        rows.append(tuple(int(f) for f in fields))
    if header is None:
        raise ValueError("checkpoint has no header line")
    L, n_lo, n_hi = header
    width = n_hi - n_lo + 1
    if len(rows) != width:
        raise ValueError(f"expected {width} counter rows, found {len(rows)}")
    s0 = np.zeros(width, dtype=np.int64)
    s1 = np.zeros(width, dtype=np.int64)
    s2 = np.zeros(width, dtype=np.int64)
    for i, (n, a, b, c) in enumerate(rows):
        if n != n_lo + i:
            raise ValueError(f"counter rows out of order at n={n}")
        s0[i], s1[i], s2[i] = a, b, c
    counters = SweepCounters(L, n_lo, n_hi, s0, s1, s2,
                             cycles=int(meta.get("cycles", 0)),
                             steps=int(meta.get("steps", 0)),
                             partial=meta.get("partial", "false") == "true",
                             meta=meta)
    counters.validate()
    return counters


def read_checkpoint(path) -> SweepCounters:
    with open(path) as fh:
        return parse_checkpoint(fh.read())


def merge_checkpoints(counter_list) -> SweepCounters:
    if not counter_list:
        raise ValueError("nothing to merge")
    merged = counter_list[0]
    for other in counter_list[1:]:
        merged = merged.merge(other)
    return merged
