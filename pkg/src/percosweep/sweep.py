"""Bidirectional-sweep Monte Carlo over occupation level n.

A sweep engine walks n up and down between two turning conditions, one
random site occupation or deoccupation per step, and records the spanning
state of every configuration visited inside the sampling window into the
s0/s1/s2 counter arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lattice import SiteLattice
from .rng import RngStream, bounded_uniform

NU = 4.0 / 3.0  # 2D correlation length exponent; window width scales as N*L^(-1/nu)
DEFAULT_CENTER_P = 0.5927  # literature prior for the auto-window center
DEFAULT_WINDOW_SCALE = 4.0


def critical_window(L: int, center_p: float = DEFAULT_CENTER_P,
                    scale: float = DEFAULT_WINDOW_SCALE):
    """Integer window [n_lo, n_hi] around the critical region of an LxL lattice."""
    N = L * L
    width = scale * N * L ** (-1.0 / NU)
    center = center_p * N
    n_lo = max(0, round(center - width / 2.0))
    n_hi = min(N, round(center + width / 2.0))
    if n_lo >= n_hi:
        raise ValueError(f"degenerate auto window [{n_lo}, {n_hi}] for L={L}")
    return n_lo, n_hi


class SitePicker:
    """Partitioned permutation of all sites for O(1) uniform selection.

    Positions [0, k) hold the occupied sites, [k, N) the unoccupied ones.
    """

    def __init__(self, N: int):
        self.N = N
        self.perm = list(range(N))
        self.pos = list(range(N))
        self.k = 0

    def _swap(self, i: int, j: int) -> None:
        perm, pos = self.perm, self.pos
        a, b = perm[i], perm[j]
        perm[i], perm[j] = b, a
        pos[a], pos[b] = j, i

    def pick_unoccupied(self, rng) -> int:
        """Uniform unoccupied site, moved into the occupied part."""
        if self.k >= self.N:
            raise ValueError("lattice full")
        j = self.k + bounded_uniform(rng, self.N - self.k)
        s = self.perm[j]
        self._swap(j, self.k)
        self.k += 1
        return s

    def pick_occupied(self, rng) -> int:
        """Uniform occupied site, moved into the unoccupied part."""
        if self.k <= 0:
            raise ValueError("lattice empty")
        j = bounded_uniform(rng, self.k)
        s = self.perm[j]
        self._swap(j, self.k - 1)
        self.k -= 1
        return s

    def mark_occupied(self, s: int) -> None:
        """Record that site s (currently unoccupied) became occupied."""
        j = self.pos[s]
        if j < self.k:
            raise ValueError(f"site {s} already in the occupied part")
        self._swap(j, self.k)
        self.k += 1

    def mark_unoccupied(self, s: int) -> None:
        j = self.pos[s]
        if j >= self.k:
            raise ValueError(f"site {s} already in the unoccupied part")
        self._swap(j, self.k - 1)
        self.k -= 1


@dataclass
class SweepPlan:
    """What to run: window mode between fixed n bounds, or self-organized
    turning on the appearance/disappearance of a spanning cluster."""

    mode: str = "window"  # "window" | "selforg"
    n_lo: int | None = None
    n_hi: int | None = None
    cycles: int = 100
    discard_cycles: int = 1  # equilibration cycles before recording starts
    ref_n: int | None = None  # decorrelation trace reference level
    collect_config_hist: bool = False

    def validate(self, N: int) -> None:
        if self.mode not in ("window", "selforg"):
            raise ValueError(f"unknown sweep mode: {self.mode!r}")
        if self.cycles < 0 or self.discard_cycles < 0:
            raise ValueError("cycle counts must be nonnegative")
        if self.mode == "window":
            if self.n_lo is None or self.n_hi is None:
                raise ValueError("window mode needs n_lo and n_hi")
            if not (0 <= self.n_lo < self.n_hi <= N):
                raise ValueError(f"invalid window [{self.n_lo}, {self.n_hi}] for N={N}")


@dataclass
class SweepCounters:
    """Observation counts s0/s1/s2 indexed by occupation level n.

    s0(n) counts every recorded visit to level n, s1(n) those spanning at
    least one dimension, s2(n) those spanning both.
    """

    L: int
    n_lo: int
    n_hi: int
    s0: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    cycles: int = 0
    steps: int = 0
    partial: bool = False
    meta: dict = field(default_factory=dict)

    @classmethod
    def zeros(cls, L: int, n_lo: int, n_hi: int) -> "SweepCounters":
        width = n_hi - n_lo + 1
        return cls(L, n_lo, n_hi,
                   np.zeros(width, dtype=np.int64),
                   np.zeros(width, dtype=np.int64),
                   np.zeros(width, dtype=np.int64))

    def header(self) -> tuple:
        return (self.L, self.n_lo, self.n_hi)

    def levels(self) -> np.ndarray:
        return np.arange(self.n_lo, self.n_hi + 1)

    def record(self, n: int, spans1: bool, spans2: bool) -> None:
        i = n - self.n_lo
        if 0 <= i <= self.n_hi - self.n_lo:
            self.s0[i] += 1
            if spans1:
                self.s1[i] += 1
            if spans2:
                self.s2[i] += 1

    def validate(self) -> None:
        if np.any(self.s1 > self.s0) or np.any(self.s2 > self.s1):
            raise ValueError("counter ordering violated: need s2 <= s1 <= s0")

    def merge(self, other: "SweepCounters") -> "SweepCounters":
        if self.header() != other.header():
            raise ValueError(f"header mismatch: {self.header()} vs {other.header()}")
        out = SweepCounters(self.L, self.n_lo, self.n_hi,
                            self.s0 + other.s0, self.s1 + other.s1, self.s2 + other.s2,
                            cycles=self.cycles + other.cycles,
                            steps=self.steps + other.steps,
                            partial=self.partial or other.partial)
        return out

    def trimmed(self) -> "SweepCounters":
        """Copy restricted to the observed (nonzero s0) range of n."""
        nz = np.nonzero(self.s0)[0]
        if len(nz) == 0:
            return self
        lo, hi = int(nz[0]), int(nz[-1])
        return SweepCounters(self.L, self.n_lo + lo, self.n_lo + hi,
                             self.s0[lo:hi + 1].copy(), self.s1[lo:hi + 1].copy(),
                             self.s2[lo:hi + 1].copy(), cycles=self.cycles,
                             steps=self.steps, partial=self.partial, meta=dict(self.meta))


def record_sample(counters: SweepCounters, engine) -> None:
    """Record the engine's current configuration if n is inside the window."""
    counters.record(engine.n, engine.spans(1), engine.spans(2))


def mc_step(engine, direction: str) -> int:
    """One Monte Carlo step: occupy (up) or vacate (down) a uniform site."""
    if direction == "up":
        return engine.step_up()
    if direction == "down":
        return engine.step_down()
    raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")


class PythonEngine:
    """Pure-Python sweep engine: reference composition of lattice + picker + rng."""

    backend = "python"

    def __init__(self, L: int, stream: RngStream):
        self.lattice = SiteLattice(L)
        self.picker = SitePicker(L * L)
        self.stream = stream
        self.L = L
        self.N = L * L
        self._occ_mask = 0  # maintained only while a config histogram is active
        self._track_mask = False

    # -- state queries ------------------------------------------------------

    @property
    def n(self) -> int:
        return self.lattice.n

    def spans(self, dims_required: int) -> bool:
        return self.lattice.lattice_spans(dims_required)

    def tally(self) -> tuple:
        return self.lattice.tally()

    def occupied_sites(self) -> list:
        return self.lattice.occupied_sites()

    def is_occupied(self, s: int) -> bool:
        return self.lattice.is_occupied(s)

    def component_label(self, s: int) -> int:
        """Opaque cluster label of an occupied site (its current root)."""
        return self.lattice.graph.find_root(self.lattice.vertex_at(s))

    def cluster_stats(self, s: int) -> tuple:
        """(order, bc_xlo, bc_xhi, bc_ylo, bc_yhi) of the cluster at site s."""
        g = self.lattice.graph
        r = g.find_root(self.lattice.vertex_at(s))
        return (g.root_order(r),) + g.root_boundary_counts(r)

    def live_graph_records(self) -> int:
        return self.lattice.graph.live_graph_records

    # -- stepping -------------------------------------------------------------

    def step_up(self) -> int:
        stream = self.stream
        if stream.pairing == "single":
            s = self.picker.pick_unoccupied(stream.primary)
        else:
            L = self.L
            while True:
                x, y = stream.draw_coords(L)
                s = y * L + x
                if not self.lattice.is_occupied(s):
                    break
            self.picker.mark_occupied(s)
        n = self.lattice.occupy(s)
        if self._track_mask:
            self._occ_mask ^= 1 << s
        return n

    def step_down(self) -> int:
        stream = self.stream
        if stream.pairing == "single":
            s = self.picker.pick_occupied(stream.primary)
        else:
            L = self.L
            while True:
                x, y = stream.draw_coords(L)
                s = y * L + x
                if self.lattice.is_occupied(s):
                    break
            self.picker.mark_unoccupied(s)
        n = self.lattice.deoccupy(s)
        if self._track_mask:
            self._occ_mask ^= 1 << s
        return n

    def occupy_site(self, s: int) -> int:
        """Occupy a specific site (snapshot restore, tests)."""
        self.picker.mark_occupied(s)
        n = self.lattice.occupy(s)
        if self._track_mask:
            self._occ_mask ^= 1 << s
        return n

    def deoccupy_site(self, s: int) -> int:
        self.picker.mark_unoccupied(s)
        n = self.lattice.deoccupy(s)
        if self._track_mask:
            self._occ_mask ^= 1 << s
        return n

    # -- phases ---------------------------------------------------------------

    def sweep_up_to(self, n_target: int) -> int:
        """Step up to n_target without recording; returns steps taken."""
        steps = 0
        while self.lattice.n < n_target:
            self.step_up()
            steps += 1
        return steps

    def sweep_down_to(self, n_target: int) -> int:
        steps = 0
        while self.lattice.n > n_target:
            self.step_down()
            steps += 1
        return steps

    def _enable_mask_tracking(self) -> None:
        if self.N > 28:
            raise ValueError("config histogram only supported for tiny lattices")
        m = 0
        for s in self.occupied_sites():
            m |= 1 << s
        self._occ_mask = m
        self._track_mask = True

    def run_window(self, n_lo: int, n_hi: int, cycles: int,
                   counters: SweepCounters | None,
                   config_hist: np.ndarray | None = None,
                   trace: list | None = None, trace_n: int = -1) -> int:
        """Run full up/down cycles between n_lo and n_hi, recording each step
        landing inside the window; returns the number of steps taken.

        The walk must already sit at n_lo.  ``config_hist`` (optional)
        accumulates visits per occupancy bitmask; ``trace`` collects the
        1-dimension spanning indicator at each recorded visit to trace_n.
        """
        lat = self.lattice
        tally = lat._tally
        record = counters is not None
        if config_hist is not None:
            self._enable_mask_tracking()
        if record:
            s0, s1, s2 = counters.s0, counters.s1, counters.s2
            base = counters.n_lo
        steps = 0
        for _ in range(cycles):
            cycle_start = steps
            n = lat.n
            while n < n_hi:
                n = self.step_up()
                steps += 1
                if record:
                    i = n - base
                    s0[i] += 1
                    if tally[1] or tally[2] or tally[3]:
                        s1[i] += 1
                        if tally[3]:
                            s2[i] += 1
                        if trace is not None and n == trace_n:
                            trace.append(1)
                    elif trace is not None and n == trace_n:
                        trace.append(0)
                    if config_hist is not None:
                        config_hist[self._occ_mask] += 1
            while n > n_lo:
                n = self.step_down()
                steps += 1
                if record:
                    i = n - base
                    s0[i] += 1
                    if tally[1] or tally[2] or tally[3]:
                        s1[i] += 1
                        if tally[3]:
                            s2[i] += 1
                        if trace is not None and n == trace_n:
                            trace.append(1)
                    elif trace is not None and n == trace_n:
                        trace.append(0)
                    if config_hist is not None:
                        config_hist[self._occ_mask] += 1
            if record:
                counters.cycles += 1
                counters.steps += steps - cycle_start
        self._track_mask = False
        return steps

    def run_selforg(self, cycles: int, counters: SweepCounters | None) -> int:
        """Self-organized cycles: up until the lattice spans one dimension,
        down until it no longer does; every step is recorded."""
        lat = self.lattice
        record = counters is not None
        steps = 0
        for _ in range(cycles):
            cycle_start = steps
            while not lat.lattice_spans(1):
                n = self.step_up()
                steps += 1
                if record:
                    counters.record(n, lat.lattice_spans(1), lat.lattice_spans(2))
            while lat.lattice_spans(1):
                n = self.step_down()
                steps += 1
                if record:
                    counters.record(n, lat.lattice_spans(1), lat.lattice_spans(2))
            if record:
                counters.cycles += 1
                counters.steps += steps - cycle_start
        return steps


def run_sweeps(plan: SweepPlan, engine, counters: SweepCounters | None = None,
               config_hist: np.ndarray | None = None, collect_trace: bool = False):
    """Execute a sweep plan on an engine; returns (counters, trace or None).

    In window mode the engine is walked to n_lo, ``plan.discard_cycles``
    equilibration cycles run unrecorded, then ``plan.cycles`` recorded
    cycles.  In self-organized mode recording starts immediately and the
    counters cover [0, N] with the window growing only as visited.
    """
    plan.validate(engine.N)
    if plan.mode == "window":
        n_lo, n_hi = plan.n_lo, plan.n_hi
        if counters is None:
            counters = SweepCounters.zeros(engine.L, n_lo, n_hi)
        if counters.header() != (engine.L, n_lo, n_hi):
            raise ValueError("counters do not match the plan window")
        engine.sweep_up_to(n_lo)
        engine.sweep_down_to(n_lo)
        if plan.discard_cycles:
            engine.run_window(n_lo, n_hi, plan.discard_cycles, None)
        trace = None
        trace_n = -1
        if collect_trace:
            trace = []
            trace_n = plan.ref_n if plan.ref_n is not None else (n_lo + n_hi) // 2
        try:
            engine.run_window(n_lo, n_hi, plan.cycles, counters,
                              config_hist=config_hist, trace=trace, trace_n=trace_n)
        except KeyboardInterrupt:
            counters.partial = True
        return counters, trace
    # self-organized
    if counters is None:
        counters = SweepCounters.zeros(engine.L, 0, engine.N)
    try:
        engine.run_selforg(plan.cycles, counters)
    except KeyboardInterrupt:
        counters.partial = True
    return counters, None


# -- decorrelation ----------------------------------------------------------


@dataclass
class DecorrelationEstimate:
    """Integrated autocorrelation time of an indicator trace.

    ``tau`` is in units of successive samples (0.5 for an uncorrelated
    trace, matching the s0_eff = s0/(2 tau) convention); ``window`` is the
    self-consistent summation cutoff; ``reliable`` is False when the trace
    is too short (or constant) for the estimate to mean anything.
    """

    tau: float
    window: int
    reliable: bool
    length: int


def estimate_decorrelation(trace) -> DecorrelationEstimate:
    """Windowed integrated autocorrelation time of a span/no-span trace.

    tau(W) = 1/2 + sum_{t<=W} rho(t), cut off at the first W >= 6 tau(W).
    """
    x = np.asarray(trace, dtype=np.float64)
    n = len(x)
    if n < 4:
        return DecorrelationEstimate(tau=0.5, window=0, reliable=False, length=n)
    x = x - x.mean()
    var = np.dot(x, x) / n
    if var == 0.0:
        return DecorrelationEstimate(tau=0.5, window=0, reliable=False, length=n)
    # autocovariance via FFT, biased normalization c(t) = (1/n) sum x_i x_{i+t}
    m = 1
    while m < 2 * n:
        m <<= 1
    f = np.fft.rfft(x, m)
    acov = np.fft.irfft(f * np.conj(f), m)[: n // 2] / n
    rho = acov / acov[0]
    tau = 0.5
    window = n // 2 - 1
    found = False
    for w in range(1, n // 2):
        tau += rho[w]
        if w >= 6.0 * tau:
            window = w
            found = True
            break
    reliable = found and n >= 100.0 * max(tau, 0.5) and tau > 0
    return DecorrelationEstimate(tau=float(tau), window=window,
                                 reliable=bool(reliable), length=n)


def batch_means_tau(trace, batches: int = 50) -> float:
    """Cross-check of tau from batch means: var of batch averages vs naive."""
    x = np.asarray(trace, dtype=np.float64)
    n = len(x)
    if batches < 2 or n < 2 * batches:
        return float("nan")
    m = n // batches
    x = x[: m * batches].reshape(batches, m)
    mu = x.mean(axis=1)
    var = x.var()
    if var == 0:
        return float("nan")
    var_mean = mu.var(ddof=1) / batches
    naive = var / (m * batches)
    return float(0.5 * var_mean / naive)
