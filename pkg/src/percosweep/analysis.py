"""From sweep counters to a threshold estimate.

The spanning probability at occupation level n is estimated by
R(n) = (s1(n) + s2(n)) / (2 s0(n)), and the threshold is read off where the
curve crosses the finite-size target 0.5 + b/L, with b = 0.320(1).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .sweep import SweepCounters

DEFAULT_B = 0.320
DEFAULT_B_ERR = 0.001


class NoCrossingError(RuntimeError):
    """The curve never brackets the crossing target."""

    def __init__(self, nearest_n: int, nearest_R: float, target: float):
        self.nearest_n = nearest_n
        self.nearest_R = nearest_R
        self.target = target
        super().__init__(
            f"no crossing of target {target:.9g}; nearest approach "
            f"R({nearest_n}) = {nearest_R:.9g}"
        )


@dataclass
class CrossingCriterion:
    """Finite-size spanning probability at the threshold: 0.5 + b/L."""

    b: float = DEFAULT_B
    b_err: float = DEFAULT_B_ERR

    def target(self, L: int) -> float:
        return 0.5 + self.b / L

    def target_err(self, L: int) -> float:
        return self.b_err / L


def crossing_target(L: int, b: float = DEFAULT_B, b_err: float = DEFAULT_B_ERR):
    """(target value, target uncertainty) for side length L."""
    if L < 2:
        raise ValueError("L must be >= 2")
    return 0.5 + b / L, b_err / L


def estimate_R(counters: SweepCounters, n: int, tau: float = 0.5):
    """(R, standard error) at level n; the error deflates the sample count
    by 2 tau to account for correlated sweep samples."""
    i = n - counters.n_lo
    if not 0 <= i <= counters.n_hi - counters.n_lo:
        raise ValueError(f"n={n} outside the counter window")
    s0 = int(counters.s0[i])
    if s0 == 0:
        raise ValueError(f"no observations at n={n}")
    r = (int(counters.s1[i]) + int(counters.s2[i])) / (2.0 * s0)
    s0_eff = s0 / (2.0 * tau)
    err = sqrt(max(r * (1.0 - r), 0.0) / s0_eff)
    return r, err


@dataclass
class SpanningCurve:
    """Per-level spanning probability estimates with standard errors."""

    L: int
    N: int
    n: np.ndarray
    R: np.ndarray
    stderr: np.ndarray

    @classmethod
    def from_counters(cls, counters: SweepCounters, tau: float = 0.5) -> "SpanningCurve":
        mask = counters.s0 > 0
        levels = counters.levels()[mask]
        s0 = counters.s0[mask].astype(np.float64)
        s12 = (counters.s1[mask] + counters.s2[mask]).astype(np.float64)
        R = s12 / (2.0 * s0)
        s0_eff = s0 / (2.0 * tau)
        stderr = np.sqrt(np.clip(R * (1.0 - R), 0.0, None) / s0_eff)
        return cls(counters.L, counters.L * counters.L, levels, R, stderr)


@dataclass
class ThresholdEstimate:
    pc: float
    stat_err: float
    syst_err: float
    L: int
    n_star: float
    target: float
    target_err: float
    samples: int  # s0 total inside the bracketing pair

    @property
    def total_err(self) -> float:
        return sqrt(self.stat_err**2 + self.syst_err**2)


def estimate_pc(curve: SpanningCurve, criterion: CrossingCriterion | None = None,
                counters: SweepCounters | None = None) -> ThresholdEstimate:
    """Threshold from the crossing of the curve with the finite-size target.

    n* comes from linear interpolation between the consecutive pair of
    levels bracketing the target (the pair nearest the curve's closest
    approach, should noise produce several).  The statistical error
    propagates the two R standard errors through the interpolation; the
    systematic error pushes the target uncertainty through the local slope.
    """
    criterion = criterion or CrossingCriterion()
    if len(curve.n) < 1:
        raise ValueError("empty curve")
    T = criterion.target(curve.L)
    T_err = criterion.target_err(curve.L)
    R = curve.R
    n = curve.n
    sig = curve.stderr
    N = curve.N
    i0 = int(np.argmin(np.abs(R - T)))
    # exact hit: no interpolation term
    if R[i0] == T:
        return ThresholdEstimate(
            pc=float(n[i0]) / N,
            stat_err=float(sig[i0] / _local_slope(curve, i0)) / N,
            syst_err=float(T_err / _local_slope(curve, i0)) / N,
            L=curve.L, n_star=float(n[i0]), target=T, target_err=T_err,
            samples=_samples_near(counters, n[i0], n[i0]),
        )
    best = None
    for i in range(len(n) - 1):
        lo, hi = (R[i], R[i + 1]) if R[i] <= R[i + 1] else (R[i + 1], R[i])
        if lo <= T <= hi:
            dist = min(abs(i - i0), abs(i + 1 - i0))
            if best is None or dist < best[0]:
                best = (dist, i)
    if best is None:
        raise NoCrossingError(int(n[i0]), float(R[i0]), T)
    i = best[1]
    ri, rj = float(R[i]), float(R[i + 1])
    ni, nj = float(n[i]), float(n[i + 1])
    dr = rj - ri
    n_star = ni + (T - ri) / dr * (nj - ni)
    slope = dr / (nj - ni)
    var_n = ((T - rj) ** 2 * sig[i] ** 2 + (T - ri) ** 2 * sig[i + 1] ** 2) \
        * (nj - ni) ** 2 / dr**4
    return ThresholdEstimate(
        pc=n_star / N,
        stat_err=sqrt(var_n) / N,
        syst_err=(T_err / abs(slope)) / N,
        L=curve.L, n_star=n_star, target=T, target_err=T_err,
        samples=_samples_near(counters, int(ni), int(nj)),
    )


def _local_slope(curve: SpanningCurve, i: int) -> float:
    """Two-point slope magnitude around index i (guarded at the edges)."""
    if len(curve.n) < 2:
        return float("inf")  # degenerate: zero error contribution
    j = i + 1 if i + 1 < len(curve.n) else i - 1
    dn = float(curve.n[j] - curve.n[i])
    dr = float(curve.R[j] - curve.R[i])
    if dr == 0.0:
        return float("inf")
    return abs(dr / dn)


def _samples_near(counters: SweepCounters | None, n_a: int, n_b: int) -> int:
    if counters is None:
        return 0
    total = 0
    for n in (int(n_a), int(n_b)):
        i = n - counters.n_lo
        if 0 <= i <= counters.n_hi - counters.n_lo:
            total += int(counters.s0[i])
    return total


def curve_csv(curve: SpanningCurve, estimate: ThresholdEstimate | None = None) -> str:
    """CSV rows "n,p,R,stderr" plus a comment footer with the estimate."""
    lines = ["n,p,R,stderr"]
    for i in range(len(curve.n)):
        p = float(curve.n[i]) / curve.N
        lines.append(f"{int(curve.n[i])},{p:.10g},{curve.R[i]:.10g},{curve.stderr[i]:.6g}")
    if estimate is not None:
        lines.append(
            f"# pc={estimate.pc:.9f} stat_err={estimate.stat_err:.3g} "
            f"syst_err={estimate.syst_err:.3g} total_err={estimate.total_err:.3g} "
            f"L={estimate.L} n_star={estimate.n_star:.4f} "
            f"target={estimate.target:.9g} target_err={estimate.target_err:.3g} "
            f"samples={estimate.samples}"
        )
    return "\n".join(lines) + "\n"
