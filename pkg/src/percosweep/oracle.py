"""Brute-force verifiers: BFS connectivity, census re-scan, enumeration.

Everything here is deliberately naive and never consults the tree records
of the dynamic graph, so it can serve as an independent check on them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

from .dynamic_graph import B_XLO, B_XHI, B_YLO, B_YHI


@dataclass
class ComponentPartition:
    """Connected components keyed by their smallest member id."""

    label_of: dict
    orders: dict
    boundary_counts: dict

    def component_count(self) -> int:
        return len(self.orders)

    def groups(self) -> dict:
        out = {}
        for v, lab in self.label_of.items():
            out.setdefault(lab, set()).add(v)
        return out


def _mask_to_bc(mask: int):
    return (
        1 if mask & B_XLO else 0,
        1 if mask & B_XHI else 0,
        1 if mask & B_YLO else 0,
        1 if mask & B_YHI else 0,
    )


def bfs_partition(vertices, neighbors_of, mask_of=None) -> ComponentPartition:
    """Components of an explicit adjacency structure by plain BFS.

    ``vertices`` is an iterable of handles, ``neighbors_of(v)`` yields the
    adjacent handles, ``mask_of(v)`` an optional boundary bitmask.
    """
    vertices = list(vertices)
    label_of = {}
    orders = {}
    bcs = {}
    seen = set()
    for start in vertices:
        if start in seen:
            continue
        members = [start]
        seen.add(start)
        q = deque((start,))
        while q:
            v = q.popleft()
            for u in neighbors_of(v):
                if u not in seen:
                    seen.add(u)
                    members.append(u)
                    q.append(u)
        lab = min(members)
        bc = [0, 0, 0, 0]
        for m in members:
            label_of[m] = lab
            if mask_of is not None:
                mb = _mask_to_bc(mask_of(m))
                for i in range(4):
                    bc[i] += mb[i]
        orders[lab] = len(members)
        bcs[lab] = tuple(bc)
    return ComponentPartition(label_of, orders, bcs)


def bfs_partition_arena(arena) -> ComponentPartition:
    """Partition of a GraphArena using only its adjacency links."""
    return bfs_partition(arena.vertices(), arena.neighbors, arena.vertex_mask)


def site_boundary_mask(L: int, s: int) -> int:
    x = s % L
    y = s // L
    mask = 0
    if x == 0:
        mask |= B_XLO
    if x == L - 1:
        mask |= B_XHI
    if y == 0:
        mask |= B_YLO
    if y == L - 1:
        mask |= B_YHI
    return mask


def site_neighbors(L: int, s: int):
    x = s % L
    y = s // L
    if x > 0:
        yield s - 1
    if x < L - 1:
        yield s + 1
    if y > 0:
        yield s - L
    if y < L - 1:
        yield s + L


def bfs_partition_sites(L: int, occupied) -> ComponentPartition:
    """Partition of occupied lattice sites from geometry alone."""
    occ = set(occupied)

    def nbrs(s):
        for t in site_neighbors(L, s):
            if t in occ:
                yield t

    return bfs_partition(sorted(occ), nbrs, lambda s: site_boundary_mask(L, s))


def spanning_census(L: int, occupied):
    """(neither, x-only, y-only, both) cluster counts by full re-scan."""
    part = bfs_partition_sites(L, occupied)
    tally = [0, 0, 0, 0]
    for lab, bc in part.boundary_counts.items():
        sx = bc[0] > 0 and bc[1] > 0
        sy = bc[2] > 0 and bc[3] > 0
        tally[(1 if sx else 0) | (2 if sy else 0)] += 1
    return tuple(tally), part


def configuration_spans(L: int, occupied):
    """(spans x, spans y) for one explicit site configuration."""
    tally, _ = spanning_census(L, occupied)
    sx = tally[1] > 0 or tally[3] > 0
    sy = tally[2] > 0 or tally[3] > 0
    return sx, sy


def exhaustive_spanning_counts(L: int, n: int, budget: int = 10**7):
    """Exact (s0, s1, s2) over every configuration of n occupied sites."""
    N = L * L
    if not 0 <= n <= N:
        raise ValueError("n out of range")
    total = comb(N, n)
    if total > budget:
        raise ValueError(f"enumeration of {total} configurations exceeds budget {budget}")
    s0 = s1 = s2 = 0
    for config in combinations(range(N), n):
        s0 += 1
        sx, sy = configuration_spans(L, config)
        if sx or sy:
            s1 += 1
        if sx and sy:
            s2 += 1
    return s0, s1, s2


def exhaustive_R(L: int, n: int, budget: int = 10**7) -> Fraction:
    """Exact spanning probability (s1 + s2) / (2 s0) by full enumeration."""
    s0, s1, s2 = exhaustive_spanning_counts(L, n, budget)
    return Fraction(s1 + s2, 2 * s0)
