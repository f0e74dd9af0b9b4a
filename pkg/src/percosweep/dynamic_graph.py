"""Arena-backed dynamic connectivity for undirected graphs.

Connected graphs are stored as trees: vertex records are always leaves, and
a hierarchy of graph records above them ends in a unique root that carries
the authoritative cluster statistics (order and per-boundary counts).
Edge insertion fuses trees (lesser order under greater); edge and vertex
deletion identify the resulting fragments by clump accretion: breadth-first
growth from nucleation kernels, run round-robin across live clumps, merging
clumps that touch and extracting each clump that completes, until a single
clump remains and the original tree is whatever is left.

Handles are plain ints into per-arena free-list storage.  Non-root graph
records carry no authoritative statistics; consumers query roots only.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

NO_REC = -1

# boundary_mask bit layout: 2 bits per lattice dimension
B_XLO = 1
B_XHI = 2
B_YLO = 4
B_YHI = 8


class ArenaExhaustedError(RuntimeError):
    """Raised when a fixed-capacity arena has no free records left."""


@dataclass
class FragmentReport:
    """Cluster roots left behind by a deletion, extracted fragments first.

    ``host_root`` is the original tree's root (last entry of ``roots``) when
    the host kept at least one vertex, else None.  ``extracted`` counts the
    clumps that were re-linked under fresh roots; the final fragment never
    is, so ``extracted == len(roots) - 1`` whenever the host survives.
    """

    roots: list = field(default_factory=list)
    host_root: int | None = None
    extracted: int = 0


class GraphArena:
    def __init__(self, max_vertices: int | None = None, max_records: int | None = None):
        self._max_vertices = max_vertices
        self._max_records = max_records
        # vertex records
        self._v_adj: list[dict] = []
        self._v_parent: list[int] = []
        self._v_mask: list[int] = []
        self._v_clump: list[int] = []
        self._v_free: list[int] = []
        self.live_vertices = 0
        # graph records
        self._g_parent: list[int] = []
        self._g_children: list[int] = []
        self._g_order: list[int] = []
        self._g_bc: list[list[int]] = []
        self._g_free: list[int] = []
        self.live_graph_records = 0
        # clump records (only populated during an accretion episode)
        self._c_parent: list[int] = []
        self._c_order: list[int] = []
        self._c_seq: list[int] = []
        self._c_frontier: list[deque] = []
        self._c_members: list[list[int]] = []
        self._c_free: list[int] = []
        self.live_clumps = 0

    # -- allocation ------------------------------------------------------

    def _alloc_vertex(self) -> int:
        if self._v_free:
            v = self._v_free.pop()
        elif self._max_vertices is not None and len(self._v_adj) >= self._max_vertices:
            raise ArenaExhaustedError("vertex arena exhausted")
        else:
            self._v_adj.append({})
            self._v_parent.append(NO_REC)
            self._v_mask.append(0)
            self._v_clump.append(NO_REC)
            v = len(self._v_adj) - 1
        self.live_vertices += 1
        return v

    def _free_vertex(self, v: int) -> None:
        self._v_adj[v] = {}
        self._v_parent[v] = NO_REC
        self._v_mask[v] = 0
        self._v_clump[v] = NO_REC
        self._v_free.append(v)
        self.live_vertices -= 1

    def _alloc_graph_record(self) -> int:
        if self._g_free:
            g = self._g_free.pop()
        elif self._max_records is not None and len(self._g_parent) >= self._max_records:
            raise ArenaExhaustedError("graph record arena exhausted")
        else:
            self._g_parent.append(NO_REC)
            self._g_children.append(0)
            self._g_order.append(0)
            self._g_bc.append([0, 0, 0, 0])
            g = len(self._g_parent) - 1
        self.live_graph_records += 1
        return g

    def _free_graph_record(self, g: int) -> None:
        self._g_parent[g] = NO_REC
        self._g_children[g] = 0
        self._g_order[g] = 0
        self._g_bc[g] = [0, 0, 0, 0]
        self._g_free.append(g)
        self.live_graph_records -= 1

    def _alloc_clump(self, kernel: int) -> int:
        if self._c_free:
            c = self._c_free.pop()
            self._c_frontier[c] = deque((kernel,))
            self._c_members[c] = [kernel]
        else:
            self._c_parent.append(NO_REC)
            self._c_order.append(0)
            self._c_seq.append(0)
            self._c_frontier.append(deque((kernel,)))
            self._c_members.append([kernel])
            c = len(self._c_parent) - 1
        self._c_parent[c] = NO_REC
        self._c_order[c] = 1
        self._c_seq[c] = self.live_clumps
        self._v_clump[kernel] = c
        self.live_clumps += 1
        return c

    def _free_clump(self, c: int) -> None:
        self._c_parent[c] = NO_REC
        self._c_frontier[c] = deque()
        self._c_members[c] = []
        self._c_free.append(c)
        self.live_clumps -= 1

    # -- queries ---------------------------------------------------------

    def neighbors(self, v: int) -> tuple:
        return tuple(self._v_adj[v])

    def degree(self, v: int) -> int:
        return len(self._v_adj[v])

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._v_adj[a]

    def vertex_mask(self, v: int) -> int:
        return self._v_mask[v]

    def is_root(self, g: int) -> bool:
        return self._g_parent[g] == NO_REC

    def root_order(self, g: int) -> int:
        return self._g_order[g]

    def root_boundary_counts(self, g: int) -> tuple:
        return tuple(self._g_bc[g])

    # structural introspection (debugging, invariant tests)

    def vertex_parent(self, v: int) -> int:
        return self._v_parent[v]

    def record_parent(self, g: int) -> int:
        return self._g_parent[g]

    def record_child_count(self, g: int) -> int:
        return self._g_children[g]

    def graph_records(self):
        """Handles of live graph records (roots and interior)."""
        for g in range(len(self._g_parent)):
            if self._g_parent[g] != NO_REC or self._g_children[g] > 0:
                yield g

    # -- core operations ---------------------------------------------------

    def create_vertex(self, boundary_mask: int = 0) -> int:
        """New isolated vertex under a fresh order-1 root."""
        v = self._alloc_vertex()
        g = self._alloc_graph_record()
        self._v_adj[v] = {}
        self._v_parent[v] = g
        self._v_mask[v] = boundary_mask
        self._v_clump[v] = NO_REC
        self._g_parent[g] = NO_REC
        self._g_children[g] = 1
        self._g_order[g] = 1
        self._g_bc[g] = [
            1 if boundary_mask & B_XLO else 0,
            1 if boundary_mask & B_XHI else 0,
            1 if boundary_mask & B_YLO else 0,
            1 if boundary_mask & B_YHI else 0,
        ]
        return v

    def find_root(self, v: int) -> int:
        """Root of v's tree; every traced record becomes a child of the root.

        Records left childless by the re-linking are pruned and recycled.
        """
        g_parent = self._g_parent
        g_children = self._g_children
        g = self._v_parent[v]
        root = g
        while g_parent[root] != NO_REC:
            root = g_parent[root]
        if g == root:
            return root
        # v itself becomes a direct child of the root
        self._v_parent[v] = root
        g_children[g] -= 1
        g_children[root] += 1
        path = []
        c = g
        while c != root:
            path.append(c)
            nxt = g_parent[c]
            if nxt != root:
                g_parent[c] = root
                g_children[nxt] -= 1
                g_children[root] += 1
            c = nxt
        for c in path:
            if g_children[c] == 0:
                g_children[root] -= 1
                self._free_graph_record(c)
        return root

    def insert_edge(self, a: int, b: int) -> bool:
        """Add undirected edge (a, b); returns True when two clusters fused."""
        if a == b:
            raise ValueError("self-loops are not allowed")
        if b in self._v_adj[a]:
            raise ValueError(f"edge ({a}, {b}) already present")
        self._v_adj[a][b] = None
        self._v_adj[b][a] = None
        ra = self.find_root(a)
        rb = self.find_root(b)
        if ra == rb:
            return False
        # lesser order root under greater; ties keep the first argument's root
        if self._g_order[rb] > self._g_order[ra]:
            winner, loser = rb, ra
        else:
            winner, loser = ra, rb
        self._g_parent[loser] = winner
        self._g_children[winner] += 1
        self._g_order[winner] += self._g_order[loser]
        wbc = self._g_bc[winner]
        lbc = self._g_bc[loser]
        for i in range(4):
            wbc[i] += lbc[i]
        return True

    def remove_edge(self, a: int, b: int) -> FragmentReport:
        """Delete edge (a, b) and report the resulting cluster roots."""
        if b not in self._v_adj[a]:
            raise ValueError(f"edge ({a}, {b}) not present")
        del self._v_adj[a][b]
        del self._v_adj[b][a]
        root = self.find_root(a)
        return self.run_accretion((a, b), root)

    def remove_vertex(self, v: int) -> FragmentReport:
        """Delete v and all its edges; report the fragments left behind."""
        root = self.find_root(v)
        nbrs = list(self._v_adj[v])
        for u in nbrs:
            del self._v_adj[u][v]
        mask = self._v_mask[v]
        # detach and recycle the vertex record; v is a direct child of root
        self._free_vertex(v)
        self._g_order[root] -= 1
        bc = self._g_bc[root]
        if mask & B_XLO:
            bc[0] -= 1
        if mask & B_XHI:
            bc[1] -= 1
        if mask & B_YLO:
            bc[2] -= 1
        if mask & B_YHI:
            bc[3] -= 1
        self._g_children[root] -= 1
        if self._g_children[root] == 0:
            # v was the whole cluster
            self._free_graph_record(root)
            return FragmentReport(roots=[], host_root=None, extracted=0)
        return self.run_accretion(nbrs, root)

    # -- accretion ---------------------------------------------------------

    def run_accretion(self, kernels, host_root: int) -> FragmentReport:
        """Identify the fragments reachable from each kernel vertex.

        Clumps grow breadth-first, one frontier vertex per live clump per
        turn in nucleation order.  Touching clumps merge (greater order
        survives, ties to the earlier-nucleated).  A clump whose frontier
        empties is a complete fragment and is extracted under a fresh root;
        when one clump remains the host tree itself is the final fragment
        and accretion stops without touching it.
        """
        kernels = list(kernels)
        if not kernels:
            return FragmentReport(roots=[host_root], host_root=host_root, extracted=0)
        episode = [self._alloc_clump(k) for k in kernels]
        alive = len(episode)
        turn_q = deque(episode)
        out_roots = []
        c_parent = self._c_parent
        c_order = self._c_order
        c_seq = self._c_seq
        v_clump = self._v_clump
        while alive > 1:
            c = turn_q.popleft()
            if c_parent[c] != NO_REC:
                continue  # merged away; not a turn
            v = self._c_frontier[c].popleft()
            r = c
            for u in self._v_adj[v]:
                cu = v_clump[u]
                if cu == NO_REC:
                    v_clump[u] = r
                    c_order[r] += 1
                    self._c_members[r].append(u)
                    self._c_frontier[r].append(u)
                    continue
                cu = self._find_clump_root(u)
                if cu == r:
                    continue
                if c_order[cu] > c_order[r] or (
                    c_order[cu] == c_order[r] and c_seq[cu] < c_seq[r]
                ):
                    winner, loser = cu, r
                else:
                    winner, loser = r, cu
                c_parent[loser] = winner
                c_order[winner] += c_order[loser]
                self._c_members[winner].extend(self._c_members[loser])
                self._c_members[loser] = []
                self._c_frontier[winner].extend(self._c_frontier[loser])
                self._c_frontier[loser] = deque()
                alive -= 1
                r = winner
            if alive == 1:
                break
            if not self._c_frontier[r]:
                out_roots.append(self._extract_clump(r, host_root))
                alive -= 1
                if r == c:
                    pass  # already popped from the turn queue
                else:
                    turn_q.remove(r)
            elif r == c:
                turn_q.append(c)
        extracted = len(out_roots)
        # clear leftover labels and recycle every clump of the episode
        for c in episode:
            for m in self._c_members[c]:
                v_clump[m] = NO_REC
            self._free_clump(c)
        out_roots.append(host_root)
        return FragmentReport(roots=out_roots, host_root=host_root, extracted=extracted)

    def _find_clump_root(self, u: int):
        c = self._v_clump[u]
        c_parent = self._c_parent
        root = c
        while c_parent[root] != NO_REC:
            root = c_parent[root]
        if c != root:
            self._v_clump[u] = root
            while c_parent[c] != NO_REC:
                nxt = c_parent[c]
                c_parent[c] = root
                c = nxt
        return root

    def _extract_clump(self, c: int, host_root: int) -> int:
        """Re-link a completed clump's vertices under a fresh root record."""
        members = self._c_members[c]
        g = self._alloc_graph_record()
        bc = [0, 0, 0, 0]
        v_parent = self._v_parent
        v_clump = self._v_clump
        for m in members:
            self._release_child(v_parent[m])
            v_parent[m] = g
            v_clump[m] = NO_REC
            mask = self._v_mask[m]
            if mask & B_XLO:
                bc[0] += 1
            if mask & B_XHI:
                bc[1] += 1
            if mask & B_YLO:
                bc[2] += 1
            if mask & B_YHI:
                bc[3] += 1
        order = len(members)
        self._g_parent[g] = NO_REC
        self._g_children[g] = order
        self._g_order[g] = order
        self._g_bc[g] = bc
        # the host root's totals shrink by the extracted fragment's
        self._g_order[host_root] -= order
        hbc = self._g_bc[host_root]
        for i in range(4):
            hbc[i] -= bc[i]
        self._c_members[c] = []
        return g

    def _release_child(self, p: int) -> None:
        """A child left record p; prune upward while records go childless."""
        g_children = self._g_children
        g_parent = self._g_parent
        while True:
            g_children[p] -= 1
            if g_children[p] > 0:
                return
            q = g_parent[p]
            self._free_graph_record(p)
            if q == NO_REC:
                return
            p = q

    # -- iteration helpers (tests, oracles) --------------------------------

    def vertices(self):
        """Live vertex handles."""
        for v, p in enumerate(self._v_parent):
            if p != NO_REC:
                yield v
