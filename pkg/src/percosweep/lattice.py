"""Square-lattice site percolation on top of the dynamic graph.

Sites are indexed row-major (s = y*L + x), occupancy maps sites to vertex
records, and a four-entry tally tracks how many live clusters span neither
dimension, x only, y only, or both.  Boundaries are open: no adjacency ever
wraps around the lattice edge.
"""

from __future__ import annotations

from .dynamic_graph import B_XLO, B_XHI, B_YLO, B_YHI, GraphArena

CLASS_NEITHER = 0
CLASS_X_ONLY = 1
CLASS_Y_ONLY = 2
CLASS_BOTH = 3


def boundary_mask_of(L: int, x: int, y: int) -> int:
    """Boundary bits for site (x, y): which lattice edges it lies on."""
    if not (0 <= x < L and 0 <= y < L):
        raise ValueError(f"site ({x}, {y}) out of range for L={L}")
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


def spanning_class_of_counts(bc) -> int:
    """Spanning class from per-boundary counts (x needs both x edges, etc.)."""
    sx = bc[0] > 0 and bc[1] > 0
    sy = bc[2] > 0 and bc[3] > 0
    return (1 if sx else 0) | (2 if sy else 0)


class SiteLattice:
    def __init__(self, L: int):
        if L < 2:
            raise ValueError("L must be >= 2")
        self.L = L
        self.N = L * L
        self.graph = GraphArena(max_vertices=self.N)
        self._site_vertex = [-1] * self.N
        self._tally = [0, 0, 0, 0]
        self.n = 0

    # -- queries -----------------------------------------------------------

    def is_occupied(self, s: int) -> bool:
        return self._site_vertex[s] != -1

    def occupied_sites(self) -> list:
        return [s for s, v in enumerate(self._site_vertex) if v != -1]

    def vertex_at(self, s: int) -> int:
        v = self._site_vertex[s]
        if v == -1:
            raise ValueError(f"site {s} is not occupied")
        return v

    def boundary_mask(self, s: int) -> int:
        return boundary_mask_of(self.L, s % self.L, s // self.L)

    def spanning_class(self, root: int) -> int:
        return spanning_class_of_counts(self.graph.root_boundary_counts(root))

    def tally(self) -> tuple:
        """(neither, x-only, y-only, both) live-cluster counts."""
        return tuple(self._tally)

    def lattice_spans(self, dims_required: int) -> bool:
        t = self._tally
        if dims_required == 1:
            return t[1] + t[2] + t[3] > 0
        if dims_required == 2:
            return t[3] > 0
        raise ValueError("dims_required must be 1 or 2")

    def _occupied_neighbor_vertices(self, s: int) -> list:
        L = self.L
        x = s % L
        sv = self._site_vertex
        out = []
        if x > 0 and sv[s - 1] != -1:
            out.append(sv[s - 1])
        if x < L - 1 and sv[s + 1] != -1:
            out.append(sv[s + 1])
        if s >= L and sv[s - L] != -1:
            out.append(sv[s - L])
        if s < self.N - L and sv[s + L] != -1:
            out.append(sv[s + L])
        return out

    # -- mutation ------------------------------------------------------------

    def occupy(self, s: int) -> int:
        """Occupy site s, linking it to its occupied 4-neighbors; returns n.

        The tally is kept current by retiring the class of every distinct
        pre-existing neighbor cluster before the mutation and admitting the
        class of the one cluster standing afterwards.
        """
        if self._site_vertex[s] != -1:
            raise ValueError(f"site {s} already occupied")
        g = self.graph
        nbrs = self._occupied_neighbor_vertices(s)
        roots = []
        for u in nbrs:
            r = g.find_root(u)
            if r not in roots:
                roots.append(r)
        for r in roots:
            self._retire_class(self.spanning_class(r))
        v = g.create_vertex(self.boundary_mask(s))
        for u in nbrs:
            g.insert_edge(v, u)
        self._admit_class(self.spanning_class(g.find_root(v)))
        self._site_vertex[s] = v
        self.n += 1
        return self.n

    def deoccupy(self, s: int) -> int:
        """Vacate site s, splitting its cluster as needed; returns n."""
        v = self._site_vertex[s]
        if v == -1:
            raise ValueError(f"site {s} not occupied")
        g = self.graph
        self._retire_class(self.spanning_class(g.find_root(v)))
        report = g.remove_vertex(v)
        for r in report.roots:
            self._admit_class(self.spanning_class(r))
        self._site_vertex[s] = -1
        self.n -= 1
        return self.n

    def _retire_class(self, cls: int) -> None:
        self._tally[cls] -= 1

    def _admit_class(self, cls: int) -> None:
        self._tally[cls] += 1


# -- snapshot format -------------------------------------------------------


def dump_config(engine) -> str:
    """Textual snapshot: 'L <value>' then sorted occupied site indices."""
    lines = [f"L {engine.L}"]
    lines.extend(str(s) for s in sorted(engine.occupied_sites()))
    return "\n".join(lines) + "\n"


def parse_config(text: str):
    """(L, sorted occupied sites) from a snapshot produced by dump_config."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("L "):
        raise ValueError("snapshot must start with a 'L <value>' header line")
    L = int(lines[0].split()[1])
    sites = [int(ln) for ln in lines[1:]]
    N = L * L
    for s in sites:
        if not 0 <= s < N:
            raise ValueError(f"site index {s} out of range for L={L}")
    if len(set(sites)) != len(sites):
        raise ValueError("duplicate site index in snapshot")
    return L, sorted(sites)


def restore_config(text: str) -> SiteLattice:
    L, sites = parse_config(text)
    lat = SiteLattice(L)
    for s in sites:
        lat.occupy(s)
    return lat
