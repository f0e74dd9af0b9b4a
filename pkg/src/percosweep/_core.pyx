# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep engine: the hot kernels of the Monte Carlo walk.

One self-contained object fuses the dynamic graph, the lattice bookkeeping,
the site picker and the word generators so that a full Monte Carlo step
runs without touching the interpreter.  Observable behavior (counter
arrays, tallies, spanning answers, word consumption) is identical to the
pure-Python engine; tests assert the two backends bit-match.
"""

import numpy as np

cdef extern from *:
    """
    static inline int psw_bitlen64(unsigned long long x) {
        return x ? 64 - __builtin_clzll(x) : 0;
    }
    """
    int psw_bitlen64(unsigned long long x) nogil

cdef int MT_N = 624
cdef int MT_M = 397
cdef int LF_LONG = 1279
cdef int LF_SHORT = 418

cdef unsigned int MT_MATRIX = 0x9908B0DF
cdef unsigned int MT_UPPER = 0x80000000
cdef unsigned int MT_LOWER = 0x7FFFFFFF


cdef class Engine:
    """Lattice sweep engine with compiled stepping (backend "compiled")."""

    cdef readonly int L
    cdef readonly long long N
    # rng
    cdef int rng_kind          # 0 = mt19937, 1 = lfg
    cdef int pairing           # 0 = single, 1 = xy
    cdef int decimation
    cdef unsigned int[::1] mt0
    cdef unsigned int[::1] mt1
    cdef int mt0_pos, mt1_pos
    cdef unsigned int[::1] lf0
    cdef unsigned int[::1] lf1
    cdef int lf0_pos, lf1_pos
    # sites
    cdef unsigned char[::1] occupied
    cdef unsigned char[::1] smask
    cdef int[::1] v_parent
    cdef int[::1] v_clump
    cdef int[::1] next_member
    cdef int[::1] next_frontier
    # graph records
    cdef int g_cap
    cdef int[::1] g_parent
    cdef int[::1] g_children
    cdef int[::1] g_order
    cdef int[::1] g_bc
    cdef int[::1] g_free
    cdef int g_free_top
    cdef int g_next_fresh
    cdef readonly long long live_records
    # clumps (an accretion episode uses at most 4)
    cdef int c_parent[8]
    cdef int c_order[8]
    cdef int c_seq[8]
    cdef int c_mhead[8]
    cdef int c_mtail[8]
    cdef int c_fhead[8]
    cdef int c_ftail[8]
    cdef int frag_roots[8]
    # picker
    cdef int[::1] perm
    cdef int[::1] pos
    cdef int k
    # lattice census
    cdef long long tally_[4]
    cdef long long n_occupied
    # config-mask tracking for tiny lattices
    cdef unsigned int occ_mask
    cdef bint track_mask

    backend = "compiled"

    def __init__(self, int L, int rng_kind, int pairing, int decimation,
                 state0, int pos0, state1=None, int pos1=0):
        if L < 2:
            raise ValueError("L must be >= 2")
        self.L = L
        self.N = <long long>L * L
        cdef long long N = self.N
        self.rng_kind = rng_kind
        self.pairing = pairing
        self.decimation = decimation
        zero_state = np.zeros(1, dtype=np.uint32)
        if rng_kind == 0:
            self.mt0 = np.ascontiguousarray(state0, dtype=np.uint32).copy()
            self.mt0_pos = pos0
            self.mt1 = (np.ascontiguousarray(state1, dtype=np.uint32).copy()
                        if state1 is not None else zero_state)
            self.mt1_pos = pos1
            self.lf0 = zero_state
            self.lf1 = zero_state
        else:
            self.lf0 = np.ascontiguousarray(state0, dtype=np.uint32).copy()
            self.lf0_pos = pos0
            self.lf1 = (np.ascontiguousarray(state1, dtype=np.uint32).copy()
                        if state1 is not None else zero_state)
            self.lf1_pos = pos1
            self.mt0 = zero_state
            self.mt1 = zero_state
        self.occupied = np.zeros(N, dtype=np.uint8)
        xs = np.arange(N, dtype=np.int64) % L
        ys = np.arange(N, dtype=np.int64) // L
        smask = ((xs == 0) * 1 + (xs == L - 1) * 2
                 + (ys == 0) * 4 + (ys == L - 1) * 8).astype(np.uint8)
        self.smask = smask
        self.v_parent = np.full(N, -1, dtype=np.intc)
        self.v_clump = np.full(N, -1, dtype=np.intc)
        self.next_member = np.full(N, -1, dtype=np.intc)
        self.next_frontier = np.full(N, -1, dtype=np.intc)
        self.g_cap = <int>N + 64
        self.g_parent = np.full(self.g_cap, -1, dtype=np.intc)
        self.g_children = np.zeros(self.g_cap, dtype=np.intc)
        self.g_order = np.zeros(self.g_cap, dtype=np.intc)
        self.g_bc = np.zeros(4 * self.g_cap, dtype=np.intc)
        self.g_free = np.zeros(self.g_cap, dtype=np.intc)
        self.g_free_top = 0
        self.g_next_fresh = 0
        self.live_records = 0
        self.perm = np.arange(N, dtype=np.intc)
        self.pos = np.arange(N, dtype=np.intc)
        self.k = 0
        self.tally_[0] = 0
        self.tally_[1] = 0
        self.tally_[2] = 0
        self.tally_[3] = 0
        self.n_occupied = 0
        self.occ_mask = 0
        self.track_mask = False

    # -- random words -------------------------------------------------------

    cdef void _mt_twist(self, int slot):
        cdef unsigned int[::1] mt = self.mt0 if slot == 0 else self.mt1
        cdef int i
        cdef unsigned int y
        for i in range(MT_N - MT_M):
            y = (mt[i] & MT_UPPER) | (mt[i + 1] & MT_LOWER)
            mt[i] = mt[i + MT_M] ^ (y >> 1) ^ ((y & 1) * MT_MATRIX)
        for i in range(MT_N - MT_M, MT_N - 1):
            y = (mt[i] & MT_UPPER) | (mt[i + 1] & MT_LOWER)
            mt[i] = mt[i + MT_M - MT_N] ^ (y >> 1) ^ ((y & 1) * MT_MATRIX)
        y = (mt[MT_N - 1] & MT_UPPER) | (mt[0] & MT_LOWER)
        mt[MT_N - 1] = mt[MT_M - 1] ^ (y >> 1) ^ ((y & 1) * MT_MATRIX)

    cdef inline unsigned int _lfg_raw(self, int slot):
        cdef int j, t
        cdef unsigned int w
        if slot == 0:
            j = self.lf0_pos
            t = j - LF_SHORT
            if t < 0:
                t += LF_LONG
            w = self.lf0[j] + self.lf0[t]
            self.lf0[j] = w
            j += 1
            self.lf0_pos = j if j < LF_LONG else 0
        else:
            j = self.lf1_pos
            t = j - LF_SHORT
            if t < 0:
                t += LF_LONG
            w = self.lf1[j] + self.lf1[t]
            self.lf1[j] = w
            j += 1
            self.lf1_pos = j if j < LF_LONG else 0
        return w

    cdef inline unsigned int _next_word(self, int slot):
        cdef unsigned int y
        cdef int pos, d
        if self.rng_kind == 0:
            if slot == 0:
                pos = self.mt0_pos
                if pos >= MT_N:
                    self._mt_twist(0)
                    pos = 0
                y = self.mt0[pos]
                self.mt0_pos = pos + 1
            else:
                pos = self.mt1_pos
                if pos >= MT_N:
                    self._mt_twist(1)
                    pos = 0
                y = self.mt1[pos]
                self.mt1_pos = pos + 1
            y ^= y >> 11
            y ^= (y << 7) & <unsigned int>0x9D2C5680
            y ^= (y << 15) & <unsigned int>0xEFC60000
            y ^= y >> 18
            return y
        d = self.decimation
        while d > 1:
            self._lfg_raw(slot)
            d -= 1
        return self._lfg_raw(slot)

    cdef inline unsigned int _bounded(self, int slot, unsigned long long m):
        cdef int shift
        cdef unsigned int c
        if m <= 1:
            return 0
        shift = 32 - psw_bitlen64(m - 1)
        while True:
            c = self._next_word(slot) >> shift
            if c < m:
                return c

    def next_word(self):
        """One 32-bit word from the primary stream (testing hook)."""
        return int(self._next_word(0))

    # -- graph records --------------------------------------------------------

    cdef void _grow_records(self):
        cdef int old = self.g_cap
        cdef int new_cap = old * 2
        g_parent = np.full(new_cap, -1, dtype=np.intc)
        g_children = np.zeros(new_cap, dtype=np.intc)
        g_order = np.zeros(new_cap, dtype=np.intc)
        g_bc = np.zeros(4 * new_cap, dtype=np.intc)
        g_free = np.zeros(new_cap, dtype=np.intc)
        g_parent[:old] = np.asarray(self.g_parent)
        g_children[:old] = np.asarray(self.g_children)
        g_order[:old] = np.asarray(self.g_order)
        g_bc[:4 * old] = np.asarray(self.g_bc)
        g_free[:old] = np.asarray(self.g_free)
        self.g_parent = g_parent
        self.g_children = g_children
        self.g_order = g_order
        self.g_bc = g_bc
        self.g_free = g_free
        self.g_cap = new_cap

    cdef int _alloc_record(self):
        cdef int g
        if self.g_free_top > 0:
            self.g_free_top -= 1
            g = self.g_free[self.g_free_top]
        else:
            if self.g_next_fresh >= self.g_cap:
                self._grow_records()
            g = self.g_next_fresh
            self.g_next_fresh += 1
        self.live_records += 1
        return g

    cdef void _free_record(self, int g):
        self.g_parent[g] = -1
        self.g_children[g] = 0
        self.g_order[g] = 0
        self.g_bc[4 * g] = 0
        self.g_bc[4 * g + 1] = 0
        self.g_bc[4 * g + 2] = 0
        self.g_bc[4 * g + 3] = 0
        self.g_free[self.g_free_top] = g
        self.g_free_top += 1
        self.live_records -= 1

    cdef int _find_root(self, int s):
        cdef int g = self.v_parent[s]
        cdef int root = g
        cdef int path[64]
        cdef int plen = 0
        cdef int c, nxt, i
        while self.g_parent[root] != -1:
            root = self.g_parent[root]
        if g == root:
            return root
        self.v_parent[s] = root
        self.g_children[g] -= 1
        self.g_children[root] += 1
        c = g
        while c != root:
            path[plen] = c
            plen += 1
            nxt = self.g_parent[c]
            if nxt != root:
                self.g_parent[c] = root
                self.g_children[nxt] -= 1
                self.g_children[root] += 1
            c = nxt
        for i in range(plen):
            c = path[i]
            if self.g_children[c] == 0:
                self.g_children[root] -= 1
                self._free_record(c)
        return root

    cdef void _release_child(self, int p):
        cdef int q
        while True:
            self.g_children[p] -= 1
            if self.g_children[p] > 0:
                return
            q = self.g_parent[p]
            self._free_record(p)
            if q == -1:
                return
            p = q

    cdef inline int _class_of(self, int g):
        cdef int base = 4 * g
        cdef int cls = 0
        if self.g_bc[base] > 0 and self.g_bc[base + 1] > 0:
            cls |= 1
        if self.g_bc[base + 2] > 0 and self.g_bc[base + 3] > 0:
            cls |= 2
        return cls

    # -- lattice mutation ------------------------------------------------------

    cdef inline int _collect_neighbors(self, int s, int* nb):
        cdef int L = self.L
        cdef int x = s % L
        cdef int nn = 0
        if x > 0 and self.occupied[s - 1]:
            nb[nn] = s - 1
            nn += 1
        if x < L - 1 and self.occupied[s + 1]:
            nb[nn] = s + 1
            nn += 1
        if s >= L and self.occupied[s - L]:
            nb[nn] = s - L
            nn += 1
        if s < self.N - L and self.occupied[s + L]:
            nb[nn] = s + L
            nn += 1
        return nn

    cdef void _occupy(self, int s):
        cdef int nb[4]
        cdef int roots[4]
        cdef int nn = self._collect_neighbors(s, nb)
        cdef int nr = 0
        cdef int i, j, r, g, mask, ra, rb, winner, loser, base_w, base_l
        cdef bint seen
        for i in range(nn):
            r = self._find_root(nb[i])
            seen = False
            for j in range(nr):
                if roots[j] == r:
                    seen = True
                    break
            if not seen:
                roots[nr] = r
                nr += 1
        for j in range(nr):
            self.tally_[self._class_of(roots[j])] -= 1
        g = self._alloc_record()
        mask = self.smask[s]
        self.g_parent[g] = -1
        self.g_children[g] = 1
        self.g_order[g] = 1
        self.g_bc[4 * g] = 1 if mask & 1 else 0
        self.g_bc[4 * g + 1] = 1 if mask & 2 else 0
        self.g_bc[4 * g + 2] = 1 if mask & 4 else 0
        self.g_bc[4 * g + 3] = 1 if mask & 8 else 0
        self.occupied[s] = 1
        self.v_parent[s] = g
        for i in range(nn):
            ra = self._find_root(s)
            rb = self._find_root(nb[i])
            if ra == rb:
                continue
            if self.g_order[rb] > self.g_order[ra]:
                winner = rb
                loser = ra
            else:
                winner = ra
                loser = rb
            self.g_parent[loser] = winner
            self.g_children[winner] += 1
            self.g_order[winner] += self.g_order[loser]
            base_w = 4 * winner
            base_l = 4 * loser
            self.g_bc[base_w] += self.g_bc[base_l]
            self.g_bc[base_w + 1] += self.g_bc[base_l + 1]
            self.g_bc[base_w + 2] += self.g_bc[base_l + 2]
            self.g_bc[base_w + 3] += self.g_bc[base_l + 3]
        self.tally_[self._class_of(self._find_root(s))] += 1
        self.n_occupied += 1

    cdef void _deoccupy(self, int s):
        cdef int nb[4]
        cdef int root = self._find_root(s)
        cdef int nn, i, mask, base, nfrag
        self.tally_[self._class_of(root)] -= 1
        self.occupied[s] = 0
        nn = self._collect_neighbors(s, nb)
        self.v_parent[s] = -1
        mask = self.smask[s]
        base = 4 * root
        self.g_order[root] -= 1
        if mask & 1:
            self.g_bc[base] -= 1
        if mask & 2:
            self.g_bc[base + 1] -= 1
        if mask & 4:
            self.g_bc[base + 2] -= 1
        if mask & 8:
            self.g_bc[base + 3] -= 1
        self.g_children[root] -= 1
        if self.g_children[root] == 0:
            # s was the entire cluster
            self._free_record(root)
            self.n_occupied -= 1
            return
        nfrag = self._run_accretion(nb, nn, root)
        for i in range(nfrag):
            self.tally_[self._class_of(self.frag_roots[i])] += 1
        self.n_occupied -= 1

    # -- accretion ---------------------------------------------------------------

    cdef inline int _find_clump_root(self, int u):
        cdef int c = self.v_clump[u]
        cdef int root = c
        cdef int nxt
        while self.c_parent[root] >= 0:
            root = self.c_parent[root]
        if c != root:
            self.v_clump[u] = root
            while self.c_parent[c] >= 0:
                nxt = self.c_parent[c]
                self.c_parent[c] = root
                c = nxt
        return root

    cdef int _extract_clump(self, int r, int host_root):
        cdef int g = self._alloc_record()
        cdef int m = self.c_mhead[r]
        cdef int cnt = 0
        cdef int b0 = 0, b1 = 0, b2 = 0, b3 = 0
        cdef int mask, base
        while m != -1:
            self._release_child(self.v_parent[m])
            self.v_parent[m] = g
            self.v_clump[m] = -1
            mask = self.smask[m]
            if mask & 1:
                b0 += 1
            if mask & 2:
                b1 += 1
            if mask & 4:
                b2 += 1
            if mask & 8:
                b3 += 1
            cnt += 1
            m = self.next_member[m]
        self.g_parent[g] = -1
        self.g_children[g] = cnt
        self.g_order[g] = cnt
        base = 4 * g
        self.g_bc[base] = b0
        self.g_bc[base + 1] = b1
        self.g_bc[base + 2] = b2
        self.g_bc[base + 3] = b3
        self.g_order[host_root] -= cnt
        base = 4 * host_root
        self.g_bc[base] -= b0
        self.g_bc[base + 1] -= b1
        self.g_bc[base + 2] -= b2
        self.g_bc[base + 3] -= b3
        self.c_parent[r] = -2  # extracted marker
        self.c_mhead[r] = -1
        self.c_mtail[r] = -1
        return g

    cdef int _run_accretion(self, int* kernels, int nk, int host_root):
        """Fragments after a deletion; fills frag_roots (host last), returns count."""
        cdef int i, j, c, v, r, u, cu, winner, loser, m, nxt
        cdef int q[8]
        cdef int qhead = 0, qlen = 0
        cdef int alive = nk
        cdef int nout = 0
        cdef int nb[4]
        cdef int nn
        if nk == 0:
            self.frag_roots[0] = host_root
            return 1
        for i in range(nk):
            v = kernels[i]
            self.c_parent[i] = -1
            self.c_order[i] = 1
            self.c_seq[i] = i
            self.c_mhead[i] = v
            self.c_mtail[i] = v
            self.c_fhead[i] = v
            self.c_ftail[i] = v
            self.v_clump[v] = i
            self.next_member[v] = -1
            self.next_frontier[v] = -1
            q[qlen & 7] = i
            qlen += 1
        while alive > 1:
            c = q[qhead & 7]
            qhead += 1
            qlen -= 1
            if self.c_parent[c] != -1:
                continue
            v = self.c_fhead[c]
            self.c_fhead[c] = self.next_frontier[v]
            if self.c_fhead[c] == -1:
                self.c_ftail[c] = -1
            r = c
            nn = self._collect_neighbors(v, nb)
            for j in range(nn):
                u = nb[j]
                cu = self.v_clump[u]
                if cu == -1:
                    self.v_clump[u] = r
                    self.c_order[r] += 1
                    self.next_member[u] = -1
                    self.next_member[self.c_mtail[r]] = u
                    self.c_mtail[r] = u
                    self.next_frontier[u] = -1
                    if self.c_ftail[r] == -1:
                        self.c_fhead[r] = u
                    else:
                        self.next_frontier[self.c_ftail[r]] = u
                    self.c_ftail[r] = u
                    continue
                cu = self._find_clump_root(u)
                if cu == r:
                    continue
                if self.c_order[cu] > self.c_order[r] or (
                        self.c_order[cu] == self.c_order[r]
                        and self.c_seq[cu] < self.c_seq[r]):
                    winner = cu
                    loser = r
                else:
                    winner = r
                    loser = cu
                self.c_parent[loser] = winner
                self.c_order[winner] += self.c_order[loser]
                self.next_member[self.c_mtail[winner]] = self.c_mhead[loser]
                self.c_mtail[winner] = self.c_mtail[loser]
                self.c_mhead[loser] = -1
                self.c_mtail[loser] = -1
                if self.c_fhead[loser] != -1:
                    if self.c_ftail[winner] == -1:
                        self.c_fhead[winner] = self.c_fhead[loser]
                    else:
                        self.next_frontier[self.c_ftail[winner]] = self.c_fhead[loser]
                    self.c_ftail[winner] = self.c_ftail[loser]
                self.c_fhead[loser] = -1
                self.c_ftail[loser] = -1
                alive -= 1
                r = winner
            if alive == 1:
                break
            if self.c_fhead[r] == -1:
                self.frag_roots[nout] = self._extract_clump(r, host_root)
                nout += 1
                alive -= 1
                if r != c:
                    for j in range(qlen):
                        if q[(qhead + j) & 7] == r:
                            for i in range(j, qlen - 1):
                                q[(qhead + i) & 7] = q[(qhead + i + 1) & 7]
                            qlen -= 1
                            break
            elif r == c:
                q[(qhead + qlen) & 7] = c
                qlen += 1
        # clear surviving labels; every clump slot of this episode is now dead
        for i in range(nk):
            if self.c_parent[i] == -1:
                m = self.c_mhead[i]
                while m != -1:
                    self.v_clump[m] = -1
                    nxt = self.next_member[m]
                    m = nxt
                self.c_mhead[i] = -1
                self.c_mtail[i] = -1
        self.frag_roots[nout] = host_root
        return nout + 1

    # -- stepping ----------------------------------------------------------------

    cdef inline void _picker_swap(self, int j, int i):
        cdef int a = self.perm[j]
        cdef int b = self.perm[i]
        self.perm[j] = b
        self.perm[i] = a
        self.pos[a] = i
        self.pos[b] = j

    cpdef long long step_up(self):
        """Occupy a uniformly chosen unoccupied site; returns the new n."""
        cdef int s, j, x, y
        cdef int L = self.L
        if self.n_occupied >= self.N:
            raise ValueError("lattice full")
        if self.pairing == 0:
            j = self.k + <int>self._bounded(0, <unsigned long long>(self.N - self.k))
            s = self.perm[j]
            self._picker_swap(j, self.k)
            self.k += 1
        else:
            while True:
                x = <int>self._bounded(0, <unsigned long long>L)
                y = <int>self._bounded(1, <unsigned long long>L)
                s = y * L + x
                if not self.occupied[s]:
                    break
            self._picker_swap(self.pos[s], self.k)
            self.k += 1
        self._occupy(s)
        if self.track_mask:
            self.occ_mask ^= (<unsigned int>1 << s)
        return self.n_occupied

    cpdef long long step_down(self):
        """Vacate a uniformly chosen occupied site; returns the new n."""
        cdef int s, j, x, y
        cdef int L = self.L
        if self.n_occupied <= 0:
            raise ValueError("lattice empty")
        if self.pairing == 0:
            j = <int>self._bounded(0, <unsigned long long>self.k)
            s = self.perm[j]
            self._picker_swap(j, self.k - 1)
            self.k -= 1
        else:
            while True:
                x = <int>self._bounded(0, <unsigned long long>L)
                y = <int>self._bounded(1, <unsigned long long>L)
                s = y * L + x
                if self.occupied[s]:
                    break
            self._picker_swap(self.pos[s], self.k - 1)
            self.k -= 1
        self._deoccupy(s)
        if self.track_mask:
            self.occ_mask ^= (<unsigned int>1 << s)
        return self.n_occupied

    def occupy_site(self, int s):
        """Occupy a specific site (snapshot restore, tests)."""
        if not 0 <= s < self.N:
            raise ValueError("site out of range")
        if self.occupied[s]:
            raise ValueError(f"site {s} already occupied")
        self._picker_swap(self.pos[s], self.k)
        self.k += 1
        self._occupy(s)
        if self.track_mask:
            self.occ_mask ^= (<unsigned int>1 << s)
        return self.n_occupied

    def deoccupy_site(self, int s):
        if not 0 <= s < self.N:
            raise ValueError("site out of range")
        if not self.occupied[s]:
            raise ValueError(f"site {s} not occupied")
        self._picker_swap(self.pos[s], self.k - 1)
        self.k -= 1
        self._deoccupy(s)
        if self.track_mask:
            self.occ_mask ^= (<unsigned int>1 << s)
        return self.n_occupied

    # -- phases ------------------------------------------------------------------

    cpdef long long sweep_up_to(self, long long n_target):
        """Step up to n_target without recording; returns steps taken."""
        cdef long long steps = 0
        while self.n_occupied < n_target:
            self.step_up()
            steps += 1
        return steps

    cpdef long long sweep_down_to(self, long long n_target):
        cdef long long steps = 0
        while self.n_occupied > n_target:
            self.step_down()
            steps += 1
        return steps

    cdef void _cycle_window(self, int n_lo, int n_hi, bint record,
                            long long[::1] s0, long long[::1] s1, long long[::1] s2,
                            bint use_hist, long long[::1] hist,
                            object trace, int trace_n):
        cdef long long n = self.n_occupied
        cdef int i
        cdef bint sp1
        while n < n_hi:
            n = self.step_up()
            if record:
                i = <int>(n - n_lo)
                s0[i] += 1
                sp1 = (self.tally_[1] | self.tally_[2] | self.tally_[3]) != 0
                if sp1:
                    s1[i] += 1
                    if self.tally_[3] != 0:
                        s2[i] += 1
                if trace is not None and n == trace_n:
                    trace.append(1 if sp1 else 0)
                if use_hist:
                    hist[self.occ_mask] += 1
        while n > n_lo:
            n = self.step_down()
            if record:
                i = <int>(n - n_lo)
                s0[i] += 1
                sp1 = (self.tally_[1] | self.tally_[2] | self.tally_[3]) != 0
                if sp1:
                    s1[i] += 1
                    if self.tally_[3] != 0:
                        s2[i] += 1
                if trace is not None and n == trace_n:
                    trace.append(1 if sp1 else 0)
                if use_hist:
                    hist[self.occ_mask] += 1

    def run_window(self, int n_lo, int n_hi, long long cycles, counters=None,
                   config_hist=None, trace=None, int trace_n=-1):
        """Run up/down cycles between n_lo and n_hi, recording into counters."""
        cdef bint record = counters is not None
        cdef long long[::1] s0, s1, s2
        cdef long long[::1] hist
        cdef bint use_hist = config_hist is not None
        cdef long long cyc = 0
        cdef long long steps_per_cycle = 2 * (<long long>n_hi - n_lo)
        empty = np.zeros(1, dtype=np.int64)
        if record:
            s0 = counters.s0
            s1 = counters.s1
            s2 = counters.s2
            if counters.n_lo != n_lo or counters.n_hi != n_hi or counters.L != self.L:
                raise ValueError("counters do not match the window")
        else:
            s0 = empty
            s1 = empty
            s2 = empty
        if use_hist:
            if self.N > 28:
                raise ValueError("config histogram only supported for tiny lattices")
            hist = config_hist
            self._init_mask()
        else:
            hist = empty
        try:
            for cyc in range(cycles):
                self._cycle_window(n_lo, n_hi, record, s0, s1, s2,
                                   use_hist, hist, trace, trace_n)
                if record:
                    counters.cycles += 1
                    counters.steps += steps_per_cycle
        finally:
            self.track_mask = False
        return cycles * steps_per_cycle

    cdef long long _cycle_selforg(self, bint record,
                                  long long[::1] s0, long long[::1] s1, long long[::1] s2):
        cdef long long n = self.n_occupied
        cdef long long steps = 0
        cdef bint sp1
        while (self.tally_[1] | self.tally_[2] | self.tally_[3]) == 0:
            n = self.step_up()
            steps += 1
            if record:
                s0[n] += 1
                sp1 = (self.tally_[1] | self.tally_[2] | self.tally_[3]) != 0
                if sp1:
                    s1[n] += 1
                    if self.tally_[3] != 0:
                        s2[n] += 1
        while (self.tally_[1] | self.tally_[2] | self.tally_[3]) != 0:
            n = self.step_down()
            steps += 1
            if record:
                s0[n] += 1
                sp1 = (self.tally_[1] | self.tally_[2] | self.tally_[3]) != 0
                if sp1:
                    s1[n] += 1
                    if self.tally_[3] != 0:
                        s2[n] += 1
        return steps

    def run_selforg(self, long long cycles, counters=None):
        """Self-organized cycles: up until spanning, down until not."""
        cdef bint record = counters is not None
        cdef long long[::1] s0, s1, s2
        cdef long long steps = 0, cyc
        empty = np.zeros(1, dtype=np.int64)
        if record:
            if counters.n_lo != 0 or counters.n_hi != self.N or counters.L != self.L:
                raise ValueError("self-organized counters must cover [0, N]")
            s0 = counters.s0
            s1 = counters.s1
            s2 = counters.s2
        else:
            s0 = empty
            s1 = empty
            s2 = empty
        for cyc in range(cycles):
            steps = self._cycle_selforg(record, s0, s1, s2)
            if record:
                counters.cycles += 1
                counters.steps += steps
        return steps

    cdef void _init_mask(self):
        cdef long long s
        cdef unsigned int m = 0
        for s in range(self.N):
            if self.occupied[s]:
                m |= (<unsigned int>1 << s)
        self.occ_mask = m
        self.track_mask = True

    # -- queries -------------------------------------------------------------------

    @property
    def n(self):
        return self.n_occupied

    def spans(self, int dims_required):
        if dims_required == 1:
            return (self.tally_[1] | self.tally_[2] | self.tally_[3]) != 0
        if dims_required == 2:
            return self.tally_[3] != 0
        raise ValueError("dims_required must be 1 or 2")

    def tally(self):
        return (self.tally_[0], self.tally_[1], self.tally_[2], self.tally_[3])

    def is_occupied(self, int s):
        return self.occupied[s] != 0

    def occupied_sites(self):
        cdef long long s
        return [s for s in range(self.N) if self.occupied[s]]

    def component_label(self, int s):
        """Opaque cluster label of an occupied site (its current root)."""
        if not self.occupied[s]:
            raise ValueError(f"site {s} not occupied")
        return self._find_root(s)

    def cluster_stats(self, int s):
        """(order, bc_xlo, bc_xhi, bc_ylo, bc_yhi) of the cluster at site s."""
        if not self.occupied[s]:
            raise ValueError(f"site {s} not occupied")
        cdef int r = self._find_root(s)
        cdef int base = 4 * r
        return (self.g_order[r], self.g_bc[base], self.g_bc[base + 1],
                self.g_bc[base + 2], self.g_bc[base + 3])

    def live_graph_records(self):
        return self.live_records
