"""CSR graph storage, edge-list loading, partitioning, weight assignment.

Graphs are immutable after construction: forward CSR plus a reverse CSR
whose slots map back to forward edge indices, so edge properties are
shared between the two orientations.
"""

from __future__ import annotations

import random
from bisect import bisect_left
from dataclasses import dataclass, field

from .errors import (ArgError, EmptyGraphError, FormatError, GraphIoError,
                     RangeError)


@dataclass(frozen=True)
class CsrGraph:
    """Forward + reverse compressed-sparse-row adjacency with edge weights.

    ``offsets`` has length n+1; ``adj``/``weights`` have length m.  For an
    undirected graph both directions of every logical edge are stored and
    ``m`` counts both.  ``rev_eid[k]`` is the forward edge index stored in
    reverse slot k, so ``weights[rev_eid[k]]`` is that edge's weight.
    """

    n: int
    m: int
    offsets: list[int]
    adj: list[int]
    weights: list[int]
    rev_offsets: list[int]
    rev_adj: list[int]
    rev_eid: list[int]
    directed: bool = True

    def degree(self, v: int) -> int:
        return self.offsets[v + 1] - self.offsets[v]

    def in_degree(self, v: int) -> int:
        return self.rev_offsets[v + 1] - self.rev_offsets[v]

    def neighbors(self, v: int) -> list[int]:
        return self.adj[self.offsets[v]:self.offsets[v + 1]]

    def in_neighbors(self, v: int) -> list[int]:
        return self.rev_adj[self.rev_offsets[v]:self.rev_offsets[v + 1]]

    def out_edges(self, v: int) -> range:
        return range(self.offsets[v], self.offsets[v + 1])

    def in_slots(self, v: int) -> range:
        return range(self.rev_offsets[v], self.rev_offsets[v + 1])

    def find_edge(self, u: int, v: int) -> int | None:
        """First forward edge index for u->v, or None.  Rows are sorted."""
        lo, hi = self.offsets[u], self.offsets[u + 1]
        k = bisect_left(self.adj, v, lo, hi)
        if k < hi and self.adj[k] == v:
            return k
        return None

    def has_edge(self, u: int, v: int) -> bool:
        return self.find_edge(u, v) is not None


def _build_csr(n: int, edges: list[tuple[int, int, int]]) -> CsrGraph:
    """edges are (u, v, w) directed slots, one per stored direction."""
    by_src: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (u, v, w) in edges:
        by_src[u].append((v, w))
    offsets = [0] * (n + 1)
    adj: list[int] = []
    weights: list[int] = []
    for u in range(n):
        by_src[u].sort(key=lambda t: t[0])
        for (v, w) in by_src[u]:
            adj.append(v)
            weights.append(w)
        offsets[u + 1] = len(adj)
    m = len(adj)

    by_dst: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for u in range(n):
        for e in range(offsets[u], offsets[u + 1]):
            by_dst[adj[e]].append((u, e))
    rev_offsets = [0] * (n + 1)
    rev_adj: list[int] = []
    rev_eid: list[int] = []
    for v in range(n):
        by_dst[v].sort(key=lambda t: (t[0], t[1]))
        for (u, e) in by_dst[v]:
            rev_adj.append(u)
            rev_eid.append(e)
        rev_offsets[v + 1] = len(rev_adj)
    return CsrGraph(n=n, m=m, offsets=offsets, adj=adj, weights=weights,
                    rev_offsets=rev_offsets, rev_adj=rev_adj, rev_eid=rev_eid)


def from_edges(edges: list[tuple[int, int] | tuple[int, int, int]],
               directed: bool = True, default_weight: int = 1,
               n: int | None = None) -> CsrGraph:
    """Build a graph from (u, v[, w]) tuples.  n defaults to 1 + max id."""
    slots: list[tuple[int, int, int]] = []
    max_id = -1
    for t in edges:
        u, v = t[0], t[1]
        w = t[2] if len(t) == 3 else default_weight
        max_id = max(max_id, u, v)
        slots.append((u, v, w))
        if not directed and u != v:
            slots.append((v, u, w))
    count = max(n if n is not None else 0, max_id + 1)
    g = _build_csr(count, slots)
    return CsrGraph(**{**g.__dict__, "directed": directed})


def load_edge_list(path: str, directed: bool = True,
                   default_weight: int = 1) -> CsrGraph:
    """Load a whitespace-separated ``u v [w]`` edge list.

    Ids are 0-based; ``#``-prefixed lines and blank lines are skipped.
    Duplicate edges are kept as parallel edges.  Undirected input
    materializes both directions of every line (self-loops included).
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise GraphIoError(f"cannot read graph file {path!r}: {e}") from e

    edges: list[tuple[int, int, int]] = []
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) not in (2, 3):
            raise FormatError(lineno, f"expected 2 or 3 fields, got {len(fields)}")
        try:
            u = int(fields[0])
            v = int(fields[1])
            w = int(fields[2]) if len(fields) == 3 else default_weight
        except ValueError:
            raise FormatError(lineno, f"non-integer field in {stripped!r}") from None
        if u < 0 or v < 0:
            raise FormatError(lineno, f"negative vertex id in {stripped!r}")
        edges.append((u, v, w))

    return from_edges(edges, directed=directed, default_weight=default_weight)


def assign_random_weights(g: CsrGraph, lo: int, hi: int, seed: int) -> CsrGraph:
    """Return a copy of g with i.i.d. uniform integer weights in [lo, hi].

    Uses Python's Mersenne Twister seeded with ``seed``.  For undirected
    graphs the two stored directions of one logical edge get equal weight;
    parallel copies of the same pair are matched up by position.
    """
    if lo > hi:
        raise RangeError(f"lo ({lo}) exceeds hi ({hi})")
    rng = random.Random(seed)
    weights = list(g.weights)
    if g.directed:
        for e in range(g.m):
            weights[e] = rng.randint(lo, hi)
    else:
        # Draw once per canonical (u <= v) slot, then mirror onto the k-th
        # reverse copy so parallel edges stay consistent.
        pending: dict[tuple[int, int], list[int]] = {}
        for u in range(g.n):
            for e in g.out_edges(u):
                v = g.adj[e]
                if u < v or (u == v):
                    w = rng.randint(lo, hi)
                    weights[e] = w
                    if u != v:
                        pending.setdefault((v, u), []).append(w)
        taken: dict[tuple[int, int], int] = {}
        for u in range(g.n):
            for e in g.out_edges(u):
                v = g.adj[e]
                if u > v:
                    k = taken.get((u, v), 0)
                    taken[(u, v)] = k + 1
                    weights[e] = pending[(u, v)][k]
    return CsrGraph(n=g.n, m=g.m, offsets=g.offsets, adj=g.adj,
                    weights=weights, rev_offsets=g.rev_offsets,
                    rev_adj=g.rev_adj, rev_eid=g.rev_eid, directed=g.directed)


@dataclass(frozen=True)
class Partition:
    """One rank's contiguous block of the padded vertex range."""

    rank: int
    nranks: int
    local_begin: int
    local_end: int   # exclusive, in the padded id space
    n: int           # real vertex count of the graph
    padded: int = field(default=0)

    @property
    def size(self) -> int:
        return self.local_end - self.local_begin

    def owns(self, v: int) -> bool:
        return self.local_begin <= v < self.local_end

    def real_range(self) -> range:
        """Local vertices that actually exist (padding excluded)."""
        return range(min(self.local_begin, self.n), min(self.local_end, self.n))

    def to_local(self, v: int) -> int:
        if not self.owns(v):
            raise ArgError(f"vertex {v} not owned by rank {self.rank}")
        return v - self.local_begin

    def to_global(self, lv: int) -> int:
        if not (0 <= lv < self.size):
            raise ArgError(f"local id {lv} out of range on rank {self.rank}")
        return lv + self.local_begin


def block_partition(g: CsrGraph, nranks: int) -> list[Partition]:
    """Equal-size contiguous blocks of ceil(n/nranks) vertices per rank.

    The id space is padded up to ``ceil(n/nranks) * nranks``; padding
    vertices have degree 0 and fall in the trailing rank(s).
    """
    if nranks < 1:
        raise ArgError(f"nranks must be >= 1, got {nranks}")
    per_rank = (g.n + nranks - 1) // nranks if g.n else 0
    padded_n = per_rank * nranks
    parts = []
    for r in range(nranks):
        begin = r * per_rank
        end = begin + per_rank
        pad = max(0, end - max(g.n, begin))
        parts.append(Partition(rank=r, nranks=nranks, local_begin=begin,
                               local_end=end, n=g.n, padded=pad))
    assert parts == [] or parts[-1].local_end == padded_n
    return parts


def owner_of(v: int, nranks: int, n: int) -> int:
    per_rank = (n + nranks - 1) // nranks
    return v // per_rank


def min_wt(g: CsrGraph) -> int:
    if g.m == 0:
        raise EmptyGraphError("minWt on a graph with no edges")
    return min(g.weights)


def max_wt(g: CsrGraph) -> int:
    if g.m == 0:
        raise EmptyGraphError("maxWt on a graph with no edges")
    return max(g.weights)


def write_edge_list(g: CsrGraph, path: str) -> None:
    """Write g back as a ``u v w`` edge list (canonical form for undirected)."""
    with open(path, "w", encoding="utf-8") as f:
        for u in range(g.n):
            for e in g.out_edges(u):
                v = g.adj[e]
                if not g.directed and v < u:
                    continue  # each logical edge once
                f.write(f"{u} {v} {g.weights[e]}\n")
