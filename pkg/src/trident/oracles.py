"""Brute-force validators, implemented independently of the interpreter.

These are textbook algorithms with deliberately different structure from
the DSL execution path: priority-queue Dijkstra, all-pairs path counting
for betweenness (n <= 64), dense power iteration for PageRank, and
ordered-triple enumeration for triangles.
"""

from __future__ import annotations

import heapq
from collections import deque

import numpy as np

from .errors import SizeError
from .graph import CsrGraph
from .syntax import INT_MAX

_BC_LIMIT = 64


def oracle_dijkstra(g: CsrGraph, src: int) -> list[int]:
    """Exact shortest distances from src; unreachable vertices get INT_MAX."""
    dist = [INT_MAX] * g.n
    dist[src] = 0
    heap = [(0, src)]
    done = [False] * g.n
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for e in g.out_edges(u):
            v = g.adj[e]
            nd = d + g.weights[e]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def _bfs_levels_and_counts(g: CsrGraph, src: int) -> tuple[list[int], list[float]]:
    """Unweighted BFS distance and shortest-path counts from src."""
    dist = [-1] * g.n
    paths = [0.0] * g.n
    dist[src] = 0
    paths[src] = 1.0
    q = deque([src])
    while q:
        u = q.popleft()
        for v in g.neighbors(u):
            if dist[v] == -1:
                dist[v] = dist[u] + 1
                q.append(v)
            if dist[v] == dist[u] + 1:
                paths[v] += paths[u]
    return dist, paths


def oracle_brandes(g: CsrGraph, sources: list[int]) -> list[float]:
    """Betweenness accumulation over the given sources by explicit
    all-pairs shortest-path counting.

    For each source s and target t, a vertex v on some shortest s-t path
    contributes paths(s,v) * paths(v,t) / paths(s,t).  Contributions are
    halved (each unordered pair is seen from both endpoints when the full
    vertex set drives an undirected run), matching the corpus convention.
    """
    if g.n > _BC_LIMIT:
        raise SizeError(f"brute-force betweenness is limited to n <= {_BC_LIMIT}")
    dist = []
    paths = []
    for s in range(g.n):
        d, p = _bfs_levels_and_counts(g, s)
        dist.append(d)
        paths.append(p)
    bc = [0.0] * g.n
    for s in sources:
        for t in range(g.n):
            if t == s or dist[s][t] == -1:
                continue
            for v in range(g.n):
                if v == s or v == t:
                    continue
                if dist[s][v] == -1 or dist[v][t] == -1:
                    continue
                if dist[s][v] + dist[v][t] == dist[s][t]:
                    bc[v] += 0.5 * paths[s][v] * paths[v][t] / paths[s][t]
    return bc


def oracle_pagerank_power(g: CsrGraph, damping: float, iters: int,
                          tol: float | None = None) -> list[float]:
    """Dense power iteration: r' = (1-d)/n + d * M r, where M[v][u] is
    1/outdeg(u) for every edge u->v.  Dangling mass is dropped, matching
    the in-neighbor formulation.  Stops early when the max per-vertex
    change falls below ``tol`` (if given)."""
    n = g.n
    M = np.zeros((n, n))
    out_deg = np.array([g.degree(u) for u in range(n)], dtype=float)
    for u in range(n):
        if out_deg[u] == 0:
            continue
        for v in g.neighbors(u):
            M[v, u] += 1.0 / out_deg[u]
    r = np.full(n, 1.0 / n)
    base = (1.0 - damping) / n
    for _ in range(iters):
        r_next = base + damping * (M @ r)
        delta = np.max(np.abs(r_next - r))
        r = r_next
        if tol is not None and delta < tol:
            break
    return [float(x) for x in r]


def oracle_triangles_enum(g: CsrGraph) -> int:
    """Count triangles by enumerating ordered triples u < v < w with edge
    existence checks (set semantics: parallel edges count once)."""
    count = 0
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if not g.has_edge(u, v):
                continue
            for w in range(v + 1, g.n):
                if g.has_edge(u, w) and g.has_edge(v, w):
                    count += 1
    return count
