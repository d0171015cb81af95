"""Exact shortest paths with deterministic parent pointers.

Parent rule (shared by every route): ``parent[v]`` is the smallest-id
neighbour ``u`` with ``dist[u] < dist[v]`` whose edge realizes ``dist[v]``
within a relative tolerance of 1e-9. This is what a Dijkstra that keeps the
smaller parent on equal relaxations produces, and it makes recovered paths
independent of heap order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .errors import CDPError, DisconnectedGraphError
from .graph import WeightedGraph

REL_TOL = 1e-9
_CHUNK = 256


@dataclass(frozen=True, eq=False)
class SsspResult:
    source: int
    dist: np.ndarray
    parent: np.ndarray  # -1 for the source and unreachable vertices


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    dist: np.ndarray
    parent: np.ndarray

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def row(self, source: int) -> SsspResult:
        return SsspResult(source, self.dist[source], self.parent[source])

    def path(self, i: int, j: int) -> list[int]:
        return recover_path(self.row(i), j)


def _directed_edges(g: WeightedGraph):
    src = np.concatenate([g.u, g.v])
    dst = np.concatenate([g.v, g.u])
    w = np.concatenate([g.w, g.w])
    order = np.lexsort((src, dst))
    return src[order], dst[order], w[order]


def _tight_parents(g: WeightedGraph, dist: np.ndarray, fallback: np.ndarray) -> np.ndarray:
    """Apply the parent rule to every row of ``dist`` (shape m x n)."""
    m, n = dist.shape
    parent = np.full((m, n), -1, dtype=np.int32)
    if g.n_edges == 0:
        return parent
    src, dst, w = _directed_edges(g)
    heads, starts = np.unique(dst, return_index=True)
    for lo in range(0, m, _CHUNK):
        block = dist[lo:lo + _CHUNK]
        ds, dd = block[:, src], block[:, dst]
        tight = (ds < dd) & (ds + w <= dd * (1.0 + REL_TOL))
        cand = np.where(tight, src, n)
        best = np.full(block.shape, n, dtype=np.int64)
        best[:, heads] = np.minimum.reduceat(cand, starts, axis=1)
        best[best == n] = -1
        parent[lo:lo + _CHUNK] = best
    # an edge shorter than the spacing of floats near dist[v] can leave v without
    # a strictly closer neighbour; keep the solver's own predecessor there
    missing = (parent < 0) & np.isfinite(dist) & (dist > 0)
    parent[missing] = fallback[missing]
    return parent


def sssp(g: WeightedGraph, source: int) -> SsspResult:
    """Binary-heap Dijkstra with lazy deletion."""
    n = g.n_vertices
    if not 0 <= source < n:
        raise CDPError(f"source {source} out of range for {n} vertices")
    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int32)
    dist[source] = 0.0
    done = np.zeros(n, dtype=bool)
    heap = [(0.0, source)]
    adj = g.adjacency
    while heap:
        d, x = heapq.heappop(heap)
        if done[x]:
            continue
        done[x] = True
        for y, w in adj[x]:
            nd = d + w
            if nd < dist[y]:
                dist[y] = nd
                pred[y] = x
                heapq.heappush(heap, (nd, y))
    parent = _tight_parents(g, dist[None, :], pred[None, :])[0]
    return SsspResult(source, dist, parent)


def apsp(g: WeightedGraph, backend: str = "scipy") -> DistanceMatrix:
    """All-pairs distances plus a parent table; the graph must be connected.

    ``backend="scipy"`` runs the C Dijkstra from ``scipy.sparse.csgraph``;
    ``backend="python"`` loops :func:`sssp`. Both apply the same parent rule.
    """
    n = g.n_vertices
    if backend == "scipy":
        dist, pred = dijkstra(g.to_csr(), directed=False, return_predecessors=True)
        pred = np.where(pred < 0, -1, pred).astype(np.int32)
    elif backend == "python":
        rows = [sssp(g, s) for s in range(n)]
        dist = np.array([r.dist for r in rows]).reshape(n, n)
        pred = np.array([r.parent for r in rows], dtype=np.int32).reshape(n, n)
    else:
        raise CDPError(f"unknown backend {backend!r}")
    if not np.all(np.isfinite(dist)):
        raise DisconnectedGraphError(
            "graph is disconnected; reduce it with graph.giant_component before computing all-pairs distances"
        )
    parent = pred if backend == "python" else _tight_parents(g, dist, pred)
    return DistanceMatrix(dist, parent)


def recover_path(res: SsspResult, target: int) -> list[int]:
    """Vertex list from ``res.source`` to ``target`` following parent pointers."""
    if not np.isfinite(res.dist[target]):
        raise CDPError(f"vertex {target} is unreachable from {res.source}")
    path = [int(target)]
    while path[-1] != res.source:
        p = int(res.parent[path[-1]])
        if p < 0 or len(path) > res.dist.size:
            raise CDPError(f"broken parent chain from {target} to {res.source}")
        path.append(p)
    path.reverse()
    return path
