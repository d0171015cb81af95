"""Mutual k-nearest-neighbour graphs and giant-component reduction."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import pdist, squareform

from .datasets import PointCloud
from .errors import CDPError, DegenerateInputError


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph; edge ``e`` joins ``u[e] < v[e]`` with length ``w[e] > 0``.

    Edges are kept sorted by ``(u, v)`` so that two graphs with the same edge set
    compare equal array-for-array.
    """

    n_vertices: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.int64).reshape(-1)
        v = np.asarray(self.v, dtype=np.int64).reshape(-1)
        w = np.asarray(self.w, dtype=float).reshape(-1)
        if not (u.shape == v.shape == w.shape):
            raise CDPError("edge arrays must have equal length")
        if u.size:
            if np.any(u >= v):
                raise CDPError("edges must be stored with u < v (no self-loops)")
            if u.min() < 0 or v.max() >= self.n_vertices:
                raise CDPError("edge endpoint out of range")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise CDPError("edge weights must be finite and strictly positive")
        order = np.lexsort((v, u))
        u, v, w = u[order], v[order], w[order]
        if u.size > 1 and np.any((u[1:] == u[:-1]) & (v[1:] == v[:-1])):
            raise CDPError("duplicate edge")
        for name, arr in (("u", u), ("v", v), ("w", w)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_edges(cls, n_vertices, edges) -> "WeightedGraph":
        """Build from ``(a, b, w)`` triples in any endpoint order."""
        edges = list(edges)
        if not edges:
            return cls(n_vertices, [], [], [])
        a, b, w = (np.array(col) for col in zip(*edges))
        return cls(n_vertices, np.minimum(a, b), np.maximum(a, b), w)

    @property
    def n_edges(self) -> int:
        return int(self.u.size)

    def edge_set(self) -> set[tuple[int, int]]:
        return set(zip(self.u.tolist(), self.v.tolist()))

    @cached_property
    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj = [[] for _ in range(self.n_vertices)]
        for a, b, w in zip(self.u.tolist(), self.v.tolist(), self.w.tolist()):
            adj[a].append((b, w))
            adj[b].append((a, w))
        for nbrs in adj:
            nbrs.sort()
        return adj

    def degrees(self) -> np.ndarray:
        return np.bincount(np.concatenate([self.u, self.v]), minlength=self.n_vertices)

    def to_csr(self) -> csr_matrix:
        n = self.n_vertices
        return csr_matrix(
            (np.concatenate([self.w, self.w]), (np.concatenate([self.u, self.v]), np.concatenate([self.v, self.u]))),
            shape=(n, n),
        )

    def reweighted(self, w) -> "WeightedGraph":
        """Same edge set with new weights (given in this graph's edge order)."""
        return WeightedGraph(self.n_vertices, self.u, self.v, w)


@dataclass(frozen=True, eq=False)
class ComponentMap:
    """Which original vertices survived the giant-component reduction."""

    n_original: int
    kept: np.ndarray
    old_to_new: np.ndarray  # -1 for dropped vertices

    @property
    def dropped(self) -> np.ndarray:
        return np.flatnonzero(self.old_to_new < 0)

    @property
    def is_identity(self) -> bool:
        return self.kept.size == self.n_original


def pairwise_distances(points) -> np.ndarray:
    return squareform(pdist(np.asarray(points, dtype=float)))


def mutual_knn(cloud: PointCloud, k_nn: int) -> WeightedGraph:
    """Edge (i, j) iff each point is among the other's ``k_nn`` nearest neighbours.

    Ties at rank ``k_nn`` go to the smaller point index. Duplicate points raise
    ``DegenerateInputError`` because detour ratios are undefined at zero distance.
    """
    n = cloud.n
    if isinstance(k_nn, bool) or not 1 <= int(k_nn) < n:
        raise CDPError(f"k_nn must satisfy 1 <= k_nn < N={n}, got {k_nn}")
    k_nn = int(k_nn)
    dist = pairwise_distances(cloud.points)
    iu, ju = np.triu_indices(n, 1)
    zero = dist[iu, ju] == 0
    if np.any(zero):
        e = int(np.argmax(zero))
        raise DegenerateInputError(f"duplicate points {iu[e]} and {ju[e]} (zero distance)")

    np.fill_diagonal(dist, np.inf)
    nbrs = np.argsort(dist, axis=1, kind="stable")[:, :k_nn]
    is_nbr = np.zeros((n, n), dtype=bool)
    is_nbr[np.repeat(np.arange(n), k_nn), nbrs.ravel()] = True
    mutual = np.triu(is_nbr & is_nbr.T, 1)
    u, v = np.nonzero(mutual)
    w = np.linalg.norm(cloud.points[v] - cloud.points[u], axis=1)
    return WeightedGraph(n, u, v, w)


def giant_component(g: WeightedGraph) -> tuple[WeightedGraph, ComponentMap]:
    """Largest connected component, renumbered; size ties go to the component holding the smallest id."""
    n = g.n_vertices
    _, labels = connected_components(g.to_csr(), directed=False)
    sizes = np.bincount(labels)
    first = np.full(sizes.size, n)
    np.minimum.at(first, labels, np.arange(n))
    best = max(range(sizes.size), key=lambda c: (sizes[c], -first[c]))
    kept = np.flatnonzero(labels == best)
    old_to_new = np.full(n, -1, dtype=np.int64)
    old_to_new[kept] = np.arange(kept.size)
    keep_edge = labels[g.u] == best
    sub = WeightedGraph(kept.size, old_to_new[g.u[keep_edge]], old_to_new[g.v[keep_edge]], g.w[keep_edge])
    return sub, ComponentMap(n, kept, old_to_new)


def write_edges_csv(g: WeightedGraph, path, labels=None) -> None:
    """Debug export: one ``u,v,w`` row per edge."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["u", "v", "w"])
        for a, b, w in zip(g.u.tolist(), g.v.tolist(), g.w.tolist()):
            out.writerow([labels[a] if labels else a, labels[b] if labels else b, repr(w)])
