"""Post-projection ratios and per-pair distortion certificates.

For an admissible pair the certificate is the sandwich

    psi <= r_tilde / r <= 1 / phi_star

where ``psi`` is the captured norm of the pair's unit chord and ``phi_star``
the smallest captured edge cosine along the projected shortest path. Both
sides hold for any orthonormal ``V``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import AdmissibleSet
from .datasets import PointCloud
from .errors import CDPError
from .graph import WeightedGraph
from .shortest_paths import DistanceMatrix, SsspResult, recover_path

HOLD_TOL = 1e-9
MAX_STORED_PATHS = 10_000

CSV_COLUMNS = ("i", "j", "psi", "phi_star", "inv_phi_star", "r", "r_tilde", "ratio", "holds", "path")


@dataclass(frozen=True)
class CertificateRecord:
    i: int
    j: int
    r: float
    r_tilde: float
    psi: float
    phi_star: float
    path: tuple[int, ...]
    holds: bool

    @property
    def ratio(self) -> float:
        return self.r_tilde / self.r

    @property
    def inv_phi_star(self) -> float:
        return 1.0 / self.phi_star


def edge_cosines(g: WeightedGraph, cloud: PointCloud, V) -> np.ndarray:
    """``||V^T e|| / ||e||`` for every edge, in the graph's edge order."""
    e = cloud.points[g.v] - cloud.points[g.u]
    return np.linalg.norm(e @ np.asarray(V, dtype=float), axis=1) / np.linalg.norm(e, axis=1)


def _edge_lookup(g: WeightedGraph, a, b) -> np.ndarray:
    n = g.n_vertices
    lo, hi = np.minimum(a, b).astype(np.int64), np.maximum(a, b).astype(np.int64)
    keys = g.u * n + g.v  # already sorted: edges are ordered by (u, v)
    idx = np.searchsorted(keys, lo * n + hi)
    idx = np.minimum(idx, keys.size - 1)
    if np.any(keys[idx] != lo * n + hi):
        raise CDPError("parent pointer does not follow a graph edge")
    return idx


def post_ratio(i: int, j: int, V, projected_dm: DistanceMatrix, cloud: PointCloud) -> float:
    """Projected chord over projected-graph distance."""
    chord = np.linalg.norm((cloud.points[j] - cloud.points[i]) @ np.asarray(V, dtype=float))
    return float(chord / projected_dm.dist[i, j])


def psi(i: int, j: int, V, cloud: PointCloud) -> float:
    diff = cloud.points[j] - cloud.points[i]
    norm = np.linalg.norm(diff)
    if norm == 0:
        raise CDPError(f"points {i} and {j} coincide")
    return float(np.linalg.norm((diff / norm) @ np.asarray(V, dtype=float)))


def phi_star(i: int, j: int, V, cloud: PointCloud, g: WeightedGraph,
             projected_sssp: SsspResult) -> tuple[float, list[int]]:
    """Smallest edge cosine along the projected shortest path from ``i`` to ``j``.

    ``projected_sssp`` must be rooted at ``i``; edge vectors are taken in the
    cloud's own coordinates.
    """
    if projected_sssp.source != i:
        raise CDPError(f"shortest-path tree is rooted at {projected_sssp.source}, not {i}")
    path = recover_path(projected_sssp, j)
    if len(path) < 2:
        raise CDPError("phi_star needs two distinct endpoints")
    cos = edge_cosines(g, cloud, V)
    ids = _edge_lookup(g, np.array(path[:-1]), np.array(path[1:]))
    return float(cos[ids].min()), path


def phi_graph(g: WeightedGraph, V, cloud: PointCloud) -> float:
    """Uniform bound constant: smallest edge cosine over the whole graph."""
    if g.n_edges == 0:
        raise CDPError("graph has no edges")
    return float(edge_cosines(g, cloud, V).min())


def _path_minima(g: WeightedGraph, parent: np.ndarray, cos: np.ndarray) -> np.ndarray:
    """Per row of a parent table, the minimum edge cosine on the tree path to each vertex.

    Pointer doubling: after round t every entry holds the minimum over the last
    2^t edges towards the root.
    """
    m, n = parent.shape
    vert = np.broadcast_to(np.arange(n), parent.shape)
    has = parent >= 0
    best = np.full(parent.shape, np.inf)
    best[has] = cos[_edge_lookup(g, parent[has], vert[has])]
    anc = parent.astype(np.int64)
    while np.any(anc >= 0):
        live = anc >= 0
        safe = np.where(live, anc, 0)
        best = np.where(live, np.minimum(best, np.take_along_axis(best, safe, axis=1)), best)
        anc = np.where(live, np.take_along_axis(anc, safe, axis=1), -1)
    return best


@dataclass(frozen=True, eq=False)
class CertificateTable:
    """Certificates for an admissible set, one row per pair (column store)."""

    i: np.ndarray
    j: np.ndarray
    r: np.ndarray
    r_tilde: np.ndarray
    psi: np.ndarray
    phi_star: np.ndarray
    holds: np.ndarray
    projected_dm: DistanceMatrix
    stored_paths: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return int(self.i.size)

    @property
    def ratio(self) -> np.ndarray:
        return self.r_tilde / self.r

    @property
    def inv_phi_star(self) -> np.ndarray:
        return 1.0 / self.phi_star

    def path(self, k: int) -> tuple[int, ...]:
        if k < len(self.stored_paths):
            return self.stored_paths[k]
        return tuple(self.projected_dm.path(int(self.i[k]), int(self.j[k])))

    def __getitem__(self, k: int) -> CertificateRecord:
        return CertificateRecord(int(self.i[k]), int(self.j[k]), float(self.r[k]), float(self.r_tilde[k]),
                                 float(self.psi[k]), float(self.phi_star[k]), self.path(k), bool(self.holds[k]))

    def __iter__(self) -> Iterator[CertificateRecord]:
        return (self[k] for k in range(len(self)))

    @property
    def all_hold(self) -> bool:
        return bool(np.all(self.holds))


def certify(ds: AdmissibleSet, V, cloud: PointCloud, g: WeightedGraph, projected_dm: DistanceMatrix,
            max_stored_paths: int = MAX_STORED_PATHS) -> CertificateTable:
    """Evaluate the certificate for every admissible pair.

    ``projected_dm`` is the all-pairs result on ``g`` reweighted by the
    projection. Paths are materialized for the first ``max_stored_paths``
    pairs and recovered from the parent table on demand after that.
    """
    V = np.asarray(V, dtype=float)
    p = ds.pairs
    diff = cloud.points[p.j] - cloud.points[p.i]
    proj_chord = np.linalg.norm(diff @ V, axis=1)
    psi_v = np.linalg.norm((diff / p.euclid[:, None]) @ V, axis=1)
    r_tilde = proj_chord / projected_dm.dist[p.i, p.j]

    sources, row_of = np.unique(p.i, return_inverse=True)
    minima = _path_minima(g, projected_dm.parent[sources], edge_cosines(g, cloud, V))
    phi = minima[row_of, p.j]

    ratio = r_tilde / p.r
    holds = (psi_v - HOLD_TOL <= ratio) & (ratio <= 1.0 / phi + HOLD_TOL)
    stored = tuple(tuple(projected_dm.path(int(a), int(b)))
                   for a, b in zip(p.i[:max_stored_paths], p.j[:max_stored_paths]))
    return CertificateTable(p.i.copy(), p.j.copy(), p.r.copy(), r_tilde, psi_v, phi, holds, projected_dm, stored)


def _path_strings(dist_row, parent_row, source, names, sep=">"):
    """Joined label path from ``source`` to every reachable vertex, built prefix-first."""
    text = [None] * dist_row.size
    text[source] = names[source]
    reachable = np.flatnonzero(np.isfinite(dist_row))
    order = reachable[np.argsort(dist_row[reachable], kind="stable")].tolist()
    parent = parent_row.tolist()
    for v in order:
        if v != source:
            # parents sit strictly closer to the source, so their prefix already exists
            text[v] = text[parent[v]] + sep + names[v]
    return text


def write_certificates_csv(certs: CertificateTable, path, labels=None) -> None:
    """One row per admissible pair; ``path`` is written as labels joined by ``>``."""
    dm = certs.projected_dm
    names = list(labels) if labels is not None else [str(v) for v in range(dm.n)]
    ii, jj = certs.i.tolist(), certs.j.tolist()
    cols = [[repr(x) for x in a.tolist()]
            for a in (certs.psi, certs.phi_star, certs.inv_phi_star, certs.r, certs.r_tilde, certs.ratio)]
    holds = ["true" if h else "false" for h in certs.holds.tolist()]
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(CSV_COLUMNS)
        source, strings = None, None
        for k, (a, b) in enumerate(zip(ii, jj)):
            if k < len(certs.stored_paths):
                text = ">".join(names[v] for v in certs.stored_paths[k])
            else:
                if a != source:
                    source, strings = a, _path_strings(dm.dist[a], dm.parent[a], a, names)
                text = strings[b]
            out.writerow([names[a], names[b], *(c[k] for c in cols), holds[k], text])


def read_certificates_csv(path) -> dict[str, np.ndarray]:
    """Numeric columns of a certificate file plus the ``holds`` flags and raw ``i``/``j``/``path`` text."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise CDPError(f"{path}: no certificate rows")
    missing = set(CSV_COLUMNS) - set(rows[0])
    if missing:
        raise CDPError(f"{path}: missing columns {sorted(missing)}")
    out = {c: np.array([float(row[c]) for row in rows])
           for c in ("psi", "phi_star", "inv_phi_star", "r", "r_tilde", "ratio")}
    out["holds"] = np.array([row["holds"] == "true" for row in rows])
    for c in ("i", "j", "path"):
        out[c] = np.array([row[c] for row in rows], dtype=object)
    return out
