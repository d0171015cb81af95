"""Detour ratios, admissible pairs, the non-convexity structure matrix and the projection."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .datasets import PointCloud
from .errors import CDPError, DegenerateInputError, EmptyAdmissibleSetError
from .graph import WeightedGraph
from .linalg import jacobi_eigh
from .shortest_paths import DistanceMatrix

PSD_TOL = 1e-10


class DegenerateSpectrumWarning(UserWarning):
    """lambda_k == lambda_{k+1}: the top-k subspace is not unique."""


@dataclass(frozen=True)
class PairRecord:
    i: int
    j: int
    euclid: float
    sp: float
    r: float


@dataclass(frozen=True, eq=False)
class PairTable:
    """Column store of unordered pairs ``i < j``; iterating yields :class:`PairRecord` rows."""

    i: np.ndarray
    j: np.ndarray
    euclid: np.ndarray
    sp: np.ndarray
    r: np.ndarray

    def __len__(self) -> int:
        return int(self.i.size)

    def __getitem__(self, k: int) -> PairRecord:
        return PairRecord(int(self.i[k]), int(self.j[k]), float(self.euclid[k]), float(self.sp[k]), float(self.r[k]))

    def __iter__(self) -> Iterator[PairRecord]:
        return (self[k] for k in range(len(self)))

    def select(self, idx) -> "PairTable":
        return PairTable(self.i[idx], self.j[idx], self.euclid[idx], self.sp[idx], self.r[idx])

    @classmethod
    def from_records(cls, records) -> "PairTable":
        records = list(records)
        cols = [np.array([getattr(rec, f) for rec in records]) for f in ("i", "j", "euclid", "sp", "r")]
        return cls(cols[0].astype(np.int64), cols[1].astype(np.int64),
                   *(c.astype(float) for c in cols[2:]))


@dataclass(frozen=True, eq=False)
class AdmissibleSet:
    tau: float
    pairs: PairTable

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray   # descending
    eigenvectors: np.ndarray  # columns aligned with eigenvalues

    @property
    def d(self) -> int:
        return self.eigenvalues.size


def standardize(cloud: PointCloud) -> PointCloud:
    """Zero mean and unit population standard deviation per coordinate."""
    if cloud.n < 2:
        raise DegenerateInputError("standardizing needs at least two points")
    mean = cloud.points.mean(axis=0)
    centered = cloud.points - mean
    std = np.sqrt(np.mean(centered**2, axis=0))
    flat = np.flatnonzero(std <= 1e-15 * np.maximum(1.0, np.abs(mean)))
    if flat.size:
        raise DegenerateInputError(f"coordinate x{flat[0]} has zero variance")
    return cloud.with_points(centered / std)


def convexity_ratios(cloud: PointCloud, graph: WeightedGraph, dm: DistanceMatrix) -> PairTable:
    """Euclidean length, graph distance and their ratio for every unordered pair."""
    n = cloud.n
    if graph.n_vertices != n or dm.n != n:
        raise CDPError("cloud, graph and distance matrix disagree on the number of vertices")
    i, j = np.triu_indices(n, 1)
    euclid = np.linalg.norm(cloud.points[j] - cloud.points[i], axis=1)
    if np.any(euclid == 0):
        e = int(np.argmax(euclid == 0))
        raise DegenerateInputError(f"duplicate points {i[e]} and {j[e]} (zero distance)")
    sp = dm.dist[i, j]
    return PairTable(i.astype(np.int64), j.astype(np.int64), euclid, sp, euclid / sp)


def admissible_set(records: PairTable, tau: float) -> AdmissibleSet:
    """Pairs with ``r <= tau`` (inclusive), in their original order."""
    if not 0 < tau < 1:
        raise CDPError(f"tau must lie in (0, 1), got {tau}")
    if not isinstance(records, PairTable):
        records = PairTable.from_records(records)
    picked = records.select(np.flatnonzero(records.r <= tau))
    if len(picked) == 0:
        raise EmptyAdmissibleSetError(f"no admissible pairs at tau={tau}")
    return AdmissibleSet(float(tau), picked)


def nonconvexity_index(ds: AdmissibleSet) -> float:
    """Mean detour ratio over the admissible pairs."""
    if len(ds) == 0:
        raise EmptyAdmissibleSetError("non-convexity index of an empty pair set")
    return math.fsum(ds.pairs.r.tolist()) / len(ds)


def _pair_directions(ds: AdmissibleSet, cloud: PointCloud) -> np.ndarray:
    p = ds.pairs
    return (cloud.points[p.j] - cloud.points[p.i]) / p.euclid[:, None]


def structure_matrix(ds: AdmissibleSet, cloud: PointCloud) -> np.ndarray:
    """Average of ``(1 - r) u u^T`` over admissible pairs.

    Each entry is an exactly rounded sum (``math.fsum``), so the result does not
    depend on pair order.
    """
    if len(ds) == 0:
        raise EmptyAdmissibleSetError("structure matrix of an empty pair set")
    u = _pair_directions(ds, cloud)
    wt = 1.0 - ds.pairs.r
    d = cloud.d
    S = np.empty((d, d))
    for a in range(d):
        wa = wt * u[:, a]
        for b in range(a, d):
            S[a, b] = S[b, a] = math.fsum((wa * u[:, b]).tolist()) / len(ds)
    return S


def _fix_signs(Z: np.ndarray) -> np.ndarray:
    Z = Z.copy()
    for c in range(Z.shape[1]):
        k = int(np.argmax(np.abs(Z[:, c])))
        if Z[k, c] < 0:
            Z[:, c] = -Z[:, c]
    return Z


def spectrum(S, psd: bool = False) -> Spectrum:
    """Full eigen-decomposition, eigenvalues descending.

    Each eigenvector is signed so that its largest-magnitude entry (first one on
    ties) is positive. With ``psd=True`` eigenvalues in ``[-1e-10, 0)`` are
    clamped to zero and anything more negative is an error.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise CDPError(f"expected a square matrix, got shape {S.shape}")
    if np.max(np.abs(S - S.T), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(S), initial=0.0)):
        raise CDPError("matrix is not symmetric")
    w, Z = jacobi_eigh((S + S.T) / 2)
    order = np.argsort(-w, kind="stable")
    w, Z = w[order], _fix_signs(Z[:, order])
    if psd:
        if w.size and w[-1] < -PSD_TOL:
            raise CDPError(f"matrix is not positive semidefinite (eigenvalue {w[-1]:.3e})")
        w = np.where(w < 0, 0.0, w)
    return Spectrum(w, Z)


def spectrum_is_degenerate(sp: Spectrum, k: int) -> bool:
    if k >= sp.d:
        return False
    lam = sp.eigenvalues
    return bool(lam[k - 1] - lam[k] <= PSD_TOL * max(abs(lam[0]), 1e-300))


def projection_matrix(sp: Spectrum, k: int) -> np.ndarray:
    """First ``k`` eigenvector columns (``d x k``)."""
    if isinstance(k, bool) or not 1 <= int(k) <= sp.d:
        raise CDPError(f"k must satisfy 1 <= k <= d={sp.d}, got {k}")
    k = int(k)
    if spectrum_is_degenerate(sp, k):
        warnings.warn(
            f"lambda_{k} == lambda_{k + 1}; the projection subspace is not unique",
            DegenerateSpectrumWarning,
            stacklevel=2,
        )
    return sp.eigenvectors[:, :k].copy()


def project(cloud: PointCloud, V) -> PointCloud:
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != cloud.d or V.shape[1] > cloud.d:
        raise CDPError(f"projection of shape {V.shape} does not fit {cloud.d}-dimensional points")
    return cloud.with_points(cloud.points @ V)


def projected_graph(g: WeightedGraph, cloud: PointCloud, V) -> WeightedGraph:
    """Same edges, reweighted by projected length ``||V^T (p_v - p_u)||``."""
    if g.n_vertices != cloud.n:
        raise CDPError("graph and cloud disagree on the number of vertices")
    w = np.linalg.norm((cloud.points[g.v] - cloud.points[g.u]) @ np.asarray(V, dtype=float), axis=1)
    if np.any(w == 0):
        e = int(np.argmax(w == 0))
        raise DegenerateInputError(f"edge ({g.u[e]}, {g.v[e]}) collapses to a point under the projection")
    return g.reweighted(w)
