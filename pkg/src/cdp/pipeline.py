"""End-to-end orchestration: prepare a cloud once, then fit and evaluate projections on it."""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import core
from .certificates import CertificateTable, certify, phi_graph
from .datasets import PointCloud
from .graph import ComponentMap, WeightedGraph, giant_component, mutual_knn
from .metrics import (MetricsReport, PostRatios, all_pair_post_ratios, build_report,
                      captured_energy, spectral_capture)
from .shortest_paths import DistanceMatrix, apsp


@dataclass(eq=False)
class Prepared:
    """Everything that does not depend on the projection (Algorithm steps 1 to 5)."""

    input_cloud: PointCloud
    cloud: PointCloud          # working coordinates: standardized (if enabled), giant component only
    graph: WeightedGraph
    component: ComponentMap
    distances: DistanceMatrix
    pairs: core.PairTable
    admissible: core.AdmissibleSet
    S: np.ndarray
    spectrum: core.Spectrum
    k_nn: int
    tau: float
    standardized: bool
    warnings: list[str] = field(default_factory=list)
    runtimes: dict = field(default_factory=dict)

    @property
    def c_sp(self) -> float:
        return core.nonconvexity_index(self.admissible)

    def labels(self) -> list[str]:
        """Original labels (names or input indices) of the working vertices."""
        if self.input_cloud.names is not None:
            return [self.input_cloud.names[i] for i in self.component.kept]
        return [str(i) for i in self.component.kept]


@dataclass(eq=False)
class Evaluation:
    method: str
    V: np.ndarray
    projected: PointCloud
    projected_graph: WeightedGraph
    projected_distances: DistanceMatrix
    certificates: CertificateTable
    post: PostRatios
    report: MetricsReport


def prepare(cloud: PointCloud, k_nn: int = 10, tau: float = 0.8, standardize: bool = True) -> Prepared:
    """Standardize, build the mutual k-NN graph, reduce to its giant component and select pairs.

    The whole pipeline (graph, ratios, threshold) runs in the standardized
    space when ``standardize`` is on.
    """
    clock = time.perf_counter
    runtimes, notes = {}, []

    t0 = clock()
    work = core.standardize(cloud) if standardize else cloud
    full = mutual_knn(work, k_nn)
    graph, comp = giant_component(full)
    if not comp.is_identity:
        notes.append(f"graph disconnected: kept {comp.kept.size} of {comp.n_original} points "
                     f"({comp.dropped.size} dropped)")
        work = work.subset(comp.kept)
    runtimes["graph"] = clock() - t0

    t0 = clock()
    dm = apsp(graph)
    runtimes["apsp"] = clock() - t0

    t0 = clock()
    pairs = core.convexity_ratios(work, graph, dm)
    ds = core.admissible_set(pairs, tau)
    S = core.structure_matrix(ds, work)
    sp = core.spectrum(S, psd=True)
    runtimes["structure"] = clock() - t0
    return Prepared(cloud, work, graph, comp, dm, pairs, ds, S, sp, int(k_nn), float(tau), bool(standardize),
                    notes, runtimes)


def cdp_projection(prep: Prepared, k: int) -> np.ndarray:
    """Top-``k`` eigenvectors of the structure matrix (``d x k``)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", core.DegenerateSpectrumWarning)
        return core.projection_matrix(prep.spectrum, k)


def evaluate(prep: Prepared, V, method: str = "cdp") -> Evaluation:
    """Project with any orthonormal ``V`` and run the full certificate and metrics protocol."""
    clock = time.perf_counter
    V = np.asarray(V, dtype=float)
    k = V.shape[1]
    notes = list(prep.warnings)
    if method == "cdp" and core.spectrum_is_degenerate(prep.spectrum, k):
        notes.append(f"degenerate spectrum: lambda_{k} == lambda_{k + 1}, projection subspace not unique")

    runtimes = dict(prep.runtimes)
    t0 = clock()
    projected = core.project(prep.cloud, V)
    pg = core.projected_graph(prep.graph, prep.cloud, V)
    pdm = apsp(pg)
    runtimes["projected_apsp"] = clock() - t0

    t0 = clock()
    certs = certify(prep.admissible, V, prep.cloud, prep.graph, pdm)
    post = all_pair_post_ratios(prep.cloud, V, pdm)
    phi_g = phi_graph(prep.graph, V, prep.cloud)
    if method == "cdp" and np.array_equal(V, prep.spectrum.eigenvectors[:, :k]):
        mu_k = spectral_capture(prep.spectrum, k)
    else:
        mu_k = captured_energy(prep.S, V)
    runtimes["certificates"] = clock() - t0

    params = {
        "n_points": prep.input_cloud.n,
        "n_kept": prep.cloud.n,
        "dim": prep.cloud.d,
        "k": k,
        "k_nn": prep.k_nn,
        "tau": prep.tau,
        "standardize": prep.standardized,
        "n_edges": prep.graph.n_edges,
        "n_pairs": len(prep.pairs),
    }
    report = build_report(method=method, parameters=params, admissible=prep.admissible, certs=certs, post=post,
                          spectrum=prep.spectrum, mu_k=mu_k, phi_g=phi_g,
                          dropped_vertices=prep.component.dropped.tolist(), warnings=notes, runtimes=runtimes)
    return Evaluation(method, V, projected, pg, pdm, certs, post, report)


def run_cdp(cloud: PointCloud, k: int = 2, k_nn: int = 10, tau: float = 0.8,
            standardize: bool = True) -> tuple[Prepared, Evaluation]:
    prep = prepare(cloud, k_nn, tau, standardize)
    return prep, evaluate(prep, cdp_projection(prep, k), "cdp")
