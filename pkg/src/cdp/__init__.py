"""Convexity-driven projection (CDP).

Linear dimensionality reduction that keeps the directions along which a
point cloud forces graph detours, with a per-pair distortion certificate that
can be checked after the fit.

>>> from cdp import toy5, run_cdp
>>> prep, ev = run_cdp(toy5(), k=2, k_nn=2, tau=0.75, standardize=False)
>>> round(ev.report.c_sp, 4), ev.certificates.all_hold
(0.5076, True)
"""

from .baselines import BaselineResult, evaluate_baseline, pca_fit
from .certificates import (CertificateRecord, CertificateTable, certify, edge_cosines, phi_graph, phi_star,
                           post_ratio, psi)
from .core import (AdmissibleSet, DegenerateSpectrumWarning, PairRecord, PairTable, Spectrum, admissible_set,
                   convexity_ratios, nonconvexity_index, project, projected_graph, projection_matrix, spectrum,
                   standardize, structure_matrix)
from .datasets import DatasetSpec, PointCloud, generate, load_csv, save_csv, toy5
from .errors import CDPError, DegenerateInputError, DisconnectedGraphError, EmptyAdmissibleSetError
from .graph import ComponentMap, WeightedGraph, giant_component, mutual_knn
from .metrics import (MetricsReport, all_pair_post_ratios, build_report, certificate_quantiles, fixed_pairs_error,
                      markov_bound, reselected_pairs_error, spectral_capture)
from .pipeline import Evaluation, Prepared, cdp_projection, evaluate, prepare, run_cdp
from .shortest_paths import DistanceMatrix, SsspResult, apsp, recover_path, sssp

__version__ = "0.1.0"
