"""PCA baseline, evaluated under the same certificate and metrics protocol as CDP."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import project, spectrum
from .datasets import PointCloud
from .errors import CDPError
from .pipeline import Evaluation, Prepared, evaluate


@dataclass(frozen=True, eq=False)
class BaselineResult:
    method: str
    V: np.ndarray
    projected: PointCloud
    explained_variance_ratio: float


def pca_fit(cloud: PointCloud, k: int) -> BaselineResult:
    """Top-``k`` principal axes of the mean-centred cloud.

    Axes use the same eigensolver and sign convention as the structure-matrix
    spectrum. The projection itself is ``V^T p`` without centring, like CDP.
    """
    if cloud.n < 2:
        raise CDPError("PCA needs at least two points")
    if isinstance(k, bool) or not 1 <= int(k) <= cloud.d:
        raise CDPError(f"k must satisfy 1 <= k <= d={cloud.d}, got {k}")
    X = cloud.points - cloud.points.mean(axis=0)
    cov = X.T @ X / (cloud.n - 1)
    sp = spectrum((cov + cov.T) / 2)
    lam = np.clip(sp.eigenvalues, 0.0, None)
    V = sp.eigenvectors[:, :k].copy()
    ratio = float(lam[:k].sum() / lam.sum()) if lam.sum() > 0 else 1.0
    return BaselineResult("pca", V, project(cloud, V), ratio)


def evaluate_baseline(result: BaselineResult, prep: Prepared) -> Evaluation:
    """Run the full protocol with the baseline's ``V`` on an already prepared dataset."""
    if result.V.shape[0] != prep.cloud.d:
        raise CDPError("baseline was fitted in a different dimension")
    return evaluate(prep, result.V, result.method)
