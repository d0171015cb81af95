"""Verification metrics: detour errors, certificate quantiles, spectral capture, Markov bounds.

The report is a plain key/value tree serialized as YAML with a fixed field
order; ``report_schema.json`` next to this module describes it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from importlib import resources

import numpy as np
import yaml

from .certificates import CertificateTable
from .core import AdmissibleSet, Spectrum, nonconvexity_index
from .datasets import PointCloud
from .errors import CDPError
from .shortest_paths import DistanceMatrix

MARKOV_GRID = (0.1, 0.25, 0.5)


def percent(x: float | None) -> str | None:
    """Half-up rounding to two decimals, e.g. ``0.226345 -> '22.63%'``."""
    if x is None:
        return None
    return f"{Decimal(repr(float(x) * 100)).quantize(Decimal('0.01'), rounding=ROUND_HALF_UP)}%"


def fixed_pairs_error(ds: AdmissibleSet, r_tilde) -> tuple[float, float]:
    """Mean post-projection ratio over the original admissible pairs and its relative error."""
    r_tilde = np.asarray(r_tilde, dtype=float)
    if r_tilde.size != len(ds):
        raise CDPError("one post-projection ratio per admissible pair expected")
    c_sp = nonconvexity_index(ds)
    c_prime = math.fsum(r_tilde.tolist()) / r_tilde.size
    return c_prime, abs(c_sp - c_prime) / c_sp


@dataclass(frozen=True, eq=False)
class PostRatios:
    """Post-projection ratio for every unordered pair ``i < j``."""

    i: np.ndarray
    j: np.ndarray
    r_tilde: np.ndarray


def all_pair_post_ratios(cloud: PointCloud, V, projected_dm: DistanceMatrix) -> PostRatios:
    n = cloud.n
    i, j = np.triu_indices(n, 1)
    chord = np.linalg.norm((cloud.points[j] - cloud.points[i]) @ np.asarray(V, dtype=float), axis=1)
    return PostRatios(i.astype(np.int64), j.astype(np.int64), chord / projected_dm.dist[i, j])


def reselected_pairs_error(c_sp: float, post: PostRatios, tau: float):
    """Re-threshold at ``tau`` after projection.

    Returns ``(indices, c_sp_dprime, error)``; the last two are ``None`` when no
    pair survives.
    """
    idx = np.flatnonzero(post.r_tilde <= tau)
    if idx.size == 0:
        return idx, None, None
    c_dprime = math.fsum(post.r_tilde[idx].tolist()) / idx.size
    return idx, c_dprime, abs(c_sp - c_dprime) / c_sp


def nearest_rank(values, p: float) -> float:
    """``x_(ceil(p n))`` of the ascending sample (1-based)."""
    x = np.sort(np.asarray(values, dtype=float))
    if x.size == 0:
        raise CDPError("quantile of an empty sample")
    rank = max(1, math.ceil(round(p * x.size, 9)))
    return float(x[min(rank, x.size) - 1])


def certificate_quantiles(certs) -> tuple[float, float]:
    """``(q_0.10(psi), q_0.90(1/phi_star))`` by nearest rank."""
    if isinstance(certs, CertificateTable):
        psi, inv = certs.psi, certs.inv_phi_star
    else:
        recs = list(certs)
        psi = np.array([c.psi for c in recs])
        inv = np.array([1.0 / c.phi_star for c in recs])
    if psi.size == 0:
        raise CDPError("no certificates")
    return nearest_rank(psi, 0.10), nearest_rank(inv, 0.90)


def spectral_capture(sp: Spectrum, k: int) -> float:
    """Share of the eigenvalue mass held by the top ``k`` eigenvalues."""
    total = math.fsum(sp.eigenvalues.tolist())
    if total <= 0:
        raise CDPError("spectrum has no positive mass")
    return math.fsum(sp.eigenvalues[:k].tolist()) / total


def captured_energy(S, V) -> float:
    """``trace(V^T S V) / trace(S)``; equals :func:`spectral_capture` when V spans the top eigenvectors."""
    S, V = np.asarray(S, dtype=float), np.asarray(V, dtype=float)
    total = np.trace(S)
    if total <= 0:
        raise CDPError("structure matrix has zero trace")
    return float(np.trace(V.T @ S @ V) / total)


def markov_bound(mu_k: float, a: float) -> float:
    """Lower bound on P{Z >= 1 - a} for Z in [0, 1] with mean ``mu_k``, clamped at 0."""
    if not 0 < a < 1:
        raise CDPError(f"a must lie in (0, 1), got {a}")
    return max(0.0, 1.0 - (1.0 - mu_k) / a)


def weighted_tail(psi, r, a: float) -> float:
    """Exact P{Z >= 1 - a} when pairs are drawn with probability proportional to 1 - r and Z = psi^2."""
    wt = 1.0 - np.asarray(r, dtype=float)
    z = np.asarray(psi, dtype=float) ** 2
    return math.fsum(wt[z >= 1.0 - a].tolist()) / math.fsum(wt.tolist())


def markov_levels(mu_k: float) -> list[float]:
    """Grid of ``a`` values for the report: the 90%-level choice (when valid) then a fixed grid."""
    levels = []
    a90 = (1.0 - mu_k) / 0.1
    if 0 < a90 < 1:
        levels.append(a90)
    return levels + [a for a in MARKOV_GRID if a not in levels]


@dataclass
class MetricsReport:
    method: str
    parameters: dict
    c_sp: float
    n_admissible: int
    c_sp_prime: float
    fixed_error: float
    n_reselected: int
    c_sp_dprime: float | None
    reselected_error: float | None
    q10_psi: float
    q90_inv_phi_star: float
    coverage: dict
    mu_k: float
    phi_g: float
    certificates: dict
    markov: list[dict]
    eigenvalues: list[float]
    dropped_vertices: list[int]
    warnings: list[str] = field(default_factory=list)
    runtimes: dict = field(default_factory=dict)

    def to_dict(self, include_runtimes: bool = False) -> dict:
        out = {
            "method": self.method,
            "parameters": dict(self.parameters),
            "dropped_vertices": list(self.dropped_vertices),
            "structure_eigenvalues": list(self.eigenvalues),
            "pre_projection": {"c_sp": self.c_sp, "n_admissible": self.n_admissible},
            "fixed_pairs": {
                "c_sp_prime": self.c_sp_prime,
                "error": self.fixed_error,
                "error_pct": percent(self.fixed_error),
            },
            "reselected_pairs": {
                "n_reselected": self.n_reselected,
                "c_sp_dprime": self.c_sp_dprime,
                "error": self.reselected_error,
                "error_pct": percent(self.reselected_error),
                "defined": self.reselected_error is not None,
            },
            "certificate_quantiles": {
                "q10_psi": self.q10_psi,
                "q90_inv_phi_star": self.q90_inv_phi_star,
                **self.coverage,
            },
            "certificates": dict(self.certificates),
            "spectral": {"mu_k": self.mu_k, "phi_g": self.phi_g, "inv_phi_g": 1.0 / self.phi_g},
            "markov": [dict(m) for m in self.markov],
            "warnings": list(self.warnings),
        }
        if include_runtimes:
            out["runtimes_s"] = dict(self.runtimes)
        return _plain(out)

    def to_text(self, include_runtimes: bool = False) -> str:
        return yaml.safe_dump(self.to_dict(include_runtimes), sort_keys=False, default_flow_style=False,
                              allow_unicode=True)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def report_schema() -> dict:
    return json.loads(resources.files("cdp").joinpath("report_schema.json").read_text())


def build_report(*, method, parameters, admissible, certs, post, spectrum, mu_k, phi_g,
                 dropped_vertices=(), warnings=(), runtimes=None) -> MetricsReport:
    """Aggregate every metric for one projection of a prepared dataset."""
    tau = admissible.tau
    c_sp = nonconvexity_index(admissible)
    c_prime, fixed_err = fixed_pairs_error(admissible, certs.r_tilde)
    resel, c_dprime, resel_err = reselected_pairs_error(c_sp, post, tau)
    warnings = list(warnings)
    if resel_err is None:
        warnings.append(f"no pair has a post-projection ratio <= tau={tau}; reselected error undefined")

    q10, q90 = certificate_quantiles(certs)
    ratio = certs.ratio
    lower, upper = ratio >= q10, ratio <= q90
    coverage = {
        "coverage_lower": float(lower.mean()),
        "coverage_upper": float(upper.mean()),
        "coverage_joint": float((lower & upper).mean()),
    }
    cert_summary = {
        "n_certified": len(certs),
        "n_hold": int(np.sum(certs.holds)),
        "all_hold": bool(np.all(certs.holds)),
        "max_ratio": float(ratio.max()),
        "uniform_bound_holds": bool(np.all(ratio <= 1.0 / phi_g + 1e-9)),
    }
    markov = []
    for a in markov_levels(mu_k):
        markov.append({
            "a": a,
            "lower_bound_prob": markov_bound(mu_k, a),
            "sqrt_z_threshold": math.sqrt(1.0 - a),
            "empirical_prob": weighted_tail(certs.psi, certs.r, a),
        })
    return MetricsReport(
        method=method,
        parameters=parameters,
        c_sp=c_sp,
        n_admissible=len(admissible),
        c_sp_prime=c_prime,
        fixed_error=fixed_err,
        n_reselected=int(resel.size),
        c_sp_dprime=c_dprime,
        reselected_error=resel_err,
        q10_psi=q10,
        q90_inv_phi_star=q90,
        coverage=coverage,
        mu_k=mu_k,
        phi_g=phi_g,
        certificates=cert_summary,
        markov=markov,
        eigenvalues=[float(x) for x in spectrum.eigenvalues],
        dropped_vertices=[int(v) for v in dropped_vertices],
        warnings=warnings,
        runtimes=dict(runtimes or {}),
    )
