import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdp import (CDPError, DegenerateInputError, DegenerateSpectrumWarning, EmptyAdmissibleSetError, PairRecord,
                 PairTable, PointCloud, admissible_set, apsp, convexity_ratios, evaluate, mutual_knn,
                 nonconvexity_index, prepare, project, projected_graph, projection_matrix, spectrum, standardize,
                 structure_matrix)
from cdp.core import AdmissibleSet

import golden


def kahan(values):
    total, comp = 0.0, 0.0
    for v in values:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def match_signs(A, B):
    """Flip columns of A to best match B."""
    signs = np.sign(np.sum(A * B, axis=0))
    signs[signs == 0] = 1
    return A * signs


# ------------------------------------------------------------- standardize

def test_standardize_two_points():
    out = standardize(PointCloud([[0.0], [2.0]]))
    assert np.array_equal(out.points, [[-1.0], [1.0]])


def test_standardize_statistics(rng):
    cloud = PointCloud(rng.normal(3, 5, size=(100, 3)))
    out = standardize(cloud).points
    assert np.all(np.abs(out.sum(axis=0) / 100) <= 1e-12)
    assert np.all(np.abs(np.sqrt((out**2).sum(axis=0) / 100) - 1) <= 1e-12)
    again = standardize(PointCloud(out)).points
    assert np.max(np.abs(again - out)) <= 1e-12


def test_standardize_zero_variance():
    with pytest.raises(DegenerateInputError, match="x1"):
        standardize(PointCloud([[0.0, 1.0], [2.0, 1.0]]))


# ----------------------------------------------------------------- ratios

def test_toy_ratio_table(toy):
    g = mutual_knn(toy, 2)
    table = convexity_ratios(toy, g, apsp(g))
    assert len(table) == 10
    for rec in table:
        key = (golden.NAMES[rec.i], golden.NAMES[rec.j])
        euclid, sp, r, _ = golden.PAIRS[key]
        assert rec.euclid == pytest.approx(euclid, abs=1e-4)
        assert rec.sp == pytest.approx(sp, abs=1e-4)
        assert rec.r == pytest.approx(r, abs=1e-4)
        assert rec.r == pytest.approx(rec.euclid / rec.sp, rel=1e-12)
    cd = table[[k for k, rec in enumerate(table) if (rec.i, rec.j) == golden.ids(("C", "D"))][0]]
    assert cd.r == 1.0


def test_toy_admissible_set(toy_run):
    prep, _ = toy_run
    got = {(golden.NAMES[rec.i], golden.NAMES[rec.j]) for rec in prep.admissible.pairs}
    assert got == {p for p, v in golden.PAIRS.items() if v[3]}
    assert len(prep.admissible) == 5


def test_admissible_boundary_inclusive():
    recs = [PairRecord(0, 1, 1.0, 2.0, 0.5), PairRecord(0, 2, 1.0, 1.0, 1.0)]
    ds = admissible_set(recs, 0.5)
    assert len(ds) == 1 and ds.pairs[0].r == 0.5


def test_admissible_empty_and_range(toy_run):
    prep, _ = toy_run
    with pytest.raises(EmptyAdmissibleSetError):
        admissible_set(prep.pairs, 0.3)
    for tau in (0.0, 1.0, 1.5):
        with pytest.raises(CDPError):
            admissible_set(prep.pairs, tau)


def test_nonconvexity_index(toy_run, rng):
    prep, _ = toy_run
    assert nonconvexity_index(prep.admissible) == pytest.approx(golden.C_SP, abs=1e-4)
    single = AdmissibleSet(0.5, PairTable.from_records([PairRecord(0, 1, 0.4, 1.0, 0.4)]))
    assert nonconvexity_index(single) == 0.4
    r = rng.uniform(0.01, 0.8, 20)
    ds = AdmissibleSet(0.8, PairTable(np.zeros(20, int), np.ones(20, int), r, np.ones(20), r))
    assert nonconvexity_index(ds) == pytest.approx(kahan(r.tolist()) / 20, rel=1e-15)


# -------------------------------------------------------- structure matrix

def test_toy_structure_matrix(toy_run):
    prep, _ = toy_run
    assert np.max(np.abs(prep.S - golden.S_NC)) <= 1e-6


def test_single_pair_projector():
    cloud = PointCloud([[0.0, 0, 0], [2.0, 0, 0]])
    ds = AdmissibleSet(0.5, PairTable.from_records([PairRecord(0, 1, 2.0, 1e9, 0.0)]))
    assert np.array_equal(structure_matrix(ds, cloud), np.diag([1.0, 0, 0]))


def random_admissible(rng, n_pts=12, n_pairs=10, d=4):
    pts = rng.normal(size=(n_pts, d))
    pairs = set()
    while len(pairs) < n_pairs:
        a, b = sorted(rng.choice(n_pts, 2, replace=False))
        pairs.add((int(a), int(b)))
    i, j = np.array(sorted(pairs)).T
    euclid = np.linalg.norm(pts[j] - pts[i], axis=1)
    r = rng.uniform(0.05, 0.8, n_pairs)
    return PointCloud(pts), AdmissibleSet(0.8, PairTable(i, j, euclid, euclid / r, r))


def test_structure_matrix_brute_force(rng):
    cloud, ds = random_admissible(rng)
    S = structure_matrix(ds, cloud)
    naive = np.zeros((4, 4))
    for rec in ds.pairs:
        u = (cloud.points[rec.j] - cloud.points[rec.i]) / rec.euclid
        naive += (1 - rec.r) * np.outer(u, u)
    naive /= len(ds)
    assert np.allclose(S, naive, atol=1e-14)
    assert np.array_equal(S, S.T)
    assert np.linalg.eigvalsh(S).min() >= -1e-10
    assert np.trace(S) == pytest.approx(np.mean(1 - ds.pairs.r), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_structure_matrix_order_invariance(seed):
    rng = np.random.default_rng(seed)
    cloud, ds = random_admissible(rng, n_pts=30, n_pairs=60, d=3)
    perm = rng.permutation(len(ds))
    shuffled = AdmissibleSet(ds.tau, ds.pairs.select(perm))
    assert np.max(np.abs(structure_matrix(ds, cloud) - structure_matrix(shuffled, cloud))) <= 1e-10


# ------------------------------------------------------- spectrum and V

def test_toy_spectrum_and_v(toy_run):
    prep, ev = toy_run
    assert np.max(np.abs(prep.spectrum.eigenvalues - golden.EIGENVALUES)) <= 1e-6
    assert np.max(np.abs(match_signs(ev.V, golden.V) - golden.V)) <= 1e-6


def test_projection_k_equals_d(toy_run):
    prep, _ = toy_run
    V = projection_matrix(prep.spectrum, 3)
    assert np.allclose(V.T @ V, np.eye(3), atol=1e-10) and np.allclose(V @ V.T, np.eye(3), atol=1e-10)


def test_projection_dominant_axis():
    V = projection_matrix(spectrum(np.diag([1.0, 2.0])), 1)
    assert np.allclose(np.abs(V[:, 0]), [0.0, 1.0])


def test_projection_bad_k(toy_run):
    prep, _ = toy_run
    for k in (0, 4):
        with pytest.raises(CDPError):
            projection_matrix(prep.spectrum, k)


def test_degenerate_spectrum_warns():
    with pytest.warns(DegenerateSpectrumWarning):
        projection_matrix(spectrum(np.diag([1.0, 1.0, 0.5])), 1)


def test_projected_points(toy, toy_run):
    _, ev = toy_run
    # coordinates implied by the published V; its 6-decimal rounding (<= 5e-7 per entry)
    # times ||p||_1 <= 3 bounds the gap
    implied = toy.points @ golden.V
    assert np.max(np.abs(match_signs(ev.projected.points, implied) - implied)) <= 1.5e-6
    # published table rows A to D (row E carries a sign slip in its first entry)
    assert np.max(np.abs(ev.projected.points[:4] - golden.PROJECTED[:4])) <= 1e-6
    assert ev.projected.names == toy.names


def test_project_identity_and_contraction(rng):
    cloud = PointCloud(rng.normal(size=(40, 5)))
    assert np.array_equal(project(cloud, np.eye(5)).points, cloud.points)
    V = np.linalg.qr(rng.normal(size=(5, 2)))[0]
    assert np.all(np.linalg.norm(project(cloud, V).points, axis=1) <= np.linalg.norm(cloud.points, axis=1))
    with pytest.raises(CDPError):
        project(cloud, np.eye(3))


def test_toy_projected_weights(toy, toy_run):
    _, ev = toy_run
    pg = ev.projected_graph
    weight = {(golden.NAMES[a], golden.NAMES[b]): w for a, b, w in zip(pg.u, pg.v, pg.w)}
    for e in [("A", "E"), ("B", "C"), ("C", "D")]:
        assert weight[e] == pytest.approx(golden.PROJECTED_WEIGHTS[e], abs=1e-5)
    # w'(A-B) printed as 0.95465; the published coordinates of A and B give 0.954541
    assert weight[("A", "B")] == pytest.approx(np.hypot(*golden.PROJECTED[1]), abs=1e-6)


def test_projected_graph_identity_and_contraction(rng):
    cloud = PointCloud(rng.normal(size=(50, 3)))
    g = mutual_knn(cloud, 5)
    assert np.allclose(projected_graph(g, cloud, np.eye(3)).w, g.w, rtol=1e-15)
    V = np.linalg.qr(rng.normal(size=(3, 2)))[0]
    pg = projected_graph(g, cloud, V)
    assert pg.edge_set() == g.edge_set() and np.all(pg.w <= g.w * (1 + 1e-12))


def test_collapsed_edge_rejected():
    cloud = PointCloud([[0.0, 0.0], [0.0, 1.0], [1.0, 5.0]])
    g = mutual_knn(cloud, 1)
    with pytest.raises(DegenerateInputError, match="collapses"):
        projected_graph(g, cloud, np.array([[1.0], [0.0]]))


# ------------------------------------------------------- pipeline-level

def test_ratio_bounds_on_cloud(rng):
    cloud = PointCloud(rng.normal(size=(120, 3)))
    prep = prepare(cloud, 6, 0.8)
    assert np.all(prep.pairs.r > 0) and np.all(prep.pairs.r <= 1.0)


def test_full_rank_projection_preserves_ratios(roll_run):
    prep, _ = roll_run
    ev = evaluate(prep, projection_matrix(prep.spectrum, 3))
    assert np.max(np.abs(ev.certificates.r_tilde - ev.certificates.r)) <= 1e-10
    assert np.max(np.abs(ev.post.r_tilde - prep.pairs.r)) <= 1e-10


@settings(max_examples=10, deadline=None)
@given(st.lists(st.booleans(), min_size=2, max_size=2))
def test_column_sign_invariance(toy_run, flips):
    prep, ev = toy_run
    signs = np.where(flips, -1.0, 1.0)
    other = evaluate(prep, ev.V * signs)
    assert np.allclose(other.projected_graph.w, ev.projected_graph.w, rtol=1e-14)
    for name in ("r_tilde", "psi", "phi_star"):
        assert np.allclose(getattr(other.certificates, name), getattr(ev.certificates, name), rtol=1e-14)
    a, b = other.report, ev.report
    for name in ("c_sp_prime", "fixed_error", "reselected_error", "q10_psi", "q90_inv_phi_star", "mu_k", "phi_g"):
        assert getattr(a, name) == pytest.approx(getattr(b, name), rel=1e-12)
    assert a.n_reselected == b.n_reselected
