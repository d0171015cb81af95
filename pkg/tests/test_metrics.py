import math

import jsonschema
import numpy as np
import pytest
import yaml

from cdp import (CDPError, certificate_quantiles, evaluate, fixed_pairs_error, markov_bound,
                 projection_matrix, reselected_pairs_error, spectral_capture, spectrum)
from cdp.certificates import CertificateRecord
from cdp.metrics import PostRatios, captured_energy, nearest_rank, percent, report_schema, weighted_tail

import golden


def test_fixed_pairs_toy(toy_run):
    prep, ev = toy_run
    c_prime, err = fixed_pairs_error(prep.admissible, ev.certificates.r_tilde)
    assert c_prime == pytest.approx(golden.C_SP_PRIME, abs=1e-4)
    assert 100 * err == pytest.approx(golden.FIXED_ERROR_PCT, abs=0.005)
    published = [v[4] for v in golden.CERTIFICATES.values()]
    assert sum(published) / 5 == pytest.approx(0.62254, abs=1e-5)
    assert c_prime == pytest.approx(sum(published) / 5, abs=1e-6)


def test_reselected_toy(toy_run):
    prep, ev = toy_run
    idx, c_dprime, err = reselected_pairs_error(prep.c_sp, ev.post, 0.75)
    members = {(golden.NAMES[ev.post.i[k]], golden.NAMES[ev.post.j[k]]) for k in idx}
    assert members == {("B", "E"), ("C", "E"), ("D", "E")}
    expected = {p for p, v in golden.CERTIFICATES.items() if v[4] <= 0.75}
    assert members == expected
    assert c_dprime == pytest.approx(golden.C_SP_DPRIME, abs=1e-4)
    assert 100 * err == pytest.approx(golden.RESELECTED_ERROR_PCT, abs=0.005)


def test_reselected_empty():
    post = PostRatios(np.array([0]), np.array([1]), np.array([0.99]))
    idx, c, err = reselected_pairs_error(0.5, post, 0.8)
    assert idx.size == 0 and c is None and err is None


def test_quantiles_toy(toy_run):
    _, ev = toy_run
    q10, q90 = certificate_quantiles(ev.certificates)
    assert q10 == pytest.approx(golden.Q10_PSI, abs=1e-4)
    assert q90 == pytest.approx(golden.Q90_INV_PHI_STAR, abs=1e-4)
    assert (q10, q90) == certificate_quantiles(list(ev.certificates))


def test_nearest_rank_arithmetic():
    values = [round(0.1 * k, 1) for k in range(10, 0, -1)]
    assert nearest_rank(values, 0.10) == 0.1
    assert nearest_rank(values, 0.90) == 0.9
    assert nearest_rank(list(range(1, 31)), 0.10) == 3
    assert nearest_rank([4.0], 0.9) == 4.0
    with pytest.raises(CDPError):
        nearest_rank([], 0.5)


def test_single_record_quantiles():
    rec = CertificateRecord(0, 1, 0.5, 0.6, 0.8, 0.5, (0, 1), True)
    assert certificate_quantiles([rec]) == (0.8, 2.0)


def test_spectral_capture(toy_run):
    prep, ev = toy_run
    assert spectral_capture(prep.spectrum, 2) == pytest.approx(golden.MU_K, abs=1e-4)
    assert spectral_capture(prep.spectrum, 3) == 1.0
    with pytest.raises(CDPError):
        spectral_capture(spectrum(np.zeros((2, 2))), 1)


def test_capture_equals_weighted_direction_energy(roll_run):
    prep, ev = roll_run
    w = 1 - ev.certificates.r
    direct = math.fsum((w * ev.certificates.psi**2).tolist()) / math.fsum(w.tolist())
    assert ev.report.mu_k == pytest.approx(direct, abs=1e-9)
    assert captured_energy(prep.S, ev.V) == pytest.approx(direct, abs=1e-9)


def test_markov_bound_values():
    assert markov_bound(0.9573, 0.427) == pytest.approx(0.9, abs=1e-12)
    assert math.sqrt(1 - 0.427) == pytest.approx(golden.MARKOV_SQRT_Z, abs=1e-4)
    assert markov_bound(1.0, 0.3) == 1.0
    assert markov_bound(0.5, 0.25) == 0.0
    with pytest.raises(CDPError):
        markov_bound(0.5, 1.0)


def test_markov_empirically(roll_run):
    _, ev = roll_run
    c = ev.certificates
    for a in np.linspace(0.05, 0.95, 19):
        assert weighted_tail(c.psi, c.r, a) >= markov_bound(ev.report.mu_k, a) - 1e-12


def test_quantile_sides_cover_ninety_percent(roll_run):
    rep = roll_run[1].report
    assert rep.coverage["coverage_lower"] >= 0.9
    assert rep.coverage["coverage_upper"] >= 0.9
    assert rep.coverage["coverage_joint"] >= 0.8


def test_zero_errors_full_rank(roll_run):
    prep, _ = roll_run
    rep = evaluate(prep, projection_matrix(prep.spectrum, 3)).report
    assert rep.fixed_error <= 1e-10 and rep.reselected_error <= 1e-10


def test_percent_half_up():
    assert percent(0.22633714) == "22.63%"
    assert percent(0.000125) == "0.01%"
    assert percent(0.1234999) == "12.35%"
    assert percent(None) is None


def test_toy_report(toy_run):
    rep = toy_run[1].report
    assert rep.c_sp == pytest.approx(golden.C_SP, abs=1e-4)
    assert rep.mu_k == pytest.approx(golden.MU_K, abs=1e-4)
    assert percent(rep.fixed_error) == "22.63%"
    assert percent(rep.reselected_error) == "16.01%"
    assert rep.q10_psi == pytest.approx(golden.Q10_PSI, abs=1e-4)
    assert rep.q90_inv_phi_star == pytest.approx(golden.Q90_INV_PHI_STAR, abs=1e-4)
    assert rep.markov[0]["lower_bound_prob"] == pytest.approx(0.9, abs=1e-12)


def test_report_schema_and_determinism(toy_run, roll_run):
    for _, ev in (toy_run, roll_run):
        text = ev.report.to_text()
        jsonschema.validate(yaml.safe_load(text), report_schema())
        assert text == ev.report.to_text()
    timed = yaml.safe_load(toy_run[1].report.to_text(include_runtimes=True))
    jsonschema.validate(timed, report_schema())
    assert "runtimes_s" in timed


def test_report_with_undefined_reselection(toy_run):
    rep = toy_run[1].report
    data = rep.to_dict()
    data["reselected_pairs"].update(n_reselected=0, c_sp_dprime=None, error=None, error_pct=None, defined=False)
    jsonschema.validate(data, report_schema())
