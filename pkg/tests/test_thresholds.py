import csv
import io

import numpy as np
import pytest

from lattice_spectra.dispersion import PI
from lattice_spectra.errors import ZeroCoupling
from lattice_spectra.thresholds import (NO_THRESHOLD, ThresholdKind,
                                        classify_threshold_solutions,
                                        constants_csv, coupling_thresholds,
                                        es_constants, gammas,
                                        resonance_integrability_probe)

GAMMA_OS = PI / (2 * PI - 4)
GAMMA_EA = PI / (8 - 2 * PI)


def test_laplacian_closed_form_constants(lap):
    g = gammas(lap)
    assert g.gamma_os == pytest.approx(GAMMA_OS, rel=1e-6)
    assert g.gamma_oa == pytest.approx(GAMMA_OS, rel=1e-6)
    assert g.gamma_ea == pytest.approx(GAMMA_EA, rel=1e-6)
    assert g.gamma_es == pytest.approx(0.5, rel=1e-6)
    assert g.gamma_oa == pytest.approx(g.gamma_os, rel=1e-7)


def test_laplacian_es_constants(lap):
    th = es_constants(lap)
    assert th.theta_star == pytest.approx(1.0, rel=1e-6)
    assert abs(th.theta_2star) < 1e-6
    assert th.kappa1 == pytest.approx(2.0, rel=1e-6)


def test_coupling_thresholds_positive_b(lap):
    ct = coupling_thresholds(lap, 1.0, 2.0)
    assert ct.mu0["os"] == pytest.approx(GAMMA_OS / 2, rel=1e-6)
    assert ct.mu0["ea"] == pytest.approx(GAMMA_EA / 2, rel=1e-6)
    # (a + 4b) gamma_es / (ab) for a=1, b=2
    assert ct.mu0["es"] == pytest.approx(9 * 0.5 / 2, rel=1e-6)


def test_coupling_thresholds_reference_values(lap):
    assert coupling_thresholds(lap, 1.0, 1.0).mu0["es"] == pytest.approx(2.5, rel=1e-6)
    assert coupling_thresholds(lap, 1.0, 3.0).mu0["es"] == pytest.approx(13.0 / 6.0, rel=1e-6)


def test_coupling_thresholds_negative_b(lap):
    ct = coupling_thresholds(lap, 1.0, -1.0)
    for s in ("os", "oa", "ea"):
        assert ct.mu0[s] is NO_THRESHOLD
    # a + 4b < 0 and ab < 0: ratio positive, threshold at 1.5
    assert ct.mu0["es"] == pytest.approx(1.5, rel=1e-6)


def test_coupling_thresholds_no_es_threshold(lap):
    # ab < 0 with a + 4b > 0: eigenvalue for every mu > 0
    assert coupling_thresholds(lap, -1.0, 1.0).mu0["es"] == 0.0


def test_zero_coupling_rejected(lap):
    with pytest.raises(ZeroCoupling):
        coupling_thresholds(lap, 0.0, 1.0)
    with pytest.raises(ZeroCoupling):
        coupling_thresholds(lap, 1.0, 0.0)


def test_classification_positive_b(lap):
    cls = classify_threshold_solutions(lap, 1.0, 1.0)
    assert cls.os is ThresholdKind.RESONANCE
    assert cls.oa is ThresholdKind.RESONANCE
    assert cls.ea is ThresholdKind.EIGENFUNCTION
    # off the theta_star a = theta_2star b line there is no threshold solution
    assert cls.es is ThresholdKind.NO_SOLUTION


def test_classification_negative_b(lap):
    cls = classify_threshold_solutions(lap, 1.0, -1.0)
    assert cls.os is ThresholdKind.NOT_APPLICABLE
    assert cls.ea is ThresholdKind.NOT_APPLICABLE
    assert cls.es is ThresholdKind.NO_SOLUTION
    cls2 = classify_threshold_solutions(lap, -1.0, -1.0)
    assert cls2.es is ThresholdKind.NOT_APPLICABLE


def test_probe_os_log_divergent(lap):
    rep = resonance_integrability_probe(lap, "os")
    assert rep.classification == "log-divergent"
    assert rep.r_squared > 0.999
    # slope of I(r) against ln(1/r) is 2/pi for the discrete Laplacian
    assert rep.slope == pytest.approx(2.0 / PI, rel=1e-3)


def test_probe_ea_convergent(lap):
    rep = resonance_integrability_probe(lap, "ea")
    assert rep.classification == "convergent"
    tail = [d for r, d in zip(rep.rs[1:], rep.cauchy_diffs) if r <= 1e-3]
    assert max(tail) < 1e-6


def test_probe_requires_positive_b(lap):
    with pytest.raises(ZeroCoupling):
        resonance_integrability_probe(lap, "os", b=-1.0)


def test_constants_csv(lap):
    text = constants_csv([("laplacian", lap)])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 1
    assert float(rows[0]["gamma_es"]) == pytest.approx(0.5, rel=1e-6)
    assert float(rows[0]["kappa1"]) == pytest.approx(2.0, rel=1e-6)
