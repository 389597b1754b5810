import math

import numpy as np
import pytest

from qcheshire import model as m
from qcheshire.config import ExperimentConfig
from qcheshire.extraction import (
    SignalDecomposition, analyse, assemble_wv_matrix, decompose_signal, expected_mean_ratio,
    extract_absorber_wv, extract_rotation_wv,
)
from qcheshire.fitting import FitResult
from qcheshire.synth import run_measurement_set

TAG = m.OperatorTag(m.TagKind.SPIN_X_PATH, 0)


def fit(i0, b, phi, db=0.01, dphi=0.01, omega=1.0):
    cov = np.diag([0.01**2, db**2, dphi**2])
    return FitResult(i0, b, omega, phi, cov, 1.0, True)


def test_signal_is_phasor_difference():
    d = decompose_signal(fit(1.0, 0.5, 0.3), fit(1.0, 0.2, 1.1))
    z = 0.5 * np.exp(0.3j) - 0.2 * np.exp(1.1j)
    assert d.b_signal == pytest.approx(abs(z), abs=1e-14)
    assert d.phi_signal == pytest.approx(np.angle(z), abs=1e-14)


def test_signal_without_prep_fringe_is_weak_amplitude():
    d = decompose_signal(fit(1.0, 0.4, 0.3, db=0.02), fit(1.0, 0.0, 0.0, db=0.03))
    assert d.b_signal == pytest.approx(0.4)
    assert d.db_signal == pytest.approx(math.hypot(0.02, math.cos(0.3) * 0.03), rel=1e-12)


def test_signal_zero_is_finite():
    d = decompose_signal(fit(1.0, 0.2, 0.5, db=0.02), fit(1.0, 0.2, 0.5, db=0.03))
    assert d.b_signal == 0.0
    assert d.db_signal == pytest.approx(0.03)


def test_omega_mismatch_rejected():
    with pytest.raises(ValueError):
        decompose_signal(fit(1.0, 0.2, 0.5, omega=1.0), fit(1.0, 0.2, 0.5, omega=1.01))


def test_rotation_wv_formula_and_errors():
    dec = SignalDecomposition(0.02, 0.002, 0.0)
    r = extract_rotation_wv(dec, 0.1, 0.001, 0.5, 0.01, 0.35, 0.0, TAG)
    assert r.magnitude == pytest.approx(0.02 / 0.1 / (0.5 * 0.35))
    rel = math.sqrt(0.1**2 + 0.01**2 + 0.02**2)
    assert r.error == pytest.approx(r.magnitude * rel)
    zero = extract_rotation_wv(SignalDecomposition(0.0, 0.002, 0.0), 0.1, 0.001, 0.5, 0.01, 0.35, 0.0, TAG)
    assert zero.magnitude == 0.0 and zero.error > 0
    with pytest.raises(ValueError):
        extract_rotation_wv(dec, 0.1, 0.001, 0.0, 0.01, 0.35, 0.0, TAG)


def test_absorber_wv_formula():
    r = extract_absorber_wv(0.09, 0.0, 0.1, 0.0, 0.1, 0.01)
    assert r.magnitude == pytest.approx(1.0)
    assert r.error == pytest.approx(0.1)
    r = extract_absorber_wv(0.1, 0.001, 0.1, 0.001, 0.1, 0.01)
    assert r.magnitude == pytest.approx(0.0, abs=1e-15)
    assert r.error == pytest.approx(math.sqrt(2) * 0.01 / 0.1 * 0.1 / 0.1 * 1.0, rel=1e-12)


def test_expected_mean_ratio_pattern():
    a = math.pi / 9
    assert expected_mean_ratio(m.Kind.DC, 1, a, 0.1) == (1 - a * a / 4, "-alpha^2/4")
    assert expected_mean_ratio(m.Kind.RF, 2, a, 0.1)[0] == 1 + a * a / 4
    assert expected_mean_ratio(m.Kind.ABSORBER, 1, a, 0.1)[0] == 0.9
    assert expected_mean_ratio(m.Kind.ABSORBER, 0, a, 0.1)[0] == 1.0


def test_matrix_sums_and_errors():
    res = {}
    from qcheshire.extraction import ExtractionResult
    from qcheshire.synth import CELL_KINDS
    for r, kind in enumerate(CELL_KINDS):
        for j in range(3):
            res[(kind, j)] = ExtractionResult(float(r == j), 0.1, TAG)
    w = assemble_wv_matrix(res)
    assert w.row_sums.tolist() == [1.0, 1.0, 1.0]
    assert w.row_errors == pytest.approx([math.sqrt(0.03)] * 3)
    assert w.identity_flags().all()


def test_ideal_pipeline_is_identity():
    a = analyse(run_measurement_set(ExperimentConfig.ideal(), noise=False))
    v = a.matrix.values
    off = v[~np.eye(3, dtype=bool)]
    assert np.max(np.abs(off)) <= 1e-9
    alpha = math.pi / 9
    assert v[0, 0] == pytest.approx(2 * math.sin(alpha / 2) / alpha, abs=1e-9)
    assert v[1, 1] == pytest.approx(1.0, abs=1e-12)


def test_ideal_pipeline_recovers_empty_contrast_of_realistic_model():
    cfg = ExperimentConfig()
    a = analyse(run_measurement_set(cfg, noise=False))
    for loop, (c, _) in a.c_empty.items():
        assert c == pytest.approx(cfg.imperfections.contrast(loop), abs=1e-9)
