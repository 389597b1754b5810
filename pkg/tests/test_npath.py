import math

import numpy as np
import pytest

from qcheshire import hilbert as hb
from qcheshire import npath
from qcheshire.model import Selection


def test_dimensions():
    assert [npath.dim(n) for n in (2, 3, 4, 5, 6)] == [4, 12, 32, 80, 192]
    with pytest.raises(ValueError):
        npath.dim(7)


def test_states_normalised():
    for n in range(2, 7):
        i, f = npath.pan_states(n, Selection.npath(np.linspace(0, 1, n)))
        assert hb.norm(i) == pytest.approx(1.0, abs=1e-15)
        assert hb.norm(f) == pytest.approx(1.0, abs=1e-15)


def test_baseline_is_one_over_n_squared():
    for n in range(2, 6):
        s = Selection.npath([0.3] * n)
        i, f = npath.pan_states(n, s)
        assert abs(hb.inner(f, i)) ** 2 == pytest.approx(1 / n**2, abs=1e-15)


def test_frozen_example():
    # n=3, p=1, j=2, alpha=1, chis=(0.5, -0.2, 0.0): sin(0.7) cross term
    s = Selection.npath([0.5, -0.2, 0.0])
    sa = math.sin(0.5)
    want = (1 + 2 * sa * math.sin(0.7) + sa * sa) / 9
    assert npath.pan_intensity(3, 1, 2, 1.0, s) == pytest.approx(want, abs=1e-14)
    assert npath.pan_intensity_closed(3, 1, 2, 1.0, s) == pytest.approx(want, abs=1e-14)


def test_reference_path_rotation_lowers_intensity():
    s = Selection.npath([0.0] * 4)
    for p in (1, 2, 3):
        got = npath.pan_intensity(4, p, 1, 0.4, s)
        assert got == pytest.approx((1 - math.sin(0.2) ** 2) / 16, abs=1e-15)


def test_operator_matches_expm():
    for n in (2, 3, 4):
        for p in range(1, n):
            for j in range(1, n + 1):
                gen = npath.sigma_x(n, p) @ npath.path_projector(n, j)
                oracle = hb.expm(-0.5j * 0.8 * gen)
                assert np.max(np.abs(npath.pan_operator(n, p, j, 0.8) - oracle)) <= 1e-12


def test_weak_values_identity_pattern():
    s = Selection.npath([0.0] * 4)
    for p in (1, 2, 3):
        for j in range(1, 5):
            wv = npath.pan_weak_value(4, p, j, s)
            assert abs(wv) == pytest.approx(1.0 if j == p + 1 else 0.0, abs=1e-12)
    assert abs(npath.pan_weak_value(4, None, 1, s)) == pytest.approx(1.0, abs=1e-12)


def test_absorber_only_matters_in_reference_path():
    s = Selection.npath([0.1, 0.2, 0.3])
    base = 1 / 9
    assert npath.pan_absorber_intensity(3, 1, 0.1, s) == pytest.approx(0.9 * base, abs=1e-15)
    assert npath.pan_absorber_intensity(3, 2, 0.1, s) == pytest.approx(base, abs=1e-15)


def test_index_validation():
    s = Selection.npath([0.0] * 3)
    with pytest.raises(ValueError):
        npath.pan_intensity(3, 3, 1, 0.1, s)
    with pytest.raises(ValueError):
        npath.pan_intensity(3, 1, 0, 0.1, s)
    with pytest.raises(ValueError):
        npath.pan_intensity(4, 1, 1, 0.1, s)
