import math

import numpy as np
import pytest

from pibgc_bounds.bell_algebra import conditional_is_distillable
from pibgc_bounds.channel_core import CompositionForm, is_entanglement_breaking
from pibgc_bounds.gaussian_cov import CovMatrix4, choi_cov, det4, simon_f, tmsv_cov


def propagate(V, g, lam):
    """Loss then amplification on mode B, via the symplectic dilations."""
    V = V.copy()
    X = np.diag([1, 1, math.sqrt(lam), math.sqrt(lam)])
    Y = np.diag([0, 0, 1 - lam, 1 - lam])
    V = X @ V @ X.T + Y
    X = np.diag([1, 1, math.sqrt(g), math.sqrt(g)])
    Y = np.diag([0, 0, g - 1, g - 1])
    return X @ V @ X.T + Y


def test_tmsv_examples():
    assert np.array_equal(tmsv_cov(0).entries, np.eye(4))
    V = tmsv_cov(1)
    assert np.allclose(V.V_A, 3 * np.eye(2)) and np.allclose(V.V_AB, 2 * math.sqrt(2) * np.diag([1, -1]))
    for ns in (0.1, 1, 7.5):
        assert det4(tmsv_cov(ns).entries) == pytest.approx(1.0, rel=1e-10)
        assert tmsv_cov(ns).is_physical()


def test_choi_cov_examples():
    assert np.allclose(choi_cov(CompositionForm(1, 1), 2).entries, tmsv_cov(2).entries)
    V = choi_cov(CompositionForm(1.7, 0), 2)
    assert np.allclose(V.V_AB, 0)


@pytest.mark.parametrize("g,lam,ns", [(1.25, 0.6, 1.0), (2.5, 0.3, 0.2), (1.0, 0.9, 4.0)])
def test_choi_cov_vs_propagation(g, lam, ns):
    V = choi_cov(CompositionForm(g, lam), ns)
    assert np.allclose(V.entries, propagate(tmsv_cov(ns).entries, g, lam), atol=1e-12)
    assert V.is_physical()


def test_det4_matches_numpy():
    rng = np.random.default_rng(0)
    for _ in range(50):
        A = rng.normal(size=(4, 4))
        assert det4(A) == pytest.approx(np.linalg.det(A), rel=1e-10, abs=1e-12)


def test_simon_closed_form_grid():
    for g in np.linspace(1, 3, 20):
        for lam in np.linspace(0, 1, 20):
            for ns in (0.1, 0.5, 1, 3, 10):
                ref = -16 * ns * (1 + ns) * g * (1 - (1 - lam) * g)
                assert abs(simon_f(choi_cov(CompositionForm(g, lam), ns)) - ref) <= 1e-9


def test_simon_sign_examples():
    assert simon_f(choi_cov(CompositionForm(2, 0.5), 1)) == pytest.approx(0, abs=1e-9)
    prod = CovMatrix4(np.diag([3, 3, 5, 5.0]))
    assert simon_f(prod) >= 0


def test_sign_equivalence():
    for g in np.linspace(1, 3, 15):
        for lam in np.linspace(0.03, 1, 15):
            cf = CompositionForm(float(g), float(lam))
            if abs((1 - lam) * g - 1) < 1e-9:
                continue
            neg = simon_f(choi_cov(cf, 0.7)) < 0
            assert neg == conditional_is_distillable(cf) == (not is_entanglement_breaking(cf))


def test_unphysical_detected():
    assert not CovMatrix4(0.5 * np.eye(4)).is_physical()
