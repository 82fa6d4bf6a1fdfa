import math
import random

import pytest

from pibgc_bounds.channel_core import (CompositionForm, PiBGC, channel_action_fock, f_coeff,
                                       is_entanglement_breaking, to_composition)
from oracles import single_mode_image


def test_composition_examples():
    cf = to_composition(PiBGC.attenuator(0.75, 1.0))
    assert cf.g == pytest.approx(1.25, rel=1e-12) and cf.lam == pytest.approx(0.6, rel=1e-12)
    cf = to_composition(PiBGC.amplifier(2.0, 0.0))
    assert (cf.g, cf.lam) == (2.0, 1.0)
    cf = to_composition(PiBGC.additive(0.5))
    assert cf.g == pytest.approx(1.5) and cf.lam == pytest.approx(2 / 3, rel=1e-12)


def test_composition_round_trip():
    # the attenuator output photon number and transmissivity are recovered from (g, lam)
    rng = random.Random(1)
    for _ in range(50):
        lam, nu = rng.random(), rng.uniform(0, 20)
        cf = to_composition(PiBGC.attenuator(lam, nu))
        assert cf.g * cf.lam == pytest.approx(lam, rel=1e-12)
        assert cf.g - 1 == pytest.approx((1 - lam) * nu, rel=1e-12, abs=1e-15)


def test_invalid_channels():
    with pytest.raises(ValueError):
        PiBGC.attenuator(1.5, 0.0)
    with pytest.raises(ValueError):
        PiBGC("attenuator", lam=0.5)
    with pytest.raises(ValueError):
        PiBGC("additive", xi=0.2, nu=1.0)
    with pytest.raises(ValueError):
        CompositionForm(0.9, 0.5)


def test_eb_examples():
    assert not is_entanglement_breaking(CompositionForm(1.25, 0.6))
    assert is_entanglement_breaking(CompositionForm(2.0, 0.5))
    for nu in (0.5, 1.0, 3.0):
        # the attenuator EB boundary, up to float round-off in g*(1-lam)
        inside = to_composition(PiBGC.attenuator(nu / (nu + 1) - 1e-9, nu))
        outside = to_composition(PiBGC.attenuator(nu / (nu + 1) + 1e-9, nu))
        assert is_entanglement_breaking(inside) and not is_entanglement_breaking(outside)


@pytest.mark.parametrize("nu", [0.3, 1.0, 4.0])
def test_eb_regions_per_channel(nu):
    for lam in [j / 50 for j in range(51)]:
        eb = is_entanglement_breaking(to_composition(PiBGC.attenuator(lam, nu)))
        if abs(lam - nu / (nu + 1)) > 1e-9:
            assert eb == (lam < nu / (nu + 1))
    for g in [1 + j / 10 for j in range(40)]:
        eb = is_entanglement_breaking(to_composition(PiBGC.amplifier(g, nu)))
        if abs(g - 1 - 1 / nu) > 1e-9:
            assert eb == (g > 1 + 1 / nu)
    for xi in [j / 20 for j in range(40)]:
        if abs(xi - 1) > 1e-9:
            assert is_entanglement_breaking(to_composition(PiBGC.additive(xi))) == (xi > 1)


def test_f_examples():
    assert f_coeff(0, 0, 2, CompositionForm(2, 0.5)) == pytest.approx(0.125, abs=1e-15)
    assert f_coeff(1, 1, 0, CompositionForm(2, 0.5)) == pytest.approx(0.25, abs=1e-15)
    assert f_coeff(2, 2, 1, CompositionForm(1, 0.3)) == pytest.approx(0.42, abs=1e-14)


@pytest.mark.parametrize("g,lam", [(1.25, 0.6), (2.0, 0.3), (1.0, 0.8), (3.0, 1.0), (1.7, 0.0)])
def test_f_matches_kraus_oracle(g, lam):
    cf = CompositionForm(g, lam)
    for n in range(5):
        for i in range(5):
            img = single_mode_image(n, i, g, lam, 16)
            for l in range(max(i - n, 0), 10):
                assert f_coeff(n, i, l, cf) == pytest.approx(img[l + n - i, l], abs=1e-13)


def test_closed_form_special_values():
    rng = random.Random(3)
    for _ in range(20):
        g, lam = rng.uniform(1, 3), rng.random()
        cf = CompositionForm(g, lam)
        for M in range(1, 6):
            assert f_coeff(0, 0, M, cf) == pytest.approx((g - 1) ** M / g ** (1 + M), rel=1e-12, abs=1e-300)
            assert f_coeff(M, M, 0, cf) == pytest.approx((1 - lam) ** M / g, rel=1e-12, abs=1e-300)
            ref = lam ** (M / 2) / g ** (1 + M / 2)
            assert f_coeff(0, M, M, cf) == pytest.approx(ref, rel=1e-12)
            assert f_coeff(M, 0, 0, cf) == pytest.approx(ref, rel=1e-12)


def test_pure_loss_binomial():
    for lam in (0.0, 0.2, 0.5, 0.93, 1.0):
        cf = CompositionForm(1.0, lam)
        for n in range(8):
            for l in range(n + 3):
                ref = math.comb(n, l) * lam ** l * (1 - lam) ** (n - l) if l <= n else 0.0
                assert f_coeff(n, n, l, cf) == pytest.approx(ref, abs=1e-12)


def test_large_indices_stay_finite():
    cf = CompositionForm(1.3, 0.7)
    vals = [f_coeff(150, 150, l, cf) for l in range(0, 400, 10)]
    assert all(math.isfinite(v) and v >= 0 for v in vals)


def test_channel_action_examples():
    act = channel_action_fock(0, 0, CompositionForm(2, 0.5), 3)
    coeffs = [e[2] for e in act.entries]
    assert coeffs[0] == pytest.approx(0.5)
    assert coeffs == pytest.approx([1 / 2, 1 / 4, 1 / 8, 1 / 16])
    assert act.tail_mass == pytest.approx(1 / 16)
    act = channel_action_fock(1, 1, CompositionForm(1, 0.4), 1)
    assert {(k, b): c for k, b, c in act.entries} == pytest.approx({(0, 0): 0.6, (1, 1): 0.4})
    assert [e[:2] for e in channel_action_fock(1, 3, CompositionForm(1.5, 0.5), 4).entries] == \
        [(0, 2), (1, 3), (2, 4)]
    with pytest.raises(ValueError):
        channel_action_fock(0, 2, CompositionForm(1.5, 0.5), 1)


def test_trace_preservation_random():
    rng = random.Random(11)
    for _ in range(20):
        cf = CompositionForm(rng.uniform(1, 3), rng.random())
        for n in range(6):
            assert abs(channel_action_fock(n, n, cf, 200).tail_mass) < 1e-10
