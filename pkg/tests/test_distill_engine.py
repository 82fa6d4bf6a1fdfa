import math

import numpy as np
import pytest

from pibgc_bounds.bell_algebra import BellDiag2, BellDiagD
from pibgc_bounds.distill_engine import (P1, P2, best_yield, hashing_yield, p1p2_step,
                                         p1p2_step_qudit, plain_hashing_yield,
                                         _qudit_generic, qudit_yield,
                                         run_recurrence)
from oracles import hashing_reference, p1p2_reference


def random_bd(rng):
    return BellDiag2(*map(float, rng.dirichlet(np.ones(4) * rng.uniform(0.2, 3))))


def test_step_worked_example():
    out, P, br = p1p2_step(BellDiag2(0.7, 0.2, 0.05, 0.05))
    assert br == P1 and P == pytest.approx(0.625)
    assert out.as_tuple() == pytest.approx((0.788, 0.068, 0.112, 0.032), abs=1e-12)


def test_step_fixed_points():
    out, P, br = p1p2_step(BellDiag2(1, 0, 0, 0))
    assert out.as_tuple() == (1, 0, 0, 0) and P == 1 and br == P2
    out, P, br = p1p2_step(BellDiag2(0.25, 0.25, 0.25, 0.25))
    assert out.as_tuple() == pytest.approx((0.25,) * 4) and P == 0.5 and br == P2


def test_branch_at_equality_is_p2():
    _, _, br = p1p2_step(BellDiag2(0.6, 0.15, 0.15, 0.1))
    assert br == P2


def test_step_against_reference_loop():
    rng = np.random.default_rng(0)
    for _ in range(200):
        bd = random_bd(rng)
        ref = p1p2_reference(bd.as_matrix(), 3)
        tr = run_recurrence(bd, 3)
        for t in range(3):
            assert np.allclose(tr.states[t + 1].as_matrix(), ref[t][0], atol=1e-13)
            assert tr.probs[t] == pytest.approx(ref[t][1], rel=1e-12)


def test_normalization_many_steps():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        out, P, _ = p1p2_step(random_bd(rng))
        assert abs(sum(out.as_tuple()) - 1) <= 1e-12 and 0 < P <= 1


def test_qudit_d2_matches_qubit():
    rng = np.random.default_rng(2)
    for _ in range(200):
        bd = random_bd(rng)
        a, P, br = p1p2_step(bd)
        b, Q, br2 = p1p2_step_qudit(BellDiagD(bd.as_matrix()))
        assert np.array_equal(a.as_matrix(), b.alpha) and P == Q and br == br2
        c, R, br3 = _qudit_generic(bd.as_matrix())
        assert np.allclose(c.alpha, b.alpha, atol=1e-15) and R == pytest.approx(P) and br3 == br


def test_qudit_examples():
    d = 3
    e = np.zeros((d, d))
    e[0, 0] = 1
    out, P, _ = p1p2_step_qudit(BellDiagD(e))
    assert np.array_equal(out.alpha, e) and P == 1
    out, P, _ = p1p2_step_qudit(BellDiagD(np.full((d, d), 1 / d ** 2)))
    assert np.allclose(out.alpha, 1 / d ** 2) and P == pytest.approx(1 / d)
    rng = np.random.default_rng(3)
    for d in (3, 4, 6):
        a = rng.dirichlet(np.ones(d * d)).reshape(d, d)
        ref = p1p2_reference(a, 2)
        tr = run_recurrence(BellDiagD(a), 2)
        for t in range(2):
            assert np.allclose(tr.states[t + 1].alpha, ref[t][0], atol=1e-13)


def test_hashing_examples():
    assert hashing_yield(BellDiag2(1, 0, 0, 0)) == 1
    assert hashing_yield(BellDiag2(0.25, 0.25, 0.25, 0.25)) == 0
    a = (0.9, 0.05, 0.03, 0.02)
    assert hashing_yield(BellDiag2(*a)) == pytest.approx(hashing_reference(a), abs=1e-14)
    assert hashing_yield(BellDiag2(*a)) >= plain_hashing_yield(BellDiag2(*a))


def test_hashing_dominates_plain():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        bd = random_bd(rng)
        assert hashing_yield(bd) >= plain_hashing_yield(bd) - 1e-15
        assert hashing_yield(bd) == pytest.approx(hashing_reference(bd.as_tuple()), abs=1e-13)


def test_best_yield_permutations():
    assert best_yield(BellDiag2(1, 0, 0, 0)) == (1, "identity")
    # symmetric input: first two candidates coincide and the first wins
    y, perm = best_yield(BellDiag2(0.7, 0.1, 0.1, 0.1))
    assert perm == "identity"
    a = (0.05, 0.9, 0.03, 0.02)
    cands = [hashing_reference(p) for p in (a, (a[0], a[2], a[1], a[3]), (a[1], a[0], a[2], a[3]))]
    y, perm = best_yield(BellDiag2(*a))
    assert y == pytest.approx(max(cands))
    assert perm == ("identity", "hadamard", "b_x")[int(np.argmax(cands))]
    y, perm = best_yield(BellDiag2(0.05, 0.9, 0.02, 0.03))
    assert perm == "b_x"


def test_best_yield_invariance():
    rng = np.random.default_rng(5)
    for _ in range(300):
        a00, a01, a10, a11 = random_bd(rng).as_tuple()
        base = best_yield(BellDiag2(a00, a01, a10, a11))[0]
        assert best_yield(BellDiag2(a00, a10, a01, a11))[0] == pytest.approx(base, abs=1e-14)


def test_qudit_yield():
    e = np.zeros((3, 3))
    e[0, 0] = 1
    assert qudit_yield(BellDiagD(e)) == pytest.approx(math.log2(3))
    assert qudit_yield(BellDiagD(np.full((3, 3), 1 / 9))) == 0
    bd = BellDiag2(0.8, 0.1, 0.06, 0.04)
    assert qudit_yield(BellDiagD(bd.as_matrix())) == best_yield(bd)[0]
