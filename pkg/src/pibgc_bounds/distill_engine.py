"""P1-or-P2 recurrence (qubit and qudit) and hashing-type yields."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bell_algebra import BellDiag2, BellDiagD

P1, P2 = "P1", "P2"
PERMUTATIONS = ("identity", "hadamard", "b_x")


class DegenerateStep(ArithmeticError):
    pass


def _entropy_bits(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0.0]
    return float(-(p * np.log2(p)).sum())


def binary_entropy(x: float) -> float:
    return _entropy_bits((x, 1.0 - x))


def _normalize(a: np.ndarray) -> np.ndarray:
    a = np.clip(a, 0.0, None)
    return a / a.sum()


def _conv_rows(a: np.ndarray) -> np.ndarray:
    # out[m, n] = sum_{m1 + m2 = m mod d} a[m1, n] a[m2, n]
    d = a.shape[0]
    out = np.zeros_like(a)
    for m1 in range(d):
        out += a[m1][None, :] * np.roll(a, m1, axis=0)
    return out


def step_tuple(a00: float, a01: float, a10: float, a11: float) -> tuple[tuple, float, str]:
    """One qubit P1-or-P2 step on bare weights; returns (weights, P, branch)."""
    if a10 < a01:
        # bit-flip parity kept: mix along m for fixed n
        c0, c1 = a00 + a10, a01 + a11
        P = c0 * c0 + c1 * c1
        out = (a00 * a00 + a10 * a10, a01 * a01 + a11 * a11, 2 * a00 * a10, 2 * a01 * a11)
        branch = P1
    else:
        r0, r1 = a00 + a01, a10 + a11
        P = r0 * r0 + r1 * r1
        out = (a00 * a00 + a01 * a01, 2 * a00 * a01, a10 * a10 + a11 * a11, 2 * a10 * a11)
        branch = P2
    if P <= 0.0:
        raise DegenerateStep("recurrence success probability is zero")
    tot = math.fsum(out)
    return tuple(x / tot for x in out), P, branch


def p1p2_step(bd: BellDiag2) -> tuple[BellDiag2, float, str]:
    out, P, branch = step_tuple(*bd.as_tuple())
    return BellDiag2(*out), P, branch


def p1p2_step_qudit(bd: BellDiagD) -> tuple[BellDiagD, float, str]:
    if bd.d == 2:
        # share the qubit arithmetic so both paths agree bit for bit
        out, P, branch = step_tuple(*bd.alpha.ravel())
        return BellDiagD(np.array(out).reshape(2, 2)), P, branch
    return _qudit_generic(bd.alpha)


def _qudit_generic(a: np.ndarray) -> tuple[BellDiagD, float, str]:
    if a[:, 0].sum() < a[0, :].sum():
        branch, P = P1, float((a.sum(axis=0) ** 2).sum())
        out = _conv_rows(a)
    else:
        branch, P = P2, float((a.sum(axis=1) ** 2).sum())
        out = _conv_rows(a.T).T
    if P <= 0.0:
        raise DegenerateStep("recurrence success probability is zero")
    return BellDiagD(_normalize(out / P)), P, branch


@dataclass
class RecurrenceTrace:
    states: list = field(default_factory=list)  # state after t steps, t = 0..k
    probs: list = field(default_factory=list)
    branches: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.probs)

    def survival(self, k: int | None = None) -> float:
        k = self.k if k is None else k
        out = 1.0
        for P in self.probs[:k]:
            out *= 0.5 * P
        return out


def run_recurrence(bd, k: int) -> RecurrenceTrace:
    step = p1p2_step if isinstance(bd, BellDiag2) else p1p2_step_qudit
    tr = RecurrenceTrace(states=[bd])
    for _ in range(k):
        nxt, P, br = step(tr.states[-1])
        tr.states.append(nxt)
        tr.probs.append(P)
        tr.branches.append(br)
    return tr


def _y(a00: float, a01: float, a10: float, a11: float) -> float:
    s1, s2 = a00 + a10, a01 + a11
    gain = 0.0
    if s1 > 0.0 and s2 > 0.0:
        gain = 0.5 * s1 * s2 * (binary_entropy(a00 / s1) + binary_entropy(a11 / s2))
    return max(0.0, 1.0 - _entropy_bits((a00, a01, a10, a11)) + gain)


def hashing_yield(bd: BellDiag2) -> float:
    return _y(*bd.as_tuple())


def plain_hashing_yield(bd: BellDiag2) -> float:
    return max(0.0, 1.0 - _entropy_bits(bd.as_tuple()))


def best_yield(bd: BellDiag2) -> tuple[float, str]:
    return best_yield_tuple(*bd.as_tuple())


def best_yield_tuple(a00: float, a01: float, a10: float, a11: float) -> tuple[float, str]:
    cands = (_y(a00, a01, a10, a11), _y(a00, a10, a01, a11), _y(a01, a00, a10, a11))
    best = 0
    for j in (1, 2):
        if cands[j] > cands[best]:
            best = j
    return cands[best], PERMUTATIONS[best]


def qudit_yield(bd: BellDiagD) -> float:
    if bd.d == 2:
        return best_yield(BellDiag2.from_matrix(bd.alpha))[0]
    return max(0.0, math.log2(bd.d) - _entropy_bits(bd.alpha))
