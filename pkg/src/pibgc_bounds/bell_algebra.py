"""Post-selected two-qubit state, Pauli twirl and PPT-based distillability tests."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel_core import CompositionForm, f_coeff

PPT_TOL = 1e-12


@dataclass(frozen=True)
class BellDiag2:
    """Weights of psi_00, psi_01, psi_10, psi_11 (first index phase, second bit flip)."""

    a00: float
    a01: float
    a10: float
    a11: float

    def __post_init__(self):
        vals = self.as_tuple()
        if min(vals) < -1e-15:
            raise ValueError(f"negative Bell weight in {vals}")
        if abs(math.fsum(vals) - 1.0) > 1e-12:
            raise ValueError(f"Bell weights sum to {math.fsum(vals)!r}")

    def as_tuple(self) -> tuple:
        return (self.a00, self.a01, self.a10, self.a11)

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a00, self.a01], [self.a10, self.a11]])

    @classmethod
    def from_matrix(cls, a) -> "BellDiag2":
        a = np.asarray(a, dtype=float)
        return cls(float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1]))


@dataclass(frozen=True)
class BellDiagD:
    alpha: np.ndarray  # alpha[m, n]

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise ValueError("alpha must be a square matrix with d >= 2")
        if a.min() < -1e-15 or abs(a.sum() - 1.0) > 1e-10:
            raise ValueError("alpha is not a probability matrix")
        object.__setattr__(self, "alpha", a)

    @property
    def d(self) -> int:
        return self.alpha.shape[0]


@dataclass(frozen=True)
class ConditionalState:
    """X-shaped state in the basis |00>, |0M>, |M0>, |MM> of the two kept levels.

    Only six real numbers are stored: four populations and the two coherences
    between |00> and |MM>.
    """

    C: float
    p00: float
    p0M: float
    pM0: float
    pMM: float
    coh_lo: float  # <00| rho |MM>
    coh_hi: float  # <MM| rho |00>
    M: int
    c: float

    def matrix(self) -> np.ndarray:
        rho = np.diag([self.p00, self.p0M, self.pM0, self.pMM])
        rho[0, 3] = self.coh_lo
        rho[3, 0] = self.coh_hi
        return rho


def conditional_state(cf: CompositionForm, M: int, c: float) -> ConditionalState:
    if M < 1:
        raise ValueError("M must be >= 1")
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    c0sq, c1sq = c * c, 1.0 - c * c
    cross = c * math.sqrt(c1sq)
    p00 = c0sq * f_coeff(0, 0, 0, cf)
    p0M = c0sq * f_coeff(0, 0, M, cf)
    pM0 = c1sq * f_coeff(M, M, 0, cf)
    pMM = c1sq * f_coeff(M, M, M, cf)
    C = math.fsum((p00, p0M, pM0, pMM))
    if C <= 0.0:
        raise ValueError("post-selection probability vanishes")
    lo = cross * f_coeff(0, M, M, cf)
    hi = cross * f_coeff(M, 0, 0, cf)
    return ConditionalState(C, p00 / C, p0M / C, pM0 / C, pMM / C, lo / C, hi / C, M, c)


def bell_vectors() -> np.ndarray:
    """Rows are psi_mn in the order 00, 01, 10, 11 over the basis |00>,|01>,|10>,|11>."""
    out = np.zeros((4, 4))
    for idx, (m, n) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        for j in (0, 1):
            out[idx, 2 * j + (j ^ n)] = (-1) ** (m * j) / math.sqrt(2.0)
    return out


def twirl(cs: ConditionalState) -> BellDiag2:
    coh = 0.5 * (cs.coh_lo + cs.coh_hi)
    diag = 0.5 * (cs.p00 + cs.pMM)
    flip = 0.5 * (cs.p0M + cs.pM0)
    a = np.array([diag + coh, flip, diag - coh, flip])
    a = np.clip(a, 0.0, None)
    return BellDiag2(*(float(x) for x in a / a.sum()))


def bell_diag_matrix(bd: BellDiag2) -> np.ndarray:
    v = bell_vectors()
    return np.einsum("k,ki,kj->ij", np.array(bd.as_tuple()), v, v)


def partial_transpose(rho: np.ndarray) -> np.ndarray:
    # transpose the second qubit
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def is_npt(rho: np.ndarray, tol: float = PPT_TOL) -> bool:
    return bool(np.linalg.eigvalsh(partial_transpose(rho)).min() < -tol)


def bell_diag_distillable(bd: BellDiag2, tol: float = PPT_TOL) -> bool:
    return is_npt(bell_diag_matrix(bd), tol)


def conditional_det_condition(cf: CompositionForm, M: int) -> bool:
    """Negative determinant of the |0M>,|M0> block of the partial transpose."""
    return f_coeff(0, 0, M, cf) * f_coeff(M, M, 0, cf) < f_coeff(0, M, M, cf) * f_coeff(M, 0, 0, cf)


def conditional_is_distillable(cf: CompositionForm, M: int = 1, cross_check: bool = True) -> bool:
    closed = (1.0 - cf.lam) * cf.g < 1.0
    if cross_check:
        via_f = conditional_det_condition(cf, M)
        # the product form loses resolution right at the boundary, so only flag clear disagreements
        margin = abs((1.0 - cf.lam) * cf.g - 1.0)
        if via_f != closed and margin > 1e-9:
            raise AssertionError(f"determinant test disagrees with (1-lam)g<1 at {cf}, M={M}")
    return closed


@dataclass(frozen=True)
class CBar:
    value: float
    boundary: bool


def c_bar(cf: CompositionForm, M: int) -> CBar:
    if cf.g == 1.0:
        return CBar(1.0 / math.sqrt(2.0), True)
    return CBar(1.0 / math.sqrt(1.0 + (cf.g - 1.0) ** M), False)
