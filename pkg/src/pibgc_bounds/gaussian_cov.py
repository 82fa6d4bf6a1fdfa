"""Two-mode covariance matrices (vacuum variance 1) and the Simon PPT functional."""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from .channel_core import CompositionForm

SIGMA_Z = np.diag([1.0, -1.0])
OMEGA1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
PHYS_TOL = 1e-10


@dataclass(frozen=True)
class CovMatrix4:
    entries: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.entries, dtype=float)
        if V.shape != (4, 4):
            raise ValueError("covariance matrix must be 4x4")
        if np.abs(V - V.T).max() > 1e-12:
            raise ValueError("covariance matrix must be symmetric")
        object.__setattr__(self, "entries", V)

    @property
    def V_A(self):
        return self.entries[:2, :2]

    @property
    def V_B(self):
        return self.entries[2:, 2:]

    @property
    def V_AB(self):
        return self.entries[:2, 2:]

    @classmethod
    def from_blocks(cls, va, vb, vab) -> "CovMatrix4":
        return cls(np.block([[va, vab], [np.transpose(vab), vb]]))

    def is_physical(self, tol: float = PHYS_TOL) -> bool:
        # V + i Omega >= 0, via the real 8x8 embedding [[V, -Omega], [Omega, V]]
        om = np.kron(np.eye(2), OMEGA1)
        big = np.block([[self.entries, -om], [om, self.entries]])
        return bool(np.linalg.eigvalsh(big).min() >= -tol)


def tmsv_cov(ns: float) -> CovMatrix4:
    if ns < 0:
        raise ValueError("ns must be >= 0")
    a = (2.0 * ns + 1.0) * np.eye(2)
    c = 2.0 * math.sqrt(ns * (ns + 1.0)) * SIGMA_Z
    return CovMatrix4.from_blocks(a, a, c)


def choi_cov(cf: CompositionForm, ns: float) -> CovMatrix4:
    if ns < 0:
        raise ValueError("ns must be >= 0")
    g, lam = cf.g, cf.lam
    a = (2.0 * ns + 1.0) * np.eye(2)
    b = (2.0 * g * (1.0 + lam * ns) - 1.0) * np.eye(2)
    c = 2.0 * math.sqrt(g * lam * ns * (ns + 1.0)) * SIGMA_Z
    return CovMatrix4.from_blocks(a, b, c)


def _exact(m) -> list:
    # rationals equal to the stored doubles, so the expansion below cancels exactly
    return [[Fraction(float(x)) for x in row] for row in np.asarray(m, dtype=float)]


def _det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _det4(m):
    total = Fraction(0)
    for j in range(4):
        r = [[m[i][k] for k in range(4) if k != j] for i in (1, 2, 3)]
        d3 = (r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
              - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
              + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]))
        total += (-1) ** j * m[0][j] * d3
    return total


def det4(m) -> float:
    """Cofactor expansion along the first row, in exact rational arithmetic."""
    return float(_det4(_exact(m)))


def simon_f(V: CovMatrix4) -> float:
    m = _exact(V.entries)
    va = [row[:2] for row in m[:2]]
    vb = [row[2:] for row in m[2:]]
    vab = [row[2:] for row in m[:2]]
    return float(1 + _det4(m) + 2 * _det2(vab) - _det2(va) - _det2(vb))


def symplectic_eigenvalues(V: CovMatrix4) -> np.ndarray:
    om = np.kron(np.eye(2), OMEGA1)
    ev = np.abs(np.linalg.eigvals(1j * om @ V.entries))
    return np.sort(ev)[::2]
