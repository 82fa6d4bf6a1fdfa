"""Multi-rail protocol: N photons spread over K rails, photon-number post-selection."""
from __future__ import annotations

import itertools
import logging
import math
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import eigvalsh
from scipy.special import gammaln

from .bell_algebra import BellDiagD
from .channel_core import CompositionForm, f_coeff, is_entanglement_breaking
from .distill_engine import DegenerateStep, p1p2_step_qudit, qudit_yield
from .rate_qubit import EB_FLAG, RATE_FLOOR, RateResult

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MultirailBudget:
    k_max: int = 30
    tail_tol: float = 1e-9
    F_max: int = 60
    matrix_cap: int = 4096  # dA * dB limit for the entropy branch
    qudit_cap: int = 64  # d limit for the twirl + recurrence branch
    N_max: int = 3
    K_max: int = 4
    threads: int = 1


@lru_cache(maxsize=None)
def multi_indices(K: int, total: int) -> tuple:
    """Compositions of `total` into K parts, in lexicographic order of (n_1, ..., n_K)."""
    out = [c for c in itertools.product(range(total + 1), repeat=K) if sum(c) == total]
    return tuple(out)


def _lbinom(n: int, k: int) -> float:
    if k < 0 or k > n:
        return -math.inf
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def _lpow(base: float, expo: float) -> float:
    if expo == 0:
        return 0.0
    return -math.inf if base == 0.0 else expo * math.log(base)


def _sum_exp(logs) -> float:
    return math.fsum(math.exp(x) for x in logs if x != -math.inf)


def p_F(cf: CompositionForm, N: int, K: int, F: int, check: bool = False) -> float:
    g, lam = cf.g, cf.lam
    logs = [_lbinom(N, P) + _lbinom(K + F - 1, F - P) + _lpow(lam, P) + _lpow(1 - lam, N - P)
            + _lpow(g - 1, F - P) - _lpow(g, K + F) for P in range(min(F, N) + 1)]
    val = _sum_exp(logs)
    if check:
        alt = p_F_alt(cf, N, K, F)
        if abs(alt - val) > 1e-12:
            raise AssertionError(f"P_F forms disagree: {val!r} vs {alt!r}")
    return val


def p_F_alt(cf: CompositionForm, N: int, K: int, F: int) -> float:
    """Second closed form of the same probability.

    Its base (1 + g lam - g) can be negative, so the terms alternate and float
    evaluation cancels badly; it is summed exactly in rationals instead.
    """
    g, lam = Fraction(cf.g), Fraction(cf.lam)
    base = 1 + g * lam - g
    total = sum(math.comb(N, P) * math.comb(N + K + F - P - 1, F - P) * base ** P
                * (1 - lam) ** (N - P) * (g - 1) ** (F - P) for P in range(min(F, N) + 1))
    return float(total / g ** (F + K))


@lru_cache(maxsize=200_000)
def _f_cached(n, i, l, g, lam):
    return f_coeff(n, i, l, CompositionForm(g, lam))


@dataclass(frozen=True)
class PostMeasState:
    F: int
    N: int
    K: int
    dA: int
    dB: int
    eta: dict  # (n, i, h, l) -> coefficient, indices into the ordered bases
    P: float

    @property
    def d(self) -> int:
        return max(self.dA, self.dB)

    def matrix(self) -> np.ndarray:
        rho = np.zeros((self.dA * self.dB, self.dA * self.dB))
        for (n, i, hh, l), v in self.eta.items():
            rho[n * self.dB + hh, i * self.dB + l] = v
        return rho


def post_meas_state(cf: CompositionForm, N: int, K: int, F: int) -> PostMeasState:
    P = p_F(cf, N, K, F)
    if P <= 0.0:
        raise ValueError(f"outcome F={F} has zero probability")
    A = multi_indices(K, N)
    B = multi_indices(K, F)
    bpos = {b: j for j, b in enumerate(B)}
    norm = 1.0 / (P * len(A))
    eta = {}
    for a_n, nv in enumerate(A):
        for a_i, iv in enumerate(A):
            for b_l, lv in enumerate(B):
                if any(lv[j] < iv[j] - nv[j] for j in range(K)):
                    continue
                hv = tuple(lv[j] + nv[j] - iv[j] for j in range(K))
                prod = 1.0
                for j in range(K):
                    prod *= _f_cached(nv[j], iv[j], lv[j], cf.g, cf.lam)
                    if prod == 0.0:
                        break
                if prod != 0.0:
                    eta[(a_n, a_i, bpos[hv], b_l)] = prod * norm
    return PostMeasState(F, N, K, len(A), len(B), eta, P)


def von_neumann_entropy(rho: np.ndarray) -> float:
    ev = eigvalsh(0.5 * (rho + rho.T))
    ev = ev[ev > 1e-15]
    return float(-(ev * np.log2(ev)).sum())


def reverse_ci(pm: PostMeasState, matrix_cap: int = 4096) -> float:
    if pm.dA * pm.dB > matrix_cap:
        raise ValueError(f"matrix size {pm.dA * pm.dB} exceeds cap {matrix_cap}")
    return math.log2(pm.dA) - von_neumann_entropy(pm.matrix())


def qudit_twirl(pm: PostMeasState) -> BellDiagD:
    d = pm.d
    alpha = np.zeros((d, d))
    ms = np.arange(d)
    for (n, i, hh, l), v in pm.eta.items():
        shift = (n - hh) % d
        if (i - l) % d != shift:
            continue
        alpha[:, shift] += np.cos(2 * np.pi * ms * (i - n) / d) * v / d
    alpha = np.clip(alpha, 0.0, None)
    return BellDiagD(alpha / alpha.sum())


def _recursion_branch(bd: BellDiagD, k_max: int) -> tuple[float, int]:
    best, best_k, surv = qudit_yield(bd), 0, 1.0
    for k in range(1, k_max + 1):
        try:
            bd, P, _ = p1p2_step_qudit(bd)
        except DegenerateStep:
            break
        surv *= 0.5 * P
        val = surv * qudit_yield(bd)
        if val > best:
            best, best_k = val, k
    return best, best_k


@dataclass(frozen=True)
class FTerm:
    F: int
    P: float
    value: float
    irc: float | None
    recursion: float | None
    k: int | None
    flags: tuple = field(default_factory=tuple)


def f_term(cf: CompositionForm, N: int, K: int, F: int, budget: MultirailBudget) -> FTerm:
    P = p_F(cf, N, K, F)
    if P <= 0.0:
        return FTerm(F, P, 0.0, None, None, None)
    dA, dB = math.comb(N + K - 1, N), math.comb(F + K - 1, F)
    d = max(dA, dB)
    use_matrix = dA * dB <= budget.matrix_cap
    use_twirl = d <= budget.qudit_cap
    flags = []
    if not use_matrix:
        flags.append(f"F={F}:skip-entropy")
    if not use_twirl:
        flags.append(f"F={F}:skip-recursion")
    if not (use_matrix or use_twirl):
        return FTerm(F, P, 0.0, None, None, None, tuple(flags))
    pm = post_meas_state(cf, N, K, F)
    irc = reverse_ci(pm, budget.matrix_cap) if use_matrix else None
    rec, k = _recursion_branch(qudit_twirl(pm), budget.k_max) if use_twirl else (None, None)
    value = max(0.0, irc if irc is not None else 0.0, rec if rec is not None else 0.0)
    return FTerm(F, P, value, irc, rec, k, tuple(flags))


def multirail_terms(cf: CompositionForm, N: int, K: int, budget: MultirailBudget) -> tuple[list, float]:
    Fs, cum = [], p_F(cf, N, K, 0)
    F = 0
    while cum < 1.0 - budget.tail_tol and F < budget.F_max:
        F += 1
        Fs.append(F)
        cum += p_F(cf, N, K, F)
    if budget.threads > 1:
        with ThreadPoolExecutor(budget.threads) as pool:
            terms = list(pool.map(lambda F: f_term(cf, N, K, F, budget), Fs))
    else:
        terms = [f_term(cf, N, K, F, budget) for F in Fs]
    return terms, max(0.0, 1.0 - cum)


def multirail_rate(cf: CompositionForm, N: int, K: int, budget: MultirailBudget | None = None) -> RateResult:
    budget = budget or MultirailBudget()
    if N < 1 or K < 2:
        raise ValueError("need N >= 1 and K >= 2")
    if is_entanglement_breaking(cf):
        return RateResult(0.0, N=N, K=K, flags=(EB_FLAG,))
    terms, tail = multirail_terms(cf, N, K, budget)
    val = math.fsum(t.P * t.value for t in terms) / K
    flags = tuple(f for t in terms for f in t.flags)
    skipped = [t for t in terms if t.irc is None and t.recursion is None and t.P > 0]
    if skipped:
        log.warning("multirail N=%d K=%d: %d outcome(s) beyond size caps contribute 0 (mass %.3g)",
                    N, K, len(skipped), math.fsum(t.P for t in skipped))
    if val < RATE_FLOOR:
        val, flags = 0.0, flags + (("clamped",) if val > 0 else ())
    return RateResult(val, N=N, K=K, tail=tail, flags=flags)


def multirail_best(cf: CompositionForm, budget: MultirailBudget | None = None) -> RateResult:
    budget = budget or MultirailBudget()
    if is_entanglement_breaking(cf):
        return RateResult(0.0, flags=(EB_FLAG,))
    best = None
    for N in range(1, budget.N_max + 1):
        for K in range(2, budget.K_max + 1):
            r = multirail_rate(cf, N, K, budget)
            if best is None or r.rate > best.rate:
                best = r
    return best
