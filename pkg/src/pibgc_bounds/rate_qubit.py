"""Ebit rate of the Fock-superposition + twirl + recurrence + hashing protocol."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bell_algebra import conditional_state, twirl
from .channel_core import CompositionForm, is_entanglement_breaking
from .distill_engine import DegenerateStep, best_yield_tuple, step_tuple

RATE_FLOOR = 1e-15
EB_FLAG = "entanglement-breaking"
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptBudget:
    M_max: int = 5
    k_max: int = 30
    c_step: float = 0.005
    c_tol: float = 1e-4
    threads: int = 1


@dataclass(frozen=True)
class RateResult:
    rate: float
    M: int | None = None
    c: float | None = None
    k: int | None = None
    C: float | None = None
    survival: float | None = None
    yield_: float | None = None
    constraint: float | None = None
    permutation: str | None = None
    branches: tuple = ()
    N: int | None = None
    K: int | None = None
    tail: float | None = None
    flags: tuple = field(default_factory=tuple)


def _scan_k(cf: CompositionForm, M: int, c: float, k_max: int) -> list[RateResult]:
    """Rates for k = 0..k_max from a single recurrence trace."""
    cs = conditional_state(cf, M, c)
    a = twirl(cs).as_tuple()
    surv = 1.0
    branches: list[str] = []
    out = []
    for k in range(k_max + 1):
        y, perm = best_yield_tuple(*a)
        out.append(RateResult(cs.C * surv * y, M, c, k, cs.C, surv, y, permutation=perm,
                              branches=tuple(branches)))
        if k == k_max:
            break
        try:
            a, P, br = step_tuple(*a)
        except DegenerateStep:
            out.append(RateResult(0.0, M, c, k + 1, cs.C, 0.0, 0.0, flags=("degenerate-step",)))
            break
        surv *= 0.5 * P
        branches.append(br)
    return out


def _finish(res: RateResult, ns: float | None) -> RateResult:
    if res.rate < RATE_FLOOR:
        flags = res.flags if res.rate == 0.0 else res.flags + ("clamped",)
        return replace(res, rate=0.0, constraint=ns, flags=flags)
    return replace(res, constraint=ns)


def rate(cf: CompositionForm, M: int, c: float, k: int) -> RateResult:
    if k < 0:
        raise ValueError("k must be >= 0")
    if is_entanglement_breaking(cf):
        return RateResult(0.0, M, c, k, flags=(EB_FLAG,))
    return _finish(_scan_k(cf, M, c, k)[-1], None)


def _best_over_k(cf, M, c, k_max) -> RateResult:
    best = None
    for r in _scan_k(cf, M, c, k_max):
        if best is None or r.rate > best.rate:
            best = r
    return best


def _optimize_M(cf: CompositionForm, M: int, c_min: float, budget: OptBudget) -> RateResult:
    n = int(round(1.0 / budget.c_step)) - 1
    grid = [budget.c_step * (j + 1) for j in range(n)]
    grid = [c for c in grid if c >= c_min]
    if c_min > 0.0 and (not grid or grid[0] > c_min) and c_min < 1.0:
        grid.insert(0, c_min)
    if not grid:
        return RateResult(0.0, M)
    evals = [_best_over_k(cf, M, c, budget.k_max) for c in grid]
    j = max(range(len(evals)), key=lambda t: (evals[t].rate, -t))
    best = evals[j]
    if best.rate <= 0.0:
        return best
    lo = grid[j - 1] if j > 0 else max(c_min, 0.5 * grid[0])
    hi = grid[j + 1] if j + 1 < len(grid) else 0.5 * (grid[-1] + 1.0)
    cache = {}

    def obj(c):
        if c not in cache:
            cache[c] = _best_over_k(cf, M, c, budget.k_max)
        return cache[c]

    a, b = lo, hi
    x1, x2 = b - GOLDEN * (b - a), a + GOLDEN * (b - a)
    while b - a > budget.c_tol:
        if obj(x1).rate >= obj(x2).rate:
            b, x2 = x2, x1
            x1 = b - GOLDEN * (b - a)
        else:
            a, x1 = x1, x2
            x2 = a + GOLDEN * (b - a)
    for r in sorted(cache.values(), key=lambda r: r.c):
        if r.rate > best.rate:
            best = r
    return best


def optimize(cf: CompositionForm, ns: float | None = None, budget: OptBudget | None = None) -> RateResult:
    budget = budget or OptBudget()
    if is_entanglement_breaking(cf):
        return RateResult(0.0, constraint=ns, flags=(EB_FLAG,))
    Ms = list(range(1, budget.M_max + 1))

    def c_min(M):
        if ns is None:
            return 0.0
        return math.sqrt(max(0.0, 1.0 - ns / M))

    def task(M):
        return _optimize_M(cf, M, c_min(M), budget)

    if budget.threads > 1:
        with ThreadPoolExecutor(budget.threads) as pool:
            per_M = list(pool.map(task, Ms))
    else:
        per_M = [task(M) for M in Ms]
    best = per_M[0]
    for r in per_M[1:]:
        if r.rate > best.rate:
            best = r
    return _finish(best, ns)
