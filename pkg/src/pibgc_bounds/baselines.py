"""Known upper and lower bounds used for comparison."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel_core import ChannelKind, PiBGC, is_entanglement_breaking, to_composition

LN2 = math.log(2.0)
FLOOR = 1e-15  # lower bounds below this are round-off
EB_FLAG = "entanglement-breaking"


def nats_to_bits(x: float) -> float:
    return x / LN2


def bosonic_entropy(nu: float) -> float:
    if nu <= 0.0:
        # tiny negatives come from round-off in symplectic spectra
        return 0.0
    return (nu + 1.0) * math.log2(nu + 1.0) - nu * math.log2(nu)


h = bosonic_entropy


@dataclass(frozen=True)
class BoundValue:
    value: float
    kind: str  # "upper" | "lower"
    method: str
    params: dict
    flags: tuple = field(default_factory=tuple)


def _lower(v: float) -> float:
    return 0.0 if v < FLOOR else v


def _flags(ch: PiBGC) -> tuple:
    return (EB_FLAG,) if is_entanglement_breaking(to_composition(ch)) else ()


def _plob_value(ch: PiBGC) -> float:
    if ch.kind is ChannelKind.ATTENUATOR:
        lam, nu = ch.lam, ch.nu
        if lam <= nu / (nu + 1.0):
            return 0.0
        if lam == 1.0:
            return math.inf
        return -h(nu) - math.log2(1.0 - lam) - nu * math.log2(lam)
    if ch.kind is ChannelKind.AMPLIFIER:
        g, nu = ch.g, ch.nu
        if nu > 0.0 and g >= 1.0 + 1.0 / nu:
            return 0.0
        if g == 1.0:
            return math.inf
        return -h(nu) + (nu + 1.0) * math.log2(g) - math.log2(g - 1.0)
    xi = ch.xi
    if xi >= 1.0:
        return 0.0
    if xi == 0.0:
        return math.inf
    return nats_to_bits(xi - 1.0) - math.log2(xi)


def plob_upper(ch: PiBGC) -> BoundValue:
    return BoundValue(max(0.0, _plob_value(ch)), "upper", "PLOB", ch.params(), _flags(ch))


def _att_terms(lam, nu, ns):
    D = math.sqrt(((1 + lam) * ns + (1 - lam) * nu + 1) ** 2 - 4 * lam * ns * (ns + 1))
    s = (1 - lam) * (ns - nu)
    return h((D + s - 1) / 2) + h((D - s - 1) / 2)


def ci_raw(ch: PiBGC, ns: float) -> float:
    """Coherent information of the TMSV output, not clamped."""
    if ch.kind is ChannelKind.ATTENUATOR:
        lam, nu = ch.lam, ch.nu
        return h(lam * ns + (1 - lam) * nu) - _att_terms(lam, nu, ns)
    if ch.kind is ChannelKind.AMPLIFIER:
        g, nu = ch.g, ch.nu
        D = math.sqrt(((g + 1) * ns + (g - 1) * (nu + 1) + 1) ** 2 - 4 * g * ns * (ns + 1))
        s = (g - 1) * (ns + nu + 1)
        return h(g * ns + (g - 1) * (nu + 1)) - h((D + s - 1) / 2) - h((D - s - 1) / 2)
    xi = ch.xi
    D = math.sqrt((2 * ns + xi + 1) ** 2 - 4 * ns * (ns + 1))
    return h(ns + xi) - h((D + xi - 1) / 2) - h((D - xi - 1) / 2)


def rci_raw(ch: PiBGC, ns: float) -> float:
    if ch.kind is not ChannelKind.ATTENUATOR:
        raise ValueError("reverse coherent information is provided for the attenuator only")
    return h(ns) - _att_terms(ch.lam, ch.nu, ns)


def _ci_limit(ch: PiBGC) -> float:
    if ch.kind is ChannelKind.ATTENUATOR:
        lam, nu = ch.lam, ch.nu
        if lam in (0.0, 1.0):
            return 0.0 if lam == 0.0 else math.inf
        return math.log2(lam / (1 - lam)) - h(nu)
    if ch.kind is ChannelKind.AMPLIFIER:
        g, nu = ch.g, ch.nu
        return math.inf if g == 1.0 else -h(nu) + math.log2(g / (g - 1))
    return math.inf if ch.xi == 0.0 else -math.log2(math.e * ch.xi)


def _rci_limit(ch: PiBGC) -> float:
    if ch.kind is not ChannelKind.ATTENUATOR:
        raise ValueError("reverse coherent information is provided for the attenuator only")
    return math.inf if ch.lam == 1.0 else -h(ch.nu) - math.log2(1 - ch.lam)


def ci_tmsv(ch: PiBGC, ns: float | None = None) -> BoundValue:
    """ns=None gives the unconstrained (ns -> infinity) value."""
    if ns is None:
        v, method = _ci_limit(ch), "CI"
    else:
        if ns <= 0:
            raise ValueError("ns must be > 0")
        v, method = ci_raw(ch, ns), "CI_EC"
    return BoundValue(_lower(v), "lower", method, {**ch.params(), "ns": ns}, _flags(ch))


def rci_tmsv(ch: PiBGC, ns: float | None = None) -> BoundValue:
    if ns is None:
        v, method = _rci_limit(ch), "RCI"
    else:
        if ns <= 0:
            raise ValueError("ns must be > 0")
        v, method = rci_raw(ch, ns), "RCI_EC"
    return BoundValue(_lower(v), "lower", method, {**ch.params(), "ns": ns}, _flags(ch))


def _h_arr(x):
    x = np.clip(np.asarray(x, dtype=float), 0.0, None)
    safe = np.where(x > 0, x, 1.0)
    return np.where(x > 0, (safe + 1) * np.log2(safe + 1) - safe * np.log2(safe), 0.0)


def _att_ci_rci_arr(lam, nu, ns):
    ns = np.asarray(ns, dtype=float)
    D = np.sqrt(((1 + lam) * ns + (1 - lam) * nu + 1) ** 2 - 4 * lam * ns * (ns + 1))
    s = (1 - lam) * (ns - nu)
    common = _h_arr((D + s - 1) / 2) + _h_arr((D - s - 1) / 2)
    return _h_arr(lam * ns + (1 - lam) * nu) - common, _h_arr(ns) - common


def _refine(obj, lo, hi, best_x, npts, rounds):
    """Grid search with local refinement; obj maps an array of x to an array of values."""
    bx, bv = best_x, float(obj(np.array([best_x]))[0])
    a, b = lo, hi
    for _ in range(rounds + 1):
        xs = np.linspace(a, b, npts)
        vals = obj(xs)
        j = int(np.argmax(vals))
        if vals[j] > bv:
            bv, bx = float(vals[j]), float(xs[j])
        step = (b - a) / (npts - 1)
        a, b = max(lo, bx - step), min(hi, bx + step)
    return bv, bx


def npj_bound(ch: PiBGC, ns: float, npts: int = 101, rounds: int = 2) -> BoundValue:
    if ns <= 0:
        raise ValueError("ns must be > 0")
    params = {**ch.params(), "ns": ns}
    if ch.kind is ChannelKind.ATTENUATOR:
        lam, nu = ch.lam, ch.nu
        ci_full, rci_full = ci_raw(ch, ns), rci_raw(ch, ns)

        def inner(x):
            # best energy split for a fixed mixing weight x
            if x <= 0.0:
                return rci_full
            if x >= 1.0:
                return ci_full

            def mix(n1):
                n2 = np.clip((ns - x * n1) / (1 - x), 0.0, None)
                return x * _att_ci_rci_arr(lam, nu, n1)[0] + (1 - x) * _att_ci_rci_arr(lam, nu, n2)[1]
            return _refine(mix, 0.0, ns / x, ns, npts, rounds)[0]

        def outer(xs):
            return np.array([inner(float(x)) for x in xs])
        start = 0.0 if rci_full >= ci_full else 1.0
        best = max(ci_full, rci_full, _refine(outer, 0.0, 1.0, start, npts, rounds)[0])
    else:
        def obj(xs):
            return np.array([0.0 if x <= 0.0 else x * ci_raw(ch, ns / x) for x in xs])
        best = _refine(obj, 0.0, 1.0, 1.0, npts, rounds)[0]
    return BoundValue(_lower(best), "lower", "NPJ", params, _flags(ch))


def excess_noise(lam: float) -> float:
    if not 0.0 < lam < 1.0:
        raise ValueError("lambda must lie in (0, 1)")
    nu_star = lam / (1.0 - lam)
    return (1.0 - lam) / lam * nu_star
