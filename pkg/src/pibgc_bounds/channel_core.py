"""Phase-insensitive bosonic Gaussian channels and their Fock-basis coefficients.

Every channel is reduced to a pair (g, lam) meaning "pure loss of transmissivity
lam followed by a pure amplifier of gain g". All downstream code works with that
pair only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from scipy.special import gammaln


class ChannelKind(str, Enum):
    ATTENUATOR = "attenuator"
    AMPLIFIER = "amplifier"
    ADDITIVE = "additive"


@dataclass(frozen=True)
class PiBGC:
    kind: ChannelKind
    lam: float | None = None
    g: float | None = None
    nu: float | None = None
    xi: float | None = None

    def __post_init__(self):
        kind = ChannelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        wanted = {
            ChannelKind.ATTENUATOR: {"lam", "nu"},
            ChannelKind.AMPLIFIER: {"g", "nu"},
            ChannelKind.ADDITIVE: {"xi"},
        }[kind]
        for name in ("lam", "g", "nu", "xi"):
            val = getattr(self, name)
            if (val is None) == (name in wanted):
                state = "missing" if val is None else "not allowed"
                raise ValueError(f"{kind.value}: field {name!r} is {state}")
        if self.lam is not None and not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")
        if self.g is not None and self.g < 1.0:
            raise ValueError("g must be >= 1")
        if self.nu is not None and self.nu < 0.0:
            raise ValueError("nu must be >= 0")
        if self.xi is not None and self.xi < 0.0:
            raise ValueError("xi must be >= 0")

    @classmethod
    def attenuator(cls, lam: float, nu: float) -> "PiBGC":
        return cls(ChannelKind.ATTENUATOR, lam=float(lam), nu=float(nu))

    @classmethod
    def amplifier(cls, g: float, nu: float) -> "PiBGC":
        return cls(ChannelKind.AMPLIFIER, g=float(g), nu=float(nu))

    @classmethod
    def additive(cls, xi: float) -> "PiBGC":
        return cls(ChannelKind.ADDITIVE, xi=float(xi))

    def params(self) -> dict:
        return {k: getattr(self, k) for k in ("lam", "g", "nu", "xi") if getattr(self, k) is not None}


@dataclass(frozen=True)
class CompositionForm:
    """N_{g,lam}: amplifier of gain g applied after a pure loss of transmissivity lam."""

    g: float
    lam: float

    def __post_init__(self):
        if self.g < 1.0:
            raise ValueError("g must be >= 1")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lambda must lie in [0, 1]")


def to_composition(ch: PiBGC) -> CompositionForm:
    if ch.kind is ChannelKind.ATTENUATOR:
        g = 1.0 + (1.0 - ch.lam) * ch.nu
        return CompositionForm(g, ch.lam / g)
    if ch.kind is ChannelKind.AMPLIFIER:
        g = ch.g + (ch.g - 1.0) * ch.nu
        return CompositionForm(g, ch.g / g)
    g = 1.0 + ch.xi
    return CompositionForm(g, 1.0 / g)


def is_entanglement_breaking(cf: CompositionForm) -> bool:
    return (1.0 - cf.lam) * cf.g >= 1.0


def _log_pow(base: float, expo: float) -> float:
    # log(base**expo) with 0**0 = 1; -inf flags an exact zero
    if expo == 0:
        return 0.0
    if base == 0.0:
        return -math.inf
    return expo * math.log(base)


@lru_cache(maxsize=None)
def _lfact(n: int) -> float:
    return float(gammaln(n + 1))


def f_coeff(n: int, i: int, l: int, cf: CompositionForm) -> float:
    """Coefficient of |l+n-i><l| in the image of |n><i|."""
    if min(n, i, l) < 0 or l + n - i < 0:
        return 0.0
    g, lam = cf.g, cf.lam
    head = 0.5 * (_lfact(n) + _lfact(i) + _lfact(l) + _lfact(l + n - i))
    head -= _log_pow(g, l + 1 + 0.5 * (n - i))
    terms = []
    for m in range(max(i - l, 0), min(n, i) + 1):
        lp = (_log_pow(g - 1.0, l + m - i) + _log_pow(1.0 - lam, m)
              + _log_pow(lam, 0.5 * (n + i - 2 * m)))
        if lp == -math.inf:
            continue
        lc = head - _lfact(n - m) - _lfact(i - m) - _lfact(m) - _lfact(l + m - i)
        terms.append(math.exp(lc + lp))
    return math.fsum(terms)


@dataclass(frozen=True)
class FockAction:
    entries: list  # (ket index, bra index, coefficient)
    tail_mass: float | None  # 1 - sum of kept coefficients, only for n == i


def channel_action_fock(n: int, i: int, cf: CompositionForm, l_max: int = 200) -> FockAction:
    lo = max(i - n, 0)
    if l_max < lo:
        raise ValueError(f"l_max must be >= {lo}")
    entries = [(l + n - i, l, f_coeff(n, i, l, cf)) for l in range(lo, l_max + 1)]
    tail = 1.0 - math.fsum(e[2] for e in entries) if n == i else None
    return FockAction(entries, tail)
