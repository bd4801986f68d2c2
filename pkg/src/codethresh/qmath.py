"""Base-q entropies, KL divergence, and log-domain arithmetic.

Everything downstream measures information in base-q units:

    H_q(tau) = -sum_x tau(x) log_q tau(x)
    h_q(x)   = x log_q(q-1) - x log_q x - (1-x) log_q(1-x)
    D_q(s||r) = s log_q(s/r) + (1-s) log_q((1-s)/(1-r))

with the convention 0 log 0 = 0 throughout, and KL extended continuously
at s = 0 and s = 1.  Level-set cardinalities are handled as exact Python
integers where feasible and as base-q logarithms (LogReal) beyond that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError, ValidationError

__all__ = [
    "LogReal",
    "EntropyValue",
    "entropy_q",
    "q_ary_entropy",
    "kl_q",
    "multinomial_exact",
    "log_multinomial",
    "log_sum",
]

#: Distributions must sum to 1 within this absolute slack.
NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class LogReal:
    """A nonnegative real stored as the base-`base` logarithm of its magnitude.

    ``is_zero`` marks an exact zero; consumers must ignore ``log_value``
    in that case.  Addition and multiplication stay in the log domain, so
    quantities like q^300 survive where floats would overflow.
    """

    log_value: float
    base: float
    is_zero: bool = False

    def __post_init__(self) -> None:
        if not self.base > 1.0:
            raise ValidationError(f"LogReal base must exceed 1, got {self.base}")

    @classmethod
    def zero(cls, base: float) -> "LogReal":
        return cls(0.0, base, is_zero=True)

    @classmethod
    def from_value(cls, x: float, base: float) -> "LogReal":
        if not base > 1.0:
            raise ValidationError(f"LogReal base must exceed 1, got {base}")
        if x < 0:
            raise DomainError(f"LogReal represents nonnegative reals, got {x}")
        if x == 0:
            return cls.zero(base)
        return cls(math.log(x) / math.log(base), base)

    def to_float(self) -> float:
        if self.is_zero:
            return 0.0
        return float(self.base) ** self.log_value

    def _check_base(self, other: "LogReal") -> None:
        if self.base != other.base:
            raise ValidationError(
                f"mixed LogReal bases {self.base} and {other.base}"
            )

    def __add__(self, other: "LogReal") -> "LogReal":
        self._check_base(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        hi, lo = self.log_value, other.log_value
        if lo > hi:
            hi, lo = lo, hi
        # log_b(b^hi + b^lo) = hi + log_b(1 + b^(lo-hi))
        bump = math.log1p(self.base ** (lo - hi)) / math.log(self.base)
        return LogReal(hi + bump, self.base)

    def __mul__(self, other: "LogReal") -> "LogReal":
        self._check_base(other)
        if self.is_zero or other.is_zero:
            return LogReal.zero(self.base)
        return LogReal(self.log_value + other.log_value, self.base)


def log_sum(terms: Iterable[LogReal], base: float) -> LogReal:
    """Sum LogReals of a common base, factoring out the max term.

    One max-factored pass is numerically gentler than chained pairwise
    adds when terms span many orders of magnitude.
    """
    logs = [t.log_value for t in terms if not t.is_zero]
    if not logs:
        return LogReal.zero(base)
    hi = max(logs)
    acc = math.fsum(base ** (lv - hi) for lv in logs)
    return LogReal(hi + math.log(acc) / math.log(base), base)


@dataclass(frozen=True)
class EntropyValue:
    """An entropy measured in base-q units; 0 <= value <= log_q(support)."""

    value: float
    base: int


def _check_q(q: int) -> None:
    if not isinstance(q, int) or q < 2:
        raise ValidationError(f"alphabet size q must be an integer >= 2, got {q!r}")


def entropy_q(dist: Sequence[float], q: int) -> EntropyValue:
    """Base-q entropy -sum tau(x) log_q tau(x) of a probability vector."""
    _check_q(q)
    if any(x < 0 for x in dist):
        raise ValidationError("probabilities must be nonnegative")
    total = math.fsum(dist)
    if abs(total - 1.0) > NORMALIZATION_TOL:
        raise ValidationError(
            f"probabilities sum to {total!r}, deviating from 1 by {total - 1.0!r}"
        )
    lq = math.log(q)
    value = -math.fsum(x * math.log(x) for x in dist if x > 0.0) / lq
    return EntropyValue(max(value, 0.0), q)


def q_ary_entropy(x: float, q: int) -> float:
    """h_q(x) = x log_q(q-1) - x log_q x - (1-x) log_q(1-x) on [0, 1]."""
    _check_q(q)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"q_ary_entropy requires x in [0,1], got {x}")
    lq = math.log(q)
    out = 0.0
    if x > 0.0:
        out += x * (math.log(q - 1) - math.log(x)) / lq
    if x < 1.0:
        out -= (1.0 - x) * math.log(1.0 - x) / lq
    return out


def kl_q(s: float, r: float, q: int) -> float:
    """Base-q KL divergence D_q(s||r) between Bernoulli(s) and Bernoulli(r).

    Extended continuously at s = 0 (giving log_q(1/(1-r))) and s = 1
    (giving log_q(1/r)); r must lie strictly inside (0, 1).
    """
    _check_q(q)
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"kl_q requires s in [0,1], got {s}")
    if not 0.0 < r < 1.0:
        raise DomainError(f"kl_q requires r strictly inside (0,1), got {r}")
    lq = math.log(q)
    out = 0.0
    if s > 0.0:
        out += s * math.log(s / r) / lq
    if s < 1.0:
        out += (1.0 - s) * math.log((1.0 - s) / (1.0 - r)) / lq
    return out


def _check_parts(L: int, parts: Sequence[int]) -> None:
    if any(x < 0 for x in parts):
        raise ValidationError("multinomial parts must be nonnegative")
    if sum(parts) != L:
        raise ValidationError(
            f"multinomial parts sum to {sum(parts)}, expected {L}"
        )


def multinomial_exact(L: int, parts: Sequence[int]) -> int:
    """L! / prod(parts_i!) as an exact integer."""
    _check_parts(L, parts)
    out = math.factorial(L)
    for x in parts:
        out //= math.factorial(x)
    return out


def log_multinomial(L: int, parts: Sequence[int], base: float = 2.0) -> LogReal:
    """The multinomial coefficient as a LogReal, via lgamma."""
    _check_parts(L, parts)
    lv = math.lgamma(L + 1) - math.fsum(math.lgamma(x + 1) for x in parts)
    return LogReal(lv / math.log(base), base)
