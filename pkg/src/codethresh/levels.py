"""Level sets of the list-recovery penalty P_ell.

For v in Sigma^L, P_ell(v) is the smallest number of entries of v left
uncovered by any set of ell symbols; equivalently L minus the sum of the
ell largest histogram frequencies of v.  The level set D_{d} collects the
vectors with P_ell(v) = d, and

    t* = q^{-L} * sum_d d * |D_d|

is the expected penalty of a uniform vector.  Everything later (the dual
solver, the zero-rate regime test, the oracle) consumes these counts.

Counts are computed by enumerating histograms (compositions of L into q
nonnegative parts) and weighting each by its multinomial; only q^L <= 2^256
profiles are kept as exact integers, larger ones fall back to base-q
log-domain sums and are flagged approximate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import BudgetError, ValidationError
from .qmath import LogReal, log_multinomial, log_sum

__all__ = ["LevelSetParams", "LevelProfile", "p_ell", "level_profile", "t_star"]

#: Profiles with q^L beyond this stay in the log domain.
EXACT_COUNT_LIMIT = 2**256

#: Refuse composition enumerations larger than this many histograms.
COMPOSITION_BUDGET = 20_000_000


@dataclass(frozen=True)
class LevelSetParams:
    """Alphabet size q, list size ell, and tuple size L."""

    q: int
    ell: int
    L: int

    def __post_init__(self) -> None:
        if self.q < 2:
            raise ValidationError(f"q must be >= 2, got {self.q}")
        if not 1 <= self.ell <= self.q:
            raise ValidationError(
                f"ell must satisfy 1 <= ell <= q, got ell={self.ell}, q={self.q}"
            )
        if self.L < 1:
            raise ValidationError(f"L must be >= 1, got {self.L}")


@dataclass(frozen=True)
class LevelProfile:
    """Cardinalities |D_d| for d = 0..L plus the uniform expectation t*.

    ``counts`` holds exact integers when ``exact`` is true and is None
    otherwise; ``log_counts`` always holds base-q logarithms of the
    cardinalities (-inf marking empty levels), so downstream consumers can
    be oblivious to which regime produced the profile.
    """

    params: LevelSetParams
    counts: tuple[int, ...] | None
    log_counts: tuple[float, ...]
    t_star: float
    exact: bool


def p_ell(v: Sequence[int], ell: int, q: int) -> int:
    """Minimum number of entries of v outside any ell-symbol set.

    The minimizing set is always the ell most frequent symbols, so this
    sorts the histogram of v descending and subtracts the top-ell mass.
    """
    if q < 2 or not 1 <= ell <= q:
        raise ValidationError(f"need 1 <= ell <= q with q >= 2, got ell={ell}, q={q}")
    freq: dict[int, int] = {}
    for s in v:
        if not isinstance(s, int) or not 0 <= s < q:
            raise ValidationError(f"symbol {s!r} outside alphabet range 0..{q - 1}")
        freq[s] = freq.get(s, 0) + 1
    covered = sum(sorted(freq.values(), reverse=True)[:ell])
    return len(v) - covered


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative integers summing to `total`."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for b in (*bars, total + parts - 1):
            out.append(b - prev - 1)
            prev = b
        yield tuple(out)


@lru_cache(maxsize=128)
def level_profile(params: LevelSetParams) -> LevelProfile:
    """Count each level set by histogram enumeration.

    Every vector with histogram eta contributes multinomial(L; eta) words
    to level L - (sum of the ell largest entries of eta); enumerating
    compositions of L into q parts therefore covers Sigma^L exactly once.
    """
    q, ell, L = params.q, params.ell, params.L
    n_comps = math.comb(L + q - 1, q - 1)
    if n_comps > COMPOSITION_BUDGET:
        raise BudgetError(
            f"profile for q={q}, L={L} needs {n_comps} histograms, "
            f"over the budget of {COMPOSITION_BUDGET}"
        )
    exact = q**L <= EXACT_COUNT_LIMIT
    if exact:
        counts = [0] * (L + 1)
        for eta in _compositions(L, q):
            d = L - sum(sorted(eta, reverse=True)[:ell])
            counts[d] += _multinomial(L, eta)
        log_q = math.log(q)
        log_counts = tuple(
            math.log(c) / log_q if c else -math.inf for c in counts
        )
        ts = float(
            Fraction(sum(d * c for d, c in enumerate(counts)), q**L)
        )
        return LevelProfile(params, tuple(counts), log_counts, ts, True)

    # Log-domain fallback: same enumeration, multinomials summed per level
    # as base-q LogReals.
    buckets: list[list[LogReal]] = [[] for _ in range(L + 1)]
    for eta in _compositions(L, q):
        d = L - sum(sorted(eta, reverse=True)[:ell])
        buckets[d].append(log_multinomial(L, eta, base=q))
    sums = [log_sum(b, base=q) for b in buckets]
    log_counts = tuple(-math.inf if s.is_zero else s.log_value for s in sums)
    ts = math.fsum(
        d * q ** (lc - L) for d, lc in enumerate(log_counts) if lc != -math.inf
    )
    return LevelProfile(params, None, log_counts, ts, False)


def _multinomial(L: int, parts: Sequence[int]) -> int:
    out = math.factorial(L)
    for x in parts:
        out //= math.factorial(x)
    return out


def t_star(profile: LevelProfile) -> float:
    """Uniform expectation of P_ell, recomputed from the profile's counts."""
    q, L = profile.params.q, profile.params.L
    if profile.exact and profile.counts is not None:
        return float(
            Fraction(sum(d * c for d, c in enumerate(profile.counts)), q**L)
        )
    return math.fsum(
        d * q ** (lc - L)
        for d, lc in enumerate(profile.log_counts)
        if lc != -math.inf
    )
