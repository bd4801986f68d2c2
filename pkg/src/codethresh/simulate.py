"""Random code sampling and exact badness decisions at finite n.

The sharp-threshold statement is asymptotic; this module measures how the
transition looks at desk scale.  A random code keeps every word of
Sigma^n independently with probability q^{-n(1-R)}, which is sampled
distribution-exactly as a Binomial count of codewords followed by that
many distinct uniform words.

A tuple of L distinct codewords (as matrix columns) is "bad" when sets
K_i of ell symbols exist, one per coordinate, leaving each column with at
most floor(p*n) uncovered coordinates.  The decision is made exactly by a
dynamic program over coordinates whose state is the vector of per-column
violation counts; counts above the budget are clipped and such states
dropped as unrecoverable.  Per coordinate only the distinct coverage
patterns matter: every size-ell set K induces the same pattern as its
intersection with the symbols actually present, so at most
C(min(q, L), ell) transitions are enumerated instead of C(q, ell).

Whole-code checks enumerate L-subsets, with a Hamming-distance pre-filter
in the ell = 1 case: columns jointly coverable within radius b must be
pairwise within 2b, so only cliques of the closeness graph are checked.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import BudgetError, ValidationError

__all__ = [
    "RandomCodeSpec",
    "BadnessCertificate",
    "SweepRow",
    "SweepReport",
    "trial_seed",
    "sample_random_code",
    "is_bad_tuple",
    "contains_bad_matrix",
    "empirical_threshold_sweep",
]

#: Default cap on the expected code size q^{nR}.
DEFAULT_SIZE_CAP = 2_000_000

#: Default cap on the number of candidate tuples checked per code.
DEFAULT_SUBSET_CAP = 2_000_000


@dataclass(frozen=True)
class RandomCodeSpec:
    """Parameters of one random code draw."""

    n: int
    rate: float
    q: int
    seed: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValidationError(f"rate must lie in [0, 1], got {self.rate}")
        if self.q < 2:
            raise ValidationError(f"q must be >= 2, got {self.q}")
        if not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be a 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class BadnessCertificate:
    """A witness that L codewords violate (p, ell, L)-list-recovery.

    ``k_sets[i]`` is the chosen ell-symbol set at coordinate i and
    ``violation_counts[j]`` counts the coordinates where column j falls
    outside them; each count is at most ``budget`` = floor(p*n).
    """

    column_codewords: tuple[tuple[int, ...], ...]
    k_sets: tuple[frozenset[int], ...]
    violation_counts: tuple[int, ...]
    budget: int

    def recheck(self) -> bool:
        """Recompute the violation counts from scratch and re-validate."""
        cols = self.column_codewords
        n = len(self.k_sets)
        if any(len(c) != n for c in cols):
            return False
        recount = tuple(
            sum(1 for i in range(n) if col[i] not in self.k_sets[i]) for col in cols
        )
        return recount == self.violation_counts and max(recount) <= self.budget


class SweepRow(NamedTuple):
    n: int
    rate: float
    trials: int
    satisfied: int
    fraction: float


@dataclass(frozen=True)
class SweepReport:
    """Per-(n, rate) badness fractions plus interpolated 1/2-crossings."""

    rows: tuple[SweepRow, ...]
    crossings: dict[int, Optional[float]]
    base_seed: int
    elapsed_s: float


def trial_seed(base_seed: int, n: int, rate: float, trial: int) -> int:
    """Deterministic per-trial seed, independent of execution order.

    Mixing function: numpy SeedSequence over the entropy tuple
    (base_seed, n, round(rate * 1e9), trial).
    """
    ss = np.random.SeedSequence(
        entropy=(base_seed & (2**64 - 1), n, int(round(rate * 1e9)), trial)
    )
    return int(ss.generate_state(1, np.uint64)[0])


def _decode_words(indices: np.ndarray, q: int, n: int) -> list[tuple[int, ...]]:
    words = []
    for idx in indices:
        idx = int(idx)
        digits = []
        for _ in range(n):
            idx, rem = divmod(idx, q)
            digits.append(rem)
        words.append(tuple(reversed(digits)))
    return words


def sample_random_code(
    spec: RandomCodeSpec, max_expected_size: int = DEFAULT_SIZE_CAP
) -> list[tuple[int, ...]]:
    """Draw one random code, deterministically in the seed.

    The count M ~ Binomial(q^n, q^{-n(1-R)}) is sampled first (exactly, for
    spaces within 64-bit range; via the Poisson limit beyond, where the
    total-variation gap is below 1e-18 at any size passing the memory cap),
    then M distinct uniform words are drawn by rejection.  Returned sorted,
    so the word order carries no information.
    """
    n, q, rate = spec.n, spec.q, spec.rate
    space = q**n
    expected = float(q) ** (n * rate)
    if expected > max_expected_size:
        raise BudgetError(
            f"expected code size q^(n*rate) = {expected:.3g} exceeds the cap "
            f"{max_expected_size}; lower n or the rate"
        )
    rng = np.random.default_rng(spec.seed)
    prob = float(q) ** -(n * (1.0 - rate))
    if space <= 2**63 - 1:
        m = int(rng.binomial(space, prob))
    else:
        m = int(rng.poisson(expected))
    if m == 0:
        return []

    if space <= 1 << 22:
        idx = rng.choice(space, size=m, replace=False)
        return sorted(_decode_words(idx, q, n))

    # Rejection: the space dwarfs m, so collisions are rare.
    seen: set[tuple[int, ...]] = set()
    while len(seen) < m:
        batch = rng.integers(0, q, size=(m - len(seen), n))
        for row in batch:
            seen.add(tuple(int(x) for x in row))
    return sorted(seen)


def _coverage_patterns(
    syms: Sequence[int], ell: int, q: int
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Distinct per-coordinate transitions: (miss indicator per column, K core).

    Only subsets of the symbols present in this coordinate matter; any
    size-ell set acts through its intersection with them, and supersets
    dominate, so taking min(ell, #present) of the present symbols is
    exhaustive up to domination.
    """
    present = sorted(set(syms))
    k = min(ell, len(present))
    out = []
    for core in itertools.combinations(present, k):
        chosen = set(core)
        miss = tuple(0 if s in chosen else 1 for s in syms)
        out.append((miss, core))
    return out


def _pad_to_ell(core: Sequence[int], ell: int, q: int) -> frozenset[int]:
    chosen = list(core)
    for s in range(q):
        if len(chosen) >= ell:
            break
        if s not in core:
            chosen.append(s)
    return frozenset(chosen)


def is_bad_tuple(
    columns: Sequence[Sequence[int]], p: float, ell: int, q: int
) -> Optional[BadnessCertificate]:
    """Exact badness decision for L columns, with a certificate when bad.

    Dynamic program over coordinates; state = per-column violation counts,
    states exceeding the floor(p*n) budget are dropped.  Back-pointers
    reconstruct one witnessing assignment of K_i sets.
    """
    L = len(columns)
    if L < 1:
        raise ValidationError("need at least one column")
    n = len(columns[0])
    cols = [tuple(c) for c in columns]
    if any(len(c) != n for c in cols):
        raise ValidationError("columns must share a common length")
    if len(set(cols)) != L:
        raise ValidationError("columns must be distinct")
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0, 1], got {p}")
    if not 1 <= ell <= q:
        raise ValidationError(f"need 1 <= ell <= q, got ell={ell}, q={q}")
    for c in cols:
        for s in c:
            if not 0 <= s < q:
                raise ValidationError(f"symbol {s!r} outside alphabet range 0..{q - 1}")

    budget = math.floor(p * n)
    start = (0,) * L
    states: set[tuple[int, ...]] = {start}
    trace: list[dict[tuple[int, ...], tuple[tuple[int, ...], tuple[int, ...]]]] = []
    for i in range(n):
        syms = tuple(col[i] for col in cols)
        step: dict[tuple[int, ...], tuple[tuple[int, ...], tuple[int, ...]]] = {}
        for miss, core in _coverage_patterns(syms, ell, q):
            for st in states:
                nxt = tuple(st[j] + miss[j] for j in range(L))
                if max(nxt) > budget:
                    continue
                if nxt not in step:
                    step[nxt] = (st, core)
        if not step:
            return None
        trace.append(step)
        states = set(step)

    final = min(states)
    cores: list[tuple[int, ...]] = []
    state = final
    for step in reversed(trace):
        state, core = step[state]
        cores.append(core)
    cores.reverse()
    k_sets = tuple(_pad_to_ell(core, ell, q) for core in cores)
    return BadnessCertificate(tuple(cols), k_sets, final, budget)


# ---------------------------------------------------------------------------
# Whole-code search


def _pairwise_close(arr: np.ndarray, q: int, threshold: int) -> list[list[int]]:
    """Adjacency lists of codeword pairs at Hamming distance <= threshold."""
    m, n = arr.shape
    neighbors: list[list[int]] = [[] for _ in range(m)]
    if q == 2 and n <= 64:
        packed = np.zeros(m, dtype=np.uint64)
        for j in range(n):
            packed = (packed << np.uint64(1)) | arr[:, j].astype(np.uint64)
        chunk = max(1, (1 << 22) // max(m, 1))
        for lo in range(0, m, chunk):
            hi = min(lo + chunk, m)
            dist = np.bitwise_count(packed[lo:hi, None] ^ packed[None, :])
            for a, b in zip(*np.nonzero(dist <= threshold)):
                i, j = lo + int(a), int(b)
                if i < j:
                    neighbors[i].append(j)
    else:
        chunk = max(1, (1 << 23) // max(m * n, 1))
        for lo in range(0, m, chunk):
            hi = min(lo + chunk, m)
            dist = (arr[lo:hi, None, :] != arr[None, :, :]).sum(axis=2)
            for a, b in zip(*np.nonzero(dist <= threshold)):
                i, j = lo + int(a), int(b)
                if i < j:
                    neighbors[i].append(j)
    return neighbors


def _cliques(neighbors: list[list[int]], size: int):
    """All `size`-cliques of the closeness graph, vertices ascending."""
    m = len(neighbors)
    sets = [set(adj) for adj in neighbors]

    def extend(prefix: list[int], common: set[int]):
        if len(prefix) == size:
            yield tuple(prefix)
            return
        for v in sorted(common):
            yield from extend(prefix + [v], common & sets[v])

    for v in range(m):
        yield from extend([v], sets[v])


def contains_bad_matrix(
    code: Sequence[Sequence[int]],
    p: float,
    ell: int,
    L: int,
    q: int,
    max_subsets: int = DEFAULT_SUBSET_CAP,
) -> tuple[bool, Optional[BadnessCertificate]]:
    """Whether some L distinct codewords of the code form a bad tuple.

    For ell = 1 a bad tuple needs all columns within floor(p*n) of a common
    center, hence pairwise within twice that; candidates are then cliques
    of the closeness graph.  Other ell fall back to plain L-subset
    enumeration.  Raises BudgetError when the candidate count would exceed
    ``max_subsets``.
    """
    words = [tuple(c) for c in code]
    if len(set(words)) != len(words):
        raise ValidationError("code must consist of distinct codewords")
    m = len(words)
    if m < L:
        return False, None
    n = len(words[0])
    budget = math.floor(p * n)

    if ell == 1:
        arr = np.array(words, dtype=np.uint8 if q <= 256 else np.int64)
        neighbors = _pairwise_close(arr, q, 2 * budget)
        checked = 0
        for clique in _cliques(neighbors, L):
            checked += 1
            if checked > max_subsets:
                raise BudgetError(
                    f"more than {max_subsets} candidate {L}-tuples; "
                    f"raise max_subsets or shrink the code"
                )
            cert = is_bad_tuple([words[i] for i in clique], p, ell, q)
            if cert is not None:
                return True, cert
        return False, None

    total = math.comb(m, L)
    if total > max_subsets:
        raise BudgetError(
            f"{total} candidate {L}-subsets exceed the budget {max_subsets}"
        )
    for combo in itertools.combinations(range(m), L):
        cert = is_bad_tuple([words[i] for i in combo], p, ell, q)
        if cert is not None:
            return True, cert
    return False, None


# ---------------------------------------------------------------------------
# Threshold sweep


def resolve_workers(explicit: Optional[int] = None) -> int:
    """Worker count: explicit argument, else CODE_THRESH_THREADS, else CPUs."""
    if explicit is not None:
        return max(1, explicit)
    env = os.environ.get("CODE_THRESH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValidationError(f"CODE_THRESH_THREADS must be an integer: {env!r}") from exc
    return os.cpu_count() or 1


def _run_trial(args) -> tuple[int, bool]:
    trial, n, rate, q, p, ell, L, seed, size_cap, subset_cap = args
    code = sample_random_code(RandomCodeSpec(n, rate, q, seed), size_cap)
    found, _ = contains_bad_matrix(code, p, ell, L, q, subset_cap)
    return trial, found


def _check_sweep_budget(
    n: int, rate: float, q: int, ell: int, L: int, size_cap: int, subset_cap: int
) -> None:
    expected = float(q) ** (n * rate)
    if expected > size_cap:
        raise BudgetError(
            f"(n={n}, rate={rate}): expected code size {expected:.3g} exceeds "
            f"the cap {size_cap}"
        )
    # 4 standard deviations of headroom on the binomial count.
    hi = int(expected + 4.0 * math.sqrt(expected) + 1.0)
    if ell == 1:
        est_pairs = hi * (hi - 1) // 2
        if est_pairs > 10 * subset_cap:
            raise BudgetError(
                f"(n={n}, rate={rate}): ~{est_pairs} pairwise distances "
                f"exceed the work budget"
            )
    else:
        if math.comb(hi, L) > subset_cap:
            raise BudgetError(
                f"(n={n}, rate={rate}): ~{math.comb(hi, L)} {L}-subsets "
                f"exceed the budget {subset_cap}"
            )


def _interpolate_crossing(
    rates: Sequence[float], fractions: Sequence[float]
) -> Optional[float]:
    """Rate where the fraction first passes 1/2, linearly interpolated."""
    if fractions and fractions[0] > 0.5:
        return float(rates[0])
    for i in range(len(rates) - 1):
        f0, f1 = fractions[i], fractions[i + 1]
        if f0 <= 0.5 < f1:
            return float(rates[i] + (0.5 - f0) * (rates[i + 1] - rates[i]) / (f1 - f0))
    return None


def empirical_threshold_sweep(
    n_list: Sequence[int],
    rate_grid: Sequence[float],
    trials: int,
    p: float,
    ell: int,
    L: int,
    q: int,
    base_seed: int,
    workers: Optional[int] = None,
    max_expected_size: int = DEFAULT_SIZE_CAP,
    max_subsets: int = DEFAULT_SUBSET_CAP,
) -> SweepReport:
    """Fraction of seeded random codes containing a bad matrix, per (n, rate).

    All budgets are checked before any sampling.  Each trial uses the
    deterministic seed trial_seed(base_seed, n, rate, trial), so results
    do not depend on execution order or worker count.
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    for n in n_list:
        for rate in rate_grid:
            _check_sweep_budget(n, rate, q, ell, L, max_expected_size, max_subsets)

    nworkers = resolve_workers(workers)
    t0 = time.perf_counter()
    rows: list[SweepRow] = []
    crossings: dict[int, Optional[float]] = {}
    for n in n_list:
        fractions: list[float] = []
        for rate in rate_grid:
            tasks = [
                (
                    t, n, rate, q, p, ell, L,
                    trial_seed(base_seed, n, rate, t),
                    max_expected_size, max_subsets,
                )
                for t in range(trials)
            ]
            if nworkers > 1:
                from concurrent.futures import ProcessPoolExecutor

                with ProcessPoolExecutor(max_workers=nworkers) as pool:
                    outcomes = dict(pool.map(_run_trial, tasks, chunksize=8))
            else:
                outcomes = dict(map(_run_trial, tasks))
            satisfied = sum(1 for t in range(trials) if outcomes[t])
            fraction = satisfied / trials
            rows.append(SweepRow(n, float(rate), trials, satisfied, fraction))
            fractions.append(fraction)
        crossings[n] = _interpolate_crossing(list(rate_grid), fractions)
    return SweepReport(tuple(rows), crossings, base_seed, time.perf_counter() - t0)
