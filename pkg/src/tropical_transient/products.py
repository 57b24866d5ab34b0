"""Folding factor sequences into products and scanning for rank-one onset.

Sequences index family members 1-based, in product order: the sequence
(2, 1, 3) folds to A2 (x) A1 (x) A3.  The transient scan looks for the
first length at which every examined product of that length is rank-one,
either exhaustively (all m^k sequences, budget-guarded) or by seeded
sampling with a named, portable generator (numpy PCG64), so runs are
reproducible across platforms.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import itertools

import numpy as np

from . import _kernels
from .errors import BudgetExceededError, PivotError
from .family import MatrixFamily, max_walk_magnitude
from .matrix import TropicalMatrix, _check_magnitude, rank_one_factor

DEFAULT_PRODUCT_BUDGET = 2_000_000


@dataclass(frozen=True)
class ProductSequence:
    """An ordered selection of member indices (1-based) to multiply."""

    indices: tuple[int, ...]
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(x) for x in self.indices))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)


def fold(family: MatrixFamily, sequence) -> TropicalMatrix:
    """Multiply the selected members left to right.

    The sequence must be nonempty; member indices are validated against
    the family.
    """
    indices = tuple(getattr(sequence, "indices", sequence))
    if not indices:
        raise ValueError("cannot fold an empty sequence")
    m = family.member_count
    for pos, idx in enumerate(indices, start=1):
        if not 1 <= idx <= m:
            raise IndexError(
                f"factor {pos} references member {idx}, valid range is 1..{m}"
            )
    _check_magnitude(max_walk_magnitude(family, len(indices)), "sequence fold")
    mem_num, mem_fin, den = family.stacked
    seq0 = np.array([i - 1 for i in indices], dtype=np.int64)
    num, fin = _kernels.ACTIVE.fold(mem_num, mem_fin, seq0)
    return TropicalMatrix(num, fin, den)


def random_sequence(family: MatrixFamily, length: int, seed: int) -> ProductSequence:
    """A seeded uniform sequence of the given length (PCG64)."""
    if length < 1:
        raise ValueError("sequence length must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.integers(1, family.member_count + 1, size=length)
    return ProductSequence(tuple(int(x) for x in draws), seed=seed)


@dataclass(frozen=True)
class TransientEstimate:
    """Result of scanning product lengths for rank-one factorization.

    ``first_all_rank_one`` is the smallest scanned length from which
    every examined product (of that and every larger scanned length) was
    rank-one, or None if the largest length still had a counterexample.
    ``counterexamples`` lists (length, sequence) pairs that failed, in
    scan order.
    """

    mode: str
    horizon: int
    first_all_rank_one: Optional[int]
    counterexamples: tuple[tuple[int, tuple[int, ...]], ...]
    examined: int
    samples_per_length: Optional[int]
    seed: Optional[int]


def _is_rank_one(family: MatrixFamily, indices: tuple[int, ...]) -> bool:
    product = fold(family, indices)
    try:
        return rank_one_factor(product) is not None
    except PivotError:
        return False


def estimate_transient(
    family: MatrixFamily,
    horizon: int,
    mode: str = "sampled",
    samples_per_length: int = 100,
    seed: int = 0,
    max_products: int = DEFAULT_PRODUCT_BUDGET,
    threads: int = 1,
) -> TransientEstimate:
    """Scan lengths 1..horizon and report where rank-one sets in.

    Exhaustive mode enumerates all m^k sequences per length and raises
    :class:`BudgetExceededError` up front when the total exceeds
    ``max_products``.  Sampled mode draws ``samples_per_length`` seeded
    sequences per length; all draws come from one generator in a fixed
    order, so the result does not depend on ``threads``.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    if threads < 1:
        raise ValueError("threads must be at least 1")
    m = family.member_count

    per_length: list[list[tuple[int, ...]]] = []
    if mode == "exhaustive":
        total = 0
        for k in range(1, horizon + 1):
            total += m**k
            if total > max_products:
                raise BudgetExceededError(
                    f"exhaustive scan needs {total}+ products, budget is {max_products}"
                )
        for k in range(1, horizon + 1):
            per_length.append(
                [tuple(p) for p in itertools.product(range(1, m + 1), repeat=k)]
            )
        samples_recorded = None
    else:
        if samples_per_length < 1:
            raise ValueError("samples_per_length must be at least 1")
        if horizon * samples_per_length > max_products:
            raise BudgetExceededError(
                f"sampled scan needs {horizon * samples_per_length} products, "
                f"budget is {max_products}"
            )
        rng = np.random.Generator(np.random.PCG64(seed))
        for k in range(1, horizon + 1):
            draws = rng.integers(1, m + 1, size=(samples_per_length, k))
            per_length.append([tuple(int(x) for x in row) for row in draws])
        samples_recorded = samples_per_length

    examined = 0
    counterexamples: list[tuple[int, tuple[int, ...]]] = []
    check = lambda idx: _is_rank_one(family, idx)
    for k, batch in enumerate(per_length, start=1):
        examined += len(batch)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                flags = list(pool.map(check, batch))
        else:
            flags = [check(idx) for idx in batch]
        for idx, ok in zip(batch, flags):
            if not ok:
                counterexamples.append((k, idx))

    failed_lengths = {k for k, _ in counterexamples}
    first: Optional[int] = None
    for k in range(horizon, 0, -1):
        if k in failed_lengths:
            break
        first = k
    return TransientEstimate(
        mode=mode,
        horizon=horizon,
        first_all_rank_one=first,
        counterexamples=tuple(counterexamples),
        examined=examined,
        samples_per_length=samples_recorded,
        seed=seed if mode == "sampled" else None,
    )
