"""Finite families of max-plus matrices and their standing assumptions.

A family holds m square matrices of a common size.  Products drawn from
it are bracketed by two boundary matrices: the entrywise maximum A_sup
and minimum A_inf.  The transient analysis requires the family to be
*admissible*:

  1. all members, and A_inf, share one support (geometric equivalence);
  2. every member is irreducible;
  3. node 1 carries a loop of weight 0 in every member (hence in A_sup),
     and every other cycle of every member and of A_sup has negative
     weight, so that loop is the unique critical cycle.

Check 3 is decided by two exact tests per matrix: entry (1,1) equals 0,
and the maximum cycle mean after deleting the (1,1) edge is negative.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Optional

import numpy as np

from .digraph import (
    CycleMeanResult,
    avoiding_walk_weights,
    best_paths_from_one,
    best_paths_to_one,
    geometrically_equivalent,
    is_irreducible,
    lambda_star,
    max_cycle_mean,
    validation_witness,
)
from .errors import AssumptionError, DimensionError
from .matrix import TropicalMatrix, walk_closure
from .semiring import EPSILON, Epsilon, ZERO, weight_token


@dataclass(frozen=True)
class AssumptionCheck:
    """Outcome of one validation check with an optional failure witness."""

    name: str
    passed: bool
    witness: Optional[Mapping[str, object]] = None


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[AssumptionCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> tuple[AssumptionCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def check(self, name: str) -> AssumptionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class SupDerived:
    """Quantities read off D_{A_sup}: the off-1 cycle mean and the best
    path weights into node 1 (alpha), out of it (beta), and avoiding it
    (gamma)."""

    lambda_star: CycleMeanResult
    alpha: TropicalMatrix
    beta: TropicalMatrix
    gamma: TropicalMatrix


class MatrixFamily:
    """An immutable finite family of same-size square max-plus matrices."""

    def __init__(self, members: Iterable[TropicalMatrix]):
        members = tuple(members)
        if not members:
            raise DimensionError("a family needs at least one member")
        n = members[0].rows
        for m in members:
            if not m.is_square or m.rows != n:
                raise DimensionError("family members must be square and same size")
        self._members = members
        self._n = n

    @property
    def members(self) -> tuple[TropicalMatrix, ...]:
        return self._members

    @property
    def size(self) -> int:
        """Matrix dimension n."""
        return self._n

    @property
    def member_count(self) -> int:
        return len(self._members)

    def member(self, index: int) -> TropicalMatrix:
        """Member by 1-based index, the convention used in product sequences."""
        if not 1 <= index <= len(self._members):
            raise IndexError(f"member index {index} out of range 1..{len(self._members)}")
        return self._members[index - 1]

    # -- boundary matrices --------------------------------------------------

    @cached_property
    def a_sup(self) -> TropicalMatrix:
        out = self._members[0]
        for m in self._members[1:]:
            out = out.oplus(m)
        return out

    @cached_property
    def a_inf(self) -> TropicalMatrix:
        out = self._members[0]
        for m in self._members[1:]:
            out = out.emin(m)
        return out

    def boundaries(self) -> tuple[TropicalMatrix, TropicalMatrix]:
        """(A_sup, A_inf): entrywise maximum and minimum over members."""
        return self.a_sup, self.a_inf

    # -- validation ---------------------------------------------------------

    @cached_property
    def validation(self) -> ValidationReport:
        checks = (
            self._check_equivalence(),
            self._check_irreducibility(),
            self._check_member_loops(),
            self._check_sup_loop(),
        )
        return ValidationReport(checks)

    def validate(self) -> ValidationReport:
        return self.validation

    def require_valid(self, what: str) -> None:
        report = self.validation
        if not report.passed:
            names = ", ".join(c.name for c in report.failing())
            raise AssumptionError(
                f"{what} requires an admissible family; failing checks: {names}",
                report=report,
            )

    def _check_equivalence(self) -> AssumptionCheck:
        base = self._members[0]
        labeled = [(f"member {i + 1}", m) for i, m in enumerate(self._members[1:], start=1)]
        labeled.append(("A_inf", self.a_inf))
        for label, m in labeled:
            if not geometrically_equivalent(base, m):
                diff = np.nonzero(base._fin != m._fin)
                i, j = int(diff[0][0]), int(diff[1][0])
                return AssumptionCheck(
                    "geometric_equivalence",
                    False,
                    validation_witness(
                        "support_mismatch",
                        matrix=label,
                        edge=[i + 1, j + 1],
                        present_in=label if m._fin[i, j] else "member 1",
                    ),
                )
        return AssumptionCheck("geometric_equivalence", True)

    def _check_irreducibility(self) -> AssumptionCheck:
        # Equivalence may have failed already; report per member regardless.
        for idx, m in enumerate(self._members, start=1):
            if not is_irreducible(m):
                return AssumptionCheck(
                    "irreducibility",
                    False,
                    validation_witness("not_strongly_connected", member=idx),
                )
        return AssumptionCheck("irreducibility", True)

    @staticmethod
    def _loop_check(m: TropicalMatrix, label: str) -> Optional[Mapping[str, object]]:
        loop = m.entry(0, 0)
        if isinstance(loop, Epsilon) or loop != 0:
            return validation_witness(
                "node1_loop_weight",
                matrix=label,
                entry=[1, 1],
                value=weight_token(loop),
            )
        pruned = m.with_entry(0, 0, EPSILON)
        other = max_cycle_mean(pruned)
        if not isinstance(other.mean, Epsilon) and other.mean >= 0:
            return validation_witness(
                "nonnegative_side_cycle",
                matrix=label,
                cycle=list(other.witness),
                mean=weight_token(other.mean),
            )
        return None

    def _check_member_loops(self) -> AssumptionCheck:
        for idx, m in enumerate(self._members, start=1):
            witness = self._loop_check(m, f"member {idx}")
            if witness is not None:
                return AssumptionCheck("members_node1_critical_loop", False, witness)
        return AssumptionCheck("members_node1_critical_loop", True)

    def _check_sup_loop(self) -> AssumptionCheck:
        witness = self._loop_check(self.a_sup, "A_sup")
        if witness is not None:
            return AssumptionCheck("sup_node1_critical_loop", False, witness)
        return AssumptionCheck("sup_node1_critical_loop", True)

    # -- derived data -------------------------------------------------------

    @cached_property
    def sup_derived(self) -> SupDerived:
        """Path data on D_{A_sup}; requires a validated family."""
        self.require_valid("derivation on A_sup")
        a_sup = self.a_sup
        return SupDerived(
            lambda_star=lambda_star(a_sup),
            alpha=best_paths_to_one(a_sup),
            beta=best_paths_from_one(a_sup),
            gamma=avoiding_walk_weights(a_sup),
        )

    def inf_walk_to_one(self, cap: Optional[int] = None) -> TropicalMatrix:
        """Column vector w: entry i is the best weight of a walk i -> 1 in
        D_{A_inf} touching node 1 only at its end (entry 1 is 0).

        Walks longer than n - 1 edges cannot improve on shorter ones when
        off-1 cycles are negative, so the default cap n - 1 is exhaustive;
        a larger cap is accepted for cross-checking.
        """
        self.require_valid("walk weights on A_inf")
        return self._inf_vector(to_one=True, cap=cap)

    def inf_walk_from_one(self, cap: Optional[int] = None) -> TropicalMatrix:
        """Column vector v: entry j is the best weight of a walk 1 -> j in
        D_{A_inf} touching node 1 only at its start (entry 1 is 0)."""
        self.require_valid("walk weights on A_inf")
        return self._inf_vector(to_one=False, cap=cap)

    def _inf_vector(self, to_one: bool, cap: Optional[int]) -> TropicalMatrix:
        n = self._n
        if cap is None:
            cap = n - 1
        if cap < 0:
            raise ValueError("walk length cap must be nonnegative")
        if n == 1:
            return TropicalMatrix.from_rows([[0]])
        a_inf = self.a_inf
        absorbed = a_inf.with_row_eps(0) if to_one else a_inf.with_col_eps(0)
        closure = walk_closure(absorbed, cap)
        if to_one:
            col = [[ZERO]] + [[closure.entry(i, 0)] for i in range(1, n)]
        else:
            col = [[ZERO]] + [[closure.entry(0, j)] for j in range(1, n)]
        return TropicalMatrix.from_rows(col)

    # -- kernel staging -----------------------------------------------------

    @cached_property
    def stacked(self) -> tuple[np.ndarray, np.ndarray, int]:
        """Members stacked as (m, n, n) scaled arrays on a common denominator."""
        den = TropicalMatrix.common_denominator(self._members)
        nums = []
        fins = []
        for m in self._members:
            num, fin = m.scaled(den)
            nums.append(num)
            fins.append(fin)
        mem_num = np.ascontiguousarray(np.stack(nums))
        mem_fin = np.ascontiguousarray(np.stack(fins))
        mem_num.setflags(write=False)
        mem_fin.setflags(write=False)
        return mem_num, mem_fin, den

    def __repr__(self) -> str:
        return f"MatrixFamily(n={self._n}, members={len(self._members)})"


def derive_boundaries(family: MatrixFamily) -> tuple[TropicalMatrix, TropicalMatrix]:
    """(A_sup, A_inf) for the family; see :meth:`MatrixFamily.boundaries`."""
    return family.boundaries()


def max_walk_magnitude(family: MatrixFamily, length: int) -> int:
    """Upper bound on any scaled walk-weight magnitude after ``length`` steps.

    Used to guard the int64 budget before long folds or DP sweeps.
    """
    mem_num, mem_fin, _ = family.stacked
    per_layer = 0
    for t in range(mem_num.shape[0]):
        fin = mem_fin[t]
        if fin.any():
            per_layer = max(per_layer, int(np.abs(mem_num[t][fin]).max()))
    return per_layer * max(length, 0)
