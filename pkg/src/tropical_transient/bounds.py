"""Transient length bounds for rank-one factorization of long products.

For an admissible family, any product of more than B factors is tropically
rank-one, where B is the maximum over entry pairs (i, j) of two terms:

    term1(i, j) = (w_i + v_j - gamma_ij) / lambda* + (n - 1)
    term2(i, j) = (w_i - alpha_i + v_j - beta_j) / lambda* + 2(n - 1)

and the per-entry bound is max(term1, term2).  There are two modes:

* explicit: w and v are the best walk weights on A_inf into and out of
  node 1, computable from the family alone;
* implicit: w and v are replaced by the first column and first row of an
  already computed product, giving a sharper a-posteriori bound for that
  product's factor sequence.

lambda* is the maximum cycle mean of A_sup off node 1 and is negative for
admissible families.  When it is -inf (every cycle passes through node 1)
the quotients are taken as 0 and the report flags it: the terms then
degenerate to the constants n - 1 and 2(n - 1).

A term with numerator -inf contributes -inf: its condition is met at
every length (for gamma_ij = -inf there is no avoiding walk to beat).
Entry pairs where both terms are -inf never constrain the product and
are skipped.  The overall bound is the maximum of the per-entry bounds,
and any integer length strictly above it is sufficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DimensionError
from .family import MatrixFamily
from .matrix import TropicalMatrix
from .semiring import EPSILON, Epsilon, Weight, oplus


def _quotient(numerator: Weight, lam: Weight) -> Weight:
    """numerator / lam with the conventions used by the bound terms."""
    if isinstance(numerator, Epsilon):
        return EPSILON
    if isinstance(lam, Epsilon):
        return Fraction(0)
    return numerator / lam


@dataclass(frozen=True)
class BoundReport:
    """Per-entry and overall transient bounds for one mode."""

    mode: str
    term1: TropicalMatrix
    term2: TropicalMatrix
    per_entry: TropicalMatrix
    overall: Fraction
    argmax: tuple[int, int, str]
    min_sufficient_length: int
    lambda_star: Weight
    lambda_star_undefined: bool


def compute_bound_report(
    w: TropicalMatrix,
    v: TropicalMatrix,
    alpha: TropicalMatrix,
    beta: TropicalMatrix,
    gamma: TropicalMatrix,
    lam: Weight,
    mode: str,
) -> BoundReport:
    """Evaluate both bound terms from already derived vectors.

    w, v, alpha and beta are n x 1 column vectors, gamma is n x n, and lam
    is the off-1 maximum cycle mean.  The argmax is the first entry pair
    in row-major order attaining the overall bound, preferring term1 when
    both terms attain it at that entry.
    """
    n = w.rows
    for vec in (v, alpha, beta):
        if vec.shape != (n, 1):
            raise DimensionError("bound vectors must be matching n x 1 columns")
    if gamma.shape != (n, n):
        raise DimensionError("gamma must be n x n")
    if not isinstance(lam, Epsilon) and lam >= 0:
        raise DimensionError("bound terms need a negative or -inf cycle mean")

    const1 = Fraction(n - 1)
    const2 = Fraction(2 * (n - 1))
    t1_rows: list[list[Weight]] = []
    t2_rows: list[list[Weight]] = []
    per_rows: list[list[Weight]] = []
    overall: Optional[Fraction] = None
    argmax: Optional[tuple[int, int, str]] = None
    for i in range(n):
        w_i = w.entry(i, 0)
        r_i = _sub(w_i, alpha.entry(i, 0))
        t1_row: list[Weight] = []
        t2_row: list[Weight] = []
        per_row: list[Weight] = []
        for j in range(n):
            v_j = v.entry(j, 0)
            t1_num = _sub(_add(w_i, v_j), gamma.entry(i, j))
            t1 = _shift(_quotient(t1_num, lam), const1)
            t2_num = _add(r_i, _sub(v_j, beta.entry(j, 0)))
            t2 = _shift(_quotient(t2_num, lam), const2)
            entry = oplus(t1, t2)
            t1_row.append(t1)
            t2_row.append(t2)
            per_row.append(entry)
            if not isinstance(entry, Epsilon):
                if overall is None or entry > overall:
                    overall = entry
                    from_t1 = not isinstance(t1, Epsilon) and entry == t1
                    argmax = (i + 1, j + 1, "term1" if from_t1 else "term2")
        t1_rows.append(t1_row)
        t2_rows.append(t2_row)
        per_rows.append(per_row)
    if overall is None:
        raise DimensionError("no entry pair yields a finite bound")
    return BoundReport(
        mode=mode,
        term1=TropicalMatrix.from_rows(t1_rows),
        term2=TropicalMatrix.from_rows(t2_rows),
        per_entry=TropicalMatrix.from_rows(per_rows),
        overall=overall,
        argmax=argmax,
        min_sufficient_length=math.floor(overall) + 1,
        lambda_star=lam,
        lambda_star_undefined=isinstance(lam, Epsilon),
    )


def _add(a: Weight, b: Weight) -> Weight:
    if isinstance(a, Epsilon) or isinstance(b, Epsilon):
        return EPSILON
    return a + b


def _sub(a: Weight, b: Weight) -> Weight:
    # a - b where b = -inf makes the combined term unconstrained: the
    # callers only subtract path weights that are finite whenever a is.
    if isinstance(a, Epsilon):
        return EPSILON
    if isinstance(b, Epsilon):
        return EPSILON
    return a - b


def _shift(q: Weight, c: Fraction) -> Weight:
    if isinstance(q, Epsilon):
        return EPSILON
    return q + c


def explicit_bound(family: MatrixFamily) -> BoundReport:
    """The a-priori bound from the family alone (w, v on A_inf)."""
    family.require_valid("explicit transient bound")
    derived = family.sup_derived
    return compute_bound_report(
        w=family.inf_walk_to_one(),
        v=family.inf_walk_from_one(),
        alpha=derived.alpha,
        beta=derived.beta,
        gamma=derived.gamma,
        lam=derived.lambda_star.mean,
        mode="explicit",
    )


def implicit_bound(family: MatrixFamily, product: TropicalMatrix) -> BoundReport:
    """The a-posteriori bound for one computed product.

    Column 1 and row 1 of the product play the roles of w and v: they are
    the best initial-walk and final-walk weights of its factor sequence
    once the product is long enough to be rank-one, and in general they
    bound those weights from above.
    """
    family.require_valid("implicit transient bound")
    if product.shape != (family.size, family.size):
        raise DimensionError("product must match the family dimension")
    derived = family.sup_derived
    w = TropicalMatrix.from_rows([[product.entry(i, 0)] for i in range(product.rows)])
    v = TropicalMatrix.from_rows([[product.entry(0, j)] for j in range(product.cols)])
    return compute_bound_report(
        w=w,
        v=v,
        alpha=derived.alpha,
        beta=derived.beta,
        gamma=derived.gamma,
        lam=derived.lambda_star.mean,
        mode="implicit",
    )


def check_length_sufficient(report: BoundReport, k: int) -> bool:
    """True when a product of k factors is guaranteed rank-one."""
    return Fraction(k) > report.overall
