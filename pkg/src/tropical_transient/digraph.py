"""Digraph structure of max-plus matrices and cycle-mean machinery.

A square matrix A induces a weighted digraph D_A on nodes 1..n with an
edge (i, j) of weight a_ij exactly when a_ij is finite.  This module
computes supports, geometric equivalence, irreducibility, maximum cycle
means (Karp's algorithm, exact rationals) with a canonical critical-cycle
witness, and the classical path quantities around the distinguished
node 1: best path weights into and out of it and best weights of walks
avoiding it.

Node labels in public inputs and outputs are 1-based, matching the usual
matrix convention; array indices are 0-based internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .errors import AssumptionError, DimensionError
from .matrix import TropicalMatrix, walk_closure
from .semiring import EPSILON, Epsilon, Weight, ZERO


@dataclass(frozen=True)
class EdgeSet:
    """The support of a square matrix: 1-based ordered pairs (i, j)."""

    n: int
    edges: frozenset[tuple[int, int]]

    def __contains__(self, edge: tuple[int, int]) -> bool:
        return edge in self.edges

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def support(m: TropicalMatrix) -> EdgeSet:
    """Edges (i, j), 1-based, where the entry is finite."""
    if not m.is_square:
        raise DimensionError("support is defined for square matrices")
    fin = m._fin
    pairs = frozenset(
        (int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(fin))
    )
    return EdgeSet(m.rows, pairs)


def geometrically_equivalent(a: TropicalMatrix, b: TropicalMatrix) -> bool:
    """True when both matrices have the same support."""
    if a.shape != b.shape:
        raise DimensionError("geometric comparison needs equal shapes")
    return bool(np.array_equal(a._fin, b._fin))


def _reachable(fin: np.ndarray, start: int) -> np.ndarray:
    n = fin.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        u = stack.pop()
        for v in np.nonzero(fin[u])[0]:
            if not seen[v]:
                seen[v] = True
                stack.append(int(v))
    return seen


def is_irreducible(m: TropicalMatrix) -> bool:
    """True when D_m is strongly connected (trivially so for n = 1)."""
    if not m.is_square:
        raise DimensionError("irreducibility is defined for square matrices")
    fin = m._fin
    if m.rows == 1:
        return True
    return bool(_reachable(fin, 0).all() and _reachable(fin.T, 0).all())


def strongly_connected_components(fin: np.ndarray) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components in a deterministic order."""
    n = fin.shape[0]
    succ = [list(map(int, np.nonzero(fin[u])[0])) for u in range(n)]
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            u, pi = work[-1]
            if pi == 0:
                index[u] = low[u] = counter
                counter += 1
                stack.append(u)
                on_stack[u] = True
            advanced = False
            for k in range(pi, len(succ[u])):
                v = succ[u][k]
                if index[v] == -1:
                    work[-1] = (u, k + 1)
                    work.append((v, 0))
                    advanced = True
                    break
                if on_stack[v]:
                    low[u] = min(low[u], index[v])
            if advanced:
                continue
            if low[u] == index[u]:
                comp = []
                while True:
                    v = stack.pop()
                    on_stack[v] = False
                    comp.append(v)
                    if v == u:
                        break
                comps.append(sorted(comp))
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[u])
    return comps


@dataclass(frozen=True)
class CycleMeanResult:
    """Maximum cycle mean and one critical cycle attaining it.

    The witness is a tuple of 1-based node labels listing the cycle once,
    starting from its smallest node, without repeating the start at the
    end.  It is None exactly when the digraph is acyclic (mean -inf).
    """

    mean: Weight
    witness: Optional[tuple[int, ...]]


def _karp_component(num: np.ndarray, fin: np.ndarray, den: int,
                    comp: list[int]) -> Optional[Fraction]:
    ns = len(comp)
    pos = {v: t for t, v in enumerate(comp)}
    edges = [
        (pos[u], pos[v], int(num[u, v]))
        for u in comp
        for v in np.nonzero(fin[u])[0]
        if int(v) in pos
    ]
    if not edges:
        return None
    # F[k][v] = best weight of a length-k walk from the source inside the
    # component; None where no such walk exists.
    F: list[list[Optional[int]]] = [[None] * ns for _ in range(ns + 1)]
    F[0][0] = 0
    for k in range(1, ns + 1):
        prev = F[k - 1]
        cur = F[k]
        for u, v, w in edges:
            pu = prev[u]
            if pu is None:
                continue
            s = pu + w
            if cur[v] is None or s > cur[v]:
                cur[v] = s
    best: Optional[Fraction] = None
    for v in range(ns):
        top = F[ns][v]
        if top is None:
            continue
        inner: Optional[Fraction] = None
        for k in range(ns):
            fk = F[k][v]
            if fk is None:
                continue
            cand = Fraction(top - fk, den * (ns - k))
            if inner is None or cand < inner:
                inner = cand
        if inner is not None and (best is None or inner > best):
            best = inner
    return best


def _critical_cycle(num: np.ndarray, fin: np.ndarray, den: int,
                    lam: Fraction) -> tuple[int, ...]:
    """A canonical cycle of mean lam: the one that is lexicographically
    smallest among critical cycles written from their smallest node."""
    n = fin.shape[0]
    weights: dict[tuple[int, int], Fraction] = {}
    for u in range(n):
        for v in np.nonzero(fin[u])[0]:
            weights[(u, int(v))] = Fraction(int(num[u, v]), den) - lam
    # Longest-path potentials from a virtual source: after normalization no
    # cycle is positive, so the relaxation reaches a fixed point.
    d = [ZERO] * n
    for _ in range(n + 2):
        changed = False
        for (u, v), w in weights.items():
            cand = d[u] + w
            if cand > d[v]:
                d[v] = cand
                changed = True
        if not changed:
            break
    else:
        raise RuntimeError("cycle mean potentials failed to converge")
    tight = [[] for _ in range(n)]
    for (u, v), w in weights.items():
        if d[u] + w == d[v]:
            tight[u].append(v)
    for u in range(n):
        tight[u].sort()

    def reaches(target: int, frontier: int, banned: set[int]) -> bool:
        seen = {frontier}
        stack = [frontier]
        while stack:
            x = stack.pop()
            for y in tight[x]:
                if y == target:
                    return True
                if y not in seen and y not in banned:
                    seen.add(y)
                    stack.append(y)
        return False

    on_cycle = [
        u for u in range(n) if tight[u] and reaches(u, u, set())
    ]
    start = min(on_cycle)
    # Greedy lexicographic walk through the tight subgraph; every tight
    # cycle has mean lam, so any simple cycle found here is critical.
    # Nodes below start cannot lie on a cycle through start (start is the
    # smallest node on any tight cycle), and a candidate is viable only if
    # start stays reachable without reentering the partial path.
    cycle = [start]
    used: set[int] = set()
    cur = start
    while True:
        nxt = None
        for v in tight[cur]:
            if v < start or v in used:
                continue
            if v == start or reaches(start, v, used):
                nxt = v
                break
        if nxt is None:
            raise RuntimeError("critical cycle reconstruction failed")
        if nxt == start:
            break
        cycle.append(nxt)
        used.add(nxt)
        cur = nxt
    return tuple(v + 1 for v in cycle)


def max_cycle_mean(m: TropicalMatrix) -> CycleMeanResult:
    """The maximum mean weight over all cycles of D_m, with a witness.

    Runs Karp's algorithm on each strongly connected component and keeps
    the best value; acyclic digraphs give (-inf, None).  All arithmetic is
    exact: walk weights stay on the integer grid and the final divisions
    produce Fractions.
    """
    if not m.is_square:
        raise DimensionError("cycle means are defined for square matrices")
    num, fin, den = m._num, m._fin, m._den
    best: Optional[Fraction] = None
    for comp in strongly_connected_components(fin):
        cand = _karp_component(num, fin, den, comp)
        if cand is not None and (best is None or cand > best):
            best = cand
    if best is None:
        return CycleMeanResult(EPSILON, None)
    return CycleMeanResult(best, _critical_cycle(num, fin, den, best))


def lambda_star(a_sup: TropicalMatrix) -> CycleMeanResult:
    """Maximum cycle mean of D_{a_sup} with node 1 removed.

    The witness keeps the original 1-based labels.  When every cycle goes
    through node 1 the result is (-inf, None).
    """
    if not a_sup.is_square:
        raise DimensionError("lambda* needs a square matrix")
    if a_sup.rows == 1:
        return CycleMeanResult(EPSILON, None)
    sub = a_sup.delete_node(0)
    res = max_cycle_mean(sub)
    if res.witness is None:
        return res
    return CycleMeanResult(res.mean, tuple(v + 1 for v in res.witness))


def _require_negative_lambda(a_sup: TropicalMatrix, what: str) -> None:
    lam = lambda_star(a_sup).mean
    if not isinstance(lam, Epsilon) and lam >= 0:
        raise AssumptionError(
            f"{what} needs every node-1-avoiding cycle strictly negative; "
            f"the maximum off-1 cycle mean is {lam}"
        )


def best_paths_to_one(a_sup: TropicalMatrix) -> TropicalMatrix:
    """Column vector of best path weights from each node into node 1.

    Entry i is the maximum weight of a path i -> 1 in D_{a_sup} touching
    node 1 only at its end; entry 1 is 0 (the empty path).  Requires the
    off-1 maximum cycle mean to be negative (else suprema need not be
    attained by paths).
    """
    _require_negative_lambda(a_sup, "best paths into node 1")
    n = a_sup.rows
    if n == 1:
        return TropicalMatrix.from_rows([[0]])
    absorbed = a_sup.with_row_eps(0)
    closure = walk_closure(absorbed, n - 1)
    col = [[ZERO]] + [[closure.entry(i, 0)] for i in range(1, n)]
    return TropicalMatrix.from_rows(col)


def best_paths_from_one(a_sup: TropicalMatrix) -> TropicalMatrix:
    """Column vector of best path weights from node 1 to each node.

    Entry j is the maximum weight of a path 1 -> j touching node 1 only at
    its start; entry 1 is 0.  Same precondition as
    :func:`best_paths_to_one`.
    """
    _require_negative_lambda(a_sup, "best paths out of node 1")
    n = a_sup.rows
    if n == 1:
        return TropicalMatrix.from_rows([[0]])
    absorbed = a_sup.with_col_eps(0)
    closure = walk_closure(absorbed, n - 1)
    col = [[ZERO]] + [[closure.entry(0, j)] for j in range(1, n)]
    return TropicalMatrix.from_rows(col)


def avoiding_walk_weights(a_sup: TropicalMatrix) -> TropicalMatrix:
    """Best weights of node-1-avoiding walks between every pair of nodes.

    Entry (i, j) is the maximum weight over walks i -> j of length at
    least one that never touch node 1; row 1 and column 1 are -inf, and
    the diagonal ranges over cycles.  Computed as the walk closure of the
    node-1-deleted submatrix up to length n - 1, which is exhaustive when
    all avoiding cycles are negative.
    """
    _require_negative_lambda(a_sup, "avoiding walk weights")
    n = a_sup.rows
    if n == 1:
        return TropicalMatrix.eps(1, 1)
    sub = a_sup.delete_node(0)
    closure = walk_closure(sub, n - 1)
    return closure.embed(n, 1)


def validation_witness(kind: str, **fields) -> Mapping[str, object]:
    """A small JSON-ready mapping describing a failed check."""
    out: dict[str, object] = {"kind": kind}
    out.update(fields)
    return out
