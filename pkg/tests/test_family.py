import random
from fractions import Fraction

import pytest

import oracles
from conftest import random_valid_family
from tropical_transient.errors import AssumptionError, DimensionError
from tropical_transient.family import (
    MatrixFamily,
    derive_boundaries,
    max_walk_magnitude,
)
from tropical_transient.matrix import TropicalMatrix
from tropical_transient.semiring import EPSILON, Epsilon


def test_construction_checks():
    with pytest.raises(DimensionError):
        MatrixFamily([])
    with pytest.raises(DimensionError):
        MatrixFamily([TropicalMatrix.identity(2), TropicalMatrix.identity(3)])
    with pytest.raises(DimensionError):
        MatrixFamily([TropicalMatrix.eps(2, 3)])


def test_member_access_is_one_based(family5):
    assert family5.member_count == 3
    assert family5.member(1) is family5.members[0]
    assert family5.member(3) is family5.members[2]
    for bad in (0, 4, -1):
        with pytest.raises(IndexError):
            family5.member(bad)


def test_boundaries_are_entrywise_extrema(family5):
    a_sup, a_inf = derive_boundaries(family5)
    grids = [oracles.grid(m) for m in family5.members]
    n = family5.size
    for i in range(n):
        for j in range(n):
            vals = [g[i][j] for g in grids]
            if any(v is None for v in vals):
                assert isinstance(a_inf.entry(i, j), Epsilon)
            else:
                assert a_inf.entry(i, j) == min(vals)
            finite = [v for v in vals if v is not None]
            if finite:
                assert a_sup.entry(i, j) == max(finite)
            else:
                assert isinstance(a_sup.entry(i, j), Epsilon)


def test_boundaries_sandwich_products(family5, seq44):
    from tropical_transient.products import fold

    a_sup, a_inf = family5.boundaries()
    k = 6
    prod = fold(family5, seq44.indices[:k])
    assert a_inf.power(k).le(prod)
    assert prod.le(a_sup.power(k))


def test_fixture_family_is_admissible(family5):
    report = family5.validate()
    assert report.passed
    assert [c.name for c in report.checks] == [
        "geometric_equivalence",
        "irreducibility",
        "members_node1_critical_loop",
        "sup_node1_critical_loop",
    ]
    assert report.failing() == ()
    assert report.check("irreducibility").passed
    with pytest.raises(KeyError):
        report.check("bogus")
    # must not raise
    family5.require_valid("test")


class TestValidationFailures:
    def test_support_mismatch(self):
        a = TropicalMatrix.from_rows([[0, -1], [-1, -2]])
        b = TropicalMatrix.from_rows([[0, None], [-1, -2]])
        report = MatrixFamily([a, b]).validate()
        check = report.check("geometric_equivalence")
        assert not check.passed
        assert check.witness["kind"] == "support_mismatch"
        assert check.witness["edge"] == [1, 2]
        assert not report.passed

    def test_reducible_member(self):
        member = TropicalMatrix.from_rows([[0, None], [-1, -2]])
        report = MatrixFamily([member]).validate()
        check = report.check("irreducibility")
        assert not check.passed
        assert check.witness == {"kind": "not_strongly_connected", "member": 1}

    def test_wrong_loop_weight(self):
        member = TropicalMatrix.from_rows([[-1, -1], [-1, -2]])
        report = MatrixFamily([member]).validate()
        check = report.check("members_node1_critical_loop")
        assert not check.passed
        assert check.witness["kind"] == "node1_loop_weight"
        assert check.witness["value"] == -1

    def test_missing_loop(self):
        member = TropicalMatrix.from_rows([[None, -1], [-1, -2]])
        report = MatrixFamily([member]).validate()
        check = report.check("members_node1_critical_loop")
        assert not check.passed
        assert check.witness["kind"] == "node1_loop_weight"
        assert check.witness["value"] == "-inf"

    def test_nonnegative_other_cycle(self):
        member = TropicalMatrix.from_rows([[0, -1], [-1, 0]])
        report = MatrixFamily([member]).validate()
        check = report.check("members_node1_critical_loop")
        assert not check.passed
        assert check.witness["kind"] == "nonnegative_side_cycle"
        assert check.witness["cycle"] == [2]
        assert check.witness["mean"] == 0

    def test_nonnegative_through_one_cycle(self):
        member = TropicalMatrix.from_rows([[0, 2], [-1, -3]])
        report = MatrixFamily([member]).validate()
        check = report.check("members_node1_critical_loop")
        assert not check.passed
        assert check.witness["cycle"] == [1, 2]
        assert check.witness["mean"] == "1/2"

    def test_sup_can_fail_when_members_pass(self):
        # each member keeps the 1<->2 round trip negative, their maxima do not
        a = TropicalMatrix.from_rows([[0, 2], [-3, -5]])
        b = TropicalMatrix.from_rows([[0, -3], [2, -5]])
        fam = MatrixFamily([a, b])
        report = fam.validate()
        assert report.check("members_node1_critical_loop").passed
        check = report.check("sup_node1_critical_loop")
        assert not check.passed
        assert check.witness["matrix"] == "A_sup"

    def test_require_valid_raises_with_report(self):
        member = TropicalMatrix.from_rows([[None, -1], [-1, -2]])
        fam = MatrixFamily([member])
        with pytest.raises(AssumptionError) as info:
            fam.require_valid("unit test")
        assert info.value.report is fam.validate()
        with pytest.raises(AssumptionError):
            fam.sup_derived


def test_random_generated_families_validate():
    rng = random.Random(0)
    for _ in range(50):
        fam = random_valid_family(rng)
        assert fam.validate().passed


class TestSupDerived:
    def test_lambda_and_vectors_against_oracle(self, family5):
        derived = family5.sup_derived
        g = oracles.grid(family5.a_sup)
        lam, attaining = oracles.max_cycle_mean(g, forbidden={0})
        assert derived.lambda_star.mean == lam
        cyc0 = tuple(v - 1 for v in derived.lambda_star.witness)
        assert cyc0 in [tuple(c) for c in attaining] or any(
            set(cyc0) == set(c) for c in attaining
        )
        n = family5.size
        for i in range(1, n):
            assert derived.alpha.entry(i, 0) == oracles.best_simple_path(g, i, 0)
            assert derived.beta.entry(i, 0) == oracles.best_simple_path(g, 0, i)
        assert derived.alpha.entry(0, 0) == 0
        assert derived.beta.entry(0, 0) == 0

    def test_cached(self, family5):
        assert family5.sup_derived is family5.sup_derived


class TestInfWalks:
    def test_against_oracle(self, family5):
        g = oracles.grid(family5.a_inf)
        w = family5.inf_walk_to_one()
        v = family5.inf_walk_from_one()
        n = family5.size
        assert w.entry(0, 0) == 0 and v.entry(0, 0) == 0
        for i in range(1, n):
            assert w.entry(i, 0) == oracles.best_simple_path(g, i, 0)
            assert v.entry(i, 0) == oracles.best_simple_path(g, 0, i)

    def test_longer_cap_changes_nothing(self, family5):
        # negative off-1 cycles: n - 1 steps already reach the optimum
        assert family5.inf_walk_to_one(cap=12) == family5.inf_walk_to_one()
        assert family5.inf_walk_from_one(cap=12) == family5.inf_walk_from_one()

    def test_cap_validation(self, family5):
        with pytest.raises(ValueError):
            family5.inf_walk_to_one(cap=-1)


def test_stacked_layout(family5):
    num, fin, den = family5.stacked
    assert num.shape == (3, 5, 5)
    assert fin.shape == (3, 5, 5)
    assert den == 1
    assert not num.flags.writeable and not fin.flags.writeable
    assert num.flags.c_contiguous and fin.flags.c_contiguous
    for t, m in enumerate(family5.members):
        for i in range(5):
            for j in range(5):
                e = m.entry(i, j)
                assert fin[t, i, j] == (not isinstance(e, Epsilon))
                if fin[t, i, j]:
                    assert e == Fraction(int(num[t, i, j]), den)


def test_max_walk_magnitude(family5):
    per_layer = max_walk_magnitude(family5, 1)
    assert per_layer == 6  # largest |entry| in the fixture members
    assert max_walk_magnitude(family5, 10) == 60
    assert max_walk_magnitude(family5, 0) == 0
