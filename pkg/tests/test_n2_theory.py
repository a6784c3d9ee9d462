"""
Unit tests for HH*(N_2, N_2): periodic groups, the product and bracket tables, BV operators
"""

import pytest

from hochschild.bimod import standard_bimodule
from hochschild.exactla import CoeffRing, FinAbGroup, NotACocycle, UnsupportedPair, UnsupportedRing
from hochschild.ghstructure import ClassSymbol, CohClass, cocycle_f, cocycle_g, format_class, gerstenhaber_bracket
from hochschild.homology import hochschild
from hochschild.n2_theory import (
    DeltaOperator,
    annihilator_of_two,
    bracket_closed,
    bv_identity_failures,
    class_generators,
    class_of_bar_cochain,
    cup_classes,
    delta_family,
    delta_squares_to_zero,
    m2_over_n2_formula,
    n2_group_formula,
    n2_theory,
    normalize_class,
    periodic_groups,
    quotient_by_two,
)

Z = CoeffRing.integers()
Q = CoeffRing.rationals()
F2 = CoeffRing.prime_field(2)
F3 = CoeffRing.prime_field(3)
Z4 = CoeffRing.integers_mod(4)

f, g = ClassSymbol.f, ClassSymbol.g


@pytest.fixture
def one_class():
    return lambda symbol, coefficient=1: CohClass.of(2, symbol, coefficient)


class TestGroups:
    """Periodic complex against the closed forms"""

    def test_over_z(self):
        assert [n2_group_formula(Z, n) for n in range(4)] == [
            FinAbGroup(2),
            FinAbGroup(1),
            FinAbGroup(1, (2,)),
            FinAbGroup(1),
        ]

    def test_over_z_mod_4(self):
        assert n2_group_formula(Z4, 1) == FinAbGroup(0, (2, 4))

    @pytest.mark.parametrize("ring", [Z, Q, F2, F3, Z4])
    def test_periodic_matches_formula(self, ring):
        for n in range(6):
            assert periodic_groups(ring, n) == n2_group_formula(ring, n), n

    def test_ring_pieces(self):
        assert quotient_by_two(Q).is_trivial
        assert quotient_by_two(Z) == FinAbGroup(0, (2,))
        assert annihilator_of_two(F2) == FinAbGroup(1)
        assert annihilator_of_two(Z).is_trivial

    @pytest.mark.parametrize("ring", [Z, F2])
    def test_quotient_module(self, ring):
        quotient = standard_bimodule(2, "M/N")
        for n in range(4):
            assert hochschild(2, quotient, ring, n) == m2_over_n2_formula(ring, n)

    def test_generators(self):
        assert class_generators(Z, 1) == [(g(1), 1)]
        assert class_generators(Z4, 1) == [(f(1), 2), (g(1), 1)]
        assert class_generators(Q, 2) == [(f(2), 1)]
        assert class_generators(F2, 2) == [(f(2), 1), (g(2), 1)]


class TestClasses:
    """Normal forms of f/g combinations"""

    def test_unit_becomes_f0(self, one_class):
        assert normalize_class(one_class(ClassSymbol.one(), 3), Z) == one_class(f(0), 3)

    def test_odd_f_needs_annihilator(self, one_class):
        with pytest.raises(NotACocycle):
            normalize_class(one_class(f(1)), Z)
        assert normalize_class(one_class(f(1), 2), Z4) == one_class(f(1), 2)

    def test_even_g_reduced_mod_two(self, one_class):
        assert normalize_class(one_class(g(2), 3), Z) == one_class(g(2))
        assert normalize_class(one_class(g(2)), Q).is_zero()

    def test_rejects_a_symbols(self):
        with pytest.raises(UnsupportedPair):
            normalize_class(CohClass.of(2, ClassSymbol.a(1, ())), Z)

    def test_bar_cochains(self, one_class):
        assert class_of_bar_cochain(cocycle_f(2), Z) == one_class(f(2))
        assert class_of_bar_cochain(cocycle_g(3), Z) == one_class(g(3))
        # d f_1 = 2 g_2
        with pytest.raises(NotACocycle):
            class_of_bar_cochain(cocycle_f(1), Z)
        assert class_of_bar_cochain(cocycle_f(1), F2) == one_class(f(1))


class TestProductsAndBrackets:
    """Closed tables and their cochain counterparts"""

    def test_products(self, one_class):
        assert cup_classes(one_class(f(1)), one_class(g(1)), F2) == one_class(g(2))
        assert cup_classes(one_class(g(1)), one_class(g(3)), Z).is_zero()
        assert cup_classes(one_class(f(2)), one_class(f(2)), Z) == one_class(f(4))

    @pytest.mark.parametrize(
        "x,y,expected",
        [
            (f(1), f(3), {}),
            (f(2), g(2), {}),
            (f(1), g(2), {f(2): 1}),
            (f(2), g(1), {f(2): 2}),
            (g(2), g(2), {}),
            (g(1), g(2), {g(2): -1}),
            (g(2), g(1), {g(2): 1}),
            (g(3), g(1), {g(3): 2}),
            (g(2), f(1), {f(2): -1}),
        ],
    )
    def test_bracket_table(self, x, y, expected):
        assert bracket_closed(x, y) == expected

    @pytest.mark.parametrize("ring", [Z, F2])
    def test_cochain_bracket_agrees(self, ring, one_class):
        for x, y in ((g(1), g(2)), (g(3), g(1)), (f(2), g(1)), (f(2), g(3))):
            closed = gerstenhaber_bracket(2, one_class(x), one_class(y), "closed_form", ring)
            cochain = gerstenhaber_bracket(2, one_class(x), one_class(y), "cochain", ring)
            assert closed == cochain, (x, y)

    def test_f2_brackets(self, one_class):
        value = gerstenhaber_bracket(2, one_class(f(1)), one_class(g(2)), "closed_form", F2)
        assert format_class(value) == "f(2)"


class TestBVOperators:
    """Δ_c and Δ_{c,c'} generate the bracket"""

    def test_delta_c(self, one_class):
        delta = DeltaOperator(Q, 1)
        assert delta(one_class(g(1))) == one_class(f(0)) + one_class(g(0))
        assert delta(one_class(g(3))) == one_class(f(2), 3)
        assert delta(one_class(f(2))).is_zero()
        assert delta.name == "Delta_1"

    def test_delta_char_two(self, one_class):
        delta = DeltaOperator(F2, 1, 1)
        assert format_class(delta(one_class(f(1)))) == "f(0) + g(0)"
        assert format_class(delta(one_class(g(1)))) == "f(0) + g(0)"
        assert delta(one_class(g(2))).is_zero()

    def test_family_sizes(self):
        assert len(list(delta_family(F2))) == 4
        assert len(list(delta_family(F3))) == 3
        assert len(list(delta_family(Q))) == 4

    def test_family_needs_field(self):
        with pytest.raises(UnsupportedRing):
            list(delta_family(Z))

    @pytest.mark.parametrize("ring", [Q, F2, F3])
    def test_bv_identity(self, ring):
        for delta in delta_family(ring):
            assert bv_identity_failures(delta, 5) == [], delta.name
            assert delta_squares_to_zero(delta, 5)


class TestReport:
    """End-to-end N_2 report"""

    @pytest.mark.parametrize("ring", [Z, Q, F2, Z4])
    def test_passes(self, ring):
        report = n2_theory(ring, 4)
        assert report.passed
        assert report.bv_checked == ring.is_field

    def test_quotient_rows_use_m_over_n(self):
        report = n2_theory(Q, 2, bv_degree=1)
        assert [row.n for row in report.quotient_rows] == [0, 1, 2]
        assert all(row.agree for row in report.quotient_rows)

    def test_to_dict(self):
        data = n2_theory(F2, 3, bv_degree=2).to_dict()
        assert data["passed"] is True
        assert data["ring"] == "Fp:2"
        assert [row["n"] for row in data["groups"]] == [0, 1, 2, 3]
        assert set(data["bv_failures"]) == {"Delta_0,0", "Delta_0,1", "Delta_1,0", "Delta_1,1"}
