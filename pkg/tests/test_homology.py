"""
Unit tests for the Koszul and bar cochain complexes and the closed rank formulas
"""

import pytest

from hochschild.bimod import standard_bimodule
from hochschild.exactla import CoeffRing, DimensionBudgetExceeded, FinAbGroup
from hochschild.homology import (
    BarCochainComplex,
    Model,
    bar_units,
    bigraded_rank_formula,
    euler_characteristic_check,
    hh_rank_formula,
    hochschild,
    hochschild_bigraded,
    koszul_complex,
    m_over_n_rank_alternating,
    resolution_homology,
)

Z = CoeffRing.integers()
Q = CoeffRing.rationals()
F2 = CoeffRing.prime_field(2)


class TestKoszulComplex:
    """Blockwise Koszul cochains"""

    def test_square_zero(self):
        for m in (2, 3, 4):
            for which in ("N", "M/N", "B"):
                assert koszul_complex(m, standard_bimodule(m, which), 4).verify_square_zero()

    def test_internal_degrees(self):
        complex_ = koszul_complex(3, standard_bimodule(3, "N"), 3)
        assert complex_.internal_degrees(2) == [0, 1, 2]

    def test_differential_of_identity(self):
        complex_ = koszul_complex(3, standard_bimodule(3, "N"), 2)
        identity = standard_bimodule(3, "N").labels[0]
        image = complex_.differential_of(0, ((), identity))
        # x_k I - I x_k = 0 in every direction
        assert image == {}


class TestHochschildGroups:
    """HH^n(N_m, M) totals"""

    def test_n3_over_q(self):
        coeff = standard_bimodule(3, "N")
        assert [hochschild(3, coeff, Q, n).free_rank for n in range(5)] == [2, 2, 3, 5, 7]

    @pytest.mark.parametrize(
        "which,expected",
        [("M/N", [2, 2, 3, 4, 5]), ("R", [1, 2, 3, 4, 5]), ("B", [2, 2, 4, 6, 8])],
    )
    def test_other_targets_m3(self, which, expected):
        table = hochschild_bigraded(3, standard_bimodule(3, which), Q, 4)
        assert [table.totals[n].size_rank for n in range(5)] == expected

    @pytest.mark.parametrize("which", ["N", "B", "M/N", "B/N", "M/J", "R"])
    def test_totals_match_formula(self, which):
        for m in (3, 4):
            table = hochschild_bigraded(m, standard_bimodule(m, which), Q, 5)
            assert [table.totals[n].size_rank for n in range(6)] == [hh_rank_formula(m, which, n) for n in range(6)]

    @pytest.mark.parametrize("which", ["N", "B", "M/N"])
    def test_bigraded_match_formula(self, which):
        for m in (3, 4):
            table = hochschild_bigraded(m, standard_bimodule(m, which), Q, 5)
            for n in range(6):
                for s in range(-m, n + m):
                    assert table.get(n, s).size_rank == bigraded_rank_formula(m, which, n, s), (m, n, s)

    def test_n_is_torsion_free_over_z(self):
        for m in (3, 4):
            table = hochschild_bigraded(m, standard_bimodule(m, "N"), Z, 4)
            assert all(g.is_free for g in table.totals.values())

    def test_field_independence_for_n(self):
        coeff = standard_bimodule(4, "N")
        for n in range(5):
            assert hochschild(4, coeff, F2, n).size_rank == hochschild(4, coeff, Q, n).size_rank

    def test_negative_degree(self):
        with pytest.raises(ValueError):
            hochschild(3, standard_bimodule(3, "N"), Q, -1)

    def test_to_dict(self):
        table = hochschild_bigraded(3, standard_bimodule(3, "N"), Q, 1)
        data = table.to_dict()
        assert {"n": 0, "s": 0, "free_rank": 1, "torsion": []} in data["entries"]
        assert {"n": 0, "s": -2, "free_rank": 1, "torsion": []} in data["entries"]
        assert data["totals"]["1"] == {"free_rank": 2, "torsion": []}


class TestN2Groups:
    """N_2 has 2-torsion over Z"""

    def test_over_z(self):
        coeff = standard_bimodule(2, "N")
        groups = [hochschild(2, coeff, Z, n) for n in range(4)]
        assert groups == [FinAbGroup(2), FinAbGroup(1), FinAbGroup(1, (2,)), FinAbGroup(1)]

    def test_over_z_mod_4(self):
        assert hochschild(2, standard_bimodule(2, "N"), CoeffRing.integers_mod(4), 1) == FinAbGroup(0, (2, 4))

    def test_over_f2(self):
        coeff = standard_bimodule(2, "N")
        assert [hochschild(2, coeff, F2, n).size_rank for n in range(4)] == [2, 2, 2, 2]


class TestBarModel:
    """Reduced bar cochains agree with the Koszul model"""

    @pytest.mark.parametrize("ring", [Z, Q, F2])
    def test_models_agree(self, ring):
        for m, which in ((2, "N"), (3, "N"), (3, "M/N"), (3, "R")):
            coeff = standard_bimodule(m, which)
            for n in range(4):
                assert hochschild(m, coeff, ring, n, Model.BAR) == hochschild(m, coeff, ring, n, Model.KOSZUL), (m, which, n)

    def test_bar_square_zero(self):
        complex_ = BarCochainComplex(3, standard_bimodule(3, "N"), 3)
        assert complex_.verify_square_zero()

    def test_bar_units(self):
        assert [str(u) for u in bar_units(3)] == ["E1,2", "E2,3", "E1,3"]

    def test_budget(self):
        with pytest.raises(DimensionBudgetExceeded):
            BarCochainComplex(4, standard_bimodule(4, "N"), 4, budget=100)


class TestResolutionAndEuler:
    """Acyclicity of the Koszul resolution and Euler characteristics"""

    @pytest.mark.parametrize("m", [3, 4])
    def test_resolution_acyclic(self, m):
        for i in range(4):
            assert resolution_homology(m, i).is_trivial

    def test_euler_characteristic(self):
        for m in (3, 4, 5):
            for d in range(6):
                assert euler_characteristic_check(m, d)


class TestFormulas:
    """Closed forms in terms of phi"""

    def test_alternating_form(self):
        for m in (3, 4, 5):
            for n in range(1, 8):
                assert m_over_n_rank_alternating(m, n) == hh_rank_formula(m, "M/N", n)

    def test_n_low_degrees(self):
        for m in (3, 4, 5):
            assert hh_rank_formula(m, "N", 0) == 2
            assert hh_rank_formula(m, "N", 1) == 2 * m - 4

    def test_bigraded_sums_to_total(self):
        for m in (3, 4):
            for n in range(7):
                total = sum(bigraded_rank_formula(m, "N", n, s) for s in range(-m, n + 1))
                assert total == hh_rank_formula(m, "N", n)

    def test_rejects_m2(self):
        with pytest.raises(ValueError):
            hh_rank_formula(2, "N", 1)
