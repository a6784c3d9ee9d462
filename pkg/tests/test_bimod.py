"""
Unit tests for the bimodule catalog, J-adic filtrations and the normalizer
"""

import pytest

from hochschild.bimod import (
    IDENTITY,
    BasisLabel,
    StandardKind,
    check_bimodule_axioms,
    graded_piece,
    graded_piece_of,
    j_adic_filtration,
    multiply_n_labels,
    normalizer_dimension,
    parse_kind,
    reduce_matrix_element,
    standard_bimodule,
    tangent_dimension,
)
from hochschild.exactla import CoeffRing, InvalidLayer

E = BasisLabel
Q = CoeffRing.rationals()


class TestStandardBimodules:
    """Label bases and generator actions"""

    def test_n3_labels(self):
        mod = standard_bimodule(3, "N")
        assert mod.labels == (IDENTITY, E(1, 2), E(2, 3), E(1, 3))
        assert mod.degrees == [0, 1, 2]

    def test_n3_actions(self):
        mod = standard_bimodule(3, "N")
        assert dict(mod.act_left(1, E(2, 3))) == {E(1, 3): 1}
        assert dict(mod.act_right(E(1, 2), 2)) == {E(1, 3): 1}
        assert dict(mod.act_left(1, IDENTITY)) == {E(1, 2): 1}
        assert dict(mod.act_left(2, E(1, 2))) == {}

    def test_unit_actions(self):
        mod = standard_bimodule(3, "N")
        assert mod.unit_left(E(1, 3), {IDENTITY: 1}) == {E(1, 3): 1}
        assert mod.unit_right({IDENTITY: 1}, E(1, 3)) == {E(1, 3): 1}
        assert mod.unit_left(E(1, 2), {E(1, 2): 1}) == {}

    @pytest.mark.parametrize(
        "which,expected",
        [("N", 4), ("B", 6), ("M", 9), ("M/N", 5), ("B/N", 2), ("M/J", 6), ("R", 1)],
    )
    def test_ranks_m3(self, which, expected):
        assert len(standard_bimodule(3, which)) == expected

    @pytest.mark.parametrize("which", ["N", "B", "M", "M/N", "B/N", "M/J", "R"])
    def test_axioms(self, which):
        for m in (2, 3, 4):
            assert check_bimodule_axioms(standard_bimodule(m, which)) == []

    def test_graded_and_power_layers(self):
        gr = standard_bimodule(3, StandardKind.GR, -1)
        assert set(gr.labels) == {E(2, 1), E(3, 2)}
        jpow = standard_bimodule(4, StandardKind.JPOW, 2)
        assert set(jpow.labels) == {E(1, 3), E(2, 4), E(1, 4)}

    def test_layer_index_required(self):
        with pytest.raises(InvalidLayer):
            standard_bimodule(3, StandardKind.GR)
        with pytest.raises(InvalidLayer):
            standard_bimodule(3, StandardKind.GR, 3)

    def test_parse_kind_aliases(self):
        assert parse_kind("M/N") is StandardKind.M_OVER_N
        assert parse_kind("M_over_N") is StandardKind.M_OVER_N
        assert parse_kind(StandardKind.R) is StandardKind.R
        with pytest.raises(ValueError):
            parse_kind("X")

    def test_m_over_n_reduction(self):
        # identity is zero in M/N, diagonal entries are measured against d_1
        element = {(1, 1): 1, (2, 2): 3, (2, 1): 5, (1, 2): 7}
        assert reduce_matrix_element(3, "M/N", element) == {E(2, 2): 2, E(3, 3): -1, E(2, 1): 5}

    def test_multiply_labels(self):
        assert multiply_n_labels(E(1, 2), E(2, 3)) == E(1, 3)
        assert multiply_n_labels(E(2, 3), E(1, 2)) is None
        assert multiply_n_labels(IDENTITY, E(1, 2)) == E(1, 2)


class TestFiltration:
    """J-adic layers and their graded pieces"""

    def test_filtration_of_n(self):
        filtered = j_adic_filtration(standard_bimodule(3, "N"))
        assert filtered.offset == 0
        assert filtered.layer(1) == frozenset({E(1, 2), E(2, 3), E(1, 3)})
        assert filtered.layer(2) == frozenset({E(1, 3)})
        assert filtered.layer(3) == frozenset()

    def test_graded_piece_of_m(self):
        filtered = j_adic_filtration(standard_bimodule(3, "M"))
        assert filtered.offset == -2
        assert graded_piece(filtered, -2).labels == (E(3, 1),)
        assert set(graded_piece(filtered, 0).labels) == {E(1, 1), E(2, 2), E(3, 3)}

    def test_graded_pieces_partition(self):
        for which in ("N", "M", "M/N"):
            mod = standard_bimodule(4, which)
            filtered = j_adic_filtration(mod)
            total = sum(len(graded_piece(filtered, p)) for p in range(-3, 4))
            assert total == len(mod)

    def test_out_of_range_layer(self):
        with pytest.raises(InvalidLayer):
            graded_piece_of(3, "N", 3)


class TestNormalizer:
    """Normalizer of N_m and the tangent dimension"""

    def test_m2_depends_on_characteristic(self):
        assert normalizer_dimension(2, Q) == 3
        assert normalizer_dimension(2, CoeffRing.prime_field(2)) == 4
        assert normalizer_dimension(2, CoeffRing.prime_field(3)) == 3

    def test_m2_over_z_mod_n(self):
        assert normalizer_dimension(2, CoeffRing.integers_mod(4)) == 4
        assert normalizer_dimension(2, CoeffRing.integers_mod(3)) == 3

    @pytest.mark.parametrize("m", [3, 4, 5])
    def test_tangent_dimension(self, m):
        assert tangent_dimension(m) == (3 * m * m - 7 * m + 4) // 2

    def test_tangent_m3(self):
        assert tangent_dimension(3) == 5

    def test_tangent_needs_m3(self):
        with pytest.raises(ValueError):
            tangent_dimension(2)
