"""
Unit tests for the J-adic spectral sequence: pages, homotopies, collapse
"""

from itertools import product

import pytest

from hochschild.bimod import BasisLabel, StandardKind
from hochschild.exactla import CoeffRing, FinAbGroup, InvalidIndex
from hochschild.homology import bigraded_rank_formula
from hochschild.qma import phi
from hochschild.specseq import (
    collapse_and_extension_check,
    contracting_homotopy_check,
    e1_page,
    e2_page,
    e2_row,
    element_weight,
    exactness_bookkeeping,
    homotopy_identities,
    kernel_avoidance_check,
    label_content,
    t_plus,
    top_corner_basis,
    words_of_content,
    z_generators,
    z_span_check,
    z_vector,
)

Z = CoeffRing.integers()
Q = CoeffRing.rationals()
F2 = CoeffRing.prime_field(2)


class TestE1Page:
    """E1 = N^! ⊗ Gr(M) with the closed-form d1"""

    @pytest.mark.parametrize("target", ["N", "B", "M/N", "B/N", "M/J", "R"])
    def test_closed_form_matches_connecting_map(self, target):
        for m in (3, 4):
            page = e1_page(m, target, 4)
            assert page.agreement, page.mismatches()

    def test_basis_sizes(self):
        page = e1_page(3, "N", 3)
        assert page.p_range == (0, 1, 2)
        # Gr^1(N_3) = {E12, E23}
        assert page.rank(1, 1) == 2 * phi(3, 2)
        assert page.rank(2, -2) == 1

    def test_off_strand_blocks_are_empty(self):
        page = e1_page(3, "N", 3)
        assert page.basis(1, 1, s=0) == ()
        assert page.differential(1, 1, s=0).shape == (0, 0)

    def test_rejects_unfiltered_target(self):
        with pytest.raises(ValueError):
            e1_page(3, "M", 3)
        with pytest.raises(ValueError):
            e1_page(3, "N", -1)


class TestE2Page:
    """E2 ranks and freeness"""

    @pytest.mark.parametrize("target", ["N", "B"])
    def test_ranks_match_bigraded_counts(self, target):
        for m in (3, 4):
            page = e2_page(e1_page(m, target, 5), Z)
            assert page.is_free
            for (p, q), group in page.entries.items():
                assert group.size_rank == bigraded_rank_formula(m, target, p + q, q), (m, p, q)

    def test_b_vanishes_strictly_inside(self):
        m = 4
        page = e2_page(e1_page(m, "B", 6), Q)
        for q in range(0, 4):
            assert page.rank(0, q) == phi(m, q)
            for p in range(1, m - 1):
                assert page.rank(p, q) == 0

    def test_total_degree(self):
        page = e2_page(e1_page(3, "N", 4), Q)
        assert [page.total(n).size_rank for n in range(5)] == [2, 2, 3, 5, 7]

    def test_off_strand_query(self):
        page = e2_page(e1_page(3, "N", 2), Q)
        assert page.get(0, 0, s=1) == FinAbGroup()

    def test_to_dict(self):
        data = e2_page(e1_page(3, "N", 1), Q).to_dict()
        assert data["target"] == "N"
        assert data["ring"] == "Q"
        assert {"p": 0, "q": 0, "s": 0, "free_rank": 1, "torsion": []} in data["entries"]

    def test_representatives(self):
        page = e2_page(e1_page(3, "B", 3), Q)
        assert page.representatives["top_corner/2"] == ((2, 1),)
        assert page.representatives["z/1"] == tuple(z_generators(3, 1))

    @pytest.mark.parametrize("m", [3, 4])
    def test_t_plus_representatives(self, m):
        page = e2_page(e1_page(m, "N", 4), Z)
        for q in range(1, 4):
            classes = page.representatives[f"t_plus/{q}"]
            assert classes == tuple(t_plus(m, q))
            assert len(classes) == (m - 2) * phi(m, q) == page.rank(1, q)

    def test_no_t_plus_on_b(self):
        page = e2_page(e1_page(3, "B", 3), Q)
        assert not any(key.startswith("t_plus/") for key in page.representatives)


class TestWeightBlocks:
    """Rows of E2 assembled by letter content"""

    def test_label_content(self):
        assert label_content(3, BasisLabel(1, 3)) == (1, 1)
        assert label_content(3, BasisLabel(3, 2)) == (0, -1)
        assert label_content(3, BasisLabel(2, 2)) == (0, 0)
        assert label_content(3, BasisLabel.identity()) == (0, 0)

    def test_element_weight(self):
        assert element_weight(4, ((2, 1, 3), BasisLabel(1, 3))) == (0, 0, 1)

    def test_words_of_content(self):
        assert words_of_content(3, (1, 1)) == [(2, 1)]
        assert words_of_content(4, (1, 1, 1)) == [(1, 3, 2), (2, 1, 3), (3, 2, 1)]
        assert words_of_content(3, (0, -1)) == []
        assert words_of_content(3, (0, 0)) == [()]

    @pytest.mark.parametrize("m", [3, 4, 5])
    def test_contents_partition_the_dual_basis(self, m):
        for n in range(5):
            total = sum(len(words_of_content(m, c)) for c in product(range(n + 1), repeat=m - 1) if sum(c) == n)
            assert total == phi(m, n)

    @pytest.mark.parametrize("target", ["N", "B", "M/N"])
    def test_rows_agree_with_full_page(self, target):
        for m in (3, 4):
            page = e2_page(e1_page(m, target, m + 2), Z)
            for q in range(-(m - 1), 4):
                for p, group in e2_row(m, target, q, Z).items():
                    assert group == page.get(p, q), (m, p, q)

    def test_m5_row_beyond_page(self):
        row = e2_row(5, "B", 3, Q)
        assert row[0].size_rank == phi(5, 3) == 42
        assert all(row[p].is_trivial for p in (1, 2, 3))


class TestNamedGenerators:
    """z(i, I) and the top-corner words"""

    @pytest.mark.parametrize("m", [3, 4])
    def test_z_span(self, m):
        for q in range(4):
            result = z_span_check(m, q)
            assert result["ok"], result

    def test_z_vector(self):
        z = z_vector(3, 1, ())
        assert z == {((1,), BasisLabel(1, 1)): 1, ((1,), BasisLabel(2, 2)): -1}

    def test_z_vector_invalid(self):
        with pytest.raises(InvalidIndex):
            z_vector(3, 3, ())
        with pytest.raises(InvalidIndex):
            z_vector(4, 1, (1, 2))

    def test_z_generators_nonzero(self):
        assert all(z_generators(4, 2))
        with pytest.raises(ValueError):
            z_generators(4, -1)

    def test_top_corner_basis(self):
        assert top_corner_basis(3, 3) == [(2, 1, 1), (2, 2, 1)]
        assert top_corner_basis(3, 0) == [()]
        assert len(top_corner_basis(5, 4)) > 0


class TestHomotopies:
    """Contracting homotopies on the M/N and B pages"""

    @pytest.mark.parametrize("m", [3, 4, 5])
    def test_identities(self, m):
        for q in range(4):
            results = homotopy_identities(m, q)
            assert results
            assert all(results.values()), results

    @pytest.mark.parametrize("m", [3, 4, 5, 6])
    def test_bottom_row_of_b(self, m):
        # at q = 0 the single letters y_i ⊗ E_{i,i+1} are cocycles of d1
        assert homotopy_identities(m, 0)["B p=1"]
        assert contracting_homotopy_check(m, 0)

    def test_wrapper(self):
        assert contracting_homotopy_check(4, 2)

    def test_needs_m3(self):
        with pytest.raises(ValueError):
            homotopy_identities(2, 1)

    @pytest.mark.parametrize("m", [3, 4])
    def test_kernel_avoidance(self, m):
        for q in range(5):
            assert kernel_avoidance_check(m, q)


class TestCollapse:
    """E2 = HH block by block"""

    @pytest.mark.parametrize("target", ["N", "B", "M/N", "B/N", "M/J", "R"])
    def test_collapse_over_z(self, target):
        report = collapse_and_extension_check(3, target, 4, Z)
        assert report.passed

    def test_collapse_over_f2(self):
        assert collapse_and_extension_check(4, "N", 3, F2).passed

    def test_report_dict(self):
        data = collapse_and_extension_check(3, StandardKind.N, 2, Q).to_dict()
        assert data["passed"] is True
        assert [row["n"] for row in data["rows"]] == [0, 1, 2]
        assert data["rows"][0]["hh"] == {"free_rank": 2, "torsion": []}

    def test_bookkeeping(self):
        for m in (3, 4):
            for q in range(5):
                assert exactness_bookkeeping(m, q) == 0

    def test_bookkeeping_needs_field(self):
        with pytest.raises(ValueError):
            exactness_bookkeeping(3, 1, Z)
