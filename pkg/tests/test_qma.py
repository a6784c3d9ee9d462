"""
Unit tests for quadratic monomial algebras and the phi/psi counts
"""

import pytest

from hochschild.qma import (
    LetterConstraint,
    PhiMethod,
    basis_of_degree,
    dual_basis,
    dual_of_nilpotent,
    generating_function_h,
    hilbert_series,
    is_dual_word,
    multiply_words,
    n_algebra_rank,
    nilpotent_basis,
    nilpotent_presentation,
    phi,
    phi_constrained,
    phi_first_letter_formula,
    phi_last_letter_formula,
    phi_sequence,
    psi_vector,
    quadratic_dual,
    series_f_shriek,
    top_corner_count_formula,
)


class TestPresentations:
    """N_m and its quadratic dual"""

    def test_nilpotent_relations(self):
        alg = nilpotent_presentation(4)
        assert alg.gen_count == 3
        assert alg.allows(1, 2) and alg.allows(2, 3)
        assert not alg.allows(2, 1)
        assert not alg.allows(1, 1)

    def test_dual_is_complement(self):
        alg = nilpotent_presentation(4)
        dual = quadratic_dual(alg)
        assert dual == dual_of_nilpotent(4)
        assert not dual.allows(1, 2)
        assert dual.allows(2, 1) and dual.allows(1, 1)
        assert quadratic_dual(dual) == alg

    def test_rejects_small_m(self):
        with pytest.raises(ValueError):
            nilpotent_presentation(1)

    def test_nilpotent_basis(self):
        assert nilpotent_basis(3) == [(), (1,), (2,), (1, 2)]
        for m in range(2, 7):
            assert len(nilpotent_basis(m)) == n_algebra_rank(m)

    def test_hilbert_series_of_n3(self):
        assert hilbert_series(nilpotent_presentation(3), 3).coefficients == (1, 2, 1, 0)

    def test_basis_is_lexicographic(self):
        assert dual_basis(3, 2) == ((1, 1), (2, 1), (2, 2))
        assert basis_of_degree(dual_of_nilpotent(3), -1) == ()

    def test_multiply_words(self):
        dual = dual_of_nilpotent(3)
        assert multiply_words(dual, (2,), (1,)) == (2, 1)
        assert multiply_words(dual, (1,), (2,)) is None
        assert multiply_words(dual, (), (1, 1)) == (1, 1)

    def test_is_dual_word(self):
        assert is_dual_word(4, (3, 1, 1, 3))
        assert not is_dual_word(4, (1, 2))
        assert not is_dual_word(4, (4,))


class TestPhi:
    """Ranks of the Koszul dual"""

    @pytest.mark.parametrize("method", list(PhiMethod))
    def test_methods_agree(self, method):
        for m in range(2, 7):
            assert phi_sequence(m, 10, method) == phi_sequence(m, 10, PhiMethod.RECURSION)

    def test_m3_is_linear(self):
        assert phi_sequence(3, 6) == [1, 2, 3, 4, 5, 6, 7]

    def test_m2_is_constant(self):
        assert phi_sequence(2, 5) == [1] * 6

    def test_m4_values(self):
        assert phi_sequence(4, 3) == [1, 3, 7, 16]

    def test_low_degrees(self):
        for m in range(2, 8):
            assert phi(m, 1) == m - 1
            assert phi(m, 2) == (m - 1) ** 2 - (m - 2)
            assert phi(m, -1) == 0

    def test_matches_enumeration(self):
        for m in (3, 4, 5):
            for q in range(6):
                assert phi(m, q) == len(dual_basis(m, q))

    def test_series(self):
        assert series_f_shriek(3, 4).coefficients == (1, 2, 3, 4, 5)

    def test_invalid_m(self):
        with pytest.raises(ValueError):
            phi(1, 3)


class TestPsiAndConstraints:
    """First-letter counts and constrained phi"""

    def test_psi_sums_to_phi(self):
        for m in (3, 4, 5):
            for q in range(1, 8):
                assert sum(psi_vector(m, q)) == phi(m, q)

    def test_psi_m3(self):
        assert psi_vector(3, 2) == (1, 2)

    def test_psi_needs_positive_degree(self):
        with pytest.raises(ValueError):
            psi_vector(3, 0)

    def test_first_and_last_letter_formulas(self):
        first_ne_1 = [LetterConstraint("first", "ne", 1)]
        for m in (3, 4, 5):
            last_ne = [LetterConstraint("last", "ne", m - 1)]
            for q in range(6):
                assert phi_constrained(m, q, first_ne_1) == phi_first_letter_formula(m, q)
                assert phi_constrained(m, q, last_ne) == phi_last_letter_formula(m, q)

    def test_top_corner_count(self):
        for m in (3, 4, 5):
            both = [LetterConstraint("first", "ne", 1), LetterConstraint("last", "ne", m - 1)]
            for q in range(2, 7):
                assert phi_constrained(m, q, both) == top_corner_count_formula(m, q)

    def test_top_corner_m3(self):
        assert [top_corner_count_formula(3, q) for q in range(2, 6)] == [1, 2, 3, 4]

    def test_bad_constraint(self):
        with pytest.raises(ValueError):
            LetterConstraint("middle", "eq", 1)

    def test_generating_function_h(self):
        assert generating_function_h(3, 3).coefficients == (2, 2, 3, 4)
        with pytest.raises(ValueError):
            generating_function_h(2, 3)
