"""
Quadratic Monomial Algebras - Monomial bases, quadratic duals and phi/psi counting
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from lib.cache_manager import cached_result

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]
EMPTY_WORD: Word = ()


@dataclass(frozen=True)
class QuadMonomialAlgebra:
    """T(V)/<x_i x_j : (i, j) in forbidden> on generators 1..gen_count"""

    gen_count: int
    forbidden: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        if self.gen_count < 1:
            raise ValueError(f"need at least one generator, got {self.gen_count}")
        for i, j in self.forbidden:
            if not (1 <= i <= self.gen_count and 1 <= j <= self.gen_count):
                raise ValueError(f"forbidden pair ({i},{j}) outside 1..{self.gen_count}")

    def allows(self, i: int, j: int) -> bool:
        return (i, j) not in self.forbidden

    def is_valid_word(self, word: Sequence[int]) -> bool:
        if any(not 1 <= a <= self.gen_count for a in word):
            return False
        return all((a, b) not in self.forbidden for a, b in zip(word, word[1:]))

    def cache_key(self) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
        return (self.gen_count, tuple(sorted(self.forbidden)))


def nilpotent_presentation(m: int) -> QuadMonomialAlgebra:
    """N_m on x_i = E_{i,i+1}: x_i x_j = 0 unless j = i + 1"""
    if m < 2:
        raise ValueError(f"N_m needs m >= 2, got {m}")
    n = m - 1
    return QuadMonomialAlgebra(
        n, frozenset((i, j) for i in range(1, n + 1) for j in range(1, n + 1) if j != i + 1)
    )


def quadratic_dual(alg: QuadMonomialAlgebra) -> QuadMonomialAlgebra:
    n = alg.gen_count
    every = {(i, j) for i in range(1, n + 1) for j in range(1, n + 1)}
    return QuadMonomialAlgebra(n, frozenset(every - alg.forbidden))


def dual_of_nilpotent(m: int) -> QuadMonomialAlgebra:
    """N^! : y_i y_{i+1} = 0"""
    return quadratic_dual(nilpotent_presentation(m))


def _words(alg: QuadMonomialAlgebra, d: int) -> Iterator[Word]:
    stack: List[Word] = [()]
    while stack:
        word = stack.pop()
        if len(word) == d:
            yield word
            continue
        # reversed push keeps lexicographic output order
        for letter in range(alg.gen_count, 0, -1):
            if not word or alg.allows(word[-1], letter):
                stack.append(word + (letter,))


@cached_result(cache_key_func=lambda alg, d: ("basis_of_degree", alg.cache_key(), d))
def basis_of_degree(alg: QuadMonomialAlgebra, d: int) -> Tuple[Word, ...]:
    """Nonzero monomials of length d, lexicographic"""
    if d < 0:
        return ()
    return tuple(_words(alg, d))


def multiply_words(alg: QuadMonomialAlgebra, u: Word, v: Word) -> Optional[Word]:
    if u and v and not alg.allows(u[-1], v[0]):
        return None
    product = tuple(u) + tuple(v)
    return product if alg.is_valid_word(product) else None


def dual_basis(m: int, d: int) -> Tuple[Word, ...]:
    return basis_of_degree(dual_of_nilpotent(m), d)


def is_dual_word(m: int, word: Sequence[int]) -> bool:
    return all(1 <= a <= m - 1 for a in word) and all(b != a + 1 for a, b in zip(word, word[1:]))


# ---------------------------------------------------------------------------
# Truncated power series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolySeries:
    coefficients: Tuple[int, ...]
    truncation: int

    def __post_init__(self):
        if self.truncation < 0:
            raise ValueError("truncation must be non-negative")
        if len(self.coefficients) != self.truncation + 1:
            raise ValueError("coefficient count must equal truncation + 1")

    @classmethod
    def from_coefficients(cls, coeffs: Iterable[int], truncation: int) -> "PolySeries":
        padded = list(coeffs)[: truncation + 1]
        padded += [0] * (truncation + 1 - len(padded))
        return cls(tuple(padded), truncation)

    @classmethod
    def one(cls, truncation: int) -> "PolySeries":
        return cls.from_coefficients([1], truncation)

    def coefficient(self, k: int) -> int:
        if k > self.truncation:
            raise ValueError(f"coefficient {k} is beyond truncation {self.truncation}")
        return self.coefficients[k] if k >= 0 else 0

    def __add__(self, other: "PolySeries") -> "PolySeries":
        t = min(self.truncation, other.truncation)
        return PolySeries.from_coefficients(
            (self.coefficients[k] + other.coefficients[k] for k in range(t + 1)), t
        )

    def __mul__(self, other: "PolySeries") -> "PolySeries":
        t = min(self.truncation, other.truncation)
        out = [0] * (t + 1)
        for i in range(t + 1):
            a = self.coefficients[i]
            if a:
                for j in range(t + 1 - i):
                    out[i + j] += a * other.coefficients[j]
        return PolySeries(tuple(out), t)

    def scale(self, c: int) -> "PolySeries":
        return PolySeries(tuple(c * a for a in self.coefficients), self.truncation)

    def negate_variable(self) -> "PolySeries":
        """f(t) -> f(-t)"""
        return PolySeries(
            tuple(a if k % 2 == 0 else -a for k, a in enumerate(self.coefficients)), self.truncation
        )

    def inverse(self) -> "PolySeries":
        """Multiplicative inverse; the constant term must be +-1"""
        c0 = self.coefficients[0]
        if c0 not in (1, -1):
            raise ValueError(f"constant term {c0} is not a unit in Z")
        out = [c0]
        for n in range(1, self.truncation + 1):
            acc = sum(self.coefficients[k] * out[n - k] for k in range(1, n + 1))
            out.append(-c0 * acc)
        return PolySeries(tuple(out), self.truncation)


def series_f(m: int, truncation: int) -> PolySeries:
    """f(t) = 1 + sum_{k=1}^{m-1} (m-k) t^k"""
    return PolySeries.from_coefficients([1] + [m - k for k in range(1, m)], truncation)


def series_f_shriek(m: int, truncation: int) -> PolySeries:
    """f^!(t) = 1 / f(-t)"""
    return series_f(m, truncation).negate_variable().inverse()


def hilbert_series(alg: QuadMonomialAlgebra, truncation: int) -> PolySeries:
    return PolySeries.from_coefficients(
        (len(basis_of_degree(alg, d)) for d in range(truncation + 1)), truncation
    )


# ---------------------------------------------------------------------------
# phi and psi
# ---------------------------------------------------------------------------


class PhiMethod(Enum):
    ENUMERATE = "enumerate"
    RECURSION = "recursion"
    SERIES = "series"
    COMBINATORIAL = "combinatorial"


def _phi_enumerate(m: int, q: int) -> int:
    # walk the word automaton letter by letter, tracking the last letter
    n = m - 1
    ending = [1] * n
    for _ in range(q - 1):
        total = sum(ending)
        ending = [total - (ending[j - 2] if j >= 2 else 0) for j in range(1, n + 1)]
    return sum(ending)


def _phi_recursion(m: int, q: int) -> int:
    values = [1]
    for k in range(1, q + 1):
        values.append(
            sum((-1) ** (r - 1) * (m - r) * values[k - r] for r in range(1, m) if k - r >= 0)
        )
    return values[q]


def _compositions(n: int, largest: int) -> Iterator[Tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(1, min(n, largest) + 1):
        for rest in _compositions(n - first, largest):
            yield (first,) + rest


def _phi_combinatorial(m: int, q: int) -> int:
    total = 0
    for parts in _compositions(q, m - 1):
        product = 1
        for a in parts:
            product *= m - a
        total += (-1) ** len(parts) * product
    return (-1) ** q * total


def phi(m: int, q: int, method: PhiMethod = PhiMethod.RECURSION) -> int:
    """rank of N^!_q; zero for q < 0"""
    if m < 2:
        raise ValueError(f"phi needs m >= 2, got {m}")
    if q < 0:
        return 0
    if q == 0:
        return 1
    if method is PhiMethod.ENUMERATE:
        return _phi_enumerate(m, q)
    if method is PhiMethod.RECURSION:
        return _phi_recursion(m, q)
    if method is PhiMethod.SERIES:
        return series_f_shriek(m, q).coefficient(q)
    return _phi_combinatorial(m, q)


def phi_sequence(m: int, max_q: int, method: PhiMethod = PhiMethod.RECURSION) -> List[int]:
    return [phi(m, q, method) for q in range(max_q + 1)]


def psi_matrix(m: int) -> np.ndarray:
    """P[i][j] = 1 when y_{i+1} y_{j+1} != 0, so psi(q+1) = P psi(q)"""
    n = m - 1
    return np.array(
        [[0 if j == i + 1 else 1 for j in range(1, n + 1)] for i in range(1, n + 1)], dtype=object
    ).reshape(n, n)


def psi_vector(m: int, q: int) -> Tuple[int, ...]:
    """Counts of degree-q basis words of N^! by first letter"""
    if q < 1:
        raise ValueError(f"psi is defined for q >= 1, got {q}")
    matrix = psi_matrix(m)
    vec = np.ones(m - 1, dtype=object)
    for _ in range(q - 1):
        vec = matrix.dot(vec)
    return tuple(int(v) for v in vec)


@dataclass(frozen=True)
class LetterConstraint:
    position: str  # "first" | "last"
    op: str  # "eq" | "ne"
    letter: int

    def __post_init__(self):
        if self.position not in ("first", "last") or self.op not in ("eq", "ne"):
            raise ValueError(f"bad constraint {self}")

    def holds(self, word: Word) -> bool:
        if not word:
            return True
        a = word[0] if self.position == "first" else word[-1]
        return (a == self.letter) if self.op == "eq" else (a != self.letter)


def phi_constrained(m: int, q: int, constraints: Sequence[LetterConstraint] = ()) -> int:
    """Direct count of basis words of N^!_q satisfying every constraint"""
    if q < 0:
        return 0
    return sum(1 for w in dual_basis(m, q) if all(c.holds(w) for c in constraints))


def phi_first_letter_formula(m: int, q: int) -> int:
    """#{I : i_1 != 1} = sum_{r=0}^{m-1} (-1)^r phi(q - r), with value 1 at q = 0"""
    if q == 0:
        return 1
    return sum((-1) ** r * phi(m, q - r) for r in range(m))


def phi_last_letter_formula(m: int, q: int) -> int:
    """#{I : i_q != m-1}; equal to the first-letter count under i -> m - i reversal"""
    return phi_first_letter_formula(m, q)


def top_corner_count_formula(m: int, q: int) -> int:
    """#{I : i_1 != 1, i_q != m-1}"""
    return sum((-1) ** k * (k + 1) * phi(m, q - k) for k in range(m)) + (-1) ** m * phi(m, q - m + 1)


def generating_function_h(m: int, truncation: int) -> PolySeries:
    """h(t) = 1 + (m-2) f^!(t): Poincare series of HH(N_m, M_m/N_m)"""
    if m < 3:
        raise ValueError(f"h(t) is stated for m >= 3, got {m}")
    return PolySeries.one(truncation) + series_f_shriek(m, truncation).scale(m - 2)


def n_algebra_rank(m: int) -> int:
    return (m * m - m + 2) // 2


def nilpotent_basis(m: int) -> List[Word]:
    """Nonzero monomials of N_m: 1 and the paths x_i x_{i+1} ... x_{j-1}"""
    alg = nilpotent_presentation(m)
    out: List[Word] = []
    for d in range(m):
        out.extend(basis_of_degree(alg, d))
    return out
