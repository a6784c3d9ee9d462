"""
Hochschild Cohomology Engine - Koszul and reduced bar cochain complexes, blockwise by internal degree

Internal degree of a cochain: s = (degree of its arguments) - (degree of its value),
where a word of N^! or a tuple of matrix units has the degree of the product
and a label E_{i,j} has degree j - i. Every differential preserves s, so all
matrices are assembled and reduced one (p, s) block at a time.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from hochschild.bimod import BasisLabel, Bimodule, StandardKind, parse_kind, standard_bimodule
from hochschild.exactla import (
    CoeffRing,
    DimensionBudgetExceeded,
    FinAbGroup,
    IntMatrix,
    cohomology_of_pair,
)
from hochschild.qma import (
    Word,
    dual_basis,
    multiply_words,
    nilpotent_basis,
    nilpotent_presentation,
    phi,
    top_corner_count_formula,
)
from lib.cache_manager import cache_manager
from lib.config import settings

logger = logging.getLogger(__name__)

Unit = BasisLabel
BarTuple = Tuple[BasisLabel, ...]


class Model(Enum):
    KOSZUL = "koszul"
    BAR = "bar"


class GradedCochainComplex:
    """Cochain complex of free Z-modules split into internal-degree blocks.

    Subclasses supply `_block_basis(p, s)`, `_image(p, element)` and
    `internal_degrees(p)`; bases and differentials are memoised in the global
    cache under `cache_tag`.
    """

    model: Model

    def __init__(self, m: int, coeff: Bimodule, max_degree: int):
        if max_degree < 0:
            raise ValueError(f"max_degree must be non-negative, got {max_degree}")
        self.m = m
        self.coeff = coeff
        self.max_degree = max_degree

    @property
    def cache_tag(self) -> Tuple:
        return (self.model.value, self.m, self.coeff.name, len(self.coeff))

    # -- to be provided by subclasses ------------------------------------------------

    def _block_basis(self, p: int, s: int) -> Tuple:
        raise NotImplementedError

    def _image(self, p: int, element) -> Dict:
        raise NotImplementedError

    def internal_degrees(self, p: int) -> List[int]:
        raise NotImplementedError

    # -- shared machinery -------------------------------------------------------------

    def differential_of(self, p: int, element) -> Dict:
        """d of one basis cochain of degree p, as a sparse combination in degree p + 1"""
        return self._image(p, element)

    def block_basis(self, p: int, s: int) -> Tuple:
        if p < 0:
            return ()
        key = cache_manager._generate_key((self.cache_tag, "basis", p, s))
        basis = cache_manager.get(key)
        if basis is None:
            basis = self._block_basis(p, s)
            cache_manager.set(key, basis, namespace=self.model.value)
        return basis

    def block_index(self, p: int, s: int) -> Dict:
        key = cache_manager._generate_key((self.cache_tag, "index", p, s))
        index = cache_manager.get(key)
        if index is None:
            index = {e: n for n, e in enumerate(self.block_basis(p, s))}
            cache_manager.set(key, index, namespace=self.model.value)
        return index

    def dimension(self, p: int) -> int:
        return sum(len(self.block_basis(p, s)) for s in self.internal_degrees(p))

    def differential_block(self, p: int, s: int) -> IntMatrix:
        """d: C^{p,s} -> C^{p+1,s}; p = -1 gives the zero map into C^0"""
        if p < 0:
            return IntMatrix.zero(len(self.block_basis(0, s)), 0)
        key = cache_manager._generate_key((self.cache_tag, "d", p, s))
        cached = cache_manager.get(key)
        if cached is not None:
            return cached
        source = self.block_basis(p, s)
        target = self.block_index(p + 1, s)
        triplets = []
        for col, element in enumerate(source):
            for image, coeff in self._image(p, element).items():
                triplets.append((target[image], col, coeff))
        matrix = IntMatrix.from_triplets(len(target), len(source), triplets)
        logger.debug(f"{self.model.value} d^{p} block s={s}: {matrix.rows}x{matrix.cols}, nnz={matrix.nnz}")
        cache_manager.set(key, matrix, namespace=self.model.value)
        return matrix

    def cohomology_block(self, n: int, s: int, ring: CoeffRing) -> FinAbGroup:
        return cohomology_of_pair(self.differential_block(n - 1, s), self.differential_block(n, s), ring)

    def cohomology(self, n: int, ring: CoeffRing) -> FinAbGroup:
        total = FinAbGroup()
        for s in self.internal_degrees(n):
            total = total.direct_sum(self.cohomology_block(n, s, ring))
        return total

    def verify_square_zero(self, max_p: Optional[int] = None) -> bool:
        top = self.max_degree if max_p is None else max_p
        for p in range(top):
            for s in self.internal_degrees(p):
                if not self.differential_block(p + 1, s).matmul(self.differential_block(p, s)).is_zero():
                    logger.warning(f"d^{p + 1} d^{p} != 0 in block s={s}")
                    return False
        return True


class KoszulCochainComplex(GradedCochainComplex):
    """C^p = N^!_p ⊗ M with d(w⊗b) = sum_k y_k w ⊗ x_k b + (-1)^{p+1} sum_k w y_k ⊗ b x_k"""

    model = Model.KOSZUL

    def internal_degrees(self, p: int) -> List[int]:
        return sorted({p - d for d in self.coeff.degrees})

    def _block_basis(self, p: int, s: int) -> Tuple[Tuple[Word, BasisLabel], ...]:
        labels = self.coeff.labels_of_degree(p - s)
        if not labels:
            return ()
        return tuple((w, b) for w in dual_basis(self.m, p) for b in labels)

    def _image(self, p: int, element: Tuple[Word, BasisLabel]) -> Dict[Tuple[Word, BasisLabel], int]:
        w, b = element
        out: Dict[Tuple[Word, BasisLabel], int] = {}
        sign = -1 if p % 2 == 0 else 1
        for k in range(1, self.m):
            if not w or w[0] != k + 1:
                for t, v in self.coeff.act_left(k, b).items():
                    key = ((k,) + w, t)
                    out[key] = out.get(key, 0) + v
            if not w or k != w[-1] + 1:
                for t, v in self.coeff.act_right(b, k).items():
                    key = (w + (k,), t)
                    out[key] = out.get(key, 0) + sign * v
        return {k: v for k, v in out.items() if v}

    def term_dimension(self, p: int) -> int:
        return len(dual_basis(self.m, p)) * len(self.coeff)


def bar_units(m: int) -> Tuple[Unit, ...]:
    """Basis of N̄ = N/R·I: the strictly upper matrix units"""
    return tuple(sorted((BasisLabel(a, b) for a in range(1, m + 1) for b in range(a + 1, m + 1)), key=lambda u: (u.degree, u.i)))


def _tuples_of_degree(units: Sequence[Unit], length: int, degree: int) -> Iterator[BarTuple]:
    if length == 0:
        if degree == 0:
            yield ()
        return
    for u in units:
        if u.degree <= degree - (length - 1):
            for rest in _tuples_of_degree(units, length - 1, degree - u.degree):
                yield (u,) + rest


class BarCochainComplex(GradedCochainComplex):
    """Normalized bar cochains Hom(N̄^{⊗p}, M) on the dual basis (tuple ⊗ label)"""

    model = Model.BAR

    def __init__(self, m: int, coeff: Bimodule, max_degree: int, budget: Optional[int] = None):
        super().__init__(m, coeff, max_degree)
        self.units = bar_units(m)
        limit = settings.bar_max_dimension if budget is None else budget
        for p in range(max_degree + 1):
            size = len(self.units) ** p * len(coeff)
            if size > limit:
                raise DimensionBudgetExceeded(
                    f"bar term C^{p} for m={m}, {coeff.name} has dimension {size} > {limit}"
                )

    def internal_degrees(self, p: int) -> List[int]:
        if p == 0:
            return sorted({-d for d in self.coeff.degrees})
        low, high = p, p * (self.m - 1)
        return sorted({t - d for t in range(low, high + 1) for d in self.coeff.degrees})

    def _block_basis(self, p: int, s: int) -> Tuple[Tuple[BarTuple, BasisLabel], ...]:
        out = []
        for b in self.coeff.labels:
            for t in _tuples_of_degree(self.units, p, s + b.degree):
                out.append((t, b))
        return tuple(sorted(out, key=lambda e: (tuple((u.i, u.j) for u in e[0]), e[1])))

    def _image(self, p: int, element: Tuple[BarTuple, BasisLabel]) -> Dict[Tuple[BarTuple, BasisLabel], int]:
        t, b = element
        out: Dict[Tuple[BarTuple, BasisLabel], int] = {}

        def bump(key, v):
            nv = out.get(key, 0) + v
            if nv:
                out[key] = nv
            else:
                out.pop(key, None)

        for a in self.units:
            for target, v in self.coeff.unit_left(a, {b: 1}).items():
                bump(((a,) + t, target), v)
        for j, unit in enumerate(t):
            sign = -1 if (j + 1) % 2 else 1
            for y in range(unit.i + 1, unit.j):
                split = t[:j] + (BasisLabel(unit.i, y), BasisLabel(y, unit.j)) + t[j + 1 :]
                bump((split, b), sign)
        end_sign = -1 if p % 2 == 0 else 1
        for a in self.units:
            for target, v in self.coeff.unit_right({b: 1}, a).items():
                bump((t + (a,), target), end_sign * v)
        return out

    def term_dimension(self, p: int) -> int:
        return len(self.units) ** p * len(self.coeff)


def koszul_complex(m: int, coeff: Bimodule, max_degree: int) -> KoszulCochainComplex:
    return KoszulCochainComplex(m, coeff, max_degree)


def bar_complex(m: int, coeff: Bimodule, max_degree: int) -> BarCochainComplex:
    return BarCochainComplex(m, coeff, max_degree)


def _complex(m: int, coeff: Bimodule, max_degree: int, model: Model) -> GradedCochainComplex:
    if model is Model.BAR:
        return bar_complex(m, coeff, max_degree)
    return koszul_complex(m, coeff, max_degree)


def hochschild(
    m: int, coeff: Bimodule, ring: CoeffRing, n: int, model: Model = Model.KOSZUL
) -> FinAbGroup:
    """HH^n(N_m, coeff) over ring"""
    if n < 0:
        raise ValueError(f"cohomological degree must be non-negative, got {n}")
    return _complex(m, coeff, n + 1, model).cohomology(n, ring)


@dataclass(frozen=True)
class BigradedTable:
    entries: Dict[Tuple[int, int], FinAbGroup]
    totals: Dict[int, FinAbGroup]

    def get(self, n: int, s: int) -> FinAbGroup:
        return self.entries.get((n, s), FinAbGroup())

    def support(self) -> List[Tuple[int, int]]:
        return sorted(k for k, g in self.entries.items() if not g.is_trivial)

    def to_dict(self) -> Dict[str, object]:
        return {
            "entries": [
                {"n": n, "s": s, **self.entries[(n, s)].to_dict()} for n, s in self.support()
            ],
            "totals": {str(n): g.to_dict() for n, g in sorted(self.totals.items())},
        }


def hochschild_bigraded(
    m: int, coeff: Bimodule, ring: CoeffRing, max_n: int, model: Model = Model.KOSZUL
) -> BigradedTable:
    complex_ = _complex(m, coeff, max_n + 1, model)
    entries: Dict[Tuple[int, int], FinAbGroup] = {}
    totals: Dict[int, FinAbGroup] = {}
    for n in range(max_n + 1):
        total = FinAbGroup()
        for s in complex_.internal_degrees(n):
            group = complex_.cohomology_block(n, s, ring)
            if not group.is_trivial:
                entries[(n, s)] = group
            total = total.direct_sum(group)
        totals[n] = total
    return BigradedTable(entries, totals)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def _target(which) -> StandardKind:
    return parse_kind(which)


def hh_rank_formula(m: int, target, n: int) -> int:
    """Predicted rank of HH^n(N_m, target) computed from phi alone"""
    if m < 3 or n < 0:
        raise ValueError(f"rank formulas need m >= 3 and n >= 0, got m={m}, n={n}")
    kind = _target(target)
    f = lambda q: phi(m, q)  # noqa: E731
    if kind is StandardKind.M_OVER_N:
        return m - 1 if n == 0 else (m - 2) * f(n)
    if kind is StandardKind.M_OVER_J:
        return m if n == 0 else (m - 1) * f(n)
    if kind is StandardKind.B_OVER_N:
        return (m - 1) * f(n)
    if kind is StandardKind.R:
        return f(n)
    if kind is StandardKind.B:
        return (
            2 * f(n)
            + (-1) ** (m - 1) * (m - 1) * f(n - m + 1)
            + sum((-1) ** k * (k + 1) * f(n - k) for k in range(1, m - 1))
        )
    if kind is StandardKind.N:
        if n == 0:
            return 2
        if n == 1:
            return 2 * m - 4
        return (
            f(n)
            + (m - 4) * f(n - 1)
            + (-1) ** m * f(n - m + 1)
            + sum((-1) ** k * (k + 1) * f(n - k) for k in range(2, m))
        )
    raise ValueError(f"no closed form for target {kind.value}")


def m_over_n_rank_alternating(m: int, n: int) -> int:
    """(m-1)phi(n) + sum_{k=1}^{m-1} (-1)^{m+k} k phi(n-m+k)"""
    return (m - 1) * phi(m, n) + sum((-1) ** (m + k) * k * phi(m, n - m + k) for k in range(1, m))


def bigraded_rank_formula(m: int, target, n: int, s: int) -> int:
    """Predicted rank of HH^{n,s}(N_m, target)"""
    kind = _target(target)
    if kind in (StandardKind.R, StandardKind.M_OVER_N, StandardKind.M_OVER_J, StandardKind.B_OVER_N):
        return hh_rank_formula(m, kind, n) if s == n else 0
    if kind is StandardKind.B:
        value = phi(m, n) if s == n else 0
        if s == n - (m - 1):
            value += top_corner_count_formula(m, n)
        return value
    if kind is StandardKind.N:
        value = 0
        if (n, s) == (0, 0):
            value += 1
        if (n, s) == (1, 0):
            value += m - 1
        if n == s + 1 and s != 0:
            value += (m - 2) * phi(m, s)
        if n == s + m - 1:
            value += top_corner_count_formula(m, n)
        return value
    raise ValueError(f"no bigraded closed form for target {kind.value}")


# ---------------------------------------------------------------------------
# Resolution acyclicity and Euler characteristics
# ---------------------------------------------------------------------------


def _bimodule_resolution_basis(m: int, i: int) -> List[Tuple[Word, Word, Word]]:
    paths = nilpotent_basis(m)
    return [(u, w, v) for u in paths for w in dual_basis(m, i) for v in paths]


def koszul_resolution_differential(m: int, i: int) -> IntMatrix:
    """K̂_i -> K̂_{i-1}; for i = 0 the augmentation N ⊗ N -> N"""
    alg = nilpotent_presentation(m)
    source = _bimodule_resolution_basis(m, i)
    if i == 0:
        paths = nilpotent_basis(m)
        target = {p: n for n, p in enumerate(paths)}
        triplets = []
        for col, (u, _, v) in enumerate(source):
            product = multiply_words(alg, u, v)
            if product is not None:
                triplets.append((target[product], col, 1))
        return IntMatrix.from_triplets(len(paths), len(source), triplets)

    target = {e: n for n, e in enumerate(_bimodule_resolution_basis(m, i - 1))}
    sign = 1 if i % 2 == 0 else -1
    triplets = []
    for col, (u, w, v) in enumerate(source):
        left = multiply_words(alg, u, (w[0],))
        if left is not None:
            triplets.append((target[(left, w[1:], v)], col, 1))
        right = multiply_words(alg, (w[-1],), v)
        if right is not None:
            triplets.append((target[(u, w[:-1], right)], col, sign))
    return IntMatrix.from_triplets(len(target), len(source), triplets)


def resolution_homology(m: int, i: int) -> FinAbGroup:
    """Homology of the augmented Koszul bimodule complex at K̂_i over Z"""
    d_out = koszul_resolution_differential(m, i)
    d_in = koszul_resolution_differential(m, i + 1)
    return cohomology_of_pair(d_in, d_out, CoeffRing.integers())


def euler_characteristic(m: int, d: int) -> int:
    """sum_n (-1)^n dim C̄^{n,d}(N_m, R) over the bar model"""
    units = bar_units(m)
    return sum((-1) ** n * sum(1 for _ in _tuples_of_degree(units, n, d)) for n in range(d + 1))


def euler_characteristic_check(m: int, d: int) -> bool:
    return euler_characteristic(m, d) == (-1) ** d * phi(m, d)


def coefficient_module(m: int, target) -> Bimodule:
    return standard_bimodule(m, _target(target))
