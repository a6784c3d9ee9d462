"""
Bimodule Catalog - N_m-bimodules built from matrix units, their J-adic filtration and graded pieces
"""

import logging
from collections import defaultdict
from math import gcd
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

from hochschild.exactla import CoeffRing, IntMatrix, InvalidLayer, RingKind, invariant_factors, rank
from lib.cache_manager import cached_result

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class BasisLabel:
    """Matrix unit E_{i,j}; (0, 0) stands for the identity I_m"""

    i: int
    j: int

    @classmethod
    def identity(cls) -> "BasisLabel":
        return cls(0, 0)

    @property
    def is_identity(self) -> bool:
        return self.i == 0

    @property
    def degree(self) -> int:
        return 0 if self.is_identity else self.j - self.i

    def __str__(self) -> str:
        return "I" if self.is_identity else f"E{self.i},{self.j}"


IDENTITY = BasisLabel.identity()

Vector = Dict[BasisLabel, int]
MatrixElement = Dict[Tuple[int, int], int]


def _add(target: Dict, key, value: int):
    nv = target.get(key, 0) + value
    if nv:
        target[key] = nv
    else:
        target.pop(key, None)


@dataclass(frozen=True, eq=False)
class Bimodule:
    """Free Z-module on `labels` with generator actions x_k = E_{k,k+1}, k = 1..m-1.

    Action tables hold only nonzero images; ring extension happens when
    matrices are assembled.
    """

    m: int
    name: str
    labels: Tuple[BasisLabel, ...]
    left_action: Mapping[Tuple[int, BasisLabel], Mapping[BasisLabel, int]] = field(repr=False)
    right_action: Mapping[Tuple[int, BasisLabel], Mapping[BasisLabel, int]] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {label: n for n, label in enumerate(self.labels)})

    def index(self, label: BasisLabel) -> int:
        return self._index[label]  # type: ignore[attr-defined]

    def __contains__(self, label: BasisLabel) -> bool:
        return label in self._index  # type: ignore[attr-defined]

    def __len__(self) -> int:
        return len(self.labels)

    def degree(self, label: BasisLabel) -> int:
        return label.degree

    def labels_of_degree(self, d: int) -> Tuple[BasisLabel, ...]:
        return tuple(b for b in self.labels if b.degree == d)

    @property
    def degrees(self) -> List[int]:
        return sorted({b.degree for b in self.labels})

    def act_left(self, k: int, label: BasisLabel) -> Mapping[BasisLabel, int]:
        return self.left_action.get((k, label), {})

    def act_right(self, label: BasisLabel, k: int) -> Mapping[BasisLabel, int]:
        return self.right_action.get((k, label), {})

    def left_vector(self, k: int, vector: Mapping[BasisLabel, int]) -> Vector:
        out: Vector = {}
        for b, c in vector.items():
            for t, v in self.act_left(k, b).items():
                _add(out, t, c * v)
        return out

    def right_vector(self, vector: Mapping[BasisLabel, int], k: int) -> Vector:
        out: Vector = {}
        for b, c in vector.items():
            for t, v in self.act_right(b, k).items():
                _add(out, t, c * v)
        return out

    def unit_left(self, unit: BasisLabel, vector: Mapping[BasisLabel, int]) -> Vector:
        """E_{a,b} · v with E_{a,b} = x_a x_{a+1} ... x_{b-1}"""
        out = dict(vector)
        for k in range(unit.j - 1, unit.i - 1, -1):
            out = self.left_vector(k, out)
            if not out:
                break
        return out

    def unit_right(self, vector: Mapping[BasisLabel, int], unit: BasisLabel) -> Vector:
        out = dict(vector)
        for k in range(unit.i, unit.j):
            out = self.right_vector(out, k)
            if not out:
                break
        return out

    def restrict(self, name: str, keep: Sequence[BasisLabel]) -> "Bimodule":
        """Subquotient on `keep`: actions followed by projection onto `keep`"""
        keep_set = set(keep)
        left, right = {}, {}
        for (k, b), image in self.left_action.items():
            if b in keep_set:
                img = {t: v for t, v in image.items() if t in keep_set}
                if img:
                    left[(k, b)] = img
        for (k, b), image in self.right_action.items():
            if b in keep_set:
                img = {t: v for t, v in image.items() if t in keep_set}
                if img:
                    right[(k, b)] = img
        ordered = tuple(b for b in self.labels if b in keep_set)
        return Bimodule(self.m, name, ordered, left, right)


# ---------------------------------------------------------------------------
# Standard catalog
# ---------------------------------------------------------------------------


class StandardKind(Enum):
    N = "N"
    B = "B"
    M = "M"
    M_OVER_N = "M_over_N"
    B_OVER_N = "B_over_N"
    M_OVER_J = "M_over_J"
    R = "R"
    GR = "Gr"
    JPOW = "Jpow"


def _label_order(label: BasisLabel) -> Tuple[int, int]:
    return (label.degree, label.i)


def _embed(m: int, label: BasisLabel) -> MatrixElement:
    if label.is_identity:
        return {(i, i): 1 for i in range(1, m + 1)}
    return {(label.i, label.j): 1}


def _gen_left(k: int, element: MatrixElement) -> MatrixElement:
    # x_k E_{a,b} = E_{k,b} iff a = k + 1
    out: MatrixElement = {}
    for (a, b), c in element.items():
        if a == k + 1:
            _add(out, (k, b), c)
    return out


def _gen_right(element: MatrixElement, k: int) -> MatrixElement:
    # E_{a,b} x_k = E_{a,k+1} iff b = k
    out: MatrixElement = {}
    for (a, b), c in element.items():
        if b == k:
            _add(out, (a, k + 1), c)
    return out


def _reducer(m: int, kind: StandardKind, p: int) -> Tuple[List[BasisLabel], Callable[[MatrixElement], Vector]]:
    units = [BasisLabel(i, j) for i in range(1, m + 1) for j in range(1, m + 1)]

    def keep_units(predicate):
        def reduce(element: MatrixElement) -> Vector:
            return {BasisLabel(i, j): c for (i, j), c in element.items() if predicate(i, j) and c}

        return reduce

    def with_identity(upper_from: int):
        # c·I + units above the diagonal at distance >= upper_from
        def reduce(element: MatrixElement) -> Vector:
            out = {BasisLabel(i, j): c for (i, j), c in element.items() if j - i >= upper_from and c}
            if element.get((1, 1)):
                out[IDENTITY] = element[(1, 1)]
            return out

        return reduce

    def diag_mod_identity(extra):
        # diag(d_1..d_m) -> sum_{i>=2} (d_i - d_1) E_ii, plus whatever `extra` keeps
        def reduce(element: MatrixElement) -> Vector:
            out = {BasisLabel(i, j): c for (i, j), c in element.items() if i != j and extra(i, j) and c}
            d1 = element.get((1, 1), 0)
            for i in range(2, m + 1):
                v = element.get((i, i), 0) - d1
                if v:
                    out[BasisLabel(i, i)] = v
            return out

        return reduce

    if kind is StandardKind.N or (kind is StandardKind.JPOW and p == 0):
        labels = [IDENTITY] + [u for u in units if u.i < u.j]
        return labels, with_identity(1)
    if kind is StandardKind.B:
        return [u for u in units if u.i <= u.j], keep_units(lambda i, j: i <= j)
    if kind is StandardKind.M:
        return units, keep_units(lambda i, j: True)
    if kind is StandardKind.M_OVER_N:
        labels = [u for u in units if u.i > u.j] + [BasisLabel(i, i) for i in range(2, m + 1)]
        return labels, diag_mod_identity(lambda i, j: i > j)
    if kind is StandardKind.B_OVER_N:
        return [BasisLabel(i, i) for i in range(2, m + 1)], diag_mod_identity(lambda i, j: False)
    if kind is StandardKind.M_OVER_J:
        return [u for u in units if u.i >= u.j], keep_units(lambda i, j: i >= j)
    if kind is StandardKind.R:
        return [IDENTITY], with_identity(m + 1)
    if kind is StandardKind.GR:
        if not -(m - 1) <= p <= m - 1:
            raise InvalidLayer(f"Gr^{p}(M_{m}) needs -(m-1) <= p <= m-1")
        return [u for u in units if u.j - u.i == p], keep_units(lambda i, j: j - i == p)
    if kind is StandardKind.JPOW:
        if not 0 <= p <= m - 1:
            raise InvalidLayer(f"J^{p} of N_{m} needs 0 <= p <= m-1")
        return [u for u in units if u.j - u.i >= p], keep_units(lambda i, j: j - i >= p)
    raise ValueError(f"unknown bimodule kind {kind}")


def parse_kind(which: Union[str, StandardKind]) -> StandardKind:
    if isinstance(which, StandardKind):
        return which
    try:
        return StandardKind(which)
    except ValueError:
        aliases = {"M/N": StandardKind.M_OVER_N, "B/N": StandardKind.B_OVER_N, "M/J": StandardKind.M_OVER_J}
        if which in aliases:
            return aliases[which]
        raise


def embed_label(m: int, label: BasisLabel) -> MatrixElement:
    """The m x m matrix a label stands for"""
    return _embed(m, label)


def reduce_matrix_element(
    m: int, which: Union[str, StandardKind], element: MatrixElement, p: Optional[int] = None
) -> Vector:
    """Coordinates of a matrix in the label basis of `which`; components outside it are dropped"""
    return _reducer(m, parse_kind(which), p or 0)[1](element)


@cached_result(cache_key_func=lambda m, which, p=None: ("standard_bimodule", m, str(which), p))
def standard_bimodule(m: int, which: Union[str, StandardKind], p: Optional[int] = None) -> Bimodule:
    """The named N_m-bimodule with its canonical label basis"""
    if m < 2:
        raise ValueError(f"bimodules of N_m need m >= 2, got {m}")
    kind = parse_kind(which)
    if kind in (StandardKind.GR, StandardKind.JPOW) and p is None:
        raise InvalidLayer(f"{kind.value} needs a layer index")
    labels, reduce = _reducer(m, kind, p or 0)
    labels = sorted(labels, key=_label_order)

    left: Dict[Tuple[int, BasisLabel], Vector] = {}
    right: Dict[Tuple[int, BasisLabel], Vector] = {}
    for b in labels:
        element = _embed(m, b)
        for k in range(1, m):
            img = reduce(_gen_left(k, element))
            if img:
                left[(k, b)] = img
            img = reduce(_gen_right(element, k))
            if img:
                right[(k, b)] = img

    name = kind.value if p is None else f"{kind.value}({p})"
    logger.debug(f"Built bimodule {name} for m={m}: {len(labels)} labels")
    return Bimodule(m, name, tuple(labels), left, right)


def multiply_n_labels(a: BasisLabel, b: BasisLabel) -> Optional[BasisLabel]:
    """Product in N_m of two labels; None when it vanishes"""
    if a.is_identity:
        return b
    if b.is_identity:
        return a
    return BasisLabel(a.i, b.j) if a.j == b.i else None


def check_bimodule_axioms(mod: Bimodule) -> List[str]:
    """Violations of grading, relations and left/right commutation (empty when valid)"""
    problems: List[str] = []
    m = mod.m
    for b in mod.labels:
        for k in range(1, m):
            for side, img in (("left", mod.act_left(k, b)), ("right", mod.act_right(b, k))):
                for t in img:
                    if t.degree != b.degree + 1:
                        problems.append(f"{side} x{k} on {b} lands in degree {t.degree}")
            for l in range(1, m):
                if l + 1 != k and mod.left_vector(l, mod.act_left(k, b)):
                    problems.append(f"x{l} x{k} acts nontrivially on the left of {b}")
                if k + 1 != l and mod.right_vector(mod.act_right(b, k), l):
                    problems.append(f"x{k} x{l} acts nontrivially on the right of {b}")
                lhs = mod.left_vector(k, mod.act_right(b, l))
                rhs = mod.right_vector(mod.act_left(k, b), l)
                if lhs != rhs:
                    problems.append(f"(x{k} {b}) x{l} != x{k} ({b} x{l})")
    return problems


# ---------------------------------------------------------------------------
# Filtrations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FilteredBimodule:
    """Descending layers F^offset ⊇ F^{offset+1} ⊇ ... ending in the empty set"""

    underlying: Bimodule
    layers: Tuple[FrozenSet[BasisLabel], ...]
    offset: int

    def layer(self, p: int) -> FrozenSet[BasisLabel]:
        if p < self.offset:
            return frozenset(self.underlying.labels)
        k = p - self.offset
        return self.layers[k] if k < len(self.layers) else frozenset()

    @property
    def layer_range(self) -> range:
        return range(self.offset, self.offset + len(self.layers))


def _span_is_label_set(mod: Bimodule, images: List[Vector], support: FrozenSet[BasisLabel]) -> bool:
    if not support:
        return True
    ordered = sorted(support, key=_label_order)
    index = {b: n for n, b in enumerate(ordered)}
    matrix = IntMatrix.from_columns(len(ordered), [{index[b]: c for b, c in v.items()} for v in images])
    if rank(matrix, CoeffRing.rationals()) != len(ordered):
        return False
    factors = invariant_factors(matrix)
    return all(f == 1 for f in factors)


def j_adic_filtration(mod: Bimodule) -> FilteredBimodule:
    """J̄^p M = sum_{a+b=p} J^a M J^b, reindexed so that layer indices start at the lowest label degree"""
    current = frozenset(mod.labels)
    layers = [current]
    while current:
        images: List[Vector] = []
        for b in sorted(current, key=_label_order):
            for k in range(1, mod.m):
                for img in (mod.act_left(k, b), mod.act_right(b, k)):
                    if img:
                        images.append(dict(img))
        support = frozenset(t for v in images for t in v)
        if not _span_is_label_set(mod, images, support):
            raise ValueError(f"J-adic layer of {mod.name} is not spanned by basis labels")
        current = support
        layers.append(current)
        if len(layers) > 2 * mod.m + 1:
            raise RuntimeError(f"J-adic filtration of {mod.name} failed to terminate")
    offset = min((b.degree for b in mod.labels), default=0)
    return FilteredBimodule(mod, tuple(layers), offset)


def graded_piece(filtered: FilteredBimodule, p: int) -> Bimodule:
    """Gr^p = F^p / F^{p+1} as a bimodule on the label difference"""
    m = filtered.underlying.m
    if not -(m - 1) <= p <= m - 1:
        raise InvalidLayer(f"layer {p} outside -(m-1)..m-1 for m={m}")
    keep = filtered.layer(p) - filtered.layer(p + 1)
    ordered = [b for b in filtered.underlying.labels if b in keep]
    return filtered.underlying.restrict(f"Gr^{p}({filtered.underlying.name})", ordered)


@cached_result(cache_key_func=lambda m, which, p: ("graded_piece_of", m, str(which), p))
def graded_piece_of(m: int, which: Union[str, StandardKind], p: int) -> Bimodule:
    return graded_piece(j_adic_filtration(standard_bimodule(m, which)), p)


# ---------------------------------------------------------------------------
# Normalizer and tangent dimension
# ---------------------------------------------------------------------------


def _commutator_entry(m: int, k: int, i: int, j: int) -> Dict[int, int]:
    # [A, x_k]_{ij} = a_{i,k} [j = k+1] - [i = k] a_{k+1,j}, over variables a_{rs} -> (r-1)m + (s-1)
    entry: Dict[int, int] = defaultdict(int)
    if j == k + 1:
        entry[(i - 1) * m + (k - 1)] += 1
    if i == k:
        entry[k * m + (j - 1)] -= 1
    return {c: v for c, v in entry.items() if v}


def _normalizer_system(m: int) -> IntMatrix:
    """Rows: linear conditions on A = (a_ij) making [A, x_k] lie in N_m for every k"""
    rows: List[Dict[int, int]] = []
    for k in range(1, m):
        for i in range(1, m + 1):
            for j in range(1, i):
                row = _commutator_entry(m, k, i, j)
                if row:
                    rows.append(row)
        first = _commutator_entry(m, k, 1, 1)
        for i in range(2, m + 1):
            row = dict(_commutator_entry(m, k, i, i))
            for c, v in first.items():
                _add(row, c, -v)
            if row:
                rows.append(row)

    sparse = {(r, c): v for r, row in enumerate(rows) for c, v in row.items()}
    return IntMatrix.from_dict(len(rows), m * m, sparse)


def normalizer_dimension(m: int, ring: CoeffRing) -> int:
    """Rank of {A in M_m : [A, N_m] ⊆ N_m} solved as a linear system over `ring`"""
    if m < 2:
        raise ValueError(f"normalizer needs m >= 2, got {m}")
    system = _normalizer_system(m)
    if ring.kind is RingKind.INTEGERS_MOD:
        # kernel of the system mod N: free directions plus one cyclic summand per factor sharing a prime with N
        factors = invariant_factors(system)
        return (m * m - len(factors)) + sum(1 for d in factors if gcd(d, ring.modulus) > 1)
    return m * m - rank(system, ring)


def tangent_dimension(m: int) -> int:
    """dim HH^1(N_m, M_m/N_m) + m^2 - dim N(N_m), all computed over Q"""
    if m < 3:
        raise ValueError(f"tangent dimension is stated for m >= 3, got {m}")
    from hochschild.homology import hochschild

    hh1 = hochschild(m, standard_bimodule(m, StandardKind.M_OVER_N), CoeffRing.rationals(), 1)
    value = hh1.free_rank + m * m - normalizer_dimension(m, CoeffRing.rationals())
    logger.info(f"Tangent dimension for m={m}: {value}")
    return value
