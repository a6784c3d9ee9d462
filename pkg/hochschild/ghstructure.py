"""
Gerstenhaber Structure - Cocycle representatives, canonical basis, cup products and brackets on HH*(N_m, N_m)

Cochains live in the normalized bar model: a SparseCochain is a finite sum of
dual basis elements (tuple of strictly upper matrix units) ⊗ (label of N_m).
Classes are identified by restricting to tuples of generators, which is the
comparison map onto the Koszul complex, and solving there against boundaries
plus the canonical basis.
"""

import logging
import re
import sys
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from hochschild.bimod import IDENTITY, BasisLabel, StandardKind, multiply_n_labels, standard_bimodule
from hochschild.exactla import (
    CoeffRing,
    EchelonReducer,
    ExpressionSyntaxError,
    HochschildError,
    InvalidIndex,
    NotACocycle,
    RingKind,
    UnsupportedPair,
    solve_linear,
)
from hochschild.homology import BarCochainComplex, BarTuple, KoszulCochainComplex, hochschild_bigraded
from hochschild.qma import Word, dual_basis, is_dual_word, phi
from hochschild.specseq import t_plus, top_corner_basis
from lib.cache_manager import cached_result
from lib.performance_tracker import benchmark_speed

logger = logging.getLogger(__name__)

CochainKey = Tuple[BarTuple, BasisLabel]


# ---------------------------------------------------------------------------
# Cochains
# ---------------------------------------------------------------------------


def _bump(out: Dict, key, value):
    nv = out.get(key, 0) + value
    if nv:
        out[key] = nv
    else:
        out.pop(key, None)


def _generator(k: int) -> BasisLabel:
    return BasisLabel(k, k + 1)


@dataclass(frozen=True, eq=False)
class SparseCochain:
    """Normalized bar cochain of degree `degree`; terms map (tuple, value label) to an integer"""

    m: int
    degree: int
    terms: Mapping[CochainKey, int] = field(default_factory=dict)

    def __post_init__(self):
        for (t, b), v in self.terms.items():
            if len(t) != self.degree:
                raise ValueError(f"tuple {t} does not have length {self.degree}")
            if any(u.is_identity or u.i >= u.j for u in t):
                raise ValueError(f"tuple {t} is not normalized")
            if v == 0:
                raise ValueError("zero coefficients must be dropped")

    @classmethod
    def from_terms(cls, m: int, degree: int, terms: Iterable[Tuple[CochainKey, int]]) -> "SparseCochain":
        acc: Dict[CochainKey, int] = {}
        for key, v in terms:
            _bump(acc, key, v)
        return cls(m, degree, acc)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseCochain):
            return NotImplemented
        return (self.m, self.degree, dict(self.terms)) == (other.m, other.degree, dict(other.terms))

    def __add__(self, other: "SparseCochain") -> "SparseCochain":
        if (self.m, self.degree) != (other.m, other.degree):
            raise ValueError("cannot add cochains of different size or degree")
        return SparseCochain.from_terms(self.m, self.degree, list(self.terms.items()) + list(other.terms.items()))

    def scale(self, c: int) -> "SparseCochain":
        return SparseCochain.from_terms(self.m, self.degree, ((k, c * v) for k, v in self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (t, b), v in sorted(self.terms.items(), key=lambda kv: (tuple((u.i, u.j) for u in kv[0][0]), kv[0][1])):
            args = ",".join(str(u) for u in t)
            parts.append(f"{v:+d}*[{args}]->{b}")
        return " ".join(parts)


@cached_result(cache_key_func=lambda m: ("bar_engine", m))
def _bar_engine(m: int) -> BarCochainComplex:
    # only single-cochain differentials are evaluated, never whole terms
    return BarCochainComplex(m, standard_bimodule(m, StandardKind.N), 0, budget=sys.maxsize)


def coboundary(x: SparseCochain) -> SparseCochain:
    engine = _bar_engine(x.m)
    acc: Dict[CochainKey, int] = {}
    for key, v in x.terms.items():
        for image, w in engine.differential_of(x.degree, key).items():
            _bump(acc, image, v * w)
    return SparseCochain(x.m, x.degree + 1, acc)


def is_cocycle(x: SparseCochain) -> bool:
    return coboundary(x).is_zero()


def _check_letters(m: int, word: Sequence[int]):
    if any(not 1 <= a <= m - 1 for a in word):
        raise InvalidIndex(f"letters of {tuple(word)} must lie in 1..{m - 1}")


def cocycle_a(m: int, i: int, word: Sequence[int], strict: bool = True) -> SparseCochain:
    """sum_{k<i} E*_{k,i} E*_I ⊗ E_{k,i} - (-1)^{|I|} sum_{k>i} E*_I E*_{i,k} ⊗ E_{i,k}

    With strict=False any word in the letters 1..m-1 is accepted; splicing
    formulas produce such words and their classes vanish when y_I = 0.
    """
    word = tuple(word)
    if not 1 <= i <= m:
        raise InvalidIndex(f"a(i, I) needs 1 <= i <= {m}, got {i}")
    _check_letters(m, word)
    if strict and not is_dual_word(m, word):
        raise InvalidIndex(f"{word} is not a basis word of N^! for m={m}")
    gens = tuple(_generator(k) for k in word)
    sign = -1 if len(word) % 2 == 0 else 1
    terms: List[Tuple[CochainKey, int]] = []
    for k in range(1, i):
        unit = BasisLabel(k, i)
        terms.append((((unit,) + gens, unit), 1))
    for k in range(i + 1, m + 1):
        unit = BasisLabel(i, k)
        terms.append(((gens + (unit,), unit), sign))
    return SparseCochain.from_terms(m, len(word) + 1, terms)


def cocycle_d(m: int, word: Sequence[int]) -> SparseCochain:
    """E*_J ⊗ E_{1,m}"""
    word = tuple(word)
    _check_letters(m, word)
    gens = tuple(_generator(k) for k in word)
    return SparseCochain(m, len(word), {(gens, BasisLabel(1, m)): 1})


def cocycle_one(m: int) -> SparseCochain:
    return SparseCochain(m, 0, {((), IDENTITY): 1})


def cocycle_f(p: int) -> SparseCochain:
    """f_p(x^{⊗p}) = I_2"""
    return SparseCochain(2, p, {(tuple(_generator(1) for _ in range(p)), IDENTITY): 1})


def cocycle_g(p: int) -> SparseCochain:
    """g_p(x^{⊗p}) = E_{1,2}"""
    return SparseCochain(2, p, {(tuple(_generator(1) for _ in range(p)), BasisLabel(1, 2)): 1})


# ---------------------------------------------------------------------------
# Operations on cochains
# ---------------------------------------------------------------------------


def cup_cochains(x: SparseCochain, y: SparseCochain) -> SparseCochain:
    """(x ∪ y)(a_1..a_{p+q}) = x(a_1..a_p) y(a_{p+1}..a_{p+q})"""
    if x.m != y.m:
        raise ValueError("cochains over different N_m")
    acc: Dict[CochainKey, int] = {}
    for (t1, b1), v1 in x.terms.items():
        for (t2, b2), v2 in y.terms.items():
            b = multiply_n_labels(b1, b2)
            if b is not None:
                _bump(acc, (t1 + t2, b), v1 * v2)
    return SparseCochain(x.m, x.degree + y.degree, acc)


def circle_product(x: SparseCochain, y: SparseCochain) -> SparseCochain:
    """x ∘ y = sum_k (-1)^{(k-1)(|y|-1)} x(a_1, .., y(a_k, ..), ..).

    Identity components of y's values feed nothing into x (normalized cochains).
    """
    if x.m != y.m:
        raise ValueError("cochains over different N_m")
    if x.degree == 0:
        return SparseCochain(x.m, max(y.degree - 1, 0), {})
    degree = x.degree + y.degree - 1
    by_value: Dict[BasisLabel, List[Tuple[BarTuple, int]]] = {}
    for (t, b), v in y.terms.items():
        if not b.is_identity:
            by_value.setdefault(b, []).append((t, v))
    acc: Dict[CochainKey, int] = {}
    for (t, b), v in x.terms.items():
        for k, unit in enumerate(t):
            sign = -1 if (k * (y.degree - 1)) % 2 else 1
            for inner, w in by_value.get(unit, ()):
                _bump(acc, (t[:k] + inner + t[k + 1 :], b), sign * v * w)
    return SparseCochain(x.m, degree, acc)


def bracket_cochains(x: SparseCochain, y: SparseCochain) -> SparseCochain:
    """[x, y] = x∘y - (-1)^{(|x|-1)(|y|-1)} y∘x"""
    sign = -1 if ((x.degree - 1) * (y.degree - 1)) % 2 else 1
    left = circle_product(x, y)
    right = circle_product(y, x)
    degree = max(x.degree + y.degree - 1, 0)
    acc: Dict[CochainKey, int] = dict(left.terms)
    for key, v in right.terms.items():
        _bump(acc, key, -sign * v)
    return SparseCochain(x.m, degree, acc)


def restrict_to_koszul(x: SparseCochain) -> Dict[Tuple[Word, BasisLabel], int]:
    """Values on tuples of generators x_{i_1}..x_{i_n} whose word is a basis word of N^!"""
    out: Dict[Tuple[Word, BasisLabel], int] = {}
    for (t, b), v in x.terms.items():
        if all(u.j == u.i + 1 for u in t):
            word = tuple(u.i for u in t)
            if is_dual_word(x.m, word):
                _bump(out, (word, b), v)
    return out


# ---------------------------------------------------------------------------
# Class symbols and expressions
# ---------------------------------------------------------------------------


class SymbolKind(Enum):
    ONE = "1"
    A = "a"
    D = "d"
    F = "f"
    G = "g"


@dataclass(frozen=True, order=True)
class ClassSymbol:
    kind: str
    i: int = 0
    word: Word = ()
    p: int = 0

    @classmethod
    def one(cls) -> "ClassSymbol":
        return cls(SymbolKind.ONE.value)

    @classmethod
    def a(cls, i: int, word: Sequence[int]) -> "ClassSymbol":
        return cls(SymbolKind.A.value, i, tuple(word))

    @classmethod
    def d(cls, word: Sequence[int]) -> "ClassSymbol":
        return cls(SymbolKind.D.value, 0, tuple(word))

    @classmethod
    def f(cls, p: int) -> "ClassSymbol":
        return cls(SymbolKind.F.value, p=p)

    @classmethod
    def g(cls, p: int) -> "ClassSymbol":
        return cls(SymbolKind.G.value, p=p)

    @property
    def degree(self) -> int:
        if self.kind == SymbolKind.ONE.value:
            return 0
        if self.kind == SymbolKind.A.value:
            return len(self.word) + 1
        if self.kind == SymbolKind.D.value:
            return len(self.word)
        return self.p

    @property
    def is_m2(self) -> bool:
        return self.kind in (SymbolKind.F.value, SymbolKind.G.value)

    def __str__(self) -> str:
        letters = ",".join(str(a) for a in self.word)
        if self.kind == SymbolKind.ONE.value:
            return "1"
        if self.kind == SymbolKind.A.value:
            return f"a({self.i},[{letters}])"
        if self.kind == SymbolKind.D.value:
            return f"d([{letters}])"
        return f"{self.kind}({self.p})"


@dataclass(frozen=True)
class CohClass:
    """Finite combination of class symbols; coefficients are ints, reduced mod the ring's modulus when set"""

    m: int
    terms: Tuple[Tuple[ClassSymbol, int], ...] = ()

    @classmethod
    def from_dict(cls, m: int, coefficients: Mapping[ClassSymbol, int], modulus: int = 0) -> "CohClass":
        items = []
        for sym, v in coefficients.items():
            v = v % modulus if modulus else v
            if v:
                items.append((sym, v))
        return cls(m, tuple(sorted(items)))

    @classmethod
    def of(cls, m: int, symbol: ClassSymbol, coefficient: int = 1) -> "CohClass":
        return cls.from_dict(m, {symbol: coefficient})

    @classmethod
    def zero(cls, m: int) -> "CohClass":
        return cls(m)

    def as_dict(self) -> Dict[ClassSymbol, int]:
        return dict(self.terms)

    def coefficient(self, symbol: ClassSymbol) -> int:
        return self.as_dict().get(symbol, 0)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "CohClass") -> "CohClass":
        acc = self.as_dict()
        for sym, v in other.terms:
            _bump(acc, sym, v)
        return CohClass.from_dict(self.m, acc)

    def scale(self, c: int, modulus: int = 0) -> "CohClass":
        return CohClass.from_dict(self.m, {s: c * v for s, v in self.terms}, modulus)

    def __neg__(self) -> "CohClass":
        return self.scale(-1)

    def reduced(self, ring: CoeffRing) -> "CohClass":
        return CohClass.from_dict(self.m, self.as_dict(), _modulus(ring))

    @property
    def degrees(self) -> List[int]:
        return sorted({s.degree for s, _ in self.terms})

    def __str__(self) -> str:
        return format_class(self)


def _modulus(ring: CoeffRing) -> int:
    return ring.modulus if ring.kind in (RingKind.PRIME_FIELD, RingKind.INTEGERS_MOD) else 0


_TOKEN = re.compile(r"\s*(?:(\d+)|([adfg])\s*\(|(\[)|(\])|(\()|(\))|(,)|(\+)|(-)|(\*))")


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens: List[Tuple[str, str]] = []
    pos = 0
    text = text.strip()
    names = ("int", "call", "lbr", "rbr", "lpar", "rpar", "comma", "plus", "minus", "star")
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match or match.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        for name, value in zip(names, match.groups()):
            if value is not None:
                tokens.append((name, value))
                break
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str, m: int):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.m = m
        self.text = text

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self, kind: str) -> str:
        if self.peek() != kind:
            raise ExpressionSyntaxError(f"expected {kind} in {self.text!r} at token {self.pos}")
        value = self.tokens[self.pos][1]
        self.pos += 1
        return value

    def integer(self) -> int:
        return int(self.take("int"))

    def word(self) -> Word:
        self.take("lbr")
        letters: List[int] = []
        if self.peek() != "rbr":
            letters.append(self.integer())
            while self.peek() == "comma":
                self.take("comma")
                letters.append(self.integer())
        self.take("rbr")
        return tuple(letters)

    def atom(self) -> ClassSymbol:
        name = self.take("call")
        if name == "a":
            i = self.integer()
            self.take("comma")
            symbol = ClassSymbol.a(i, self.word())
        elif name == "d":
            symbol = ClassSymbol.d(self.word())
        elif name == "f":
            symbol = ClassSymbol.f(self.integer())
        else:
            symbol = ClassSymbol.g(self.integer())
        self.take("rpar")
        return symbol

    def term(self, sign: int, acc: Dict[ClassSymbol, int]):
        coefficient = 1
        if self.peek() == "int":
            coefficient = self.integer()
            if self.peek() == "star":
                self.take("star")
            elif self.peek() != "call":
                if coefficient != 1 and self.peek() not in (None, "plus", "minus"):
                    raise ExpressionSyntaxError(f"dangling coefficient in {self.text!r}")
                _bump(acc, ClassSymbol.one(), sign * coefficient)
                return
        _bump(acc, self.atom(), sign * coefficient)

    def expression(self) -> Dict[ClassSymbol, int]:
        acc: Dict[ClassSymbol, int] = {}
        sign = 1
        if self.peek() == "minus":
            self.take("minus")
            sign = -1
        elif self.peek() == "plus":
            self.take("plus")
        self.term(sign, acc)
        while self.peek() in ("plus", "minus"):
            sign = 1 if self.take(self.peek()) == "+" else -1
            self.term(sign, acc)
        if self.peek() is not None:
            raise ExpressionSyntaxError(f"trailing input in {self.text!r}")
        return acc


def parse_class(m: int, text: str) -> CohClass:
    """Parse `1`, `a(i,[..])`, `d([..])`, `f(p)`, `g(p)` with integer coefficients, `+`, `-` and `*`"""
    if not text or not text.strip():
        raise ExpressionSyntaxError("empty class expression")
    coefficients = _Parser(text, m).expression()
    for sym in coefficients:
        if sym.is_m2 and m != 2:
            raise UnsupportedPair(f"{sym} only exists for m = 2")
        if sym.kind in (SymbolKind.A.value, SymbolKind.D.value) and m < 3:
            raise UnsupportedPair(f"{sym} needs m >= 3")
        if sym.kind == SymbolKind.A.value and not 1 <= sym.i <= m:
            raise InvalidIndex(f"{sym}: position outside 1..{m}")
        if sym.kind in (SymbolKind.A.value, SymbolKind.D.value):
            _check_letters(m, sym.word)
    return CohClass.from_dict(m, coefficients)


def format_class(x: CohClass) -> str:
    if x.is_zero():
        return "0"
    out = ""
    for n, (sym, v) in enumerate(x.terms):
        body = str(sym)
        if sym.kind == SymbolKind.ONE.value:
            text = str(abs(v))
        else:
            text = body if abs(v) == 1 else f"{abs(v)}*{body}"
        if n == 0:
            out = text if v > 0 else f"-{text}"
        else:
            out += f" + {text}" if v > 0 else f" - {text}"
    return out


def representative(m: int, symbol: ClassSymbol) -> SparseCochain:
    if symbol.kind == SymbolKind.ONE.value:
        return cocycle_one(m)
    if symbol.kind == SymbolKind.A.value:
        return cocycle_a(m, symbol.i, symbol.word, strict=False)
    if symbol.kind == SymbolKind.D.value:
        return cocycle_d(m, symbol.word)
    if m != 2:
        raise UnsupportedPair(f"{symbol} only exists for m = 2")
    return cocycle_f(symbol.p) if symbol.kind == SymbolKind.F.value else cocycle_g(symbol.p)


# ---------------------------------------------------------------------------
# Canonical basis
# ---------------------------------------------------------------------------


def splice_positions(word: Word, letter: int) -> List[int]:
    """1-based positions k with word[k] = letter"""
    return [k + 1 for k, a in enumerate(word) if a == letter]


def basis_symbols_of_block(m: int, n: int, s: int) -> List[ClassSymbol]:
    """Canonical basis classes living in HH^{n,s}(N_m, N_m)"""
    out: List[ClassSymbol] = []
    if (n, s) == (0, 0):
        out.append(ClassSymbol.one())
    if s == n - 1 and n >= 1:
        q = n - 1
        if q == 0:
            out.extend(ClassSymbol.a(i, ()) for i in range(1, m))
        else:
            out.extend(ClassSymbol.a(i, w) for i, w in t_plus(m, q))
    if s == n - (m - 1) and n >= 0:
        out.extend(ClassSymbol.d(w) for w in top_corner_basis(m, n))
    return out


def basis_symbols(m: int, max_degree: int) -> List[ClassSymbol]:
    if m < 3:
        raise UnsupportedPair("the a/d basis is stated for m >= 3")
    out = [ClassSymbol.one()]
    for n in range(1, max_degree + 1):
        out.extend(basis_symbols_of_block(m, n, n - 1))
    for n in range(0, max_degree + 1):
        out.extend(basis_symbols_of_block(m, n, n - (m - 1)))
    return out


class ClassIdentifier:
    """Coordinates of Koszul cocycles of N_m with values in N_m against the canonical basis"""

    def __init__(self, m: int):
        if m < 3:
            raise UnsupportedPair("class identification against the a/d basis needs m >= 3")
        self.m = m
        self.complex = KoszulCochainComplex(m, standard_bimodule(m, StandardKind.N), 0)
        self._reducers: Dict[Tuple[int, int], EchelonReducer] = {}

    def _reducer(self, n: int, s: int) -> EchelonReducer:
        if (n, s) in self._reducers:
            return self._reducers[(n, s)]
        reducer = EchelonReducer(CoeffRing.rationals())
        if n >= 1:
            boundaries = self.complex.differential_block(n - 1, s)
            for c in range(boundaries.cols):
                column = boundaries.column(c)
                if column:
                    reducer.add(column, ("boundary", c))
        index = self.complex.block_index(n, s)
        for symbol in basis_symbols_of_block(self.m, n, s):
            vector = {index[key]: v for key, v in restrict_to_koszul(representative(self.m, symbol)).items()}
            if not reducer.add(vector, symbol):
                raise ArithmeticError(f"basis class {symbol} is dependent modulo boundaries")
        self._reducers[(n, s)] = reducer
        return reducer

    def identify(self, vector: Mapping[Tuple[Word, BasisLabel], int]) -> Dict[ClassSymbol, int]:
        """Integer coordinates of a Koszul cocycle in the canonical basis"""
        blocks: Dict[Tuple[int, int], Dict[Tuple[Word, BasisLabel], int]] = {}
        for (w, b), v in vector.items():
            n = len(w)
            blocks.setdefault((n, n - b.degree), {})[(w, b)] = v
        out: Dict[ClassSymbol, int] = {}
        for (n, s), part in blocks.items():
            index = self.complex.block_index(n, s)
            column = {index[key]: v for key, v in part.items()}
            if self.complex.differential_block(n, s).apply(column):
                raise NotACocycle(f"Koszul cochain in block (n={n}, s={s}) is not a cocycle")
            combo = self._reducer(n, s).solve(column)
            if combo is None:
                raise ArithmeticError(f"cocycle in block (n={n}, s={s}) escapes the canonical basis span")
            for tag, value in combo.items():
                if isinstance(tag, ClassSymbol):
                    value = Fraction(value)
                    if value.denominator != 1:
                        raise ArithmeticError(f"non-integral coordinate {value} on {tag}")
                    _bump(out, tag, int(value))
        return out


@cached_result(cache_key_func=lambda m: ("class_identifier", m))
def class_identifier(m: int) -> ClassIdentifier:
    return ClassIdentifier(m)


def class_of_cochain(m: int, x: SparseCochain, ring: Optional[CoeffRing] = None, check: bool = True) -> CohClass:
    """The cohomology class of a bar cocycle in the canonical basis"""
    ring = ring or CoeffRing.integers()
    if m == 2:
        # f_odd is a cocycle only modulo 2, so the check happens over the ring
        from hochschild.n2_theory import class_of_bar_cochain

        return class_of_bar_cochain(x, ring, check)
    if check and not is_cocycle(x):
        raise NotACocycle(f"cochain of degree {x.degree} has nonzero coboundary")
    coords = class_identifier(m).identify(restrict_to_koszul(x))
    return CohClass.from_dict(m, coords, _modulus(ring))


@cached_result(cache_key_func=lambda m, symbol: ("symbol_coordinates", m, symbol))
def _symbol_coordinates(m: int, symbol: ClassSymbol) -> Tuple[Tuple[ClassSymbol, int], ...]:
    if symbol.kind == SymbolKind.ONE.value:
        return ((symbol, 1),)
    coords = class_identifier(m).identify(restrict_to_koszul(representative(m, symbol)))
    return tuple(sorted(coords.items()))


def reduce_to_basis(m: int, raw: Union[CohClass, Mapping[ClassSymbol, int]], ring: Optional[CoeffRing] = None) -> CohClass:
    """Rewrite a formal a/d combination in the canonical basis"""
    ring = ring or CoeffRing.integers()
    items = raw.terms if isinstance(raw, CohClass) else tuple(raw.items())
    if m == 2:
        from hochschild.n2_theory import normalize_class

        return normalize_class(CohClass.from_dict(2, dict(items)), ring)
    acc: Dict[ClassSymbol, int] = {}
    for symbol, v in items:
        if symbol.is_m2:
            raise UnsupportedPair(f"{symbol} only exists for m = 2")
        for basis_symbol, c in _symbol_coordinates(m, symbol):
            _bump(acc, basis_symbol, v * c)
    return CohClass.from_dict(m, acc, _modulus(ring))


def augmentation(x: CohClass) -> int:
    """ε: HH* -> R, the coefficient of 1"""
    return x.coefficient(ClassSymbol.one())


# ---------------------------------------------------------------------------
# Cup product and bracket on classes
# ---------------------------------------------------------------------------


def _check_grammar(m: int, *classes: CohClass):
    for x in classes:
        for sym, _ in x.terms:
            if sym.is_m2 != (m == 2) and sym.kind != SymbolKind.ONE.value:
                raise UnsupportedPair(f"{sym} does not belong to the grammar for m={m}")


def _representative_of_class(m: int, x: CohClass) -> Dict[int, SparseCochain]:
    by_degree: Dict[int, SparseCochain] = {}
    for sym, v in x.terms:
        rep = representative(m, sym).scale(v)
        d = rep.degree
        by_degree[d] = by_degree[d] + rep if d in by_degree else rep
    return by_degree


@benchmark_speed("cup")
def cup(m: int, x: CohClass, y: CohClass, ring: Optional[CoeffRing] = None) -> CohClass:
    ring = ring or CoeffRing.integers()
    _check_grammar(m, x, y)
    result = CohClass.zero(m)
    for xr in _representative_of_class(m, x).values():
        for yr in _representative_of_class(m, y).values():
            product_ = cup_cochains(xr, yr)
            if not product_.is_zero():
                result = result + class_of_cochain(m, product_, ring)
    return result.reduced(ring)


@dataclass
class CupCertificate:
    """A bar cochain h with d h = x ∪ y on the chosen representatives"""

    m: int
    ring: CoeffRing
    product: Dict[int, SparseCochain]
    primitive: Optional[Dict[int, SparseCochain]]
    verified: bool = False

    @property
    def found(self) -> bool:
        return self.primitive is not None and self.verified

    def to_dict(self) -> Dict[str, object]:
        return {
            "found": self.found,
            "degrees": sorted(self.product),
            "product_terms": sum(len(c.terms) for c in self.product.values()),
            "primitive_terms": sum(len(h.terms) for h in (self.primitive or {}).values()),
        }


def _product_cochains(m: int, x: CohClass, y: CohClass) -> Dict[int, SparseCochain]:
    by_degree: Dict[int, SparseCochain] = {}
    for xr in _representative_of_class(m, x).values():
        for yr in _representative_of_class(m, y).values():
            c = cup_cochains(xr, yr)
            by_degree[c.degree] = by_degree[c.degree] + c if c.degree in by_degree else c
    return {n: c for n, c in by_degree.items() if not c.is_zero()}


def _bar_block(key: CochainKey) -> int:
    t, b = key
    return sum(u.degree for u in t) - b.degree


def _primitive(m: int, target: SparseCochain, ring: CoeffRing) -> Optional[SparseCochain]:
    """Solve d h = target block by block over `ring`"""
    if target.degree == 0:
        return None
    engine = _bar_engine(m)
    blocks: Dict[int, Dict[CochainKey, int]] = {}
    for key, v in target.terms.items():
        blocks.setdefault(_bar_block(key), {})[key] = v
    terms: Dict[CochainKey, object] = {}
    for s, part in blocks.items():
        index = engine.block_index(target.degree, s)
        rhs = [0] * len(index)
        for key, v in part.items():
            rhs[index[key]] = v
        solution = solve_linear(engine.differential_block(target.degree - 1, s), rhs, ring)
        if solution is None:
            return None
        source = engine.block_basis(target.degree - 1, s)
        terms.update((source[j], v) for j, v in enumerate(solution) if v)
    return SparseCochain(m, target.degree - 1, terms)


def _agrees(a: SparseCochain, b: SparseCochain, ring: CoeffRing) -> bool:
    diff: Dict[CochainKey, object] = dict(a.terms)
    for key, v in b.terms.items():
        _bump(diff, key, -v)
    return all(ring.reduce(v) == 0 for v in diff.values())


def cup_certificate(m: int, x: CohClass, y: CohClass, ring: Optional[CoeffRing] = None) -> CupCertificate:
    """Primitive of the cochain-level product, checked by taking its coboundary"""
    ring = ring or CoeffRing.integers()
    _check_grammar(m, x, y)
    product_ = _product_cochains(m, x, y)
    primitive: Dict[int, SparseCochain] = {}
    for n, c in product_.items():
        h = _primitive(m, c, ring)
        if h is None:
            logger.info(f"✗ no primitive for the degree-{n} product over {ring}")
            return CupCertificate(m, ring, product_, None)
        primitive[n] = h
    verified = all(_agrees(coboundary(primitive[n]), c, ring) for n, c in product_.items())
    return CupCertificate(m, ring, product_, primitive, verified)


def cup_with_certificate(
    m: int, x: CohClass, y: CohClass, ring: Optional[CoeffRing] = None
) -> Tuple[CohClass, Optional[CupCertificate]]:
    """x ∪ y, plus a solved primitive whenever the product class is zero"""
    ring = ring or CoeffRing.integers()
    value = cup(m, x, y, ring)
    if not value.is_zero():
        return value, None
    certificate = cup_certificate(m, x, y, ring)
    if not certificate.found:
        raise ArithmeticError(f"cup of {format_class(x)} and {format_class(y)} is zero but has no primitive over {ring}")
    return value, certificate


def splice(word: Word, k: int, insert: Word) -> Word:
    """(j_1, .., j_{k-1}, insert, j_{k+1}, ..) for 1-based k"""
    return word[: k - 1] + tuple(insert) + word[k:]


def splice_sum_A(m: int, i: int, word: Word, i2: int, word2: Word) -> Dict[ClassSymbol, int]:
    """The formal sum A(i, I; i', I') of a-symbols"""
    q, q2 = len(word), len(word2)
    acc: Dict[ClassSymbol, int] = {}
    for k in splice_positions(word, i2 - 1):
        _bump(acc, ClassSymbol.a(i, splice(word, k, (i2 - 1,) + word2)), (-1) ** (k * q2))
    for k in splice_positions(word, i2):
        _bump(acc, ClassSymbol.a(i, splice(word, k, word2 + (i2,))), -((-1) ** ((k + 1) * q2)))
    outer = -((-1) ** (q * q2))
    for k in splice_positions(word2, i - 1):
        _bump(acc, ClassSymbol.a(i2, splice(word2, k, (i - 1,) + word)), outer * (-1) ** (k * q))
    for k in splice_positions(word2, i):
        _bump(acc, ClassSymbol.a(i2, splice(word2, k, word + (i,))), -outer * (-1) ** ((k + 1) * q))
    return acc


def _bracket_d_a(m: int, j_word: Word, i: int, word: Word) -> Dict[ClassSymbol, int]:
    q = len(word)
    acc: Dict[ClassSymbol, int] = {}
    if i == 1:
        _bump(acc, ClassSymbol.d(word + j_word), (-1) ** q)
    else:
        for k in splice_positions(j_word, i - 1):
            _bump(acc, ClassSymbol.d(splice(j_word, k, (i - 1,) + word)), (-1) ** ((k - 1) * q))
    if i == m:
        _bump(acc, ClassSymbol.d(j_word + word), -((-1) ** (q * (len(j_word) - 1))))
    else:
        for k in splice_positions(j_word, i):
            _bump(acc, ClassSymbol.d(splice(j_word, k, word + (i,))), -((-1) ** (k * q)))
    return acc


def _closed_form_pair(m: int, x: ClassSymbol, y: ClassSymbol) -> Dict[ClassSymbol, int]:
    one, a_kind, d_kind = SymbolKind.ONE.value, SymbolKind.A.value, SymbolKind.D.value
    if one in (x.kind, y.kind):
        return {}
    if x.kind == d_kind and y.kind == d_kind:
        return {}
    if x.kind == d_kind and y.kind == a_kind:
        return _bracket_d_a(m, x.word, y.i, y.word)
    if x.kind == a_kind and y.kind == d_kind:
        sign = -((-1) ** ((x.degree - 1) * (y.degree - 1)))
        return {s: sign * v for s, v in _bracket_d_a(m, y.word, x.i, x.word).items()}
    acc = splice_sum_A(m, x.i, x.word, y.i, y.word)
    if x.i == y.i:
        _bump(acc, ClassSymbol.a(x.i, y.word + x.word), 1)
        _bump(acc, ClassSymbol.a(x.i, x.word + y.word), -((-1) ** (len(x.word) * len(y.word))))
    return acc


class BracketMethod(Enum):
    CLOSED_FORM = "closed_form"
    COCHAIN = "cochain"


@benchmark_speed("gerstenhaber_bracket")
def gerstenhaber_bracket(
    m: int,
    x: CohClass,
    y: CohClass,
    method: Union[str, BracketMethod] = BracketMethod.COCHAIN,
    ring: Optional[CoeffRing] = None,
) -> CohClass:
    ring = ring or CoeffRing.integers()
    method = BracketMethod(method)
    _check_grammar(m, x, y)
    if m == 2:
        from hochschild.n2_theory import bracket_classes

        return bracket_classes(x, y, ring, cochain=method is BracketMethod.COCHAIN)

    if method is BracketMethod.CLOSED_FORM:
        raw: Dict[ClassSymbol, int] = {}
        for sx, vx in x.terms:
            for sy, vy in y.terms:
                for s, v in _closed_form_pair(m, sx, sy).items():
                    _bump(raw, s, vx * vy * v)
        return reduce_to_basis(m, raw, ring)

    result = CohClass.zero(m)
    for sx, vx in x.terms:
        for sy, vy in y.terms:
            value = bracket_cochains(representative(m, sx), representative(m, sy))
            if not value.is_zero():
                result = result + class_of_cochain(m, value, ring).scale(vx * vy)
    return result.reduced(ring)


@dataclass
class BracketTable:
    m: int
    ring: CoeffRing
    entries: Dict[Tuple[ClassSymbol, ClassSymbol], CohClass] = field(default_factory=dict)

    def antisymmetry_violations(self) -> List[Tuple[ClassSymbol, ClassSymbol]]:
        bad = []
        modulus = _modulus(self.ring)
        for (x, y), value in self.entries.items():
            mirror = self.entries.get((y, x))
            if mirror is None:
                continue
            sign = -((-1) ** ((x.degree - 1) * (y.degree - 1)))
            if mirror.scale(sign, modulus) != value.reduced(self.ring):
                bad.append((x, y))
        return bad


def bracket_table(
    m: int, symbols: Sequence[ClassSymbol], method: Union[str, BracketMethod] = BracketMethod.COCHAIN,
    ring: Optional[CoeffRing] = None,
) -> BracketTable:
    ring = ring or CoeffRing.integers()
    table = BracketTable(m, ring)
    for x, y in product(symbols, repeat=2):
        table.entries[(x, y)] = gerstenhaber_bracket(m, CohClass.of(m, x), CohClass.of(m, y), method, ring)
    return table


def bracket_discrepancies(
    m: int, max_total: int, ring: Optional[CoeffRing] = None
) -> List[Tuple[ClassSymbol, ClassSymbol, CohClass, CohClass]]:
    """Pairs of basis symbols (word lengths summing to <= max_total) where the closed forms and the cochain computation differ"""
    ring = ring or CoeffRing.integers()
    symbols = [s for s in basis_symbols(m, max_total + 1) if len(s.word) <= max_total]
    out = []
    for x, y in product(symbols, repeat=2):
        if len(x.word) + len(y.word) > max_total:
            continue
        cx, cy = CohClass.of(m, x), CohClass.of(m, y)
        closed = gerstenhaber_bracket(m, cx, cy, BracketMethod.CLOSED_FORM, ring)
        cochain = gerstenhaber_bracket(m, cx, cy, BracketMethod.COCHAIN, ring)
        if closed != cochain:
            logger.warning(f"[{x}, {y}]: closed form {closed} vs cochain {cochain}")
            out.append((x, y, closed, cochain))
    return out


def jacobi_defect(m: int, x: CohClass, y: CohClass, z: CohClass, ring: Optional[CoeffRing] = None) -> CohClass:
    """[x,[y,z]] - [[x,y],z] - (-1)^{(|x|-1)(|y|-1)} [y,[x,z]] for homogeneous x, y"""
    ring = ring or CoeffRing.integers()
    dx, dy = x.degrees[0], y.degrees[0]
    sign = (-1) ** ((dx - 1) * (dy - 1))
    br = lambda a, b: gerstenhaber_bracket(m, a, b, BracketMethod.COCHAIN, ring)  # noqa: E731
    total = br(x, br(y, z)) + (-br(br(x, y), z)) + br(y, br(x, z)).scale(-sign)
    return total.reduced(ring)


def sample_triples(m: int, max_degree: int, count: int) -> List[Tuple[ClassSymbol, ClassSymbol, ClassSymbol]]:
    """First `count` triples of positive-degree basis symbols in a fixed order"""
    symbols = [s for s in basis_symbols(m, max_degree) if s.degree > 0]
    out = []
    for triple in combinations_with_replacement(symbols, 3):
        out.append(triple)
        if len(out) == count:
            break
    return out


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class BVReport:
    m: int
    ring: CoeffRing
    witness_cup_zero: bool
    cups_checked: int
    cups_nonzero: List[Tuple[str, str]]
    witness_bracket: CohClass
    max_degree: int

    @property
    def witness_nonzero(self) -> bool:
        return not self.witness_bracket.is_zero()

    @property
    def holds(self) -> bool:
        return self.witness_cup_zero and not self.cups_nonzero and self.witness_nonzero

    def to_dict(self) -> Dict[str, object]:
        return {
            "m": self.m,
            "ring": str(self.ring),
            "witness_cup_zero": self.witness_cup_zero,
            "cups_checked": self.cups_checked,
            "cups_nonzero": self.cups_nonzero,
            "witness_bracket": format_class(self.witness_bracket),
            "max_degree": self.max_degree,
            "holds": self.holds,
        }


def positive_products_vanish(m: int, max_total: int, ring: Optional[CoeffRing] = None) -> Tuple[int, List[Tuple[str, str]]]:
    """Cup every pair of positive-degree basis symbols with degree sum <= max_total"""
    ring = ring or CoeffRing.integers()
    symbols = [s for s in basis_symbols(m, max_total) if s.kind != SymbolKind.ONE.value]
    checked, nonzero = 0, []
    for x, y in product(symbols, repeat=2):
        if x.degree + y.degree > max_total:
            continue
        checked += 1
        if not cup(m, CohClass.of(m, x), CohClass.of(m, y), ring).is_zero():
            nonzero.append((str(x), str(y)))
    return checked, nonzero


WITNESS_LEFT = ClassSymbol.a(1, (1, 1))
WITNESS_RIGHT = ClassSymbol.a(1, (2, 1))


@benchmark_speed("bv_obstruction")
def bv_obstruction(m: int, ring: Optional[CoeffRing] = None, max_degree: int = 4) -> BVReport:
    """Products of positive-degree classes vanish while a bracket of degree >= 2 classes does not"""
    ring = ring or CoeffRing.rationals()
    if m < 3:
        raise UnsupportedPair("the BV obstruction is stated for m >= 3")
    left, right = CohClass.of(m, WITNESS_LEFT), CohClass.of(m, WITNESS_RIGHT)
    witness_cup_zero = cup(m, left, right, ring).is_zero()
    checked, nonzero = positive_products_vanish(m, max_degree, ring)
    witness = gerstenhaber_bracket(m, left, right, BracketMethod.COCHAIN, ring)
    report = BVReport(m, ring, witness_cup_zero, checked, nonzero, witness, max_degree)
    logger.info(f"BV obstruction m={m} over {ring}: {'holds' if report.holds else 'not established'}")
    return report


def infinite_generation_witness(m: int, max_q: int = 6, ring: Optional[CoeffRing] = None, max_product_degree: int = 4) -> Dict[str, object]:
    """Indecomposables persist in every degree HH^{q+1,q} while products of positive classes vanish"""
    ring = ring or CoeffRing.rationals()
    table = hochschild_bigraded(m, standard_bimodule(m, StandardKind.N), ring, max_q + 1)
    ranks = {q: table.get(q + 1, q).size_rank for q in range(1, max_q + 1)}
    expected = {q: (m - 2) * phi(m, q) for q in range(1, max_q + 1)}
    checked, nonzero = positive_products_vanish(m, max_product_degree, ring)
    ok = ranks == expected and all(v > 0 for v in ranks.values()) and not nonzero
    return {"ranks": ranks, "expected": expected, "products_checked": checked, "products_nonzero": nonzero, "ok": ok}


def check_cocycles(m: int, max_len: int) -> List[str]:
    """Every a(i, I) and d(J) with |I|, |J| <= max_len has vanishing bar coboundary"""
    failures = []
    for q in range(max_len + 1):
        for w in dual_basis(m, q):
            for i in range(1, m + 1):
                if not is_cocycle(cocycle_a(m, i, w)):
                    failures.append(str(ClassSymbol.a(i, w)))
            if not is_cocycle(cocycle_d(m, w)):
                failures.append(str(ClassSymbol.d(w)))
    return failures


__all__ = [
    "BVReport",
    "BracketMethod",
    "BracketTable",
    "ClassIdentifier",
    "ClassSymbol",
    "CohClass",
    "HochschildError",
    "SparseCochain",
    "augmentation",
    "bracket_cochains",
    "bracket_discrepancies",
    "bracket_table",
    "bv_obstruction",
    "check_cocycles",
    "circle_product",
    "class_of_cochain",
    "coboundary",
    "cocycle_a",
    "cocycle_d",
    "cup",
    "cup_cochains",
    "format_class",
    "gerstenhaber_bracket",
    "infinite_generation_witness",
    "jacobi_defect",
    "parse_class",
    "reduce_to_basis",
    "restrict_to_koszul",
    "splice_sum_A",
    "t_plus",
]
