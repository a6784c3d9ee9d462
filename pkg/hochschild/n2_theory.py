"""
N2 Theory - Hochschild cohomology of N_2 from the periodic resolution, with products, brackets and BV operators
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from hochschild.bimod import StandardKind, standard_bimodule
from hochschild.exactla import (
    CoeffRing,
    FinAbGroup,
    IntMatrix,
    NotACocycle,
    RingKind,
    UnsupportedPair,
    UnsupportedRing,
    cohomology_of_pair,
)
from hochschild.ghstructure import (
    BracketMethod,
    ClassSymbol,
    CohClass,
    SparseCochain,
    SymbolKind,
    coboundary,
    cup,
    format_class,
    gerstenhaber_bracket,
)
from hochschild.homology import hochschild, hochschild_bigraded
from lib.performance_tracker import benchmark_speed

logger = logging.getLogger(__name__)

F, G = SymbolKind.F.value, SymbolKind.G.value


def _bump(out: Dict, key, value):
    nv = out.get(key, 0) + value
    if nv:
        out[key] = nv
    else:
        out.pop(key, None)


def _modulus(ring: CoeffRing) -> int:
    return ring.modulus if ring.kind in (RingKind.PRIME_FIELD, RingKind.INTEGERS_MOD) else 0


# ---------------------------------------------------------------------------
# R, R/2R and Ann(2) as groups
# ---------------------------------------------------------------------------


def ring_group(ring: CoeffRing) -> FinAbGroup:
    if ring.kind is RingKind.INTEGERS_MOD:
        return FinAbGroup.from_cyclic(0, [ring.modulus])
    return FinAbGroup(1)


def quotient_by_two(ring: CoeffRing) -> FinAbGroup:
    """R/2R"""
    if ring.kind is RingKind.INTEGERS:
        return FinAbGroup.from_cyclic(0, [2])
    if ring.kind is RingKind.INTEGERS_MOD:
        return FinAbGroup.from_cyclic(0, [math.gcd(2, ring.modulus)])
    return FinAbGroup(1) if ring.characteristic == 2 else FinAbGroup()


def annihilator_of_two(ring: CoeffRing) -> FinAbGroup:
    """Ann(2) = {r : 2r = 0}"""
    if ring.kind is RingKind.INTEGERS_MOD:
        return FinAbGroup.from_cyclic(0, [math.gcd(2, ring.modulus)])
    return FinAbGroup(1) if ring.characteristic == 2 else FinAbGroup()


# ---------------------------------------------------------------------------
# Periodic complex
# ---------------------------------------------------------------------------


def periodic_differential(p: int) -> IntMatrix:
    """C^p -> C^{p+1} on the basis (f_p, g_p): multiplication by 2x for p odd, zero for p even"""
    if p < 0:
        return IntMatrix.zero(2, 0)
    if p % 2:
        return IntMatrix.from_dict(2, 2, {(1, 0): 2})
    return IntMatrix.zero(2, 2)


def periodic_groups(ring: CoeffRing, n: int) -> FinAbGroup:
    return cohomology_of_pair(periodic_differential(n - 1), periodic_differential(n), ring)


def periodic_bigraded(ring: CoeffRing, n: int, s: int) -> FinAbGroup:
    """Blocks of the periodic complex: f_s and g_{s+1} share internal degree s"""
    if s == n:
        # f_n; the incoming map hits g only
        d_out = IntMatrix.from_dict(1, 1, {(0, 0): 2}) if n % 2 else IntMatrix.zero(1, 1)
        return cohomology_of_pair(IntMatrix.zero(1, 0), d_out, ring)
    if s == n - 1:
        d_in = IntMatrix.from_dict(1, 1, {(0, 0): 2}) if n >= 1 and (n - 1) % 2 else IntMatrix.zero(1, 1 if n >= 1 else 0)
        return cohomology_of_pair(d_in, IntMatrix.zero(0, 1), ring)
    return FinAbGroup()


def n2_group_formula(ring: CoeffRing, n: int) -> FinAbGroup:
    if n == 0:
        return ring_group(ring).direct_sum(ring_group(ring))
    if n % 2 == 0:
        return ring_group(ring).direct_sum(quotient_by_two(ring))
    return annihilator_of_two(ring).direct_sum(ring_group(ring))


def n2_bigraded_formula(ring: CoeffRing, n: int, s: int) -> FinAbGroup:
    if n == 0 and s == -1:
        return ring_group(ring)
    if n % 2 == 0 and s == n:
        return ring_group(ring)
    if n % 2 == 0 and s == n - 1 and n >= 2:
        return quotient_by_two(ring)
    if n % 2 == 1 and s == n:
        return annihilator_of_two(ring)
    if n % 2 == 1 and s == n - 1:
        return ring_group(ring)
    return FinAbGroup()


def m2_over_n2_formula(ring: CoeffRing, n: int) -> FinAbGroup:
    """HH^n(N_2, M_2/N_2): R + Ann(2) for n even, R/2R + R for n odd"""
    if n % 2 == 0:
        return ring_group(ring).direct_sum(annihilator_of_two(ring))
    return quotient_by_two(ring).direct_sum(ring_group(ring))


# ---------------------------------------------------------------------------
# Classes
# ---------------------------------------------------------------------------


def _in_annihilator(v: int, ring: CoeffRing) -> bool:
    modulus = _modulus(ring)
    return (2 * v) % modulus == 0 if modulus else v == 0


def normalize_class(x: CohClass, ring: CoeffRing) -> CohClass:
    """Reduce f/g coefficients to R, R/2R or Ann(2) as the degree requires"""
    acc: Dict[ClassSymbol, int] = {}
    for sym, v in x.terms:
        if sym.kind == SymbolKind.ONE.value:
            sym = ClassSymbol.f(0)
        if sym.kind not in (F, G):
            raise UnsupportedPair(f"{sym} does not belong to the m = 2 grammar")
        _bump(acc, sym, v)
    modulus = _modulus(ring)
    out: Dict[ClassSymbol, int] = {}
    for sym, v in acc.items():
        n = sym.p
        if modulus:
            v %= modulus
        if sym.kind == F and n % 2:
            if not _in_annihilator(v, ring):
                raise NotACocycle(f"coefficient {v} of {sym} is not annihilated by 2 in {ring}")
        elif sym.kind == G and n % 2 == 0 and n > 0:
            two = math.gcd(2, modulus) if modulus else (2 if ring.kind is RingKind.INTEGERS else 1)
            v %= two
        if v:
            out[sym] = v
    return CohClass.from_dict(2, out)


def class_of_bar_cochain(x: SparseCochain, ring: CoeffRing, check: bool = True) -> CohClass:
    """Bar cochains of N_2 are exactly combinations of f_p and g_p"""
    if check:
        modulus = _modulus(ring)
        boundary = {k: (v % modulus if modulus else v) for k, v in coboundary(x).terms.items()}
        if any(boundary.values()):
            raise NotACocycle(f"cochain of degree {x.degree} is not a cocycle over {ring}")
    acc: Dict[ClassSymbol, int] = {}
    for (_, label), v in x.terms.items():
        symbol = ClassSymbol.f(x.degree) if label.is_identity else ClassSymbol.g(x.degree)
        _bump(acc, symbol, v)
    return normalize_class(CohClass.from_dict(2, acc), ring)


def class_generators(ring: CoeffRing, n: int) -> List[Tuple[ClassSymbol, int]]:
    """(symbol, coefficient) pairs generating HH^n(N_2, N_2) over ring"""
    modulus = _modulus(ring)
    out: List[Tuple[ClassSymbol, int]] = []
    if n % 2 == 0:
        out.append((ClassSymbol.f(n), 1))
    elif not annihilator_of_two(ring).is_trivial:
        out.append((ClassSymbol.f(n), modulus // 2 if ring.kind is RingKind.INTEGERS_MOD else 1))
    if n == 0 or n % 2 or not quotient_by_two(ring).is_trivial:
        out.append((ClassSymbol.g(n), 1))
    return out


def _all_generators(ring: CoeffRing, max_degree: int) -> List[Tuple[ClassSymbol, int]]:
    return [gen for n in range(max_degree + 1) for gen in class_generators(ring, n)]


def product_closed(x: ClassSymbol, y: ClassSymbol) -> Dict[ClassSymbol, int]:
    """f_i f_j = f_{i+j}, f_i g_j = g_j f_i = g_{i+j}, g_i g_j = 0"""
    if x.kind == G and y.kind == G:
        return {}
    n = x.p + y.p
    return {ClassSymbol.f(n) if x.kind == F and y.kind == F else ClassSymbol.g(n): 1}


def bracket_closed(x: ClassSymbol, y: ClassSymbol) -> Dict[ClassSymbol, int]:
    i, j = x.p, y.p
    if x.kind == G and y.kind == F:
        sign = -((-1) ** ((i - 1) * (j - 1)))
        return {s: sign * v for s, v in bracket_closed(y, x).items()}
    if x.kind == F and y.kind == F:
        return {}
    if x.kind == F:
        if j % 2:
            coefficient = i
        else:
            coefficient = 1 if i % 2 else 0
        return {ClassSymbol.f(i + j - 1): coefficient} if coefficient and i + j >= 1 else {}
    if i % 2 == 0 and j % 2 == 0:
        coefficient = 0
    elif i % 2 and j % 2 == 0:
        coefficient = -(j - 1)
    elif i % 2 == 0:
        coefficient = i - 1
    else:
        coefficient = i - j
    return {ClassSymbol.g(i + j - 1): coefficient} if coefficient and i + j >= 1 else {}


def _bilinear(x: CohClass, y: CohClass, table, ring: CoeffRing) -> CohClass:
    acc: Dict[ClassSymbol, int] = {}
    for sx, vx in normalize_class(x, ring).terms:
        for sy, vy in normalize_class(y, ring).terms:
            for s, v in table(sx, sy).items():
                _bump(acc, s, vx * vy * v)
    return normalize_class(CohClass.from_dict(2, acc), ring)


def cup_classes(x: CohClass, y: CohClass, ring: CoeffRing) -> CohClass:
    return _bilinear(x, y, product_closed, ring)


def bracket_classes(x: CohClass, y: CohClass, ring: CoeffRing, cochain: bool = False) -> CohClass:
    if not cochain:
        return _bilinear(x, y, bracket_closed, ring)
    from hochschild.ghstructure import bracket_cochains, representative

    result = CohClass.zero(2)
    for sx, vx in normalize_class(x, ring).terms:
        for sy, vy in normalize_class(y, ring).terms:
            value = bracket_cochains(representative(2, sx).scale(vx), representative(2, sy).scale(vy))
            if not value.is_zero():
                result = result + class_of_bar_cochain(value, ring)
    return normalize_class(result, ring)


# ---------------------------------------------------------------------------
# BV operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeltaOperator:
    """Δ_c when c2 is None (characteristic != 2), Δ_{c,c'} otherwise"""

    ring: CoeffRing
    c: int
    c2: Optional[int] = None

    @property
    def name(self) -> str:
        return f"Delta_{self.c}" if self.c2 is None else f"Delta_{self.c},{self.c2}"

    def on_symbol(self, sym: ClassSymbol) -> Dict[ClassSymbol, int]:
        n = sym.p
        if self.c2 is None:
            if sym.kind == G and n == 1:
                return {ClassSymbol.f(0): 1, ClassSymbol.g(0): self.c}
            if sym.kind == G and n % 2:
                return {ClassSymbol.f(n - 1): n}
            return {}
        if n % 2 == 0:
            return {}
        if sym.kind == F:
            return {ClassSymbol.f(n - 1): self.c, ClassSymbol.g(n - 1): self.c2}
        return {ClassSymbol.f(n - 1): -1, ClassSymbol.g(n - 1): self.c}

    def __call__(self, x: CohClass) -> CohClass:
        acc: Dict[ClassSymbol, int] = {}
        for sym, v in normalize_class(x, self.ring).terms:
            for s, w in self.on_symbol(sym).items():
                _bump(acc, s, v * w)
        return normalize_class(CohClass.from_dict(2, acc), self.ring)


def delta_family(ring: CoeffRing, sample: Sequence[int] = (0, 1, 2, -1)) -> Iterator[DeltaOperator]:
    """Every Δ over a finite field, a sample of c over Q"""
    if not ring.is_field:
        raise UnsupportedRing(f"BV operators are defined over fields, got {ring}")
    values = range(ring.modulus) if ring.kind is RingKind.PRIME_FIELD else sample
    if ring.characteristic == 2:
        for c, c2 in product(values, repeat=2):
            yield DeltaOperator(ring, c, c2)
    else:
        for c in values:
            yield DeltaOperator(ring, c)


def bv_defect(delta: DeltaOperator, a: CohClass, b: CohClass, degree_a: int) -> CohClass:
    """[a, b] - (-1)^{|a|}(Δ(ab) - Δ(a)b - (-1)^{|a|} aΔ(b))"""
    ring = delta.ring
    sign = -1 if degree_a % 2 else 1
    rhs = delta(cup_classes(a, b, ring)) + (-cup_classes(delta(a), b, ring)) + cup_classes(a, delta(b), ring).scale(-sign)
    return normalize_class(bracket_classes(a, b, ring) + rhs.scale(-sign), ring)


def bv_identity_failures(delta: DeltaOperator, max_degree: int) -> List[Tuple[str, str]]:
    gens = _all_generators(delta.ring, max_degree)
    bad = []
    for (sa, ca), (sb, cb) in product(gens, repeat=2):
        a, b = CohClass.of(2, sa, ca), CohClass.of(2, sb, cb)
        if not bv_defect(delta, a, b, sa.p).is_zero():
            bad.append((str(sa), str(sb)))
    return bad


def delta_squares_to_zero(delta: DeltaOperator, max_degree: int) -> bool:
    return all(delta(delta(CohClass.of(2, s, c))).is_zero() for s, c in _all_generators(delta.ring, max_degree))


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


@dataclass
class GroupRow:
    n: int
    koszul: FinAbGroup
    formula: FinAbGroup
    periodic: Optional[FinAbGroup] = None

    @property
    def agree(self) -> bool:
        return self.koszul == self.formula and self.periodic in (None, self.koszul)

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": self.n,
            "periodic": self.periodic.to_dict() if self.periodic is not None else None,
            "koszul": self.koszul.to_dict(),
            "formula": self.formula.to_dict(),
            "agree": self.agree,
        }


@dataclass
class N2Report:
    ring: CoeffRing
    max_degree: int
    groups: List[GroupRow] = field(default_factory=list)
    bigraded_mismatches: List[Tuple[int, int]] = field(default_factory=list)
    quotient_rows: List[GroupRow] = field(default_factory=list)
    product_failures: List[Tuple[str, str]] = field(default_factory=list)
    bracket_failures: List[Tuple[str, str]] = field(default_factory=list)
    bv_failures: Dict[str, List[Tuple[str, str]]] = field(default_factory=dict)
    delta_squared_failures: List[str] = field(default_factory=list)
    bv_checked: bool = False

    @property
    def passed(self) -> bool:
        return (
            all(r.agree for r in self.groups)
            and all(r.agree for r in self.quotient_rows)
            and not self.bigraded_mismatches
            and not self.product_failures
            and not self.bracket_failures
            and not any(self.bv_failures.values())
            and not self.delta_squared_failures
        )

    def to_dict(self) -> Dict[str, object]:
        return {
            "ring": str(self.ring),
            "max_degree": self.max_degree,
            "groups": [r.to_dict() for r in self.groups],
            "bigraded_mismatches": [list(k) for k in self.bigraded_mismatches],
            "m2_over_n2": [r.to_dict() for r in self.quotient_rows],
            "product_failures": [list(p) for p in self.product_failures],
            "bracket_failures": [list(p) for p in self.bracket_failures],
            "bv_checked": self.bv_checked,
            "bv_failures": {k: [list(p) for p in v] for k, v in sorted(self.bv_failures.items())},
            "delta_squared_failures": self.delta_squared_failures,
            "passed": self.passed,
        }


def _table_failures(ring: CoeffRing, max_degree: int, closed, computed) -> List[Tuple[str, str]]:
    gens = _all_generators(ring, max_degree)
    bad = []
    for (sa, ca), (sb, cb) in product(gens, repeat=2):
        if sa.p + sb.p > max_degree:
            continue
        a, b = CohClass.of(2, sa, ca), CohClass.of(2, sb, cb)
        expected, actual = closed(a, b, ring), computed(a, b, ring)
        if expected != actual:
            logger.warning(f"N_2 table mismatch at ({sa}, {sb}): {format_class(expected)} vs {format_class(actual)}")
            bad.append((str(sa), str(sb)))
    return bad


@benchmark_speed("n2_theory")
def n2_theory(ring: CoeffRing, max_degree: int, bv_degree: Optional[int] = None) -> N2Report:
    """Groups, products, brackets and BV operators of HH*(N_2, N_2) checked against the closed forms"""
    report = N2Report(ring, max_degree)
    n_module = standard_bimodule(2, StandardKind.N)
    quotient = standard_bimodule(2, StandardKind.M_OVER_N)
    for n in range(max_degree + 1):
        report.groups.append(
            GroupRow(n, hochschild(2, n_module, ring, n), n2_group_formula(ring, n), periodic_groups(ring, n))
        )
        report.quotient_rows.append(
            GroupRow(n, hochschild(2, quotient, ring, n), m2_over_n2_formula(ring, n))
        )

    table = hochschild_bigraded(2, n_module, ring, max_degree)
    for n in range(max_degree + 1):
        for s in range(-1, n + 1):
            if not (table.get(n, s) == periodic_bigraded(ring, n, s) == n2_bigraded_formula(ring, n, s)):
                report.bigraded_mismatches.append((n, s))

    report.product_failures = _table_failures(
        ring, max_degree, cup_classes, lambda a, b, r: cup(2, a, b, r)
    )
    report.bracket_failures = _table_failures(
        ring,
        max_degree,
        lambda a, b, r: bracket_classes(a, b, r),
        lambda a, b, r: gerstenhaber_bracket(2, a, b, BracketMethod.COCHAIN, r),
    )

    if ring.is_field:
        report.bv_checked = True
        top = max_degree if bv_degree is None else bv_degree
        for delta in delta_family(ring):
            report.bv_failures[delta.name] = bv_identity_failures(delta, top)
            if not delta_squares_to_zero(delta, top):
                report.delta_squared_failures.append(delta.name)

    status = "✓" if report.passed else "✗"
    logger.info(f"{status} N_2 theory over {ring} up to degree {max_degree}")
    return report
