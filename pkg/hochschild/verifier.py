"""
Verifier - Named check suites comparing computed cohomology against closed forms
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from hochschild.bimod import StandardKind, normalizer_dimension, standard_bimodule, tangent_dimension
from hochschild.exactla import CoeffRing, FinAbGroup
from hochschild.ghstructure import (
    WITNESS_LEFT,
    WITNESS_RIGHT,
    BracketMethod,
    ClassSymbol,
    CohClass,
    SymbolKind,
    basis_symbols,
    bracket_discrepancies,
    bracket_table,
    bv_obstruction,
    check_cocycles as cocycle_failures,
    cup,
    cup_certificate,
    format_class,
    gerstenhaber_bracket,
    infinite_generation_witness,
    jacobi_defect,
    positive_products_vanish,
    sample_triples,
)
from hochschild.homology import (
    Model,
    bigraded_rank_formula,
    euler_characteristic_check,
    hh_rank_formula,
    hochschild_bigraded,
    resolution_homology,
)
from hochschild.n2_theory import n2_theory
from hochschild.qma import PhiMethod, phi, phi_sequence, psi_vector
from hochschild.specseq import (
    collapse_and_extension_check,
    e1_page,
    e2_page,
    e2_row,
    exactness_bookkeeping,
    homotopy_identities,
    kernel_avoidance_check,
    z_span_check,
)
from lib.config import settings
from lib.performance_tracker import SuiteTiming, perf_tracker

logger = logging.getLogger(__name__)

SUITES = ("phi", "ranks", "bigraded", "collapse", "homotopy", "products", "bracket", "bv", "n2", "tangent")

Q = CoeffRing.rationals()
F2 = CoeffRing.prime_field(2)
F3 = CoeffRing.prime_field(3)


@dataclass
class CheckRecord:
    name: str
    expected: Any
    computed: Any
    status: str  # pass/fail/error
    details: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "expected": jsonable(self.expected),
            "computed": jsonable(self.computed),
            "pass": self.passed,
            "details": self.details,
        }


@dataclass
class VerifyReport:
    suite: str
    records: List[CheckRecord] = field(default_factory=list)
    wall_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "pass": self.passed,
            "checks": len(self.records),
            "failed": [r.name for r in self.failures()],
            "records": [r.to_dict() for r in self.records],
            "wall_ms": round(self.wall_ms, 1),
        }


def jsonable(value: Any) -> Any:
    """Plain JSON structure for check values"""
    if hasattr(value, "to_dict"):
        return value.to_dict()
    if isinstance(value, CohClass):
        return format_class(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (ClassSymbol, CoeffRing)):
        return str(value)
    return value


# A check is a picklable (name, function, args); the function returns (expected, computed)
CheckTask = Tuple[str, Callable[..., Tuple[Any, Any]], Tuple]


def _run_task(task: CheckTask) -> CheckRecord:
    name, func, args = task
    try:
        expected, computed = func(*args)
    except Exception as e:
        logger.error(f"✗ {name}: {type(e).__name__}: {e}")
        return CheckRecord(name, None, None, "error", f"{type(e).__name__}: {e}")
    status = "pass" if expected == computed else "fail"
    marker = "✓" if status == "pass" else "✗"
    logger.info(f"{marker} {name}")
    return CheckRecord(name, expected, computed, status)


# ---------------------------------------------------------------------------
# Individual checks
# ---------------------------------------------------------------------------


def check_phi_methods(m: int, max_q: int):
    reference = phi_sequence(m, max_q, PhiMethod.RECURSION)
    return {meth.value: reference for meth in PhiMethod}, {meth.value: phi_sequence(m, max_q, meth) for meth in PhiMethod}


def check_phi_m3(max_q: int):
    return [n + 1 for n in range(max_q + 1)], phi_sequence(3, max_q)


def check_phi_two(m: int):
    return m * m - 3 * m + 3, phi(m, 2)


def check_psi_sums(m: int, max_q: int):
    return phi_sequence(m, max_q)[1:], [sum(psi_vector(m, q)) for q in range(1, max_q + 1)]


def check_hh_ranks(m: int, target: str, ring: CoeffRing, max_n: int):
    table = hochschild_bigraded(m, standard_bimodule(m, target), ring, max_n)
    expected = [hh_rank_formula(m, target, n) for n in range(max_n + 1)]
    return expected, [table.totals[n].size_rank for n in range(max_n + 1)]


def check_bigraded_table(m: int, target: str, ring: CoeffRing, max_n: int):
    table = hochschild_bigraded(m, standard_bimodule(m, target), ring, max_n)
    computed = {(n, s): table.get(n, s).size_rank for n, s in table.support()}
    expected = {}
    for n in range(max_n + 1):
        for s in range(n - (m - 1), n + 1):
            value = bigraded_rank_formula(m, target, n, s)
            if value:
                expected[(n, s)] = value
    return expected, computed


def check_torsion_free(m: int, max_n: int):
    table = hochschild_bigraded(m, standard_bimodule(m, StandardKind.N), CoeffRing.integers(), max_n)
    return [], [n for n in range(max_n + 1) if not table.totals[n].is_free]


def check_koszul_vs_bar(m: int, target: str, ring: CoeffRing, max_n: int):
    coeff = standard_bimodule(m, target)
    koszul = hochschild_bigraded(m, coeff, ring, max_n, Model.KOSZUL)
    bar = hochschild_bigraded(m, coeff, ring, max_n, Model.BAR)
    return koszul.to_dict(), bar.to_dict()


def check_euler(m: int, max_d: int):
    return [True] * (max_d + 1), [euler_characteristic_check(m, d) for d in range(max_d + 1)]


def check_resolution_acyclic(m: int, max_i: int):
    return [FinAbGroup()] * (max_i + 1), [resolution_homology(m, i) for i in range(max_i + 1)]


def check_e2_structure(m: int, max_q: int):
    """E2(B) vanishes strictly inside, E2^{0,q}(B) = phi(q), E2(N) and the top row match the bigraded counts"""
    expected: Dict[str, Any] = {}
    computed: Dict[str, Any] = {}
    z = CoeffRing.integers()
    for kind in (StandardKind.B, StandardKind.N):
        ranks = {}
        free = True
        for q in range(-(m - 1), max_q + 1):
            for p, group in e2_row(m, kind, q, z).items():
                free = free and group.is_free
                if not group.is_trivial:
                    ranks[(p, q)] = group.size_rank
        predicted = {}
        for q in range(-(m - 1), max_q + 1):
            for p in e2_support_rows(m):
                if p + q >= 0:
                    value = bigraded_rank_formula(m, kind, p + q, q)
                    if value:
                        predicted[(p, q)] = value
        expected[kind.value] = predicted
        computed[kind.value] = ranks
        expected[f"{kind.value}/free"] = True
        computed[f"{kind.value}/free"] = free
    return expected, computed


def e2_support_rows(m: int) -> Tuple[int, ...]:
    return tuple(sorted({0, 1, m - 1}))


def check_collapse(m: int, target: str, ring: CoeffRing, max_n: int):
    report = collapse_and_extension_check(m, target, max_n, ring)
    return True, report.passed


def check_bookkeeping(m: int, max_q: int):
    return [0] * (max_q + 1), [exactness_bookkeeping(m, q) for q in range(max_q + 1)]


def check_z_span(m: int, max_q: int):
    return [True] * (max_q + 1), [bool(z_span_check(m, q)["ok"]) for q in range(max_q + 1)]


def check_homotopies(m: int, q: int):
    results = homotopy_identities(m, q)
    return {k: True for k in results}, results


def check_kernel_avoidance(m: int, max_q: int):
    return [True] * (max_q + 1), [kernel_avoidance_check(m, q) for q in range(max_q + 1)]


def check_products_vanish(m: int, ring: CoeffRing, max_total: int):
    _, nonzero = positive_products_vanish(m, max_total, ring)
    return [], nonzero


def check_unit(m: int, ring: CoeffRing, max_degree: int):
    one = CohClass.of(m, ClassSymbol.one())
    symbols = basis_symbols(m, max_degree)
    expected = [format_class(CohClass.of(m, s)) for s in symbols]
    computed = [format_class(cup(m, one, CohClass.of(m, s), ring)) for s in symbols]
    return expected, computed


def check_cup_certificates(m: int, ring: CoeffRing, max_total: int):
    """Every vanishing product of positive basis classes has a solved primitive"""
    symbols = [s for s in basis_symbols(m, max_total) if s.kind != SymbolKind.ONE.value]
    pairs = [(x, y) for x in symbols for y in symbols if x.degree + y.degree <= max_total]
    if m == 3:
        pairs.append((WITNESS_LEFT, WITNESS_RIGHT))
    missing = []
    for x, y in pairs:
        if not cup_certificate(m, CohClass.of(m, x), CohClass.of(m, y), ring).found:
            missing.append((str(x), str(y)))
    return [], missing


def check_cocycle_representatives(m: int, max_len: int):
    return [], cocycle_failures(m, max_len)


def check_witness(m: int, ring: CoeffRing):
    value = gerstenhaber_bracket(m, CohClass.of(m, WITNESS_LEFT), CohClass.of(m, WITNESS_RIGHT), BracketMethod.COCHAIN, ring)
    return "a(1,[2,1,1,1])", format_class(value)


def check_bracket_methods(m: int, ring: CoeffRing, max_total: int):
    return [], [(str(x), str(y)) for x, y, _, _ in bracket_discrepancies(m, max_total, ring)]


def check_antisymmetry(m: int, ring: CoeffRing, max_degree: int):
    table = bracket_table(m, basis_symbols(m, max_degree), BracketMethod.COCHAIN, ring)
    return [], [(str(x), str(y)) for x, y in table.antisymmetry_violations()]


def check_jacobi(m: int, ring: CoeffRing, max_degree: int, count: int):
    bad = []
    for x, y, z in sample_triples(m, max_degree, count):
        defect = jacobi_defect(m, CohClass.of(m, x), CohClass.of(m, y), CohClass.of(m, z), ring)
        if not defect.is_zero():
            bad.append((str(x), str(y), str(z)))
    return [], bad


def check_bv(m: int, ring: CoeffRing):
    return True, bv_obstruction(m, ring).holds


def check_infinite_generation(m: int, max_q: int):
    return True, bool(infinite_generation_witness(m, max_q)["ok"])


def check_n2(ring: CoeffRing, max_degree: int, bv_degree: int):
    report = n2_theory(ring, max_degree, bv_degree)
    return True, report.passed


def check_n2_group(ring: CoeffRing, n: int, expected: FinAbGroup):
    from hochschild.homology import hochschild

    return expected, hochschild(2, standard_bimodule(2, StandardKind.N), ring, n)


def check_tangent(m: int):
    return (3 * m * m - 7 * m + 4) // 2, tangent_dimension(m)


def check_normalizer_char2():
    """In characteristic 2 the normalizer of N_2 is all of M_2"""
    return 4, normalizer_dimension(2, F2)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def _ms(m: Optional[int], default: Sequence[int]) -> List[int]:
    return [m] if m is not None else list(default)


def suite_tasks(suite: str, m: Optional[int] = None) -> List[CheckTask]:
    tasks: List[CheckTask] = []
    if suite == "phi":
        for mm in _ms(m, range(2, 7)):
            tasks.append((f"phi/methods/m={mm}", check_phi_methods, (mm, 12)))
            tasks.append((f"phi/phi2/m={mm}", check_phi_two, (mm,)))
            tasks.append((f"phi/psi/m={mm}", check_psi_sums, (mm, 12)))
        tasks.append(("phi/m=3", check_phi_m3, (12,)))
    elif suite == "ranks":
        for mm in _ms(m, (3, 4, 5)):
            for ring in (Q, F2, F3):
                tasks.append((f"ranks/M/N/m={mm}/{ring}", check_hh_ranks, (mm, "M/N", ring, 8)))
            tasks.append((f"ranks/M/N/bigraded/m={mm}", check_bigraded_table, (mm, "M/N", Q, 8)))
        for mm in [x for x in _ms(m, (2, 3)) if x <= 3]:
            for target in ("N", "M/N", "R"):
                for ring in (Q, F2, F3):
                    tasks.append((f"ranks/koszul_vs_bar/m={mm}/{target}/{ring}", check_koszul_vs_bar, (mm, target, ring, 4)))
    elif suite == "bigraded":
        for mm in _ms(m, (3, 4, 5)):
            tasks.append((f"bigraded/N/totals/m={mm}", check_hh_ranks, (mm, "N", Q, 8)))
            tasks.append((f"bigraded/N/table/m={mm}", check_bigraded_table, (mm, "N", Q, 8)))
            tasks.append((f"bigraded/B/table/m={mm}", check_bigraded_table, (mm, "B", Q, 6)))
            tasks.append((f"bigraded/N/torsion_free/m={mm}", check_torsion_free, (mm, 5)))
            tasks.append((f"bigraded/euler/m={mm}", check_euler, (mm, 6)))
            tasks.append((f"bigraded/resolution/m={mm}", check_resolution_acyclic, (mm, 4)))
    elif suite == "collapse":
        for mm in _ms(m, (3, 4, 5)):
            tasks.append((f"collapse/e2_structure/m={mm}", check_e2_structure, (mm, 8)))
            tasks.append((f"collapse/bookkeeping/m={mm}", check_bookkeeping, (mm, 6)))
            tasks.append((f"collapse/z_span/m={mm}", check_z_span, (mm, 5)))
        for mm in [x for x in _ms(m, (3, 4)) if x <= 4]:
            for target in ("N", "B", "M/N", "B/N", "M/J", "R"):
                tasks.append((f"collapse/{target}/m={mm}", check_collapse, (mm, target, CoeffRing.integers(), 6)))
    elif suite == "homotopy":
        for mm in _ms(m, (3, 4, 5)):
            for q in range(7):
                tasks.append((f"homotopy/m={mm}/q={q}", check_homotopies, (mm, q)))
            tasks.append((f"homotopy/kernel_avoidance/m={mm}", check_kernel_avoidance, (mm, 6)))
    elif suite == "products":
        for mm in _ms(m, (3, 4)):
            for ring in (Q, F2):
                tasks.append((f"products/vanish/m={mm}/{ring}", check_products_vanish, (mm, ring, 5)))
                tasks.append((f"products/certificates/m={mm}/{ring}", check_cup_certificates, (mm, ring, 5)))
            tasks.append((f"products/unit/m={mm}", check_unit, (mm, Q, 3)))
            tasks.append((f"products/cocycles/m={mm}", check_cocycle_representatives, (mm, 3)))
    elif suite == "bracket":
        for mm in _ms(m, (3, 4)):
            tasks.append((f"bracket/witness/m={mm}", check_witness, (mm, Q)))
            for ring in (Q, F2):
                tasks.append((f"bracket/methods/m={mm}/{ring}", check_bracket_methods, (mm, ring, 4)))
        if m in (None, 3):
            tasks.append(("bracket/antisymmetry/m=3", check_antisymmetry, (3, Q, 3)))
            tasks.append(("bracket/jacobi/m=3", check_jacobi, (3, Q, 3, 50)))
    elif suite == "bv":
        for mm in _ms(m, (3, 4, 5)):
            for ring in (Q, F2):
                tasks.append((f"bv/m={mm}/{ring}", check_bv, (mm, ring)))
            tasks.append((f"bv/infinite_generation/m={mm}", check_infinite_generation, (mm, 6)))
    elif suite == "n2":
        z = CoeffRing.integers()
        tasks.append(("n2/Z", check_n2, (z, 8, 6)))
        tasks.append(("n2/Zmod4", check_n2, (CoeffRing.integers_mod(4), 8, 6)))
        tasks.append(("n2/Q", check_n2, (Q, 8, 6)))
        tasks.append(("n2/F2", check_n2, (F2, 8, 6)))
        tasks.append(("n2/F3", check_n2, (F3, 8, 6)))
        tasks.append(("n2/Z/n=0", check_n2_group, (z, 0, FinAbGroup(2))))
        tasks.append(("n2/Z/n=2", check_n2_group, (z, 2, FinAbGroup(1, (2,)))))
        tasks.append(("n2/Z/n=3", check_n2_group, (z, 3, FinAbGroup(1))))
        tasks.append(("n2/Zmod4/n=1", check_n2_group, (CoeffRing.integers_mod(4), 1, FinAbGroup(0, (2, 4)))))
    elif suite == "tangent":
        for mm in _ms(m, (3, 4, 5)):
            tasks.append((f"tangent/m={mm}", check_tangent, (mm,)))
        tasks.append(("tangent/normalizer_char2/m=2", check_normalizer_char2, ()))
    else:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)} or all")
    return tasks


def run_suite(suite: str, m: Optional[int] = None, workers: Optional[int] = None) -> VerifyReport:
    """Run one suite; records come back sorted by check name"""
    tasks = suite_tasks(suite, m)
    workers = settings.workers if workers is None else workers
    logger.info(f"Running suite {suite} ({len(tasks)} checks, {workers} worker(s))")
    timer_id = perf_tracker.start_timer(f"suite_{suite}")
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_task, tasks))
    else:
        records = [_run_task(t) for t in tasks]
    wall_ms = perf_tracker.end_timer(timer_id, f"suite_{suite}", {"m": m})
    report = VerifyReport(suite, sorted(records, key=lambda r: r.name), wall_ms)
    perf_tracker.record_suite(SuiteTiming(suite, wall_ms, len(records), sum(r.passed for r in records)))
    return report


def run_suites(suite: str, m: Optional[int] = None, workers: Optional[int] = None) -> List[VerifyReport]:
    names = SUITES if suite == "all" else (suite,)
    return [run_suite(name, m, workers) for name in names]
