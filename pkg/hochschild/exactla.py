"""
Exact Linear Algebra - Smith normal form, ranks, solves and cohomology of free complexes

Everything is computed on arbitrary-precision Python integers. Field ranks use
sparse elimination with Markowitz-style pivot choice; integer invariant factors
peel off unit pivots sparsely and finish the (small) residual with a dense
Smith normal form. Coefficients in Z/N are never eliminated directly: they are
derived from the integer data through the universal coefficient sequence.
"""

import heapq
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sympy import factorint, isprime

logger = logging.getLogger(__name__)

DENSE_LIMIT = 10**6


class HochschildError(Exception):
    """Base class for every error raised by the hochschild package"""


class NotAComplex(HochschildError):
    pass


class UnsupportedRing(HochschildError):
    pass


class DimensionBudgetExceeded(HochschildError):
    pass


class InvalidLayer(HochschildError):
    pass


class InvalidIndex(HochschildError):
    pass


class NotACocycle(HochschildError):
    pass


class UnsupportedPair(HochschildError):
    pass


class ExpressionSyntaxError(HochschildError):
    pass


# ---------------------------------------------------------------------------
# Coefficient rings
# ---------------------------------------------------------------------------


class RingKind(Enum):
    INTEGERS = "Z"
    RATIONALS = "Q"
    PRIME_FIELD = "Fp"
    INTEGERS_MOD = "Zmod"


@dataclass(frozen=True)
class CoeffRing:
    kind: RingKind
    modulus: int = 0

    def __post_init__(self):
        if self.kind is RingKind.PRIME_FIELD and not (self.modulus >= 2 and isprime(self.modulus)):
            raise UnsupportedRing(f"Fp needs a prime, got {self.modulus}")
        if self.kind is RingKind.INTEGERS_MOD and self.modulus < 2:
            raise UnsupportedRing(f"Zmod needs N >= 2, got {self.modulus}")
        if self.kind in (RingKind.INTEGERS, RingKind.RATIONALS) and self.modulus != 0:
            raise UnsupportedRing(f"{self.kind.value} takes no modulus")

    @classmethod
    def integers(cls) -> "CoeffRing":
        return cls(RingKind.INTEGERS)

    @classmethod
    def rationals(cls) -> "CoeffRing":
        return cls(RingKind.RATIONALS)

    @classmethod
    def prime_field(cls, p: int) -> "CoeffRing":
        return cls(RingKind.PRIME_FIELD, p)

    @classmethod
    def integers_mod(cls, n: int) -> "CoeffRing":
        return cls(RingKind.INTEGERS_MOD, n)

    @classmethod
    def parse(cls, text: str) -> "CoeffRing":
        """Parse `Z`, `Q`, `Fp:<p>` or `Zmod:<N>`"""
        raw = text.strip()
        if raw == "Z":
            return cls.integers()
        if raw == "Q":
            return cls.rationals()
        head, sep, tail = raw.partition(":")
        if sep and tail.strip().isdigit():
            if head == "Fp":
                return cls.prime_field(int(tail))
            if head == "Zmod":
                return cls.integers_mod(int(tail))
        raise UnsupportedRing(f"unrecognised ring {text!r}; expected Z, Q, Fp:<p> or Zmod:<N>")

    @property
    def is_field(self) -> bool:
        return self.kind in (RingKind.RATIONALS, RingKind.PRIME_FIELD)

    @property
    def characteristic(self) -> int:
        return self.modulus

    def reduce(self, value: Any) -> Any:
        """Canonical representative of an integer (or rational) in this ring"""
        if self.kind is RingKind.RATIONALS:
            return Fraction(value)
        if self.kind is RingKind.INTEGERS:
            return value
        if isinstance(value, Fraction):
            return (value.numerator * pow(value.denominator, -1, self.modulus)) % self.modulus
        return value % self.modulus

    def __str__(self) -> str:
        return self.kind.value if self.modulus == 0 else f"{self.kind.value}:{self.modulus}"


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IntMatrix:
    """Integer matrix acting on column vectors (rows = codomain dimension).

    The sparse view is always present; the dense row-major tuple is kept only
    below DENSE_LIMIT entries.
    """

    rows: int
    cols: int
    sparse: Mapping[Tuple[int, int], int] = field(repr=False)
    entries: Optional[Tuple[int, ...]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError(f"negative shape {self.rows}x{self.cols}")
        for (r, c), v in self.sparse.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"entry ({r},{c}) outside {self.rows}x{self.cols}")
            if v == 0:
                raise ValueError("sparse view must not store zeros")
        if self.entries is not None and len(self.entries) != self.rows * self.cols:
            raise ValueError("dense entry count must equal rows * cols")

    @classmethod
    def from_triplets(cls, rows: int, cols: int, triplets: Iterable[Tuple[int, int, int]]) -> "IntMatrix":
        acc: Dict[Tuple[int, int], int] = defaultdict(int)
        for r, c, v in triplets:
            acc[(r, c)] += v
        sparse = {k: v for k, v in acc.items() if v}
        return cls._build(rows, cols, sparse)

    @classmethod
    def from_dict(cls, rows: int, cols: int, data: Mapping[Tuple[int, int], int]) -> "IntMatrix":
        return cls._build(rows, cols, {k: v for k, v in data.items() if v})

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = len(data)
        width = len(data[0]) if rows else (cols or 0)
        if any(len(row) != width for row in data):
            raise ValueError("ragged rows")
        sparse = {(r, c): int(v) for r, row in enumerate(data) for c, v in enumerate(row) if v}
        return cls._build(rows, width, sparse)

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls._build(rows, cols, {})

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls._build(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def _build(cls, rows: int, cols: int, sparse: Dict[Tuple[int, int], int]) -> "IntMatrix":
        entries = None
        if rows * cols <= DENSE_LIMIT:
            flat = [0] * (rows * cols)
            for (r, c), v in sparse.items():
                flat[r * cols + c] = v
            entries = tuple(flat)
        return cls(rows, cols, sparse, entries)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.sparse)

    def __getitem__(self, key: Tuple[int, int]) -> int:
        return self.sparse.get(key, 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and dict(self.sparse) == dict(other.sparse)

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, frozenset(self.sparse.items())))

    def is_zero(self) -> bool:
        return not self.sparse

    def to_rows(self) -> List[List[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.sparse.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> Dict[int, Dict[int, int]]:
        out: Dict[int, Dict[int, int]] = defaultdict(dict)
        for (r, c), v in self.sparse.items():
            out[r][c] = v
        return out

    def column(self, c: int) -> Dict[int, int]:
        return {r: v for (r, cc), v in self.sparse.items() if cc == c}

    def transpose(self) -> "IntMatrix":
        return IntMatrix._build(self.cols, self.rows, {(c, r): v for (r, c), v in self.sparse.items()})

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        right = other.row_dicts()
        acc: Dict[Tuple[int, int], int] = defaultdict(int)
        for (r, k), v in self.sparse.items():
            for c, w in right.get(k, {}).items():
                acc[(r, c)] += v * w
        return IntMatrix._build(self.rows, other.cols, {k: v for k, v in acc.items() if v})

    def apply(self, vector: Mapping[int, Any]) -> Dict[int, Any]:
        """Matrix times a sparse column vector"""
        out: Dict[int, Any] = defaultdict(int)
        for (r, c), v in self.sparse.items():
            x = vector.get(c)
            if x:
                out[r] += v * x
        return {r: v for r, v in out.items() if v}

    def reduced(self, modulus: int) -> "IntMatrix":
        return IntMatrix._build(
            self.rows, self.cols, {k: v % modulus for k, v in self.sparse.items() if v % modulus}
        )

    @staticmethod
    def from_columns(rows: int, columns: Sequence[Mapping[int, int]]) -> "IntMatrix":
        sparse = {(r, c): v for c, col in enumerate(columns) for r, v in col.items() if v}
        return IntMatrix._build(rows, len(columns), sparse)

    @staticmethod
    def vstack(blocks: Sequence["IntMatrix"], cols: int) -> "IntMatrix":
        sparse: Dict[Tuple[int, int], int] = {}
        offset = 0
        for block in blocks:
            if block.cols != cols:
                raise ValueError("vstack needs equal column counts")
            for (r, c), v in block.sparse.items():
                sparse[(r + offset, c)] = v
            offset += block.rows
        return IntMatrix._build(offset, cols, sparse)


@dataclass(frozen=True)
class SNFResult:
    invariant_factors: Tuple[int, ...]
    left_transform: IntMatrix
    right_transform: IntMatrix

    def diagonal(self, rows: int, cols: int) -> IntMatrix:
        return IntMatrix.from_dict(rows, cols, {(i, i): d for i, d in enumerate(self.invariant_factors)})

    def check(self, original: IntMatrix) -> bool:
        product = self.left_transform.matmul(original).matmul(self.right_transform)
        return product == self.diagonal(original.rows, original.cols)


# ---------------------------------------------------------------------------
# Dense Smith normal form
# ---------------------------------------------------------------------------


def _min_abs_entry(a: List[List[int]], t: int) -> Optional[Tuple[int, int]]:
    best = None
    best_abs = 0
    for r in range(t, len(a)):
        row = a[r]
        for c in range(t, len(row)):
            v = row[c]
            if v and (best is None or abs(v) < best_abs):
                best, best_abs = (r, c), abs(v)
                if best_abs == 1:
                    return best
    return best


def _snf_reduce(
    a: List[List[int]], rows: int, cols: int, track: bool
) -> Tuple[List[int], Optional[List[List[int]]], Optional[List[List[int]]]]:
    """In-place reduction of `a` to Smith form; returns factors and (L, R) when tracking.

    Pivot: minimal nonzero |entry|, first in row-major order.
    """
    left = [[int(i == j) for j in range(rows)] for i in range(rows)] if track else None
    right = [[int(i == j) for j in range(cols)] for i in range(cols)] if track else None

    def swap_rows(i: int, j: int):
        a[i], a[j] = a[j], a[i]
        if left is not None:
            left[i], left[j] = left[j], left[i]

    def swap_cols(i: int, j: int):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if right is not None:
            for row in right:
                row[i], row[j] = row[j], row[i]

    def add_row(dst: int, src: int, q: int):
        # row dst += q * row src
        rs, rd = a[src], a[dst]
        for c in range(cols):
            if rs[c]:
                rd[c] += q * rs[c]
        if left is not None:
            ls, ld = left[src], left[dst]
            for c in range(rows):
                if ls[c]:
                    ld[c] += q * ls[c]

    def add_col(dst: int, src: int, q: int):
        for row in a:
            if row[src]:
                row[dst] += q * row[src]
        if right is not None:
            for row in right:
                if row[src]:
                    row[dst] += q * row[src]

    factors: List[int] = []
    t = 0
    while t < min(rows, cols):
        pivot = _min_abs_entry(a, t)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            p = a[t][t]
            clean = True
            for r in range(t + 1, rows):
                if a[r][t]:
                    add_row(r, t, -(a[r][t] // p))
                    clean = clean and a[r][t] == 0
            for c in range(t + 1, cols):
                if a[t][c]:
                    add_col(c, t, -(a[t][c] // p))
                    clean = clean and a[t][c] == 0
            if not clean:
                candidates = [(abs(a[r][t]), r, t) for r in range(t + 1, rows) if a[r][t]]
                candidates += [(abs(a[t][c]), t, c) for c in range(t + 1, cols) if a[t][c]]
                _, r, c = min(candidates)
                if r != t:
                    swap_rows(t, r)
                else:
                    swap_cols(t, c)
                continue
            bad = next(
                (r for r in range(t + 1, rows) if any(a[r][c] % p for c in range(t + 1, cols))),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-v for v in a[t]]
            if left is not None:
                left[t] = [-v for v in left[t]]
        factors.append(a[t][t])
        t += 1
    return factors, left, right


def smith_normal_form(matrix: IntMatrix) -> SNFResult:
    """Smith normal form with unimodular transforms, L · A · R = diag(d_1, ..., d_r, 0, ...)"""
    a = matrix.to_rows()
    factors, left, right = _snf_reduce(a, matrix.rows, matrix.cols, track=True)
    result = SNFResult(
        invariant_factors=tuple(factors),
        left_transform=IntMatrix.from_rows(left or [], cols=matrix.rows),
        right_transform=IntMatrix.from_rows(right or [], cols=matrix.cols),
    )
    if not result.check(matrix):
        raise ArithmeticError("Smith transforms failed the L·A·R = D identity")
    return result


# ---------------------------------------------------------------------------
# Sparse elimination
# ---------------------------------------------------------------------------


class _UnitPivotEliminator:
    """Sparse elimination on unit pivots with Markowitz-style ordering.

    Over F_p every nonzero entry is a unit and elimination runs to completion.
    Over Z only +-1 pivots are taken; what remains is a residual matrix whose
    Smith form completes the answer (unit pivots contribute invariant factor 1).
    """

    def __init__(self, matrix: IntMatrix, modulus: Optional[int] = None):
        self.modulus = modulus
        self.rows: Dict[int, Dict[int, int]] = {}
        self.cols: Dict[int, set] = defaultdict(set)
        for (r, c), v in matrix.sparse.items():
            if modulus:
                v %= modulus
                if not v:
                    continue
            self.rows.setdefault(r, {})[c] = v
            self.cols[c].add(r)
        self.pivot_count = 0

    def _is_unit(self, v: int) -> bool:
        return bool(self.modulus) or abs(v) == 1

    def _eliminate(self, pr: int, pc: int):
        prow = self.rows.pop(pr)
        for c in prow:
            self.cols[c].discard(pr)
        pv = prow[pc]
        inv = pow(pv, -1, self.modulus) if self.modulus else pv
        for r in list(self.cols[pc]):
            row = self.rows[r]
            factor = row[pc] * inv
            for c, v in prow.items():
                nv = row.get(c, 0) - factor * v
                if self.modulus:
                    nv %= self.modulus
                if nv:
                    if c not in row:
                        self.cols[c].add(r)
                    row[c] = nv
                elif c in row:
                    del row[c]
                    self.cols[c].discard(r)
            if not row:
                del self.rows[r]
        self.cols.pop(pc, None)

    def run(self) -> int:
        progress = True
        while progress:
            progress = False
            heap = [(len(rs), c) for c, rs in self.cols.items() if rs]
            heapq.heapify(heap)
            while heap:
                count, c = heapq.heappop(heap)
                rs = self.cols.get(c)
                if not rs:
                    continue
                if count != len(rs):
                    heapq.heappush(heap, (len(rs), c))
                    continue
                units = [r for r in rs if self._is_unit(self.rows[r][c])]
                if not units:
                    continue
                best = min(units, key=lambda r: (len(self.rows[r]), r))
                self._eliminate(best, c)
                self.pivot_count += 1
                progress = True
        return self.pivot_count

    def residual(self) -> List[List[int]]:
        if not self.rows:
            return []
        live_cols = sorted({c for row in self.rows.values() for c in row})
        index = {c: i for i, c in enumerate(live_cols)}
        out = []
        for r in sorted(self.rows):
            dense = [0] * len(live_cols)
            for c, v in self.rows[r].items():
                dense[index[c]] = v
            out.append(dense)
        return out


def _bareiss_rank(a: List[List[int]]) -> int:
    """Fraction-free Gaussian elimination rank over Q"""
    a = [row[:] for row in a]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    rank = 0
    prev = 1
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if a[r][c]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][c]
        for r in range(rank + 1, rows):
            lead = a[r][c]
            row = a[r]
            prow = a[rank]
            for k in range(c + 1, cols):
                row[k] = (row[k] * p - lead * prow[k]) // prev
            row[c] = 0
        prev = p
        rank += 1
        if rank == rows:
            break
    return rank


def invariant_factors(matrix: IntMatrix) -> Tuple[int, ...]:
    """Nonzero invariant factors over Z, without transforms"""
    elim = _UnitPivotEliminator(matrix)
    units = elim.run()
    residual = elim.residual()
    if residual:
        size = len(residual) * len(residual[0])
        if size > DENSE_LIMIT:
            logger.warning(f"Dense Smith residual of {len(residual)}x{len(residual[0])} after {units} unit pivots")
        rest, _, _ = _snf_reduce(residual, len(residual), len(residual[0]), track=False)
    else:
        rest = []
    return (1,) * units + tuple(rest)


def rank(matrix: IntMatrix, ring: CoeffRing) -> int:
    """Rank over a field; over Z this is the rank over Q"""
    if matrix.is_zero():
        return 0
    if ring.kind is RingKind.PRIME_FIELD:
        return _UnitPivotEliminator(matrix, ring.modulus).run()
    if ring.kind in (RingKind.RATIONALS, RingKind.INTEGERS):
        elim = _UnitPivotEliminator(matrix)
        units = elim.run()
        residual = elim.residual()
        return units + (_bareiss_rank(residual) if residual else 0)
    raise UnsupportedRing(f"rank over {ring} is not defined; use cohomology_of_pair")


def dense_rank_mod_p(matrix: IntMatrix, p: int) -> int:
    """Plain dense Gaussian elimination over F_p on an object array (oracle for the sparse path)"""
    a = np.array(matrix.to_rows(), dtype=object).reshape(matrix.rows, matrix.cols) % p
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i, c] % p != 0), None)
        if pivot is None:
            continue
        if pivot != r:
            a[[r, pivot], :] = a[[pivot, r], :]
        inv = pow(int(a[r, c]) % p, -1, p)
        a[r, :] = (a[r, :] * inv) % p
        for i in range(r + 1, rows):
            if a[i, c] % p != 0:
                a[i, :] = (a[i, :] - a[i, c] * a[r, :]) % p
        r += 1
        if r == rows:
            break
    return r


# ---------------------------------------------------------------------------
# Finitely generated abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinAbGroup:
    free_rank: int = 0
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        if any(t < 2 for t in self.torsion):
            raise ValueError(f"torsion orders must be >= 2: {self.torsion}")
        if any(b % a for a, b in zip(self.torsion, self.torsion[1:])):
            raise ValueError(f"torsion must form a divisibility chain: {self.torsion}")

    @classmethod
    def from_cyclic(cls, free_rank: int, orders: Iterable[int]) -> "FinAbGroup":
        """Normalise Z^r + sum Z/n_i into invariant-factor form"""
        by_prime: Dict[int, List[int]] = defaultdict(list)
        for n in orders:
            if n == 0:
                free_rank += 1
                continue
            for prime, exp in factorint(abs(n)).items():
                by_prime[prime].append(exp)
        length = max((len(v) for v in by_prime.values()), default=0)
        factors = [1] * length
        for prime, exps in by_prime.items():
            for k, e in enumerate(sorted(exps, reverse=True)):
                factors[k] *= prime**e
        return cls(free_rank, tuple(sorted(f for f in factors if f > 1)))

    def direct_sum(self, other: "FinAbGroup") -> "FinAbGroup":
        return FinAbGroup.from_cyclic(self.free_rank + other.free_rank, self.torsion + other.torsion)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_free(self) -> bool:
        return not self.torsion

    @property
    def size_rank(self) -> int:
        """Free rank plus number of cyclic torsion summands (vector-space dimension over a field)"""
        return self.free_rank + len(self.torsion)

    def to_dict(self) -> Dict[str, Any]:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


def trivial_group() -> FinAbGroup:
    return FinAbGroup()


# ---------------------------------------------------------------------------
# Cohomology of a pair of differentials
# ---------------------------------------------------------------------------


def cohomology_of_pair(d_in: IntMatrix, d_out: IntMatrix, ring: CoeffRing) -> FinAbGroup:
    """ker(d_out) / im(d_in) with coefficients extended to `ring`.

    d_in: C^{n-1} -> C^n and d_out: C^n -> C^{n+1}, both over Z.
    """
    if d_in.rows != d_out.cols:
        raise ValueError(f"middle dimensions disagree: {d_in.rows} vs {d_out.cols}")
    if not d_out.matmul(d_in).is_zero():
        raise NotAComplex(f"d_out · d_in != 0 for blocks {d_in.shape} -> {d_out.shape}")
    middle = d_in.rows

    if ring.is_field:
        free = middle - rank(d_in, ring) - rank(d_out, ring)
        return FinAbGroup(free)

    f_in = invariant_factors(d_in)
    f_out = invariant_factors(d_out)
    free = middle - len(f_in) - len(f_out)
    if ring.kind is RingKind.INTEGERS:
        return FinAbGroup.from_cyclic(free, [d for d in f_in if d > 1])

    n = ring.modulus
    orders = [n] * free
    orders += [math.gcd(d, n) for d in f_in]
    orders += [math.gcd(e, n) for e in f_out]
    return FinAbGroup.from_cyclic(0, [o for o in orders if o > 1])


# ---------------------------------------------------------------------------
# Linear solves
# ---------------------------------------------------------------------------


class EchelonReducer:
    """Incremental sparse echelon basis over Q or F_p that remembers combinations.

    Each stored pivot row is a known linear combination of tagged generators, so
    reducing a vector to zero yields a certificate of membership in their span.
    """

    def __init__(self, ring: CoeffRing):
        if not ring.is_field:
            raise UnsupportedRing(f"echelon reduction needs a field, got {ring}")
        self.ring = ring
        self.modulus = ring.modulus if ring.kind is RingKind.PRIME_FIELD else 0
        self.pivots: Dict[int, Tuple[Dict[int, Any], Dict[Hashable, Any]]] = {}
        self._created: Dict[int, int] = {}

    def _coerce(self, v: Any) -> Any:
        return self.ring.reduce(v)

    def _axpy(self, target: Dict[Any, Any], source: Mapping[Any, Any], factor: Any):
        for k, v in source.items():
            nv = target.get(k, 0) + factor * v
            if self.modulus:
                nv %= self.modulus
            if nv:
                target[k] = nv
            else:
                target.pop(k, None)

    def reduce(self, vector: Mapping[int, Any]) -> Tuple[Dict[int, Any], Dict[Hashable, Any]]:
        """Return (remainder, combo) with vector = remainder + sum combo[tag] * generator[tag]"""
        row = {c: self._coerce(v) for c, v in vector.items()}
        row = {c: v for c, v in row.items() if v}
        combo: Dict[Hashable, Any] = {}
        while True:
            hits = [c for c in row if c in self.pivots]
            if not hits:
                return row, combo
            c = min(hits, key=self._created.__getitem__)
            factor = row[c]
            prow, pcombo = self.pivots[c]
            self._axpy(row, prow, -factor)
            self._axpy(combo, pcombo, factor)

    def add(self, vector: Mapping[int, Any], tag: Hashable) -> bool:
        """Insert a generator; False when it already lies in the span"""
        remainder, combo = self.reduce(vector)
        if not remainder:
            return False
        lead_col = min(remainder)
        lead = remainder[lead_col]
        inv = pow(lead, -1, self.modulus) if self.modulus else 1 / Fraction(lead)
        own: Dict[Hashable, Any] = {tag: 1}
        self._axpy(own, combo, -1)
        prow: Dict[int, Any] = {}
        pcombo: Dict[Hashable, Any] = {}
        self._axpy(prow, remainder, inv)
        self._axpy(pcombo, own, inv)
        self.pivots[lead_col] = (prow, pcombo)
        self._created[lead_col] = len(self._created)
        return True

    def solve(self, vector: Mapping[int, Any]) -> Optional[Dict[Hashable, Any]]:
        remainder, combo = self.reduce(vector)
        return None if remainder else combo

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _solve_over_field(a: IntMatrix, b: Sequence[int], ring: CoeffRing) -> Optional[List[Any]]:
    reducer = EchelonReducer(ring)
    columns: Dict[int, Dict[int, int]] = defaultdict(dict)
    for (r, c), v in a.sparse.items():
        columns[c][r] = v
    for c in sorted(columns):
        reducer.add(columns[c], c)
    combo = reducer.solve({r: v for r, v in enumerate(b) if v})
    if combo is None:
        return None
    x = [ring.reduce(0)] * a.cols
    for c, v in combo.items():
        x[c] = v
    return x


def _solve_via_snf(a: IntMatrix, b: Sequence[int], modulus: int) -> Optional[List[int]]:
    snf = smith_normal_form(a)
    c = snf.left_transform.apply({r: v for r, v in enumerate(b) if v})
    y: Dict[int, int] = {}
    for i in range(a.rows):
        ci = c.get(i, 0)
        if i < len(snf.invariant_factors):
            d = snf.invariant_factors[i]
            if modulus:
                g = math.gcd(d, modulus)
                if ci % g:
                    return None
                step = modulus // g
                y[i] = ((ci // g) * pow(d // g, -1, step)) % step if step > 1 else 0
            else:
                if ci % d:
                    return None
                y[i] = ci // d
        elif (ci % modulus if modulus else ci) != 0:
            return None
    x = snf.right_transform.apply(y)
    return [(x.get(j, 0) % modulus) if modulus else x.get(j, 0) for j in range(a.cols)]


def solve_linear(a: IntMatrix, b: Sequence[int], ring: CoeffRing) -> Optional[List[Any]]:
    """A solution x of a·x = b over `ring`, or None when the system is inconsistent"""
    if len(b) != a.rows:
        raise ValueError(f"right-hand side has {len(b)} entries, matrix has {a.rows} rows")
    if ring.is_field:
        return _solve_over_field(a, b, ring)
    return _solve_via_snf(a, b, ring.modulus)


def nullity(matrix: IntMatrix, ring: CoeffRing) -> int:
    return matrix.cols - rank(matrix, ring)
