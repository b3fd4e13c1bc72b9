"""
Horn matrices and Horn pairs.

A Horn matrix H (m x (n+1), integer, zero column sums) together with a coefficient
vector lambda defines the rational map

    u -> ( lambda_j * prod_i (H u)_i ** h_ij )_j ,

the Horn map. Columns are indexed 0..n like the coordinates of the map; rows are
labelled (default x1..xm) because they are the variables of the polynomial side.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd, prod
from typing import Dict, List, Optional, Sequence, Tuple

from .conf import get_option
from .exactalg import SparsePoly, as_rational, format_rational, row_echelon
from .exceptions import InputError, InvalidHornMatrix, PoleAtInput, SearchBudgetExceeded

logger = logging.getLogger('hornmle')

CoefficientVector = Tuple[Fraction, ...]
SignVector = Tuple[int, ...]

# grid evaluation is only preferred to symbolic expansion below this many points
GRID_POINT_LIMIT = 200000


@dataclass(frozen=True)
class HornMatrix:
    entries: Tuple[Tuple[int, ...], ...]
    row_labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        entries = tuple(tuple(int(x) for x in row) for row in self.entries)
        if not entries or not entries[0]:
            raise InvalidHornMatrix("H needs at least one row and one column")
        width = len(entries[0])
        for i, row in enumerate(entries):
            if len(row) != width:
                raise InvalidHornMatrix(f"row {i} has {len(row)} entries, expected {width}")
        for j in range(width):
            total = sum(row[j] for row in entries)
            if total:
                raise InvalidHornMatrix(f"column {j} sums to {total}")
        labels = self.row_labels
        if labels is None:
            labels = tuple(f"x{i + 1}" for i in range(len(entries)))
        labels = tuple(str(label) for label in labels)
        if len(labels) != len(entries):
            raise InvalidHornMatrix(f"{len(labels)} row labels for {len(entries)} rows")
        object.__setattr__(self, 'entries', entries)
        object.__setattr__(self, 'row_labels', labels)

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def n_columns(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.m, self.n_columns

    def column(self, j: int) -> Tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def columns(self) -> List[Tuple[int, ...]]:
        return [self.column(j) for j in range(self.n_columns)]

    def linear_forms(self, u: Sequence) -> Tuple[Fraction, ...]:
        if len(u) != self.n_columns:
            raise InputError(f"u has {len(u)} coordinates, H has {self.n_columns} columns")
        u = [as_rational(x) for x in u]
        return tuple(sum((h * x for h, x in zip(row, u) if h), Fraction(0)) for row in self.entries)

    def to_dict(self) -> dict:
        return {'H': [list(row) for row in self.entries], 'row_labels': list(self.row_labels)}


def coefficient_vector(values: Sequence) -> CoefficientVector:
    lam = tuple(as_rational(x) for x in values)
    for j, x in enumerate(lam):
        if x == 0:
            raise InvalidHornMatrix(f"lambda[{j}] is zero")
    return lam


class PairStatus(str, Enum):
    UNVERIFIED = 'unverified'
    FRIENDLY = 'friendly'
    HORN = 'horn'


@dataclass(frozen=True)
class HornPair:
    H: HornMatrix
    lam: CoefficientVector
    status: PairStatus = PairStatus.UNVERIFIED

    def __post_init__(self):
        lam = coefficient_vector(self.lam)
        if len(lam) != self.H.n_columns:
            raise InvalidHornMatrix(f"lambda has {len(lam)} entries, H has {self.H.n_columns} columns")
        object.__setattr__(self, 'lam', lam)

    def evaluate(self, u: Sequence) -> Tuple[Fraction, ...]:
        return horn_map_eval(self, u)

    def to_dict(self) -> dict:
        data = self.H.to_dict()
        data['lambda'] = [format_rational(x) for x in self.lam]
        data['status'] = self.status.value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'HornPair':
        H = HornMatrix(data['H'], data.get('row_labels'))
        return cls(H, data['lambda'], PairStatus(data.get('status', 'unverified')))


@dataclass(frozen=True)
class HornVerdict:
    friendly: bool
    reduced: bool
    sign_consistent: bool
    positive: bool
    sigma: SignVector

    @property
    def horn(self) -> bool:
        return self.friendly and self.reduced and self.sign_consistent and self.positive

    def to_dict(self) -> dict:
        return {
            'friendly': self.friendly,
            'horn': self.horn,
            'sigma': list(self.sigma),
            'reduced': self.reduced,
            'sign_consistent': self.sign_consistent,
            'positive': self.positive,
        }


def horn_map_eval(pair: HornPair, u: Sequence) -> Tuple[Fraction, ...]:
    H = pair.H
    forms = H.linear_forms(u)
    values = []
    for j, lam in enumerate(pair.lam):
        value = lam
        for i, row in enumerate(H.entries):
            h = row[j]
            if not h:
                continue
            if forms[i] == 0 and h < 0:
                raise PoleAtInput(f"linear form {H.row_labels[i]} vanishes at u")
            value *= forms[i] ** h
        values.append(value)
    return tuple(values)


# ---------------------------------------------------------------- reduction

def primitive_row(row: Sequence[int]) -> Tuple[Tuple[int, ...], int]:
    """(r, c) with row == c * r, r primitive and its first nonzero entry positive; c = 0 for a zero row."""
    g = reduce(gcd, row, 0)
    if g == 0:
        return tuple(row), 0
    if next(x for x in row if x) < 0:
        g = -g
    return tuple(x // g for x in row), g


def _aggregate_rows(H: HornMatrix, lam: Sequence[Fraction]):
    """Sum collinear rows and adjust lambda so the Horn map is unchanged."""
    groups: Dict[Tuple[int, ...], List[Tuple[int, int]]] = {}
    for i, row in enumerate(H.entries):
        r, c = primitive_row(row)
        if c:
            groups.setdefault(r, []).append((i, c))
    factors = [Fraction(1)] * H.n_columns
    rows, labels = [], []
    for r, members in groups.items():
        total = sum(c for _, c in members)
        for j, rj in enumerate(r):
            if not rj:
                continue
            factor = Fraction(1)
            for _, c in members:
                factor *= Fraction(c) ** (c * rj)
            if total:
                factor /= Fraction(total) ** (total * rj)
            factors[j] *= factor
        if total:
            rows.append(tuple(total * x for x in r))
            labels.append('+'.join(H.row_labels[i] for i, _ in members))
    lam = tuple(Fraction(x) * f for x, f in zip(lam, factors))
    return rows, labels, lam


def reduce_horn(H: HornMatrix, lam: Sequence) -> HornPair:
    lam = coefficient_vector(lam)
    rows, labels, reduced_lam = _aggregate_rows(H, lam)
    if not rows:
        raise InvalidHornMatrix("every row cancels; the map is the constant lambda")
    return HornPair(HornMatrix(tuple(rows), tuple(labels)), reduced_lam)


def is_reduced(H: HornMatrix) -> bool:
    seen = set()
    for row in H.entries:
        r, c = primitive_row(row)
        if c == 0 or r in seen:
            return False
        seen.add(r)
    return True


def row_signs_constant(H: HornMatrix) -> bool:
    for row in H.entries:
        signs = {x > 0 for x in row if x}
        if len(signs) > 1:
            return False
    return True


def sign_vector(H: HornMatrix) -> SignVector:
    """sign(H . 1); 0 marks a row summing to zero."""
    return tuple((s > 0) - (s < 0) for s in (sum(row) for row in H.entries))


def sign_corrected_positive(lam: Sequence[Fraction], H: HornMatrix, sigma: SignVector) -> bool:
    """lambda_j * sigma^(h_j) > 0 for all columns j."""
    if any(s == 0 for s in sigma):
        return False
    for j, x in enumerate(lam):
        negative = x < 0
        for i, row in enumerate(H.entries):
            if sigma[i] < 0 and row[j] % 2:
                negative = not negative
        if negative:
            return False
    return True


# ---------------------------------------------------------------- friendliness

def _cleared_degrees(rows: Sequence[Tuple[int, ...]]) -> List[int]:
    return [max(0, -min(row)) for row in rows]


def friendliness_check(H: HornMatrix, lam: Sequence, degree_limit: Optional[int] = None) -> bool:
    """
    Decide sum_j lambda_j (Hu)^h_j == 1 as rational functions.

    Rows are aggregated first (the map is unchanged), then the identity is cleared
    of denominators and restricted to a basis of the column space of H with one
    basis coordinate set to 1. The resulting polynomial identity is decided exactly,
    by expansion or by evaluation on a grid exceeding its degree in every variable.
    """
    lam = coefficient_vector(lam)
    rows, _, lam = _aggregate_rows(H, lam)
    if not rows:
        return sum(lam) == 1
    degree_limit = degree_limit if degree_limit is not None else get_option('EXPANSION_DEGREE_LIMIT')
    d = _cleared_degrees(rows)
    D = sum(d)
    _, basis = row_echelon(rows)
    k = len(basis)
    # linear forms restricted to u_basis with u_basis[0] = 1
    constants = [Fraction(row[basis[0]]) for row in rows]
    slopes = [[row[b] for b in basis[1:]] for row in rows]
    exponent_table = [[row[j] + d[i] for j in range(len(lam))] for i, row in enumerate(rows)]

    if k == 1:
        return _identity_holds_at(constants, exponent_table, d, lam)

    bounds = []
    for t in range(k - 1):
        involved = [i for i in range(len(rows)) if slopes[i][t]]
        term_degrees = [sum(exponent_table[i][j] for i in involved) for j in range(len(lam))]
        bounds.append(max(term_degrees + [sum(d[i] for i in involved)]))
    grid_size = prod(b + 1 for b in bounds)

    if D <= degree_limit or grid_size > GRID_POINT_LIMIT:
        if D > degree_limit:
            logger.warning(f"friendliness: cleared degree {D} with a {grid_size}-point grid, expanding symbolically")
        return _identity_expands_to_zero(constants, slopes, exponent_table, d, lam, k - 1)
    logger.debug(f"friendliness: evaluating on a grid of {grid_size} points (degree {D})")
    for point in product(*(range(b + 1) for b in bounds)):
        forms = [c + sum(s * x for s, x in zip(slope, point)) for c, slope in zip(constants, slopes)]
        if not _identity_holds_at(forms, exponent_table, d, lam):
            return False
    return True


def _identity_holds_at(forms, exponent_table, d, lam) -> bool:
    total = Fraction(0)
    for j, x in enumerate(lam):
        term = Fraction(x)
        for i, form in enumerate(forms):
            e = exponent_table[i][j]
            if e:
                term *= Fraction(form) ** e
        total += term
    baseline = Fraction(1)
    for i, form in enumerate(forms):
        if d[i]:
            baseline *= Fraction(form) ** d[i]
    return total == baseline


def _identity_expands_to_zero(constants, slopes, exponent_table, d, lam, nvars) -> bool:
    width = max(nvars, 1)
    forms = []
    for c, slope in zip(constants, slopes):
        terms = {(0,) * width: c}
        for t, s in enumerate(slope):
            if s:
                e = [0] * width
                e[t] = 1
                terms[tuple(e)] = s
        forms.append(SparsePoly(width, terms))
    powers = {}

    def power(i, e):
        if (i, e) not in powers:
            powers[(i, e)] = forms[i] ** e
        return powers[(i, e)]

    total = SparsePoly.zero(width)
    for j, x in enumerate(lam):
        term = SparsePoly.constant(width, x)
        for i in range(len(forms)):
            e = exponent_table[i][j]
            if e:
                term = term * power(i, e)
        total = total + term
    baseline = SparsePoly.constant(width, 1)
    for i in range(len(forms)):
        if d[i]:
            baseline = baseline * power(i, d[i])
    return (total - baseline).is_zero()


# ---------------------------------------------------------------- verdicts

def horn_pair_check(H: HornMatrix, lam: Sequence) -> HornVerdict:
    lam = coefficient_vector(lam)
    sigma = sign_vector(H)
    friendly = friendliness_check(H, lam)
    try:
        values = horn_map_eval(HornPair(H, lam), [1] * H.n_columns)
        positive = all(v > 0 for v in values)
    except PoleAtInput:
        positive = False
    return HornVerdict(
        friendly=friendly,
        reduced=is_reduced(H),
        sign_consistent=row_signs_constant(H),
        positive=positive,
        sigma=sigma,
    )


def as_horn_pair(H: HornMatrix, lam: Sequence) -> HornPair:
    """Verified Horn pair, or InvalidHornMatrix naming the failed checks."""
    verdict = horn_pair_check(H, lam)
    if not verdict.horn:
        failed = [name for name in ('friendly', 'reduced', 'sign_consistent', 'positive')
                  if not getattr(verdict, name)]
        raise InvalidHornMatrix(f"not a Horn pair: {', '.join(failed)} check failed")
    return HornPair(H, lam, PairStatus.HORN)


# ---------------------------------------------------------------- equality

def _equal_under(p1: HornPair, p2: HornPair, bijection: Sequence[int]) -> bool:
    n = p1.H.n_columns
    if sorted(bijection) != list(range(n)):
        raise InputError(f"{list(bijection)} is not a permutation of the {n} columns")
    if any(p1.lam[j] != p2.lam[bijection[j]] for j in range(n)):
        return False
    rows2 = Counter(tuple(row[bijection[j]] for j in range(n)) for row in p2.H.entries)
    return Counter(p1.H.entries) == rows2


def find_column_bijection(p1: HornPair, p2: HornPair, budget: Optional[int] = None) -> Optional[Tuple[int, ...]]:
    """Bijection sending column j of p1 to column result[j] of p2 under which the pairs agree."""
    if p1.H.shape != p2.H.shape:
        return None
    n = p1.H.n_columns
    max_columns = get_option('MAX_BIJECTION_COLUMNS')
    if n > max_columns:
        raise SearchBudgetExceeded(f"{n} columns exceed the search limit of {max_columns}; supply a bijection")
    budget = budget or get_option('SEARCH_BUDGET')
    if Counter(p1.lam) != Counter(p2.lam):
        return None
    if Counter(tuple(sorted(row)) for row in p1.H.entries) != Counter(tuple(sorted(row)) for row in p2.H.entries):
        return None

    def invariant(pair, j):
        column = pair.H.column(j)
        return pair.lam[j], tuple(sorted(column)), sum(abs(x) for x in column)

    targets = [invariant(p2, k) for k in range(n)]
    candidates = {j: [k for k in range(n) if targets[k] == invariant(p1, j)] for j in range(n)}
    if any(not options for options in candidates.values()):
        return None
    order = sorted(range(n), key=lambda j: (len(candidates[j]), j))
    rows1, rows2 = p1.H.entries, p2.H.entries
    assignment: Dict[int, int] = {}
    used = set()
    visited = 0

    def prefix_agrees(depth):
        cols1 = order[:depth]
        cols2 = [assignment[j] for j in cols1]
        return (Counter(tuple(row[j] for j in cols1) for row in rows1)
                == Counter(tuple(row[k] for k in cols2) for row in rows2))

    def search(depth):
        nonlocal visited
        if depth == n:
            return True
        j = order[depth]
        for k in candidates[j]:
            if k in used:
                continue
            visited += 1
            if visited > budget:
                raise SearchBudgetExceeded(f"column bijection search exceeded {budget} nodes")
            assignment[j] = k
            used.add(k)
            if prefix_agrees(depth + 1) and search(depth + 1):
                return True
            used.discard(k)
            del assignment[j]
        return False

    if not search(0):
        return None
    return tuple(assignment[j] for j in range(n))


def horn_pair_equal(p1: HornPair, p2: HornPair, leaf_bijection: Optional[Sequence[int]] = None) -> bool:
    if p1.H.shape != p2.H.shape:
        return False
    if leaf_bijection is not None:
        return _equal_under(p1, p2, leaf_bijection)
    return find_column_bijection(p1, p2) is not None
