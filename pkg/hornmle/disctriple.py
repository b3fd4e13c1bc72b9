"""
Discriminantal triples (A, Delta, m): toric matrix, A-homogeneous polynomial and
marked term. Writing Delta/m = 1 - sum_j lambda_j x^h_j turns the triple into a
Horn pair and back; scanning every term of an A-discriminant as the marked term
finds the models with rational MLE that it encodes.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .conf import get_option
from .exactalg import Monomial, SparsePoly, as_rational, format_rational, integer_left_kernel, rank
from .exceptions import (
    HornMLEError, InputError, InvalidHornMatrix, InvalidToricMatrix, MarkedTermAbsent, OnesNotInRowSpan,
    PoleAtInput, SearchBudgetExceeded,
)
from .horn import (
    HornMatrix, HornPair, PairStatus, SignVector, coefficient_vector, friendliness_check, horn_map_eval,
    horn_pair_equal, is_reduced, reduce_horn, row_signs_constant, sign_corrected_positive, sign_vector,
)

logger = logging.getLogger('hornmle')


@dataclass(frozen=True)
class ToricMatrix:
    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        if not rows or not rows[0]:
            raise InvalidToricMatrix("A needs at least one row and one column")
        if any(len(row) != len(rows[0]) for row in rows):
            raise InvalidToricMatrix("rows of A have different lengths")
        r = rank(rows)
        if r != len(rows):
            raise InvalidToricMatrix(f"A has {len(rows)} rows but rank {r}")
        if rank(rows + ((1,) * len(rows[0]),)) != r:
            raise OnesNotInRowSpan("the all-ones vector is not in the row span of A")
        object.__setattr__(self, 'rows', rows)

    @property
    def r(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.rows[0])

    def grade(self, exponents: Sequence[int]) -> Tuple[int, ...]:
        return tuple(sum(a * e for a, e in zip(row, exponents)) for row in self.rows)

    def to_dict(self) -> List[List[int]]:
        return [list(row) for row in self.rows]


@dataclass(frozen=True)
class MarkedPoly:
    delta: SparsePoly
    exponents: Monomial
    coefficient: Fraction
    var_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        exponents = tuple(int(e) for e in self.exponents)
        coefficient = as_rational(self.coefficient)
        if len(exponents) != self.delta.nvars:
            raise MarkedTermAbsent(f"marked monomial {exponents} has the wrong number of exponents")
        if coefficient == 0 or self.delta.coefficient(exponents) != coefficient:
            raise MarkedTermAbsent(f"{format_rational(coefficient)}*x^{list(exponents)} is not a term of Delta")
        names = tuple(self.var_names) if self.var_names else None
        if names is not None and len(names) != self.delta.nvars:
            raise InputError(f"{len(names)} variable names for {self.delta.nvars} variables")
        object.__setattr__(self, 'exponents', exponents)
        object.__setattr__(self, 'coefficient', coefficient)
        object.__setattr__(self, 'var_names', names)

    @classmethod
    def from_index(cls, delta: SparsePoly, index: int, var_names: Optional[Sequence[str]] = None) -> 'MarkedPoly':
        terms = delta.terms()
        if not 0 <= index < len(terms):
            raise MarkedTermAbsent(f"term index {index} outside 0..{len(terms) - 1}")
        c, e = terms[index]
        return cls(delta, e, c, tuple(var_names) if var_names else None)

    @property
    def term_index(self) -> int:
        return [e for _, e in self.delta.terms()].index(self.exponents)

    @property
    def names(self) -> List[str]:
        return list(self.var_names) if self.var_names else [f"x{i + 1}" for i in range(self.delta.nvars)]

    def marked_term(self) -> str:
        return SparsePoly.monomial(self.delta.nvars, self.exponents, self.coefficient).format(self.names)


def pair_from_marked_poly(marked: MarkedPoly) -> Tuple[HornMatrix, Tuple[Fraction, ...]]:
    """Columns follow the remaining terms of Delta in canonical order."""
    terms = [(c, e) for c, e in marked.delta.terms() if e != marked.exponents]
    if not terms:
        raise InputError("Delta needs at least two terms")
    columns = [tuple(a - b for a, b in zip(e, marked.exponents)) for _, e in terms]
    lam = tuple(-c / marked.coefficient for c, _ in terms)
    rows = tuple(tuple(column[i] for column in columns) for i in range(marked.delta.nvars))
    return HornMatrix(rows, tuple(marked.names)), lam


def marked_poly_from_pair(H: HornMatrix, lam: Sequence) -> MarkedPoly:
    """m = x^(max_k h_k^-) and Delta = m * (1 - sum_k lambda_k x^h_k)."""
    lam = coefficient_vector(lam)
    m_exponents = tuple(max(0, -min(row)) for row in H.entries)
    terms: Dict[Monomial, Fraction] = {m_exponents: Fraction(1)}
    for j, x in enumerate(lam):
        e = tuple(m + column for m, column in zip(m_exponents, H.column(j)))
        terms[e] = terms.get(e, Fraction(0)) - x
    delta = SparsePoly(H.m, terms)
    return MarkedPoly(delta, m_exponents, delta.coefficient(m_exponents), H.row_labels)


def left_kernel_basis(H: HornMatrix) -> ToricMatrix:
    kernel = integer_left_kernel(H.entries)
    if not kernel:
        raise OnesNotInRowSpan("H has full row rank; its left kernel is trivial")
    return ToricMatrix(tuple(tuple(row) for row in kernel))


def multinomial_marked_poly(k: int, m: int) -> MarkedPoly:
    """Delta = (-x0)^m - (x1 + ... + xk)^m marked at (-x0)^m; variables x0..xk."""
    if k < 1 or m < 1:
        raise InputError("multinomial needs k >= 1 states and m >= 1 draws")
    nvars = k + 1
    terms: Dict[Monomial, Fraction] = {(m,) + (0,) * k: Fraction((-1) ** m)}
    for choice in combinations_with_replacement(range(k), m):
        counts = [0] * k
        for i in choice:
            counts[i] += 1
        multinomial = factorial(m)
        for c in counts:
            multinomial //= factorial(c)
        terms[(0,) + tuple(counts)] = Fraction(-multinomial)
    delta = SparsePoly(nvars, terms)
    return MarkedPoly(delta, (m,) + (0,) * k, (-1) ** m, tuple(f"x{i}" for i in range(nvars)))


def monomial_map_eval(marked: MarkedPoly, x: Sequence) -> Tuple[Fraction, ...]:
    H, lam = pair_from_marked_poly(marked)
    x = [as_rational(v) for v in x]
    if len(x) != H.m:
        raise InputError(f"x has {len(x)} coordinates, Delta has {H.m} variables")
    values = []
    for j, coefficient in enumerate(lam):
        value = coefficient
        for i, h in enumerate(H.column(j)):
            if not h:
                continue
            if x[i] == 0 and h < 0:
                raise PoleAtInput(f"{H.row_labels[i]} = 0 under exponent {h}")
            value *= x[i] ** h
        values.append(value)
    return tuple(values)


# ---------------------------------------------------------------- triples

@dataclass(frozen=True)
class DiscriminantalTriple:
    A: ToricMatrix
    marked: MarkedPoly
    H: Optional[HornMatrix]
    lam: Optional[Tuple[Fraction, ...]]
    sigma: Optional[SignVector]
    homogeneous: bool
    reduced: bool
    sign_consistent: bool
    positive: bool

    @property
    def verified(self) -> bool:
        return self.homogeneous and self.reduced and self.sign_consistent and self.positive

    def pair(self) -> HornPair:
        if not self.verified:
            raise InvalidHornMatrix("the triple is not verified")
        return HornPair(self.H, self.lam, PairStatus.HORN)

    def failures(self) -> List[str]:
        return [name for name in ('homogeneous', 'reduced', 'sign_consistent', 'positive')
                if not getattr(self, name)]

    def to_dict(self) -> dict:
        data = {
            'A': self.A.to_dict(),
            'delta': self.marked.delta.to_dict(self.marked.names),
            'marked_term_index': self.marked.term_index,
            'marked_term': self.marked.marked_term(),
            'verified': self.verified,
            'checks': {name: getattr(self, name)
                       for name in ('homogeneous', 'reduced', 'sign_consistent', 'positive')},
        }
        if self.H is not None:
            data['H'] = [list(row) for row in self.H.entries]
            data['lambda'] = [format_rational(x) for x in self.lam]
        if self.sigma is not None:
            data['sigma'] = list(self.sigma)
        return data


def triple_check(A: ToricMatrix, marked: MarkedPoly) -> DiscriminantalTriple:
    homogeneous = marked.delta.is_homogeneous(A.rows)
    H = lam = sigma = None
    if homogeneous:
        try:
            H, lam = pair_from_marked_poly(marked)
        except InvalidHornMatrix as e:
            logger.debug(f"triple_check: {e}")
            homogeneous = False
    if not homogeneous:
        return DiscriminantalTriple(A, marked, None, None, None, False, False, False, False)
    sign_consistent = row_signs_constant(H)
    sigma = sign_vector(H) if sign_consistent else None
    positive = sign_consistent and sign_corrected_positive(lam, H, sigma)
    return DiscriminantalTriple(A, marked, H, lam, sigma, True, is_reduced(H), sign_consistent, positive)


# ---------------------------------------------------------------- scanning

@dataclass
class ModelRecord:
    """A passing marked term: the reduced Horn pair it encodes and where it came from."""
    pair: HornPair
    sigma: SignVector
    term_index: int
    marked_term: str
    provenance: dict = field(default_factory=dict)

    def mle(self, u: Sequence) -> Tuple[Fraction, ...]:
        return horn_map_eval(self.pair, u)

    def relation_check(self, relations: Sequence[SparsePoly], points: Sequence[Sequence]) -> bool:
        """True when every relation vanishes at the image of every point."""
        for u in points:
            image = self.mle(u)
            for relation in relations:
                if relation.evaluate(image) != 0:
                    return False
        return True

    def to_dict(self) -> dict:
        data = self.pair.to_dict()
        data.update({
            'sigma': list(self.sigma),
            'term_index': self.term_index,
            'marked_term': self.marked_term,
            'provenance': self.provenance,
        })
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'ModelRecord':
        return cls(HornPair.from_dict(data), tuple(data['sigma']), data['term_index'],
                   data['marked_term'], dict(data.get('provenance', {})))


@dataclass(frozen=True)
class TermOutcome:
    index: int
    passed: bool
    reason: str = ''
    record: Optional[ModelRecord] = None


def check_marked_term(delta: SparsePoly, index: int, var_names: Optional[Sequence[str]] = None,
                      provenance: Optional[dict] = None) -> TermOutcome:
    """Reduce the pair of one marked term, then test constant row signs and positivity at u = 1."""
    marked = MarkedPoly.from_index(delta, index, var_names)
    H, lam = pair_from_marked_poly(marked)
    try:
        pair = reduce_horn(H, lam)
    except InvalidHornMatrix:
        return TermOutcome(index, False, 'every row cancels')
    if not row_signs_constant(pair.H):
        return TermOutcome(index, False, 'mixed row signs')
    try:
        values = horn_map_eval(pair, [1] * pair.H.n_columns)
    except PoleAtInput:
        return TermOutcome(index, False, 'pole at u = 1')
    if not all(v > 0 for v in values):
        return TermOutcome(index, False, 'not positive')
    if get_option('DEBUG_FRIENDLINESS') and not friendliness_check(pair.H, pair.lam):
        logger.error(f"marked term {marked.marked_term()} passed but is not friendly")
        raise HornMLEError(f"marked term {index} of an A-homogeneous Delta gave a pair that is not friendly")
    record = ModelRecord(
        HornPair(pair.H, pair.lam, PairStatus.HORN),
        sign_vector(pair.H),
        index,
        marked.marked_term(),
        dict(provenance or {}, term_index=index),
    )
    return TermOutcome(index, True, record=record)


def scan_terms(A: ToricMatrix, delta: SparsePoly, var_names: Optional[Sequence[str]] = None,
               provenance: Optional[dict] = None) -> List[TermOutcome]:
    """Outcome of every marked term of Delta, in canonical term order."""
    if len(delta) < 2:
        raise InputError("Delta needs at least two terms")
    if delta.nvars != A.m:
        raise InputError(f"Delta has {delta.nvars} variables, A has {A.m} columns")
    if not delta.is_homogeneous(A.rows):
        logger.warning(f"Delta is not A-homogeneous; no term of its {len(delta)} passes")
        return [TermOutcome(index, False, 'not A-homogeneous') for index in range(len(delta))]
    return [check_marked_term(delta, index, var_names, provenance) for index in range(len(delta))]


def algorithm1_scan(A: ToricMatrix, delta: SparsePoly, var_names: Optional[Sequence[str]] = None,
                    provenance: Optional[dict] = None) -> List[ModelRecord]:
    return [outcome.record for outcome in scan_terms(A, delta, var_names, provenance) if outcome.passed]


@dataclass
class DistinctModels:
    classes: List[List[int]]
    flagged: List[int]

    @property
    def count(self) -> int:
        return len(self.classes)


def distinct_models(records: Sequence[ModelRecord]) -> DistinctModels:
    """Group records into classes of equal Horn pairs under column-bijection search."""
    classes: List[List[int]] = []
    flagged: List[int] = []
    for k, record in enumerate(records):
        placed = False
        for members in classes:
            if members[0] in flagged:
                continue
            try:
                if horn_pair_equal(records[members[0]].pair, record.pair):
                    members.append(k)
                    placed = True
                    break
            except SearchBudgetExceeded as e:
                logger.warning(f"distinct_models: record {k}: {e}")
                flagged.append(k)
                break
        if not placed:
            classes.append([k])
    return DistinctModels(classes, flagged)
