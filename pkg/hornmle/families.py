"""
Experiment families: sparse univariate discriminants, resultants of two trinomials
and linear multiples of x1 + x2 + x3 + x4. Every instance is an (A, Delta) pair whose
terms are all tried as marked terms; a report folds the per-instance counts in
instance order, so results do not depend on the number of workers.
"""
import json
import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from itertools import combinations
from math import gcd
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

from .disctriple import ModelRecord, ToricMatrix, distinct_models, scan_terms
from .exactalg import (
    SparsePoly, UniPolyOverRing, discriminant_t, normalize_discriminant, rehomogenize, sylvester_resultant,
)
from .exceptions import InputError

logger = logging.getLogger('hornmle')
scan_logger = logging.getLogger('scan')
separation_logger = logging.getLogger('scan_separation')


@dataclass(frozen=True)
class ExpectedCounts:
    bound: int
    matrices: int
    pairs: int
    triples: int
    percentage: str


def percent_text(part: int, whole: int) -> str:
    if not whole:
        return '0.00'
    value = Decimal(100 * part) / Decimal(whole)
    return str(value.quantize(Decimal('0.01'), rounding=ROUND_HALF_UP))


def params_key(params) -> str:
    return json.dumps(params_to_json(params))


def params_to_json(params):
    if isinstance(params, (tuple, list)):
        return [params_to_json(p) for p in params]
    return params


def params_from_json(data):
    if isinstance(data, list):
        return tuple(params_from_json(p) for p in data)
    return data


# ---------------------------------------------------------------- discriminants

def univariate_discriminant(alpha: int, beta: int, gamma: int, method: str = 'bareiss',
                            dehomogenize: bool = True) -> SparsePoly:
    """Discriminant in t of x1 + x2 t^alpha + x3 t^beta + x4 t^gamma, content removed."""
    if not 0 < alpha < beta < gamma:
        raise InputError(f"need 0 < alpha < beta < gamma, got ({alpha}, {beta}, {gamma})")
    x = SparsePoly.variables(4)
    if not dehomogenize:
        f = UniPolyOverRing.from_terms(4, [(0, x[0]), (alpha, x[1]), (beta, x[2]), (gamma, x[3])])
        return discriminant_t(f, method)
    # x1 = x4 = 1; the A-grading restores their exponents afterwards
    one = SparsePoly.constant(4, 1)
    f = UniPolyOverRing.from_terms(4, [(0, one), (alpha, x[1]), (beta, x[2]), (gamma, one)])
    resultant = sylvester_resultant(f, f.derivative(), method)
    grading = [(1, 1, 1, 1), (0, alpha, beta, gamma)]
    restored = rehomogenize(resultant, grading, (0, 3), (2 * gamma - 1, gamma * gamma))
    return normalize_discriminant(restored.exact_div(x[3]))


def trinomial_resultant(alpha: int, beta: int, gamma: int, epsilon: int, method: str = 'bareiss',
                        dehomogenize: bool = True) -> SparsePoly:
    """Res_t(x1 + x2 t^alpha + x3 t^beta, x4 + x5 t^gamma + x6 t^epsilon), content removed."""
    if not (0 < alpha < beta and 0 < gamma < epsilon):
        raise InputError(f"need 0 < alpha < beta and 0 < gamma < epsilon, got ({alpha}, {beta}, {gamma}, {epsilon})")
    x = SparsePoly.variables(6)
    if not dehomogenize:
        f = UniPolyOverRing.from_terms(6, [(0, x[0]), (alpha, x[1]), (beta, x[2])])
        g = UniPolyOverRing.from_terms(6, [(0, x[3]), (gamma, x[4]), (epsilon, x[5])])
        return normalize_discriminant(sylvester_resultant(f, g, method))
    one = SparsePoly.constant(6, 1)
    f = UniPolyOverRing.from_terms(6, [(0, one), (alpha, x[1]), (beta, x[2])])
    g = UniPolyOverRing.from_terms(6, [(0, one), (gamma, x[4]), (epsilon, one)])
    resultant = sylvester_resultant(f, g, method)
    grading = [(1, 1, 1, 1, 1, 1), (0, 0, 0, 1, 1, 1), (0, alpha, beta, 0, gamma, epsilon)]
    restored = rehomogenize(resultant, grading, (0, 3, 5), (beta + epsilon, beta, beta * epsilon))
    return normalize_discriminant(restored)


def monomials_of_degree(nvars: int, d: int) -> List[Tuple[int, ...]]:
    """Exponent vectors of total degree d, graded-lex descending."""
    if nvars == 1:
        return [(d,)]
    result = []
    for first in range(d, -1, -1):
        result.extend((first,) + rest for rest in monomials_of_degree(nvars - 1, d - first))
    return result


def coprime_monomials(*exponents: Sequence[int]) -> bool:
    return all(min(column) == 0 for column in zip(*exponents))


# ---------------------------------------------------------------- instances and reports

@dataclass
class InstanceRecord:
    params: tuple
    n_terms: int
    passing: List[int]
    records: List[ModelRecord] = field(default_factory=list)
    degree: Optional[int] = None
    seconds: float = 0.0

    @property
    def n_passing(self) -> int:
        return len(self.passing)

    def to_dict(self, with_records: bool = True) -> dict:
        data = {
            'params': params_to_json(self.params),
            'terms': self.n_terms,
            'passing': list(self.passing),
            'degree': self.degree,
            'seconds': round(self.seconds, 3),
        }
        if with_records:
            data['records'] = [record.to_dict() for record in self.records]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'InstanceRecord':
        return cls(
            params=params_from_json(data['params']),
            n_terms=data['terms'],
            passing=list(data['passing']),
            records=[ModelRecord.from_dict(r) for r in data.get('records', [])],
            degree=data.get('degree'),
            seconds=data.get('seconds', 0.0),
        )


@dataclass
class ScanReport:
    family: str
    bound: int
    instances: List[InstanceRecord]
    seconds: float = 0.0
    distinct: Optional[int] = None
    expected: Optional[ExpectedCounts] = None

    @property
    def matrices(self) -> int:
        return len(self.instances)

    @property
    def pairs(self) -> int:
        return sum(record.n_terms for record in self.instances)

    @property
    def triples(self) -> int:
        return sum(record.n_passing for record in self.instances)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.triples, self.pairs) if self.pairs else Fraction(0)

    @property
    def percentage(self) -> str:
        return percent_text(self.triples, self.pairs)

    def records(self) -> List[ModelRecord]:
        return [record for instance in self.instances for record in instance.records]

    def breakdown(self) -> Dict[int, Dict[str, int]]:
        """Per degree of Delta: polynomials, (Delta, m) pairs and passing pairs."""
        table: Dict[int, Dict[str, int]] = {}
        for instance in self.instances:
            if instance.degree is None:
                continue
            row = table.setdefault(instance.degree, {'polynomials': 0, 'pairs': 0, 'triples': 0})
            row['polynomials'] += 1
            row['pairs'] += instance.n_terms
            row['triples'] += instance.n_passing
        return dict(sorted(table.items()))

    def discrepancies(self) -> List[str]:
        expected = self.expected
        if expected is None or expected.bound != self.bound:
            return []
        found = []
        for name in ('matrices', 'pairs', 'triples'):
            if getattr(self, name) != getattr(expected, name):
                found.append(f"{name}: computed {getattr(self, name)}, published {getattr(expected, name)}")
        if Decimal(self.percentage) != Decimal(expected.percentage):
            found.append(f"percentage: computed {self.percentage}%, published {expected.percentage}%")
        return found

    def summary_line(self) -> str:
        return f"{self.matrices} matrices, {self.pairs} pairs, {self.triples} triples ({self.percentage}%)"

    def summary(self, timing: bool = True) -> dict:
        data = {
            'family': self.family,
            'bound': self.bound,
            'matrices': self.matrices,
            'pairs': self.pairs,
            'triples': self.triples,
            'fraction': str(self.fraction),
            'percentage': self.percentage,
            'discrepancies': self.discrepancies(),
        }
        if timing:
            data['seconds'] = round(self.seconds, 3)
        breakdown = self.breakdown()
        if breakdown:
            data['by_degree'] = {str(d): row for d, row in breakdown.items()}
        if self.distinct is not None:
            data['distinct_models'] = self.distinct
        return data


# ---------------------------------------------------------------- strategies

class FamilyStrategy(ABC):
    name = ''
    default_bound = 1
    expected: Optional[ExpectedCounts] = None

    @abstractmethod
    def instances(self, bound: int) -> List[tuple]:
        pass

    @abstractmethod
    def toric_matrix(self, params) -> ToricMatrix:
        pass

    @abstractmethod
    def delta(self, params) -> SparsePoly:
        pass

    def var_names(self, params) -> Optional[List[str]]:
        return None

    def degree(self, params) -> Optional[int]:
        return None

    @property
    def label(self) -> str:
        return self.name

    def scan_instance(self, params) -> InstanceRecord:
        started = time.time()
        delta = self.delta(params)
        provenance = {'family': self.label, 'params': params_to_json(params)}
        outcomes = scan_terms(self.toric_matrix(params), delta, self.var_names(params), provenance)
        passed = [outcome for outcome in outcomes if outcome.passed]
        return InstanceRecord(
            params=tuple(params),
            n_terms=len(outcomes),
            passing=[outcome.index for outcome in passed],
            records=[outcome.record for outcome in passed],
            degree=self.degree(params),
            seconds=time.time() - started,
        )


class UnivariateFamily(FamilyStrategy):
    """A = [[1,1,1,1],[0,alpha,beta,gamma]], Delta = discriminant of a sparse quartic-like f(t)."""
    name = 'univariate'
    default_bound = 17
    expected = ExpectedCounts(17, 613, 7927, 123, '1.55')

    def __init__(self, method: str = 'bareiss'):
        self.method = method

    def instances(self, bound: int) -> List[tuple]:
        if bound < 3:
            raise InputError("univariate family needs bound >= 3")
        return [(a, b, c)
                for a in range(1, bound + 1)
                for b in range(a + 1, bound + 1)
                for c in range(b + 1, bound + 1)
                if gcd(gcd(a, b), c) == 1]

    def toric_matrix(self, params) -> ToricMatrix:
        alpha, beta, gamma = params
        return ToricMatrix(((1, 1, 1, 1), (0, alpha, beta, gamma)))

    def delta(self, params) -> SparsePoly:
        return univariate_discriminant(*params, method=self.method)


class TrinomialFamily(FamilyStrategy):
    name = 'trinomial'
    default_bound = 17
    expected = ExpectedCounts(17, 138, 2665, 93, '3.49')

    def __init__(self, method: str = 'bareiss'):
        self.method = method

    def instances(self, bound: int) -> List[tuple]:
        if bound < 2:
            raise InputError("trinomial family needs bound >= 2")
        # 0 < alpha < beta <= bound, 0 < gamma < epsilon <= bound, gcd(alpha, beta) = gcd(gamma, epsilon) = 1.
        # At bound 17 this gives 9025 matrices, not the published 138; ScanReport.discrepancies() reports it.
        coprime = [(a, b) for a in range(1, bound + 1) for b in range(a + 1, bound + 1) if gcd(a, b) == 1]
        return [first + second for first in coprime for second in coprime]

    def toric_matrix(self, params) -> ToricMatrix:
        alpha, beta, gamma, epsilon = params
        return ToricMatrix(((0, alpha, beta, 0, gamma, epsilon), (0, 0, 0, 1, 1, 1), (1, 1, 1, 1, 1, 1)))

    def delta(self, params) -> SparsePoly:
        return trinomial_resultant(*params, method=self.method)


class LinearMultipleFamily(FamilyStrategy):
    """
    Delta = (x^a +- x^b) * (x1+x2+x3+x4) or (x^a + x^b +- x^c) * (x1+x2+x3+x4) with
    |a| = |b| (= |c|) and the multiplier monomials without a common factor. The
    minus sign sits on the last monomial in graded-lex order.
    """
    name = 'linear-multiples'
    SHAPES = {'binomial': ('-', '+'), 'trinomial': ('+-', '++')}
    EXPECTED = {
        ('binomial', '-'): ExpectedCounts(8, 1028, 8212, 12, '0.15'),
        ('binomial', '+'): ExpectedCounts(8, 1028, 8218, 0, '0.00'),
        ('trinomial', '+-'): ExpectedCounts(3, 792, 8678, 8, '0.01'),
        ('trinomial', '++'): ExpectedCounts(3, 792, 8968, 0, '0.00'),
    }
    A = ToricMatrix(((1, 1, 1, 1),))

    def __init__(self, shape: str = 'binomial', signs: str = '-'):
        if shape not in self.SHAPES:
            raise InputError(f"shape must be one of {', '.join(self.SHAPES)}, got '{shape}'")
        if signs not in self.SHAPES[shape]:
            raise InputError(f"signs for {shape} multiples must be one of {', '.join(self.SHAPES[shape])}, got '{signs}'")
        self.shape = shape
        self.signs = signs
        self.default_bound = 8 if shape == 'binomial' else 3
        self.expected = self.EXPECTED[(shape, signs)]

    @property
    def label(self) -> str:
        if self.shape == 'binomial':
            return f"(x^a {self.signs} x^b)"
        return f"(x^a + x^b {self.signs[1]} x^c)"

    def instances(self, bound: int) -> List[tuple]:
        if bound < 1:
            raise InputError("linear multiples need degree bound >= 1")
        size = 2 if self.shape == 'binomial' else 3
        result = []
        for d in range(1, bound + 1):
            monomials = monomials_of_degree(4, d)
            for chosen in combinations(monomials, size):
                if coprime_monomials(*chosen):
                    result.append(tuple(chosen))
        return result

    def toric_matrix(self, params) -> ToricMatrix:
        return self.A

    def multiplier(self, params) -> SparsePoly:
        signs = self.signs if self.shape == 'trinomial' else '+' + self.signs
        poly = SparsePoly.monomial(4, params[0])
        for sign, exponents in zip(signs, params[1:]):
            poly = poly + SparsePoly.monomial(4, exponents, -1 if sign == '-' else 1)
        return poly

    def delta(self, params) -> SparsePoly:
        linear = sum(SparsePoly.variables(4), SparsePoly.zero(4))
        return self.multiplier(params) * linear

    def degree(self, params) -> Optional[int]:
        return sum(params[0]) + 1


# ---------------------------------------------------------------- scanning

def _scan_task(task):
    strategy, params = task
    return strategy.scan_instance(params)


def run_family_scan(strategy: FamilyStrategy, bound: Optional[int] = None, jobs: int = 1,
                    checkpoint=None, distinct: bool = False) -> ScanReport:
    """
    Scan every instance of a family. `checkpoint` (optional) provides load() -> {key: InstanceRecord}
    and store(InstanceRecord); stored instances are not recomputed.
    """
    bound = bound if bound is not None else strategy.default_bound
    started = time.time()
    params_list = strategy.instances(bound)
    done: Dict[str, InstanceRecord] = checkpoint.load() if checkpoint is not None else {}
    pending = [params for params in params_list if params_key(params) not in done]
    separation_logger.info(f"----- {strategy.label} bound {bound}: {len(params_list)} instances, "
                           f"{len(params_list) - len(pending)} from checkpoint -----")

    def collect(record: InstanceRecord):
        done[params_key(record.params)] = record
        if checkpoint is not None:
            checkpoint.store(record)
        scan_logger.info(f"{list(record.params)}: {record.n_terms} terms, {record.n_passing} passing "
                         f"({record.seconds:.2f}s)")

    try:
        if jobs > 1 and len(pending) > 1:
            with Pool(processes=jobs) as pool:
                for record in pool.imap(_scan_task, [(strategy, params) for params in pending]):
                    collect(record)
        else:
            for params in pending:
                collect(strategy.scan_instance(params))
    except Exception as e:
        logger.error(f"{strategy.label} scan failed: {e}")
        raise

    report = ScanReport(
        family=strategy.label,
        bound=bound,
        instances=[done[params_key(params)] for params in params_list],
        expected=strategy.expected,
    )
    if distinct:
        report.distinct = distinct_models(report.records()).count
    report.seconds = time.time() - started
    for message in report.discrepancies():
        logger.warning(f"{strategy.label}: {message}")
    logger.info(f"{strategy.label} bound {bound}: {report.summary_line()} in {report.seconds:.1f}s")
    return report


def univariate_family_scan(bound: int = 17, jobs: int = 1, checkpoint=None, distinct: bool = False) -> ScanReport:
    return run_family_scan(UnivariateFamily(), bound, jobs, checkpoint, distinct)


def trinomial_family_scan(bound: int = 17, jobs: int = 1, checkpoint=None, distinct: bool = False) -> ScanReport:
    return run_family_scan(TrinomialFamily(), bound, jobs, checkpoint, distinct)


def linear_multiple_scan(shape: str = 'binomial', signs: str = '-', bound: Optional[int] = None, jobs: int = 1,
                         checkpoint=None, distinct: bool = False) -> ScanReport:
    return run_family_scan(LinearMultipleFamily(shape, signs), bound, jobs, checkpoint, distinct)
