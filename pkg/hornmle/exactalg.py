"""
Exact arithmetic foundation: rationals, sparse Laurent polynomials, exact linear
algebra, determinants of polynomial matrices, Sylvester resultants and
discriminants of polynomials in t with polynomial coefficients.

Coefficients are stored as Python ints when integral and as Fractions otherwise;
both compare and hash alike, and integer arithmetic keeps Bareiss elimination fast.
Terms are ordered graded-lexicographically (total degree first, then lex with
x1 > x2 > ...), descending.
"""
import heapq
import logging
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import reduce
from math import gcd
from operator import add, sub
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .conf import get_option
from .exceptions import DivisionByZero, InputError, NotDivisible, NotHomogeneous

logger = logging.getLogger('hornmle')

Rational = Fraction
Monomial = Tuple[int, ...]
Number = Union[int, Fraction]


# ---------------------------------------------------------------- rationals

def as_rational(value) -> Fraction:
    """Read ints, Fractions and strings like "3/5", "-2" or "0.25" exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError(f"cannot read {value!r} as a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"'{value}' is not a rational number of the form p/q")
    raise TypeError(f"cannot read {value!r} as a rational")


def format_rational(value: Number) -> str:
    return str(Fraction(value))


def decimal_string(value: Number, digits: Optional[int] = None) -> str:
    digits = digits or get_option('DECIMAL_DIGITS')
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits
        approx = Decimal(value.numerator) / Decimal(value.denominator)
    return f"{approx:.{digits}g}"


def _norm(c: Number) -> Number:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _div(a: Number, b: Number) -> Number:
    if type(a) is int and type(b) is int and a % b == 0:
        return a // b
    return _norm(Fraction(a) / b)


# ---------------------------------------------------------------- monomials

def grlex_key(exponents: Monomial):
    return sum(exponents), exponents


def _heap_key(exponents: Monomial):
    return -sum(exponents), tuple(-e for e in exponents)


def _from_heap_key(key) -> Monomial:
    return tuple(-e for e in key[1])


class SparsePoly:
    """Multivariate Laurent polynomial with exact rational coefficients."""
    __slots__ = ('nvars', '_terms')

    def __init__(self, nvars: int, terms: Optional[Dict[Sequence[int], Number]] = None):
        if nvars < 1:
            raise InputError(f"variable count must be positive, got {nvars}")
        cleaned = {}
        for exponents, coeff in (terms or {}).items():
            exponents = tuple(int(e) for e in exponents)
            if len(exponents) != nvars:
                raise InputError(f"monomial {exponents} has {len(exponents)} exponents, expected {nvars}")
            c = _norm(as_rational(coeff))
            if c:
                cleaned[exponents] = _norm(cleaned.get(exponents, 0) + c)
                if not cleaned[exponents]:
                    del cleaned[exponents]
        self.nvars = nvars
        self._terms = cleaned

    @classmethod
    def _make(cls, nvars: int, terms: Dict[Monomial, Number]) -> 'SparsePoly':
        poly = cls.__new__(cls)
        poly.nvars = nvars
        poly._terms = terms
        return poly

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> 'SparsePoly':
        return cls._make(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c: Number) -> 'SparsePoly':
        c = _norm(as_rational(c))
        return cls._make(nvars, {(0,) * nvars: c} if c else {})

    @classmethod
    def monomial(cls, nvars: int, exponents: Sequence[int], c: Number = 1) -> 'SparsePoly':
        return cls(nvars, {tuple(exponents): c})

    @classmethod
    def variable(cls, nvars: int, index: int) -> 'SparsePoly':
        exponents = [0] * nvars
        exponents[index] = 1
        return cls._make(nvars, {tuple(exponents): 1})

    @classmethod
    def variables(cls, nvars: int) -> List['SparsePoly']:
        return [cls.variable(nvars, i) for i in range(nvars)]

    # inspection
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exponents: Sequence[int]) -> Fraction:
        return Fraction(self._terms.get(tuple(exponents), 0))

    def terms(self) -> List[Tuple[Fraction, Monomial]]:
        ordered = sorted(self._terms, key=grlex_key, reverse=True)
        return [(Fraction(self._terms[e]), e) for e in ordered]

    def leading_term(self) -> Tuple[Monomial, Number]:
        if not self._terms:
            raise InputError("the zero polynomial has no leading term")
        e = max(self._terms, key=grlex_key)
        return e, self._terms[e]

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def min_degree(self) -> int:
        return min(sum(e) for e in self._terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def is_homogeneous(self, grading: Sequence[Sequence[int]]) -> bool:
        images = {tuple(sum(w * x for w, x in zip(row, e)) for row in grading) for e in self._terms}
        return len(images) <= 1

    # arithmetic
    def _coerce(self, other) -> 'SparsePoly':
        if isinstance(other, SparsePoly):
            if other.nvars != self.nvars:
                raise InputError(f"cannot combine polynomials in {self.nvars} and {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return SparsePoly.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        result = dict(self._terms)
        for e, c in other._terms.items():
            v = _norm(result.get(e, 0) + c)
            if v:
                result[e] = v
            else:
                result.pop(e, None)
        return SparsePoly._make(self.nvars, result)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly._make(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> 'SparsePoly':
        c = _norm(as_rational(c))
        if not c:
            return SparsePoly.zero(self.nvars)
        return SparsePoly._make(self.nvars, {e: _norm(v * c) for e, v in self._terms.items()})

    def shift(self, exponents: Sequence[int]) -> 'SparsePoly':
        """Multiply by the Laurent monomial x^exponents."""
        exponents = tuple(exponents)
        return SparsePoly._make(self.nvars, {tuple(map(add, e, exponents)): c for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(self._terms) > len(other._terms):
            big, small = self._terms, other._terms
        else:
            big, small = other._terms, self._terms
        result = {}
        for e1, c1 in small.items():
            for e2, c2 in big.items():
                e = tuple(map(add, e1, e2))
                result[e] = result.get(e, 0) + c1 * c2
        return SparsePoly._make(self.nvars, {e: _norm(c) for e, c in result.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            if isinstance(k, int) and len(self._terms) == 1:
                (e, c), = self._terms.items()
                return SparsePoly._make(self.nvars, {tuple(x * k for x in e): _norm(Fraction(c) ** k)})
            raise InputError(f"power {k} is only defined for monomials")
        result = SparsePoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def exact_div(self, other: 'SparsePoly') -> 'SparsePoly':
        """Quotient of an exact division; NotDivisible when a remainder is left."""
        other = self._coerce(other)
        if other.is_zero():
            raise DivisionByZero("division by the zero polynomial")
        if self.is_zero():
            return SparsePoly.zero(self.nvars)
        if len(other._terms) == 1:
            (oe, oc), = other._terms.items()
            return SparsePoly._make(self.nvars, {tuple(map(sub, e, oe)): _div(c, oc) for e, c in self._terms.items()})
        lead_e, lead_c = other.leading_term()
        tail = [(e, c) for e, c in other._terms.items() if e != lead_e]
        lowest = self.min_degree() - other.min_degree()
        laurent = any(x < 0 for e in self._terms for x in e) or any(x < 0 for e in other._terms for x in e)
        remainder = dict(self._terms)
        heap = [_heap_key(e) for e in remainder]
        heapq.heapify(heap)
        quotient = {}
        while remainder:
            e = _from_heap_key(heapq.heappop(heap))
            c = remainder.pop(e, None)
            if c is None:
                continue
            qe = tuple(map(sub, e, lead_e))
            if sum(qe) < lowest or (not laurent and min(qe) < 0):
                raise NotDivisible(f"leading term of the remainder at {e} is not divisible by {lead_e}")
            qc = _div(c, lead_c)
            quotient[qe] = qc
            for oe, oc in tail:
                ne = tuple(map(add, qe, oe))
                v = _norm(remainder.get(ne, 0) - qc * oc)
                if v:
                    if ne not in remainder:
                        heapq.heappush(heap, _heap_key(ne))
                    remainder[ne] = v
                else:
                    remainder.pop(ne, None)
        return SparsePoly._make(self.nvars, quotient)

    def integer_content(self) -> Fraction:
        """Positive rational c such that self / c has coprime integer coefficients."""
        if not self._terms:
            return Fraction(1)
        values = [Fraction(c) for c in self._terms.values()]
        num = reduce(gcd, (v.numerator for v in values))
        den = reduce(lambda a, b: a * b // gcd(a, b), (v.denominator for v in values))
        return Fraction(abs(num), den)

    def monomial_content(self) -> Monomial:
        if not self._terms:
            return (0,) * self.nvars
        return tuple(min(column) for column in zip(*self._terms))

    def evaluate(self, point: Sequence[Number]) -> Fraction:
        if len(point) != self.nvars:
            raise InputError(f"point has {len(point)} coordinates, expected {self.nvars}")
        point = [as_rational(x) for x in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            value = Fraction(c)
            for i, k in enumerate(e):
                if k == 0:
                    continue
                if point[i] == 0 and k < 0:
                    raise DivisionByZero(f"x{i + 1} = 0 under exponent {k}")
                value *= point[i] ** k
            total += value
        return total

    def substitute(self, values: Dict[int, Number]) -> 'SparsePoly':
        """Set the variables with the given (0-based) indices to constants, keeping nvars."""
        result = {}
        for e, c in self._terms.items():
            value = Fraction(c)
            e = list(e)
            for i, x in values.items():
                if e[i]:
                    x = as_rational(x)
                    if x == 0 and e[i] < 0:
                        raise DivisionByZero(f"x{i + 1} = 0 under exponent {e[i]}")
                    value *= x ** e[i]
                    e[i] = 0
            key = tuple(e)
            result[key] = result.get(key, 0) + value
        return SparsePoly._make(self.nvars, {e: _norm(c) for e, c in result.items() if c})

    # comparison and display
    def __eq__(self, other):
        if isinstance(other, SparsePoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._terms == SparsePoly.constant(self.nvars, other)._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def format(self, var_names: Optional[Sequence[str]] = None) -> str:
        names = list(var_names) if var_names else [f"x{i + 1}" for i in range(self.nvars)]
        if not self._terms:
            return "0"
        pieces = []
        for c, e in self.terms():
            factors = [name if k == 1 else f"{name}^{k}" for name, k in zip(names, e) if k]
            magnitude = abs(c)
            if not factors:
                body = format_rational(magnitude)
            elif magnitude == 1:
                body = '*'.join(factors)
            else:
                body = '*'.join([format_rational(magnitude)] + factors)
            pieces.append(('-' if c < 0 else '+', body))
        text = ('-' if pieces[0][0] == '-' else '') + pieces[0][1]
        for sign, body in pieces[1:]:
            text += f" {sign} {body}"
        return text

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"SparsePoly({self.format()})"

    def to_dict(self, var_names: Optional[Sequence[str]] = None) -> dict:
        names = list(var_names) if var_names else [f"x{i + 1}" for i in range(self.nvars)]
        return {
            'vars': names,
            'terms': [{'c': format_rational(c), 'e': list(e)} for c, e in self.terms()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'SparsePoly':
        nvars = len(data['vars'])
        poly = cls.zero(nvars)
        for term in data['terms']:
            poly = poly + cls(nvars, {tuple(term['e']): as_rational(term['c'])})
        return poly


def poly_eval(p: SparsePoly, point: Sequence[Number]) -> Fraction:
    return p.evaluate(point)


def poly_terms(p: SparsePoly) -> List[Tuple[Fraction, Monomial]]:
    return p.terms()


class UniPolyOverRing:
    """Polynomial in a distinguished variable t whose coefficients are SparsePolys."""
    __slots__ = ('coefficients',)

    def __init__(self, coefficients: Sequence[SparsePoly]):
        coefficients = list(coefficients)
        while coefficients and coefficients[-1].is_zero():
            coefficients.pop()
        if not coefficients:
            raise InputError("the zero polynomial has no degree in t")
        if len({c.nvars for c in coefficients}) != 1:
            raise InputError("coefficients live in different polynomial rings")
        self.coefficients = tuple(coefficients)

    @classmethod
    def from_terms(cls, nvars: int, terms: Iterable[Tuple[int, SparsePoly]]) -> 'UniPolyOverRing':
        """Build sum of coefficient * t^power from (power, coefficient) pairs."""
        terms = list(terms)
        coefficients = [SparsePoly.zero(nvars) for _ in range(max(k for k, _ in terms) + 1)]
        for k, c in terms:
            coefficients[k] = coefficients[k] + c
        return cls(coefficients)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def nvars(self) -> int:
        return self.coefficients[0].nvars

    @property
    def leading(self) -> SparsePoly:
        return self.coefficients[-1]

    def derivative(self) -> 'UniPolyOverRing':
        if self.degree < 1:
            raise InputError("derivative of a constant in t is zero")
        return UniPolyOverRing([c.scale(k) for k, c in enumerate(self.coefficients) if k])

    def __repr__(self):
        return ' + '.join(f"({c})*t^{k}" for k, c in enumerate(self.coefficients) if c)


# ---------------------------------------------------------------- exact linear algebra

def row_echelon(rows: Sequence[Sequence[Number]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    matrix = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    if not matrix:
        return matrix, pivots
    r = 0
    for col in range(len(matrix[0])):
        pivot = next((i for i in range(r, len(matrix)) if matrix[i][col] != 0), None)
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        lead = matrix[r][col]
        matrix[r] = [x / lead for x in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][col] != 0:
                factor = matrix[i][col]
                matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[r])]
        pivots.append(col)
        r += 1
        if r == len(matrix):
            break
    return matrix, pivots


def rank(rows: Sequence[Sequence[Number]]) -> int:
    return len(row_echelon(rows)[1])


def solve(matrix: Sequence[Sequence[Number]], rhs: Sequence[Number]) -> List[Fraction]:
    """Unique solution of a square nonsingular system over Q."""
    n = len(matrix)
    reduced, pivots = row_echelon([list(row) + [b] for row, b in zip(matrix, rhs)])
    if pivots != list(range(n)):
        raise InputError("linear system is singular")
    return [reduced[i][n] for i in range(n)]


def transpose(rows: Sequence[Sequence[Number]]) -> List[List[Number]]:
    return [list(column) for column in zip(*rows)]


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> List[List[int]]:
    """Row-style Hermite normal form of an integer matrix, zero rows dropped."""
    matrix = [list(row) for row in rows]
    if not matrix:
        return []
    ncols = len(matrix[0])
    r = 0
    pivot_cols = []
    for col in range(ncols):
        while True:
            nonzero = [i for i in range(r, len(matrix)) if matrix[i][col] != 0]
            if not nonzero:
                break
            best = min(nonzero, key=lambda i: abs(matrix[i][col]))
            matrix[r], matrix[best] = matrix[best], matrix[r]
            finished = True
            for i in range(r + 1, len(matrix)):
                if matrix[i][col]:
                    q = matrix[i][col] // matrix[r][col]
                    matrix[i] = [a - q * b for a, b in zip(matrix[i], matrix[r])]
                    if matrix[i][col]:
                        finished = False
            if finished:
                break
        if r < len(matrix) and matrix[r][col] != 0:
            if matrix[r][col] < 0:
                matrix[r] = [-a for a in matrix[r]]
            for i in range(r):
                q = matrix[i][col] // matrix[r][col]
                if q:
                    matrix[i] = [a - q * b for a, b in zip(matrix[i], matrix[r])]
            pivot_cols.append(col)
            r += 1
            if r == len(matrix):
                break
    return [row for row in matrix[:r]]


def integer_left_kernel(rows: Sequence[Sequence[int]]) -> List[List[int]]:
    """Lattice basis (in Hermite normal form) of {a integer : a M = 0}."""
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    augmented = [list(row) + [1 if j == i else 0 for j in range(m)] for i, row in enumerate(rows)]
    r = 0
    for col in range(n):
        while True:
            nonzero = [i for i in range(r, m) if augmented[i][col] != 0]
            if not nonzero:
                break
            best = min(nonzero, key=lambda i: abs(augmented[i][col]))
            augmented[r], augmented[best] = augmented[best], augmented[r]
            finished = True
            for i in range(r + 1, m):
                if augmented[i][col]:
                    q = augmented[i][col] // augmented[r][col]
                    augmented[i] = [a - q * b for a, b in zip(augmented[i], augmented[r])]
                    if augmented[i][col]:
                        finished = False
            if finished:
                break
        if r < m and augmented[r][col] != 0:
            r += 1
    return hermite_normal_form([row[n:] for row in augmented[r:]])


# ---------------------------------------------------------------- determinants

def _matrix_ring(matrix: Sequence[Sequence[SparsePoly]]) -> int:
    n = len(matrix)
    if n == 0 or any(len(row) != n for row in matrix):
        raise InputError("determinant needs a nonempty square matrix")
    return matrix[0][0].nvars


def bareiss_determinant(matrix: Sequence[Sequence[SparsePoly]]) -> SparsePoly:
    """Fraction-free Gaussian elimination; every division is exact."""
    nvars = _matrix_ring(matrix)
    n = len(matrix)
    m = [list(row) for row in matrix]
    negate = False
    previous = SparsePoly.constant(nvars, 1)
    for k in range(n - 1):
        candidates = [i for i in range(k, n) if m[i][k]]
        if not candidates:
            return SparsePoly.zero(nvars)
        best = min(candidates, key=lambda i: (len(m[i][k]), m[i][k].degree(), i))
        if best != k:
            m[k], m[best] = m[best], m[k]
            negate = not negate
        pivot = m[k][k]
        for i in range(k + 1, n):
            lead = m[i][k]
            for j in range(k + 1, n):
                if lead and m[k][j]:
                    value = m[i][j] * pivot - lead * m[k][j]
                else:
                    value = m[i][j] * pivot
                m[i][j] = value.exact_div(previous) if value else value
        previous = pivot
    det = m[n - 1][n - 1]
    return -det if negate else det


def cofactor_determinant(matrix: Sequence[Sequence[SparsePoly]], max_size: Optional[int] = None) -> SparsePoly:
    """Memoized Laplace expansion along rows; an independent oracle for small matrices."""
    nvars = _matrix_ring(matrix)
    n = len(matrix)
    max_size = max_size or get_option('COFACTOR_MAX_SIZE')
    if n > max_size:
        raise InputError(f"cofactor expansion is limited to size {max_size}, got {n}")
    memo = {}

    def minor(row, columns):
        if row == n:
            return SparsePoly.constant(nvars, 1)
        if columns in memo:
            return memo[columns]
        total = SparsePoly.zero(nvars)
        for position, col in enumerate(columns):
            entry = matrix[row][col]
            if entry:
                term = entry * minor(row + 1, columns[:position] + columns[position + 1:])
                total = total + term if position % 2 == 0 else total - term
        memo[columns] = total
        return total

    return minor(0, tuple(range(n)))


def determinant(matrix: Sequence[Sequence[SparsePoly]], method: str = 'bareiss') -> SparsePoly:
    if method == 'bareiss':
        return bareiss_determinant(matrix)
    if method == 'cofactor':
        return cofactor_determinant(matrix)
    raise InputError(f"unknown determinant method '{method}'")


# ---------------------------------------------------------------- resultants and discriminants

def sylvester_matrix(f: UniPolyOverRing, g: UniPolyOverRing) -> List[List[SparsePoly]]:
    """Rows of f shifted deg g times, then rows of g shifted deg f times; coefficients ascending in t."""
    if f.nvars != g.nvars:
        raise InputError("f and g have coefficients in different rings")
    m, n = f.degree, g.degree
    if m < 1 or n < 1:
        raise InputError(f"Sylvester matrix needs positive degrees, got {m} and {n}")
    size = m + n
    zero = SparsePoly.zero(f.nvars)
    rows = []
    for shift, poly in [(i, f) for i in range(n)] + [(i, g) for i in range(m)]:
        row = [zero] * size
        for k, c in enumerate(poly.coefficients):
            row[shift + k] = c
        rows.append(row)
    return rows


def sylvester_resultant(f: UniPolyOverRing, g: UniPolyOverRing, method: str = 'bareiss') -> SparsePoly:
    return determinant(sylvester_matrix(f, g), method=method)


def normalize_discriminant(p: SparsePoly) -> SparsePoly:
    """Remove integer and monomial content and make the first term positive."""
    if p.is_zero():
        return p
    p = p.scale(1 / p.integer_content())
    p = p.shift(tuple(-k for k in p.monomial_content()))
    if p.terms()[0][0] < 0:
        p = -p
    return p


def discriminant_t(f: UniPolyOverRing, method: str = 'bareiss') -> SparsePoly:
    d = f.degree
    if d < 2:
        raise InputError(f"discriminant needs degree at least 2 in t, got {d}")
    resultant = sylvester_resultant(f, f.derivative(), method=method)
    if (d * (d - 1) // 2) % 2:
        resultant = -resultant
    return normalize_discriminant(resultant.exact_div(f.leading))


def rehomogenize(p: SparsePoly, grading: Sequence[Sequence[int]], fixed: Sequence[int],
                 target: Sequence[int]) -> SparsePoly:
    """
    Restore the exponents of the variables in `fixed` (which were set to 1) so that
    grading . e == target for every term. The grading restricted to the fixed
    columns must be square and invertible.
    """
    fixed = list(fixed)
    square = [[row[c] for c in fixed] for row in grading]
    if len(square) != len(fixed):
        raise InputError("rehomogenization needs one fixed variable per grading row")
    free = [c for c in range(p.nvars) if c not in fixed]
    result = {}
    for e, c in p.items():
        if any(e[k] for k in fixed):
            raise NotHomogeneous(f"term {e} still involves a specialized variable")
        rhs = [t - sum(row[k] * e[k] for k in free) for row, t in zip(grading, target)]
        solution = solve(square, rhs)
        if any(x.denominator != 1 for x in solution):
            raise NotHomogeneous(f"term {e} has no integral preimage under the grading")
        restored = list(e)
        for k, x in zip(fixed, solution):
            restored[k] = x.numerator
        result[tuple(restored)] = c
    return SparsePoly._make(p.nvars, result)
