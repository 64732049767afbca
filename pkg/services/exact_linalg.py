"""
Exact linear algebra over GF(p) and the rationals

Scalars are stored as canonical Python values: an int in [0, p) for GF(p) and a
``fractions.Fraction`` for the rationals. A ``FieldSpec`` owns all arithmetic on
those values, so matrices and subspaces carry one field and plain tuples.
Row reductions (rref, solving, kernels, spans) run on sympy ``DomainMatrix``
over the matching ground domain and are converted back to canonical values.
Every operation here is pure and every value is immutable.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian_product
from operator import mul
from typing import Iterator, List, Optional, Sequence, Tuple

from sympy import isprime
from sympy.polys.domains import GF, QQ as RATIONAL_DOMAIN
from sympy.polys.matrices import DomainMatrix

from config.settings import get_settings
from services.errors import (
    BudgetExceededError,
    DimensionMismatchError,
    FieldMismatchError,
    UnsupportedEnumerationError,
)

logger = logging.getLogger(__name__)

Row = Tuple
MAX_PRIME = 2 ** 31


class FieldKind(Enum):
    PRIME_FIELD = 'prime_field'
    RATIONALS = 'rationals'


class FieldSpec(ABC):
    """An exact field; subclasses implement arithmetic on canonical values"""

    @property
    @abstractmethod
    def kind(self):
        pass

    @property
    @abstractmethod
    def token(self):
        """Text form used by the file formats and the CLI ('q' or the prime)"""
        pass

    @abstractmethod
    def coerce(self, value):
        """Convert an int, Fraction or Scalar into this field's canonical value"""
        pass

    @abstractmethod
    def inv(self, a):
        pass

    @abstractmethod
    def add(self, a, b):
        pass

    @abstractmethod
    def mul(self, a, b):
        pass

    @abstractmethod
    def neg(self, a):
        pass

    @abstractmethod
    def axpy(self, row, factor, other):
        """Return row - factor * other, entrywise"""
        pass

    @abstractmethod
    def scale(self, row, factor):
        pass

    @abstractmethod
    def dot(self, xs, ys):
        pass

    @abstractmethod
    def format_value(self, a):
        pass

    @property
    @abstractmethod
    def domain(self):
        """The sympy ground domain that carries row reductions"""
        pass

    @abstractmethod
    def to_domain(self, a):
        pass

    @abstractmethod
    def from_domain(self, x):
        pass

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_prime_field(self):
        return self.kind is FieldKind.PRIME_FIELD

    def scalar(self, value):
        return Scalar(self, self.coerce(value))

    def vector(self, values):
        return tuple(self.coerce(v) for v in values)

    def zero_vector(self, n):
        return (self.zero,) * n

    def unit_vector(self, n, i):
        values = [self.zero] * n
        values[i] = self.one
        return tuple(values)

    def combine(self, coefficients, rows, width):
        """Linear combination sum(c_k * rows[k]) as a tuple of length width"""
        acc = [self.zero] * width
        for c, row in zip(coefficients, rows):
            if c != 0:
                acc = self.axpy(acc, self.neg(c), row)
        return tuple(acc)

    def parse_value(self, text):
        """Parse 'num' or 'num/den' into a canonical value"""
        text = text.strip()
        if '/' in text:
            num, den = text.split('/', 1)
            den = int(den)
            if den == 0:
                raise ValueError(f"zero denominator in {text!r}")
            return self.coerce(Fraction(int(num), den))
        return self.coerce(int(text))


@lru_cache(maxsize=None)
def _prime_domain(p):
    return GF(p)


@dataclass(frozen=True)
class PrimeField(FieldSpec):
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not (2 <= self.p < MAX_PRIME) or not isprime(self.p):
            raise ValueError(f"GF(p) needs a prime p < 2^31, got {self.p!r}")

    def __str__(self):
        return f"GF({self.p})"

    @property
    def kind(self):
        return FieldKind.PRIME_FIELD

    @property
    def token(self):
        return str(self.p)

    def coerce(self, value):
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldMismatchError(f"{value.field} scalar used in {self}")
            return value.value
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return value % self.p
        if isinstance(value, Fraction):
            den = value.denominator % self.p
            if den == 0:
                raise ZeroDivisionError(f"denominator of {value} vanishes in {self}")
            return value.numerator * pow(den, -1, self.p) % self.p
        raise TypeError(f"cannot coerce {type(value).__name__} into {self}")

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"zero has no inverse in {self}")
        return pow(a, self.p - 2, self.p)

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def axpy(self, row, factor, other):
        p = self.p
        return [(x - factor * y) % p for x, y in zip(row, other)]

    def scale(self, row, factor):
        p = self.p
        return [x * factor % p for x in row]

    def dot(self, xs, ys):
        return sum(map(mul, xs, ys)) % self.p

    def format_value(self, a):
        return str(a)

    @property
    def domain(self):
        return _prime_domain(self.p)

    def to_domain(self, a):
        return self.domain(a)

    def from_domain(self, x):
        # int() of a GF element can be the symmetric representative
        return int(x) % self.p


@dataclass(frozen=True)
class RationalField(FieldSpec):

    def __str__(self):
        return "QQ"

    @property
    def kind(self):
        return FieldKind.RATIONALS

    @property
    def token(self):
        return 'q'

    def coerce(self, value):
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldMismatchError(f"{value.field} scalar used in {self}")
            return value.value
        if isinstance(value, (int, Fraction)):
            return Fraction(value)
        raise TypeError(f"cannot coerce {type(value).__name__} into {self}")

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("zero has no inverse in QQ")
        return 1 / Fraction(a)

    def add(self, a, b):
        return Fraction(a + b)

    def mul(self, a, b):
        return Fraction(a * b)

    def neg(self, a):
        return Fraction(-a)

    def axpy(self, row, factor, other):
        return [x - factor * y for x, y in zip(row, other)]

    def scale(self, row, factor):
        return [x * factor for x in row]

    def dot(self, xs, ys):
        total = sum(map(mul, xs, ys))
        return total if isinstance(total, Fraction) else Fraction(total)

    def format_value(self, a):
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"

    @property
    def domain(self):
        return RATIONAL_DOMAIN

    def to_domain(self, a):
        return RATIONAL_DOMAIN(a.numerator, a.denominator)

    def from_domain(self, x):
        return Fraction(int(x.numerator), int(x.denominator))


QQ = RationalField()


def gf(p):
    return PrimeField(p)


def field_from_token(token):
    """'q' (or 'Q', 'QQ') for the rationals, otherwise a prime modulus"""
    text = str(token).strip()
    if text.lower() in ('q', 'qq'):
        return QQ
    try:
        p = int(text)
    except ValueError:
        raise ValueError(f"field must be 'q' or a prime, got {token!r}")
    return PrimeField(p)


@dataclass(frozen=True)
class Scalar:
    field: FieldSpec
    value: object

    def __post_init__(self):
        if self.field.coerce(self.value) != self.value or type(self.field.coerce(self.value)) is not type(self.value):
            raise ValueError(f"{self.value!r} is not a canonical element of {self.field}")

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatchError(f"cannot combine {self.field} and {other.field}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return Scalar(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return Scalar(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return Scalar(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Scalar(self.field, self.field.div(self.value, self._other(other)))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.value))

    def inverse(self):
        return Scalar(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)):
            try:
                return self.value == self.field.coerce(other)
            except ZeroDivisionError:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def is_zero(self):
        return self.value == 0

    def __str__(self):
        return self.field.format_value(self.value)


@dataclass(frozen=True)
class Matrix:
    """Dense row-major matrix of canonical values over one field"""
    field: FieldSpec
    rows: int
    cols: int
    entries: Tuple[Row, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatchError(f"entries do not form a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_rows(cls, field, rows, cols=None):
        rows = [field.vector(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(field, len(rows), cols, tuple(rows))

    @classmethod
    def from_scalars(cls, rows):
        fields = {s.field for r in rows for s in r}
        if len(fields) > 1:
            raise FieldMismatchError(f"mixed fields in matrix: {sorted(map(str, fields))}")
        if not fields:
            raise ValueError("cannot infer the field of an empty matrix")
        field = fields.pop()
        return cls.from_rows(field, [[s.value for s in r] for r in rows])

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, rows, cols, tuple(field.zero_vector(cols) for _ in range(rows)))

    @classmethod
    def identity(cls, field, n):
        return cls(field, n, n, tuple(field.unit_vector(n, i) for i in range(n)))

    def __getitem__(self, index):
        i, j = index
        return self.entries[i][j]

    def column(self, j):
        return tuple(r[j] for r in self.entries)

    def transpose(self):
        return Matrix(self.field, self.cols, self.rows,
                      tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    def _check_same_field(self, other):
        if self.field != other.field:
            raise FieldMismatchError(f"cannot combine {self.field} and {other.field} matrices")

    def __matmul__(self, other):
        self._check_same_field(other)
        if self.cols != other.rows:
            raise DimensionMismatchError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        columns = other.transpose().entries
        dot = self.field.dot
        return Matrix(self.field, self.rows, other.cols,
                      tuple(tuple(dot(r, c) for c in columns) for r in self.entries))

    def __add__(self, other):
        self._check_same_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("matrix shapes differ")
        add = self.field.add
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(map(add, a, b)) for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        neg = self.field.neg
        return Matrix(self.field, self.rows, self.cols, tuple(tuple(map(neg, r)) for r in self.entries))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = self.field.coerce(factor)
        return Matrix(self.field, self.rows, self.cols,
                      tuple(tuple(self.field.scale(r, factor)) for r in self.entries))

    def apply(self, vector):
        """Matrix times a column vector given as a coordinate row"""
        if len(vector) != self.cols:
            raise DimensionMismatchError(f"vector of length {len(vector)} for {self.cols} columns")
        dot = self.field.dot
        return tuple(dot(r, vector) for r in self.entries)

    def is_zero(self):
        return all(x == 0 for r in self.entries for x in r)

    def flatten(self):
        return tuple(x for r in self.entries for x in r)

    def rank(self):
        return rref(self)[1]


def linear_combination(field, coefficients, matrices, rows, cols):
    """sum(c_i * M_i) for equally shaped matrices"""
    acc = [[field.zero] * cols for _ in range(rows)]
    for c, m in zip(coefficients, matrices):
        if c == 0:
            continue
        for i in range(rows):
            acc[i] = field.axpy(acc[i], field.neg(c), m.entries[i])
    return Matrix(field, rows, cols, tuple(tuple(r) for r in acc))


def _domain_matrix(field, rows, ncols):
    return DomainMatrix([[field.to_domain(x) for x in row] for row in rows], (len(rows), ncols), field.domain)


def _from_domain_rows(field, rows):
    return [tuple(field.from_domain(x) for x in row) for row in rows]


def _nonzero_rows(rows):
    return [row for row in rows if any(x != 0 for x in row)]


def echelon_rows(field, rows, ncols):
    """Reduced row echelon rows without zero rows, plus pivot columns"""
    rows = _nonzero_rows(rows)
    if not rows or not ncols:
        return [], []
    reduced, pivots = _domain_matrix(field, rows, ncols).rref()
    return _from_domain_rows(field, reduced.to_list()[:len(pivots)]), list(pivots)


def rref(m: Matrix) -> Tuple[Matrix, int]:
    """Reduced row echelon form with zero rows stripped, and the rank"""
    rows, pivots = echelon_rows(m.field, m.entries, m.cols)
    return Matrix(m.field, len(rows), m.cols, tuple(rows)), len(pivots)


def solve(a: Matrix, b: Matrix) -> Optional[Matrix]:
    """Some x with a @ x == b, or None when the system is inconsistent"""
    if a.field != b.field:
        raise FieldMismatchError(f"cannot solve over {a.field} with right side over {b.field}")
    if a.rows != b.rows:
        raise DimensionMismatchError(f"a has {a.rows} rows but b has {b.rows}")
    field = a.field
    augmented = [ra + rb for ra, rb in zip(a.entries, b.entries)]
    reduced, pivots = echelon_rows(field, augmented, a.cols + b.cols)
    # a pivot on the right side is a row 0 = nonzero
    if any(c >= a.cols for c in pivots):
        return None
    x = [field.zero_vector(b.cols) for _ in range(a.cols)]
    for row, c in zip(reduced, pivots):
        x[c] = tuple(row[a.cols:])
    return Matrix(field, a.cols, b.cols, tuple(x))


def kernel_vectors(field, rows, ncols) -> List[Row]:
    """Basis of {x : row . x == 0 for every row}"""
    rows = _nonzero_rows(rows)
    if not ncols:
        return []
    if not rows:
        return [field.unit_vector(ncols, i) for i in range(ncols)]
    return _from_domain_rows(field, _domain_matrix(field, rows, ncols).nullspace().to_list())


def left_kernel_vectors(field, rows, ncols) -> List[Row]:
    """Basis of {y : sum_i y_i * rows[i] == 0}"""
    height = len(rows)
    if height == 0:
        return []
    columns = list(zip(*rows)) if ncols else []
    return kernel_vectors(field, columns, height)


@dataclass(frozen=True)
class Subspace:
    """A subspace of field^ambient_dim held by its canonical RREF basis

    Build instances with ``span``; two subspaces are equal exactly when their
    canonical bases are equal.
    """
    field: FieldSpec
    ambient_dim: int
    basis: Tuple[Row, ...]
    pivots: Tuple[int, ...] = dataclass_field(default=(), compare=False, repr=False)

    @classmethod
    def zero(cls, field, n):
        return cls(field, n, (), ())

    @classmethod
    def full(cls, field, n):
        return cls(field, n, tuple(field.unit_vector(n, i) for i in range(n)), tuple(range(n)))

    @property
    def dim(self):
        return len(self.basis)

    def is_zero(self):
        return not self.basis

    def is_full(self):
        return self.dim == self.ambient_dim

    def basis_matrix(self):
        return Matrix(self.field, self.dim, self.ambient_dim, self.basis)

    def _check_vector(self, v):
        if len(v) != self.ambient_dim:
            raise DimensionMismatchError(f"vector of length {len(v)} in a {self.ambient_dim}-dim ambient space")

    def _check_compatible(self, other):
        if self.field != other.field:
            raise FieldMismatchError(f"subspaces over {self.field} and {other.field}")
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError(f"ambient dimensions {self.ambient_dim} and {other.ambient_dim}")

    def residue(self, v):
        """v reduced against the basis; zero exactly when v is a member"""
        v = list(v)
        for row, c in zip(self.basis, self.pivots):
            if v[c] != 0:
                v = self.field.axpy(v, v[c], row)
        return tuple(v)

    def member(self, v):
        self._check_vector(v)
        return all(x == 0 for x in self.residue(self.field.vector(v)))

    def contains(self, other):
        self._check_compatible(other)
        return all(all(x == 0 for x in self.residue(row)) for row in other.basis)

    def coordinates(self, v):
        """Coefficients of a member v with respect to the canonical basis"""
        if not self.member(v):
            raise ValueError("vector is not in the subspace")
        return tuple(self.field.coerce(v[c]) for c in self.pivots)

    def sum(self, other):
        self._check_compatible(other)
        return span(self.field, self.basis + other.basis, self.ambient_dim)

    def intersect(self, other):
        """Zassenhaus: reduce [a|a] over [b|0]; rows with zero left half span the meet"""
        self._check_compatible(other)
        n = self.ambient_dim
        zero = self.field.zero_vector(n)
        stacked = [row + row for row in self.basis] + [row + zero for row in other.basis]
        reduced, pivots = echelon_rows(self.field, stacked, 2 * n)
        meet = [row[n:] for row, c in zip(reduced, pivots) if c >= n]
        return span(self.field, meet, n)

    def __le__(self, other):
        return other.contains(self)

    def __str__(self):
        rows = '; '.join(','.join(self.field.format_value(x) for x in r) for r in self.basis)
        return f"<{rows}>" if rows else "<0>"


def span(field, vectors, ambient_dim) -> Subspace:
    vectors = list(vectors)
    for v in vectors:
        if len(v) != ambient_dim:
            raise DimensionMismatchError(f"vector of length {len(v)} in a {ambient_dim}-dim ambient space")
    rows, pivots = echelon_rows(field, [field.vector(v) for v in vectors], ambient_dim)
    return Subspace(field, ambient_dim, tuple(rows), tuple(pivots))


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    return a.sum(b)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return a.intersect(b)


def contains(a: Subspace, b: Subspace) -> bool:
    return a.contains(b)


def member(a: Subspace, v: Sequence) -> bool:
    return a.member(v)


def _enumeration_size(s, cap):
    if not s.field.is_prime_field():
        raise UnsupportedEnumerationError(f"cannot enumerate vectors over {s.field}")
    cap = get_settings().enumeration_cap if cap is None else cap
    size = s.field.p ** s.dim
    if size > cap:
        raise BudgetExceededError(f"{s.field.p}^{s.dim} = {size} vectors exceeds the enumeration cap {cap}")
    logger.debug("enumerating %d vectors of a %d-dim subspace over %s", size - 1, s.dim, s.field)
    return size


def enumerate_vectors(s: Subspace, cap=None) -> Iterator[Row]:
    """Every nonzero vector of s exactly once (GF(p) only)"""
    _enumeration_size(s, cap)
    field = s.field
    for coefficients in cartesian_product(range(field.p), repeat=s.dim):
        if any(coefficients):
            yield field.combine(coefficients, s.basis, s.ambient_dim)


def enumerate_lines(s: Subspace, cap=None) -> Iterator[Row]:
    """One vector per 1-dim subspace of s: the one whose first nonzero coefficient is 1"""
    _enumeration_size(s, cap)
    field = s.field
    for coefficients in cartesian_product(range(field.p), repeat=s.dim):
        leading = next((c for c in coefficients if c), 0)
        if leading == 1:
            yield field.combine(coefficients, s.basis, s.ambient_dim)


class EchelonBuilder:
    """Incremental semi-echelon basis, used when spinning vectors under matrices"""

    def __init__(self, field, ambient_dim):
        self.field = field
        self.ambient_dim = ambient_dim
        self.rows = []
        self.pivots = []

    def reduce(self, v):
        v = list(v)
        for row, c in zip(self.rows, self.pivots):
            if v[c] != 0:
                v = self.field.axpy(v, v[c], row)
        return v

    def add(self, v):
        """Insert v; returns the normalized new row, or None if v was dependent"""
        v = self.reduce(v)
        for c, x in enumerate(v):
            if x != 0:
                row = tuple(self.field.scale(v, self.field.inv(x)))
                self.rows.append(row)
                self.pivots.append(c)
                return row
        return None

    @property
    def dim(self):
        return len(self.rows)

    def to_subspace(self):
        return span(self.field, self.rows, self.ambient_dim)
