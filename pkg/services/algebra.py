"""
Left Leibniz algebras given by structure constants

An algebra of dimension n stores c[i][j], the coordinate row of e_i e_j.
Subspaces of the algebra are ``Subspace`` values of ambient dimension n, and
all the operations below (products of subspaces, series, ideals, quotients)
work on those canonical bases.
"""

import logging
from dataclasses import InitVar, dataclass, field as dataclass_field
from functools import cached_property
from typing import Tuple

from config.settings import get_settings
from services.errors import (
    DimensionMismatchError,
    FieldMismatchError,
    InvalidAlgebraError,
    KernelInvariantError,
    NotASubalgebraError,
    NotAnIdealError,
)
from services.exact_linalg import FieldSpec, Matrix, Subspace, left_kernel_vectors, span

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    """One basis triple where a(xy) != (ax)y + x(ay)"""
    a: int
    x: int
    y: int
    lhs: Tuple
    rhs: Tuple

    def describe(self, field):
        fmt = lambda v: '(' + ','.join(field.format_value(t) for t in v) + ')'
        return f"e{self.a}(e{self.x}e{self.y}) = {fmt(self.lhs)} but (e{self.a}e{self.x})e{self.y} + e{self.x}(e{self.a}e{self.y}) = {fmt(self.rhs)}"


def _left_apply(field, c, a, v):
    """e_a * v for a coordinate row v"""
    n = len(v)
    acc = [field.zero] * n
    for j, vj in enumerate(v):
        if vj != 0:
            acc = field.axpy(acc, field.neg(vj), c[a][j])
    return acc


def _right_apply(field, c, v, y):
    """v * e_y for a coordinate row v"""
    n = len(v)
    acc = [field.zero] * n
    for j, vj in enumerate(v):
        if vj != 0:
            acc = field.axpy(acc, field.neg(vj), c[j][y])
    return acc


def identity_violations(field, c):
    """Check the left Leibniz identity on every basis triple of a raw tensor"""
    n = len(c)
    violations = []
    for a in range(n):
        for x in range(n):
            ax = c[a][x]
            for y in range(n):
                lhs = _left_apply(field, c, a, c[x][y])
                first = _right_apply(field, c, ax, y)
                second = _left_apply(field, c, x, c[a][y])
                rhs = [field.add(s, t) for s, t in zip(first, second)]
                if lhs != rhs:
                    violations.append(Violation(a, x, y, tuple(lhs), tuple(rhs)))
    return violations


@dataclass(frozen=True)
class LeibnizAlgebra:
    field: FieldSpec
    dim: int
    c: Tuple[Tuple[Tuple, ...], ...]
    name: str = dataclass_field(default='', compare=False)
    check: InitVar[bool] = True

    def __post_init__(self, check):
        n = self.dim
        if n > get_settings().max_dim:
            raise InvalidAlgebraError(f"dimension {n} exceeds the supported maximum {get_settings().max_dim}")
        if len(self.c) != n or any(len(row) != n or any(len(v) != n for v in row) for row in self.c):
            raise DimensionMismatchError(f"structure tensor is not {n}x{n}x{n}")
        if check:
            violations = identity_violations(self.field, self.c)
            if violations:
                raise InvalidAlgebraError(
                    f"{self.name or 'algebra'} violates the left Leibniz identity at {len(violations)} basis triple(s), "
                    f"first: {violations[0].describe(self.field)}",
                    violations,
                )

    @classmethod
    def from_products(cls, field, n, products, name='', check=True):
        """Build from a mapping (i, j) -> coordinates of e_i e_j; missing products are zero"""
        zero = field.zero_vector(n)
        c = tuple(tuple(field.vector(products[(i, j)]) if (i, j) in products else zero
                        for j in range(n)) for i in range(n))
        return cls(field, n, c, name=name, check=check)

    @classmethod
    def from_constants(cls, field, n, constants, name='', check=True):
        """Build from a mapping (i, j, k) -> c[i][j][k]"""
        rows = [[[field.zero] * n for _ in range(n)] for _ in range(n)]
        for (i, j, k), value in constants.items():
            rows[i][j][k] = field.coerce(value)
        c = tuple(tuple(tuple(v) for v in row) for row in rows)
        return cls(field, n, c, name=name, check=check)

    @classmethod
    def unchecked(cls, field, n, c, name=''):
        """Construct without validating the identity (mutation tests need invalid tensors)"""
        return cls(field, n, c, name=name, check=False)

    @classmethod
    def abelian(cls, field, n, name=None):
        return cls.from_products(field, n, {}, name=name or f"abelian_{n}")

    def constant(self, i, j, k):
        return self.field.scalar(self.c[i][j][k])

    def constants(self):
        """Nonzero structure constants as {(i, j, k): value}, lexicographically ordered"""
        return {(i, j, k): v
                for i in range(self.dim) for j in range(self.dim)
                for k, v in enumerate(self.c[i][j]) if v != 0}

    def multiply(self, x, y):
        """Product of two elements given as coordinate rows"""
        field = self.field
        acc = [field.zero] * self.dim
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            row = self.c[i]
            for j, yj in enumerate(y):
                if yj != 0 and self._nonzero[i][j]:
                    acc = field.axpy(acc, field.neg(field.mul(xi, yj)), row[j])
        return tuple(acc)

    @cached_property
    def _nonzero(self):
        return tuple(tuple(any(t != 0 for t in v) for v in row) for row in self.c)

    @cached_property
    def left_matrices(self):
        """left_matrices[i] is the matrix of v -> e_i v acting on column vectors"""
        n = self.dim
        return tuple(Matrix(self.field, n, n, tuple(tuple(self.c[i][j][k] for j in range(n)) for k in range(n)))
                     for i in range(n))

    @cached_property
    def right_matrices(self):
        """right_matrices[i] is the matrix of v -> v e_i acting on column vectors"""
        n = self.dim
        return tuple(Matrix(self.field, n, n, tuple(tuple(self.c[j][i][k] for j in range(n)) for k in range(n)))
                     for i in range(n))

    def full(self):
        return Subspace.full(self.field, self.dim)

    def zero(self):
        return Subspace.zero(self.field, self.dim)

    def span(self, vectors):
        return span(self.field, vectors, self.dim)

    def __str__(self):
        return f"{self.name or 'algebra'} (dim {self.dim} over {self.field})"


@dataclass(frozen=True)
class SubalgebraHandle:
    parent: LeibnizAlgebra
    space: Subspace
    is_subalgebra: bool
    is_left_ideal: bool
    is_right_ideal: bool

    @property
    def is_ideal(self):
        return self.is_left_ideal and self.is_right_ideal


@dataclass(frozen=True)
class SeriesReport:
    terms: Tuple[Subspace, ...]
    stabilized_at: int
    residual: Subspace

    def term(self, r):
        """U^r for any r >= 1; the series is constant from stabilized_at on"""
        if r < 1:
            raise ValueError("series terms are indexed from 1")
        return self.terms[min(r, len(self.terms)) - 1]

    @property
    def dims(self):
        return [t.dim for t in self.terms]


def validate(alg):
    """Violations of the left Leibniz identity; empty when the algebra is valid"""
    return identity_violations(alg.field, alg.c)


def _check_subspace(alg, *spaces):
    for s in spaces:
        if s.field != alg.field:
            raise FieldMismatchError(f"subspace over {s.field} in an algebra over {alg.field}")
        if s.ambient_dim != alg.dim:
            raise DimensionMismatchError(f"subspace of ambient dimension {s.ambient_dim} in a {alg.dim}-dim algebra")


def product(alg, a, b):
    """The span of all products xy with x in a and y in b"""
    _check_subspace(alg, a, b)
    products = [alg.multiply(x, y) for x in a.basis for y in b.basis]
    return span(alg.field, products, alg.dim)


def lambda_power(alg, u, v, k):
    """Apply v -> uv k times"""
    if k < 0:
        raise ValueError("lambda power needs k >= 0")
    _check_subspace(alg, u, v)
    for _ in range(k):
        nxt = product(alg, u, v)
        if nxt == v:
            break
        v = nxt
    return v


def is_subalgebra(alg, u):
    return u.contains(product(alg, u, u))


def is_left_ideal(alg, u):
    return u.contains(product(alg, alg.full(), u))


def is_right_ideal(alg, u):
    return u.contains(product(alg, u, alg.full()))


def is_ideal(alg, u):
    return is_left_ideal(alg, u) and is_right_ideal(alg, u)


def handle(alg, u):
    _check_subspace(alg, u)
    return SubalgebraHandle(alg, u, is_subalgebra(alg, u), is_left_ideal(alg, u), is_right_ideal(alg, u))


def lower_central_series(alg, u=None):
    """U^1 = U, U^(r+1) = U U^r, until two consecutive terms agree"""
    u = alg.full() if u is None else u
    _check_subspace(alg, u)
    if not is_subalgebra(alg, u):
        raise NotASubalgebraError(f"{u} is not a subalgebra of {alg}")
    terms = [u]
    while True:
        nxt = product(alg, u, terms[-1])
        terms.append(nxt)
        if nxt == terms[-2]:
            break
        if len(terms) > u.dim + 2:
            raise KernelInvariantError("lower central series failed to stabilize within dim + 1 steps")
    logger.debug("lower central series dims %s", [t.dim for t in terms])
    return SeriesReport(tuple(terms), len(terms) - 1, terms[-1])


def nilpotent_residual(alg, u=None):
    return lower_central_series(alg, u).residual


def is_nilpotent(alg, u=None):
    return nilpotent_residual(alg, u).is_zero()


def derived_series(alg):
    """L, LL, (LL)(LL), ... down to the first repeated term"""
    terms = [alg.full()]
    while True:
        nxt = product(alg, terms[-1], terms[-1])
        if nxt == terms[-1]:
            return tuple(terms)
        terms.append(nxt)


def left_centre(alg):
    """All x with x e_j = 0 for every basis element"""
    n = alg.dim
    rows = [tuple(t for j in range(n) for t in alg.c[i][j]) for i in range(n)]
    centre = span(alg.field, left_kernel_vectors(alg.field, rows, n * n), n)
    if not is_ideal(alg, centre):
        raise KernelInvariantError(f"left centre of {alg} is not a two-sided ideal")
    return centre


def leibniz_kernel(alg):
    """The span of all squares x^2, spanned by e_i^2 and e_i e_j + e_j e_i"""
    field, n = alg.field, alg.dim
    vectors = []
    for i in range(n):
        vectors.append(alg.c[i][i])
        for j in range(i + 1, n):
            vectors.append(tuple(field.add(s, t) for s, t in zip(alg.c[i][j], alg.c[j][i])))
    return span(field, vectors, n)


def is_lie(alg):
    field, n = alg.field, alg.dim
    for i in range(n):
        if any(t != 0 for t in alg.c[i][i]):
            return False
        for j in range(i + 1, n):
            if alg.c[i][j] != tuple(field.neg(t) for t in alg.c[j][i]):
                return False
    return True


def _complement(ideal):
    pivots = set(ideal.pivots)
    return [k for k in range(ideal.ambient_dim) if k not in pivots]


def quotient(alg, ideal, name=None):
    """Quotient algebra on the non-pivot coordinates of the ideal's canonical basis

    Returns the algebra and the n x q projection matrix P, so that an element
    with coordinate row x maps to x @ P.
    """
    _check_subspace(alg, ideal)
    if not is_ideal(alg, ideal):
        raise NotAnIdealError(f"{ideal} is not a two-sided ideal of {alg}")
    free = _complement(ideal)

    def project(v):
        reduced = ideal.residue(v)
        return tuple(reduced[f] for f in free)

    q = len(free)
    products = {(a, b): project(alg.c[fa][fb]) for a, fa in enumerate(free) for b, fb in enumerate(free)}
    quotient_alg = LeibnizAlgebra.from_products(alg.field, q, products,
                                                name=name or f"{alg.name or 'L'}_mod_{ideal.dim}")
    projection = Matrix(alg.field, alg.dim, q,
                        tuple(project(alg.field.unit_vector(alg.dim, k)) for k in range(alg.dim)))
    return quotient_alg, projection


def subalgebra_closure(alg, s):
    """Smallest subalgebra containing s"""
    _check_subspace(alg, s)
    t = s
    for _ in range(alg.dim + 1):
        nxt = t.sum(product(alg, t, t))
        if nxt == t:
            return t
        t = nxt
    raise KernelInvariantError("subalgebra closure failed to stabilize")


def subalgebra_algebra(alg, u, name=None):
    """A subalgebra as an algebra in its own right, on its canonical basis"""
    _check_subspace(alg, u)
    if not is_subalgebra(alg, u):
        raise NotASubalgebraError(f"{u} is not a subalgebra of {alg}")
    products = {(a, b): u.coordinates(alg.multiply(x, y))
                for a, x in enumerate(u.basis) for b, y in enumerate(u.basis)}
    return LeibnizAlgebra.from_products(alg.field, u.dim, products,
                                        name=name or f"{alg.name or 'L'}_sub_{u.dim}")


def elements_satisfy_identity(alg, x, y, z):
    """x(yz) == (xy)z + y(xz) for three elements"""
    lhs = alg.multiply(x, alg.multiply(y, z))
    first = alg.multiply(alg.multiply(x, y), z)
    second = alg.multiply(y, alg.multiply(x, z))
    return lhs == tuple(alg.field.add(s, t) for s, t in zip(first, second))
