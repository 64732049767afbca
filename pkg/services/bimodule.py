"""
Leibniz bimodules over an algebra given by structure constants

A bimodule of dimension m carries, for every basis element e_i of the algebra,
an m x m matrix for v -> e_i v (``left[i]``) and one for v -> v e_i
(``right[i]``), both acting on column vectors. The three axioms checked by
``validate_bimodule`` come from putting a module element in each slot of
x(yz) = (xy)z + y(xz):

    (i)   L_i L_j = L(e_i e_j) + L_j L_i
    (ii)  L_i R_j = R_j L_i + R(e_i e_j)
    (iii) R(e_i e_j) = R_j R_i + L_i R_j

Irreducibility is certified over GF(p) only, by spinning every line of the
space; over the rationals the operations needing it refuse.
"""

import logging
from dataclasses import InitVar, dataclass, field as dataclass_field, replace
from typing import Tuple

from services.algebra import (
    LeibnizAlgebra,
    handle,
    is_ideal,
    quotient,
    subalgebra_algebra,
)
from services.errors import (
    AlgebraMismatchError,
    DimensionMismatchError,
    EmptyModuleError,
    FieldMismatchError,
    InvalidBimoduleError,
    KernelInvariantError,
    NotASubalgebraError,
    PreconditionError,
    UnsupportedEnumerationError,
)
from services.exact_linalg import (
    EchelonBuilder,
    Matrix,
    Subspace,
    enumerate_lines,
    kernel_vectors,
    left_kernel_vectors,
    linear_combination,
    span,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BimoduleViolation:
    axiom: str
    i: int
    j: int

    def describe(self):
        return f"axiom ({self.axiom}) fails for e{self.i}, e{self.j}"


def _axiom_violations(algebra, left, right, m):
    field = algebra.field
    n = algebra.dim
    left_of = lambda x: linear_combination(field, x, left, m, m)
    right_of = lambda x: linear_combination(field, x, right, m, m)
    violations = []
    for i in range(n):
        for j in range(n):
            ij = algebra.c[i][j]
            if left[i] @ left[j] != left_of(ij) + left[j] @ left[i]:
                violations.append(BimoduleViolation('i', i, j))
            if left[i] @ right[j] != right[j] @ left[i] + right_of(ij):
                violations.append(BimoduleViolation('ii', i, j))
            if right_of(ij) != right[j] @ right[i] + left[i] @ right[j]:
                violations.append(BimoduleViolation('iii', i, j))
    return violations


@dataclass(frozen=True)
class Bimodule:
    algebra: LeibnizAlgebra
    dim: int
    left: Tuple[Matrix, ...]
    right: Tuple[Matrix, ...]
    name: str = dataclass_field(default='', compare=False)
    certified: bool = dataclass_field(default=False, compare=False)
    check: InitVar[bool] = True

    def __post_init__(self, check):
        n, m = self.algebra.dim, self.dim
        if len(self.left) != n or len(self.right) != n:
            raise DimensionMismatchError(f"need {n} left and {n} right matrices, got {len(self.left)} and {len(self.right)}")
        for mat in self.left + self.right:
            if mat.field != self.algebra.field:
                raise FieldMismatchError(f"action matrix over {mat.field} for an algebra over {self.algebra.field}")
            if (mat.rows, mat.cols) != (m, m):
                raise DimensionMismatchError(f"action matrix is {mat.rows}x{mat.cols}, expected {m}x{m}")
        if check:
            violations = _axiom_violations(self.algebra, self.left, self.right, m)
            if violations:
                raise InvalidBimoduleError(
                    f"{self.name or 'bimodule'} violates the bimodule axioms: {violations[0].describe()}"
                    f" ({len(violations)} failure(s))",
                    violations,
                )

    @property
    def field(self):
        return self.algebra.field

    @property
    def actions(self):
        return self.left + self.right

    def full(self):
        return Subspace.full(self.field, self.dim)

    def zero(self):
        return Subspace.zero(self.field, self.dim)

    def left_of(self, x):
        return linear_combination(self.field, x, self.left, self.dim, self.dim)

    def right_of(self, x):
        return linear_combination(self.field, x, self.right, self.dim, self.dim)

    def right_is_zero(self):
        return all(r.is_zero() for r in self.right)

    def right_is_minus_left(self):
        return all(r == -l for l, r in zip(self.left, self.right))

    def __str__(self):
        return f"{self.name or 'bimodule'} (dim {self.dim} over {self.algebra.name or 'algebra'})"


@dataclass(frozen=True)
class FactorReport:
    series: Tuple[Subspace, ...]
    factors: Tuple[Bimodule, ...]
    iso_classes: Tuple[Tuple[int, ...], ...]

    @property
    def factor_dims(self):
        return [f.dim for f in self.factors]


def validate_bimodule(v):
    return _axiom_violations(v.algebra, v.left, v.right, v.dim)


def adjoint_bimodule(alg):
    return Bimodule(alg, alg.dim, alg.left_matrices, alg.right_matrices, name=f"ad({alg.name or 'L'})")


def trivial_bimodule(alg, m):
    zero = Matrix.zeros(alg.field, m, m)
    return Bimodule(alg, m, (zero,) * alg.dim, (zero,) * alg.dim, name=f"trivial_{m}")


def bimodule_from_left_action(alg, left, right='zero', name=''):
    """Bimodule with the given left action and right action 0 or minus the left action"""
    left = tuple(left)
    m = left[0].rows if left else 0
    if right == 'zero':
        rights = (Matrix.zeros(alg.field, m, m),) * alg.dim
    elif right == 'negative':
        rights = tuple(-l for l in left)
    else:
        raise ValueError(f"right action must be 'zero' or 'negative', got {right!r}")
    return Bimodule(alg, m, left, rights, name=name or f"{right}_{m}")


def split_extension(alg, v, name=None):
    """The algebra on V + L with (v1, x)(v2, y) = (x v2 + v1 y, xy); V comes first"""
    if v.algebra != alg:
        raise AlgebraMismatchError("bimodule is over a different algebra")
    field = alg.field
    m, n = v.dim, alg.dim
    zero_l = field.zero_vector(n)
    zero_v = field.zero_vector(m)
    products = {}
    for i in range(n):
        for b in range(m):
            products[(m + i, b)] = v.left[i].column(b) + zero_l
    for j in range(n):
        for a in range(m):
            products[(a, m + j)] = v.right[j].column(a) + zero_l
    for i in range(n):
        for j in range(n):
            products[(m + i, m + j)] = zero_v + alg.c[i][j]
    return LeibnizAlgebra.from_products(field, m + n, products,
                                        name=name or f"{v.name or 'V'}x{alg.name or 'L'}")


def centraliser(alg, v):
    """All x acting as zero on V from both sides"""
    if v.algebra != alg:
        raise AlgebraMismatchError("bimodule is over a different algebra")
    rows = [v.left[i].flatten() + v.right[i].flatten() for i in range(alg.dim)]
    centre = span(alg.field, left_kernel_vectors(alg.field, rows, 2 * v.dim * v.dim), alg.dim)
    if not is_ideal(alg, centre):
        raise KernelInvariantError("centraliser of a bimodule is not a two-sided ideal")
    return centre


def restrict(v, sub):
    """Restrict to a subalgebra, given as a SubalgebraHandle, on its canonical basis"""
    if sub.parent != v.algebra:
        raise AlgebraMismatchError("subalgebra belongs to a different algebra")
    if not sub.is_subalgebra:
        raise NotASubalgebraError(f"{sub.space} is not a subalgebra")
    sub_alg = subalgebra_algebra(v.algebra, sub.space)
    field, m = v.field, v.dim
    left = tuple(linear_combination(field, x, v.left, m, m) for x in sub.space.basis)
    right = tuple(linear_combination(field, x, v.right, m, m) for x in sub.space.basis)
    return Bimodule(sub_alg, m, left, right, name=f"{v.name or 'V'}|{sub.space.dim}", check=False)


def restrict_to(v, u):
    return restrict(v, handle(v.algebra, u))


def spin(v, w):
    """Least sub-bimodule containing w"""
    builder = EchelonBuilder(v.field, v.dim)
    first = builder.add(v.field.vector(w))
    if first is None:
        return v.zero()
    pending = [first]
    actions = v.actions
    while pending:
        x = pending.pop()
        for action in actions:
            new = builder.add(action.apply(x))
            if new is not None:
                pending.append(new)
    return builder.to_subspace()


def is_sub_bimodule(v, s):
    return all(s.member(action.apply(row)) for row in s.basis for action in v.actions)


def submodule(v, s, certified=False):
    """The sub-bimodule s as a bimodule on its canonical basis"""
    if not is_sub_bimodule(v, s):
        raise InvalidBimoduleError(f"{s} is not closed under the actions")

    def restricted(action):
        columns = [s.coordinates(action.apply(row)) for row in s.basis]
        return Matrix(v.field, s.dim, s.dim, tuple(zip(*columns)) if columns else ())

    return Bimodule(v.algebra, s.dim, tuple(map(restricted, v.left)), tuple(map(restricted, v.right)),
                    name=f"{v.name or 'V'}_sub{s.dim}", certified=certified, check=False)


def _free_columns(s):
    pivots = set(s.pivots)
    return [k for k in range(s.ambient_dim) if k not in pivots]


def quotient_bimodule(v, s):
    """V/s on the non-pivot coordinates of s; returns (bimodule, m x q projection)"""
    if not is_sub_bimodule(v, s):
        raise InvalidBimoduleError(f"{s} is not closed under the actions")
    free = _free_columns(s)

    def project(w):
        reduced = s.residue(w)
        return tuple(reduced[f] for f in free)

    def induced(action):
        columns = [project(action.column(f)) for f in free]
        return Matrix(v.field, len(free), len(free), tuple(zip(*columns)) if columns else ())

    q = len(free)
    bar = Bimodule(v.algebra, q, tuple(map(induced, v.left)), tuple(map(induced, v.right)),
                   name=f"{v.name or 'V'}_mod{s.dim}", check=False)
    projection = Matrix(v.field, v.dim, q, tuple(project(v.field.unit_vector(v.dim, k)) for k in range(v.dim)))
    return bar, projection


def _lift(s, vector):
    """Inverse of the quotient projection on the complement coordinates"""
    free = _free_columns(s)
    lifted = [s.field.zero] * s.ambient_dim
    for f, x in zip(free, vector):
        lifted[f] = x
    return tuple(lifted)


def minimal_submodule(v, cap=None):
    """A sub-bimodule of least dimension among all spins; irreducible by minimality

    Ties are broken by the lexicographically least canonical basis.
    """
    if not v.field.is_prime_field():
        raise UnsupportedEnumerationError(f"irreducibility is only certified over GF(p), not {v.field}")
    if v.dim == 0:
        raise EmptyModuleError("the zero bimodule has no minimal sub-bimodule")
    best = None
    for w in enumerate_lines(v.full(), cap):
        candidate = spin(v, w)
        if best is None or (candidate.dim, candidate.basis) < (best.dim, best.basis):
            best = candidate
    return best


def is_irreducible(v, cap=None):
    return v.dim > 0 and minimal_submodule(v, cap).is_full()


def certify_irreducible(v, cap=None):
    """Return v marked as certified, or raise if it has a proper nonzero sub-bimodule"""
    if not is_irreducible(v, cap):
        raise PreconditionError(f"{v} is not irreducible")
    return replace(v, certified=True, check=False)


def hom_space(a, b, sides='both'):
    """Intertwiners phi (m_b x m_a, flattened row-major) with phi A_i = B_i phi

    ``sides='left'`` only imposes the left actions.
    """
    if a.algebra != b.algebra:
        raise AlgebraMismatchError("hom space needs bimodules over the same algebra")
    field = a.field
    ma, mb = a.dim, b.dim
    pairs = list(zip(a.left, b.left))
    if sides == 'both':
        pairs += list(zip(a.right, b.right))
    elif sides != 'left':
        raise ValueError(f"sides must be 'both' or 'left', got {sides!r}")
    unknowns = ma * mb
    equations = []
    for A, B in pairs:
        for r in range(mb):
            for c in range(ma):
                coef = [field.zero] * unknowns
                for k in range(ma):
                    if A.entries[k][c] != 0:
                        coef[r * ma + k] = field.add(coef[r * ma + k], A.entries[k][c])
                for k in range(mb):
                    if B.entries[r][k] != 0:
                        coef[k * ma + c] = field.sub(coef[k * ma + c], B.entries[r][k])
                if any(x != 0 for x in coef):
                    equations.append(coef)
    return span(field, kernel_vectors(field, equations, unknowns), unknowns)


def hom_matrix(vector, a, b):
    """Unflatten a hom space vector into the m_b x m_a matrix"""
    return Matrix(a.field, b.dim, a.dim, tuple(tuple(vector[r * a.dim:(r + 1) * a.dim]) for r in range(b.dim)))


def isomorphic_irreducibles(a, b, sides='both'):
    """Schur: irreducibles are isomorphic iff a nonzero intertwiner exists"""
    if not (a.certified and b.certified):
        raise PreconditionError("isomorphism test needs certified irreducible bimodules")
    if a.algebra != b.algebra:
        raise AlgebraMismatchError("bimodules over different algebras")
    if a.dim != b.dim:
        return False
    homs = hom_space(a, b, sides)
    if homs.is_zero():
        return False
    phi = hom_matrix(homs.basis[0], a, b)
    if phi.rank() != a.dim:
        raise KernelInvariantError("nonzero intertwiner between irreducibles is singular")
    return True


def iso_partition(factors, sides='both'):
    classes = []
    for index, factor in enumerate(factors):
        for cls in classes:
            if isomorphic_irreducibles(factors[cls[0]], factor, sides):
                cls.append(index)
                break
        else:
            classes.append([index])
    return tuple(tuple(cls) for cls in classes)


def composition_series(v, cap=None):
    """0 = V_0 < V_1 < ... < V_t = V with certified irreducible factors"""
    series = [v.zero()]
    factors = []
    while series[-1].dim < v.dim:
        current = series[-1]
        bar, _ = quotient_bimodule(v, current)
        minimal = minimal_submodule(bar, cap)
        factors.append(submodule(bar, minimal, certified=True))
        lifted = span(v.field, [_lift(current, row) for row in minimal.basis], v.dim)
        series.append(current.sum(lifted))
    logger.debug("composition series of %s: factor dims %s", v, [f.dim for f in factors])
    return FactorReport(tuple(series), tuple(factors), iso_partition(factors))


def faithful_quotient(alg, v):
    """The induced bimodule over L / C_L(V); returns (quotient algebra, bimodule, centraliser)"""
    centre = centraliser(alg, v)
    bar_alg, _ = quotient(alg, centre, name=f"{alg.name or 'L'}_mod_C")
    free = _free_columns(centre)
    induced = Bimodule(bar_alg, v.dim, tuple(v.left[f] for f in free), tuple(v.right[f] for f in free),
                       name=f"{v.name or 'V'}_faithful", certified=v.certified)
    return bar_alg, induced, centre


def pullback(v, alg, projection):
    """Turn a bimodule over alg/I into one over alg via the projection matrix"""
    if projection.rows != alg.dim or projection.cols != v.algebra.dim:
        raise DimensionMismatchError("projection does not match the algebras")
    m = v.dim
    left = tuple(linear_combination(v.field, projection.entries[k], v.left, m, m) for k in range(alg.dim))
    right = tuple(linear_combination(v.field, projection.entries[k], v.right, m, m) for k in range(alg.dim))
    return Bimodule(alg, m, left, right, name=f"{v.name or 'V'}_pulled", certified=v.certified)
