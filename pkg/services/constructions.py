"""
Named Leibniz algebras and bimodules, plus a deterministic instance generator

Everything here is built from combinators that preserve the left Leibniz
identity (direct sums, hemisemidirect products, split extensions, quotients by
the left centre). Each algebra is still validated when constructed.

The generator draws from xorshift64*:

    x ^= x >> 12
    x ^= (x << 25) mod 2^64
    x ^= x >> 27
    output = x * 0x2545F4914F6CDD1D mod 2^64

A zero seed is replaced by 0x9E3779B97F4A7C15 and draws below n use rejection
sampling, so streams are reproducible from the seed alone.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from typing import Dict, Iterator, Tuple

from services.algebra import (
    LeibnizAlgebra,
    is_lie,
    is_nilpotent,
    left_centre,
    lower_central_series,
    nilpotent_residual,
    quotient,
    subalgebra_closure,
)
from services.bimodule import (
    Bimodule,
    adjoint_bimodule,
    bimodule_from_left_action,
    pullback,
    split_extension,
    trivial_bimodule,
)
from services.errors import InvalidAlgebraError, LeibnizKernelError, PreconditionError
from services.exact_linalg import Matrix, Subspace
from services.subnormal import ChainReport, ideal_closure, subnormal_chain

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
DEFAULT_STATE = 0x9E3779B97F4A7C15
MAX_SPECIMENS = 8
MAX_NON_SUBNORMAL = 2


class XorShift64Star:
    def __init__(self, seed):
        self.state = (seed & MASK64) or DEFAULT_STATE

    def next_u64(self):
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def below(self, n):
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (1 << 64) - (1 << 64) % n
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def choice(self, items):
        return items[self.below(len(items))]

    def scalar(self, field):
        if field.is_prime_field():
            return self.below(field.p)
        return field.coerce(self.below(5) - 2)

    def vector(self, field, n):
        return tuple(self.scalar(field) for _ in range(n))

    def matrix(self, field, m):
        return Matrix.from_rows(field, [self.vector(field, m) for _ in range(m)], m)


# -- named algebras -----------------------------------------------------------

def abelian(field, n):
    return LeibnizAlgebra.abelian(field, n, name=f"abelian_{n}")


def cyclic_leibniz(field, n):
    """e_0 e_k = e_(k+1); for n = 2 this is the algebra with e_0 e_0 = e_1 only"""
    constants = {(0, k, k + 1): 1 for k in range(n - 1)}
    return LeibnizAlgebra.from_constants(field, n, constants, name=f"cyclic_leibniz_{n}")


def heisenberg_3(field):
    return LeibnizAlgebra.from_constants(field, 3, {(0, 1, 2): 1, (1, 0, 2): -1}, name="heisenberg_3")


def r2_solvable(field):
    return LeibnizAlgebra.from_constants(field, 2, {(0, 1, 1): 1, (1, 0, 1): -1}, name="r2_solvable")


def sl2(field):
    """Basis e, h, f with he = 2e, hf = -2f, ef = h"""
    if field.is_prime_field() and field.p == 2:
        raise PreconditionError("sl2 is only catalogued in characteristic other than 2")
    constants = {
        (1, 0, 0): 2, (0, 1, 0): -2,
        (1, 2, 2): -2, (2, 1, 2): 2,
        (0, 2, 1): 1, (2, 0, 1): -1,
    }
    return LeibnizAlgebra.from_constants(field, 3, constants, name="sl2")


def sl2_natural_action(field):
    """Matrices of e, h, f on the natural 2-dim module"""
    e = Matrix.from_rows(field, [[0, 1], [0, 0]])
    h = Matrix.from_rows(field, [[1, 0], [0, -1]])
    f = Matrix.from_rows(field, [[0, 0], [1, 0]])
    return (e, h, f)


def direct_sum(a, b, name=None):
    if a.field != b.field:
        raise InvalidAlgebraError("direct sum of algebras over different fields")
    n = a.dim + b.dim
    products = {}
    for i in range(a.dim):
        for j in range(a.dim):
            products[(i, j)] = a.c[i][j] + b.field.zero_vector(b.dim)
    for i in range(b.dim):
        for j in range(b.dim):
            products[(a.dim + i, a.dim + j)] = a.field.zero_vector(a.dim) + b.c[i][j]
    return LeibnizAlgebra.from_products(a.field, n, products, name=name or f"{a.name}+{b.name}")


def hemisemidirect(g, left_action, name=None):
    """M + g with (m, x)(n, y) = (x n, xy) for a Lie algebra g and a g-module M"""
    if not is_lie(g):
        raise PreconditionError(f"{g} is not a Lie algebra")
    module = bimodule_from_left_action(g, left_action, right='zero', name='M')
    return split_extension(g, module, name=name or f"hsd({g.name},{module.dim})")


def module_ideal(alg, m):
    """The span of the first m coordinates, where split extensions put the module"""
    return alg.span([alg.field.unit_vector(alg.dim, k) for k in range(m)])


@dataclass(frozen=True)
class CatalogueEntry:
    name: str
    algebra: LeibnizAlgebra
    params: Dict[str, object]
    expected: Dict[str, object]
    bimodules: Tuple[Bimodule, ...] = ()

    def facts(self):
        """The expected facts recomputed from the algebra"""
        return {
            'is_lie': is_lie(self.algebra),
            'nilpotent': is_nilpotent(self.algebra),
            'residual_dim': nilpotent_residual(self.algebra).dim,
        }


def _entry(name, algebra, is_lie_, nilpotent, residual_dim, bimodules=(), **params):
    params.setdefault('dim', algebra.dim)
    params['field'] = algebra.field.token
    expected = {'is_lie': is_lie_, 'nilpotent': nilpotent, 'residual_dim': residual_dim}
    return CatalogueEntry(name, algebra, params, expected, tuple(bimodules))


def catalogue(field):
    entries = []
    for n in (1, 2, 3):
        entries.append(_entry(f"abelian_{n}", abelian(field, n), True, True, 0))
    c2 = cyclic_leibniz(field, 2)
    entries.append(_entry("cyclic_leibniz_2", c2, False, True, 0, [adjoint_bimodule(c2)]))
    entries.append(_entry("cyclic_leibniz_3", cyclic_leibniz(field, 3), False, True, 0))
    heis = heisenberg_3(field)
    entries.append(_entry("heisenberg_3", heis, True, True, 0, [adjoint_bimodule(heis)]))
    r2 = r2_solvable(field)
    entries.append(_entry("r2_solvable", r2, True, False, 1, [adjoint_bimodule(r2)]))

    line = abelian(field, 1)
    identity_1 = (Matrix.identity(field, 1),)
    entries.append(_entry("hemisemidirect_line", hemisemidirect(line, identity_1, name="hemisemidirect_line"),
                          False, False, 1, module_dim=1))
    r2_action = (Matrix.identity(field, 1), Matrix.zeros(field, 1, 1))
    entries.append(_entry("hemisemidirect_r2", hemisemidirect(r2, r2_action, name="hemisemidirect_r2"),
                          False, False, 2, module_dim=1))

    if not (field.is_prime_field() and field.p == 2):
        s = sl2(field)
        natural = sl2_natural_action(field)
        bimodules = [
            adjoint_bimodule(s),
            bimodule_from_left_action(s, natural, 'zero', name='natural_antisymmetric'),
            bimodule_from_left_action(s, natural, 'negative', name='natural_symmetric'),
        ]
        entries.append(_entry("sl2", s, True, False, 3, bimodules))
        entries.append(_entry("hemisemidirect_sl2_natural",
                              hemisemidirect(s, natural, name="hemisemidirect_sl2_natural"),
                              False, False, 5, module_dim=2))
    return entries


def catalogue_entry(field, name):
    for entry in catalogue(field):
        if entry.name == name:
            return entry
    raise KeyError(f"no catalogue entry named {name!r} over {field}")


# -- generated instances ------------------------------------------------------

@dataclass(frozen=True)
class Specimen:
    label: str
    space: Subspace
    chain: ChainReport

    @property
    def subnormal(self):
        return self.chain.subnormal


@dataclass(frozen=True)
class GeneratedInstance:
    instance_id: str
    recipe: str
    algebra: LeibnizAlgebra
    specimens: Tuple[Specimen, ...]
    bimodules: Tuple[Bimodule, ...] = dataclass_field(default=())


def _base_algebras(field, max_dim):
    bases = [abelian(field, 1), abelian(field, 2), cyclic_leibniz(field, 2), cyclic_leibniz(field, 3),
             heisenberg_3(field), r2_solvable(field)]
    if not (field.is_prime_field() and field.p == 2):
        bases.append(sl2(field))
    return [b for b in bases if b.dim <= max_dim]


def _random_module(rng, g):
    """A left g-module for a Lie algebra g, as action matrices"""
    field = g.field
    options = ['adjoint', 'trivial']
    if g.dim == 1:
        options.append('single')
    if g.name == 'abelian_2':
        options.append('commuting')
    if g.name == 'r2_solvable':
        options.append('r2_character')
    if g.name == 'sl2':
        options.append('natural')
    kind = rng.choice(options)
    if kind == 'adjoint':
        return g.left_matrices
    if kind == 'trivial':
        m = 1 + rng.below(2)
        return (Matrix.zeros(field, m, m),) * g.dim
    if kind == 'single':
        return (rng.matrix(field, 1 + rng.below(2)),)
    if kind == 'commuting':
        a = rng.matrix(field, 2)
        b = a.scale(rng.scalar(field)) + Matrix.identity(field, 2).scale(rng.scalar(field))
        return (a, b)
    if kind == 'r2_character':
        return (Matrix.from_rows(field, [[rng.scalar(field)]]), Matrix.zeros(field, 1, 1))
    return sl2_natural_action(field)


class InstanceGenerator:
    """Deterministic stream of algebras with distinguished subalgebras"""

    RECIPES = ('nilpotent_sum', 'hemisemidirect', 'split_extension', 'direct_sum', 'quotient_centre')

    def __init__(self, seed, field, max_dim, budget):
        self.field = field
        self.max_dim = max_dim
        self.budget = budget
        self.seed = seed
        self.rng = XorShift64Star(seed * 1_000_003 + (field.p if field.is_prime_field() else 0))
        self.bases = _base_algebras(field, max_dim)

    def _fits(self, items, room):
        return [b for b in items if b.dim <= room]

    def _nilpotent_sum(self):
        cores = self._fits([heisenberg_3(self.field), cyclic_leibniz(self.field, 3)], self.max_dim)
        if not cores:
            return self.rng.choice(self.bases), ()
        core = self.rng.choice(cores)
        partners = self._fits(self.bases, self.max_dim - core.dim)
        if not partners:
            return core, ()
        return direct_sum(core, self.rng.choice(partners)), ()

    def _hemisemidirect(self):
        lie_bases = [b for b in self.bases if is_lie(b)]
        g = self.rng.choice(lie_bases)
        action = _random_module(self.rng, g)
        m = action[0].rows if action else 0
        if m + g.dim > self.max_dim:
            return g, ()
        x = hemisemidirect(g, action)
        _, projection = quotient(x, module_ideal(x, m), name=g.name)
        extras = []
        for right in ('zero', 'negative'):
            module = bimodule_from_left_action(g, action, right, name=f"M_{right}")
            extras.append(pullback(module, x, projection))
        return x, tuple(extras)

    def _split_extension(self):
        base = self.rng.choice(self._fits(self.bases, self.max_dim // 2) or self.bases)
        options = [adjoint_bimodule(base), trivial_bimodule(base, 1 + self.rng.below(2))]
        v = self.rng.choice(options)
        if v.dim + base.dim > self.max_dim:
            return base, ()
        return split_extension(base, v), ()

    def _direct_sum(self):
        a = self.rng.choice(self.bases)
        partners = self._fits(self.bases, self.max_dim - a.dim)
        if not partners:
            return a, ()
        return direct_sum(a, self.rng.choice(partners)), ()

    def _quotient_centre(self):
        recipe = self.rng.choice(self.RECIPES[:4])
        alg, _ = getattr(self, '_' + recipe)()
        centre = left_centre(alg)
        if centre.is_zero() or centre.is_full():
            return alg, ()
        bar, _ = quotient(alg, centre, name=f"{alg.name}/Zl")
        return bar, ()

    def build(self, index):
        recipe = self.RECIPES[index % len(self.RECIPES)]
        alg, extras = getattr(self, '_' + recipe)()
        instance_id = f"{field_label(self.field)}-s{self.seed}-{index:04d}"
        return make_instance(instance_id, recipe, alg, self.rng, extras)

    def __iter__(self) -> Iterator[GeneratedInstance]:
        for index in range(self.budget):
            yield self.build(index)


def field_label(field):
    return f"gf{field.p}" if field.is_prime_field() else "q"


def _specimen_spaces(alg, rng):
    """Candidate subalgebras: series terms, closures of basis vectors and random lines, closure chains"""
    spaces = list(lower_central_series(alg).terms)
    for i in range(alg.dim):
        spaces.append(subalgebra_closure(alg, alg.span([alg.field.unit_vector(alg.dim, i)])))
    if alg.dim:
        line = alg.span([rng.vector(alg.field, alg.dim)])
        spaces.append(ideal_closure(alg, line, alg.full()))
        seeded = subalgebra_closure(alg, line)
        spaces.append(seeded)
        spaces.extend(subnormal_chain(alg, seeded).chain)
        pair = alg.span([rng.vector(alg.field, alg.dim), rng.vector(alg.field, alg.dim)])
        spaces.append(subalgebra_closure(alg, pair))
    unique = []
    for s in spaces:
        if s not in unique:
            unique.append(s)
    return unique


def make_instance(instance_id, recipe, alg, rng, extra_bimodules=()):
    spaces = _specimen_spaces(alg, rng)
    labelled = [(s, subnormal_chain(alg, s)) for s in spaces]
    # deepest chains first when trimming
    subnormal = sorted((item for item in labelled if item[1].subnormal), key=lambda item: -item[1].defect)
    others = [item for item in labelled if not item[1].subnormal]
    labelled = subnormal[:MAX_SPECIMENS - MAX_NON_SUBNORMAL] + others[:MAX_NON_SUBNORMAL]
    specimens = tuple(Specimen(f"u{k}", s, chain) for k, (s, chain) in enumerate(labelled))
    bimodules = [adjoint_bimodule(alg), trivial_bimodule(alg, 1)]
    for extra in extra_bimodules:
        if extra not in bimodules:
            bimodules.append(extra)
    logger.debug("%s: %s dim %d, %d specimens", instance_id, recipe, alg.dim, len(specimens))
    return GeneratedInstance(instance_id, recipe, alg, specimens, tuple(bimodules))


def generate(seed, field, max_dim, budget):
    """Deterministic stream of GeneratedInstance values"""
    return iter(InstanceGenerator(seed, field, max_dim, budget))


def catalogue_instances(field, seed=0):
    rng = XorShift64Star(seed + 17)
    for entry in catalogue(field):
        try:
            yield make_instance(f"{field_label(field)}-cat-{entry.name}", 'catalogue', entry.algebra, rng,
                                entry.bimodules)
        except LeibnizKernelError as e:
            logger.warning("skipping catalogue entry %s: %s", entry.name, e)
