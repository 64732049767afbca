import pytest

from services.algebra import is_lie, validate
from services.bimodule import (
    Bimodule,
    adjoint_bimodule,
    bimodule_from_left_action,
    centraliser,
    certify_irreducible,
    composition_series,
    faithful_quotient,
    hom_space,
    is_irreducible,
    is_sub_bimodule,
    isomorphic_irreducibles,
    minimal_submodule,
    pullback,
    quotient_bimodule,
    restrict_to,
    spin,
    split_extension,
    trivial_bimodule,
    validate_bimodule,
)
from services.constructions import catalogue, catalogue_entry, heisenberg_3, sl2_natural_action
from services.errors import (
    AlgebraMismatchError,
    EmptyModuleError,
    InvalidBimoduleError,
    PreconditionError,
    UnsupportedEnumerationError,
)
from services.exact_linalg import QQ, Matrix, gf


@pytest.fixture
def ad_heis_gf2():
    return adjoint_bimodule(heisenberg_3(gf(2)))


@pytest.fixture
def sl2_modules():
    """Bimodules of sl2 over GF(3), keyed by name"""
    entry = catalogue_entry(gf(3), 'sl2')
    return {v.name: v for v in entry.bimodules}


@pytest.mark.parametrize('field', [QQ, gf(2), gf(3)], ids=str)
def test_catalogue_bimodules_are_valid(field):
    for entry in catalogue(field):
        for v in entry.bimodules:
            assert validate_bimodule(v) == [], (entry.name, v.name)


def test_axioms_are_enforced(c2):
    zero = Matrix.zeros(QQ, 1, 1)
    one = Matrix.identity(QQ, 1)
    with pytest.raises(InvalidBimoduleError) as info:
        Bimodule(c2, 1, (zero, zero), (one, zero), name='broken')
    assert any(v.axiom == 'iii' for v in info.value.violations)


def test_right_action_choice(sl2_gf3):
    natural = sl2_natural_action(gf(3))
    assert bimodule_from_left_action(sl2_gf3, natural, 'negative').right_is_minus_left()
    assert bimodule_from_left_action(sl2_gf3, natural).right_is_zero()
    with pytest.raises(ValueError):
        bimodule_from_left_action(sl2_gf3, natural, 'twisted')


def test_split_extension(heis):
    ext = split_extension(heis, adjoint_bimodule(heis))
    assert ext.dim == 6
    assert validate(ext) == []
    trivial = split_extension(heis, trivial_bimodule(heis, 2))
    assert trivial.dim == 5


def test_split_extension_needs_the_same_algebra(heis, r2):
    with pytest.raises(AlgebraMismatchError):
        split_extension(r2, adjoint_bimodule(heis))


def test_centraliser(heis, r2, unit):
    assert centraliser(heis, adjoint_bimodule(heis)) == unit(heis, 2)
    assert centraliser(r2, adjoint_bimodule(r2)).is_zero()
    assert centraliser(heis, trivial_bimodule(heis, 1)).is_full()


def test_spin(heis):
    ad = adjoint_bimodule(heis)
    assert spin(ad, (0, 0, 1)).dim == 1
    assert spin(ad, (1, 0, 0)).basis == ((1, 0, 0), (0, 0, 1))
    assert spin(ad, (0, 0, 0)).is_zero()
    assert is_sub_bimodule(ad, spin(ad, (0, 1, 0)))


def test_minimal_submodule(ad_heis_gf2):
    assert minimal_submodule(ad_heis_gf2).basis == ((0, 0, 1),)
    assert not is_irreducible(ad_heis_gf2)
    with pytest.raises(PreconditionError):
        certify_irreducible(ad_heis_gf2)


def test_minimal_submodule_limits(heis):
    with pytest.raises(UnsupportedEnumerationError):
        minimal_submodule(adjoint_bimodule(heis))
    with pytest.raises(EmptyModuleError):
        minimal_submodule(trivial_bimodule(heisenberg_3(gf(2)), 0))


def test_composition_series(ad_heis_gf2):
    report = composition_series(ad_heis_gf2)
    assert report.factor_dims == [1, 1, 1]
    assert [s.dim for s in report.series] == [0, 1, 2, 3]
    assert report.iso_classes == ((0, 1, 2),)
    assert all(f.certified for f in report.factors)


def test_sl2_modules_are_irreducible(sl2_modules):
    assert set(sl2_modules) == {'ad(sl2)', 'natural_antisymmetric', 'natural_symmetric'}
    for v in sl2_modules.values():
        assert is_irreducible(v), v.name


def test_isomorphism_depends_on_the_sides(sl2_modules):
    a = certify_irreducible(sl2_modules['natural_antisymmetric'])
    s = certify_irreducible(sl2_modules['natural_symmetric'])
    assert not isomorphic_irreducibles(a, s)
    assert isomorphic_irreducibles(a, s, sides='left')
    assert isomorphic_irreducibles(a, a)
    with pytest.raises(PreconditionError):
        isomorphic_irreducibles(sl2_modules['natural_antisymmetric'], s)


def test_hom_space_of_an_absolutely_irreducible(sl2_modules):
    ad = sl2_modules['ad(sl2)']
    assert hom_space(ad, ad).dim == 1
    with pytest.raises(ValueError):
        hom_space(ad, ad, sides='right')


def test_hom_space_needs_one_algebra(heis, r2):
    with pytest.raises(AlgebraMismatchError):
        hom_space(adjoint_bimodule(heis), adjoint_bimodule(r2))


def test_quotient_bimodule(heis, unit):
    ad = adjoint_bimodule(heis)
    bar, projection = quotient_bimodule(ad, unit(heis, 2))
    assert bar.dim == 2
    assert (projection.rows, projection.cols) == (3, 2)
    assert validate_bimodule(bar) == []
    assert bar.right_is_zero()
    with pytest.raises(InvalidBimoduleError):
        quotient_bimodule(ad, unit(heis, 0))


def test_faithful_quotient(r2, heis):
    bar, induced, centre = faithful_quotient(r2, adjoint_bimodule(r2))
    assert bar.dim == 2 and centre.is_zero()
    bar, induced, centre = faithful_quotient(heis, adjoint_bimodule(heis))
    assert bar.dim == 2
    assert is_lie(bar)
    assert validate_bimodule(induced) == []


def test_restriction(heis, unit):
    restricted = restrict_to(adjoint_bimodule(heis), unit(heis, 0, 2))
    assert restricted.algebra.dim == 2
    assert restricted.dim == 3
    assert validate_bimodule(restricted) == []
    zero_restricted = restrict_to(adjoint_bimodule(heis), heis.zero())
    assert zero_restricted.algebra.dim == 0


def test_pullback_along_a_quotient(sl2_gf3, sl2_modules):
    natural = sl2_modules['natural_symmetric']
    identity = Matrix.identity(gf(3), 3)
    pulled = pullback(natural, sl2_gf3, identity)
    assert pulled.left == natural.left
    assert validate_bimodule(pulled) == []
