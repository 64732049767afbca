import os

import pytest

from config.settings import get_settings
from services.constructions import cyclic_leibniz, heisenberg_3, r2_solvable, sl2
from services.exact_linalg import QQ, gf

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'data')


@pytest.fixture(autouse=True)
def fresh_settings():
    """Settings are cached per process; re-read the environment around every test"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def data_path():
    return lambda name: os.path.join(DATA_DIR, name)


@pytest.fixture
def gf2():
    return gf(2)


@pytest.fixture
def gf3():
    return gf(3)


@pytest.fixture
def c2():
    return cyclic_leibniz(QQ, 2)


@pytest.fixture
def heis():
    return heisenberg_3(QQ)


@pytest.fixture
def r2():
    return r2_solvable(QQ)


@pytest.fixture
def sl2_q():
    return sl2(QQ)


@pytest.fixture
def sl2_gf3():
    return sl2(gf(3))


@pytest.fixture
def unit():
    """Span of the given basis vectors"""
    return lambda alg, *indices: alg.span([alg.field.unit_vector(alg.dim, i) for i in indices])
