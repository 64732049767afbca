import pytest

from services.algebra import validate
from services.bimodule import adjoint_bimodule, validate_bimodule
from services.constructions import catalogue_entry, heisenberg_3
from services.errors import InvalidAlgebraError, InvalidBimoduleError, ParseError
from services.exact_linalg import QQ, gf
from services.file_formats import (
    format_algebra,
    format_bimodule,
    format_rows,
    parse_algebra,
    parse_bimodule,
    parse_rows,
    parse_subspace,
    read_algebra,
    read_bimodule,
)

HEIS = """\
# comment line
algebra heis dim 3 field q
0 1 2 1
1 0 2 -1   # yx = -z
"""


def test_parse_algebra():
    alg = parse_algebra(HEIS)
    assert alg.name == 'heis'
    assert alg.field == QQ
    assert alg.constants() == {(0, 1, 2): 1, (1, 0, 2): -1}


def test_prime_field_values_are_reduced():
    alg = parse_algebra("algebra h dim 3 field 3\n0 1 2 1\n1 0 2 -1\n")
    assert alg.constants() == {(0, 1, 2): 1, (1, 0, 2): 2}
    assert parse_algebra("algebra a dim 2 field 5\n0 0 1 1/2\n").constant(0, 0, 1) == 3


@pytest.mark.parametrize('text, line', [
    ("algebra x dim 2 field q\n0 0 1 1\n0 0 1 2\n", 3),
    ("algebra x dim 2\n", 1),
    ("algebra x dim 2 field 4\n", 1),
    ("algebra x dim 2 field q\n0 0 2 1\n", 2),
    ("algebra x dim 2 field q\n0 0 1\n", 2),
    ("algebra x dim 2 field q\n\n0 0 1 1/0\n", 3),
    ("algebra x dim 2 field q\n0 a 1 1\n", 2),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_algebra(text)
    assert str(info.value).startswith(f"line {line}:")
    assert info.value.line == line


def test_invalid_tensor_is_not_a_parse_error(data_path):
    with pytest.raises(InvalidAlgebraError):
        read_algebra(data_path('not_leibniz.alg'))
    unchecked = read_algebra(data_path('not_leibniz.alg'), check=False)
    assert validate(unchecked)


def test_format_algebra_round_trip():
    alg = parse_algebra(HEIS)
    text = format_algebra(alg)
    assert text.splitlines() == ["algebra heis dim 3 field q", "0 1 2 1", "1 0 2 -1"]
    assert parse_algebra(text) == alg


def test_bimodule_files(data_path):
    heis = read_algebra(data_path('heis3_gf2.alg'))
    v = read_bimodule(data_path('heis3_gf2_adjoint.bimod'), heis)
    assert v == adjoint_bimodule(heis)
    assert parse_bimodule(format_bimodule(v), heis) == v

    sl2 = read_algebra(data_path('sl2_gf3.alg'))
    natural = read_bimodule(data_path('sl2_gf3_natural_symmetric.bimod'), sl2)
    assert natural.right_is_minus_left()
    assert validate_bimodule(natural) == []


def test_bimodule_parse_errors():
    heis = heisenberg_3(gf(2))
    header = "bimodule v over heisenberg_3 dim 1\n"
    with pytest.raises(ParseError, match="line 4: duplicate block left 0"):
        parse_bimodule(header + "left 0\n0\nleft 0\n0\n", heis)
    with pytest.raises(ParseError, match="line 2:"):
        parse_bimodule(header + "left 3\n0\n", heis)
    with pytest.raises(ParseError, match="needs 1 rows"):
        parse_bimodule(header + "left 0\n", heis)
    with pytest.raises(ParseError, match="line 3: expected 1 entries"):
        parse_bimodule(header + "left 0\n0 1\n", heis)


def test_bimodule_axioms_are_checked_after_parsing():
    c2 = catalogue_entry(QQ, 'cyclic_leibniz_2').algebra
    text = "bimodule bad over cyclic_leibniz_2 dim 1\nright 0\n1\n"
    with pytest.raises(InvalidBimoduleError):
        parse_bimodule(text, c2)
    assert parse_bimodule(text, c2, check=False).dim == 1


def test_rows_and_subspaces(heis):
    assert parse_rows("1,0,0; 0,0,1", QQ, 3) == [(1, 0, 0), (0, 0, 1)]
    space = parse_subspace("2,0,0;0,0,3", heis)
    assert format_rows(space) == "1,0,0; 0,0,1"
    assert parse_subspace(";", heis).is_zero()
    with pytest.raises(ParseError) as info:
        parse_rows("1,0", QQ, 3)
    assert info.value.line is None


def test_bimodule_dim_must_be_non_negative():
    with pytest.raises(ParseError, match="line 1: dim must be non-negative"):
        parse_bimodule("bimodule v over heisenberg_3 dim -1\n", heisenberg_3(gf(2)))


def test_files_must_be_utf8(tmp_path):
    path = tmp_path / 'latin1.alg'
    path.write_bytes("algebra café dim 1 field q\n".encode('latin-1'))
    with pytest.raises(ParseError) as info:
        read_algebra(str(path))
    assert info.value.line == 1
    assert 'UTF-8' in str(info.value)
