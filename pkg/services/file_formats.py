"""
Text formats for algebras, bimodules and subspace rows

Algebra files:

    algebra <name> dim <n> field <q|p>
    i j k num[/den]          one line per nonzero structure constant (0-based)

Bimodule files:

    bimodule <name> over <algebra-name> dim <m>
    left <i>                 followed by m rows of m entries
    right <i>                likewise; omitted blocks are zero

Subspace rows (CLI ``--sub``): "1,0,0; 0,0,1".
Blank lines and text after '#' are ignored in files.
"""

import logging

from services.algebra import LeibnizAlgebra
from services.bimodule import Bimodule
from services.errors import ParseError
from services.exact_linalg import Matrix, field_from_token, span

logger = logging.getLogger(__name__)


def _content_lines(text):
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if line:
            yield number, line.split()


def _parse_value(field, token, line):
    try:
        return field.parse_value(token)
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"bad field entry {token!r}: {e}", line)


def _parse_int(token, what, line):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", line)


def parse_algebra(text, check=True):
    lines = _content_lines(text)
    header = next(lines, None)
    if header is None:
        raise ParseError("empty algebra file", 1)
    number, tokens = header
    if len(tokens) != 6 or tokens[0] != 'algebra' or tokens[2] != 'dim' or tokens[4] != 'field':
        raise ParseError("header must read 'algebra <name> dim <n> field <q|p>'", number)
    name = tokens[1]
    n = _parse_int(tokens[3], "dim", number)
    if n < 0:
        raise ParseError("dim must be non-negative", number)
    try:
        field = field_from_token(tokens[5])
    except ValueError as e:
        raise ParseError(str(e), number)

    constants = {}
    for number, tokens in lines:
        if len(tokens) != 4:
            raise ParseError("structure constant lines read 'i j k value'", number)
        i, j, k = (_parse_int(t, "index", number) for t in tokens[:3])
        if not all(0 <= t < n for t in (i, j, k)):
            raise ParseError(f"index out of range 0..{n - 1}", number)
        if (i, j, k) in constants:
            raise ParseError(f"duplicate structure constant ({i}, {j}, {k})", number)
        constants[(i, j, k)] = _parse_value(field, tokens[3], number)
    return LeibnizAlgebra.from_constants(field, n, constants, name=name, check=check)


def format_algebra(alg):
    field = alg.field
    lines = [f"algebra {alg.name or 'L'} dim {alg.dim} field {field.token}"]
    for (i, j, k), value in sorted(alg.constants().items()):
        lines.append(f"{i} {j} {k} {field.format_value(value)}")
    return '\n'.join(lines) + '\n'


def parse_bimodule(text, algebra, check=True):
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty bimodule file", 1)
    number, tokens = lines[0]
    if len(tokens) != 6 or tokens[0] != 'bimodule' or tokens[2] != 'over' or tokens[4] != 'dim':
        raise ParseError("header must read 'bimodule <name> over <algebra-name> dim <m>'", number)
    name, over = tokens[1], tokens[3]
    if algebra.name and over != algebra.name:
        logger.warning("bimodule %s is declared over %s but loaded over %s", name, over, algebra.name)
    m = _parse_int(tokens[5], "dim", number)
    if m < 0:
        raise ParseError("dim must be non-negative", number)
    field, n = algebra.field, algebra.dim
    blocks = {}
    position = 1
    while position < len(lines):
        number, tokens = lines[position]
        if len(tokens) != 2 or tokens[0] not in ('left', 'right'):
            raise ParseError("expected a 'left <i>' or 'right <i>' block header", number)
        side, index = tokens[0], _parse_int(tokens[1], "block index", number)
        if not 0 <= index < n:
            raise ParseError(f"block index out of range 0..{n - 1}", number)
        if (side, index) in blocks:
            raise ParseError(f"duplicate block {side} {index}", number)
        rows = []
        for offset in range(1, m + 1):
            if position + offset >= len(lines):
                raise ParseError(f"block {side} {index} needs {m} rows", number)
            row_number, row = lines[position + offset]
            if len(row) != m:
                raise ParseError(f"expected {m} entries, got {len(row)}", row_number)
            rows.append(tuple(_parse_value(field, t, row_number) for t in row))
        blocks[(side, index)] = Matrix(field, m, m, tuple(rows))
        position += m + 1
    zero = Matrix.zeros(field, m, m)
    left = tuple(blocks.get(('left', i), zero) for i in range(n))
    right = tuple(blocks.get(('right', i), zero) for i in range(n))
    return Bimodule(algebra, m, left, right, name=name, check=check)


def format_bimodule(v):
    field = v.field
    lines = [f"bimodule {v.name or 'V'} over {v.algebra.name or 'L'} dim {v.dim}"]
    for side, matrices in (('left', v.left), ('right', v.right)):
        for i, mat in enumerate(matrices):
            if mat.is_zero():
                continue
            lines.append(f"{side} {i}")
            for row in mat.entries:
                lines.append(' '.join(field.format_value(x) for x in row))
    return '\n'.join(lines) + '\n'


def parse_rows(text, field, ambient_dim):
    """Parse 'v1; v2; ...' with comma separated coordinates"""
    rows = []
    for chunk in text.split(';'):
        chunk = chunk.strip()
        if not chunk:
            continue
        entries = [t.strip() for t in chunk.split(',')]
        if len(entries) != ambient_dim:
            raise ParseError(f"row {chunk!r} has {len(entries)} entries, expected {ambient_dim}")
        rows.append(tuple(_parse_value(field, t, None) for t in entries))
    return rows


def parse_subspace(text, algebra):
    return span(algebra.field, parse_rows(text, algebra.field, algebra.dim), algebra.dim)


def format_rows(subspace):
    field = subspace.field
    return '; '.join(','.join(field.format_value(x) for x in row) for row in subspace.basis)


def _read_text(path):
    with open(path, 'rb') as f:
        raw = f.read()
    try:
        return raw.decode('utf-8')
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not valid UTF-8 (byte {raw[e.start]:#04x})",
                         raw[:e.start].count(b'\n') + 1) from e


def read_algebra(path, check=True):
    return parse_algebra(_read_text(path), check=check)


def read_bimodule(path, algebra, check=True):
    return parse_bimodule(_read_text(path), algebra, check=check)


def write_text(path, text):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
