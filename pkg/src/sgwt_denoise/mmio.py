"""Matrix Market exchange format reader and writer.

Only real-valued matrices are supported (fields ``real``, ``integer`` and
``pattern``). Coordinate files become scipy sparse matrices; array files
become dense ndarrays.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import FormatError

BANNER = "%%MatrixMarket"

_FORMATS = {"coordinate", "array"}
_FIELDS = {"real", "integer", "pattern"}
_SYMMETRIES = {"general", "symmetric", "skew-symmetric"}


@dataclass(frozen=True)
class MatrixMarketHeader:
    object: str
    format: str
    field: str
    symmetry: str


@dataclass
class MatrixMarketFile:
    """Parse result.

    Attributes:
        header: banner qualifiers.
        matrix: CSC matrix (coordinate) or ndarray (array), symmetric storage
            expanded.
        comments: the ``%`` comment block following the banner, verbatim,
            one line per entry joined by ``\\n``.
        rows, cols, entries: size line values; ``entries`` is the stored
            count, so mirrored symmetric entries are counted once.
        duplicates: number of coordinate entries that repeated an earlier
            (i, j) and were summed into it.
    """

    header: MatrixMarketHeader
    matrix: sp.csc_matrix | np.ndarray
    comments: str
    rows: int
    cols: int
    entries: int
    duplicates: int = 0

    @property
    def has_duplicates(self) -> bool:
        return self.duplicates > 0


def _parse_header(line: str) -> MatrixMarketHeader:
    tokens = line.split()
    if not tokens or tokens[0] != BANNER:
        raise FormatError(f"expected '{BANNER}' banner, got {line.strip()[:40]!r}", line=1)
    if len(tokens) != 5:
        raise FormatError(f"banner needs 4 qualifiers, got {len(tokens) - 1}", line=1)
    obj, fmt, fld, sym = (t.lower() for t in tokens[1:])
    if obj != "matrix":
        raise FormatError(f"unsupported object {obj!r}", line=1)
    if fmt not in _FORMATS:
        raise FormatError(f"unsupported format {fmt!r}", line=1)
    if fld == "complex":
        raise FormatError("complex matrices are not supported", line=1)
    if fld not in _FIELDS:
        raise FormatError(f"unsupported field {fld!r}", line=1)
    if sym not in _SYMMETRIES:
        raise FormatError(f"unsupported symmetry {sym!r}", line=1)
    if fmt == "array" and fld == "pattern":
        raise FormatError("pattern field is not allowed with array format", line=1)
    return MatrixMarketHeader(obj, fmt, fld, sym)


def _ints(tokens, lineno, what):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FormatError(f"non-integer {what}: {' '.join(tokens)!r}", line=lineno) from None


def _value(token, field, lineno):
    try:
        if field == "integer":
            return float(int(token))
        return float(token)
    except ValueError:
        raise FormatError(f"non-numeric value {token!r}", line=lineno) from None


def parse_matrix_market(data) -> MatrixMarketFile:
    """Parse Matrix Market content.

    Args:
        data: bytes, str, or a binary/text file object.

    Raises:
        FormatError: with the 1-based line number of the first problem.
    """
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError:
            data = data.decode("latin-1")
    lines = data.splitlines()
    if not lines:
        raise FormatError("empty file", line=1)
    header = _parse_header(lines[0])

    comments = []
    lineno = 1
    in_comment_block = True
    size = None
    body = []
    for lineno, raw in enumerate(lines[1:], start=2):
        stripped = raw.strip()
        if stripped.startswith("%"):
            if in_comment_block:
                comments.append(raw)
            continue
        in_comment_block = False
        if not stripped:
            continue
        if size is None:
            size = (lineno, stripped.split())
        else:
            body.append((lineno, stripped.split()))
    if size is None:
        raise FormatError("missing size line", line=lineno + 1)

    size_line, size_tokens = size
    if header.format == "coordinate":
        if len(size_tokens) != 3:
            raise FormatError("coordinate size line needs 'rows cols entries'", line=size_line)
        nrows, ncols, nnz = _ints(size_tokens, size_line, "size")
    else:
        if len(size_tokens) != 2:
            raise FormatError("array size line needs 'rows cols'", line=size_line)
        nrows, ncols = _ints(size_tokens, size_line, "size")
        nnz = None
    if nrows < 0 or ncols < 0 or (nnz is not None and nnz < 0):
        raise FormatError("negative size", line=size_line)
    if header.symmetry != "general" and nrows != ncols:
        raise FormatError(f"{header.symmetry} matrix must be square, got {nrows}x{ncols}", line=size_line)

    text = "\n".join(comments)
    if header.format == "coordinate":
        matrix, dups = _coordinate(header, body, nrows, ncols, nnz, lineno)
        return MatrixMarketFile(header, matrix, text, nrows, ncols, nnz, dups)
    matrix, count = _array(header, body, nrows, ncols, lineno)
    return MatrixMarketFile(header, matrix, text, nrows, ncols, count, 0)


def _coordinate(header, body, nrows, ncols, nnz, last_line):
    want = 2 if header.field == "pattern" else 3
    if len(body) != nnz:
        where = body[nnz][0] if len(body) > nnz else last_line + 1
        raise FormatError(f"header declares {nnz} entries, found {len(body)}", line=where)
    sym = header.symmetry
    acc: dict[tuple[int, int], float] = {}
    dups = 0
    for lineno, tokens in body:
        if len(tokens) != want:
            raise FormatError(f"expected {want} tokens per entry, got {len(tokens)}", line=lineno)
        i, j = _ints(tokens[:2], lineno, "index")
        if not (1 <= i <= nrows and 1 <= j <= ncols):
            raise FormatError(f"index ({i}, {j}) outside {nrows}x{ncols}", line=lineno)
        v = 1.0 if header.field == "pattern" else _value(tokens[2], header.field, lineno)
        i -= 1
        j -= 1
        if sym == "skew-symmetric" and i == j:
            raise FormatError("skew-symmetric matrix has a diagonal entry", line=lineno)
        key = (i, j)
        if sym != "general" and i < j:
            # upper-triangle storage: canonicalise to lower, negating for skew
            key = (j, i)
            if sym == "skew-symmetric":
                v = -v
        if key in acc:
            dups += 1
            acc[key] += v
        else:
            acc[key] = v

    if acc:
        rows, cols = (np.fromiter(c, dtype=np.int64, count=len(acc)) for c in zip(*acc))
        vals = np.fromiter(acc.values(), dtype=float, count=len(acc))
    else:
        rows = cols = np.empty(0, dtype=np.int64)
        vals = np.empty(0)
    if sym != "general":
        off = rows != cols
        sign = -1.0 if sym == "skew-symmetric" else 1.0
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, sign * vals[off]]),
        )
    m = sp.csc_matrix((vals, (rows, cols)), shape=(nrows, ncols))
    m.sort_indices()
    return m, dups


def _array(header, body, nrows, ncols, last_line):
    sym = header.symmetry
    if sym == "general":
        positions = [(i, j) for j in range(ncols) for i in range(nrows)]
    elif sym == "symmetric":
        positions = [(i, j) for j in range(ncols) for i in range(j, nrows)]
    else:
        positions = [(i, j) for j in range(ncols) for i in range(j + 1, nrows)]
    values = []
    for lineno, tokens in body:
        for tok in tokens:
            values.append((lineno, tok))
    if len(values) != len(positions):
        where = values[len(positions)][0] if len(values) > len(positions) else last_line + 1
        raise FormatError(f"array needs {len(positions)} values, found {len(values)}", line=where)
    out = np.zeros((nrows, ncols))
    for (i, j), (lineno, tok) in zip(positions, values):
        v = _value(tok, header.field, lineno)
        out[i, j] = v
        if sym == "symmetric":
            out[j, i] = v
        elif sym == "skew-symmetric":
            out[j, i] = -v
    return out, len(positions)


def write_matrix_market(matrix, comments: str = "", symmetric: bool | None = None) -> str:
    """Serialise a sparse matrix as a real coordinate Matrix Market document.

    Values are written with ``repr`` so reading the text back is bit-exact.
    Symmetric matrices are stored as their lower triangle.
    """
    m = sp.csc_matrix(matrix, dtype=float)
    m.sum_duplicates()
    if symmetric is None:
        symmetric = m.shape[0] == m.shape[1] and (m != m.T).nnz == 0
    stored = sp.tril(m).tocoo() if symmetric else m.tocoo()
    order = np.lexsort((stored.row, stored.col))
    out = io.StringIO()
    out.write(f"{BANNER} matrix coordinate real {'symmetric' if symmetric else 'general'}\n")
    for line in comments.splitlines():
        out.write(line if line.startswith("%") else "%" + line)
        out.write("\n")
    out.write(f"{m.shape[0]} {m.shape[1]} {stored.nnz}\n")
    for k in order:
        out.write(f"{stored.row[k] + 1} {stored.col[k] + 1} {float(stored.data[k])!r}\n")
    return out.getvalue()


def write_matrix_market_array(a, comments: str = "") -> str:
    """Serialise a dense matrix as a general real array document (column-major)."""
    a = np.asarray(a, dtype=float)
    out = io.StringIO()
    out.write(f"{BANNER} matrix array real general\n")
    for line in comments.splitlines():
        out.write(line if line.startswith("%") else "%" + line)
        out.write("\n")
    out.write(f"{a.shape[0]} {a.shape[1]}\n")
    for v in a.ravel(order="F"):
        out.write(f"{float(v)!r}\n")
    return out.getvalue()
