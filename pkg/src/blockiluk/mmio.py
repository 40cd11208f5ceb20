"""Matrix Market coordinate file ingestion."""

import numpy as np

from .errors import MatrixMarketError
from .sparse import assemble_csr

__all__ = ["read_matrix_market"]

_SUPPORTED_SYMMETRY = ("general", "symmetric")


def read_matrix_market(path):
    """Read a real coordinate Matrix Market file into a CsrMatrix.

    The banner must declare ``matrix coordinate real`` with ``general`` or
    ``symmetric`` symmetry; symmetric files are mirrored into full
    storage. Indices in the file are 1-based and converted to 0-based.
    Parse failures raise MatrixMarketError naming the offending line.
    """
    with open(path, "r", encoding="ascii", errors="replace") as fh:
        banner = fh.readline()
        if not banner:
            raise MatrixMarketError("empty file", line=1)
        tokens = banner.strip().lower().split()
        if len(tokens) != 5 or tokens[0] != "%%matrixmarket":
            raise MatrixMarketError("malformed banner, expected "
                                    "'%%MatrixMarket matrix coordinate real <symmetry>'", line=1)
        _, obj, fmt, field, symmetry = tokens
        if obj != "matrix":
            raise MatrixMarketError(f"unsupported object '{obj}'", line=1)
        if fmt != "coordinate":
            raise MatrixMarketError(f"unsupported format '{fmt}', only coordinate is handled",
                                    line=1)
        if field != "real":
            raise MatrixMarketError(f"unsupported field '{field}', only real is handled", line=1)
        if symmetry not in _SUPPORTED_SYMMETRY:
            raise MatrixMarketError(f"unsupported symmetry '{symmetry}'", line=1)

        lineno = 1
        size_line = None
        for raw in fh:
            lineno += 1
            text = raw.strip()
            if not text or text.startswith("%"):
                continue
            size_line = text
            break
        if size_line is None:
            raise MatrixMarketError("missing size line", line=lineno)
        parts = size_line.split()
        if len(parts) != 3:
            raise MatrixMarketError("size line must hold 'rows cols nnz'", line=lineno)
        try:
            num_rows, num_cols, nnz = (int(p) for p in parts)
        except ValueError:
            raise MatrixMarketError("size line must hold three integers", line=lineno) from None
        if num_rows < 0 or num_cols < 0 or nnz < 0:
            raise MatrixMarketError("negative size declaration", line=lineno)

        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz)
        seen = 0
        for raw in fh:
            lineno += 1
            text = raw.strip()
            if not text or text.startswith("%"):
                continue
            if seen >= nnz:
                raise MatrixMarketError("more entries than the size line declares", line=lineno)
            parts = text.split()
            if len(parts) != 3:
                raise MatrixMarketError("entry must hold 'row col value'", line=lineno)
            try:
                i = int(parts[0])
                j = int(parts[1])
                v = float(parts[2])
            except ValueError:
                raise MatrixMarketError(f"malformed entry '{text}'", line=lineno) from None
            if not (1 <= i <= num_rows and 1 <= j <= num_cols):
                raise MatrixMarketError(f"index ({i}, {j}) outside declared "
                                        f"{num_rows}x{num_cols} bounds", line=lineno)
            rows[seen] = i - 1
            cols[seen] = j - 1
            vals[seen] = v
            seen += 1
        if seen < nnz:
            raise MatrixMarketError(f"file ended after {seen} of {nnz} declared entries",
                                    line=lineno)

    if symmetry == "symmetric":
        off = rows != cols
        rows, cols, vals = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
            np.concatenate([vals, vals[off]]),
        )
    return assemble_csr(num_rows, num_cols, rows, cols, vals)
