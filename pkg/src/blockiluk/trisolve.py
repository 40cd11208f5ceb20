"""Level-scheduled solves with unit triangular factors.

Rows of a strictly triangular matrix are grouped into levels: a row's
level is one more than the largest level among the rows its stored
entries reference, and rows with no entries form level 1. All rows of one
level are mutually independent, so they may run on any number of workers;
each row is still reduced over its own entries in stored order, which
keeps every result bit identical no matter the worker count.
"""

import numpy as np

from .errors import StructuralError
from .parallel import run_chunks
from .sparse import CsrMatrix

__all__ = [
    "TriangularOperand",
    "LevelSchedule",
    "strict_triangle",
    "build_level_schedule",
    "solve_unit_triangular",
    "apply_block_diagonal",
    "apply_preconditioner",
]


class TriangularOperand:
    """Strictly lower or strictly upper CSR matrix with implied unit diagonal."""

    def __init__(self, matrix, orientation):
        if orientation not in ("lower", "upper"):
            raise ValueError("orientation must be 'lower' or 'upper'")
        if matrix.num_rows != matrix.num_cols:
            raise StructuralError("triangular operand must be square")
        erow = np.repeat(np.arange(matrix.num_rows, dtype=np.int64), np.diff(matrix.row_ptr))
        if orientation == "lower":
            ok = matrix.col_idx < erow
        else:
            ok = matrix.col_idx > erow
        if not np.all(ok):
            raise StructuralError(f"entry on or across the diagonal in a {orientation} operand")
        self.matrix = matrix
        self.orientation = orientation

    @property
    def n(self):
        return self.matrix.num_rows


def strict_triangle(a, orientation):
    """TriangularOperand holding the strictly lower or upper part of a CsrMatrix."""
    erow = np.repeat(np.arange(a.num_rows, dtype=np.int64), np.diff(a.row_ptr))
    keep = a.col_idx < erow if orientation == "lower" else a.col_idx > erow
    row_ptr = np.zeros(a.num_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(erow[keep], minlength=a.num_rows), out=row_ptr[1:])
    part = CsrMatrix(a.num_rows, a.num_cols, row_ptr, a.col_idx[keep], a.values[keep])
    return TriangularOperand(part, orientation)


class LevelSchedule:
    """Rows grouped by dependency level, plus packed per-level entry data.

    levels[l] lists the rows of level l+1 in ascending order;
    level_of_row[i] is 1-based. The packed arrays duplicate the operand's
    entries level by level so a solve is one gather, one segmented
    reduction, and one scatter per level.
    """

    def __init__(self, level_of_row, levels, num_levels, orientation, source, packed):
        self.level_of_row = level_of_row
        self.levels = levels
        self.num_levels = num_levels
        self.orientation = orientation
        self._source = source
        self._packed = packed

    def __repr__(self):
        return (f"LevelSchedule({self.orientation}, n={self.level_of_row.size}, "
                f"levels={self.num_levels})")


def _pack_level(matrix, rows):
    ptr, cols, vals = matrix.row_ptr, matrix.col_idx, matrix.values
    lens = ptr[rows + 1] - ptr[rows]
    total = int(lens.sum())
    if total == 0:
        return (rows, None, None, None)
    starts = ptr[rows]
    heads = np.zeros(rows.size, dtype=np.int64)
    np.cumsum(lens[:-1], out=heads[1:])
    gather = np.repeat(starts - heads, lens) + np.arange(total, dtype=np.int64)
    segptr = np.zeros(rows.size + 1, dtype=np.int64)
    np.cumsum(lens, out=segptr[1:])
    return (rows, cols[gather], vals[gather], segptr)


def build_level_schedule(t):
    """Group the rows of a triangular operand into dependency levels.

    Lower operands are scanned in forward row order, upper operands in
    reverse, so every referenced row already has its level. The level
    values equal one plus the longest dependency chain ending at the row.
    """
    m = t.matrix
    n = m.num_rows
    ptr, cols = m.row_ptr, m.col_idx
    lev = np.zeros(n, dtype=np.int64)
    order = range(n) if t.orientation == "lower" else range(n - 1, -1, -1)
    for i in order:
        s, e = ptr[i], ptr[i + 1]
        lev[i] = 1 + (int(lev[cols[s:e]].max()) if e > s else 0)
    num = int(lev.max()) if n else 0
    by_level = np.argsort(lev, kind="stable")
    counts = np.bincount(lev, minlength=num + 1)[1:]
    groups = np.split(by_level, np.cumsum(counts)[:-1]) if num else []
    packed = [_pack_level(m, rows) for rows in groups]
    return LevelSchedule(lev, groups, num, t.orientation, t, packed)


def solve_unit_triangular(t, schedule, b, workers=1):
    """Solve (I + T) x = b where T is the strictly triangular stored part.

    The unit diagonal means no divisions. The schedule must have been
    built from t. Worker counts only change how each level's rows are
    chunked, never any bit of the result; b is left untouched.
    """
    if schedule._source is not t:
        raise StructuralError("schedule was not built from this operand")
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (t.n,):
        raise ValueError(f"right-hand side length {b.shape} does not match n={t.n}")
    x = b.copy()
    for rows, ecols, evals, segptr in schedule._packed:
        if ecols is None:
            continue  # no dependencies: x keeps b for these rows

        def body(lo, hi, rows=rows, ecols=ecols, evals=evals, segptr=segptr):
            r = rows[lo:hi]
            e0, e1 = int(segptr[lo]), int(segptr[hi])
            prod = evals[e0:e1] * x[ecols[e0:e1]]
            x[r] = b[r] - np.add.reduceat(prod, segptr[lo:hi] - e0)

        run_chunks(body, rows.size, workers)
    return x


def apply_block_diagonal(dinv, y, workers=1):
    """z with z_I = dinv[I] @ y_I for each block row I.

    dinv is an (n, bs, bs) stack; this is a block-diagonal matrix-vector
    product, one small dense multiply per block.
    """
    n, bs = dinv.shape[0], dinv.shape[1]
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (n * bs,):
        raise ValueError(f"operand length {y.shape} does not match {n * bs}")
    yb = y.reshape(n, bs, 1)
    z = np.empty(n * bs)
    zb = z.reshape(n, bs, 1)

    def body(lo, hi):
        np.matmul(dinv[lo:hi], yb[lo:hi], out=zb[lo:hi])

    run_chunks(body, n, workers)
    return z


def apply_preconditioner(f, b, workers=1):
    """x = (U')^{-1} D^{-1} L^{-1} b using the prebuilt point-wise factors.

    Three stages: a level-scheduled unit lower solve, the block-diagonal
    product with the inverted diagonal blocks, and a level-scheduled unit
    upper solve. f is a BlockIlukFactors carrying the expanded triangles
    and their schedules.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (f.n * f.bs,):
        raise ValueError(f"right-hand side length {b.shape} does not match {f.n * f.bs}")
    y = solve_unit_triangular(f.lower_op, f.lower_schedule, b, workers=workers)
    z = apply_block_diagonal(f.dinv, y, workers=workers)
    return solve_unit_triangular(f.upper_op, f.upper_schedule, z, workers=workers)
