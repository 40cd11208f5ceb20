"""Sparse matrix containers: point CSR, block CSR, and index-only patterns.

All indices are 0-based, column indices increase strictly inside each row,
and values are float64. Instances are treated as immutable once built; the
factorization routines that advertise in-place behavior only overwrite the
values buffer of matrices they created themselves.
"""

from bisect import bisect_left, insort

import numpy as np

from .errors import StructuralError
from .parallel import run_chunks

__all__ = [
    "CsrMatrix",
    "BcsrMatrix",
    "PatternMatrix",
    "csr_from_triplets",
    "bcsr_from_csr",
    "csr_expand",
    "extract_point_pattern",
    "spmv",
]


def _index_array(a, name):
    arr = np.ascontiguousarray(a, dtype=np.int64)
    if arr.ndim != 1:
        raise StructuralError(f"{name} must be one-dimensional")
    return arr


def _check_csr_structure(num_rows, num_cols, row_ptr, col_idx, what):
    if num_rows < 0 or num_cols < 0:
        raise StructuralError(f"{what}: negative dimension")
    if row_ptr.shape != (num_rows + 1,) or (num_rows >= 0 and row_ptr[0] != 0):
        raise StructuralError(f"{what}: row_ptr must have num_rows+1 entries starting at 0")
    if np.any(np.diff(row_ptr) < 0):
        raise StructuralError(f"{what}: row_ptr must be nondecreasing")
    nnz = int(row_ptr[-1])
    if col_idx.shape != (nnz,):
        raise StructuralError(f"{what}: col_idx length must equal row_ptr[-1]")
    if nnz:
        if col_idx.min() < 0 or col_idx.max() >= num_cols:
            raise StructuralError(f"{what}: column index out of range")
        # a position t+1 may only break the ascending run if it starts a new row
        starts = np.zeros(nnz + 1, dtype=bool)
        starts[row_ptr[:-1]] = True
        if np.any((np.diff(col_idx) <= 0) & ~starts[1:nnz]):
            raise StructuralError(f"{what}: column indices must increase strictly within a row")


class CsrMatrix:
    """Point-wise sparse matrix in compressed sparse row storage."""

    def __init__(self, num_rows, num_cols, row_ptr, col_idx, values):
        self.num_rows = int(num_rows)
        self.num_cols = int(num_cols)
        self.row_ptr = _index_array(row_ptr, "row_ptr")
        self.col_idx = _index_array(col_idx, "col_idx")
        self.values = np.ascontiguousarray(values, dtype=np.float64)
        _check_csr_structure(self.num_rows, self.num_cols, self.row_ptr, self.col_idx, "CsrMatrix")
        if self.values.shape != self.col_idx.shape:
            raise StructuralError("CsrMatrix: values length must equal col_idx length")

    @property
    def shape(self):
        return (self.num_rows, self.num_cols)

    @property
    def nnz(self):
        return int(self.row_ptr[-1])

    def row(self, i):
        """Column-index and value views of one row."""
        s, e = int(self.row_ptr[i]), int(self.row_ptr[i + 1])
        return self.col_idx[s:e], self.values[s:e]

    def to_dense(self):
        out = np.zeros(self.shape)
        for i in range(self.num_rows):
            cols, vals = self.row(i)
            out[i, cols] = vals
        return out

    def __repr__(self):
        return f"CsrMatrix({self.num_rows}x{self.num_cols}, nnz={self.nnz})"


class BcsrMatrix:
    """Sparse matrix of dense square blocks in block CSR storage.

    row_ptr and col_idx describe the block structure exactly like
    CsrMatrix describes points. ``values`` holds one dense
    block_size x block_size block per stored position, flattened column by
    column, blocks following col_idx order. The block size is a runtime
    value, not a compile-time constant.
    """

    def __init__(self, block_size, num_block_rows, num_block_cols, row_ptr, col_idx, values):
        self.block_size = int(block_size)
        self.num_block_rows = int(num_block_rows)
        self.num_block_cols = int(num_block_cols)
        self.row_ptr = _index_array(row_ptr, "row_ptr")
        self.col_idx = _index_array(col_idx, "col_idx")
        self.values = np.ascontiguousarray(values, dtype=np.float64)
        if self.block_size < 1:
            raise StructuralError("BcsrMatrix: block size must be at least 1")
        _check_csr_structure(
            self.num_block_rows, self.num_block_cols, self.row_ptr, self.col_idx, "BcsrMatrix"
        )
        if self.values.shape != (self.nnzb * self.block_size**2,):
            raise StructuralError("BcsrMatrix: values length must be nnzb * block_size^2")

    @property
    def nnzb(self):
        return int(self.row_ptr[-1])

    @property
    def shape(self):
        """Point-wise shape."""
        return (self.num_block_rows * self.block_size, self.num_block_cols * self.block_size)

    @property
    def blocks(self):
        """(nnzb, bs, bs) view of the blocks; writes go through to values."""
        bs = self.block_size
        return self.values.reshape(self.nnzb, bs, bs).swapaxes(1, 2)

    def block_row(self, i):
        """Block-column indices and first slot index of one block row."""
        s, e = int(self.row_ptr[i]), int(self.row_ptr[i + 1])
        return self.col_idx[s:e], s

    def to_dense(self):
        bs = self.block_size
        out = np.zeros(self.shape)
        blocks = self.blocks
        for i in range(self.num_block_rows):
            cols, s = self.block_row(i)
            for t, j in enumerate(cols.tolist()):
                out[i * bs:(i + 1) * bs, j * bs:(j + 1) * bs] = blocks[s + t]
        return out

    def __repr__(self):
        return (
            f"BcsrMatrix(bs={self.block_size}, "
            f"{self.num_block_rows}x{self.num_block_cols} blocks, nnzb={self.nnzb})"
        )


class PatternMatrix:
    """Value-free square sparsity pattern with growable sorted rows.

    Rows are plain Python lists of strictly increasing column indices, so
    inserting or deleting one entry touches only the row it lives in.
    """

    def __init__(self, n, rows=None):
        self.n = int(n)
        if self.n < 0:
            raise StructuralError("PatternMatrix: negative dimension")
        if rows is None:
            self.rows = [[] for _ in range(self.n)]
            return
        rows = [[int(j) for j in r] for r in rows]
        if len(rows) != self.n:
            raise StructuralError("PatternMatrix: need one row list per row")
        for i, r in enumerate(rows):
            if any(r[t] >= r[t + 1] for t in range(len(r) - 1)):
                raise StructuralError(f"PatternMatrix: row {i} is not strictly increasing")
            if r and (r[0] < 0 or r[-1] >= self.n):
                raise StructuralError(f"PatternMatrix: row {i} has an index out of range")
        self.rows = rows

    @property
    def row_lengths(self):
        return [len(r) for r in self.rows]

    @property
    def nnz(self):
        return sum(len(r) for r in self.rows)

    def has(self, i, j):
        r = self.rows[i]
        t = bisect_left(r, j)
        return t < len(r) and r[t] == j

    def insert(self, i, j):
        """Add (i, j); silently a no-op if already present."""
        if not 0 <= j < self.n:
            raise StructuralError("PatternMatrix: index out of range")
        r = self.rows[i]
        t = bisect_left(r, j)
        if t == len(r) or r[t] != j:
            r.insert(t, j)

    def remove(self, i, j):
        r = self.rows[i]
        t = bisect_left(r, j)
        if t == len(r) or r[t] != j:
            raise KeyError((i, j))
        del r[t]

    def copy(self):
        out = PatternMatrix(self.n)
        out.rows = [list(r) for r in self.rows]
        return out

    def as_set(self):
        return {(i, j) for i, r in enumerate(self.rows) for j in r}

    def __eq__(self, other):
        if not isinstance(other, PatternMatrix):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __repr__(self):
        return f"PatternMatrix(n={self.n}, nnz={self.nnz})"


def assemble_csr(num_rows, num_cols, rows, cols, vals):
    """Build a CsrMatrix from parallel index/value arrays, summing duplicates."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    vals = np.asarray(vals, dtype=np.float64)
    if not (rows.shape == cols.shape == vals.shape):
        raise StructuralError("triplet arrays must have equal length")
    if rows.size == 0:
        return CsrMatrix(num_rows, num_cols, np.zeros(num_rows + 1, np.int64), [], [])
    if rows.min() < 0 or rows.max() >= num_rows or cols.min() < 0 or cols.max() >= num_cols:
        raise StructuralError("triplet index outside the matrix")
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    fresh = np.ones(rows.size, dtype=bool)
    fresh[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
    starts = np.flatnonzero(fresh)
    out_vals = np.add.reduceat(vals, starts)
    out_rows = rows[starts]
    out_cols = cols[starts]
    row_ptr = np.zeros(num_rows + 1, dtype=np.int64)
    np.cumsum(np.bincount(out_rows, minlength=num_rows), out=row_ptr[1:])
    return CsrMatrix(num_rows, num_cols, row_ptr, out_cols, out_vals)


def csr_from_triplets(num_rows, num_cols, entries):
    """Assemble a CsrMatrix from (row, col, value) triplets.

    Duplicate positions are summed. Indices outside the matrix raise
    StructuralError. An empty triplet list gives an empty matrix.
    """
    entries = list(entries)
    if not entries:
        return CsrMatrix(num_rows, num_cols, np.zeros(num_rows + 1, np.int64), [], [])
    rows, cols, vals = zip(*entries)
    return assemble_csr(num_rows, num_cols, rows, cols, vals)


def extract_point_pattern(a):
    """Pattern of the stored structure of a square CSR or block CSR matrix.

    For a BcsrMatrix the entries are block positions. The values buffer is
    never read, so garbage values cannot influence the result.
    """
    if isinstance(a, BcsrMatrix):
        n, m = a.num_block_rows, a.num_block_cols
    else:
        n, m = a.num_rows, a.num_cols
    if n != m:
        raise StructuralError("pattern extraction requires a square matrix")
    ptr = a.row_ptr
    rows = [a.col_idx[ptr[i]:ptr[i + 1]].tolist() for i in range(n)]
    return PatternMatrix(n, rows)


def spmv(a, x, workers=1):
    """y = a @ x.

    Each row is reduced over its stored entries as one fixed-order segment,
    so the result is bitwise independent of the worker count.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (a.num_cols,):
        raise ValueError(f"spmv: operand length {x.shape} does not match {a.num_cols} columns")
    y = np.zeros(a.num_rows)
    ptr, cols, vals = a.row_ptr, a.col_idx, a.values

    def body(lo, hi):
        s, e = int(ptr[lo]), int(ptr[hi])
        if s == e:
            return
        prod = vals[s:e] * x[cols[s:e]]
        local = ptr[lo:hi + 1] - s
        nonempty = local[:-1] != local[1:]
        sums = np.add.reduceat(prod, local[:-1][nonempty])
        y[np.arange(lo, hi)[nonempty]] = sums

    run_chunks(body, a.num_rows, workers)
    return y


def bcsr_from_csr(a, bs):
    """Reblock a point CSR matrix with square blocks of size bs.

    Both dimensions must be divisible by bs. A block is stored exactly
    when it contains at least one stored point entry; unset elements of a
    stored block are zero.
    """
    bs = int(bs)
    if bs < 1:
        raise StructuralError("block size must be at least 1")
    if a.num_rows % bs or a.num_cols % bs:
        raise StructuralError(
            f"block size {bs} does not divide matrix shape {a.num_rows}x{a.num_cols}"
        )
    nbr, nbc = a.num_rows // bs, a.num_cols // bs
    nnz = a.nnz
    if nnz == 0:
        return BcsrMatrix(bs, nbr, nbc, np.zeros(nbr + 1, np.int64), [], [])
    erow = np.repeat(np.arange(a.num_rows, dtype=np.int64), np.diff(a.row_ptr))
    bi = erow // bs
    bj = a.col_idx // bs
    key = bi * nbc + bj
    uniq = np.unique(key)
    row_ptr = np.zeros(nbr + 1, dtype=np.int64)
    np.cumsum(np.bincount((uniq // nbc).astype(np.int64), minlength=nbr), out=row_ptr[1:])
    col_idx = uniq % nbc
    slot = np.searchsorted(uniq, key)
    values = np.zeros(uniq.size * bs * bs)
    # column-major position of the element inside its block
    values[slot * bs * bs + (a.col_idx % bs) * bs + (erow % bs)] = a.values
    return BcsrMatrix(bs, nbr, nbc, row_ptr, col_idx, values)


def csr_expand(a):
    """Point-wise CSR with the same nonzero entries as a block CSR matrix.

    Exact zeros stored inside blocks are dropped; keeping them would only
    lengthen rows and deepen level schedules without changing any product.
    With bs = 1 the result is the input minus its stored zeros.
    """
    bs = a.block_size
    npt = a.num_block_rows * bs
    mpt = a.num_block_cols * bs
    if bs == 1:
        keep = a.values != 0.0
        erow = np.repeat(np.arange(a.num_block_rows, dtype=np.int64), np.diff(a.row_ptr))
        row_ptr = np.zeros(npt + 1, dtype=np.int64)
        np.cumsum(np.bincount(erow[keep], minlength=npt), out=row_ptr[1:])
        return CsrMatrix(npt, mpt, row_ptr, a.col_idx[keep], a.values[keep])
    blocks = a.blocks
    offs = np.arange(bs, dtype=np.int64)
    counts = np.zeros(npt, dtype=np.int64)
    col_parts = []
    val_parts = []
    for i in range(a.num_block_rows):
        bcols, s = a.block_row(i)
        if bcols.size == 0:
            continue
        sub = blocks[s:s + bcols.size]                  # (m, bs, bs)
        pcols = (bcols[:, None] * bs + offs[None, :])   # (m, bs)
        for r in range(bs):
            vals_r = sub[:, r, :].ravel()
            mask = vals_r != 0.0
            counts[i * bs + r] = int(np.count_nonzero(mask))
            col_parts.append(pcols.ravel()[mask])
            val_parts.append(vals_r[mask])
    row_ptr = np.zeros(npt + 1, dtype=np.int64)
    np.cumsum(counts, out=row_ptr[1:])
    col_idx = np.concatenate(col_parts) if col_parts else np.zeros(0, np.int64)
    values = np.concatenate(val_parts) if val_parts else np.zeros(0)
    return CsrMatrix(npt, mpt, row_ptr, col_idx, values)
