"""Numeric factorization: small dense block kernels, ILU(0) on a prepared
pattern, and the diagonal split of the block upper factor.

The numeric phase never allocates new positions. Fill is decided entirely
by the symbolic phase; materialize() backfills those positions with zero
blocks so the factorization itself is a plain block ILU(0) whose loop
bodies touch only stored slots.
"""

from bisect import bisect_left
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .errors import FactorizationError, SingularBlockError, StructuralError
from .sparse import BcsrMatrix, CsrMatrix, bcsr_from_csr, csr_expand, extract_point_pattern
from .symbolic import symbolic_phase
from .trisolve import LevelSchedule, TriangularOperand, build_level_schedule

__all__ = [
    "BlockIlukFactors",
    "block_invert",
    "block_gemm_sub",
    "materialize",
    "point_ilu0_factorize",
    "block_ilu0_factorize",
    "split_ldu",
    "build_preconditioner",
]

# pivots below this fraction of the block's largest magnitude count as singular
_PIVOT_RTOL = 1e-13
# point pivots below this magnitude abort the factorization
_ZERO_PIVOT = 1e-300


def block_invert(b):
    """Inverse of a small dense block by LU with partial pivoting.

    Raises SingularBlockError when a pivot falls below 1e-13 times the
    block's largest magnitude; callers that know the block row attach it.
    """
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise StructuralError("block_invert needs a square block")
    bs = b.shape[0]
    amax = float(np.abs(b).max()) if bs else 0.0
    if amax == 0.0:
        raise SingularBlockError("singular block: all entries zero")
    if bs == 1:
        return np.array([[1.0 / b[0, 0]]])
    lu = b.copy()
    perm = np.arange(bs)
    for c in range(bs):
        p = c + int(np.argmax(np.abs(lu[c:, c])))
        if abs(lu[p, c]) < _PIVOT_RTOL * amax:
            raise SingularBlockError(f"singular block: pivot {lu[p, c]:.3e} at step {c}")
        if p != c:
            lu[[c, p]] = lu[[p, c]]
            perm[[c, p]] = perm[[p, c]]
        if c + 1 < bs:
            lu[c + 1:, c] /= lu[c, c]
            lu[c + 1:, c + 1:] -= np.outer(lu[c + 1:, c], lu[c, c + 1:])
    out = np.eye(bs)[perm]
    for r in range(1, bs):
        out[r] -= lu[r, :r] @ out[:r]
    for r in range(bs - 1, -1, -1):
        out[r] = (out[r] - lu[r, r + 1:] @ out[r + 1:]) / lu[r, r]
    return out


def block_gemm_sub(c, a, b):
    """c - a @ b for equal-size dense blocks, returned as a new block."""
    c = np.asarray(c, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if not (c.shape == a.shape == b.shape) or c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise StructuralError("block_gemm_sub needs three equal square blocks")
    return c - a @ b


def materialize(a, pprime):
    """Copy of a with pattern exactly pprime; added positions hold zeros.

    Accepts a BcsrMatrix (zero blocks backfilled) or a CsrMatrix (zero
    entries backfilled). Every stored position of a must appear in
    pprime, otherwise StructuralError.
    """
    if isinstance(a, BcsrMatrix):
        n, per_slot = a.num_block_rows, a.block_size**2
        if a.num_block_cols != n:
            raise StructuralError("materialize requires a square matrix")
        old_flat = a.values.reshape(a.nnzb, per_slot)
    else:
        n, per_slot = a.num_rows, 1
        if a.num_cols != n:
            raise StructuralError("materialize requires a square matrix")
        old_flat = a.values.reshape(a.nnz, 1)
    if pprime.n != n:
        raise StructuralError(f"pattern dimension {pprime.n} does not match matrix dimension {n}")
    new_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(pprime.row_lengths, out=new_ptr[1:])
    new_cols = (np.concatenate([np.asarray(r, dtype=np.int64) for r in pprime.rows])
                if int(new_ptr[-1]) else np.zeros(0, np.int64))
    new_flat = np.zeros((int(new_ptr[-1]), per_slot))
    for i in range(n):
        s, e = int(a.row_ptr[i]), int(a.row_ptr[i + 1])
        if s == e:
            continue
        ns, ne = int(new_ptr[i]), int(new_ptr[i + 1])
        prow = new_cols[ns:ne]
        ocols = a.col_idx[s:e]
        pos = np.searchsorted(prow, ocols)
        if np.any(pos >= prow.size) or np.any(prow[np.minimum(pos, prow.size - 1)] != ocols):
            missing = ocols[(pos >= prow.size) | (prow[np.minimum(pos, prow.size - 1)] != ocols)]
            raise StructuralError(f"pattern is missing stored position ({i}, {int(missing[0])})")
        new_flat[ns + pos] = old_flat[s:e]
    if isinstance(a, BcsrMatrix):
        return BcsrMatrix(a.block_size, n, n, new_ptr, new_cols, new_flat.ravel())
    return CsrMatrix(n, n, new_ptr, new_cols, new_flat.ravel())


def _point_ilu0_kernel(n, row_ptr, col_idx, values):
    # in-place IKJ elimination restricted to the stored pattern
    diag = [0.0] * n
    uppers = [None] * n
    for i in range(n):
        s, e = int(row_ptr[i]), int(row_ptr[i + 1])
        cols = col_idx[s:e].tolist()
        d = bisect_left(cols, i)
        if d == len(cols) or cols[d] != i:
            raise StructuralError(f"row {i} has no diagonal entry")
        w = dict(zip(cols, values[s:e].tolist()))
        for p in cols[:d]:
            vip = w[p] / diag[p]
            w[p] = vip
            ucols, uvals = uppers[p]
            for j, u in zip(ucols, uvals):
                if j in w:
                    w[j] -= vip * u
        dv = w[i]
        if abs(dv) < _ZERO_PIVOT:
            raise FactorizationError(f"zero pivot at row {i}", row=i)
        diag[i] = dv
        values[s:e] = [w[c] for c in cols]
        ucols = cols[d + 1:]
        uppers[i] = (ucols, [w[c] for c in ucols])


def point_ilu0_factorize(aprime):
    """ILU(0) on the stored pattern of aprime, overwriting values in place.

    Multipliers land strictly below the diagonal with a unit diagonal
    implied; the upper factor including the diagonal stays in place. Rows
    are eliminated in order, pivots within a row in ascending column
    order, so the result is deterministic.
    """
    if aprime.num_rows != aprime.num_cols:
        raise StructuralError("factorization requires a square matrix")
    _point_ilu0_kernel(aprime.num_rows, aprime.row_ptr, aprime.col_idx, aprime.values)
    return aprime


def block_ilu0_factorize(aprime):
    """Block ILU(0) on the stored block pattern of aprime, in place.

    Each pivot's diagonal block is inverted once (LU with partial
    pivoting, no pivoting across blocks) and applied by multiplication:
    A_ip <- A_ip D_p^{-1}, then A_ij <- A_ij - A_ip A_pj over the stored
    slots of row i. Block size one reduces to the point-wise kernel,
    division included.
    """
    if aprime.num_block_rows != aprime.num_block_cols:
        raise StructuralError("factorization requires a square matrix")
    n = aprime.num_block_rows
    if aprime.block_size == 1:
        _point_ilu0_kernel(n, aprime.row_ptr, aprime.col_idx, aprime.values)
        return aprime
    blocks = aprime.blocks
    ptr = aprime.row_ptr
    dinv = [None] * n
    uppers = [None] * n
    for i in range(n):
        s, e = int(ptr[i]), int(ptr[i + 1])
        cols = aprime.col_idx[s:e]
        d = int(np.searchsorted(cols, i))
        if d == cols.size or cols[d] != i:
            raise StructuralError(f"block row {i} has no diagonal block")
        for t, p in enumerate(cols[:d].tolist()):
            bip = blocks[s + t] @ dinv[p]
            blocks[s + t] = bip
            ucols, uslots = uppers[p]
            if ucols.size:
                pos = np.searchsorted(cols, ucols)
                pos_c = np.minimum(pos, cols.size - 1)
                hit = cols[pos_c] == ucols
                if np.any(hit):
                    blocks[s + pos_c[hit]] -= bip @ blocks[uslots[hit]]
        try:
            dinv[i] = block_invert(blocks[s + d])
        except SingularBlockError as err:
            raise SingularBlockError(f"singular diagonal block at row {i}", row=i) from err
        uppers[i] = (cols[d + 1:].copy(), np.arange(s + d + 1, e, dtype=np.int64))
    return aprime


@dataclass
class BlockIlukFactors:
    """Factor triple (L, D^{-1}, U') ready for repeated application.

    L and uprime keep the block structure of the factorization; dinv
    stacks the inverted diagonal blocks as an (n, bs, bs) array. L and U'
    both carry an implicit unit (block) diagonal. lower_op/upper_op are
    the same triangles expanded to point-wise CSR with their level
    schedules, the form apply_preconditioner consumes.
    """

    L: BcsrMatrix
    dinv: np.ndarray
    uprime: BcsrMatrix
    bs: int
    n: int
    lower_op: TriangularOperand
    lower_schedule: LevelSchedule
    upper_op: TriangularOperand
    upper_schedule: LevelSchedule


def split_ldu(f):
    """Split an in-place factored block matrix into BlockIlukFactors.

    The strictly lower slots become L, each diagonal block D_i is
    inverted, and each upper slot is rescaled to U'_ij = D_i^{-1} U_ij so
    U = D U' with U' unit on the (block) diagonal. The point-wise
    diagonal of the expanded U' is exactly one, whatever zigzag of values
    the block diagonal of U itself carries.
    """
    if f.num_block_rows != f.num_block_cols:
        raise StructuralError("split requires a square matrix")
    n, bs = f.num_block_rows, f.block_size
    per = bs * bs
    ptr = f.row_ptr
    flat = f.values.reshape(f.nnzb, per)
    l_ptr = np.zeros(n + 1, dtype=np.int64)
    u_ptr = np.zeros(n + 1, dtype=np.int64)
    dinv = np.empty((n, bs, bs))
    l_cols, l_vals, u_cols, u_vals = [], [], [], []
    blocks = f.blocks
    for i in range(n):
        s, e = int(ptr[i]), int(ptr[i + 1])
        cols = f.col_idx[s:e]
        d = int(np.searchsorted(cols, i))
        if d == cols.size or cols[d] != i:
            raise StructuralError(f"block row {i} has no diagonal block")
        try:
            dinv[i] = block_invert(blocks[s + d])
        except SingularBlockError as err:
            raise SingularBlockError(f"singular diagonal block at row {i}", row=i) from err
        l_ptr[i + 1] = l_ptr[i] + d
        u_ptr[i + 1] = u_ptr[i] + (cols.size - d - 1)
        if d:
            l_cols.append(cols[:d])
            l_vals.append(flat[s:s + d])
        if d + 1 < cols.size:
            u_cols.append(cols[d + 1:])
            scaled = dinv[i] @ blocks[s + d + 1:e]
            u_vals.append(scaled.swapaxes(1, 2).reshape(-1, per))
    def _cat(parts, dtype=None):
        if parts:
            return np.concatenate(parts)
        return np.zeros((0, per)) if dtype is None else np.zeros(0, dtype)
    lower = BcsrMatrix(bs, n, n, l_ptr, _cat(l_cols, np.int64), _cat(l_vals).ravel())
    upper = BcsrMatrix(bs, n, n, u_ptr, _cat(u_cols, np.int64), _cat(u_vals).ravel())
    lower_pt = csr_expand(lower)
    upper_pt = csr_expand(upper)
    lower_op = TriangularOperand(lower_pt, "lower")
    upper_op = TriangularOperand(upper_pt, "upper")
    return BlockIlukFactors(
        L=lower,
        dinv=dinv,
        uprime=upper,
        bs=bs,
        n=n,
        lower_op=lower_op,
        lower_schedule=build_level_schedule(lower_op),
        upper_op=upper_op,
        upper_schedule=build_level_schedule(upper_op),
    )


@contextmanager
def _stage(name):
    # prefix pipeline errors with the stage that raised them
    try:
        yield
    except (StructuralError, FactorizationError) as err:
        err.args = ((f"{name}: {err.args[0]}" if err.args else name,) + err.args[1:])
        raise


def build_preconditioner(a, k):
    """Run the two-phase pipeline on a block matrix and return its factors.

    Stages: extract the value-free block pattern, grow it to the level-k
    fill pattern, materialize the grown pattern with zero-block backfill,
    factorize in place with block ILU(0), split into (L, D^{-1}, U').
    Errors carry the stage name. The input matrix is not modified; only
    the materialized copy is factored. A point CSR matrix is treated as
    block size one.
    """
    if isinstance(a, CsrMatrix):
        a = bcsr_from_csr(a, 1)
    with _stage("extract-pattern"):
        pattern = extract_point_pattern(a)
    with _stage("symbolic-phase"):
        grown = symbolic_phase(pattern, k)
    with _stage("materialize"):
        prepared = materialize(a, grown)
    with _stage("factorize"):
        factored = block_ilu0_factorize(prepared)
    with _stage("split"):
        return split_ldu(factored)
