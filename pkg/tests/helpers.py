"""Shared generators and reference oracles for the test suite.

Everything here is written the slow, obvious, dense way on purpose and
never calls back into the package kernels under test: plain elimination
loops, plain substitution loops, and a boolean fill oracle. Tests freeze
expected values against these.
"""

import numpy as np

from blockiluk.sparse import PatternMatrix, csr_from_triplets


def random_sparse_csr(rng, n, offdiag=4):
    """Random strictly diagonally dominant CSR, about offdiag+1 nnz/row."""
    rows, cols, vals = [], [], []
    for i in range(n):
        m = min(int(rng.integers(max(1, offdiag - 1), offdiag + 2)), n - 1)
        picks = rng.permutation(n - 1)[:m]
        picks = picks + (picks >= i)  # skip the diagonal slot
        row_vals = rng.uniform(-1.0, 1.0, size=m)
        rows.extend([i] * m)
        cols.extend(int(j) for j in picks)
        vals.extend(row_vals)
        rows.append(i)
        cols.append(i)
        vals.append(np.abs(row_vals).sum() + rng.uniform(1.0, 2.0))
    return csr_from_triplets(n, n, zip(rows, cols, vals))


def random_pattern(rng, n, offdiag=3):
    """Random sparsity pattern with every diagonal position present."""
    rows = []
    for i in range(n):
        m = min(int(rng.integers(0, offdiag + 1)), n - 1)
        picks = rng.permutation(n - 1)[:m]
        picks = picks + (picks >= i)
        rows.append(sorted({i, *(int(j) for j in picks)}))
    return PatternMatrix(n, rows)


def dense_lu_combined(a):
    """Unpivoted dense LU in combined storage.

    Multipliers go strictly below the diagonal (unit diagonal implied),
    U on and above. Classic outer-product elimination.
    """
    lu = np.array(a, dtype=float)
    n = lu.shape[0]
    for p in range(n - 1):
        piv = lu[p, p]
        if abs(piv) < 1e-300:
            raise ZeroDivisionError(f"zero pivot at step {p}")
        lu[p + 1:, p] /= piv
        lu[p + 1:, p + 1:] -= np.outer(lu[p + 1:, p], lu[p, p + 1:])
    return lu


def dense_forward_unit(strict_lower, b):
    """Forward substitution with an implied unit diagonal."""
    n = b.shape[0]
    x = np.zeros(n)
    for i in range(n):
        x[i] = b[i] - strict_lower[i, :i] @ x[:i]
    return x


def dense_backward_unit(strict_upper, b):
    """Backward substitution with an implied unit diagonal."""
    n = b.shape[0]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = b[i] - strict_upper[i, i + 1:] @ x[i + 1:]
    return x


def ge_fill_oracle(pattern):
    """Full Gaussian-elimination fill as a boolean dense matrix."""
    n = pattern.n
    filled = np.zeros((n, n), dtype=bool)
    for i in range(n):
        filled[i, pattern.rows[i]] = True
    for p in range(n):
        for i in range(p + 1, n):
            if filled[i, p]:
                filled[i, p + 1:] |= filled[p, p + 1:]
    return filled


def wavefront_oracle(strict_dense, orientation):
    """Per-row dependency depths of a strict triangle, the slow dense way."""
    n = strict_dense.shape[0]
    depth = np.zeros(n, dtype=np.int64)
    order = range(n) if orientation == "lower" else range(n - 1, -1, -1)
    for i in order:
        deps = np.flatnonzero(strict_dense[i])
        depth[i] = 1 + max((int(depth[j]) for j in deps), default=0)
    return depth
