"""Symbolic phase of ILU(k): fill levels and the resulting pattern.

The level of an original entry is 0. Eliminating row i through pivot p
offers each position (i, j) with j past p the candidate level
lev(i, p) + lev(p, j) + 1, and the position keeps the minimum over all
offers. Positions whose final level exceeds k are not part of the result.

The computation below never stores a level above k: a candidate above k is
dropped on the spot. That produces the same pattern as purging after each
row finishes, because levels only ever shrink via min, a pivot with level
above k is skipped either way, and a finalized entry with level above k
can only generate candidates that are themselves above k.
"""

from bisect import bisect_left, insort

import numpy as np

from .errors import FactorizationError, StructuralError
from .sparse import CsrMatrix, PatternMatrix

__all__ = ["symbolic_phase", "coupled_iluk_oracle"]

_ZERO_PIVOT = 1e-300


def symbolic_phase(pattern, k):
    """Grow a pattern to the ILU(k) fill pattern, values never consulted.

    Parameters
    ----------
    pattern : PatternMatrix
        Square input pattern; every diagonal position must be present.
    k : int
        Highest fill level kept. k = 0 returns an equal pattern; the
        result grows monotonically with k and reaches the full Gaussian
        elimination fill once k is at least the matrix dimension.
    """
    k = int(k)
    if k < 0:
        raise ValueError("fill level k must be nonnegative")
    n = pattern.n
    out_rows = []
    # per finalized row: list of (col, level) pairs right of the diagonal
    upper = [None] * n
    for i in range(n):
        base = pattern.rows[i]
        lev = dict.fromkeys(base, 0)
        if i not in lev:
            raise StructuralError(f"row {i} has no diagonal entry")
        cand = [j for j in base if j < i]
        t = 0
        while t < len(cand):
            p = cand[t]
            t += 1
            lp = lev[p]  # always <= k: higher levels are never stored
            for j, lpj in upper[p]:
                lv = lp + lpj + 1
                if lv > k:
                    continue
                cur = lev.get(j)
                if cur is None:
                    lev[j] = lv
                    if j < i:
                        insort(cand, j, lo=t)
                elif lv < cur:
                    lev[j] = lv
        row = sorted(lev)
        out_rows.append(row)
        d = bisect_left(row, i)
        upper[i] = [(j, lev[j]) for j in row[d + 1:]]
    return PatternMatrix(n, out_rows)


def coupled_iluk_oracle(a, k):
    """Single-pass ILU(k) interleaving level updates with elimination.

    This is the reference the two-phase pipeline (symbolic_phase followed
    by ILU(0) on the materialized pattern) is checked against. It works on
    a dense copy, so it is meant for small matrices only.

    Returns
    -------
    (CsrMatrix, PatternMatrix)
        The factored matrix, unit-lower multipliers strictly below the
        diagonal and the upper factor on and above it, restricted to the
        surviving pattern; and that pattern.
    """
    k = int(k)
    if k < 0:
        raise ValueError("fill level k must be nonnegative")
    if a.num_rows != a.num_cols:
        raise StructuralError("oracle requires a square matrix")
    n = a.num_rows
    inf = np.int64(1) << 40
    dense = np.zeros((n, n))
    lev = np.full((n, n), inf, dtype=np.int64)
    for i in range(n):
        cols, vals = a.row(i)
        dense[i, cols] = vals
        lev[i, cols] = 0
    for i in range(1, n):
        for p in range(i):
            if lev[i, p] > k:
                continue
            d = dense[p, p]
            if abs(d) < _ZERO_PIVOT:
                raise FactorizationError(f"zero pivot in row {p}", row=p)
            dense[i, p] /= d
            if p + 1 < n:
                dense[i, p + 1:] -= dense[i, p] * dense[p, p + 1:]
                lev[i, p + 1:] = np.minimum(lev[i, p + 1:], lev[i, p] + lev[p, p + 1:] + 1)
        dense[i, lev[i] > k] = 0.0
    keep = lev <= k
    rows = [np.flatnonzero(keep[i]) for i in range(n)]
    row_ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum([r.size for r in rows], out=row_ptr[1:])
    col_idx = np.concatenate(rows) if n else np.zeros(0, np.int64)
    values = np.concatenate([dense[i, rows[i]] for i in range(n)]) if n else np.zeros(0)
    factored = CsrMatrix(n, n, row_ptr, col_idx, values)
    pat = PatternMatrix(n, [r.tolist() for r in rows])
    return factored, pat
