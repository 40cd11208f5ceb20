"""Watching the fill pattern grow with the level limit k.

The symbolic phase never touches numeric values: it walks the sparsity
pattern alone and decides which fill positions a level-k factorization
would keep. Higher k admits longer elimination chains, so the pattern
grows toward the full Gaussian elimination fill.
"""

import numpy as np

from blockiluk import extract_point_pattern, gen_poisson_3d, symbolic_phase

a = gen_poisson_3d(6, 6, 1)
base = extract_point_pattern(a)
print(f"6x6 grid operator: {base.nnz} stored positions before fill")

for k in range(5):
    grown = symbolic_phase(base, k)
    added = grown.nnz - base.nnz
    print(f"  k={k}: {grown.nnz:4d} positions ({added:4d} fill)")

# the fill of one row, shown against the original stencil
k = 2
grown = symbolic_phase(base, k)
row = 14  # an interior grid node
original = set(base.rows[row])
filled = [j for j in grown.rows[row] if j not in original]
print(f"\nrow {row} at k={k}: original columns {sorted(original)}")
print(f"              new fill columns {filled}")

# pattern growth is monotone in k
sets = [symbolic_phase(base, k).as_set() for k in range(4)]
print("\nmonotone growth:", all(a <= b for a, b in zip(sets, sets[1:])))

# with k as large as the dimension every elimination chain is admitted,
# which is exactly the complete-factorization fill
n = a.num_rows
full = symbolic_phase(base, n)
ge = np.zeros((n, n), dtype=bool)
for i, cols in enumerate(base.rows):
    ge[i, cols] = True
for p in range(n):
    for i in range(p + 1, n):
        if ge[i, p]:
            ge[i, p + 1:] |= ge[p, p + 1:]
print(f"unbounded level keeps {full.nnz} positions; "
      f"plain symbolic elimination fills {int(ge.sum())} (equal: {full.nnz == int(ge.sum())})")
