"""Point CSR and block CSR storage, and moving between them.

Builds a small 7-point operator, reblocks it, peeks at the dense block
layout, and expands back to point storage.
"""

import numpy as np

from blockiluk import bcsr_from_csr, csr_expand, gen_poisson_3d, spmv

a = gen_poisson_3d(4, 4, 1)
print(f"operator on a 4x4 grid: {a.num_rows} rows, {a.nnz} stored entries")
print("dense view of the first four rows:")
print(a.to_dense()[:4])

# reblock at block size 2: entries are grouped into dense 2x2 tiles and a
# tile is stored whenever any of its four elements is nonzero
b = bcsr_from_csr(a, 2)
print(f"\nblocked at size 2: {b.num_block_rows} block rows, {b.nnzb} stored blocks")
print("first stored block (rows 0-1, cols 0-1):")
print(b.blocks[0])

# stored blocks include their internal zeros; expanding drops them again
back = csr_expand(b)
print(f"\nexpanded back to point storage: {back.nnz} entries "
      f"(matches the original: {back.nnz == a.nnz})")
print("round trip exact:", np.array_equal(back.to_dense(), a.to_dense()))

# matrix-vector products work off the point structure and are bitwise
# reproducible for any worker count
x = np.linspace(0.0, 1.0, a.num_rows)
y1 = spmv(a, x, workers=1)
y4 = spmv(a, x, workers=4)
print("\nspmv with 1 and 4 workers bitwise identical:", np.array_equal(y1, y4))
