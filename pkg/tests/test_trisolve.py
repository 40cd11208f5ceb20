import numpy as np
import pytest

from blockiluk.errors import StructuralError
from blockiluk.factor import build_preconditioner
from blockiluk.poisson import gen_poisson_3d
from blockiluk.sparse import bcsr_from_csr, csr_from_triplets, spmv
from blockiluk.trisolve import (
    TriangularOperand,
    apply_block_diagonal,
    apply_preconditioner,
    build_level_schedule,
    solve_unit_triangular,
    strict_triangle,
)

from helpers import (
    dense_backward_unit,
    dense_forward_unit,
    random_sparse_csr,
    wavefront_oracle,
)


def chain_lower(n):
    # x_i depends only on x_{i-1}
    return csr_from_triplets(n, n, [(i, i - 1, -1.0) for i in range(1, n)])


def test_operand_rejects_wrong_triangle():
    a = csr_from_triplets(2, 2, [(0, 1, 1.0)])
    with pytest.raises(StructuralError):
        TriangularOperand(a, "lower")
    d = csr_from_triplets(2, 2, [(0, 0, 1.0)])
    with pytest.raises(StructuralError):
        TriangularOperand(d, "lower")
    with pytest.raises(StructuralError):
        TriangularOperand(d, "upper")
    with pytest.raises(ValueError):
        TriangularOperand(a, "sideways")


def test_strict_triangle_extraction():
    rng = np.random.default_rng(9)
    a = random_sparse_csr(rng, 30)
    dense = a.to_dense()
    lo = strict_triangle(a, "lower")
    up = strict_triangle(a, "upper")
    assert np.array_equal(lo.matrix.to_dense(), np.tril(dense, -1))
    assert np.array_equal(up.matrix.to_dense(), np.triu(dense, 1))


def test_chain_schedule_is_sequential():
    t = TriangularOperand(chain_lower(5), "lower")
    s = build_level_schedule(t)
    assert s.num_levels == 5
    assert s.level_of_row.tolist() == [1, 2, 3, 4, 5]
    assert [r.tolist() for r in s.levels] == [[0], [1], [2], [3], [4]]


def test_diagonal_only_schedule_is_flat():
    t = TriangularOperand(csr_from_triplets(4, 4, []), "lower")
    s = build_level_schedule(t)
    assert s.num_levels == 1
    assert s.levels[0].tolist() == [0, 1, 2, 3]


def test_schedule_levels_match_dense_oracle():
    rng = np.random.default_rng(13)
    for _ in range(8):
        a = random_sparse_csr(rng, int(rng.integers(5, 80)))
        for orientation in ("lower", "upper"):
            t = strict_triangle(a, orientation)
            s = build_level_schedule(t)
            expect = wavefront_oracle(t.matrix.to_dense(), orientation)
            assert np.array_equal(s.level_of_row, expect)
            assert s.num_levels == int(expect.max())


def test_poisson_grid_wavefronts():
    # 2-D grid lower triangle sweeps by anti-diagonals
    a = gen_poisson_3d(5, 5, 1)
    t = strict_triangle(a, "lower")
    assert build_level_schedule(t).num_levels == 9


def test_chain_solve_frozen():
    t = TriangularOperand(chain_lower(5), "lower")
    s = build_level_schedule(t)
    b = np.zeros(5)
    b[0] = 1.0
    x = solve_unit_triangular(t, s, b)
    assert np.array_equal(x, np.ones(5))


def test_upper_chain_solve_frozen():
    n = 5
    up = csr_from_triplets(n, n, [(i, i + 1, -1.0) for i in range(n - 1)])
    t = TriangularOperand(up, "upper")
    s = build_level_schedule(t)
    b = np.zeros(n)
    b[-1] = 1.0
    x = solve_unit_triangular(t, s, b)
    assert np.array_equal(x, np.ones(n))


@pytest.mark.parametrize("orientation", ["lower", "upper"])
def test_solve_matches_dense_substitution(orientation):
    rng = np.random.default_rng(29)
    a = random_sparse_csr(rng, 150)
    t = strict_triangle(a, orientation)
    s = build_level_schedule(t)
    b = rng.standard_normal(150)
    x = solve_unit_triangular(t, s, b)
    dense = t.matrix.to_dense()
    oracle = (dense_forward_unit if orientation == "lower" else dense_backward_unit)(dense, b)
    assert np.allclose(x, oracle, rtol=1e-13, atol=1e-13)


def test_solve_bitwise_across_workers():
    rng = np.random.default_rng(31)
    a = random_sparse_csr(rng, 200)
    b = rng.standard_normal(200)
    for orientation in ("lower", "upper"):
        t = strict_triangle(a, orientation)
        s = build_level_schedule(t)
        base = solve_unit_triangular(t, s, b, workers=1)
        for w in (2, 4, 8):
            assert np.array_equal(solve_unit_triangular(t, s, b, workers=w), base)


def test_solve_inverts_unit_triangular_product():
    # check against the forward product instead of a second solver
    rng = np.random.default_rng(37)
    a = random_sparse_csr(rng, 60)
    t = strict_triangle(a, "lower")
    s = build_level_schedule(t)
    x = rng.standard_normal(60)
    b = x + spmv(t.matrix, x)  # (I + L) x
    got = solve_unit_triangular(t, s, b)
    assert np.allclose(got, x, rtol=1e-13, atol=1e-13)


def test_schedule_source_mismatch_rejected():
    a = chain_lower(4)
    t1 = TriangularOperand(a, "lower")
    t2 = TriangularOperand(chain_lower(4), "lower")
    s = build_level_schedule(t1)
    with pytest.raises(StructuralError):
        solve_unit_triangular(t2, s, np.zeros(4))


def test_solve_rejects_bad_rhs_length():
    t = TriangularOperand(chain_lower(4), "lower")
    s = build_level_schedule(t)
    with pytest.raises(ValueError):
        solve_unit_triangular(t, s, np.zeros(5))


def test_apply_block_diagonal():
    rng = np.random.default_rng(43)
    blocks = rng.standard_normal((6, 2, 2))
    y = rng.standard_normal(12)
    z = apply_block_diagonal(blocks, y)
    expect = np.concatenate([blocks[i] @ y[2 * i:2 * i + 2] for i in range(6)])
    assert np.allclose(z, expect, rtol=1e-15, atol=1e-15)
    for w in (2, 4):
        assert np.array_equal(apply_block_diagonal(blocks, y, workers=w), z)
    with pytest.raises(ValueError):
        apply_block_diagonal(blocks, np.zeros(11))


def test_apply_preconditioner_matches_dense_stages():
    a = bcsr_from_csr(gen_poisson_3d(4, 3, 2), 2)
    f = build_preconditioner(a, 1)
    rng = np.random.default_rng(53)
    r = rng.standard_normal(24)
    z = apply_preconditioner(f, r)
    y = dense_forward_unit(f.lower_op.matrix.to_dense(), r)
    n, bs = f.n, f.bs
    mid = np.concatenate([f.dinv[i] @ y[i * bs:(i + 1) * bs] for i in range(n)])
    expect = dense_backward_unit(f.upper_op.matrix.to_dense(), mid)
    assert np.allclose(z, expect, rtol=1e-13, atol=1e-13)
    for w in (2, 4, 8):
        assert np.array_equal(apply_preconditioner(f, r, workers=w), z)


def test_apply_preconditioner_rejects_bad_length():
    a = bcsr_from_csr(gen_poisson_3d(4, 3, 2), 2)
    f = build_preconditioner(a, 0)
    with pytest.raises(ValueError):
        apply_preconditioner(f, np.zeros(23))
