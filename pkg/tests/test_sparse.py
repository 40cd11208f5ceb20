import numpy as np
import pytest

from blockiluk.errors import StructuralError
from blockiluk.poisson import gen_poisson_3d
from blockiluk.sparse import (
    BcsrMatrix,
    CsrMatrix,
    PatternMatrix,
    assemble_csr,
    bcsr_from_csr,
    csr_expand,
    csr_from_triplets,
    extract_point_pattern,
    spmv,
)

from helpers import random_sparse_csr


def test_csr_construction_and_dense():
    a = csr_from_triplets(2, 3, [(0, 2, 5.0), (1, 0, -1.0), (1, 1, 2.0)])
    assert a.shape == (2, 3)
    assert a.nnz == 3
    expect = np.array([[0.0, 0.0, 5.0], [-1.0, 2.0, 0.0]])
    assert np.array_equal(a.to_dense(), expect)


def test_csr_row_access():
    a = csr_from_triplets(3, 3, [(0, 0, 1.0), (0, 2, 2.0), (2, 1, 3.0)])
    cols, vals = a.row(0)
    assert cols.tolist() == [0, 2]
    assert vals.tolist() == [1.0, 2.0]
    cols, vals = a.row(1)
    assert cols.size == 0 and vals.size == 0


def test_csr_rejects_bad_row_ptr():
    with pytest.raises(StructuralError):
        CsrMatrix(2, 2, np.array([0, 2, 1]), np.array([0, 1]), np.ones(2))
    with pytest.raises(StructuralError):
        CsrMatrix(2, 2, np.array([0, 2]), np.array([0, 1]), np.ones(2))


def test_csr_rejects_bad_columns():
    with pytest.raises(StructuralError):
        CsrMatrix(2, 2, np.array([0, 1, 2]), np.array([0, 2]), np.ones(2))
    with pytest.raises(StructuralError):
        CsrMatrix(2, 2, np.array([0, 2, 2]), np.array([1, 0]), np.ones(2))
    with pytest.raises(StructuralError):
        CsrMatrix(2, 2, np.array([0, 2, 2]), np.array([1, 1]), np.ones(2))


def test_assemble_sums_duplicates():
    a = assemble_csr(2, 2, np.array([0, 0, 1]), np.array([1, 1, 0]),
                     np.array([2.0, 3.0, 4.0]))
    assert np.array_equal(a.to_dense(), np.array([[0.0, 5.0], [4.0, 0.0]]))


def test_assemble_sorts_unordered_input():
    rng = np.random.default_rng(7)
    n = 9
    dense = np.zeros((n, n))
    rows, cols, vals = [], [], []
    for _ in range(40):
        i, j = int(rng.integers(n)), int(rng.integers(n))
        v = float(rng.uniform(-1, 1))
        dense[i, j] += v
        rows.append(i)
        cols.append(j)
        vals.append(v)
    a = assemble_csr(n, n, np.array(rows), np.array(cols), np.array(vals))
    assert np.allclose(a.to_dense(), dense, rtol=0, atol=1e-15)
    assert np.all(np.diff(a.row_ptr) >= 0)


def test_spmv_frozen_small():
    # 1-D chain of three points: rows sum to [5, 4, 5]
    a = gen_poisson_3d(3, 1, 1)
    y = spmv(a, np.ones(3))
    assert np.array_equal(y, np.array([5.0, 4.0, 5.0]))


def test_spmv_matches_dense_and_workers_bitwise():
    rng = np.random.default_rng(21)
    a = random_sparse_csr(rng, 173)
    x = rng.standard_normal(173)
    y1 = spmv(a, x)
    assert np.allclose(y1, a.to_dense() @ x, rtol=1e-13, atol=1e-13)
    for w in (2, 3, 8):
        assert np.array_equal(spmv(a, x, workers=w), y1)


def test_spmv_rectangular_and_empty_rows():
    a = csr_from_triplets(3, 2, [(0, 1, 4.0), (2, 0, -2.0)])
    y = spmv(a, np.array([10.0, 3.0]))
    assert np.array_equal(y, np.array([12.0, 0.0, -20.0]))


def test_bcsr_from_csr_layout():
    # [[1 2 0 0]
    #  [3 4 0 0]
    #  [0 0 0 5]
    #  [6 0 0 7]]
    a = csr_from_triplets(4, 4, [(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0),
                          (1, 1, 4.0), (2, 3, 5.0), (3, 0, 6.0), (3, 3, 7.0)])
    b = bcsr_from_csr(a, 2)
    assert b.block_size == 2
    assert (b.num_block_rows, b.num_block_cols) == (2, 2)
    assert b.nnzb == 3
    assert np.array_equal(b.to_dense(), a.to_dense())
    # block elements are stored column-major inside each block
    assert b.values[:4].tolist() == [1.0, 3.0, 2.0, 4.0]
    # blocks view presents each slot in (row, col) orientation
    assert np.array_equal(b.blocks[0], np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert np.array_equal(b.blocks[1], np.array([[0.0, 0.0], [6.0, 0.0]]))
    assert np.array_equal(b.blocks[2], np.array([[0.0, 5.0], [0.0, 7.0]]))


def test_bcsr_blocks_view_is_writable():
    a = csr_from_triplets(2, 2, [(0, 0, 1.0), (1, 1, 2.0)])
    b = bcsr_from_csr(a, 2)
    b.blocks[0][0, 1] = 9.0
    assert b.values[2] == 9.0


def test_bcsr_requires_divisibility():
    a = gen_poisson_3d(3, 1, 1)
    with pytest.raises(StructuralError):
        bcsr_from_csr(a, 2)


def test_bcsr_block_row_access():
    a = gen_poisson_3d(4, 2, 1)
    b = bcsr_from_csr(a, 2)
    cols, start = b.block_row(0)
    assert cols.tolist()[0] == 0
    assert start == 0


def test_csr_expand_round_trip():
    rng = np.random.default_rng(33)
    a = random_sparse_csr(rng, 24)
    for bs in (1, 2, 3, 4):
        back = csr_expand(bcsr_from_csr(a, bs))
        assert np.array_equal(back.to_dense(), a.to_dense())


def test_csr_expand_drops_stored_zeros():
    # zero matrix element inside a stored block must not reach the
    # expansion: schedules built on expansions stay shallow
    a = csr_from_triplets(2, 2, [(0, 0, 1.0), (0, 1, 0.0), (1, 1, 2.0)])
    assert csr_expand(bcsr_from_csr(a, 2)).nnz == 2
    point = csr_expand(bcsr_from_csr(a, 1))
    assert point.nnz == 2
    assert np.array_equal(point.to_dense(), a.to_dense())


def test_extract_point_pattern_csr_vs_bcsr():
    a = gen_poisson_3d(4, 2, 1)
    p1 = extract_point_pattern(a)
    assert p1.n == 8
    assert p1.nnz == a.nnz
    b = bcsr_from_csr(a, 2)
    pb = extract_point_pattern(b)
    assert pb.n == 4
    # block pattern of the 2-blocked 4x2 grid: block-tridiagonal-ish
    assert all(pb.has(i, i) for i in range(4))
    p1b = extract_point_pattern(bcsr_from_csr(a, 1))
    assert p1b == p1


def test_extract_point_pattern_requires_square():
    a = csr_from_triplets(2, 3, [(0, 0, 1.0)])
    with pytest.raises(StructuralError):
        extract_point_pattern(a)


def test_pattern_matrix_ops():
    p = PatternMatrix(3, [[0], [1], [2]])
    assert p.nnz == 3
    assert not p.has(0, 1)
    p.insert(0, 1)
    p.insert(0, 1)
    assert p.has(0, 1)
    assert p.rows[0] == [0, 1]
    q = p.copy()
    q.remove(0, 1)
    assert p.has(0, 1) and not q.has(0, 1)
    assert p != q
    assert (0, 1) in p.as_set()
    assert p.row_lengths == [2, 1, 1]
