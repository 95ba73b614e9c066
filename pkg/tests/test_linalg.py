import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koszulmf.linalg import (
    ChainComplexPiece,
    LinSolver,
    NotAComplex,
    SparseMatrix,
    build_contraction,
    homology_ranks,
    reduce,
)

F = Fraction


def test_reduce_identity():
    rank, kernel, pivots = reduce(SparseMatrix.identity(3))
    assert rank == 3
    assert kernel == []
    assert pivots == [0, 1, 2]


def test_reduce_zero():
    rank, kernel, pivots = reduce(SparseMatrix.zero(2, 3))
    assert rank == 0
    assert pivots == []
    assert kernel == [
        [F(1), F(0), F(0)],
        [F(0), F(1), F(0)],
        [F(0), F(0), F(1)],
    ]


def test_reduce_rank_one():
    m = SparseMatrix.from_rows([[1, 1], [1, 1]])
    rank, kernel, pivots = reduce(m)
    assert rank == 1
    assert pivots == [0]
    # Canonical RREF kernel vector: 1 at the free column, -R[0,free] at the pivot.
    assert kernel == [[F(-1), F(1)]]


def test_reduce_is_deterministic():
    m = SparseMatrix.from_rows([[0, 2, 4], [1, 1, 1], [1, 3, 5]])
    first = reduce(m)
    second = reduce(m)
    assert first == second


def _random_matrix(rng, rows, cols, density=0.6):
    entries = {}
    for r in range(rows):
        for c in range(cols):
            if rng.random() < density:
                entries[(r, c)] = F(rng.randint(-3, 3))
    return SparseMatrix(rows, cols, entries)


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_reduce_properties(rows, cols, seed):
    rng = random.Random(seed)
    m = _random_matrix(rng, rows, cols)
    rank, kernel, pivots = reduce(m)
    assert rank == len(pivots) <= min(rows, cols)
    assert rank + len(kernel) == cols
    for vec in kernel:
        image = m.apply({i: v for i, v in enumerate(vec) if v})
        assert image == {}


def test_homology_two_term_acyclic():
    piece = ChainComplexPiece([1, 1], [SparseMatrix.identity(1)])
    assert homology_ranks(piece) == [0, 0]


def test_homology_zero_differential():
    piece = ChainComplexPiece([2, 3], [SparseMatrix.zero(3, 2)])
    assert homology_ranks(piece) == [2, 3]


def test_homology_rejects_non_complex():
    d0 = SparseMatrix.identity(2)
    d1 = SparseMatrix.identity(2)
    piece = ChainComplexPiece([2, 2, 2], [d0, d1])
    with pytest.raises(NotAComplex):
        homology_ranks(piece)


def _random_complex(seed):
    """Three-term complex with d1 o d0 = 0 and rank(d0) = 2."""
    rng = random.Random(seed)
    while True:
        d0 = _random_matrix(rng, 4, 3, density=0.8)
        if reduce(d0)[0] == 2:
            break
    # Rows of d1 are combinations of the cokernel of d0.
    rank, coker, _ = reduce(d0.transpose())
    rows = []
    for _ in range(2):
        combo = [F(0)] * 4
        for vec in coker:
            c = F(rng.randint(-2, 2))
            combo = [a + c * b for a, b in zip(combo, vec)]
        rows.append(combo)
    d1 = SparseMatrix.from_rows(rows)
    return ChainComplexPiece([3, 4, 2], [d0, d1])


def _identity_like(n):
    return SparseMatrix.identity(n)


@pytest.mark.parametrize("seed", [7, 19, 101])
def test_contraction_five_identities(seed):
    piece = _random_complex(seed)
    con = build_contraction(piece)
    dims = piece.dims
    ndeg = len(dims)
    total_h = sum(con.homology_dims)
    assert total_h == sum(homology_ranks(piece))
    for k in range(ndeg):
        i_k, p_k, h_k = con.inject[k], con.project[k], con.homotopy[k]
        # p i = 1 on homology coordinates.
        assert p_k * i_k == _identity_like(con.homology_dims[k])
        # d h + h d = 1 - i p.
        lhs = SparseMatrix.zero(dims[k], dims[k])
        if k > 0:
            lhs = lhs + piece.maps[k - 1] * h_k
        if k < ndeg - 1:
            lhs = lhs + con.homotopy[k + 1] * piece.maps[k]
        assert lhs == _identity_like(dims[k]) - i_k * p_k
        # h i = 0.
        assert (h_k * i_k).is_zero()
        # p h = 0.
        if k > 0:
            assert (con.project[k - 1] * h_k).is_zero()
        # h h = 0.
        if k > 0 and k < ndeg - 1:
            assert (h_k * con.homotopy[k + 1]).is_zero()


def test_contraction_respects_known_homology():
    # 0 -> Q^2 --0--> Q^2 -> 0 has full homology in both spots.
    piece = ChainComplexPiece([2, 2], [SparseMatrix.zero(2, 2)])
    con = build_contraction(piece)
    assert con.homology_dims == [2, 2]
    assert con.inject[0] == SparseMatrix.identity(2)


def test_linsolver_roundtrip():
    cols = [{0: F(1), 2: F(2)}, {1: F(3)}, {0: F(1), 1: F(1), 2: F(1)}]
    solver = LinSolver(cols)
    rhs = {0: F(3), 1: F(7), 2: F(5)}
    coefs, ok = solver.solve(rhs)
    assert ok
    rebuilt = {}
    for c, col in zip(coefs, cols):
        for r, v in col.items():
            rebuilt[r] = rebuilt.get(r, F(0)) + c * v
    assert {r: v for r, v in rebuilt.items() if v} == rhs


def test_linsolver_detects_inconsistency():
    solver = LinSolver([{0: F(1)}])
    coefs, ok = solver.solve({1: F(1)})
    assert not ok
