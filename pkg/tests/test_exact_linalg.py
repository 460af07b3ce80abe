from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gfcoh.exact_linalg import DimensionError, Lin, SparseMatrix, kernel_basis, rank, solve_preimage


def test_rank_examples():
    assert rank(SparseMatrix.identity(3)) == 3
    assert rank(SparseMatrix.zero(4, 7)) == 0
    assert rank(SparseMatrix.from_dense([[1, 2], [2, 4]])) == 1


def test_kernel_examples():
    assert kernel_basis(SparseMatrix.identity(2)) == []
    zero = SparseMatrix.zero(2, 2)
    ker = kernel_basis(zero)
    assert len(ker) == 2 and rank(SparseMatrix.from_dense(ker)) == 2
    (v,) = kernel_basis(SparseMatrix.from_dense([[1, 1]]))
    assert v[0] == -v[1] != 0


def test_solve_examples():
    b = [Fraction(3), Fraction(-2, 5)]
    assert solve_preimage(SparseMatrix.identity(2), b) == b
    assert solve_preimage(SparseMatrix.zero(2, 2), [1, 0]) is None
    assert solve_preimage(SparseMatrix.from_dense([[2]]), [1]) == [Fraction(1, 2)]
    with pytest.raises(DimensionError):
        solve_preimage(SparseMatrix.identity(2), [1, 2, 3])


def test_no_stored_zeros_and_immutability():
    m = SparseMatrix(2, 2, {(0, 0): 0, (1, 1): Fraction(2, 4)})
    assert dict(m.entries) == {(1, 1): Fraction(1, 2)}
    with pytest.raises((TypeError, AttributeError)):
        m.entries[(0, 0)] = 1
    with pytest.raises(Exception):
        SparseMatrix(2, 2, {(2, 0): 1})


def test_lin_symbols():
    x, y = Lin.symbol("x"), Lin.symbol("y")
    e = 2 * x - y + x * Fraction(1, 2)
    assert e == Lin({"x": Fraction(5, 2), "y": -1})
    assert not (x - x) and (x - x) == 0
    with pytest.raises(TypeError):
        x * y


small = st.integers(min_value=-3, max_value=3)


@st.composite
def matrices(draw, max_dim=6):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    return SparseMatrix.from_dense(rows, c)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_nullity_and_kernel(m):
    ker = kernel_basis(m)
    assert rank(m) + len(ker) == m.cols
    for v in ker:
        assert not any(m.matvec(v))


@settings(max_examples=150, deadline=None)
@given(matrices(), st.randoms(use_true_random=False))
def test_rank_permutation_invariant(m, rnd):
    rp = list(range(m.rows))
    cp = list(range(m.cols))
    rnd.shuffle(rp)
    rnd.shuffle(cp)
    assert rank(m.permuted(rp, cp)) == rank(m)
    assert rank(m.transpose()) == rank(m)


@settings(max_examples=150, deadline=None)
@given(matrices(), st.data())
def test_preimage_is_exact_or_absent(m, data):
    b = data.draw(st.lists(small, min_size=m.rows, max_size=m.rows))
    x = solve_preimage(m, b)
    if x is None:
        assert rank(m.with_column(b)) > rank(m)
    else:
        assert m.matvec(x) == [Fraction(v) for v in b]
