from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hyperhomog.exactlin import (
    DimensionError,
    RatMatrix,
    intersect_kernels,
    kernel_basis,
    rank,
    signature,
    solve,
    vstack,
)
from hyperhomog.irreducibility import killing_signature
from hyperhomog.quatrep import catalog

from strategies import invertible_matrices, rat_matrices


def cols(vectors):
    return [tuple(v.entries) for v in vectors]


def test_rational_scalars_are_reduced_and_exact():
    m = RatMatrix.from_rows([[Fraction(2, 4), 3]])
    assert m[0, 0] == Fraction(1, 2)
    assert m[0, 0].denominator == 2
    assert (m * 3)[0, 0] == Fraction(3, 2)


def test_entries_length_is_checked():
    with pytest.raises(DimensionError):
        RatMatrix(2, 2, [1, 2, 3])


def test_kernel_of_identity_is_empty():
    assert kernel_basis(RatMatrix.identity(3)) == []


def test_kernel_of_zero_is_standard_basis():
    assert cols(kernel_basis(RatMatrix.zeros(3))) == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def test_kernel_of_rank_one_matrix():
    basis = cols(kernel_basis(RatMatrix.from_rows([[1, 2, 3], [2, 4, 6]])))
    assert basis == [(-2, 1, 0), (-3, 0, 1)]


def test_empty_matrix_kernel_is_whole_domain():
    assert len(kernel_basis(RatMatrix(0, 4, []))) == 4


def test_intersect_kernels_examples():
    assert intersect_kernels([RatMatrix.identity(3)]) == []
    assert len(intersect_kernels([RatMatrix.zeros(2), RatMatrix.zeros(2)])) == 2
    assert intersect_kernels([RatMatrix.diag([1, 0]), RatMatrix.diag([0, 1])]) == []


def test_intersect_kernels_rejects_mismatched_columns():
    with pytest.raises(DimensionError):
        intersect_kernels([RatMatrix.zeros(2, 3), RatMatrix.zeros(2, 2)])


def test_signature_examples():
    assert signature(RatMatrix.diag([1, -1])) == (1, 1, 0)
    assert signature(RatMatrix.diag([0, 0])) == (0, 0, 2)


def test_signature_needs_pivoting_through_zero_diagonal():
    assert signature(RatMatrix.from_rows([[0, 1], [1, 0]])) == (1, 1, 0)


def test_signature_of_so12_killing_form():
    assert killing_signature(catalog("so12")).signature == (2, 1, 0)


def test_signature_rejects_non_symmetric():
    with pytest.raises(ValueError):
        signature(RatMatrix.from_rows([[1, 2], [0, 1]]))


def test_solve_consistent_and_inconsistent():
    m = RatMatrix.from_rows([[1, 1], [1, -1]])
    assert solve(m, [2, 0]) == (1, 1)
    assert solve(RatMatrix.from_rows([[1, 1], [2, 2]]), [1, 3]) is None


@settings(max_examples=60, deadline=None)
@given(rat_matrices())
def test_rank_nullity(m):
    basis = kernel_basis(m)
    assert rank(m) + len(basis) == m.cols
    for v in basis:
        assert (m @ v).is_zero()


@settings(max_examples=30, deadline=None)
@given(rat_matrices())
def test_kernel_basis_is_deterministic(m):
    copy = RatMatrix(m.rows, m.cols, m.entries)
    assert kernel_basis(m) == kernel_basis(copy)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(1, 20), st.data())
def test_intersect_equals_stacked_kernel(k, n, data):
    ops = [data.draw(rat_matrices(rows=data.draw(st.integers(1, 20 // k)), cols=n)) for _ in range(k)]
    stacked = kernel_basis(vstack(ops))
    assert intersect_kernels(ops, "stacked") == stacked
    assert intersect_kernels(ops, "iterative") == stacked


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(rat_matrices(rows=n, cols=n), invertible_matrices(n))))
def test_signature_is_congruence_invariant(pair):
    a, p = pair
    s = a + a.T
    assert signature(p.T @ s @ p) == signature(s)
