from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import sympy
from sympy.polys.matrices import DomainMatrix
from hypothesis import given, settings
from hypothesis import strategies as st

from indepforge import linalg as la
from indepforge.field import Field

F7 = Field(7)
F101 = Field(101)
QQ = Field.parse("QQ")

matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-20, 20), min_size=c, max_size=c), min_size=r, max_size=r)))


def sympy_rank_mod(M, p):
    return DomainMatrix.from_Matrix(sympy.Matrix(M)).convert_to(sympy.GF(p)).rank()


def test_field_parse_and_repr():
    assert repr(Field.parse("GF(101)")) == "GF(101)"
    assert repr(Field.parse("QQ")) == "QQ"
    assert Field.parse("gf(7)") == F7
    with pytest.raises(ValueError):
        Field(8)
    with pytest.raises(ValueError):
        Field.parse("ZZ")


def test_field_arithmetic():
    assert F7.mul(3, 5) == 1
    assert F7.inv(3) == 5
    assert F7(-1) == 6
    assert QQ.inv(Fraction(2, 3)) == Fraction(3, 2)
    with pytest.raises(ZeroDivisionError):
        F7.inv(0)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_matches_sympy_mod_p(M):
    assert la.rank(F101, M) == sympy_rank_mod(M, 101)


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_rank_matches_sympy_over_qq(M):
    assert la.rank(QQ, [[Fraction(v) for v in row] for row in M]) == sympy.Matrix(M).rank()


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_nullity_and_kernel(M):
    A = F7.array(M)
    K = la.kernel(F7, A)
    assert K.shape[0] + la.rank(F7, A) == A.shape[1]
    if K.shape[0]:
        assert F7.is_zero(F7.matmul(A, K.T))


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rref_is_canonical(M):
    A = F101.array(M)
    R, piv = la.rref(F101, A)
    R2, piv2 = la.rref(F101, R)
    assert piv == piv2 and np.array_equal(R, R2)
    # row operations do not change the canonical form
    P = F101.array([[1 if i == j else (2 if j == 0 else 0) for j in range(A.shape[0])] for i in range(A.shape[0])])
    R3, _ = la.rref(F101, F101.matmul(P, A))
    assert np.array_equal(la.span(F101, R3, A.shape[1]), la.span(F101, R, A.shape[1]))


def test_solve_and_subspace_operations():
    M = F7.array([[1, 2], [3, 4]])
    x = la.solve(F7, M, F7.array([5, 6]))
    assert np.array_equal(F7.matmul(M, x), F7.array([5, 6]))
    assert la.solve(F7, F7.array([[1, 1], [1, 1]]), F7.array([1, 2])) is None
    U = la.span(F7, F7.array([[1, 0, 0]]), 3)
    V = la.span(F7, F7.array([[0, 1, 0], [1, 1, 0]]), 3)
    assert la.is_subspace(F7, U, V)
    assert not la.is_subspace(F7, V, U)
    assert la.intersect(F7, U, V).shape[0] == 1
    assert la.add(F7, U, V).shape[0] == 2
    assert la.contains(F7, V, F7.array([2, 3, 0]))
