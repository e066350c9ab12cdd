from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from hecke_voronoi import linalg as la
from hecke_voronoi import model

from oracles import determinantal_divisors


small_ints = st.integers(min_value=-12, max_value=12)


def matrices(rows, cols):
    return st.lists(st.lists(small_ints, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def test_hnf_examples():
    H, U = la.hnf([[0, 1], [1, 0]])
    assert H == [[1, 0], [0, 1]]
    H, U = la.hnf([[2, 4], [6, 8]])
    assert H == [[2, 0], [0, 4]]
    assert la.matmul(U, [[2, 4], [6, 8]]) == H
    H, U = la.hnf(la.identity(3))
    assert H == la.identity(3) and U == la.identity(3)


def test_snf_examples():
    S, U, V = la.snf([[2, 0], [0, 2]])
    assert S == [[2, 0], [0, 2]]
    S, U, V = la.snf([[2, 4], [6, 8]])
    assert S == [[2, 0], [0, 4]]
    S, U, V = la.snf([[0, 0], [0, 0]])
    assert S == [[0, 0], [0, 0]]


def test_snf_against_minors():
    M = [[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]]
    S, U, V = la.snf(M)
    d = determinantal_divisors(M)
    prods = []
    acc = 1
    for i in range(4):
        acc *= S[i][i]
        prods.append(abs(acc))
    assert prods == d
    assert la.matmul(la.matmul(U, M), V) == S


@settings(max_examples=60, deadline=None)
@given(matrices(3, 4))
def test_hnf_properties(M):
    H, U = la.hnf(M)
    assert abs(la.det(U)) == 1
    assert la.matmul(U, M) == H
    assert la.is_hnf(H)


@settings(max_examples=60, deadline=None)
@given(matrices(3, 3))
def test_snf_divisibility_and_minors(M):
    S, U, V = la.snf(M)
    assert la.matmul(la.matmul(U, M), V) == S
    diag = [S[i][i] for i in range(3)]
    for a, b in zip(diag, diag[1:]):
        assert b == 0 or (a != 0 and b % a == 0)
    d = determinantal_divisors(M)
    acc = 1
    for i in range(3):
        acc *= diag[i]
        assert abs(acc) == d[i]


@settings(max_examples=60, deadline=None)
@given(matrices(3, 3))
def test_det_rank_against_sympy(M):
    assert la.det(M) == sympy.Matrix(M).det()
    assert la.rank(M) == sympy.Matrix(M).rank()


@settings(max_examples=40, deadline=None)
@given(matrices(4, 4))
def test_charpoly_against_sympy(M):
    x = sympy.Symbol("x")
    ref = sympy.Poly(sympy.Matrix(M).charpoly(x).as_expr(), x).all_coeffs()
    assert la.charpoly(M) == ref


def test_integer_kernel_is_saturated():
    M = [[2, 4, 6], [1, 2, 3]]
    K = la.integer_kernel(M)
    assert len(K) == 2
    for k in K:
        assert la.matvec(M, k) == [0, 0]
    # the kernel basis extends to a basis of Z^3
    S, _, _ = la.snf(K)
    assert [S[i][i] for i in range(2)] == [1, 1]


def test_solve_in_ray_basis_examples():
    assert list(la.solve_in_ray_basis([(1, 0), (0, 1)], (3, 5))) == [3, 5]
    rays = [model.q(v) for v in [(1, 0), (0, 1), (1, 1)]]
    x = model.sym_to_vec([[2, 1], [1, 2]])
    assert list(la.solve_in_ray_basis(rays, x)) == [1, 1, 1]
    with pytest.raises(la.NotInSpan):
        la.solve_in_ray_basis([(1, 0)], (0, 1))


def test_solve_in_dependent_rays():
    with pytest.raises(la.DependentRays):
        la.solve_in_ray_basis([(1, 0), (2, 0)], (1, 0))


def test_inverse_and_int_inverse():
    M = [[2, 1, 0], [1, 1, 0], [0, 0, 1]]
    assert la.matmul(M, la.int_inverse(M)) == la.identity(3)
    R = [[Fraction(1, 2), 1], [3, 4]]
    P = la.matmul(R, la.inverse(R))
    assert P == la.identity(2)
    with pytest.raises(ValueError):
        la.int_inverse([[2, 0], [0, 1]])


def test_primitive_and_xgcd():
    assert la.primitive((Fraction(1, 2), Fraction(3, 4))) == (2, 3)
    assert la.primitive((-4, 6)) == (-2, 3)
    g, x, y = la.xgcd(240, 46)
    assert g == 2 and 240 * x + 46 * y == 2
