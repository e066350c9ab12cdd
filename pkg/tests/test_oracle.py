import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hecke_voronoi import linalg as la
from hecke_voronoi import model
from hecke_voronoi import oracle

from oracles import gauss_cone


def certify(x, ans):
    """Exact reconstruction of x from the certificate, with positive coordinates."""
    cus = ans.certified_cusps()
    assert tuple(sorted(cus)) == ans.cusps
    assert la.det([list(r) for r in ans.gamma]) == 1
    assert all(c > 0 for c in ans.coords)
    pts = [model.q(v) for v in cus]
    y = tuple(sum(c * p[i] for c, p in zip(ans.coords, pts)) for i in range(len(x)))
    assert y == tuple(Fraction(a) for a in x)


def test_cusp_is_its_own_cone():
    ans = oracle.reduce(model.q((1, 0)))
    assert ans.cusps == ((1, 0),)
    assert oracle.s_of_ray(model.q((3, -7))) == ((3, -7),)


def test_identity_form_n2():
    x = model.sym_to_vec([[1, 0], [0, 1]])
    ans = oracle.reduce(x)
    assert set(ans.cusps) == {(1, 0), (0, 1)}
    certify(x, ans)


def test_a2_form_is_interior():
    x = model.sym_to_vec([[2, 1], [1, 2]])
    ans = oracle.reduce(x)
    assert set(ans.cusps) == {(1, 0), (0, 1), (1, 1)}
    assert ans.coords == (1, 1, 1)


def test_diag_2_1():
    assert set(oracle.s_of_ray(model.sym_to_vec([[2, 0], [0, 1]]))) == {(1, 0), (0, 1)}


def test_scaling_is_harmless():
    x = model.sym_to_vec([[7, 3], [3, 5]])
    a, b = oracle.reduce(x), oracle.reduce(tuple(3 * t for t in x))
    assert a.cusps == b.cusps
    assert b.coords == tuple(3 * c for c in a.coords)


def test_outside_rejected():
    with pytest.raises(model.OutsideCone):
        oracle.reduce(model.sym_to_vec([[1, 0], [0, -1]]))
    with pytest.raises(model.OutsideCone):
        oracle.reduce((0, 0, 0))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10 ** 6), st.integers(1, 10 ** 6), st.integers(-10 ** 6, 10 ** 6))
def test_agrees_with_gauss_reduction(a, c, b):
    if a * c - b * b <= 0:
        return
    x = (a, c, b)
    ans = oracle.reduce(x)
    certify(x, ans)
    cus, coords = gauss_cone(a, b, c)
    positive = {v for v, t in zip(cus, coords) if t > 0}
    assert set(ans.cusps) == positive


def test_equivariance_n3():
    rng = random.Random(11)
    x = model.sym_to_vec([[6, 2, 1], [2, 5, -1], [1, -1, 4]])
    base = oracle.reduce(x)
    for _ in range(10):
        g = la.identity(3)
        for _ in range(6):
            i, j = rng.sample(range(3), 2)
            E = la.identity(3)
            E[i][j] = rng.choice([-2, -1, 1, 2])
            g = la.matmul(g, E)
        y = model.act(g, x)
        ans = oracle.reduce(y)
        certify(y, ans)
        assert set(ans.cusps) == {model.act_cusp(g, v) for v in base.cusps}


def test_boundary_points_n3():
    # rank two forms: transported through the image lattice
    v, w = (1, 2, 3), (0, 1, 1)
    x = tuple(a + b for a, b in zip(model.q(v), model.q(w)))
    ans = oracle.reduce(x)
    assert ans.rank == 2
    certify(x, ans)
    assert set(ans.cusps) <= {model.normalize_cusp(u) for u in
                              [v, w, tuple(a + b for a, b in zip(v, w)), tuple(a - b for a, b in zip(v, w))]}


def test_potentials_strictly_decrease():
    x = model.sym_to_vec([[9000, 4000, -3000], [4000, 8000, 100], [-3000, 100, 7000]])
    ans = oracle.reduce(x)
    assert all(b < a for a, b in zip(ans.potentials, ans.potentials[1:]))
