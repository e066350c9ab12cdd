import random

import pytest
import sympy

from hecke_voronoi import chains as ch
from hecke_voronoi import hecke
from hecke_voronoi import linalg as la
from hecke_voronoi import model
from hecke_voronoi import reduction as red

from oracles import ManinSymbols, elliptic_curve_ap

X = sympy.Symbol("x")


def ints(cp):
    return [int(c) for c in cp]


@pytest.mark.parametrize("n,p", [(2, 2), (2, 3), (2, 5), (3, 2), (3, 3)])
def test_coset_counts(n, p):
    T = hecke.coset_decomposition(model.Gamma0(n, 1), p)
    assert len(T) == (p ** n - 1) // (p - 1)
    for s in T.cosets:
        assert la.det(s) == p
    # pairwise distinct right cosets
    for i, s in enumerate(T.cosets):
        for t in T.cosets[i + 1:]:
            assert not hecke.same_coset(T.group, s, t)


def test_level_11_t2_cosets():
    G = model.Gamma0(2, 11)
    T = hecke.coset_decomposition(G, 2)
    expected = [[[1, 0], [0, 2]], [[1, 1], [0, 2]], [[2, 0], [0, 1]]]
    assert len(T) == 3
    assert sorted(hecke.coset_index(T, m) for m in expected) == [0, 1, 2]


def gamma0_generators(n, N):
    """Elementary matrices lying in Gamma_0(N) (first column (*, 0, ..., 0) mod N)."""
    gens = []
    for i in range(n):
        for j in range(n):
            if i != j:
                E = la.identity(n)
                E[i][j] = N if j == 0 else 1
                gens.append(E)
                gens.append(la.int_inverse(E))
    return gens


@pytest.mark.parametrize("n,N,p", [(2, 11, 11), (2, 14, 2), (2, 15, 5), (3, 2, 2)])
def test_cosets_when_p_divides_level(n, N, p):
    G = model.Gamma0(n, N)
    T = hecke.coset_decomposition(G, p)
    # [e_n] moves to every line of P^{n-1}(F_p) except [e_1]
    assert len(T) == (p ** n - 1) // (p - 1) - 1
    for s in T.cosets:
        assert la.det(s) == p
        M = la.matmul(la.inverse(T.g), s)
        assert all(x.denominator == 1 for row in M for x in row)
        assert G.contains([[int(x) for x in row] for row in M])
    # independent count: right cosets Gamma g gamma met by random words gamma
    rng = random.Random(5)
    gens = gamma0_generators(n, N)
    found = set()
    for _ in range(400):
        w = la.identity(n)
        for _ in range(rng.randint(0, 8)):
            w = la.matmul(w, rng.choice(gens))
        i = hecke.coset_index(T, la.matmul(T.g, w))
        assert i is not None
        found.add(i)
    assert found == set(range(len(T)))


def test_nonprime_rejected():
    with pytest.raises(hecke.UnsupportedOperator):
        hecke.coset_decomposition(model.Gamma0(2, 11), 4)


def test_hecke_image_support():
    T = hecke.coset_decomposition(model.Gamma0(2, 11), 3)
    xi = {ch.cusp_cone([(1, 0), (0, 1)]): 2, ch.cusp_cone([(1, 0), (1, 1)]): -1}
    img = hecke.hecke_image(T, xi)
    assert len(img) <= len(T) * len(xi)
    assert sum(abs(c) for c in img.values()) <= len(T) * 3


@pytest.mark.parametrize("N,p", [(11, 2), (11, 3), (11, 5), (11, 7), (11, 11), (14, 3), (14, 7),
                                 (15, 2), (15, 5), (23, 2)])
def test_charpoly_against_manin_symbols(N, p):
    res = red.hecke_matrix(model.Gamma0(2, N), p, algorithm="2", check_cycles=True)
    assert ints(res.charpoly) == [int(c) for c in ManinSymbols(N).charpoly(p)]


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_level_11_eigenvalues_from_the_curve(p):
    """Relative H_1 of X_0(11): one Eisenstein class (p + 1) and a_p of 11a1 twice."""
    ap = elliptic_curve_ap((0, -1, 1, -10, -20), p)
    res = red.hecke_matrix(model.Gamma0(2, 11), p, algorithm="1")
    expected = sympy.Poly((X - (p + 1)) * (X - ap) ** 2, X).all_coeffs()
    assert ints(res.charpoly) == [int(c) for c in expected]


def test_known_small_values():
    assert elliptic_curve_ap((0, -1, 1, -10, -20), 2) == -2
    assert elliptic_curve_ap((0, -1, 1, -10, -20), 3) == -1


def test_sl3_level_one_degree_two_is_empty():
    cx = ch.build_voronoi_complex(model.Gamma0(3, 1))
    assert ch.homology(cx, 2).rank == 0
    res = red.hecke_matrix(model.Gamma0(3, 1), 2, algorithm="2")
    assert res.rank == 0 and ints(res.charpoly) == [1]


def test_commuting_operators():
    G = model.Gamma0(2, 15)
    A = red.hecke_matrix(G, 2, algorithm="ar").matrix
    B = red.hecke_matrix(G, 7, algorithm="ar").matrix
    assert la.matmul(A, B) == la.matmul(B, A)
