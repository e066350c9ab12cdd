import pytest

from hecke_voronoi import chains as ch
from hecke_voronoi import linalg as la
from hecke_voronoi import model

from oracles import elliptic_points, gamma0_index, relative_h1_rank


def cone(*vs):
    return ch.cusp_cone(vs)


def test_boundary_examples():
    a, b, c = cone((1, 0)), cone((0, 1)), cone((1, 1))
    xi = {a + b: 1}
    assert ch.boundary(xi) == {b: 1, a: -1}
    tri = {a + b + c: 1}
    assert ch.boundary(tri) == {b + c: 1, a + c: -1, a + b: 1}
    assert ch.boundary(ch.boundary(tri)) == {}


def test_chain_arithmetic():
    a, b = cone((1, 0), (0, 1)), cone((0, 1), (1, 1))
    x = {a: 2, b: -1}
    assert ch.chain_add(x, x, -1) == {}
    assert ch.chain_scale(x, 3) == {a: 6, b: -3}
    assert ch.chain_sum([x, {a: -2}]) == {b: -1}


def test_degenerate_and_boundary_cones():
    assert ch.is_degenerate(cone((1, 0), (1, 0)))
    assert not ch.is_degenerate(cone((1, 0), (0, 1)))
    assert ch.in_boundary(cone((1, 0, 0), (0, 1, 0)))
    assert not ch.in_boundary(cone((1, 0, 0), (0, 1, 0), (0, 0, 1)))


@pytest.mark.parametrize("n,N", [(2, 1), (2, 11), (2, 14), (3, 1), (3, 2)])
def test_boundary_squares_to_zero(n, N):
    cx = ch.build_voronoi_complex(model.Gamma0(n, N))
    for d in cx.degrees():
        lower = cx.boundary_matrices.get(d - 1)
        D = cx.boundary_matrices[d]
        if lower and D and lower[0] and D[0]:
            assert all(x == 0 for row in la.matmul(lower, D) for x in row)


def test_level_one_orbits():
    cx = ch.build_voronoi_complex(model.Gamma0(2, 1))
    assert len(cx.all_cells[1]) == 1 and len(cx.all_cells[2]) == 1
    # the edge is flipped by its stabilizer, the triangle is not
    assert not cx.all_cells[1][0].orientable
    assert cx.all_cells[2][0].orientable


@pytest.mark.parametrize("N", [1, 2, 3, 5, 7, 11, 13, 14, 15, 21])
def test_orbit_counts_against_index(N):
    """Triangles: (mu + 2 nu3) / 3 orbits, edges: (mu + nu2) / 2 orbits."""
    cx = ch.build_voronoi_complex(model.Gamma0(2, N))
    mu = gamma0_index(N)
    nu2, nu3 = elliptic_points(N)
    assert len(cx.all_cells[2]) == (mu + 2 * nu3) // 3
    assert len(cx.all_cells[1]) == (mu + nu2) // 2


@pytest.mark.parametrize("N", [1, 2, 3, 5, 7, 11, 13, 14, 15, 17, 19, 21, 23, 26])
def test_relative_h1_matches_modular_curve(N):
    cx = ch.build_voronoi_complex(model.Gamma0(2, N))
    assert ch.homology(cx, 1).rank == relative_h1_rank(N)


def test_sl3_level_one():
    cx = ch.build_voronoi_complex(model.Gamma0(3, 1))
    ranks = {d: ch.homology(cx, d).rank for d in cx.degrees()}
    assert ranks == {2: 0, 3: 0, 4: 0, 5: 1}


@pytest.mark.parametrize("N", [11, 14])
def test_lift_project_roundtrip(N):
    cx = ch.build_voronoi_complex(model.Gamma0(2, N))
    H = ch.homology(cx, 1)
    for i in range(H.rank):
        e = [int(i == j) for j in range(H.rank)]
        xi = ch.lift(H, e)
        assert ch.is_relative_cycle(xi, cx)
        assert ch.project(H, xi) == e


def test_project_ignores_boundaries():
    cx = ch.build_voronoi_complex(model.Gamma0(2, 11))
    H = ch.homology(cx, 1)
    xi = ch.lift(H, [1, -2, 3])
    for o in cx.cells[2]:
        b = ch.boundary({ch.cusp_cone(o.rep): 1})
        # faces in the Satake boundary are dropped by the relative complex
        b = {k: v for k, v in b.items() if not ch.in_boundary(k)}
        assert ch.project(H, ch.chain_add(xi, b, 5)) == [1, -2, 3]


def test_projection_is_gamma_invariant():
    G = model.Gamma0(2, 11)
    cx = ch.build_voronoi_complex(G)
    H = ch.homology(cx, 1)
    xi = ch.lift(H, [2, 0, -1])
    for g in ([[1, 1], [0, 1]], [[1, 0], [11, 1]], [[4, 1], [11, 3]]):
        assert G.contains(g)
        assert ch.project(H, ch.act_chain(g, xi)) == [2, 0, -1]


def test_relative_cycle_detection():
    cx = ch.build_voronoi_complex(model.Gamma0(2, 11))
    # an edge between two cusps has boundary in the Satake boundary
    assert ch.is_relative_cycle({cone((1, 0), (1, 3)): 1}, cx)
    top = {cone((1, 0), (0, 1), (1, 1)): 1}
    tag = ch.is_relative_cycle(top, cx)
    assert not tag
    # [[1, 1], [0, 1]] carries (e1, e2) to (e1, e1 + e2), so those two faces cancel
    assert model.Gamma0(2, 11).contains([[1, 1], [0, 1]])
    assert tag.offending == [cone((0, 1), (1, 1))]
    # a triangle glued to a translate of minus itself along Gamma is closed
    g = [[1, 0], [11, 1]]
    pair = ch.chain_add(top, ch.act_chain(g, top), -1)
    assert ch.is_relative_cycle(pair, cx)


def test_identify_returns_group_element():
    G = model.Gamma0(2, 11)
    cx = ch.build_voronoi_complex(G)
    cus = ((1, 3), (2, 7))
    o, gamma = cx.identify(cus)
    assert G.contains(gamma)
    assert {model.act_cusp(gamma, v) for v in cus} == set(o.rep)
    with pytest.raises(ch.NotVoronoi):
        cx.identify(((1, 0), (1, 2)))
