import pytest
from hypothesis import given, settings, strategies as st

from hecke_voronoi import linalg as la
from hecke_voronoi import model


def test_rank_one_form():
    assert model.vec_to_sym(model.q((1, 0, 0))) == [[1, 0, 0], [0, 0, 0], [0, 0, 0]]
    a, b, c = 2, -3, 5
    assert model.vec_to_sym(model.q((a, b, c))) == [[a * a, a * b, a * c],
                                                     [a * b, b * b, b * c],
                                                     [a * c, b * c, c * c]]
    assert model.vec_to_sym(model.q((1, 1))) == [[1, 1], [1, 1]]
    with pytest.raises(model.ZeroVector):
        model.q((0, 0))


@given(st.lists(st.integers(-30, 30), min_size=3, max_size=3).filter(any))
def test_cusp_of_form_inverts_q(v):
    w = model.normalize_cusp(v)
    assert model.cusp_of_form(model.q(w)) == w


def test_classify_point():
    assert model.classify_point(model.sym_to_vec([[1, 0], [0, 1]])).kind == "interior"
    c = model.classify_point(model.q((1, 0)))
    assert c.kind == "boundary" and c.component.rank == 1
    assert c.component.contains_cusp((1, 0)) and not c.component.contains_cusp((0, 1))
    assert model.classify_point(model.sym_to_vec([[1, 0], [0, -1]])).kind == "outside"


def test_q_rank():
    assert model.q_rank(model.q((3, 1, 2))) == 1
    assert model.q_rank(model.sym_to_vec(la.identity(3))) == 3
    e1, e2 = model.q((1, 0, 0)), model.q((0, 1, 0))
    assert model.q_rank(tuple(a + b for a, b in zip(e1, e2))) == 2


def test_group_action():
    x = model.sym_to_vec([[3, 1], [1, 2]])
    assert model.act(la.identity(2), x) == x
    g = [[0, -1], [1, 0]]
    assert model.act(g, model.q((1, 0))) == model.q((0, 1))
    g = [[1, 1], [0, 1]]
    assert model.vec_to_sym(model.act(g, model.q((0, 1)))) == [[1, 1], [1, 1]]
    assert model.act_cusp(g, (0, 1)) == (1, 1)


def test_voronoi_standard_data():
    d3 = model.voronoi_standard_data(3)
    assert len(d3.cusps) == 6
    d2 = model.voronoi_standard_data(2)
    assert len(d2.cusps) == 3
    assert list(d2.coordinates(model.sym_to_vec([[2, 1], [1, 2]]))) == [1, 1, 1]


@pytest.mark.parametrize("n", [2, 3])
def test_neighbor_certificates(n):
    d = model.voronoi_standard_data(n)
    std = set(d.cusps)
    images = set()
    for i, delta in enumerate(d.neighbors):
        assert la.det(delta) == 1
        img = {model.act_cusp(delta, v) for v in d.cusps}
        # the neighbor shares exactly the facet opposite to cusp i
        assert img & std == std - {d.cusps[i]}
        images.add(frozenset(img))
    assert len(images) == len(d.neighbors)


def test_pi_face_in_boundary():
    comp = model.classify_point(model.q((2, 1, 1))).component
    data = model.pi_face_in_boundary(comp)
    assert data.rank == 1 and data.cusps == ((2, 1, 1),)
    comp = model.BoundaryComponent(3, ((1, 0, 0), (0, 1, 0)))
    data = model.pi_face_in_boundary(comp)
    assert data.rank == 2
    assert set(data.cusps) == {(1, 0, 0), (0, 1, 0), (1, 1, 0)} or \
        set(data.cusps) == {(1, 0, 0), (0, 1, 0), (1, -1, 0)}
    for v in data.cusps:
        assert comp.contains_cusp(v)
    assert model.pi_face_in_boundary(model.BoundaryComponent(3, tuple(map(tuple, la.identity(3))))) \
        is model.voronoi_standard_data(3)


def test_gamma0_membership():
    for N in (1, 2, 11):
        assert model.Gamma0(2, N).contains(la.identity(2))
    assert not model.Gamma0(2, 2).contains([[1, 0], [1, 1]])
    assert model.Gamma0(3, 5).contains([[1, 2, 3], [5, 1, 0], [10, 0, 1]]) is (
        la.det([[1, 2, 3], [5, 1, 0], [10, 0, 1]]) == 1)


@pytest.mark.parametrize("n,N", [(2, 11), (2, 12), (3, 2), (3, 4)])
def test_projective_points_and_coset_reps(n, N):
    G = model.Gamma0(n, N)
    pts = G.points()
    if n == 2:
        expected = N
        for p in {2, 3, 5, 7, 11}:
            if N % p == 0:
                expected = expected * (p + 1) // p
        assert len(pts) == expected
    for p in pts:
        R = G.coset_rep(p)
        assert la.det(R) == 1
        assert G.label(R) == p


def test_label_is_a_coset_invariant():
    G = model.Gamma0(2, 11)
    g = [[3, 1], [5, 2]]
    h = [[1, 0], [11, 1]]
    assert G.contains(h)
    assert G.label(la.matmul(h, g)) == G.label(g)


def test_sl_matches_respects_group():
    src = [(1, 0), (0, 1)]
    dst = [(1, 0), (1, 1)]
    all_m = model.sl_matches(src, dst)
    assert all_m
    for g in all_m:
        assert {model.act_cusp(g, v) for v in src} == set(dst)
    G = model.Gamma0(2, 2)
    for g in model.sl_matches(src, dst, group=G):
        assert G.contains(g)


def test_cell_types():
    t2 = model.cell_types(2)
    assert sorted(t2) == [2, 3] and len(t2[2]) == 1 and len(t2[3]) == 1
    t3 = model.cell_types(3)
    assert sorted(t3) == [3, 4, 5, 6]
    assert len(t3[6]) == 1
    # stabilizer of the standard top cone of SL3 permutes its six cusps
    assert len(t3[6][0].stabilizer) == 24


def test_unsupported_rank():
    with pytest.raises(model.UnsupportedRank):
        model.voronoi_standard_data(4)
