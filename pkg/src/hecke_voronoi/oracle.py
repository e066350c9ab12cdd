"""Which Voronoi cone contains a given point of the closed cone?

For x positive definite we walk through top cones gamma . sigma0, where
sigma0 is the standard top cone.  In the cone gamma . sigma0 the point x has
coordinates c = M0^{-1} (gamma^{-1} x gamma^{-t}).  If some coordinate is
negative we cross the facet opposite to the most negative one.

Termination: the potential of a top cone is the sum of the coordinates of x
in its ray basis.  This is the pairing of x with the perfect form attached to
the cone, which takes the value 1 on each spanning cusp.  Crossing a facet
that x lies beyond strictly lowers this pairing, and it takes values in Z for
integral x, so the walk stops.  Each potential is recorded and checked.

For a form of rank r < n we pass to the saturated lattice spanned by its
image, reduce the r x r block there, and carry the answer back.
"""
from dataclasses import dataclass
from fractions import Fraction

from . import linalg as la
from . import model


class NonConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleAnswer:
    cusps: tuple        # S(x), sorted
    gamma: tuple        # gamma in SL_n(Z), rows
    face: tuple         # indices into the standard cusps; gamma.std[face] = cusps
    coords: tuple       # coordinates of x on gamma.std[i] for i in face, all > 0
    rank: int           # Q-rank of the smallest boundary component containing x
    steps: int = 0
    potentials: tuple = ()

    def certified_cusps(self):
        std = model.standard_cusps(len(self.gamma))
        g = [list(r) for r in self.gamma]
        return tuple(model.act_cusp(g, std[i]) for i in self.face)


_CACHE = {}
MAX_STEPS = 100000


def _lll_basis(X):
    """LLL reduce the positive definite Gram matrix X; returns B with det 1.

    Works on exact rationals (n <= 3).
    """
    n = len(X)
    B = la.identity(n)  # columns are basis vectors

    def gram(i, j):
        bi = [B[r][i] for r in range(n)]
        bj = [B[r][j] for r in range(n)]
        return sum(bi[a] * X[a][b] * bj[b] for a in range(n) for b in range(n))

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bstar = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = Fraction(gram(i, j))
                for k in range(j):
                    s -= mu[j][k] * mu[i][k] * bstar[k]
                mu[i][j] = s / bstar[j]
            s = Fraction(gram(i, i))
            for k in range(i):
                s -= mu[i][k] ** 2 * bstar[k]
            bstar[i] = s
        return mu, bstar

    k = 1
    delta = Fraction(3, 4)
    guard = 0
    while k < n:
        guard += 1
        if guard > 10000:
            break
        mu, bstar = gso()
        for j in range(k - 1, -1, -1):
            r = round(mu[k][j])
            if r:
                for row in B:
                    row[k] -= r * row[j]
                # size reduction changes only row k of mu
                mu[k][j] -= r
                for i in range(j):
                    mu[k][i] -= r * mu[j][i]
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            for row in B:
                row[k], row[k - 1] = row[k - 1], row[k]
            k = max(k - 1, 1)
    if la.det(B) < 0:
        for row in B:
            row[0] = -row[0]
    return B


def _walk(xi, n, start=None):
    """Walk for an integral positive definite vector xi; returns (gamma, coords, potentials)."""
    std = model.voronoi_standard_data(n)
    X = model.vec_to_sym(xi)
    if start is None:
        B = _lll_basis(X)
        g = la.transpose(la.int_inverse(B))  # g = B^{-t}, so g . (B^t X B) = X
    else:
        g = [list(r) for r in start]
    ginv = la.int_inverse(g)
    nb = std.neighbors
    nb_inv = [la.int_inverse(d) for d in nb]
    pots = []
    for _ in range(MAX_STEPS):
        y = model.act(ginv, xi)
        c = std.coordinates(y)
        pot = sum(c)
        if pots and not pot < pots[-1]:
            raise NonConvergence("walk potential failed to decrease")
        pots.append(pot)
        i = min(range(len(c)), key=lambda t: (c[t], t))
        if c[i] >= 0:
            return g, c, pots
        g = la.matmul(g, nb[i])
        ginv = la.matmul(nb_inv[i], ginv)
    raise NonConvergence("walk exceeded step limit")


def _integral(x):
    """(primitive integer vector on the ray of x, positive scale t) with x = t * prim."""
    prim = la.primitive(x)
    for a, b in zip(x, prim):
        if b:
            return prim, Fraction(a) / b
    raise model.OutsideCone("zero form")


def reduce(x):
    """The smallest Voronoi cone containing the form x (a vector of V)."""
    x = tuple(x)
    if not any(x):
        raise model.OutsideCone("zero form")
    prim, t = _integral(x)
    if t <= 0:
        raise model.OutsideCone("form is not positive semidefinite")
    ans = _CACHE.get(prim)
    if ans is None:
        ans = _reduce_primitive(prim)
        _CACHE[prim] = ans
    if t == 1:
        return ans
    return OracleAnswer(ans.cusps, ans.gamma, ans.face, tuple(c * t for c in ans.coords),
                        ans.rank, ans.steps, ans.potentials)


def _reduce_primitive(xi):
    n = model.n_of_dim(len(xi))
    X = model.vec_to_sym(xi)
    if not model.is_psd(X):
        raise model.OutsideCone("form is not positive semidefinite")
    comp = model.BoundaryComponent(n, model.image_lattice(X))
    r = comp.rank
    std = model.standard_cusps(n)
    if r == n:
        g, c, pots = _walk(xi, n)
        face = tuple(i for i, a in enumerate(c) if a > 0)
        coords = tuple(Fraction(c[i]) for i in face)
        cus = tuple(sorted(model.act_cusp(g, std[i]) for i in face))
        return OracleAnswer(cus, tuple(map(tuple, g)), face, coords, r, len(pots) - 1, tuple(pots))
    gam = comp.completion()
    gi = la.int_inverse(gam)
    Y = model.vec_to_sym(model.act(gi, xi))
    if r == 1:
        v = model.act_cusp(gam, [1] + [0] * (n - 1))
        return OracleAnswer((v,), tuple(map(tuple, gam)), (0,), (Fraction(Y[0][0]),), 1)
    # r == 2, n == 3: reduce the top left block with the rank two data
    y2 = model.sym_to_vec([row[:2] for row in Y[:2]])
    sub = reduce(y2)
    G2 = [list(row) for row in sub.gamma]
    GJ = [[G2[0][0], -G2[0][1]], [G2[1][0], -G2[1][1]]]
    emb = [GJ[0] + [0], GJ[1] + [0], [0, 0, -1]]
    G = la.matmul(gam, emb)
    # standard n=2 cusps e1, e2, e1+e2 correspond to n=3 cusps e1, e2, e1-e2
    idx = {0: 0, 1: 1, 2: 3}
    face = tuple(idx[i] for i in sub.face)
    order = sorted(range(len(face)), key=lambda k: face[k])
    face = tuple(face[k] for k in order)
    coords = tuple(sub.coords[k] for k in order)
    cus = tuple(sorted(model.act_cusp(G, std[i]) for i in face))
    return OracleAnswer(cus, tuple(map(tuple, G)), face, coords, 2, sub.steps, sub.potentials)


def s_of_ray(x):
    """S(rho) for the ray through x."""
    return reduce(x).cusps


def clear_cache():
    _CACHE.clear()
