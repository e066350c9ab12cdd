"""Turning Hecke images into cycles made of Voronoi cones.

Three reducers act on chains of cusp cones in degree n - 1:

* ``ash_rudolph_reduce``: the euclidean modular symbol recursion.
* ``algorithm1_reduce``: intersect each cone with the Voronoi fan, refine
  without new rays, and replace every ray by a cusp of the smallest Voronoi
  cone containing it.
* ``algorithm2_reduce``: subdivide until sufficiently fine (checked with the
  oracle only), then assemble cusps along the flags of the barycentric
  subdivision.

Each term of the input is handled on a representative of its Gamma-orbit and
the result is carried to the other members of the orbit.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product

from . import linalg as la
from . import model
from . import oracle
from . import cones
from . import chains as ch


class CuspSelectionFailure(AssertionError):
    pass


class OrientationFailure(AssertionError):
    pass


class EquivarianceViolation(AssertionError):
    pass


class EmptyWitness(AssertionError):
    pass


class IterationCapExceeded(RuntimeError):
    pass


class UnsupportedDimension(NotImplementedError):
    pass


DEFAULT_CAP = 8


@dataclass
class Stats:
    terms: int = 0
    orbits: int = 0
    cones_visited: int = 0
    subdivisions: list = field(default_factory=list)
    det_levels: list = field(default_factory=list)
    certificates: list = field(default_factory=list)

    def to_json(self):
        return {"terms": self.terms, "orbits": self.orbits, "cones_visited": self.cones_visited,
                "subdivision_levels": self.subdivisions, "max_det_per_level": self.det_levels}


def _sign(x):
    return (x > 0) - (x < 0)


def _clean(chain):
    """Drop terms that are degenerate or lie in the boundary of the cone."""
    out = {}
    for key, c in chain.items():
        cus = ch.cusps_of_cone(key)
        if cus is None:
            raise ValueError("expected a chain of cusp cones")
        if len(set(cus)) < len(cus) or model.cusps_rank(cus) < len(cus[0]):
            continue
        out[key] = out.get(key, 0) + c
    return {k: v for k, v in out.items() if v}


# --- Ash-Rudolph --------------------------------------------------------------

def _ar_choice(vs):
    """The vector w = M c with c in M^{-1} Z^n, all |c_i| < 1, chosen by a fixed rule."""
    n = len(vs)
    M = la.transpose([list(v) for v in vs])
    Minv = la.inverse(M)
    S, U, V = la.snf(M)
    Uinv = la.int_inverse(U)
    diag = [S[i][i] for i in range(n)]
    best = None
    for t in product(*[range(d) for d in diag]):
        if not any(t):
            continue
        z = la.matvec(Uinv, list(t))
        c = la.matvec(Minv, z)
        cc = []
        for a in c:
            f = a - (a.numerator // a.denominator)
            if f == 0:
                cc.append(Fraction(0))
            elif f <= Fraction(1, 2):
                cc.append(f)
            else:
                cc.append(f - 1)
        if not any(cc):
            continue
        w = la.matvec(M, cc)
        w = [int(x) for x in w]
        key = (max(abs(a) for a in cc), sum(1 for a in cc if a < 0), sum(a * a for a in w), w)
        if best is None or key < best[0]:
            best = (key, w, cc)
    return best[1], best[2]


def ash_rudolph_reduce(vs, stats=None):
    """Chain of unimodular cusp cones homologous to the modular symbol [vs].

    Uses [v_1..v_n] = sum_i [v_1..w..v_n] (w in slot i) with |c_i| < 1, so the
    determinant of every new symbol is strictly smaller in absolute value.
    """
    if stats is None:
        stats = Stats()
    n = len(vs)
    current = {tuple(model.normalize_cusp(v) for v in vs): 1}
    out = {}
    levels = []
    while current:
        nxt = {}
        maxdet = 0
        for sym, c in current.items():
            d = abs(la.det([list(v) for v in sym]))
            if d == 0:
                continue
            maxdet = max(maxdet, d)
            if d == 1:
                out[sym] = out.get(sym, 0) + c
                continue
            w, cc = _ar_choice(sym)
            w = model.normalize_cusp(w)
            for i in range(n):
                if cc[i] == 0:
                    continue
                new = sym[:i] + (w,) + sym[i + 1:]
                nxt[new] = nxt.get(new, 0) + c
        levels.append(maxdet)
        current = {k: v for k, v in nxt.items() if v}
    for a, b in zip(levels, levels[1:]):
        if b and not b < a:
            raise AssertionError("determinants failed to decrease")
    stats.det_levels.append(levels)
    chain = {}
    for sym, c in out.items():
        key = ch.cusp_cone(sym)
        chain[key] = chain.get(key, 0) + c
    return {k: v for k, v in chain.items() if v}


# --- Algorithm 1 --------------------------------------------------------------

def _lambda_sign(simplex):
    return _sign(la.det([list(l) for l in simplex]))


def _cusps_in_piece(piece, ray):
    """S(ray) read off from the top cone of the piece: cusps with positive coordinate.

    The Voronoi fan is simplicial for n = 2, 3, so the face of the top cone
    spanned by those cusps is the smallest Voronoi cone containing the ray.
    """
    n = len(piece.gamma)
    std = model.voronoi_standard_data(n)
    g = [list(r) for r in piece.gamma]
    c = std.coordinates(model.act(la.int_inverse(g), ray))
    if any(a < 0 for a in c):
        raise CuspSelectionFailure("ray outside the top cone of its piece")
    return tuple(sorted(model.act_cusp(g, std.cusps[i]) for i, a in enumerate(c) if a > 0))


def canonical_fan_refined(cusps):
    """F(x): the canonical fan of the cusp cone refined without new rays, as a Fan in V."""
    return cones.intersect_cone_with_fan(ch.cusp_cone(cusps)).fan()


def algorithm1_term(cusps, stats=None, with_fan=False):
    """Voronoi chain homologous to the pointed cusp cone on ``cusps``."""
    X = ch.cusp_cone(cusps)
    cf = cones.intersect_cone_with_fan(X)
    if stats is not None:
        stats.cones_visited += cf.visited
    chosen = {}
    for p in cf.pieces:
        for lam in p.vertices:
            if lam not in chosen:
                S = _cusps_in_piece(p, cf.rays[lam])
                if not S:
                    raise CuspSelectionFailure("empty cusp set")
                chosen[lam] = min(S)
    out = {}
    for simplex, piece in cf.simplices_with_pieces():
        s = _lambda_sign(simplex)
        if s == 0:
            raise OrientationFailure("degenerate simplex in refinement")
        ys = tuple(chosen[l] for l in simplex)
        if not set(ys) <= set(piece.cusps):
            raise CuspSelectionFailure("chosen cusps leave the Voronoi cone of the piece")
        key = ch.cusp_cone(ys)
        out[key] = out.get(key, 0) + s
    out = {k: v for k, v in out.items() if v}
    if with_fan:
        return out, cf, chosen
    return out


def _group_terms(xi, group):
    """Split the terms of a cusp chain into Gamma-orbits of cusp sets.

    Returns a list of (representative cusps sorted, [(cusps, coeff, gamma, sign)])
    where gamma . rep = set(cusps) and sign is the sign of the permutation
    taking gamma . rep (in order) to the ordered cusps.  The representative
    depends only on the orbit, which makes the reductions equivariant.
    """
    orbits = {}
    for key, c in sorted(xi.items()):
        cus = ch.cusps_of_cone(key)
        n = len(cus[0])
        if len(set(cus)) < len(cus) or len(cus) != n or model.cusps_rank(cus) < n:
            rep, g = tuple(sorted(cus)), la.identity(n)
        else:
            rep, g = model.orbit_canonical(cus, group)
        img = [model.act_cusp(g, v) for v in rep]
        if len(set(img)) < len(img):
            s = 0
        else:
            s = model.perm_sign([img.index(v) for v in cus])
        orbits.setdefault(rep, []).append((cus, c, g, s))
    return list(orbits.items())


def _transport(chain, g):
    return ch.act_chain(g, chain)


def _equivariant(xi, group, term_fn, stats):
    xi = {k: v for k, v in xi.items() if v}
    orbits = _group_terms(xi, group)
    stats.terms += len(xi)
    stats.orbits += len(orbits)
    out = {}
    for rep, members in orbits:
        if len(set(rep)) < len(rep) or model.cusps_rank(rep) < len(rep[0]):
            continue  # boundary term
        base = term_fn(rep)
        for cus, c, g, s in members:
            img = _transport(base, g)
            for key in img:
                cs = ch.cusps_of_cone(key)
                if cs is None:
                    raise EquivarianceViolation("transport left the cusp cones")
            out = ch.chain_add(out, img, c * s)
    return _clean(out)


def algorithm1_reduce(xi, group=None, stats=None):
    """Algorithm 1 on a degree n - 1 chain of cusp cones."""
    if stats is None:
        stats = Stats()
    if group is None:
        n = len(ch.cusps_of_cone(next(iter(xi)))[0]) if xi else 2
        group = model.Gamma0(n, 1)
    cache = {}

    def term(rep):
        if rep not in cache:
            cache[rep] = algorithm1_term(rep, stats)
        return cache[rep]

    return _equivariant(xi, group, term, stats)


algorithm1_equivariant = algorithm1_reduce


# --- homotopy witness ----------------------------------------------------------

def _cone_op(p, chain):
    out = {}
    for key, c in chain.items():
        k = (p,) + key
        out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}


def _face_subdivision(cf, idx, point):
    """The chain of simplices of the refinement lying in the face idx of the simplex."""
    k1 = len(idx)
    cells = set()
    for simplex, _ in cf.simplices_with_pieces():
        on = [l for l in simplex if all(l[j] == 0 for j in range(len(l)) if j not in idx)]
        if len(on) < k1:
            continue
        from itertools import combinations
        for sub in combinations(on, k1):
            M = [[l[j] for j in idx] for l in sub]
            if la.det(M) != 0:
                cells.add(tuple(sorted(sub, key=cf.vertex_order)))
    out = {}
    for sub in cells:
        M = [[l[j] for j in idx] for l in sub]
        s = _sign(la.det(M))
        key = tuple(point[l] for l in sub)
        out[key] = out.get(key, 0) + s
    return {k: v for k, v in out.items() if v}


def _prism(chain, xmap):
    """Prism operator: [x0..xk] -> sum (-1)^i [x0..xi, y_i..y_k]."""
    out = {}
    for key, c in chain.items():
        ys = [xmap[x] for x in key]
        for i in range(len(key)):
            k = tuple(key[:i + 1]) + tuple(ys[i:])
            s = c if i % 2 == 0 else -c
            out[k] = out.get(k, 0) + s
    return {k: v for k, v in out.items() if v}


@dataclass
class Witness:
    xi: dict
    xi_v: dict       # raw output of the construction (may contain boundary terms)
    eta: dict
    mu: dict

    def check(self):
        """Exact identity boundary(eta) = xi - xi_v + mu with mu in the boundary."""
        lhs = ch.boundary(self.eta)
        rhs = ch.chain_add(ch.chain_add(self.xi, self.xi_v, -1), self.mu)
        if lhs != rhs:
            return False
        return all(ch.in_boundary(k) for k in self.mu)


def algorithm1_witness(cusps):
    """Algorithm 1 on one pointed cusp cone together with the homotopy eta."""
    X = ch.cusp_cone(cusps)
    k = len(X) - 1
    xv, cf, chosen = algorithm1_term(cusps, with_fan=True)
    point = {lam: tuple(cf.rays[lam]) for lam in cf.rays}
    ymap = {point[lam]: model.q(chosen[lam]) for lam in cf.rays}
    # subdivided faces and the recursive homotopy H
    H = {}
    from itertools import combinations
    for size in range(1, k + 2):
        for idx in combinations(range(k + 1), size):
            if size == 1:
                H[idx] = {}
                continue
            sub = _face_subdivision(cf, idx, point)
            simplex = {tuple(X[i] for i in idx): 1}
            bd = {}
            for j in range(size):
                face = idx[:j] + idx[j + 1:]
                bd = ch.chain_add(bd, H[face], 1 if j % 2 == 0 else -1)
            inner = ch.chain_add(ch.chain_add(sub, simplex, -1), bd, -1)
            H[idx] = _cone_op(X[idx[0]], inner)
    full = tuple(range(k + 1))
    xi_prime = _face_subdivision(cf, full, point)
    xi_v_raw = {}
    for key, c in xi_prime.items():
        kk = tuple(ymap[x] for x in key)
        xi_v_raw[kk] = xi_v_raw.get(kk, 0) + c
    xi_v_raw = {a: b for a, b in xi_v_raw.items() if b}
    eta = ch.chain_add(ch.chain_scale(H[full], -1), _prism(xi_prime, ymap), -1)
    mu = {}
    for j in range(k + 1):
        face = full[:j] + full[j + 1:]
        mu = ch.chain_add(mu, H[face], 1 if j % 2 == 0 else -1)
    mu = ch.chain_add(mu, _prism(ch.boundary(xi_prime), ymap))
    if _clean(xi_v_raw) != _clean(xv):
        raise AssertionError("witness output differs from algorithm 1")
    return Witness({X: 1}, xi_v_raw, eta, mu)


# --- sufficiently fine decompositions ------------------------------------------------

@dataclass
class SuffFineCertificate:
    fan: object                      # cones.Fan with points in V
    witness_sets: dict               # top cone -> frozenset of cusps
    iterations: list                 # i used at each level
    ok: bool = True
    failure: object = None
    voronoi: bool = False            # the input cone is itself a Voronoi cone

    def to_json(self):
        return {"top_cones": len(self.witness_sets), "iterations": self.iterations, "ok": self.ok}


def witness_set(F, cone):
    pts = [F.points[r] for r in cone]
    beta = tuple(sum(col) / len(pts) for col in zip(*pts))
    S = set(oracle.s_of_ray(beta))
    for r in cone:
        S &= set(oracle.s_of_ray(r))
    return frozenset(S)


def check_sufficiently_fine(F, dims=None):
    """Witness sets for the cones of F of the requested sizes (default: top cones)."""
    tops = F.top_cones() if dims is None else [c for c in F.cones if len(c) in dims]
    sets = {}
    for c in sorted(tops, key=lambda c: sorted(c)):
        S = witness_set(F, c)
        if not S:
            return SuffFineCertificate(F, sets, [], False, c)
        sets[c] = S
    return SuffFineCertificate(F, sets, [], True)


def _ear_clip(poly, lam):
    """Triangulate a convex polygon given as a cyclic list of vertices, no new ones."""
    verts = list(poly)
    tris = []
    guard = 0
    while len(verts) > 3:
        guard += 1
        if guard > 10000:
            raise AssertionError("ear clipping did not finish")
        m = len(verts)
        for i in range(m):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % m]
            M = [list(lam[a]), list(lam[b]), list(lam[c])]
            d = la.det(M)
            if d == 0:
                continue
            inside = False
            for v in verts:
                if v in (a, b, c):
                    continue
                coeff = la.solve(la.transpose(M), list(lam[v]))
                if all(x >= 0 for x in coeff):
                    inside = True
                    break
            if inside:
                continue
            tris.append(frozenset((a, b, c)))
            verts.pop(i)
            break
        else:
            raise AssertionError("no ear found")
    tris.append(frozenset(verts))
    return tris


def make_sufficiently_fine(cusps, cap=DEFAULT_CAP):
    """Sufficiently fine decomposition of the cusp cone, level by level."""
    X = ch.cusp_cone(cusps)
    k = len(X) - 1
    if k > 2:
        raise UnsupportedDimension("extension step implemented for slices of dimension <= 2")
    # a cone spanned by cusps of one Voronoi cone needs no subdivision (i = 0 at every level);
    # the intersection formula cannot certify it since S(q(v)) = {v} for a cusp v
    S_beta = set(oracle.s_of_ray(tuple(sum(col) for col in zip(*X))))
    if {model.normalize_cusp(v) for v in cusps} <= S_beta:
        top = frozenset(X)
        return SuffFineCertificate(cones.fan_of_cone(X), {top: frozenset(cusps)}, [0] * k,
                                   True, None, True)
    pts = {}

    def add_point(lam):
        p = tuple(sum(l * x[i] for l, x in zip(lam, X)) for i in range(len(X[0])))
        r = la.primitive(p)
        pts[r] = p
        return r

    lam_of = {}
    corners = []
    for i in range(k + 1):
        lam = tuple(Fraction(int(i == j)) for j in range(k + 1))
        r = add_point(lam)
        lam_of[r] = lam
        corners.append(r)
    iters = []
    # level 2: edges, halved i times
    edge_points = {}
    edges = [(a, b) for a in range(k + 1) for b in range(a + 1, k + 1)]
    i = 0
    while True:
        F_edges = []
        for a, b in edges:
            seq = []
            for t in range(2 ** i + 1):
                lam = tuple(Fraction(2 ** i - t, 2 ** i) if j == a else
                            Fraction(t, 2 ** i) if j == b else Fraction(0) for j in range(k + 1))
                r = add_point(lam)
                lam_of[r] = lam
                seq.append(r)
            edge_points[(a, b)] = seq
            F_edges += [frozenset((seq[t], seq[t + 1])) for t in range(len(seq) - 1)]
        Fe = cones.Fan(F_edges, pts)
        cert = check_sufficiently_fine(Fe)
        if cert.ok:
            break
        i += 1
        if i > cap:
            raise IterationCapExceeded(f"edge level not fine after {cap} halvings: {sorted(cert.failure)}")
    iters.append(i)
    if k == 1:
        cert.iterations = iters
        return cert
    # level 3: triangle, extension by ear clipping then relative subdivision
    ring = edge_points[(0, 1)][:-1] + edge_points[(1, 2)][:-1] + list(reversed(edge_points[(0, 2)]))[:-1]
    tris = _ear_clip(ring, lam_of)
    A = set()
    for e in F_edges:
        A |= cones.faces_of(e)
    base = cones.Fan(tris, pts)
    j = 0
    F = base
    while True:
        cert = check_sufficiently_fine(F)
        if cert.ok:
            break
        j += 1
        if j > cap:
            raise IterationCapExceeded(f"triangle level not fine after {cap} subdivisions")
        F = cones.relative_barycentric_subdivide(F, A)
    iters.append(j)
    assert {r for r in F.rays if r in A or frozenset([r]) in A} >= {next(iter(a)) for a in A if len(a) == 1}
    cert.iterations = iters
    return cert


def algorithm2_term(cusps, cap=DEFAULT_CAP, stats=None):
    X = ch.cusp_cone(cusps)
    cert = make_sufficiently_fine(cusps, cap)
    if stats is not None:
        stats.subdivisions.append(cert.iterations)
        stats.certificates.append(cert)
    if cert.voronoi:
        return {X: 1}
    F = cert.fan
    out = {}
    S_of = {}

    def S(r):
        if r not in S_of:
            S_of[r] = frozenset(oracle.s_of_ray(r))
        return S_of[r]

    for tau in cert.witness_sets:
        verts = sorted(tau)
        lam = [list(la.solve_in_ray_basis(list(X), list(F.points[r]))) for r in verts]
        st = _sign(la.det(lam))
        if st == 0:
            raise OrientationFailure("degenerate top cone")
        for perm in permutations(range(len(verts))):
            sp = model.perm_sign(perm)
            ys = []
            inter = None
            for t in perm:
                inter = S(verts[t]) if inter is None else inter & S(verts[t])
                if not inter:
                    raise EmptyWitness("empty intersection of cusp sets")
                ys.append(min(inter))
            if not set(ys) <= S(verts[perm[0]]):
                raise CuspSelectionFailure("assembled cusps leave the first Voronoi cone")
            key = ch.cusp_cone(ys)
            out[key] = out.get(key, 0) + st * sp
    return {k: v for k, v in out.items() if v}


def algorithm2_reduce(xi, group=None, stats=None, cap=DEFAULT_CAP):
    if stats is None:
        stats = Stats()
    if group is None:
        n = len(ch.cusps_of_cone(next(iter(xi)))[0]) if xi else 2
        group = model.Gamma0(n, 1)
    cache = {}

    def term(rep):
        if rep not in cache:
            cache[rep] = algorithm2_term(rep, cap, stats)
        return cache[rep]

    return _equivariant(xi, group, term, stats)


def ash_rudolph_chain(xi, group=None, stats=None):
    if stats is None:
        stats = Stats()
    out = {}
    for key, c in xi.items():
        cus = ch.cusps_of_cone(key)
        out = ch.chain_add(out, ash_rudolph_reduce(cus, stats), c)
    stats.terms += len(xi)
    return _clean(out)


def reduce_chain(xi, algorithm, group=None, stats=None, cap=DEFAULT_CAP):
    algorithm = str(algorithm)
    if algorithm == "1":
        return algorithm1_reduce(xi, group, stats)
    if algorithm == "2":
        return algorithm2_reduce(xi, group, stats, cap)
    if algorithm == "ar":
        return ash_rudolph_chain(xi, group, stats)
    raise ValueError(f"unknown algorithm {algorithm}")


def is_voronoi_chain(xi):
    """Every term spans (a face of) a single Voronoi cone."""
    for key in xi:
        cus = ch.cusps_of_cone(key)
        if cus is None:
            return False
        bary = tuple(sum(col) for col in zip(*key))
        if set(oracle.s_of_ray(bary)) != set(cus):
            return False
    return True


# --- Hecke matrices -------------------------------------------------------------

@dataclass
class HeckeResult:
    group: object
    p: int
    degree: int
    algorithm: str
    matrix: list
    charpoly: list
    rank: int
    stats: Stats
    images: list = None

    def to_json(self):
        return {"group": f"SL{self.group.n}", "level": self.group.N, "p": self.p,
                "degree": self.degree, "algorithm": self.algorithm, "rank": self.rank,
                "matrix": [[str(x) for x in row] for row in self.matrix],
                "charpoly": [str(c) for c in self.charpoly], "stats": self.stats.to_json()}


def hecke_matrix(group, p, degree=None, algorithm="2", cap=DEFAULT_CAP, check_cycles=False):
    """Matrix of T_p on H_{degree} of the relative Voronoi complex, over Q.

    Column i holds the coordinates of T_p applied to the i-th basis class.
    """
    from . import hecke
    n = group.n
    if degree is None:
        degree = n - 1
    if degree != n - 1:
        raise UnsupportedDimension("Hecke images are reduced in degree n - 1 only")
    cx = ch.build_voronoi_complex(group)
    pres = ch.homology(cx, degree)
    T = hecke.coset_decomposition(group, p)
    stats = Stats()
    cols = []
    images = []
    for z in pres.basis_cycles():
        img = hecke.hecke_image(T, z)
        red = reduce_chain(img, algorithm, group, stats, cap)
        if check_cycles and not ch.is_relative_cycle(red, cx):
            raise AssertionError("reduced Hecke image is not a relative cycle")
        images.append(red)
        cols.append(pres.express(red))
    r = pres.rank
    M = [[cols[j][i] for j in range(r)] for i in range(r)]
    cp = la.charpoly(M) if r else [Fraction(1)]
    return HeckeResult(group, p, degree, str(algorithm), M, cp, r, stats, images)
