"""Rational polyhedral cones and fans.

A fan is stored by its cones, each a frozenset of primitive integer rays,
closed under taking faces.  Every ray also carries an affine point (the
"realization") used when new vertices are averaged: the vertex attached to a
set I of points is (sum of x_i) / #I, and only its ray is primitivized.

Simplicial refinement without new rays uses the pulling triangulation with
respect to the lexicographic order on primitive rays: the smallest vertex is
joined to the triangulations of the facets that miss it.  Because the order
is global, the triangulations of two polytopes agree on a shared face.
"""
from fractions import Fraction
from math import gcd
from itertools import combinations, permutations

from . import linalg as la


class DegenerateCone(ValueError):
    pass


class NotASubfan(ValueError):
    pass


class NotInFan(ValueError):
    pass


class UnsupportedRegion(ValueError):
    pass


def prim(v):
    return la.primitive(v)


# --- single cones ---------------------------------------------------------------

def is_simplicial(gens):
    gens = [list(g) for g in gens]
    return la.rank(gens) == len(gens)


def span_dim(gens):
    return la.rank([list(g) for g in gens]) if gens else 0


def _in_cone(x, gens):
    """Is x a nonnegative combination of gens?  (Caratheodory search, small inputs.)"""
    d = la.rank([list(g) for g in gens]) if gens else 0
    for k in range(1, min(d, len(gens)) + 1):
        for sub in combinations(gens, k):
            try:
                c = la.solve_in_ray_basis(sub, x)
            except (la.NotInSpan, la.DependentRays):
                continue
            if all(a >= 0 for a in c):
                return True
    return False


def spanning_rays(gens):
    """Primitive extreme rays of the cone generated by gens."""
    rays = sorted({prim(g) for g in gens})
    out = []
    for r in rays:
        others = [s for s in rays if s != r]
        if not _in_cone(r, others):
            out.append(r)
    return tuple(out)


def barycenter_ray(gens):
    if not is_simplicial(gens):
        raise DegenerateCone("barycenter of a non-simplicial cone")
    ps = [prim(g) for g in gens]
    return prim([sum(col) for col in zip(*ps)])


# --- fans -------------------------------------------------------------------------

def faces_of(cone):
    cone = tuple(cone)
    out = set()
    for k in range(1, len(cone) + 1):
        for sub in combinations(cone, k):
            out.add(frozenset(sub))
    return out


class Fan:
    def __init__(self, top_cones, points=None):
        self.cones = set()
        for c in top_cones:
            self.cones |= faces_of(c)
        rays = set()
        for c in self.cones:
            rays |= c
        self.points = {}
        for r in rays:
            if points is not None and r in points:
                self.points[r] = tuple(Fraction(a) for a in points[r])
            else:
                self.points[r] = tuple(Fraction(a) for a in r)

    @property
    def rays(self):
        return {next(iter(c)) for c in self.cones if len(c) == 1}

    def top_cones(self):
        # the fan is closed under faces, so a cone is not maximal exactly when
        # it is a facet of a cone with one more ray
        if getattr(self, "_tops", None) is None:
            inner = {c - {v} for c in self.cones if len(c) > 1 for v in c}
            self._tops = self.cones - inner
        return set(self._tops)

    def cones_of_dim(self, d):
        return {c for c in self.cones if len(c) == d}

    def is_simplicial(self):
        return all(is_simplicial(list(c)) for c in self.cones)

    def __eq__(self, other):
        return isinstance(other, Fan) and self.cones == other.cones

    def __repr__(self):
        return f"Fan({len(self.top_cones())} top cones, {len(self.rays)} rays)"


def fan_of_cone(gens):
    ps = [tuple(Fraction(a) for a in g) for g in gens]
    rays = [prim(g) for g in gens]
    return Fan([frozenset(rays)], dict(zip(rays, ps)))


def _with_point(points, p):
    r = prim(p)
    points[r] = tuple(p)
    return r


def stellar_subdivide(gens):
    """Stellar subdivision of a simplicial cone at its barycenter."""
    if not is_simplicial(gens):
        raise DegenerateCone("stellar subdivision needs a simplicial cone")
    if len(gens) == 1:
        return fan_of_cone(gens)
    F = fan_of_cone(gens)
    return _stellar(F, frozenset(F.points), set())


def _barycenter_point(F, s):
    pts = [F.points[r] for r in s]
    return tuple(sum(col) / len(pts) for col in zip(*pts))


def _stellar(F, s, _unused):
    """Stellar subdivision of the fan F at the cone s (a frozenset of rays)."""
    points = dict(F.points)
    b = _with_point(points, _barycenter_point(F, s))
    tops = []
    for c in F.top_cones():
        if s <= c:
            for v in s:
                tops.append((c - {v}) | {b})
        else:
            tops.append(c)
    return Fan(tops, points)


def barycentric_subdivide(F):
    """Barycentric subdivision: cones are flags of faces of the simplicial cones."""
    if not F.is_simplicial():
        raise DegenerateCone("barycentric subdivision needs a simplicial fan")
    points = dict(F.points)
    tops = []
    for c in F.top_cones():
        for order in permutations(sorted(c)):
            verts = []
            for k in range(1, len(order) + 1):
                I = order[:k]
                p = tuple(sum(col) / k for col in zip(*[F.points[r] for r in I]))
                verts.append(_with_point(points, p))
            tops.append(frozenset(verts))
    return Fan(tops, points)


def relative_barycentric_subdivide(F, A=(), times=1):
    """The stellar cascade subdivision that leaves the subfan A untouched.

    Every cone of F that is not in A is starred at its barycenter, in order of
    decreasing dimension.  With A empty this is the barycentric subdivision.
    """
    A = {frozenset(a) for a in A}
    closure = set()
    for a in A:
        closure |= faces_of(a)
    if closure != A:
        raise NotASubfan("A is not closed under faces")
    if not A <= F.cones:
        raise NotASubfan("A is not contained in the fan")
    for _ in range(times):
        targets = sorted((c for c in F.cones if c not in A and len(c) > 1),
                         key=lambda c: (-len(c), sorted(c)))
        # star on the top cones only and rebuild the face lattice once; each
        # target stays a cone of the partial subdivision since it is a face of
        # everything starred before it
        points = dict(F.points)
        tops = set(F.top_cones())
        for s in targets:
            b = _with_point(points, _barycenter_point(F, s))
            hit = [c for c in tops if s <= c]
            tops.difference_update(hit)
            tops.update((c - {v}) | {b} for c in hit for v in s)
        F = Fan(tops, points)
    return F


def open_star(sigma, F):
    """Cones of F containing sigma; their relative interiors make up U_sigma(F)."""
    s = frozenset(prim(v) for v in sigma)
    if s not in F.cones:
        raise NotInFan("cone is not in the fan")
    return {c for c in F.cones if s <= c}


def open_cover(F):
    return {c: open_star(sorted(c), F) for c in F.cones}


# --- triangulations --------------------------------------------------------------

def _affine_coords(points):
    """Coordinates of points in an affine basis of their hull, plus its dimension."""
    p0 = points[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    basis = []
    for d in diffs:
        if la.rank(basis + [d]) > len(basis):
            basis.append(d)
    dim = len(basis)
    coords = []
    for p in points:
        d = [a - b for a, b in zip(p, p0)]
        coords.append(la.solve_in_ray_basis(basis, d) if basis else ())
    return coords, dim


def _facets(idx, coords, dim):
    """Facets (as index tuples) of the polytope with the given vertex coordinates."""
    found = set()
    pts = {i: coords[i] for i in idx}
    for sub in combinations(idx, dim):
        base = pts[sub[0]]
        rows = [[a - b for a, b in zip(pts[j], base)] for j in sub[1:]]
        if rows and la.rank(rows) < dim - 1:
            continue
        normal = la.kernel(rows) if rows else [[Fraction(1)]]
        if len(normal) != 1:
            continue
        nv = normal[0]
        vals = {i: sum(a * (x - y) for a, x, y in zip(nv, pts[i], base)) for i in idx}
        pos = any(v > 0 for v in vals.values())
        neg = any(v < 0 for v in vals.values())
        if pos and neg:
            continue
        found.add(tuple(sorted(i for i in idx if vals[i] == 0)))
    return sorted(found)


def pulling_triangulation(points, order_key, all_vertices=False):
    """Triangulate the convex hull of ``points`` without new vertices.

    Returns a list of simplices as tuples of indices into ``points``.  The
    vertex minimizing ``order_key`` is pulled first, recursively.
    """
    idx = list(range(len(points)))
    if len(points[0]) == 3 and all(sum(p) == 1 for p in points) and _affine_rank(list(points)) == 2:
        # on the slice sum = 1 the first two coordinates are an affine chart
        coords, dim = [tuple(Fraction(a) for a in p[:2]) for p in points], 2
    else:
        coords, dim = _affine_coords([tuple(Fraction(a) for a in p) for p in points])

    def rec(ids, d):
        if len(ids) == d + 1:
            return [tuple(sorted(ids))]
        if d == 2 and dim == 2:
            return _pull_polygon(ids, coords, order_key)
        sub = [coords[i] for i in ids]
        local, dd = _affine_coords(sub)
        lc = dict(zip(ids, local))
        v = min(ids, key=order_key)
        out = []
        for f in _facets(ids, lc, dd):
            if v in f:
                continue
            for s in rec(list(f), dd - 1):
                out.append(tuple(sorted(s + (v,))))
        return out

    # drop points that are not vertices of the hull
    verts = idx if all_vertices else [i for i in idx if not _in_hull(coords, i, idx)]
    return rec(verts, dim)


def _pull_polygon(ids, coords, order_key):
    """Pulling triangulation of a convex polygon: a fan from the first vertex."""
    c = [sum(coords[i][t] for i in ids) / len(ids) for t in range(2)]

    def half(i):
        x, y = coords[i][0] - c[0], coords[i][1] - c[1]
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    def cmp(i, j):
        hi, hj = half(i), half(j)
        if hi != hj:
            return hi - hj
        xi, yi = coords[i][0] - c[0], coords[i][1] - c[1]
        xj, yj = coords[j][0] - c[0], coords[j][1] - c[1]
        cr = xi * yj - yi * xj
        return -1 if cr > 0 else (1 if cr < 0 else 0)

    from functools import cmp_to_key
    cyc = sorted(ids, key=cmp_to_key(cmp))
    v = min(ids, key=order_key)
    t = cyc.index(v)
    cyc = cyc[t:] + cyc[:t]
    return [tuple(sorted((v, cyc[i], cyc[i + 1]))) for i in range(1, len(cyc) - 1)]


def _in_hull(coords, i, idx):
    others = [j for j in idx if j != i]
    if not others:
        return False
    lifted = [tuple(coords[j]) + (Fraction(1),) for j in others]
    return _in_cone(tuple(coords[i]) + (Fraction(1),), lifted)


def _slice_points(rays):
    """Points on the given rays in the affine chart sum(rays) . x = 1."""
    s = [sum(col) for col in zip(*rays)]
    out = []
    for r in rays:
        f = sum(a * b for a, b in zip(r, s))
        if f <= 0:
            raise UnsupportedRegion("cone is not pointed in the chosen chart")
        out.append(tuple(Fraction(a, 1) / f for a in r))
    return out


def simplicial_refine_no_new_rays(F):
    """Refine each non-simplicial cone of F by the lexicographic pulling triangulation."""
    tops = []
    for c in F.top_cones():
        rays = sorted(c)
        if is_simplicial(rays):
            tops.append(c)
            continue
        pts = _slice_points(rays)
        for s in pulling_triangulation(pts, lambda i: rays[i]):
            tops.append(frozenset(rays[i] for i in s))
    G = Fan(tops, F.points)
    assert G.rays == F.rays
    return G


def triangulation_check(F, gens):
    """Exact check that the simplicial fan F triangulates cone(gens).

    Volumes in the affine chart add up, and every codimension one face is shared
    by two top cones lying on opposite sides or lies on the boundary.
    """
    rays = [prim(g) for g in gens]
    k = len(rays)
    tops = [sorted(c) for c in F.top_cones()]

    def lam(r):
        c = la.solve_in_ray_basis(rays, r)
        t = sum(c)
        return [a / t for a in c]

    total = Fraction(0)
    facets = {}
    for c in tops:
        if len(c) != k:
            return False
        M = [lam(r) for r in c]
        d = la.det(M)
        if d == 0:
            return False
        total += abs(d)
        for i in range(k):
            face = frozenset(c[:i] + c[i + 1:])
            # which side: sign of det with the facet first, opposite vertex last
            Mf = [lam(r) for r in c[:i] + c[i + 1:]] + [lam(c[i])]
            facets.setdefault(face, []).append(la.det(Mf) > 0)
    if total != 1:
        return False
    for face, sides in facets.items():
        on_bd = any(all(lam(r)[j] == 0 for r in face) for j in range(k))
        if on_bd:
            if len(sides) != 1:
                return False
        elif len(sides) != 2 or sides[0] == sides[1]:
            return False
    return True


# --- exchange format ------------------------------------------------------------

def dump_fan(F, dim=None):
    """Text format: a header line with the ambient dimension, then one top cone per
    line as semicolon separated, comma separated integer vectors."""
    tops = sorted(tuple(sorted(c)) for c in F.top_cones())
    if dim is None:
        dim = len(next(iter(F.rays))) if F.rays else 0
    lines = [str(dim)]
    for c in tops:
        lines.append(";".join(",".join(str(a) for a in v) for v in c))
    return "\n".join(lines) + "\n"


def load_fan(text):
    lines = [l.strip() for l in text.strip().splitlines() if l.strip()]
    dim = int(lines[0])
    tops = []
    for l in lines[1:]:
        vecs = [tuple(int(a) for a in part.split(",")) for part in l.split(";")]
        for v in vecs:
            if len(v) != dim:
                raise ValueError("vector of the wrong dimension")
        tops.append(frozenset(vecs))
    return Fan(tops)


# --- the canonical fan sigma meet Voronoi -----------------------------------------

class Piece:
    """sigma meet (gamma . sigma0) in slice coordinates lambda (sum 1)."""

    def __init__(self, gamma, cusps, vertices):
        self.gamma = gamma
        self.cusps = cusps        # spanning cusps of the Voronoi top cone
        self.vertices = vertices  # list of lambda vectors


def _piece(X, gamma, k):
    """Vertices of {lambda in Delta_k : coordinates of X lambda in gamma.sigma0 >= 0}."""
    from . import model
    n = len(gamma)
    std = model.voronoi_standard_data(n)
    ginv = la.int_inverse(gamma)
    # A = coordinate rows of the columns of X
    cols = [std.coordinates(model.act(ginv, x)) for x in X]
    m = len(std.cusps)
    cons = [[cols[j][i] for j in range(k + 1)] for i in range(m)]
    cons += [[int(i == j) for j in range(k + 1)] for i in range(k + 1)]
    found = set()
    for tight in combinations(range(len(cons)), k):
        w = _cross([cons[t] for t in tight], k + 1)
        tot = sum(w)
        if tot == 0:
            continue
        if tot < 0:
            w = [-a for a in w]
        g = 0
        for a in w:
            g = gcd(g, a)
        w = tuple(a // g for a in w)
        if w in found:
            continue
        if all(sum(a * b for a, b in zip(row, w)) >= 0 for row in cons):
            found.add(w)
    verts = [tuple(Fraction(a, sum(w)) for a in w) for w in found]
    return sorted(verts), cons


def _numerators(lam):
    """Positive integer multiple of a rational vector."""
    den = 1
    for a in lam:
        den = den * a.denominator // gcd(den, a.denominator)
    return [int(a * den) for a in lam]


def _cross(rows, m):
    """Integer vector spanning the kernel of k = m - 1 rows (zero if they are dependent)."""
    if m == 2:
        (a, b), = rows
        return [b, -a]
    if m == 3:
        (a, b, c), (d, e, f) = rows
        return [b * f - c * e, c * d - a * f, a * e - b * d]
    out = []
    for j in range(m):
        minor = [[r[c] for c in range(m) if c != j] for r in rows]
        d = la.det(minor) if minor else 1
        out.append(d if j % 2 == 0 else -d)
    return out


def _affine_rank(pts):
    if not pts:
        return -1
    if len(pts[0]) <= 3:
        # points of the slice sum(lambda) = 1: affine rank = linear rank - 1
        pts = list(set(pts))
        if len(pts) == 1:
            return 0
        if len(pts[0]) == 2 or len(pts) == 2:
            return 1
        ints = [_numerators(list(p)) for p in pts]
        for a, b, c in combinations(ints, 3):
            if sum(x * y for x, y in zip(_cross([a, b], 3), c)):
                return 2
        return 1
    p0 = pts[0]
    return la.rank([[a - b for a, b in zip(p, p0)] for p in pts[1:]]) if len(pts) > 1 else 0


class CanonicalFan:
    """The fan sigma meet Voronoi for sigma = cone(X), X a tuple of points in V.

    ``pieces`` lists the full dimensional pieces.  ``rays`` maps each vertex
    lambda to its primitive ray in V.  ``simplices`` is the lexicographic
    pulling refinement, as tuples of vertex lambdas.
    """

    def __init__(self, X, pieces, visited):
        self.X = X
        self.pieces = pieces
        self.visited = visited
        self.k = len(X) - 1
        self.rays = {}
        for p in pieces:
            for lam in p.vertices:
                self.rays[lam] = point_ray(X, lam)
        self._simplices = None

    def vertex_order(self, lam):
        return self.rays[lam]

    def simplices_with_pieces(self):
        """Pairs (simplex, piece) of the refinement, simplices as sorted vertex tuples."""
        if self._simplices is None:
            out = []
            for p in self.pieces:
                vs = p.vertices
                key = lambda i: self.rays[vs[i]]
                if len(vs) == self.k + 1:
                    out.append((tuple(sorted(vs, key=lambda v: self.rays[v])), p))
                    continue
                for s in pulling_triangulation(vs, key, all_vertices=True):
                    out.append((tuple(sorted((vs[i] for i in s), key=lambda v: self.rays[v])), p))
            self._simplices = out
        return self._simplices

    @property
    def simplices(self):
        return [s for s, _ in self.simplices_with_pieces()]

    def fan(self):
        tops = [frozenset(self.rays[v] for v in s) for s in self.simplices]
        return Fan(tops)

    def piece_fan(self):
        tops = [frozenset(self.rays[v] for v in p.vertices) for p in self.pieces]
        return Fan(tops)


def point_ray(X, lam):
    lam = _numerators([Fraction(a) for a in lam])
    return prim([sum(l * x[i] for l, x in zip(lam, X)) for i in range(len(X[0]))])


def intersect_cone_with_fan(X, max_cones=100000):
    """Canonical fan of cone(X) with the Voronoi fan, X a tuple of forms in V.

    Breadth first search over Voronoi top cones gamma . sigma0 whose piece has
    dimension at least k - 1, crossing facets that contain a (k-1)-face of the
    piece not lying on the boundary of the simplex.
    """
    from . import model, oracle
    X = tuple(tuple(x) for x in X)
    k = len(X) - 1
    for x in X:
        if model.classify_point(x).kind == "outside":
            raise UnsupportedRegion("generator outside the closed cone")
    if la.rank([list(x) for x in X]) != k + 1:
        raise DegenerateCone("generators are dependent")
    n = model.n_of_dim(len(X[0]))
    std = model.voronoi_standard_data(n)
    bary = tuple(sum(col) for col in zip(*X))
    start = [list(r) for r in oracle.reduce(bary).gamma]
    key0 = frozenset(model.act_cusp(start, v) for v in std.cusps)
    queue = [(start, key0)]
    seen = {key0}
    pieces = []
    piece_keys = set()
    visited = 0
    while queue:
        gamma, key = queue.pop(0)
        visited += 1
        if visited > max_cones:
            raise UnsupportedRegion("canonical fan search did not close")
        verts, cons = _piece(X, gamma, k)
        d = _affine_rank(verts)
        if d < k - 1:
            continue
        if d == k:
            # a cone inside a wall meets the top cones on both sides in the same piece
            vk = frozenset(verts)
            if vk not in piece_keys:
                piece_keys.add(vk)
                pieces.append(Piece(gamma, tuple(sorted(key)), verts))
        m = len(std.cusps)
        iverts = [_numerators(v) for v in verts]
        for i in range(m):
            tight = [v for v, w in zip(verts, iverts) if sum(a * b for a, b in zip(cons[i], w)) == 0]
            if _affine_rank(tight) < k - 1:
                continue
            if any(all(v[j] == 0 for v in tight) for j in range(k + 1)):
                continue
            g2 = la.matmul(gamma, std.neighbors[i])
            key2 = frozenset(model.act_cusp(g2, v) for v in std.cusps)
            if key2 in seen:
                continue
            seen.add(key2)
            queue.append((g2, key2))
    return CanonicalFan(X, pieces, visited)
