"""The cone of positive semidefinite symmetric matrices for n = 2, 3.

A symmetric n x n matrix X is stored as a vector in V with the diagonal
entries first and then the entries above the diagonal:

    n = 2:  (x11, x22, x12)
    n = 3:  (x11, x22, x33, x12, x13, x23)

Cusps are primitive integer vectors v, sign normalized so that the first
nonzero entry is positive, and correspond to the rank one forms q(v) = v v^t.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import gcd

from . import linalg as la


class UnsupportedRank(ValueError):
    pass


class ZeroVector(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


class OutsideCone(ValueError):
    pass


def check_n(n):
    if n not in (2, 3):
        raise UnsupportedRank(f"only n = 2 and n = 3 are supported, got {n}")


_PAIRS = {}


def pairs(n):
    """Index pairs (i, j) in the storage order of V."""
    if n not in _PAIRS:
        _PAIRS[n] = [(i, i) for i in range(n)] + [(i, j) for i in range(n) for j in range(i + 1, n)]
    return _PAIRS[n]


def dim_v(n):
    return n * (n + 1) // 2


def n_of_dim(d):
    return {1: 1, 3: 2, 6: 3}[d]


def sym_to_vec(X):
    return tuple(X[i][j] for i, j in pairs(len(X)))


def vec_to_sym(x):
    n = n_of_dim(len(x))
    X = [[0] * n for _ in range(n)]
    for (i, j), a in zip(pairs(n), x):
        X[i][j] = a
        X[j][i] = a
    return X


def normalize_cusp(v):
    """Primitive integer vector on the line through v, first nonzero entry positive."""
    w = la.primitive(v)
    for a in w:
        if a:
            if a < 0:
                w = tuple(-b for b in w)
            break
    return w


def rank_one_form(v):
    """q(v) = v v^t as a vector of V."""
    if not any(v):
        raise ZeroVector("q(0) is not a cusp")
    n = len(v)
    return tuple(v[i] * v[j] for i, j in pairs(n))


q = rank_one_form


def cusp_of_form(f):
    """Inverse of q on integral rank one forms; returns None otherwise."""
    n = n_of_dim(len(f))
    X = vec_to_sym(f)
    diag = [X[i][i] for i in range(n)]
    v = []
    for d in diag:
        if not isinstance(d, int) and getattr(d, "denominator", 1) != 1:
            return None
        d = int(d)
        if d < 0:
            return None
        r = _isqrt_exact(d)
        if r is None:
            return None
        v.append(r)
    if not any(v):
        return None
    first = next(i for i, a in enumerate(v) if a)
    for j in range(n):
        if j != first and v[j]:
            if X[first][j] < 0:
                v[j] = -v[j]
    v = tuple(v)
    if rank_one_form(v) != tuple(f):
        return None
    return normalize_cusp(v)


def _isqrt_exact(d):
    from math import isqrt
    r = isqrt(d)
    return r if r * r == d else None


def act(g, x):
    """g . x = g X g^t for a form x given as a vector of V."""
    X = vec_to_sym(x)
    Y = la.matmul(la.matmul(g, X), la.transpose(g))
    return sym_to_vec(Y)


def act_cusp(g, v):
    """g . v for g invertible over Q (not checked here; a zero image raises ZeroVector)."""
    return normalize_cusp(la.matvec(g, v))


def form_rank(x):
    return la.rank(vec_to_sym(x))


def is_psd(X):
    """Positive semidefinite test through all principal minors (exact)."""
    n = len(X)
    for k in range(1, n + 1):
        for idx in combinations(range(n), k):
            if la.det([[X[i][j] for j in idx] for i in idx]) < 0:
                return False
    return True


# --- boundary components ---------------------------------------------------

@dataclass(frozen=True)
class BoundaryComponent:
    """The rational boundary component of forms whose image is span(basis).

    ``basis`` is a Z-basis of the saturated lattice L = (ker x)^perp in Z^n.
    ``rank`` is the Q-rank, i.e. the matrix rank of any point in the
    component.  When rank == n the component is the whole cone.
    """
    n: int
    basis: tuple

    @property
    def rank(self):
        return len(self.basis)

    def contains_cusp(self, v):
        M = [list(b) for b in self.basis] + [list(v)]
        return la.rank(M) == self.rank

    def completion(self):
        """gamma in SL_n(Z) whose first r columns are a basis of L."""
        return complete_lattice_basis(self.basis, self.n)


def image_lattice(X):
    """Z-basis of the saturated lattice spanned by the image of X."""
    n = len(X)
    ker = la.kernel(X)
    if not ker:
        return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    rows = [list(la.primitive(k)) for k in ker]
    basis = la.integer_kernel(rows)
    return tuple(tuple(b) for b in basis)


def complete_lattice_basis(basis, n):
    """Unimodular gamma (det 1) whose first len(basis) columns span the saturated lattice."""
    r = len(basis)
    if r == n:
        M = [list(b) for b in basis]
        g = la.transpose(M)
    else:
        Bm = la.transpose([list(b) for b in basis])  # n x r
        S, U, V = la.snf(Bm)
        for i in range(r):
            if S[i][i] != 1:
                raise ValueError("lattice is not saturated")
        g = la.int_inverse(U)
    if la.det(g) < 0:
        g = [row[:] for row in g]
        col = n - 1 if r < n else 0
        for row in g:
            row[col] = -row[col]
    return g


@dataclass(frozen=True)
class PointClass:
    kind: str  # "interior", "boundary" or "outside"
    component: BoundaryComponent = None


def classify_point(x):
    X = vec_to_sym(x)
    n = len(X)
    if not any(x) or not is_psd(X):
        return PointClass("outside")
    comp = BoundaryComponent(n, image_lattice(X))
    if comp.rank == n:
        return PointClass("interior", comp)
    return PointClass("boundary", comp)


def q_rank(x):
    c = classify_point(x)
    if c.kind == "outside":
        raise OutsideCone("point is not in the closed cone minus the origin")
    return c.component.rank


# --- standard Voronoi data -------------------------------------------------

def standard_cusps(n):
    check_n(n)
    if n == 2:
        return ((1, 0), (0, 1), (1, 1))
    e = [tuple(int(i == j) for j in range(3)) for i in range(3)]
    diffs = [normalize_cusp(tuple(a - b for a, b in zip(e[i], e[j])))
             for i in range(3) for j in range(i + 1, 3)]
    return tuple(e) + tuple(diffs)


def cusps_rank(vs):
    if not vs:
        return 0
    return la.rank([list(v) for v in vs])


def sl_matches(src, dst, first_only=False, group=None):
    """All g in SL_n(Z) with g.src = dst as sets of cusps (rays).

    ``src`` and ``dst`` are sequences of primitive vectors.  The map is
    determined by the images of n independent vectors of src, so we try every
    ordered signed choice of images in dst.  With ``group`` set, only
    elements of that group are returned.
    """
    src = [tuple(v) for v in src]
    dst = [normalize_cusp(v) for v in dst]
    if len(src) != len(dst):
        return []
    n = len(src[0])
    dst_set = set(dst)
    if len(dst_set) != len(dst):
        return []
    best = None
    for idx in combinations(range(len(src)), n):
        d = la.det([list(src[i]) for i in idx])
        if d and (best is None or abs(d) < abs(best[1])):
            best = (idx, d)
            if abs(d) == 1:
                break
    if best is None:
        return []
    idx, d = best
    B = la.transpose([list(src[i]) for i in idx])
    Badj = la.adjugate(B)
    rest = [src[i] for i in range(len(src)) if i not in idx]
    out = []
    seen = set()
    for targets in permutations(range(len(dst)), n):
        W0 = [dst[t] for t in targets]
        if abs(la.det([list(w) for w in W0])) != abs(d):
            continue
        for signs in product((1, -1), repeat=n):
            if signs[0] == -1 and n % 2 == 1:
                continue  # -I covers this case for odd n
            W = la.transpose([[s * a for a in w] for s, w in zip(signs, W0)])
            G = la.matmul(W, Badj)
            if any(x % d for row in G for x in row):
                continue
            g = [[x // d for x in row] for row in G]
            dg = la.det(g)
            if dg == -1:
                if n % 2 == 1:
                    g = [[-x for x in row] for row in g]
                else:
                    continue
            elif dg != 1:
                continue
            if any(act_cusp(g, v) not in dst_set for v in rest):
                continue
            if group is not None and not group.contains(g):
                continue
            key = tuple(map(tuple, g))
            if key in seen:
                continue
            seen.add(key)
            out.append(g)
            if first_only:
                return out
    return out


def sl_match(src, dst, group=None):
    m = sl_matches(src, dst, first_only=True, group=group)
    return m[0] if m else None


@dataclass
class VoronoiFanData:
    """Top cone data for the Voronoi fan of a (boundary component of the) cone.

    ``cusps`` are the spanning cusps of the standard top cone in ambient
    coordinates.  ``neighbors[i]`` is delta in SL_n(Z) such that delta.std
    is the top cone across the facet opposite to cusp i.
    """
    n: int
    rank: int
    cusps: tuple
    transport: list = None
    neighbors: list = field(default_factory=list)
    forms: list = field(default_factory=list)
    coord_matrix: list = None  # integer inverse of the matrix of forms

    def coordinates(self, y):
        """Coordinates of y in the ray basis of the standard top cone."""
        return la.matvec(self.coord_matrix, y)


_STD = {}


def voronoi_standard_data(n):
    check_n(n)
    if n in _STD:
        return _STD[n]
    cus = standard_cusps(n)
    forms = [rank_one_form(v) for v in cus]
    M = la.transpose([list(f) for f in forms])
    if la.rank(M) != len(cus):
        raise AssertionError("standard cone is not simplicial")
    inv = la.inverse(M)
    if any(x.denominator != 1 for row in inv for x in row):
        raise AssertionError("standard cone is expected to be unimodular")
    coord = [[int(x) for x in row] for row in inv]
    data = VoronoiFanData(n, n, cus, la.identity(n), [], forms, coord)
    data.neighbors = [_neighbor(data, i) for i in range(len(cus))]
    _STD[n] = data
    return data


def _neighbor(data, i):
    n = data.n
    facet = [v for j, v in enumerate(data.cusps) if j != i]
    rng = range(-2, 3)
    for w in product(rng, repeat=n):
        if not any(w) or normalize_cusp(w) != tuple(w):
            continue
        c = data.coordinates(rank_one_form(w))
        if c[i] >= 0:
            continue
        g = sl_match(data.cusps, facet + [w])
        if g is not None:
            return g
    raise AssertionError(f"no neighbor found across facet {i}")


def pi_face_in_boundary(comp):
    """Voronoi data induced on a boundary component.

    rank 1: the single cusp.  rank 2 inside n = 3: the n = 2 standard data
    transported by a completion of the lattice basis.  rank n: the standard
    data itself.
    """
    n, r = comp.n, comp.rank
    if r == n:
        return voronoi_standard_data(n)
    g = comp.completion()
    if r == 1:
        v = normalize_cusp([row[0] for row in g])
        return VoronoiFanData(n, 1, (v,), g)
    std2 = voronoi_standard_data(2)
    cus = tuple(normalize_cusp(la.matvec(g, list(u) + [0])) for u in std2.cusps)
    return VoronoiFanData(n, 2, cus, g, [], [rank_one_form(v) for v in cus])


# --- congruence subgroups ----------------------------------------------------

def _units(N):
    return [u for u in range(1, N) if gcd(u, N) == 1] or [0]


@dataclass(frozen=True)
class Gamma0:
    """Gamma_0(N) in SL_n(Z): first column congruent to (*, 0, ..., 0) mod N."""
    n: int
    N: int

    def __post_init__(self):
        check_n(self.n)
        if self.N < 1:
            raise ValueError("level must be positive")

    def contains(self, g):
        if la.det(g) != 1:
            return False
        return all(g[i][0] % self.N == 0 for i in range(1, self.n))

    # points of P^{n-1}(Z/N)
    def normalize_point(self, v):
        N = self.N
        if N == 1:
            return (0,) * self.n
        return min(tuple((u * a) % N for a in v) for u in _units(N))

    def label(self, g):
        """Coset label [g^{-1} e1] of the right coset Gamma g."""
        ginv = la.int_inverse(g)
        return self.normalize_point([row[0] for row in ginv])

    def points(self):
        N, n = self.N, self.n
        if N == 1:
            return [(0,) * n]
        pts = set()
        for v in product(range(N), repeat=n):
            g = 0
            for a in v:
                g = gcd(g, a)
            if gcd(g, N) == 1:
                pts.add(self.normalize_point(v))
        return sorted(pts)

    def index(self):
        return len(self.points())

    def lift_point(self, p):
        """Primitive integer vector reducing to the point p mod N."""
        n, N = self.n, self.N
        if N == 1:
            return (1,) + (0,) * (n - 1)
        base = list(p)
        if la.content(base) == 1:
            return tuple(base)
        for k in range(1, 10 * N + 10):
            for i in reversed(range(n)):
                for s in (k, -k):
                    w = base[:]
                    w[i] += s * N
                    if la.content(w) == 1:
                        return tuple(w)
        raise AssertionError("could not lift point")

    def coset_rep(self, p):
        """R in SL_n(Z) with label(R) = p, namely R = D^{-1} with D e1 = lift(p)."""
        v = self.lift_point(p)
        D = complete_lattice_basis([v], self.n)
        return la.int_inverse(D)

    def act_on_point(self, h, p):
        return self.normalize_point(la.matvec(h, list(p)))


# --- cell types and orbits ----------------------------------------------------

@dataclass
class CellType:
    cusps: tuple           # sorted cusps of the face of the standard cone
    stabilizer: list       # all h in SL_n(Z) with h.cusps = cusps
    perms: list            # permutation of cusps induced by each h


_TYPES = {}


def cell_types(n):
    """SL_n(Z)-orbit representatives of spanning faces of the standard cone.

    Returned as a dict: size m -> list of CellType.
    """
    if n in _TYPES:
        return _TYPES[n]
    std = voronoi_standard_data(n)
    faces = []
    for m in range(n, len(std.cusps) + 1):
        for sub in combinations(std.cusps, m):
            if cusps_rank(sub) == n:
                faces.append(tuple(sorted(sub)))
    types = {}
    for f in faces:
        lst = types.setdefault(len(f), [])
        if any(sl_match(t.cusps, f) is not None for t in lst):
            continue
        stab = sl_matches(f, f)
        perms = [tuple(f.index(act_cusp(h, v)) for v in f) for h in stab]
        lst.append(CellType(f, stab, perms))
    _TYPES[n] = types
    return types


def perm_sign(p):
    p = list(p)
    s = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


# --- canonical orbit representatives ------------------------------------------

_REPS = {}


def _cached_coset_rep(group, p):
    key = (group.n, group.N, p)
    if key not in _REPS:
        _REPS[key] = group.coset_rep(p)
    return _REPS[key]


def orbit_canonical(cusps, group):
    """Canonical representative of the Gamma-orbit of a spanning set of n cusps.

    For a column matrix M of signed cusps with det M > 0 write U M = H with H
    in Hermite normal form, so det U = 1.  The Gamma-orbit of M is fixed by H
    and the right coset Gamma U^{-1}; with R the chosen coset representative
    the matrix R H lies in the orbit.  Minimizing over orderings and signs
    gives a representative that depends only on the orbit.

    Returns (rep, g): rep is a sorted tuple of cusps and g in Gamma satisfies
    g . rep = set(cusps).
    """
    n = group.n
    cusps = [tuple(v) for v in cusps]
    if len(cusps) != n or cusps_rank(cusps) < n:
        raise SingularMatrix("orbit representatives need n independent cusps")
    best = None
    for perm in permutations(cusps):
        for signs in product((1, -1), repeat=n):
            M = la.transpose([[s * a for a in v] for s, v in zip(signs, perm)])
            if la.det(M) <= 0:
                continue
            H, U = la.hnf(M)
            label = group.normalize_point([row[0] for row in U])
            R = _cached_coset_rep(group, label)
            RH = la.matmul(R, H)
            rep = tuple(sorted(normalize_cusp(c) for c in zip(*RH)))
            if best is None or rep < best[0]:
                best = (rep, R, U)
    rep, R, U = best
    # gamma0 = R U carries M onto R H, so g = gamma0^{-1}
    g = la.int_inverse(la.matmul(R, U))
    return rep, g
