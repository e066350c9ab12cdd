"""Hecke operators T_p = Gamma diag(1, ..., 1, p) Gamma for Gamma = Gamma_0(N).

Right cosets: Gamma g Gamma is the disjoint union of Gamma s for s in S.

* p not dividing N: S is the set of upper triangular integer matrices of
  determinant p in row Hermite normal form, (p^n - 1)/(p - 1) of them.
* p dividing N: write Gamma' = Gamma meet g^{-1} Gamma g.  It is the
  stabilizer in Gamma of the line [e_n] mod p, so S = {g D^{-1}} where D runs
  over elements of Gamma whose last column reduces to each line in the
  Gamma-orbit of [e_n] (all lines except [e1]).
"""
from dataclasses import dataclass
from itertools import product

from . import linalg as la
from . import model
from . import chains as ch


class UnsupportedOperator(ValueError):
    pass


def is_prime(p):
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass
class HeckeOperator:
    group: model.Gamma0
    p: int
    g: list
    cosets: list

    def __len__(self):
        return len(self.cosets)


def hnf_matrices(n, p):
    """Upper triangular row HNF matrices of determinant p (p prime)."""
    out = []
    for k in range(n):
        # pivot p in position k, ones elsewhere; entries above the pivot in [0, p)
        free = [i for i in range(k)]
        for vals in product(range(p), repeat=len(free)):
            M = la.identity(n)
            M[k][k] = p
            for i, a in zip(free, vals):
                M[i][k] = a
            out.append(M)
    return out


def _proj_points(n, p):
    pts = []
    for v in product(range(p), repeat=n):
        if not any(v):
            continue
        first = next(x for x in v if x)
        inv = pow(first, -1, p)
        w = tuple((a * inv) % p for a in v)
        if w == v:
            pts.append(v)
    return pts


def _last_column_element(group, line, p):
    """D in Gamma with last column proportional to ``line`` mod p."""
    n, N = group.n, group.N
    l = list(line)
    if all(a % p == 0 for a in l[1:]):
        # the line [e1]; requires p coprime to N
        _, x, y = la.xgcd(p, N)  # x p + y N = 1
        D = la.identity(n)
        D[0][0], D[0][n - 1], D[n - 1][0], D[n - 1][n - 1] = x, -y, N, p
        assert la.det(D) == 1
        return D
    if n == 2:
        inv = pow(l[1], -1, p)
        l = [(a * inv) % p for a in l]
        D = [[1, l[0]], [0, 1]]
        return D
    w = [a % p for a in l[1:]]
    if la.content(w) != 1:
        for k in range(1, 50):
            cand = None
            for i in range(len(w)):
                t = w[:]
                t[i] += k * p
                if la.content(t) == 1:
                    cand = t
                    break
            if cand:
                w = cand
                break
    # D' in SL_{n-1}(Z) with last column w
    Dp = model.complete_lattice_basis([tuple(w)], n - 1)
    # move first column to last, keeping det 1
    m = n - 1
    cols = [[row[j] for row in Dp] for j in range(m)]
    cols = cols[1:] + [cols[0]]
    Dp = la.transpose(cols)
    if la.det(Dp) != 1:
        for row in Dp:
            row[0] = -row[0]
    D = la.identity(n)
    for i in range(m):
        for j in range(m):
            D[i + 1][j + 1] = Dp[i][j]
    D[0][n - 1] = l[0]
    assert la.det(D) == 1 and group.contains(D)
    return D


def coset_decomposition(group, p):
    n, N = group.n, group.N
    if not is_prime(p):
        raise UnsupportedOperator(f"{p} is not prime")
    g = la.identity(n)
    g[n - 1][n - 1] = p
    if N % p:
        cosets = hnf_matrices(n, p)
    else:
        cosets = []
        for line in _proj_points(n, p):
            if all(a % p == 0 for a in line[1:]):
                continue
            D = _last_column_element(group, line, p)
            s = la.matmul(g, la.int_inverse(D))
            cosets.append(s)
    return HeckeOperator(group, p, g, cosets)


def same_coset(group, s, t):
    """Gamma s == Gamma t."""
    M = la.matmul(t, la.inverse(s))
    if any(x.denominator != 1 for row in M for x in row):
        return False
    return group.contains([[int(x) for x in row] for row in M])


def coset_index(T, m):
    for i, s in enumerate(T.cosets):
        if same_coset(T.group, s, m):
            return i
    return None


def hecke_image(T, xi):
    """sum over s in S of s . xi, for a chain of cusp cones."""
    out = {}
    for s in T.cosets:
        for key, c in xi.items():
            k = tuple(model.q(model.act_cusp(s, model.cusp_of_form(f))) for f in key)
            out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}


def hecke_image_cusps(T, cusps):
    """Images of one pointed cusp cone, as a list of cusp tuples."""
    return [tuple(model.act_cusp(s, v) for v in cusps) for s in T.cosets]
