"""Chains of pointed cones, the Voronoi complex modulo Gamma_0(N) and its
relative homology.

A chain is a dict mapping a tuple of points of V (integer vectors, the
generators of a pointed cone in order) to a nonzero integer.  For chains of
cusp cones the points are the forms q(v).

Cells of the Voronoi complex are sets of cusps.  A Gamma-orbit of cells of
type tau is labelled by a point of P^{n-1}(Z/N) modulo Stab(tau); see
``VoronoiComplex``.  Cells whose forms sum to a singular matrix lie in the
boundary of the Satake compactification and are dropped from the relative
complex.
"""
from fractions import Fraction
from itertools import combinations

from . import linalg as la
from . import model


class NotACycle(ValueError):
    pass


class NotVoronoi(ValueError):
    pass


class StabilizerObstruction(ValueError):
    pass


# --- chains -----------------------------------------------------------------

def chain_add(a, b, scale=1):
    out = dict(a)
    for k, v in b.items():
        c = out.get(k, 0) + scale * v
        if c:
            out[k] = c
        else:
            out.pop(k, None)
    return out


def chain_scale(a, s):
    if s == 0:
        return {}
    return {k: s * v for k, v in a.items()}


def chain_sum(chains):
    out = {}
    for c in chains:
        for k, v in c.items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v}


def boundary(xi):
    """Alternating face sum, term by term."""
    out = {}
    for key, c in xi.items():
        if len(key) < 2:
            raise ValueError("boundary of a degree zero chain")
        for i in range(len(key)):
            face = key[:i] + key[i + 1:]
            out[face] = out.get(face, 0) + (c if i % 2 == 0 else -c)
    return {k: v for k, v in out.items() if v}


def support(xi):
    return {k for k, v in xi.items() if v}


def is_degenerate(cone):
    """Pointed cone with dependent generators (this includes repeated ones)."""
    return len(set(cone)) < len(cone) or la.rank([list(p) for p in cone]) < len(cone)


def total_rank(cone):
    """Matrix rank of the sum of the generators, i.e. rank of an interior point."""
    if not cone:
        return 0
    s = [sum(col) for col in zip(*cone)]
    return model.form_rank(s)


def in_boundary(cone):
    """True when the cone lies in the closed cone minus the open cone."""
    n = model.n_of_dim(len(cone[0]))
    return total_rank(cone) < n


def cusp_cone(vs):
    return tuple(model.q(v) for v in vs)


def cusps_of_cone(cone):
    out = []
    for f in cone:
        v = model.cusp_of_form(f)
        if v is None:
            return None
        out.append(v)
    return tuple(out)


def act_chain(g, xi):
    """g acting on a chain of cusp cones (forms are replaced by primitive rays)."""
    out = {}
    for key, c in xi.items():
        k = tuple(model.q(model.act_cusp(g, model.cusp_of_form(f))) for f in key)
        out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}


# --- the Voronoi complex -----------------------------------------------------

class Orbit:
    __slots__ = ("size", "type_index", "label", "rep", "orientable", "stab_trivial", "index")

    def __init__(self, size, type_index, label, rep, orientable, stab_trivial):
        self.size = size
        self.type_index = type_index
        self.label = label
        self.rep = rep
        self.orientable = orientable
        self.stab_trivial = stab_trivial
        self.index = None

    @property
    def degree(self):
        return self.size - 1

    def key(self):
        return (self.size, self.type_index, self.label)


class VoronoiComplex:
    """Gamma_0(N)-orbits of Voronoi cells that meet the open cone.

    degree d contains the orbits of cells with d + 1 spanning cusps.  Only
    orientable orbits carry a basis vector; the others are zero over Q.
    """

    def __init__(self, group):
        self.group = group
        self.n = group.n
        self.types = model.cell_types(self.n)
        self._id_cache = {}
        self.orbits = {}     # key -> Orbit
        self.cells = {}      # degree -> list of orientable Orbit, in order
        self.all_cells = {}  # degree -> list of all Orbit
        self._reps = {}
        self._build()
        self.boundary_matrices = {d: self._boundary_matrix(d) for d in self.cells}

    # orbits
    def _canonical(self, t, label):
        G = self.group
        best = None
        for h, perm in zip(t.stabilizer, t.perms):
            hinv = la.int_inverse(h)
            p = G.act_on_point(hinv, label)
            if best is None or p < best[0]:
                best = (p, h)
        return best

    def _rep(self, label):
        if label not in self._reps:
            self._reps[label] = self.group.coset_rep(label)
        return self._reps[label]

    def _build(self):
        G = self.group
        pts = G.points()
        for m in sorted(self.types):
            for ti, t in enumerate(self.types[m]):
                seen = set()
                for p in pts:
                    c, _ = self._canonical(t, p)
                    if c in seen:
                        continue
                    seen.add(c)
                    R = self._rep(c)
                    rep = tuple(sorted(model.act_cusp(R, v) for v in t.cusps))
                    orientable = True
                    trivial = True
                    for h, perm in zip(t.stabilizer, t.perms):
                        if G.act_on_point(h, c) == c:
                            if model.perm_sign(perm) < 0:
                                orientable = False
                            if any(perm[i] != i for i in range(m)):
                                trivial = False
                    o = Orbit(m, ti, c, rep, orientable, trivial)
                    self.orbits[o.key()] = o
                    self.all_cells.setdefault(m - 1, []).append(o)
        for d, lst in self.all_cells.items():
            good = [o for o in lst if o.orientable]
            for i, o in enumerate(good):
                o.index = i
            self.cells[d] = good

    def identify(self, cusps):
        """(orbit, gamma) with gamma in Gamma mapping the cell onto orbit.rep.

        ``cusps`` is a sequence of normalized cusps spanning a Voronoi cell
        of full rank.  Raises NotVoronoi otherwise.
        """
        key = frozenset(cusps)
        if key in self._id_cache:
            return self._id_cache[key]
        m = len(key)
        res = None
        for ti, t in enumerate(self.types.get(m, [])):
            g = model.sl_match(t.cusps, list(key))
            if g is None:
                continue
            label = self.group.label(g)
            c, h = self._canonical(t, label)
            R = self._rep(c)
            gamma = la.matmul(R, la.int_inverse(la.matmul(g, h)))
            assert self.group.contains(gamma)
            res = (self.orbits[(m, ti, c)], gamma)
            break
        if res is None:
            raise NotVoronoi(f"{sorted(key)} is not a spanning Voronoi cell")
        self._id_cache[key] = res
        return res

    def cell_coordinate(self, cusps):
        """(orbit, sign) for an ordered tuple of cusps; sign 0 if non-orientable."""
        orbit, gamma = self.identify(cusps)
        if not orbit.orientable:
            return orbit, 0
        img = [model.act_cusp(gamma, v) for v in cusps]
        perm = [orbit.rep.index(v) for v in img]
        return orbit, model.perm_sign(perm)

    def _boundary_matrix(self, d):
        """Matrix of the boundary from degree d to d - 1 (rows: degree d-1 cells)."""
        cols = self.cells[d]
        rows = self.cells.get(d - 1, [])
        M = [[0] * len(cols) for _ in rows]
        for j, o in enumerate(cols):
            rep = o.rep
            for i in range(len(rep)):
                face = rep[:i] + rep[i + 1:]
                if model.cusps_rank(face) < self.n:
                    continue
                fo, s = self.cell_coordinate(face)
                if s == 0:
                    continue
                M[fo.index][j] += s if i % 2 == 0 else -s
        return M

    def degrees(self):
        return sorted(self.cells)

    def stabilizers_trivial(self, d):
        return all(o.stab_trivial for o in self.all_cells.get(d, []))

    # chains <-> vectors
    def chain_vector(self, xi, d):
        """Coordinates of a chain of Voronoi cusp cones in the orbit basis of degree d."""
        vec = [0] * len(self.cells.get(d, []))
        for key, c in xi.items():
            if len(key) != d + 1:
                raise ValueError("chain has the wrong degree")
            cus = cusps_of_cone(key)
            if cus is None:
                raise NotVoronoi("chain term is not spanned by cusps")
            if len(set(cus)) < len(cus) or model.cusps_rank(cus) < self.n:
                continue
            o, s = self.cell_coordinate(cus)
            if s:
                vec[o.index] += s * c
        return vec

    def vector_chain(self, vec, d):
        out = {}
        for o, c in zip(self.cells[d], vec):
            if c:
                out[cusp_cone(o.rep)] = c
        return out

    def summary(self):
        return {str(d): {"orbits": len(self.all_cells[d]), "orientable": len(self.cells[d])}
                for d in sorted(self.all_cells)}


_COMPLEXES = {}


def build_voronoi_complex(group):
    key = (group.n, group.N)
    if key not in _COMPLEXES:
        _COMPLEXES[key] = VoronoiComplex(group)
    return _COMPLEXES[key]


# --- homology -----------------------------------------------------------------

class HomologyPresentation:
    """H_d of the relative complex: free rank, torsion and an expression map."""

    def __init__(self, cx, d):
        self.complex = cx
        self.degree = d
        nd = len(cx.cells.get(d, []))
        self.size = nd
        Dd = cx.boundary_matrices.get(d)
        if Dd is not None and Dd and nd:
            K = la.integer_kernel(Dd)
        else:
            K = [[int(i == j) for j in range(nd)] for i in range(nd)]
        self.K = K  # rows: Z-basis of cycles
        r = len(K)
        Dn = cx.boundary_matrices.get(d + 1)
        if Dn and r:
            ncols = len(Dn[0])
            Kt = la.transpose(K) if K else []
            A = []
            for j in range(ncols):
                col = [Dn[i][j] for i in range(nd)]
                a = la.solve_in_ray_basis(K, col)
                A.append([int(x) for x in a])
            A = la.transpose(A)  # r x ncols
        else:
            A = [[] for _ in range(r)]
        if r and A and A[0]:
            S, U, V = la.snf(A)
            diag = [S[i][i] if i < len(S[0]) else 0 for i in range(r)]
        else:
            U = la.identity(r)
            diag = [0] * r
        self.U = U
        self.Uinv = la.int_inverse(U) if r else []
        self.diag = diag
        self.free = [i for i in range(r) if diag[i] == 0]
        self.torsion = [x for x in diag if x > 1]
        self.rank = len(self.free)
        self.valid_integrally = cx.stabilizers_trivial(d) and cx.stabilizers_trivial(d + 1) \
            and all(o.orientable for o in cx.all_cells.get(d, []))

    def basis_vectors(self):
        """Cycle vectors (orbit coordinates) of the free generators."""
        out = []
        r = len(self.K)
        for i in self.free:
            v = [0] * self.size
            for t in range(r):
                c = self.Uinv[t][i]
                if c:
                    for j in range(self.size):
                        v[j] += c * self.K[t][j]
            out.append(v)
        return out

    def basis_cycles(self):
        return [self.complex.vector_chain(v, self.degree) for v in self.basis_vectors()]

    def express_vector(self, z):
        """Coordinates of the class of the cycle vector z in the free basis (rationals)."""
        if not self.K:
            if any(z):
                raise NotACycle("vector is not a cycle")
            return []
        try:
            a = la.solve_in_ray_basis(self.K, z)
        except la.NotInSpan:
            raise NotACycle("vector is not a cycle") from None
        ua = la.matvec(self.U, a)
        return [Fraction(ua[i]) for i in self.free]

    def express(self, xi):
        return self.express_vector(self.complex.chain_vector(xi, self.degree))

    def to_json(self):
        return {"degree": self.degree, "cells": self.size, "rank": self.rank,
                "torsion": self.torsion, "integral_valid": self.valid_integrally}


def homology(cx, d):
    return HomologyPresentation(cx, d)


def lift(pres, coords):
    """Chain of Voronoi cones representing sum coords[i] * basis_i."""
    vecs = pres.basis_vectors()
    z = [0] * pres.size
    for c, v in zip(coords, vecs):
        if c:
            for j in range(pres.size):
                z[j] += c * v[j]
    return pres.complex.vector_chain(z, pres.degree)


def project(pres, xi):
    """Class coordinates of a relative cycle made of Voronoi cusp cones."""
    return pres.express(xi)


# --- relative cycles -----------------------------------------------------------

class RelativeCycleTag:
    def __init__(self, chain, offending):
        self.chain = chain
        self.offending = offending

    @property
    def is_cycle(self):
        return not self.offending

    def __bool__(self):
        return self.is_cycle

    def __repr__(self):
        return "Cycle" if self.is_cycle else f"NotCycle({self.offending})"


def is_relative_cycle(xi, cx):
    """Does the boundary of xi vanish modulo Gamma away from the Satake boundary?"""
    db = boundary(xi)
    orbit_acc = {}
    other = []
    for face, c in db.items():
        if in_boundary(face):
            continue
        cus = cusps_of_cone(face)
        if cus is not None and len(set(cus)) == len(cus):
            try:
                o, s = cx.cell_coordinate(cus)
            except NotVoronoi:
                other.append((face, c))
                continue
            ent = orbit_acc.setdefault(o.key(), [0, []])
            ent[0] += s * c
            ent[1].append(face)
        else:
            other.append((face, c))
    offending = []
    for val, faces in orbit_acc.values():
        if val:
            offending.extend(faces)
    offending.extend(_match_general(other, cx.group))
    return RelativeCycleTag(xi, sorted(offending))


def _match_general(terms, group):
    """Group non-Voronoi faces into Gamma-orbits; return the faces that do not cancel."""
    classes = []  # [representative cusps, total, faces, self_reversing]
    raw = []
    for face, c in terms:
        cus = cusps_of_cone(face)
        if cus is None or len(set(cus)) < len(cus):
            raw.append((face, c))
            continue
        placed = False
        for cl in classes:
            rep = cl[0]
            if len(rep) != len(cus):
                continue
            g = model.sl_match(cus, rep, group=group)
            if g is None:
                continue
            img = [model.act_cusp(g, v) for v in cus]
            s = model.perm_sign([rep.index(v) for v in img])
            cl[1] += s * c
            cl[2].append(face)
            placed = True
            break
        if not placed:
            stab = model.sl_matches(cus, cus, group=group)
            rev = any(model.perm_sign([cus.index(model.act_cusp(h, v)) for v in cus]) < 0
                      for h in stab)
            classes.append([tuple(cus), c, [face], rev])
    out = []
    for rep, tot, faces, rev in classes:
        if tot and not rev:
            out.extend(faces)
    acc = {}
    for face, c in raw:
        k = frozenset(face)
        acc.setdefault(k, []).append((face, c))
    for lst in acc.values():
        tot = 0
        base = lst[0][0]
        for face, c in lst:
            if len(set(face)) < len(face):
                continue
            tot += model.perm_sign([base.index(p) for p in face]) * c
        if tot:
            out.extend(f for f, _ in lst)
    return out
