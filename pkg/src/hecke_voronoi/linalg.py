"""Exact integer and rational linear algebra.

Matrices are lists of rows.  Integer matrices hold Python ints, rational
matrices hold :class:`fractions.Fraction`.  Nothing here uses floating
point.

The Smith form uses minimal-magnitude pivoting: at every stage the pivot is
the smallest nonzero entry (in absolute value) of the remaining block.  This
keeps entries of the transforming matrices small on the chain complexes that
arise here (a few hundred cells at most).
"""
from fractions import Fraction
from math import gcd


class NotInSpan(ValueError):
    pass


class DependentRays(ValueError):
    pass


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(r, c):
    return [[0] * c for _ in range(r)]


def copy(M):
    return [list(row) for row in M]


def transpose(M):
    return [list(col) for col in zip(*M)]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def matvec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def det(M):
    """Determinant by fraction-free Bareiss elimination (exact for int and Fraction)."""
    n = len(M)
    if n == 0:
        return 1
    A = copy(M)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                v = row_i[j] * akk - aik * row_k[j]
                if isinstance(v, int) and isinstance(prev, int):
                    row_i[j] = v // prev
                else:
                    row_i[j] = v / prev
            row_i[k] = 0
        prev = akk
    return sign * A[n - 1][n - 1]


def _row_echelon(M):
    """Reduced row echelon form over Q; returns (R, pivot_columns)."""
    A = [[Fraction(x) for x in row] for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = None
        for i in range(r, rows):
            if A[i][c] != 0:
                p = i
                break
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def rank(M):
    if not M or not M[0]:
        return 0
    return len(_row_echelon(M)[1])


def inverse(M):
    """Inverse over Q.  Raises ZeroDivisionError for singular input."""
    n = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(M)]
    R, piv = _row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def adjugate(M):
    """Adjugate of a square matrix: adjugate(M) * M = det(M) * I."""
    n = len(M)
    if n == 1:
        return [[1]]
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[M[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof[i][j] = (-1) ** (i + j) * det(minor)
    return [[cof[j][i] for j in range(n)] for i in range(n)]


def int_inverse(M):
    """Inverse of a unimodular integer matrix, as an integer matrix."""
    n = len(M)
    if n <= 3 and all(isinstance(x, int) for row in M for x in row):
        d = det(M)
        if d not in (1, -1):
            raise ValueError("matrix is not unimodular")
        return [[d * x for x in row] for row in adjugate(M)]
    inv = inverse(M)
    out = []
    for row in inv:
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in row])
    return out


def solve(A, b):
    """Unique solution of A x = b for square invertible A (over Q)."""
    n = len(A)
    aug = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(A, b)]
    R, piv = _row_echelon(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n] for row in R]


def kernel(M):
    """Basis of the right kernel of M over Q (list of vectors)."""
    if not M:
        return []
    cols = len(M[0])
    R, piv = _row_echelon(M)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def primitive(v):
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    if all(isinstance(x, int) for x in v):
        g = 0
        for x in v:
            g = gcd(g, x)
        if g == 0:
            raise ValueError("zero vector has no ray")
        return tuple(x // g for x in v)
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no ray")
    return tuple(x // g for x in ints)


def content(v):
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def xgcd(a, b):
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# --- Hermite normal form -------------------------------------------------

def hnf(M):
    """Row-style Hermite normal form.

    Returns (H, U) with H = U*M, U unimodular, pivots positive and the
    entries above each pivot reduced into [0, pivot).  Zero rows come last.
    """
    H = copy(M)
    m = len(H)
    n = len(H[0]) if m else 0
    U = identity(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        # combine rows r..m-1 so that only row r has a nonzero entry in column c
        for i in range(r + 1, m):
            if H[i][c] == 0:
                continue
            a, b = H[r][c], H[i][c]
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            Hr, Hi = H[r], H[i]
            H[r] = [x * p + y * q for p, q in zip(Hr, Hi)]
            H[i] = [-bg * p + ag * q for p, q in zip(Hr, Hi)]
            Ur, Ui = U[r], U[i]
            U[r] = [x * p + y * q for p, q in zip(Ur, Ui)]
            U[i] = [-bg * p + ag * q for p, q in zip(Ur, Ui)]
        if H[r][c] == 0:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            U[r] = [-x for x in U[r]]
        piv = H[r][c]
        for i in range(r):
            q = H[i][c] // piv
            if q:
                H[i] = [p - q * s for p, s in zip(H[i], H[r])]
                U[i] = [p - q * s for p, s in zip(U[i], U[r])]
        r += 1
    return H, U


def is_hnf(H):
    last = -1
    seen_zero = False
    for row in H:
        nz = [j for j, x in enumerate(row) if x != 0]
        if not nz:
            seen_zero = True
            continue
        if seen_zero:
            return False
        c = nz[0]
        if c <= last or row[c] <= 0:
            return False
        last = c
    for i, row in enumerate(H):
        nz = [j for j, x in enumerate(row) if x != 0]
        if not nz:
            continue
        c = nz[0]
        piv = row[c]
        for k in range(i):
            if not 0 <= H[k][c] < piv:
                return False
    return True


def integer_kernel(M):
    """Z-basis of {v in Z^cols : M v = 0}."""
    if not M:
        return []
    cols = len(M[0])
    H, U = hnf(transpose(M))
    return [U[i] for i in range(cols) if not any(H[i])]


# --- Smith normal form ----------------------------------------------------

def snf(M):
    """Smith normal form S = U*M*V with d1 | d2 | ... and U, V unimodular."""
    S = copy(M)
    m = len(S)
    n = len(S[0]) if m else 0
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        S[dst] = [a + q * b for a, b in zip(S[dst], S[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in S:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                row = S[i]
                for j in range(t, n):
                    x = row[j]
                    if x and (best is None or abs(x) < best[0]):
                        best = (abs(x), i, j)
                        if best[0] == 1:
                            break
                if best is not None and best[0] == 1:
                    break
            if best is None:
                break
            _, i, j = best
            swap_rows(t, i)
            swap_cols(t, j)
            piv = S[t][t]
            dirty = False
            for i in range(t + 1, m):
                if S[i][t]:
                    q = S[i][t] // piv
                    add_row(i, t, -q)
                    if S[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if S[t][j]:
                    q = S[t][j] // piv
                    add_col(j, t, -q)
                    if S[t][j]:
                        dirty = True
            if dirty:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if S[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return S, U, V


def invariant_factors(M):
    S, _, _ = snf(M)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0))]


# --- rays -------------------------------------------------------------------

def solve_in_ray_basis(rays, x):
    """Coefficients c with sum c_i * rays[i] == x.

    ``rays`` must be linearly independent (DependentRays otherwise); raises
    NotInSpan when x is not in their span.
    """
    k = len(rays)
    if k == 0:
        if any(x):
            raise NotInSpan("x is not in the span of an empty ray set")
        return ()
    dim = len(x)
    cols = [list(r) for r in rays]
    A = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(x[i])] for i in range(dim)]
    R, piv = _row_echelon(A)
    if k in piv:
        if len([p for p in piv if p < k]) < k:
            raise DependentRays("rays are linearly dependent")
        raise NotInSpan("x is not in the span of the rays")
    if piv != list(range(k)):
        raise DependentRays("rays are linearly dependent")
    return tuple(R[i][k] for i in range(k))


def charpoly(M):
    """Characteristic polynomial det(xI - M), coefficients highest degree first.

    Faddeev-LeVerrier over Q.
    """
    n = len(M)
    A = [[Fraction(x) for x in row] for row in M]
    coeffs = [Fraction(1)]
    Mk = zeros(n, n)
    c = Fraction(1)
    for k in range(1, n + 1):
        # M_k = A*M_{k-1} + c_{k-1} I
        Mk = matmul(A, Mk) if k > 1 else [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            Mk[i][i] += c
        AM = matmul(A, Mk)
        c = -sum(AM[i][i] for i in range(n)) / k
        coeffs.append(c)
    return coeffs
