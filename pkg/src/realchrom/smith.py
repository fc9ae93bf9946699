"""Integer Smith normal form and homology of finitely presented abelian groups.

Matrices are lists of rows of Python ints, so entries never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

Matrix = list[list[int]]


def zeros(m: int, n: int) -> Matrix:
    return [[0] * n for _ in range(m)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: Matrix, B: Matrix, inner: int | None = None) -> Matrix:
    if inner is None:
        inner = len(B)
    ncols = len(B[0]) if B else 0
    out = zeros(len(A), ncols)
    for i, row in enumerate(A):
        oi = out[i]
        for k in range(inner):
            a = row[k]
            if a:
                for j, b in enumerate(B[k]):
                    if b:
                        oi[j] += a * b
    return out


def transpose(A: Matrix, ncols: int | None = None) -> Matrix:
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(r) for r in zip(*A)]


def hstack(*blocks: Matrix) -> Matrix:
    rows = max(len(b) for b in blocks)
    return [sum((b[i] for b in blocks), []) for i in range(rows)]


@dataclass
class SNF:
    """``U @ A @ V == D`` with U, V unimodular and D diagonal, d_i | d_{i+1}."""

    U: Matrix
    D: Matrix
    V: Matrix
    diag: list[int]

    @property
    def rank(self) -> int:
        return len(self.diag)


def smith(A: Matrix, ncols: int | None = None) -> SNF:
    """Smith normal form with transforms.  ``ncols`` is needed when A has no rows."""
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    D = [list(r) for r in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, c):  # row_dst += c * row_src
        D[dst] = [x + c * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for r in D:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    t = 0
    diag: list[int] = []
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = D[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // p
                    add_row(t, i, -q)
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // p
                    add_col(t, j, -q)
                    if D[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remainder into the pivot slot and repeat
                cands = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
                cands += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
                _, i, j = min(cands)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            # divisibility: pivot must divide the whole remaining block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        diag.append(D[t][t])
        t += 1
    return SNF(U, D, V, diag)


def rank(A: Matrix, ncols: int | None = None) -> int:
    return smith(A, ncols).rank


def invariant_factors(A: Matrix, ncols: int | None = None) -> list[int]:
    return smith(A, ncols).diag


def kernel(A: Matrix, ncols: int) -> Matrix:
    """Basis (as columns, n x k) of the integer kernel of A."""
    s = smith(A, ncols)
    r = s.rank
    return [row[r:] for row in s.V]


def solve(A: Matrix, b: list[int], ncols: int) -> list[int] | None:
    """Integer x with A x = b, or None."""
    s = smith(A, ncols)
    Ub = [sum(u * y for u, y in zip(row, b)) for row in s.U]
    y = [0] * ncols
    for i, d in enumerate(s.diag):
        if Ub[i] % d:
            return None
        y[i] = Ub[i] // d
    if any(Ub[len(s.diag):]):
        return None
    return [sum(v * yy for v, yy in zip(row, y)) for row in s.V]


def contained(X: Matrix, Y: Matrix, nrows: int) -> bool:
    """Is the lattice spanned by the columns of X inside the span of Y's columns?"""
    ny = len(Y[0]) if Y else 0
    nx = len(X[0]) if X else 0
    if nx == 0:
        return True
    if ny == 0:
        return all(not any(row) for row in X)
    # one SNF of Y, reused for every column of X
    s = smith(Y, ny)
    for c in range(nx):
        b = [X[i][c] for i in range(nrows)]
        Ub = [sum(u * y for u, y in zip(row, b)) for row in s.U]
        if any(Ub[i] % d for i, d in enumerate(s.diag)) or any(Ub[len(s.diag):]):
            return False
    return True


@dataclass(frozen=True)
class AbelianGroup:
    free_rank: int
    torsion: tuple[int, ...]  # invariant factors > 1

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = [("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")] if self.free_rank else []
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) or "0"


def quotient(K: Matrix, S: Matrix, nrows: int) -> AbelianGroup:
    """span(K) / span(S) where span(S) is a sublattice of span(K) (columns)."""
    k = len(K[0]) if K and K[0] else 0
    ns = len(S[0]) if S and S[0] else 0
    if k == 0:
        return AbelianGroup(0, ())
    if ns == 0:
        return AbelianGroup(k, ())
    # coordinates of S in the basis K
    sk = smith(K, k)
    coords = zeros(k, ns)
    for c in range(ns):
        b = [S[i][c] for i in range(nrows)]
        Ub = [sum(u * y for u, y in zip(row, b)) for row in sk.U]
        y = [0] * k
        for i, d in enumerate(sk.diag):
            if Ub[i] % d:
                raise ValueError("S is not inside span(K)")
            y[i] = Ub[i] // d
        if any(Ub[len(sk.diag):]):
            raise ValueError("S is not inside span(K)")
        x = [sum(v * yy for v, yy in zip(row, y)) for row in sk.V]
        for i in range(k):
            coords[i][c] = x[i]
    d = invariant_factors(coords, ns)
    return AbelianGroup(k - len(d), tuple(x for x in d if x > 1))


def relations(orders: list[int]) -> Matrix:
    """Relation columns of Z^n / diag(orders); order 0 means a free coordinate."""
    n = len(orders)
    cols = [i for i, o in enumerate(orders) if o]
    return [[orders[i] if i == j else 0 for j in cols] for i in range(n)]


def presented_homology(A: Matrix, B: Matrix, orders_mid: list[int], orders_out: list[int],
                       n_in: int) -> AbelianGroup:
    """Homology at M of  Z^{n_in} --A--> M --B--> N.

    ``M = Z^n / diag(orders_mid)`` and ``N`` likewise; a zero order marks a free
    summand.  A is n x n_in, B is p x n.  B must be well defined on M and B A
    must vanish in N.
    """
    n = len(orders_mid)
    p = len(orders_out)
    RN = relations(orders_out)
    RM = relations(orders_mid)
    # cycles: x with B x in span(RN)
    if p:
        BR = hstack(B if B else zeros(p, n), [[-x for x in row] for row in RN]) if RN and RN[0] else (B or zeros(p, n))
        ncol = n + (len(RN[0]) if RN and RN[0] else 0)
        Kfull = kernel(BR, ncol)
        Z = [row for row in Kfull[:n]]
    else:
        Z = identity(n)
    # boundaries plus relations of M
    blocks = []
    if n_in and A:
        blocks.append(A)
    if RM and RM[0]:
        blocks.append(RM)
    S = hstack(*blocks) if blocks else [[] for _ in range(n)]
    # Z may have redundant columns (from the RN part); reduce to a basis
    Zb = column_basis(Z, n)
    return quotient(Zb, S, n)


def column_basis(X: Matrix, nrows: int) -> Matrix:
    """A basis of the lattice spanned by the columns of X (Hermite style via SNF)."""
    ncols = len(X[0]) if X and X[0] else 0
    if ncols == 0 or nrows == 0:
        return [[] for _ in range(nrows)]
    # column space of X = column space of X V restricted to the first rank columns
    s = smith(X, ncols)
    XV = matmul(X, s.V)
    r = s.rank
    return [row[:r] for row in XV]
