"""Exact integer linear algebra: Smith normal form, kernels, lattice quotients.

Everything is computed over arbitrary-precision Python ints; no floats
anywhere.  This module is the substrate for all algebraic tests in the
package, so the normal-form routines are deterministic: the Smith pivoting
rule is "nonzero entry of least absolute value, ties broken row-major",
which makes U and V reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence


class NotUnimodular(ValueError):
    """Raised when an integer inverse of a non-unimodular matrix is requested."""


class OrderExceedsBound(ValueError):
    """Raised when a matrix power does not reach the identity within the bound."""


class MembershipError(ValueError):
    """Raised when a vector does not lie in the given lattice."""


class Mat:
    """Immutable integer matrix (tuple of row tuples)."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Iterable[int]]):
        rs = tuple(tuple(int(x) for x in row) for row in rows)
        if rs and any(len(r) != len(rs[0]) for r in rs):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", rs)

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def identity(n: int) -> "Mat":
        return Mat([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(r: int, c: int) -> "Mat":
        return Mat([[0] * c for _ in range(r)])

    @staticmethod
    def diag(entries: Sequence[int]) -> "Mat":
        n = len(entries)
        return Mat([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def from_cols(cols: Sequence[Sequence[int]]) -> "Mat":
        if not cols:
            return Mat([])
        n = len(cols[0])
        return Mat([[c[i] for c in cols] for i in range(n)])

    # -- basic queries ---------------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple:
        return self.rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self.rows)

    def cols(self) -> list:
        return [self.col(j) for j in range(self.ncols)]

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        return "Mat(%r)" % (list(map(list, self.rows)),)

    def key(self) -> tuple:
        """Row-major entry tuple; the deterministic comparison key used everywhere."""
        return tuple(x for row in self.rows for x in row)

    # -- arithmetic ------------------------------------------------------------

    def __mul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        bt = list(zip(*other.rows)) if other.rows else []
        return Mat([[sum(a * b for a, b in zip(row, col)) for col in bt] for row in self.rows])

    def __add__(self, other: "Mat") -> "Mat":
        return Mat([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        return Mat([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)])

    def __neg__(self) -> "Mat":
        return Mat([[-a for a in r] for r in self.rows])

    def scale(self, k: int) -> "Mat":
        return Mat([[k * a for a in r] for r in self.rows])

    def transpose(self) -> "Mat":
        return Mat(list(zip(*self.rows))) if self.rows else Mat([])

    def apply(self, v: Sequence[int]) -> tuple:
        """Matrix times column vector."""
        if self.ncols != len(v):
            raise ValueError("shape mismatch")
        return tuple(sum(a * x for a, x in zip(row, v)) for row in self.rows)

    def trace(self) -> int:
        return sum(self.rows[i][i] for i in range(self.nrows))

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if not self.is_square:
            raise ValueError("det of non-square matrix")
        n = self.nrows
        if n == 0:
            return 1
        m = [list(r) for r in self.rows]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
                m[i][k] = 0
            prev = m[k][k]
        return sign * m[n - 1][n - 1]

    def pow(self, k: int) -> "Mat":
        if not self.is_square:
            raise ValueError("pow of non-square matrix")
        result = Mat.identity(self.nrows)
        base = self
        while k > 0:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def charpoly(self) -> tuple:
        """Coefficients (c_0 .. c_n) of det(xI - A), low degree first.

        Faddeev-LeVerrier; all divisions are exact for integer matrices.
        """
        if not self.is_square:
            raise ValueError("charpoly of non-square matrix")
        n = self.nrows
        coeffs = [0] * (n + 1)
        coeffs[n] = 1
        m = Mat.zero(n, n)
        c = 1
        for k in range(1, n + 1):
            m = self * m + Mat.identity(n).scale(c)
            t = (self * m).trace()
            assert t % k == 0
            c = -t // k
            coeffs[n - k] = c
        return tuple(coeffs)


@dataclass(frozen=True)
class SmithDecomposition:
    """S = U * A * V with U, V unimodular and S in Smith normal form."""

    S: Mat
    U: Mat
    V: Mat

    def diagonal(self) -> list:
        return [self.S[i, i] for i in range(min(self.S.nrows, self.S.ncols))]


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def snf(A: Mat) -> SmithDecomposition:
    """Smith normal form with transformation matrices.

    Pivot rule: nonzero entry of least absolute value in the working
    submatrix, ties broken row-major.  Diagonal entries are nonnegative and
    each divides the next.
    """
    r, c = A.nrows, A.ncols
    m = [list(row) for row in A.rows]
    u = [list(row) for row in Mat.identity(r).rows]
    v = [list(row) for row in Mat.identity(c).rows]

    def row_op(i, j, q):  # row i -= q * row j
        m[i] = [a - q * b for a, b in zip(m[i], m[j])]
        u[i] = [a - q * b for a, b in zip(u[i], u[j])]

    def col_op(i, j, q):  # col i -= q * col j
        for row in m:
            row[i] -= q * row[j]
        for row in v:
            row[i] -= q * row[j]

    t = 0
    while t < min(r, c):
        # locate pivot
        best = None
        for i in range(t, r):
            for j in range(t, c):
                a = m[i][j]
                if a != 0 and (best is None or abs(a) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        if bi != t:
            _swap_rows(m, t, bi)
            _swap_rows(u, t, bi)
        if bj != t:
            _swap_cols(m, t, bj)
            _swap_cols(v, t, bj)
        if m[t][t] < 0:
            m[t] = [-a for a in m[t]]
            u[t] = [-a for a in u[t]]
        p = m[t][t]
        dirty = False
        for i in range(t + 1, r):
            if m[i][t] != 0:
                q = m[i][t] // p
                row_op(i, t, q)
                if m[i][t] != 0:
                    dirty = True
        for j in range(t + 1, c):
            if m[t][j] != 0:
                q = m[t][j] // p
                col_op(j, t, q)
                if m[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        # pivot must divide the rest of the submatrix
        off = None
        for i in range(t + 1, r):
            for j in range(t + 1, c):
                if m[i][j] % p != 0:
                    off = i
                    break
            if off is not None:
                break
        if off is not None:
            # fold the offending row into row t and restart this pivot
            m[t] = [a + b for a, b in zip(m[t], m[off])]
            u[t] = [a + b for a, b in zip(u[t], u[off])]
            continue
        t += 1

    out = SmithDecomposition(Mat(m), Mat(u), Mat(v))
    assert out.U * A * out.V == out.S
    return out


def rank(A: Mat) -> int:
    return sum(1 for d in snf(A).diagonal() if d != 0)


def is_unimodular(A: Mat) -> bool:
    return A.is_square and A.det() in (1, -1)


def unimodular_inverse(A: Mat) -> Mat:
    """Integer inverse of a determinant-+-1 matrix (by adjugate)."""
    if not A.is_square:
        raise NotUnimodular("matrix is not square")
    d = A.det()
    if d not in (1, -1):
        raise NotUnimodular("determinant is %d" % d)
    n = A.nrows
    if n == 0:
        return A
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = Mat([[A[r, c] for c in range(n) if c != j] for r in range(n) if r != i])
            cof[i][j] = (-1) ** (i + j) * minor.det()
    adj = Mat(cof).transpose()
    inv = adj if d == 1 else -adj
    assert A * inv == Mat.identity(n)
    return inv


def matrix_order(A: Mat, bound: int = 12) -> int:
    """Least k <= bound with A^k = I."""
    if not is_unimodular(A):
        raise NotUnimodular("matrix_order requires a unimodular matrix")
    ident = Mat.identity(A.nrows)
    p = A
    for k in range(1, bound + 1):
        if p == ident:
            return k
        p = p * A
    raise OrderExceedsBound("no order <= %d" % bound)


def integer_kernel_basis(A: Mat) -> list:
    """Saturated basis of {x in Z^c : A x = 0}, as column vectors.

    The basis columns are columns of the SNF right-transform, hence extend
    to a basis of Z^c: every integer kernel element is an integer
    combination.
    """
    dec = snf(A)
    r = sum(1 for d in dec.diagonal() if d != 0)
    basis = [dec.V.col(j) for j in range(r, A.ncols)]
    for b in basis:
        assert all(x == 0 for x in A.apply(b))
    return basis


def solve_integer(A: Mat, b: Sequence[int]):
    """One integer solution of A x = b, or None."""
    dec = snf(A)
    y = dec.U.apply(b)
    d = dec.diagonal()
    x = [0] * A.ncols
    for i in range(A.nrows):
        di = d[i] if i < len(d) else 0
        if di == 0:
            if y[i] != 0:
                return None
        else:
            if y[i] % di != 0:
                return None
            x[i] = y[i] // di
    return dec.V.apply(x)


def lattice_basis(vectors: Sequence[Sequence[int]]) -> list:
    """Basis of the lattice generated by the given vectors (columns)."""
    if not vectors:
        return []
    A = Mat.from_cols(vectors)
    dec = snf(A)
    d = dec.diagonal()
    uinv = unimodular_inverse(dec.U)
    out = []
    for i, di in enumerate(d):
        if di != 0:
            out.append(tuple(di * x for x in uinv.col(i)))
    return out


def lattice_saturation(vectors: Sequence[Sequence[int]]) -> list:
    """Basis of the saturation (Q-span intersected with Z^n)."""
    if not vectors:
        return []
    A = Mat.from_cols(vectors)
    dec = snf(A)
    r = sum(1 for di in dec.diagonal() if di != 0)
    uinv = unimodular_inverse(dec.U)
    return [uinv.col(i) for i in range(r)]


def coords_in_basis(basis: Sequence[Sequence[int]], v: Sequence[int]):
    """Integer coordinates of v in the given (independent) basis, or raise."""
    A = Mat.from_cols(basis)
    x = solve_integer(A, v)
    if x is None:
        raise MembershipError("vector %r is not an integer combination of the basis" % (list(v),))
    return x


def complete_to_unimodular(cols: Sequence[Sequence[int]]) -> Mat:
    """Extend a saturated independent column set to a matrix in GL(n,Z).

    The given columns come first; the completion is deterministic.
    """
    n = len(cols[0]) if cols else 0
    k = len(cols)
    A = Mat.from_cols(cols)
    dec = snf(A)
    if dec.diagonal() != [1] * k:
        raise ValueError("columns are not a saturated independent set")
    uinv = unimodular_inverse(dec.U)
    # U * A * V = [I_k; 0]  =>  A * V = U^-1[:, :k]; complete with U^-1[:, k:]
    extra = [uinv.col(j) for j in range(k, n)]
    out = Mat.from_cols(list(cols) + extra)
    if not is_unimodular(out):
        raise ValueError("completion failed")
    return out


@dataclass(frozen=True)
class QuotientPresentation:
    """(ambient lattice)/(sublattice) with canonical coset representatives.

    Reduction: write v in the ambient basis, map through the Smith basis U,
    and reduce each coordinate to the least nonnegative residue modulo its
    invariant factor (free coordinates are kept as-is).
    """

    ambient_rank: int
    invariant_factors: tuple       # one per ambient basis vector; 0 marks a free factor
    free_rank: int
    ambient_basis: tuple           # columns spanning the ambient lattice
    smith_U: Mat                   # from the SNF of the sub-generator coordinate matrix
    smith_U_inv: Mat

    @property
    def order(self):
        """Group order (None if infinite)."""
        if self.free_rank:
            return None
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    def nontrivial_factors(self) -> list:
        return [d for d in self.invariant_factors if d != 1 and d != 0]

    def reduce(self, v: Sequence[int]) -> tuple:
        """Canonical representative of v + sublattice, as an ambient vector."""
        c = coords_in_basis(self.ambient_basis, v)
        w = list(self.smith_U.apply(c))
        for i, d in enumerate(self.invariant_factors):
            if d != 0:
                w[i] %= d
        back = self.smith_U_inv.apply(w)
        amb = Mat.from_cols(self.ambient_basis)
        return amb.apply(back)

    def residues(self):
        """All residue tuples (in Smith coordinates); only for finite quotients."""
        if self.free_rank:
            raise ValueError("quotient is infinite")
        out = [()]
        for d in self.invariant_factors:
            out = [t + (x,) for t in out for x in range(d)]
        return out

    def vector_of_residue(self, res: Sequence[int]) -> tuple:
        back = self.smith_U_inv.apply(res)
        return Mat.from_cols(self.ambient_basis).apply(back)

    def residue_of_vector(self, v: Sequence[int]) -> tuple:
        c = coords_in_basis(self.ambient_basis, v)
        w = list(self.smith_U.apply(c))
        for i, d in enumerate(self.invariant_factors):
            if d != 0:
                w[i] %= d
            # free coordinates stay exact
        return tuple(w)


def quotient_of_lattices(ambient_basis: Sequence[Sequence[int]],
                         sub_generators: Sequence[Sequence[int]]) -> QuotientPresentation:
    """Present (ambient)/(sub) where sub generators lie in the ambient lattice."""
    r = len(ambient_basis)
    if r == 0:
        return QuotientPresentation(0, (), 0, (), Mat([]), Mat([]))
    coords = [coords_in_basis(ambient_basis, g) for g in sub_generators]
    if coords:
        S = Mat.from_cols(coords)
    else:
        S = Mat.zero(r, 1)
    dec = snf(S)
    d = dec.diagonal()
    factors = []
    for i in range(r):
        di = d[i] if i < len(d) else 0
        factors.append(di)
    free = sum(1 for x in factors if x == 0)
    return QuotientPresentation(
        ambient_rank=r,
        invariant_factors=tuple(factors),
        free_rank=free,
        ambient_basis=tuple(tuple(b) for b in ambient_basis),
        smith_U=dec.U,
        smith_U_inv=unimodular_inverse(dec.U),
    )


def primitive(v: Sequence[int]):
    """Primitive vector on the same ray; None for the zero vector."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        return None
    return tuple(x // g for x in v)
