"""Textbook two-phase simplex over exact rationals.

Small and slow, which is fine: every program this package builds has a few
dozen variables.  Bland's rule guarantees termination; all arithmetic is
fractions.Fraction, so feasibility answers are certificates, not estimates.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _pivot(T, basis, row, col):
    piv = T[row][col]
    T[row] = [x / piv for x in T[row]]
    for r in range(len(T)):
        if r != row and T[r][col] != 0:
            f = T[r][col]
            T[r] = [a - f * b for a, b in zip(T[r], T[row])]
    basis[row] = col


def _simplex_core(T, basis, ncols):
    """Maximize; objective is the last row, rhs the last column. Bland's rule."""
    while True:
        obj = T[-1]
        col = next((j for j in range(ncols) if obj[j] > 0), None)
        if col is None:
            return OPTIMAL
        best = None
        for r in range(len(T) - 1):
            if T[r][col] > 0:
                ratio = T[r][-1] / T[r][col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            return UNBOUNDED
        _pivot(T, basis, best[1], col)


def maximize(c: Sequence, A_ub: Sequence = (), b_ub: Sequence = (),
             A_eq: Sequence = (), b_eq: Sequence = ()):
    """Maximize c.x over free x subject to A_ub x <= b_ub and A_eq x = b_eq.

    Returns (status, value, x) with exact Fractions.
    """
    n = len(c)
    c = [Fraction(v) for v in c]
    rows = []
    for a, b in zip(A_ub, b_ub):
        rows.append(([Fraction(v) for v in a], Fraction(b), "<="))
    for a, b in zip(A_eq, b_eq):
        rows.append(([Fraction(v) for v in a], Fraction(b), "="))

    # free variables -> pairs of nonnegative ones
    nv = 2 * n
    nslack = sum(1 for _, _, k in rows if k == "<=")
    nart = len(rows)
    width = nv + nslack + nart + 1

    T = []
    basis = []
    si = 0
    for ri, (a, b, kind) in enumerate(rows):
        row = [Fraction(0)] * width
        for j in range(n):
            row[2 * j] = a[j]
            row[2 * j + 1] = -a[j]
        if kind == "<=":
            row[nv + si] = Fraction(1)
            si += 1
        if b < 0:
            row = [-x for x in row]
            b = -b
        row[nv + nslack + ri] = Fraction(1)
        row[-1] = b
        T.append(row)
        basis.append(nv + nslack + ri)

    # phase 1: maximize -(sum of artificials)
    obj = [Fraction(0)] * width
    for j in range(nv + nslack, nv + nslack + nart):
        obj[j] = Fraction(-1)
    T.append(obj)
    for r in range(len(rows)):
        T[-1] = [a + b for a, b in zip(T[-1], T[r])]
    status = _simplex_core(T, basis, nv + nslack + nart)
    assert status == OPTIMAL
    if T[-1][-1] != 0:
        return INFEASIBLE, None, None
    # drive surviving artificials out of the basis where possible
    for r in range(len(rows)):
        if basis[r] >= nv + nslack:
            col = next((j for j in range(nv + nslack) if T[r][j] != 0), None)
            if col is not None:
                _pivot(T, basis, r, col)
    T.pop()

    # phase 2
    obj = [Fraction(0)] * width
    for j in range(n):
        obj[2 * j] = c[j]
        obj[2 * j + 1] = -c[j]
    T.append(obj)
    for r in range(len(rows)):
        if basis[r] < nv + nslack and T[-1][basis[r]] != 0:
            f = T[-1][basis[r]]
            T[-1] = [a - f * b for a, b in zip(T[-1], T[r])]
    status = _simplex_core(T, basis, nv + nslack)  # artificials barred
    if status == UNBOUNDED:
        return UNBOUNDED, None, None
    x = [Fraction(0)] * nv
    for r, b in enumerate(basis[:len(rows)]):
        if b < nv:
            x[b] = T[r][-1]
    sol = [x[2 * j] - x[2 * j + 1] for j in range(n)]
    value = -T[-1][-1] if False else sum(ci * xi for ci, xi in zip(c, sol))
    return OPTIMAL, value, sol


def feasible(A_ub: Sequence = (), b_ub: Sequence = (), A_eq: Sequence = (), b_eq: Sequence = ()) -> bool:
    nvars = len(A_ub[0]) if len(A_ub) else (len(A_eq[0]) if len(A_eq) else 0)
    status, _, _ = maximize([0] * nvars, A_ub, b_ub, A_eq, b_eq)
    return status == OPTIMAL
