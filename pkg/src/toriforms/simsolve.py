"""Simultaneous GL(n,Z) conjugacy by bounded search over the intertwiner lattice.

Given families {g_i} and {h_i}, the integer solutions of g_i X = X h_i form a
lattice; a unimodular element of it conjugates one family onto the other.  The
search is bounded and deterministic (graded-lexicographic coefficient sweep).
A negative answer is only ever claimed with a machine-checkable certificate;
otherwise the result is explicitly "not found within bound".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .intlin import (Mat, complete_to_unimodular, integer_kernel_basis,
                     is_unimodular, lattice_saturation, unimodular_inverse)

FOUND = "found"
NOT_FOUND = "not_found_within_bound"
DISTINCT = "provably_distinct"


@dataclass(frozen=True)
class IntertwinerLattice:
    """Saturated Z-basis of {X : g_i X = X h_i for all i}."""

    pairs: tuple
    basis: tuple  # of Mat

    @property
    def rank(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class SimilarityResult:
    kind: str
    witness: Mat | None = None
    bound: int | None = None
    certificate: tuple | None = None

    @property
    def found(self) -> bool:
        return self.kind == FOUND


def _vec_constraint(g: Mat, h: Mat) -> Mat:
    """Row-major vectorization of X -> gX - Xh."""
    n = g.nrows
    rows = []
    ht = h.transpose()
    for a in range(n):
        for b in range(n):
            row = [0] * (n * n)
            for c in range(n):
                row[c * n + b] += g[a, c]
            for d in range(n):
                row[a * n + d] -= ht[b, d]
            rows.append(row)
    return Mat(rows)


def intertwiner_basis(pairs: Sequence) -> IntertwinerLattice:
    pairs = tuple((g, h) for g, h in pairs)
    if not pairs:
        raise ValueError("need at least one pair")
    n = pairs[0][0].nrows
    for g, h in pairs:
        if not (g.is_square and h.is_square and g.nrows == n and h.nrows == n):
            raise ValueError("all matrices must be square of equal size")
    stacked = Mat([row for g, h in pairs for row in _vec_constraint(g, h).rows])
    kernel = integer_kernel_basis(stacked)
    basis = []
    for v in kernel:
        basis.append(Mat([[v[a * n + b] for b in range(n)] for a in range(n)]))
    for X in basis:
        for g, h in pairs:
            assert g * X == X * h
    return IntertwinerLattice(pairs, tuple(basis))


def _shell_vectors(rank: int, bound: int):
    """Coefficient vectors ordered by sup-norm shell, lexicographic inside."""
    for b in range(1, bound + 1):
        for combo in itertools.product(range(-b, b + 1), repeat=rank):
            if max(abs(c) for c in combo) == b:
                yield combo


def find_unimodular_combination(lat: IntertwinerLattice, bound: int = 3,
                                budget: int = 2_000_000) -> SimilarityResult:
    """First determinant-+-1 integer combination in the graded-lex sweep."""
    r = lat.rank
    if r == 0:
        return SimilarityResult(NOT_FOUND, bound=0)
    n = lat.basis[0].nrows
    tried = 0
    for combo in _shell_vectors(r, bound):
        tried += 1
        if tried > budget:
            return SimilarityResult(NOT_FOUND, bound=bound)
        X = Mat([[sum(c * B[i, j] for c, B in zip(combo, lat.basis))
                  for j in range(n)] for i in range(n)])
        if X.det() in (1, -1):
            return SimilarityResult(FOUND, witness=X, bound=bound)
    return SimilarityResult(NOT_FOUND, bound=bound)


def _det_identically_zero(lat: IntertwinerLattice) -> bool:
    """Exact test: det on the Q-span of the lattice vanishes identically.

    det(sum x_i X_i) has per-variable degree <= n, so vanishing on the grid
    {0..n}^rank is conclusive.
    """
    r = lat.rank
    n = lat.basis[0].nrows
    for combo in itertools.product(range(n + 1), repeat=r):
        X = Mat([[sum(c * B[i, j] for c, B in zip(combo, lat.basis))
                  for j in range(n)] for i in range(n)])
        if X.det() != 0:
            return False
    return True


def simultaneously_similar(family_g: Sequence[Mat], family_h: Sequence[Mat],
                           bound: int = 3, det_poly_max_rank: int = 6) -> SimilarityResult:
    """Find T with T^-1 g_i T = h_i, certify impossibility, or give up with bound.

    The returned witness satisfies g_i T = T h_i with det(T) = +-1, i.e.
    T^-1 g_i T = h_i for every i (checked here).
    """
    if len(family_g) != len(family_h):
        raise ValueError("families must have equal length")
    for i, (g, h) in enumerate(zip(family_g, family_h)):
        if g.charpoly() != h.charpoly():
            return SimilarityResult(DISTINCT, certificate=("charpoly_mismatch", i))
    lat = intertwiner_basis(list(zip(family_g, family_h)))
    if lat.rank == 0:
        return SimilarityResult(DISTINCT, certificate=("intertwiner_rank_zero",))
    res = find_unimodular_combination(lat, bound=bound)
    if res.found:
        T = res.witness
        Tinv = unimodular_inverse(T)
        for g, h in zip(family_g, family_h):
            assert Tinv * g * T == h
        return res
    if lat.rank <= det_poly_max_rank and _det_identically_zero(lat):
        return SimilarityResult(DISTINCT, certificate=("rational_nonconjugate", "det vanishes on intertwiner span"))
    return res


# ---------------------------------------------------------------------------
# Invariant sublattices and adapted bases
# ---------------------------------------------------------------------------

def eigenlattice(family: Sequence[Mat], signs: Sequence[int]) -> list:
    """Saturated basis of the common eigenspace {v : g_i v = s_i v}."""
    n = family[0].nrows
    rows = []
    for g, s in zip(family, signs):
        m = g - Mat.identity(n).scale(s)
        rows.extend(m.rows)
    return integer_kernel_basis(Mat(rows))


def left_eigenlattice(family: Sequence[Mat], signs: Sequence[int]) -> list:
    """Saturated basis of the common row-eigenspace {y : y g_i = s_i y}."""
    return eigenlattice([g.transpose() for g in family], signs)


@dataclass(frozen=True)
class InvariantSublattice:
    """A primitive family-invariant sublattice with its adapted basis.

    The adapted basis puts the sublattice last, so the conjugated family has
    the block-lower-triangular shape [[quotient, 0], [*, restriction]].
    """

    signs: tuple
    sub_basis: tuple            # columns spanning the sublattice
    adapted: Mat                # unimodular; columns = [quotient lift | sublattice]
    quotient_family: tuple      # action on the first block
    restricted_family: tuple    # action on the sublattice block
    conjugated_family: tuple    # adapted^-1 * g * adapted for each g


def _adapted_blocks(family: Sequence[Mat], sub_basis: Sequence) -> InvariantSublattice | None:
    n = family[0].nrows
    s = len(sub_basis)
    t = n - s
    full = complete_to_unimodular(list(sub_basis))
    lift = [full.col(j) for j in range(s, n)]
    P = Mat.from_cols(lift + list(sub_basis))
    Pinv = unimodular_inverse(P)
    conj = []
    for g in family:
        m = Pinv * g * P
        for i in range(t):
            for j in range(t, n):
                if m[i, j] != 0:
                    return None  # not invariant
        conj.append(m)
    quo = tuple(Mat([[m[i, j] for j in range(t)] for i in range(t)]) for m in conj)
    res = tuple(Mat([[m[i, j] for j in range(t, n)] for i in range(t, n)]) for m in conj)
    return InvariantSublattice((), tuple(tuple(b) for b in sub_basis), P, quo, res, tuple(conj))


def invariant_sublattices(family: Sequence[Mat], corank: int | None = None) -> list:
    """Rank-1 and corank-1 invariant primitive sublattices with adapted actions.

    rank 1: common eigenvectors over all sign patterns (basis vectors of each
    common eigenlattice).  corank n-1 (i.e. sublattice rank n-1): annihilators
    of common row-eigenvectors of the family.  Results are deterministic.
    """
    n = family[0].nrows
    m = len(family)
    out = []
    want_rank1 = corank is None or corank == n - 1
    want_corank1 = corank is None or corank == 1
    for signs in itertools.product((1, -1), repeat=m):
        if want_rank1:
            for v in eigenlattice(family, signs):
                inv = _adapted_blocks(family, [v])
                if inv is not None:
                    out.append(InvariantSublattice(signs, inv.sub_basis, inv.adapted,
                                                   inv.quotient_family, inv.restricted_family,
                                                   inv.conjugated_family))
        if want_corank1 and n > 1:
            for y in left_eigenlattice(family, signs):
                ann = integer_kernel_basis(Mat([list(y)]))
                if len(ann) != n - 1:
                    continue
                inv = _adapted_blocks(family, ann)
                if inv is not None:
                    out.append(InvariantSublattice(signs, inv.sub_basis, inv.adapted,
                                                   inv.quotient_family, inv.restricted_family,
                                                   inv.conjugated_family))
    return out
