"""Real-forms oracle: H^1(Gal(C/R), T(C)) from the lattice action alone.

C^x splits as a uniquely divisible group (cohomologically invisible) times
Q/Z, on which conjugation acts by negation.  For a torus whose cocharacter
lattice carries the conjugation matrix A (A^2 = I), cyclic Tate cohomology of
the twisted module then gives

    H^1  ~=  ker(A + I) / (I - A) Z^n,

a finite elementary 2-group computed here by Smith reduction.  This is both a
product feature (counting real forms) and the independent cross-check for the
symbolic engine: no field arithmetic, no shared code path.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .fan import Fan, TorusFactor, fan_automorphisms
from .intlin import Mat, integer_kernel_basis, quotient_of_lattices
from .symgrp import MatrixGroup, centralizer, conjugacy_classes_of_elements


class NotInvolution(ValueError):
    pass


class NonCommuting(ValueError):
    pass


@dataclass(frozen=True)
class TateQuotient:
    matrix: Mat
    kernel_basis: tuple
    image_generators: tuple
    invariant_factors: tuple      # each 1 or 2
    presentation: object

    @property
    def order(self) -> int:
        n = 1
        for d in self.invariant_factors:
            n *= d
        return n

    def representatives(self) -> list:
        """Canonical coset representatives as ambient integer vectors."""
        return [self.presentation.vector_of_residue(r) for r in self.presentation.residues()]

    def residue_of(self, v: Sequence[int]) -> tuple:
        return self.presentation.residue_of_vector(v)


def tate_h1_real(A: Mat) -> TateQuotient:
    """ker(A + I)/(I - A) Z^n with canonical representatives."""
    n = A.nrows
    ident = Mat.identity(n)
    if A * A != ident:
        raise NotInvolution("matrix squared is not the identity")
    kernel = integer_kernel_basis(A + ident)
    image_cols = [c for c in (ident - A).cols() if any(x != 0 for x in c)]
    pres = quotient_of_lattices(kernel, image_cols)
    assert pres.free_rank == 0
    factors = tuple(pres.invariant_factors)
    assert all(d in (1, 2) for d in factors)
    return TateQuotient(A, tuple(kernel), tuple(tuple(c) for c in image_cols), factors, pres)


def real_orbit_count(A: Mat, centralizer_elements: Sequence[Mat]) -> int:
    """Orbits of the matrix action v -> T v on the Tate quotient's coset set."""
    tq = tate_h1_real(A)
    for T in centralizer_elements:
        if T * A != A * T:
            raise NonCommuting("element does not commute with the involution")
    residues = tq.presentation.residues()
    index = {r: i for i, r in enumerate(residues)}
    parent = list(range(len(residues)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, r in enumerate(residues):
        v = tq.presentation.vector_of_residue(r)
        for T in centralizer_elements:
            w = T.apply(v)
            j = index[tq.residue_of(w)]
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    return len({find(i) for i in range(len(residues))})


def real_forms_count(fan: Fan) -> int:
    """Number of C/R-forms of the toric variety of the fan.

    1 (the split form) plus, for each conjugacy class of involutions in the
    fan symmetry group, the orbit count of the centralizer action on the
    Tate quotient.
    """
    aut = fan_automorphisms(fan)
    return real_forms_count_group(aut)


def real_forms_count_group(aut: MatrixGroup) -> int:
    total = 1
    for cls in conjugacy_classes_of_elements(aut):
        rep = cls[0]
        if aut.element_order(rep) != 2:
            continue
        A = aut.matrix(rep)
        cen = centralizer(aut, aut.subgroup_generated([rep]))
        total += real_orbit_count(A, [aut.matrix(i) for i in sorted(cen)])
    return total


def crosscheck_symbolic(A: Mat, h1_result) -> bool:
    """Oracle equivalence: evaluated symbolic order equals the Tate order."""
    from .descent import evaluate_expression, CTX_REAL
    order = evaluate_expression(h1_result.expr, CTX_REAL, h1_result.gd)
    if order is None:
        return False
    return order == tate_h1_real(A).order
