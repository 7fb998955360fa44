"""End-to-end classification of twisted forms of a split toric variety.

classify() enumerates Galois-action classes, runs the symbolic H^1 engine per
class, takes centralizer orbits where the field context makes that mechanical
(C/R via the lattice oracle; contexts with no nontrivial relative Brauer
groups trivially), and assembles the disjoint-union answer into a report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import realforms
from .cohom import (BrauerRel, MQuotient, NormKernel, Sum, Trivial, Unresolved,
                    compute_h1, ExprNamer)
from .fan import Fan, TorusFactor, fan_automorphisms, is_quasiprojective, validate_fan, QP_YES
from .intlin import Mat
from .symgrp import (GroupHom, MatrixGroup, PresentedGroup, centralizer,
                     enumerate_homs_up_to_conjugacy, identify_isomorphism_type)

CTX_SYMBOLIC = "symbolic"
CTX_REAL = "real"
CTX_TRIVIAL = "trivial"
CONTEXTS = (CTX_SYMBOLIC, CTX_REAL, CTX_TRIVIAL)


class HypothesisError(ValueError):
    """Strict mode: the coproduct bijection hypothesis could not be confirmed."""


class InvalidFan(ValueError):
    pass


def evaluate_expression(expr, ctx: str, gd) -> int | None:
    """Order of the expression's group in an evaluable context, else None.

    real: requires the reduced Galois group to have order <= 2;
    Br(k|L) -> 2 (Br(R|C)), everything degenerate -> 1.
    trivial: every torus over such a field has trivial H^1 (Lang), so 1.
    symbolic: only the trivial expression evaluates.
    """
    if ctx == CTX_TRIVIAL:
        return 1
    if isinstance(expr, Trivial):
        return 1
    if ctx == CTX_SYMBOLIC:
        return None
    if ctx != CTX_REAL:
        raise ValueError("unknown context %r" % ctx)
    if gd.size > 2:
        if isinstance(expr, Sum):
            vals = [evaluate_expression(p, ctx, gd) for p in expr.parts]
            if any(v is None for v in vals):
                return None
        return None
    if isinstance(expr, BrauerRel):
        if expr.base == expr.top:
            return 1
        if len(expr.base) == gd.size and len(expr.top) == 1 and gd.size == 2:
            return 2
        return 1 if len(expr.base) < gd.size else None
    if isinstance(expr, Sum):
        total = 1
        for p in expr.parts:
            v = evaluate_expression(p, ctx, gd)
            if v is None:
                return None
            total *= v
        return total
    return None  # M-quotients, norm kernels, unresolved: not evaluable here


def centralizer_orbit_count(phi: GroupHom, h1_result, centralizer_mats: Sequence[Mat],
                            ctx: str) -> int | None:
    """Orbits of the centralizer action on the evaluated H^1 model."""
    if ctx == CTX_TRIVIAL:
        return 1
    if ctx != CTX_REAL:
        return None
    image = [m for m in phi.images if m != Mat.identity(phi.target.n)]
    if not image:
        return 1
    gd = h1_result.gd
    if gd.size > 2:
        return None
    A = image[0]
    count = realforms.real_orbit_count(A, list(centralizer_mats))
    order = evaluate_expression(h1_result.expr, ctx, gd)
    if order is not None:
        assert order == realforms.tate_h1_real(A).order, \
            "symbolic/oracle disagreement on |H^1|"
    return count


@dataclass
class ClassEntry:
    images: tuple
    image_type: str
    kernel_order: int
    centralizer_generators: tuple
    h1_text: str
    h1_expr: object
    cocycles: tuple
    caveats: tuple
    orbit_count: int | None

    def to_json_dict(self) -> dict:
        return {
            "phi_images": [[list(r) for r in m.rows] for m in self.images],
            "image_type": self.image_type,
            "kernel_order": self.kernel_order,
            "centralizer_generators": [[list(r) for r in m.rows]
                                       for m in self.centralizer_generators],
            "h1": self.h1_text,
            "cocycles": [c.to_json_dict() for c in self.cocycles],
            "caveats": list(self.caveats),
            "orbit_count": self.orbit_count,
        }


@dataclass
class ClassificationReport:
    fan: Fan
    aut_order: int
    aut_type: str
    aut_generators: tuple
    context: str
    group_name: str
    group_order: int
    quasiprojective: str
    hypothesis_warning: str | None
    entries: list
    total: int | None

    def to_json_dict(self) -> dict:
        return {
            "fan": self.fan.to_json_dict(),
            "aut": {
                "order": self.aut_order,
                "type": self.aut_type,
                "generators": [[list(r) for r in m.rows] for m in self.aut_generators],
            },
            "context": self.context,
            "galois_group": {"name": self.group_name, "order": self.group_order},
            "hypothesis": {
                "group_order_2": self.group_order == 2,
                "quasiprojective": self.quasiprojective,
                "warning": self.hypothesis_warning,
            },
            "entries": [e.to_json_dict() for e in self.entries],
            "total": self.total,
        }


def classify(fan: Fan, P: PresentedGroup, ctx: str, bound: int = 3,
             closure_cap: int = 10000, strict_hypothesis: bool = False,
             assume_quasiprojective: bool = False) -> ClassificationReport:
    """Enumerate Galois action classes for the fan and assemble form counts."""
    if ctx not in CONTEXTS:
        raise ValueError("context must be one of %s" % (CONTEXTS,))
    rep = validate_fan(fan)
    if not rep.ok:
        raise InvalidFan("fan is invalid: %s" % rep.errors)
    aut = fan_automorphisms(fan, cap=closure_cap)
    qp = QP_YES if assume_quasiprojective else is_quasiprojective(fan)
    warning = None
    if P.order != 2 and qp != QP_YES:
        warning = ("the forms/cohomology bijection is only guaranteed for quadratic "
                   "extensions or quasiprojective fans; quasiprojectivity = %s" % qp)
        if strict_hypothesis:
            raise HypothesisError(warning)
    homs = enumerate_homs_up_to_conjugacy(P, aut)
    entries = []
    total = 0
    total_known = True
    trivial_count = 0
    for phi in homs:
        h1, ker_order = compute_h1(phi, bound=bound)
        img_indices = [aut.index_of(m) for m in phi.images]
        image_sub = aut.subgroup_generated(img_indices)
        cen = centralizer(aut, image_sub)
        cen_gens = _generators_of(aut, cen)
        count = centralizer_orbit_count(phi, h1, cen_gens, ctx)
        img_group = phi.image_group()
        if img_group.order == 1:
            trivial_count += 1
            assert count in (None, 1) or ctx == CTX_SYMBOLIC
            if ctx != CTX_SYMBOLIC:
                count = 1
        entries.append(ClassEntry(
            images=phi.images,
            image_type=identify_isomorphism_type(img_group),
            kernel_order=ker_order,
            centralizer_generators=tuple(cen_gens),
            h1_text=h1.text,
            h1_expr=h1.expr,
            cocycles=tuple(h1.cocycles),
            caveats=tuple(h1.caveats),
            orbit_count=count,
        ))
        if count is None:
            total_known = False
        else:
            total += count
    assert trivial_count == 1
    return ClassificationReport(
        fan=fan,
        aut_order=aut.order,
        aut_type=identify_isomorphism_type(aut),
        aut_generators=tuple(aut.generators()),
        context=ctx,
        group_name=P.name or "custom",
        group_order=P.order,
        quasiprojective=qp,
        hypothesis_warning=warning,
        entries=entries,
        total=total if total_known else None,
    )


def _generators_of(aut: MatrixGroup, subset) -> list:
    from .symgrp import minimal_generating_sequence
    gens = minimal_generating_sequence(aut, subset)
    if not gens:
        return [Mat.identity(aut.n)]
    return [aut.matrix(i) for i in gens]
