"""Fans and cones: validation, faces, the codim-2 face graph, symmetry groups.

Cones are rational polyhedral, handled with exact integer/fraction arithmetic.
The polyhedral engine is deliberately naive (facet normals from ray subsets,
feasibility questions passed to the exact simplex) — adequate for the n <= 4
lattice geometry this package works in.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import lp
from .intlin import Mat, integer_kernel_basis, lattice_saturation, primitive, rank, unimodular_inverse
from .symgrp import MatrixGroup


class DimensionError(ValueError):
    pass


class TorusFactor(ValueError):
    """The fan's rays do not span: Aut is infinite, classification refuses."""


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class Ray:
    vector: tuple

    def __post_init__(self):
        v = tuple(int(x) for x in self.vector)
        object.__setattr__(self, "vector", v)

    @property
    def is_primitive(self) -> bool:
        return primitive(self.vector) == self.vector


class Cone:
    """Rational polyhedral cone on explicit generators.

    facet data is computed once: `normals` cut out facets inside the linear
    span, `span_equations` cut out the span itself.  Membership: x is in the
    cone iff every normal is >= 0 on x and every span equation vanishes.
    """

    def __init__(self, rays: Sequence[Sequence[int]], ambient_dim: int,
                 ray_indices: Sequence[int] | None = None):
        self.ambient_dim = ambient_dim
        self.rays = tuple(tuple(int(x) for x in r) for r in rays)
        self.ray_indices = tuple(ray_indices) if ray_indices is not None else None
        self._build()

    def _build(self) -> None:
        n = self.ambient_dim
        span = lattice_saturation(self.rays)
        self.dim = len(span)
        if span:
            ann = integer_kernel_basis(Mat(span))
        else:
            ann = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
        self.span_equations = tuple(tuple(a) for a in ann)
        normals = set()
        d = self.dim
        if d > 0:
            for subset in itertools.combinations(range(len(self.rays)), d - 1):
                rows = [self.rays[i] for i in subset] + list(self.span_equations)
                ker = integer_kernel_basis(Mat(rows) if rows else Mat.zero(1, n))
                if len(ker) != 1:
                    continue
                w = primitive(ker[0])
                if w is None:
                    continue
                vals = [_dot(w, r) for r in self.rays]
                if all(v >= 0 for v in vals):
                    normals.add(w)
                elif all(v <= 0 for v in vals):
                    normals.add(tuple(-x for x in w))
        self.normals = tuple(sorted(normals))

    # -- predicates -------------------------------------------------------------

    def contains(self, x: Sequence[int]) -> bool:
        return (all(_dot(w, x) >= 0 for w in self.normals)
                and all(_dot(e, x) == 0 for e in self.span_equations))

    @property
    def is_strongly_convex(self) -> bool:
        rows = list(self.normals) + list(self.span_equations)
        if not rows:
            return self.ambient_dim == 0
        return rank(Mat(rows)) == self.ambient_dim

    def extreme_rays(self) -> tuple:
        """Primitive extreme rays (deduplicated, sorted)."""
        out = set()
        for r in self.rays:
            p = primitive(r)
            if p is None:
                continue
            tight = [w for w in self.normals if _dot(w, r) == 0]
            rows = list(tight) + list(self.span_equations)
            if not rows:
                dim_face = self.ambient_dim
            else:
                dim_face = self.ambient_dim - rank(Mat(rows))
            if dim_face == 1:
                out.add(p)
        return tuple(sorted(out))

    def face_ray_sets(self) -> list:
        """All faces, each as the sorted tuple of generator indices on it.

        Includes the zero face () and the cone itself.
        """
        base = frozenset(range(len(self.rays)))
        faces = {base}
        frontier = [base]
        while frontier:
            nxt = []
            for f in frontier:
                for w in self.normals:
                    g = frozenset(i for i in f if _dot(w, self.rays[i]) == 0)
                    if g not in faces:
                        faces.add(g)
                        nxt.append(g)
            frontier = nxt
        if self.is_strongly_convex:
            faces.add(frozenset())
        return sorted(tuple(sorted(f)) for f in faces)

    def face_dim(self, idxs: Sequence[int]) -> int:
        return len(lattice_saturation([self.rays[i] for i in idxs]))

    def canonical_key(self) -> tuple:
        return tuple(sorted(self.extreme_rays()))

    def __repr__(self) -> str:
        return "Cone(dim=%d, rays=%s)" % (self.dim, list(self.rays))


@dataclass(frozen=True)
class Fan:
    dim: int
    rays: tuple          # primitive ray vectors
    max_cones: tuple     # tuples of 0-based ray indices

    @staticmethod
    def make(dim: int, rays, max_cones) -> "Fan":
        return Fan(int(dim),
                   tuple(tuple(int(x) for x in r) for r in rays),
                   tuple(tuple(sorted(int(i) for i in c)) for c in max_cones))

    def cone(self, idxs: Sequence[int]) -> Cone:
        return Cone([self.rays[i] for i in idxs], self.dim, ray_indices=idxs)

    def cones(self) -> list:
        return [self.cone(c) for c in self.max_cones]

    def to_json_dict(self) -> dict:
        return {"dim": self.dim,
                "rays": [list(r) for r in self.rays],
                "max_cones": [list(c) for c in self.max_cones]}

    @staticmethod
    def from_json_dict(d: dict) -> "Fan":
        return Fan.make(d["dim"], d["rays"], d["max_cones"])


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def _membership_rows(cone: Cone):
    """(A_ub, b_ub, A_eq, b_eq) rows for x in cone (homogeneous)."""
    A_ub = [[-x for x in w] for w in cone.normals]
    b_ub = [0] * len(A_ub)
    A_eq = [list(e) for e in cone.span_equations]
    b_eq = [0] * len(A_eq)
    return A_ub, b_ub, A_eq, b_eq


def _smallest_face_containing(cone: Cone, vectors) -> tuple:
    """Generator-index set of the smallest face of `cone` containing the vectors."""
    tight = [w for w in cone.normals if all(_dot(w, v) == 0 for v in vectors)]
    return tuple(i for i in range(len(cone.rays))
                 if all(_dot(w, cone.rays[i]) == 0 for w in tight)), tight


def _intersection_is_common_face(c1: Cone, c2: Cone) -> bool:
    common = [r for r in c1.rays if c2.contains(r)] + \
             [r for r in c2.rays if c1.contains(r)]
    f1, tight1 = _smallest_face_containing(c1, common)
    f2, tight2 = _smallest_face_containing(c2, common)
    k1 = tuple(sorted({primitive(c1.rays[i]) for i in f1}))
    k2 = tuple(sorted({primitive(c2.rays[i]) for i in f2}))
    if k1 != k2:
        return False
    # the intersection must not poke outside the common face F = {x : w.x = 0
    # for the tight normals}; since every normal is >= 0 on the cone, a point
    # outside F has positive sum of tight normals
    for cone, tight in ((c1, tight1), (c2, tight2)):
        other = c2 if cone is c1 else c1
        u = [0] * cone.ambient_dim
        for w in tight:
            u = [a + b for a, b in zip(u, w)]
        if all(x == 0 for x in u):
            continue
        A_ub, b_ub, A_eq, b_eq = _membership_rows(cone)
        A2, b2, E2, f2_ = _membership_rows(other)
        A_ub += A2 + [[-x for x in u]]
        b_ub += b2 + [-1]
        A_eq += E2
        b_eq += f2_
        if lp.feasible(A_ub, b_ub, A_eq, b_eq):
            return False
    return True


def validate_fan(candidate: Fan) -> ValidationReport:
    """Check primitivity, strong convexity, and face-compatible intersections."""
    rep = ValidationReport()
    for i, r in enumerate(candidate.rays):
        if primitive(r) != tuple(r):
            rep.errors.append(("NonPrimitiveRay", i))
    if len(set(candidate.rays)) != len(candidate.rays):
        rep.errors.append(("DuplicateRay",))
    if rep.errors:
        return rep
    seen = set()
    cones = []
    for idxs in candidate.max_cones:
        if idxs in seen:
            rep.warnings.append(("DuplicateCone", idxs))
            continue
        seen.add(idxs)
        cones.append(candidate.cone(idxs))
    for c in cones:
        if not c.is_strongly_convex:
            rep.errors.append(("NotStronglyConvex", c.ray_indices))
    if rep.errors:
        return rep
    for c in cones:
        ext = set(c.extreme_rays())
        listed = {primitive(r) for r in c.rays}
        if ext != listed:
            rep.warnings.append(("NonExtremeGenerator", c.ray_indices))
    for a, b in itertools.combinations(range(len(cones)), 2):
        if not _intersection_is_common_face(cones[a], cones[b]):
            rep.errors.append(("BadIntersection", (cones[a].ray_indices, cones[b].ray_indices)))
    return rep


def faces_of_cone(cone: Cone) -> list:
    """All faces of a strongly convex cone, as Cones on generator subsets."""
    out = []
    for f in cone.face_ray_sets():
        out.append(Cone([cone.rays[i] for i in f], cone.ambient_dim,
                        ray_indices=[cone.ray_indices[i] for i in f] if cone.ray_indices else None))
    return out


def has_torus_factor(fan: Fan) -> bool:
    """True iff the rays do not span the ambient lattice (rank < dim)."""
    if not fan.rays:
        return fan.dim > 0
    return len(lattice_saturation(fan.rays)) < fan.dim


@dataclass(frozen=True)
class FaceGraph:
    nodes: tuple   # each a tuple of generator indices (a codim-2 face)
    edges: tuple   # pairs of node positions

    def is_single_cycle(self) -> bool:
        t = len(self.nodes)
        if t < 3 or len(self.edges) != t:
            return False
        deg = [0] * t
        adj = {i: [] for i in range(t)}
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
            adj[a].append(b)
            adj[b].append(a)
        if any(d != 2 for d in deg):
            return False
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == t


def codim2_ray_graph(cone: Cone) -> FaceGraph:
    """Graph on codim-2 faces; adjacency: the union of two faces' rays
    generates a facet.  A full-dimensional strongly convex cone yields a
    single cycle (degenerate for ambient dimension 2, where the only codim-2
    face is the origin)."""
    if cone.dim != cone.ambient_dim:
        raise DimensionError("cone is not full-dimensional")
    if not cone.is_strongly_convex:
        raise DimensionError("cone is not strongly convex")
    n = cone.ambient_dim
    faces = cone.face_ray_sets()
    codim2 = [f for f in faces if cone.face_dim(f) == n - 2]
    facets = {f for f in faces if cone.face_dim(f) == n - 1}
    edges = []
    for a, b in itertools.combinations(range(len(codim2)), 2):
        union = tuple(sorted(set(codim2[a]) | set(codim2[b])))
        if union in facets:
            edges.append((a, b))
    return FaceGraph(tuple(codim2), tuple(edges))


QP_YES = "yes"
QP_NO = "no"
QP_UNKNOWN = "unknown"


def _walls(fan: Fan, cones):
    """Pairs (i, j, shared ray index tuple) of max cones meeting in codim 1."""
    out = []
    for i, j in itertools.combinations(range(len(cones)), 2):
        common = [k for k in cones[i].ray_indices if k in cones[j].ray_indices
                  and cones[j].contains(fan.rays[k])]
        if common and len(lattice_saturation([fan.rays[k] for k in common])) == fan.dim - 1:
            out.append((i, j, tuple(common)))
    return out


def is_complete(fan: Fan) -> bool:
    """Wall criterion: full-dimensional cones whose facets all pair up."""
    cones = fan.cones()
    if not cones or any(c.dim != fan.dim for c in cones):
        return False
    facet_count = {}
    for c in cones:
        for f in c.face_ray_sets():
            if cone_face_dim := c.face_dim(f):
                if cone_face_dim == fan.dim - 1:
                    key = tuple(sorted(c.ray_indices[i] for i in f))
                    facet_count[key] = facet_count.get(key, 0) + 1
    return all(v == 2 for v in facet_count.values())


def is_quasiprojective(fan: Fan) -> str:
    """Exact-LP test for a strictly convex piecewise-linear support function.

    yes: the fan is the face fan of one cone, or the LP attains positive
    strictness slack.  no: zero slack and the fan is complete.  unknown
    otherwise (the criterion is this package's choice; reports flag it).
    """
    if len(fan.max_cones) <= 1:
        return QP_YES
    cones = fan.cones()
    n = fan.dim
    k = len(cones)
    nvars = n * k + 1  # one linear functional per cone, plus slack t
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    # slack bounded: t <= 1
    row = [0] * nvars
    row[-1] = 1
    A_ub.append(row)
    b_ub.append(1)
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            for ridx in cones[j].ray_indices:
                v = fan.rays[ridx]
                if cones[i].contains(v):
                    if i < j:
                        row = [0] * nvars
                        for a in range(n):
                            row[i * n + a] += v[a]
                            row[j * n + a] -= v[a]
                        A_eq.append(row)
                        b_eq.append(0)
                else:
                    # m_i . v >= m_j . v + t
                    row = [0] * nvars
                    for a in range(n):
                        row[i * n + a] -= v[a]
                        row[j * n + a] += v[a]
                    row[-1] = 1
                    A_ub.append(row)
                    b_ub.append(0)
    c = [0] * nvars
    c[-1] = 1
    status, value, _ = lp.maximize(c, A_ub, b_ub, A_eq, b_eq)
    assert status == lp.OPTIMAL
    if value > 0:
        return QP_YES
    return QP_NO if is_complete(fan) else QP_UNKNOWN


# ---------------------------------------------------------------------------
# Fan symmetry group
# ---------------------------------------------------------------------------

def fan_automorphisms(fan: Fan, cap: int = 100000) -> MatrixGroup:
    """All A in GL(n,Z) permuting the rays and mapping max cones to max cones.

    Raises TorusFactor when the rays do not span (the group is infinite).
    """
    if has_torus_factor(fan):
        raise TorusFactor("rays do not span; the symmetry group is infinite")
    rays = list(fan.rays)
    t = len(rays)
    n = fan.dim
    cone_sets = {frozenset(c) for c in fan.max_cones}
    profile = []
    for i in range(t):
        inc = sorted(len(c) for c in fan.max_cones if i in c)
        profile.append(tuple(inc))
    # base of n independent rays for solving A
    base = []
    for i in range(t):
        if len(lattice_saturation([rays[j] for j in base + [i]])) == len(base) + 1:
            base.append(i)
        if len(base) == n:
            break
    V = Mat.from_cols([rays[i] for i in base])
    d = V.det()
    # adjugate of V for exact solving
    Vinv_scaled = []
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = Mat([[V[r, c] for c in range(n) if c != j] for r in range(n) if r != i])
            cof[i][j] = (-1) ** (i + j) * minor.det()
    adj = Mat(cof).transpose()

    found = []
    count = 0
    for perm in itertools.permutations(range(t)):
        count += 1
        if count > cap:
            raise DimensionError("automorphism search exceeded cap")
        if any(profile[i] != profile[perm[i]] for i in range(t)):
            continue
        W = Mat.from_cols([rays[perm[i]] for i in base])
        num = W * adj
        if any(num[i, j] % d != 0 for i in range(n) for j in range(n)):
            continue
        A = Mat([[num[i, j] // d for j in range(n)] for i in range(n)])
        if A.det() not in (1, -1):
            continue
        if any(A.apply(rays[i]) != rays[perm[i]] for i in range(t)):
            continue
        if any(frozenset(perm[i] for i in c) not in cone_sets for c in fan.max_cones):
            continue
        found.append(A)
    found_sorted = sorted(set(found), key=Mat.key)
    gens = [m for m in found_sorted if m != Mat.identity(n)] or [Mat.identity(n)]
    group = MatrixGroup(n, found_sorted, [found_sorted.index(g) for g in gens])
    # closure sanity: the found set is a group
    idx = {m: i for i, m in enumerate(found_sorted)}
    for a in found_sorted:
        for b in found_sorted:
            assert a * b in idx
    return group
