"""Finite matrix groups in GL(n,Z) and abstract presented groups.

Groups are stored extensionally (explicit element lists): everything this
package meets has order <= 48, so brute force is the simplest correct tool.
Presented groups are realized through a small Todd-Coxeter coset enumeration
over the trivial subgroup, which doubles as the order check demanded by the
presentation invariant.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .intlin import Mat, is_unimodular, matrix_order


class CapExceeded(RuntimeError):
    """A closure or enumeration ran past its configured cap."""


class ClosureExceedsCap(CapExceeded):
    pass


class GroupTooLarge(CapExceeded):
    pass


# ---------------------------------------------------------------------------
# Todd-Coxeter coset enumeration (trivial subgroup -> regular representation)
# ---------------------------------------------------------------------------

class _CosetTable:
    """HLT-style enumeration with coincidence handling.

    Columns 2g / 2g+1 are the forward / inverse edges of generator g.
    """

    def __init__(self, ngens: int, cap: int):
        self.ngens = ngens
        self.cap = cap
        self.table = [[None] * (2 * ngens)]
        self.parent = [0]

    def rep(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def get(self, a: int, col: int):
        b = self.table[a][col]
        return None if b is None else self.rep(b)

    def define(self, a: int, col: int) -> int:
        if len(self.table) >= self.cap:
            raise CapExceeded("coset enumeration exceeded cap %d" % self.cap)
        b = len(self.table)
        self.table.append([None] * (2 * self.ngens))
        self.parent.append(b)
        self.table[a][col] = b
        self.table[b][col ^ 1] = a
        return b

    def _queue_merge(self, a: int, b: int, queue) -> None:
        a, b = self.rep(a), self.rep(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.parent[b] = a
        queue.append(b)

    def coincidence(self, a: int, b: int) -> None:
        queue = deque()
        self._queue_merge(a, b, queue)
        while queue:
            dead = queue.popleft()
            for col in range(2 * self.ngens):
                f = self.table[dead][col]
                if f is None:
                    continue
                self.table[dead][col] = None
                e1, f1 = self.rep(dead), self.rep(f)
                cur = self.table[e1][col]
                if cur is None:
                    self.table[e1][col] = f1
                else:
                    self._queue_merge(cur, f1, queue)
                cur = self.table[f1][col ^ 1]
                if cur is None:
                    self.table[f1][col ^ 1] = e1
                else:
                    self._queue_merge(cur, e1, queue)

    def set_edge(self, a: int, col: int, b: int) -> None:
        a, b = self.rep(a), self.rep(b)
        cur = self.get(a, col)
        if cur is None:
            self.table[a][col] = b
        elif cur != b:
            self.coincidence(cur, b)
            return
        a, b = self.rep(a), self.rep(b)
        cur = self.get(b, col ^ 1)
        if cur is None:
            self.table[b][col ^ 1] = a
        elif cur != a:
            self.coincidence(cur, a)

    def scan_and_fill(self, a: int, word: Sequence[int]) -> None:
        while True:
            a = self.rep(a)
            i, j = 0, len(word) - 1
            f, b = a, a
            while True:
                while i <= j:
                    nxt = self.get(f, word[i])
                    if nxt is None:
                        break
                    f, i = nxt, i + 1
                if i > j:
                    if f != b:
                        self.coincidence(f, b)
                    return
                while j >= i:
                    nxt = self.get(b, word[j] ^ 1)
                    if nxt is None:
                        break
                    b, j = nxt, j - 1
                if j < i:
                    self.coincidence(f, b)
                    break  # rescan from a
                if i == j:
                    self.set_edge(f, word[i], b)
                    return
                self.define(f, word[i])

    def is_live(self, a: int) -> bool:
        return self.rep(a) == a

    def enumerate(self, relators) -> None:
        a = 0
        while a < len(self.table):
            if self.is_live(a):
                for rel in relators:
                    if not self.is_live(a):
                        break
                    self.scan_and_fill(a, rel)
                if self.is_live(a):
                    for col in range(2 * self.ngens):
                        if self.is_live(a) and self.get(a, col) is None:
                            self.define(a, col)
            a += 1


def _tokenize(word, generator_names) -> list:
    """Accept a list of generator names or a concatenated string like 'srsr'."""
    if isinstance(word, (list, tuple)):
        return list(word)
    out = []
    i = 0
    names = sorted(generator_names, key=len, reverse=True)
    while i < len(word):
        if word[i] == " ":
            i += 1
            continue
        for name in names:
            if word.startswith(name, i):
                out.append(name)
                i += len(name)
                break
        else:
            raise ValueError("cannot tokenize %r over %r" % (word, generator_names))
    return out


class PresentedGroup:
    """Finite group given by generators and relators, fully enumerated."""

    def __init__(self, generator_names: Sequence[str], relators: Sequence, cap: int = 4096,
                 name: str | None = None):
        self.name = name
        self.generator_names = tuple(generator_names)
        self.relators = tuple(tuple(_tokenize(r, self.generator_names)) for r in relators)
        self._enumerate(cap)

    def _enumerate(self, cap: int) -> None:
        gidx = {g: i for i, g in enumerate(self.generator_names)}
        rel_cols = [tuple(2 * gidx[t] for t in rel) for rel in self.relators]
        ct = _CosetTable(len(self.generator_names), cap)
        ct.enumerate(rel_cols)
        live = [a for a in range(len(ct.table)) if ct.is_live(a)]
        remap = {a: i for i, a in enumerate(live)}
        ngen = len(self.generator_names)
        # forward action of each generator on elements
        act = [[remap[ct.get(a, 2 * g)] for a in live] for g in range(ngen)]
        # BFS words (generator-index tuples), identity = 0
        words = {0: ()}
        order = [0]
        qi = 0
        while qi < len(order):
            e = order[qi]
            qi += 1
            for g in range(ngen):
                f = act[g][e]
                if f not in words:
                    words[f] = words[e] + (g,)
                    order.append(f)
        if len(words) != len(live):
            raise CapExceeded("presentation did not close")
        self.size = len(live)
        self._act = act
        self._words = [words[i] for i in range(self.size)]
        mult = [[0] * self.size for _ in range(self.size)]
        for i in range(self.size):
            for j in range(self.size):
                k = i
                for g in self._words[j]:
                    k = act[g][k]
                mult[i][j] = k
        self._mult = mult
        self._inv = [next(j for j in range(self.size) if mult[i][j] == 0) for i in range(self.size)]
        self._gen_elems = tuple(act[g][0] for g in range(ngen))

    # -- finite-group interface -------------------------------------------------

    @property
    def order(self) -> int:
        return self.size

    @property
    def identity(self) -> int:
        return 0

    def elements(self) -> range:
        return range(self.size)

    def mult(self, i: int, j: int) -> int:
        return self._mult[i][j]

    def inv(self, i: int) -> int:
        return self._inv[i]

    def generator_element(self, name: str) -> int:
        return self._gen_elems[self.generator_names.index(name)]

    def word_of(self, i: int) -> tuple:
        return self._words[i]

    def eval_word(self, word) -> int:
        e = 0
        for t in _tokenize(word, self.generator_names):
            e = self.mult(e, self.generator_element(t))
        return e

    def element_order(self, i: int) -> int:
        k, e = 1, i
        while e != 0:
            e = self.mult(e, i)
            k += 1
        return k

    def subgroup_generated(self, elems) -> frozenset:
        return closure_subset(self, elems)

    def __repr__(self) -> str:
        return "PresentedGroup(%s, order=%d)" % (self.name or list(self.generator_names), self.size)


_BUILTINS = {
    "Z1": ((), ()),
    "Z2": (("g1",), ("g1 g1",)),
    "Z3": (("g1",), ("g1 g1 g1",)),
    "Z4": (("g1",), ("g1 g1 g1 g1",)),
    "Z5": (("g1",), ("g1 g1 g1 g1 g1",)),
    "Z6": (("g1",), ("g1 g1 g1 g1 g1 g1",)),
    "Z8": (("g1",), ("g1 " * 8,)),
    "Z12": (("g1",), ("g1 " * 12,)),
    "Z2xZ2": (("g1", "g2"), ("g1 g1", "g2 g2", "g1 g2 g1 g2")),
    "Z4xZ2": (("g1", "g2"), ("g1 g1 g1 g1", "g2 g2", "g1 g2 g1 g1 g1 g2")),
    "Z6xZ2": (("g1", "g2"), ("g1 " * 6, "g2 g2", "g1 g2 " + "g1 " * 5 + "g2")),
    "Z2xZ2xZ2": (("g1", "g2", "g3"),
                 ("g1 g1", "g2 g2", "g3 g3",
                  "g1 g2 g1 g2", "g1 g3 g1 g3", "g2 g3 g2 g3")),
    "D4": (("g1", "g2"), ("g1 g1", "g2 g2", "g1 g2 g1 g2")),
    "D6": (("g1", "g2"), ("g1 g1 g1", "g2 g2", "g2 g1 g2 g1")),
    "D8": (("g1", "g2"), ("g1 g1 g1 g1", "g2 g2", "g2 g1 g2 g1")),
    "D12": (("g1", "g2"), ("g1 g1 g1 g1 g1 g1", "g2 g2", "g2 g1 g2 g1")),
    "A4": (("g1", "g2"), ("g1 g1 g1", "g2 g2", "g1 g2 g1 g2 g1 g2")),
    "S4": (("g1", "g2"), ("g1 g1 g1 g1", "g2 g2", "g1 g2 g1 g2 g1 g2")),
    "A4xZ2": (("g1", "g2", "g3"),
              ("g1 g1 g1", "g2 g2", "g1 g2 g1 g2 g1 g2",
               "g3 g3", "g1 g3 g1 g1 g3", "g2 g3 g2 g3")),
    "S4xZ2": (("g1", "g2", "g3"),
              ("g1 g1 g1 g1", "g2 g2", "g1 g2 g1 g2 g1 g2",
               "g3 g3", "g1 g3 g1 g1 g1 g3", "g2 g3 g2 g3")),
}

_BUILTIN_ALIASES = {"D2": "Z2", "1": "Z1", "triv": "Z1"}


def builtin_presentation(name: str) -> PresentedGroup:
    key = _BUILTIN_ALIASES.get(name, name)
    if key not in _BUILTINS:
        raise KeyError("unknown builtin group %r" % name)
    gens, rels = _BUILTINS[key]
    return PresentedGroup(gens, rels, name=key)


# ---------------------------------------------------------------------------
# Matrix groups
# ---------------------------------------------------------------------------

class MatrixGroup:
    """Finite subgroup of GL(n,Z), stored as an explicit element list."""

    def __init__(self, n: int, elements: Sequence[Mat], generator_indices: Sequence[int]):
        self.n = n
        self.elements_list = tuple(elements)
        self.generator_indices = tuple(generator_indices)
        self._index = {m: i for i, m in enumerate(self.elements_list)}
        self._ident = self._index[Mat.identity(n)]

    @property
    def order(self) -> int:
        return len(self.elements_list)

    @property
    def identity(self) -> int:
        return self._ident

    def elements(self) -> range:
        return range(self.order)

    def matrix(self, i: int) -> Mat:
        return self.elements_list[i]

    def index_of(self, m: Mat) -> int:
        return self._index[m]

    def __contains__(self, m: Mat) -> bool:
        return m in self._index

    def mult(self, i: int, j: int) -> int:
        return self._index[self.elements_list[i] * self.elements_list[j]]

    def inv(self, i: int) -> int:
        m = self.elements_list[i]
        p = m
        while True:
            q = p * m
            if q == Mat.identity(self.n):
                return self._index[p]
            p = q

    def element_order(self, i: int) -> int:
        return matrix_order(self.elements_list[i], bound=self.order)

    def generators(self) -> list:
        return [self.elements_list[i] for i in self.generator_indices]

    def subgroup_generated(self, elems) -> frozenset:
        return closure_subset(self, elems)

    def __repr__(self) -> str:
        return "MatrixGroup(n=%d, order=%d)" % (self.n, self.order)


def generate_closure(generators: Sequence[Mat], cap: int = 10000) -> MatrixGroup:
    """Close a generator list under multiplication (breadth-first, sorted layers)."""
    if not generators:
        raise ValueError("need at least one generator (or pass the identity)")
    n = generators[0].nrows
    for g in generators:
        if not is_unimodular(g):
            raise ValueError("generator is not unimodular: %r" % g)
    ident = Mat.identity(n)
    seen = {ident}
    ordered = [ident]
    layer = sorted((g for g in generators if g not in seen), key=Mat.key)
    while layer:
        ordered.extend(layer)
        seen.update(layer)
        if len(seen) > cap:
            raise ClosureExceedsCap("closure exceeded cap %d" % cap)
        nxt = set()
        for a in ordered:
            for g in generators:
                b = a * g
                if b not in seen and b not in nxt:
                    nxt.add(b)
        layer = sorted(nxt, key=Mat.key)
    gen_idx = [ordered.index(g) for g in generators]
    return MatrixGroup(n, ordered, gen_idx)


# ---------------------------------------------------------------------------
# Generic finite-group algorithms (work on either group flavour)
# ---------------------------------------------------------------------------

def closure_subset(G, elems) -> frozenset:
    todo = list(dict.fromkeys(elems))
    out = {G.identity}
    out.update(todo)
    frontier = list(out)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(out):
                for c in (G.mult(a, b), G.mult(b, a)):
                    if c not in out:
                        out.add(c)
                        nxt.append(c)
        frontier = nxt
    return frozenset(out)


def subgroups_all(G, cap: int = 48) -> list:
    """All subgroups, by closing subsets one generator at a time."""
    if G.order > cap:
        raise GroupTooLarge("group of order %d exceeds subgroup-enumeration cap %d" % (G.order, cap))
    triv = frozenset({G.identity})
    subs = {triv}
    frontier = [triv]
    while frontier:
        nxt = []
        for H in frontier:
            for g in G.elements():
                if g in H:
                    continue
                H2 = closure_subset(G, list(H) + [g])
                if H2 not in subs:
                    subs.add(H2)
                    nxt.append(H2)
        frontier = nxt
    return sorted(subs, key=lambda s: (len(s), sorted(s)))


def centralizer(G, subset) -> frozenset:
    return frozenset(g for g in G.elements()
                     if all(G.mult(g, s) == G.mult(s, g) for s in subset))


def conjugate_subset(G, subset, g) -> frozenset:
    gi = G.inv(g)
    return frozenset(G.mult(G.mult(g, s), gi) for s in subset)


def conjugacy_classes_of_subgroups(G, subgroups=None) -> list:
    subs = subgroups if subgroups is not None else subgroups_all(G)
    remaining = set(subs)
    classes = []
    for H in subs:
        if H not in remaining:
            continue
        orbit = {conjugate_subset(G, H, g) for g in G.elements()}
        classes.append(sorted(orbit, key=lambda s: sorted(s)))
        remaining -= orbit
    return classes


def conjugacy_classes_of_elements(G) -> list:
    remaining = set(G.elements())
    classes = []
    for x in G.elements():
        if x not in remaining:
            continue
        orbit = {G.mult(G.mult(g, x), G.inv(g)) for g in G.elements()}
        classes.append(sorted(orbit))
        remaining -= orbit
    return classes


def minimal_generating_sequence(G, subset) -> list:
    """Greedy generating sequence for a subgroup (deterministic)."""
    elems = sorted(subset)
    gens = []
    have = frozenset({G.identity})
    for g in elems:
        if g not in have:
            gens.append(g)
            have = closure_subset(G, list(have) + [g])
            if have == frozenset(subset):
                break
    return gens


# ---------------------------------------------------------------------------
# Characters (sign actions) and isomorphism-type identification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Character:
    """Multiplicative map from a subgroup to {+1, -1}."""

    subgroup: frozenset
    signs: tuple  # pairs (element, sign), sorted by element

    def sign(self, g) -> int:
        return dict(self.signs)[g]

    def kernel(self) -> frozenset:
        return frozenset(g for g, s in self.signs if s == 1)

    @property
    def is_trivial(self) -> bool:
        return all(s == 1 for _, s in self.signs)


def enumerate_characters(G, subset) -> list:
    """All homomorphisms subset -> {+-1}; sign assignments on generators,
    validated by multiplicative propagation over the whole subgroup."""
    gens = minimal_generating_sequence(G, subset)
    elems = sorted(subset)
    out = []
    for assign in itertools.product((1, -1), repeat=len(gens)):
        signs = {G.identity: 1}
        ok = True
        frontier = [G.identity]
        while frontier and ok:
            nxt = []
            for e in frontier:
                for g, s in zip(gens, assign):
                    f = G.mult(e, g)
                    v = signs[e] * s
                    if f in signs:
                        if signs[f] != v:
                            ok = False
                            break
                    else:
                        signs[f] = v
                        nxt.append(f)
                if not ok:
                    break
            frontier = nxt
        if ok and len(signs) == len(elems):
            out.append(Character(frozenset(subset), tuple(sorted(signs.items()))))
    # deterministic: trivial character first, then lex on sign vectors
    out.sort(key=lambda ch: tuple(-s for _, s in ch.signs))
    return out


def _order_multiset(G) -> tuple:
    counts = {}
    for g in G.elements():
        o = G.element_order(g)
        counts[o] = counts.get(o, 0) + 1
    return tuple(sorted(counts.items()))


def _abelian_type_orders(factors) -> tuple:
    """Element-order statistics of Z_{f1} x ... x Z_{fk}."""
    from math import gcd, lcm
    counts = {}
    for combo in itertools.product(*[range(f) for f in factors]):
        o = 1
        for x, f in zip(combo, factors):
            if x:
                o = lcm(o, f // gcd(x, f))
        counts[o] = counts.get(o, 0) + 1
    return tuple(sorted(counts.items()))


def _divisor_chains(n: int, d_min: int = 2):
    """Invariant-factor chains d1 | d2 | ... (each >= 2) with product n."""
    out = []
    for d in range(d_min, n + 1):
        if n % d != 0:
            continue
        if d == n:
            out.append((d,))
            continue
        for tail in _divisor_chains(n // d, d):
            if tail[0] % d == 0:
                out.append((d,) + tail)
    return out


def identify_isomorphism_type(G) -> str:
    """Coarse isomorphism-type label: order, abelian invariants, order profile."""
    n = G.order
    if n == 1:
        return "1"
    orders = _order_multiset(G)
    abelian = all(G.mult(a, b) == G.mult(b, a)
                  for a in G.elements() for b in G.elements())
    if abelian:
        if dict(orders).get(n):
            return "Z%d" % n
        for chain in _divisor_chains(n):
            if len(chain) > 1 and _abelian_type_orders(chain) == orders:
                return "x".join("Z%d" % d for d in chain)
        return "other(order=%d, abelian, orders=%s)" % (n, list(orders))
    if n % 2 == 0:
        half = n // 2
        for x in G.elements():
            if G.element_order(x) == half:
                cyc = closure_subset(G, [x])
                if len(cyc) == half and all(G.element_order(y) == 2
                                            for y in G.elements() if y not in cyc):
                    return "D%d" % n
    profile = dict(orders)
    if n == 12 and profile == {1: 1, 2: 3, 3: 8}:
        return "A4"
    if n == 24 and profile == {1: 1, 2: 9, 3: 8, 4: 6}:
        return "S4"
    if n == 24 and profile == {1: 1, 2: 7, 3: 8, 6: 8}:
        return "A4xZ2"
    if n == 48 and profile == {1: 1, 2: 19, 3: 8, 4: 12, 6: 8}:
        return "S4xZ2"
    return "other(order=%d, orders=%s)" % (n, list(orders))


# ---------------------------------------------------------------------------
# Homomorphisms P -> MatrixGroup
# ---------------------------------------------------------------------------

class GroupHom:
    """Homomorphism from a presented group into a matrix group, by generator images."""

    def __init__(self, source: PresentedGroup, target: MatrixGroup, images: Sequence[Mat]):
        if len(images) != len(source.generator_names):
            raise ValueError("one image per generator required")
        self.source = source
        self.target = target
        self.images = tuple(images)
        for rel in source.relators:
            if self._eval_tokens(rel) != Mat.identity(target.n):
                raise ValueError("relator %r does not map to the identity" % (rel,))

    def _eval_tokens(self, tokens) -> Mat:
        m = Mat.identity(self.target.n)
        lut = dict(zip(self.source.generator_names, self.images))
        for t in tokens:
            m = m * lut[t]
        return m

    def image_of(self, element: int) -> Mat:
        m = Mat.identity(self.target.n)
        for g in self.source.word_of(element):
            m = m * self.images[g]
        return m

    def kernel(self) -> frozenset:
        ident = Mat.identity(self.target.n)
        return frozenset(e for e in self.source.elements() if self.image_of(e) == ident)

    def image_group(self) -> MatrixGroup:
        gens = [m for m in self.images if m != Mat.identity(self.target.n)]
        if not gens:
            gens = [Mat.identity(self.target.n)]
        return generate_closure(gens)

    def key(self) -> tuple:
        return tuple(m.key() for m in self.images)

    def __repr__(self) -> str:
        return "GroupHom(%s -> GL(%d,Z), images=%s)" % (
            self.source.name or "P", self.target.n,
            [list(map(list, m.rows)) for m in self.images])


def hom_kernel_image(phi: GroupHom):
    """Kernel subset, image matrix group, and the induced injective hom."""
    ker = phi.kernel()
    img = phi.image_group()
    extra = [list(phi.source.generator_names[g] for g in phi.source.word_of(e))
             for e in sorted(ker) if e != phi.source.identity]
    induced_src = PresentedGroup(phi.source.generator_names,
                                 list(phi.source.relators) + extra,
                                 name=(phi.source.name or "P") + "/ker")
    induced = GroupHom(induced_src, phi.target, phi.images)
    assert induced_src.order * len(ker) == phi.source.order
    return ker, img, induced


def enumerate_homs_up_to_conjugacy(P: PresentedGroup, Aut: MatrixGroup,
                                   cap: int = 200000) -> list:
    """One representative per Aut-conjugacy class of homomorphisms P -> Aut.

    Representative = lexicographically least generator-image tuple
    (row-major matrix keys), stable across runs.
    """
    gen_orders = [P.element_order(P.generator_element(g)) for g in P.generator_names]
    cands = []
    for o in gen_orders:
        cands.append([i for i in Aut.elements() if o % Aut.element_order(i) == 0])
    total = 1
    for c in cands:
        total *= len(c)
    if total > cap:
        raise CapExceeded("hom search space %d exceeds cap" % total)
    ident = Mat.identity(Aut.n)
    valid = []
    for combo in itertools.product(*cands):
        images = [Aut.matrix(i) for i in combo]
        lut = dict(zip(P.generator_names, images))
        ok = True
        for rel in P.relators:
            m = ident
            for t in rel:
                m = m * lut[t]
            if m != ident:
                ok = False
                break
        if ok:
            valid.append(tuple(combo))
    valid_set = set(valid)
    seen = set()
    reps = []
    for combo in valid:
        if combo in seen:
            continue
        orbit = set()
        for u in Aut.elements():
            ui = Aut.inv(u)
            img = tuple(Aut.mult(Aut.mult(u, c), ui) for c in combo)
            orbit.add(img)
        assert orbit <= valid_set
        seen |= orbit
        rep = min(orbit, key=lambda t: tuple(Aut.matrix(i).key() for i in t))
        reps.append(rep)
    reps.sort(key=lambda t: tuple(Aut.matrix(i).key() for i in t))
    return [GroupHom(P, Aut, [Aut.matrix(i) for i in rep]) for rep in reps]
