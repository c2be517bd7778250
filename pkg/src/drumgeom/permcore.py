"""Finite permutation groups by full enumeration.

Permutations are plain tuples of images, ``g[i]`` being the image of ``i``.
Products act on the left: ``mul(g, h)`` applies ``h`` first, so that
``act(mul(g, h), i) == act(g, act(h, i))``.
"""

from __future__ import annotations

import os
from collections import deque
from collections.abc import Iterable, Sequence
from functools import cached_property

Perm = tuple[int, ...]

DEFAULT_CAP = 2**20
CAP_ENV = "DRUMGEOM_CAP"


class PermError(ValueError):
    pass


class InvalidPerm(PermError):
    pass


class CapExceeded(PermError):
    pass


class NotMember(PermError):
    pass


class NotSubgroup(PermError):
    pass


class NonIntegralResult(ArithmeticError):
    pass


class DegenerateAction(PermError):
    pass


def element_cap() -> int:
    value = os.environ.get(CAP_ENV)
    return int(value) if value else DEFAULT_CAP


def identity(degree: int) -> Perm:
    return tuple(range(degree))


def mul(g: Perm, h: Perm) -> Perm:
    return tuple([g[i] for i in h])


def inv(g: Perm) -> Perm:
    out = [0] * len(g)
    for i, j in enumerate(g):
        out[j] = i
    return tuple(out)


def conj(g: Perm, h: Perm) -> Perm:
    """h^-1 g h."""
    hi = inv(h)
    return tuple([hi[g[i]] for i in h])


def perm_order(g: Perm) -> int:
    from math import lcm

    seen = [False] * len(g)
    result = 1
    for start in range(len(g)):
        if seen[start]:
            continue
        length = 0
        i = start
        while not seen[i]:
            seen[i] = True
            i = g[i]
            length += 1
        result = lcm(result, length)
    return result


def check_perm(images: Sequence[int], degree: int | None = None) -> Perm:
    p = tuple(int(x) for x in images)
    if degree is not None and len(p) != degree:
        raise InvalidPerm(f"expected {degree} images, got {len(p)}")
    if sorted(p) != list(range(len(p))):
        raise InvalidPerm(f"not a bijection on 0..{len(p) - 1}: {list(p)}")
    return p


def from_cycles(degree: int, *cycles: Sequence[int]) -> Perm:
    """Build a permutation from disjoint cycles, e.g. from_cycles(4, (0, 1), (2, 3))."""
    img = list(range(degree))
    for cyc in cycles:
        for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            img[a] = b
    return check_perm(img, degree)


def closure(degree: int, gens: Iterable[Perm], cap: int | None = None) -> frozenset[Perm]:
    cap = element_cap() if cap is None else cap
    gens = list(dict.fromkeys(tuple(g) for g in gens))
    e = identity(degree)
    els = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                c = mul(s, g)
                if c not in els:
                    els.add(c)
                    nxt.append(c)
                    if len(els) > cap:
                        raise CapExceeded(f"closure exceeds {cap} elements")
        frontier = nxt
    return frozenset(els)


class PermGroup:
    """A permutation group given by generators; elements are enumerated on demand."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]], name: str | None = None):
        self.degree = degree
        gens = [check_perm(g, degree) for g in generators]
        self.generators: tuple[Perm, ...] = tuple(gens)
        self.name = name

    @classmethod
    def from_elements(cls, degree: int, elements: Iterable[Perm], name: str | None = None) -> PermGroup:
        """Wrap a known element set (closed under products); a generating set is picked greedily."""
        els = frozenset(elements)
        group = cls(degree, greedy_generators(degree, els), name=name)
        group.__dict__["elements"] = els
        return group

    def __repr__(self) -> str:
        label = self.name or "PermGroup"
        return f"<{label} degree={self.degree} gens={len(self.generators)}>"

    @cached_property
    def identity(self) -> Perm:
        return identity(self.degree)

    @cached_property
    def elements(self) -> frozenset[Perm]:
        return closure(self.degree, self.generators)

    @cached_property
    def sorted_elements(self) -> list[Perm]:
        return sorted(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, g) -> bool:
        return tuple(g) in self.elements

    def __len__(self) -> int:
        return self.order

    def require(self, g: Sequence[int]) -> Perm:
        g = tuple(g)
        if g not in self.elements:
            raise NotMember(f"{list(g)} is not in {self!r}")
        return g

    @cached_property
    def conjugacy_classes(self) -> list[frozenset[Perm]]:
        """Classes ordered by their lexicographically least member."""
        seen: set[Perm] = set()
        classes = []
        gens = self.generators
        for g in self.sorted_elements:
            if g in seen:
                continue
            orbit = {g}
            queue = deque([g])
            while queue:
                x = queue.popleft()
                for s in gens:
                    y = conj(x, s)
                    if y not in orbit:
                        orbit.add(y)
                        queue.append(y)
            seen |= orbit
            classes.append(frozenset(orbit))
        return classes

    @cached_property
    def class_reps(self) -> list[Perm]:
        return [min(c) for c in self.conjugacy_classes]

    @cached_property
    def class_index(self) -> dict[Perm, int]:
        return {g: i for i, c in enumerate(self.conjugacy_classes) for g in c}

    def class_of(self, g: Perm) -> frozenset[Perm]:
        return self.conjugacy_classes[self.class_index[self.require(g)]]

    def is_subgroup_of(self, other: PermGroup) -> bool:
        return self.degree == other.degree and all(g in other.elements for g in self.generators)


class Subgroup(PermGroup):
    """Subgroup of ``parent`` generated by ``generators``."""

    def __init__(self, parent: PermGroup, generators: Iterable[Sequence[int]], name: str | None = None):
        super().__init__(parent.degree, generators, name=name)
        self.parent = parent
        for g in self.generators:
            if g not in parent.elements:
                raise NotSubgroup(f"generator {list(g)} is not in the parent group")

    @classmethod
    def from_elements(cls, parent: PermGroup, elements: Iterable[Perm], name: str | None = None) -> Subgroup:
        els = frozenset(elements)
        sub = cls(parent, greedy_generators(parent.degree, els), name=name)
        sub.__dict__["elements"] = els
        return sub

    @classmethod
    def whole(cls, parent: PermGroup) -> Subgroup:
        sub = cls(parent, parent.generators, name=parent.name)
        if "elements" in parent.__dict__:
            sub.__dict__["elements"] = parent.elements
        return sub


def greedy_generators(degree: int, elements: frozenset[Perm]) -> list[Perm]:
    """Pick generators in lexicographic order until they generate ``elements``."""
    gens: list[Perm] = []
    span = {identity(degree)}
    for g in sorted(elements):
        if g in span:
            continue
        gens.append(g)
        span = set(closure(degree, gens))
        if len(span) == len(elements):
            break
    return gens


def as_subgroup(parent: PermGroup, H: PermGroup) -> Subgroup:
    if isinstance(H, Subgroup) and H.parent is parent:
        return H
    if H.degree != parent.degree or not H.is_subgroup_of(parent):
        raise NotSubgroup(f"{H!r} is not a subgroup of {parent!r}")
    sub = Subgroup(parent, H.generators, name=H.name)
    if "elements" in H.__dict__:
        sub.__dict__["elements"] = H.elements
    return sub


# --- conjugacy --------------------------------------------------------------


def conjugacy_class(G: PermGroup, g: Sequence[int]) -> frozenset[Perm]:
    return G.class_of(tuple(g))


def centralizer_order(G: PermGroup, g: Sequence[int]) -> int:
    # orbit-stabilizer on the conjugation action
    return G.order // len(conjugacy_class(G, g))


def class_intersection_sizes(G: PermGroup, H: PermGroup) -> list[int]:
    """|C ∩ H| for each conjugacy class C of G, in class order."""
    counts = [0] * len(G.conjugacy_classes)
    idx = G.class_index
    for h in H.elements:
        counts[idx[h]] += 1
    return counts


# --- actions ----------------------------------------------------------------


class Action:
    """A homomorphism from ``group`` into Sym(degree)."""

    group: PermGroup
    degree: int

    def perm(self, g: Perm) -> Perm:
        raise NotImplementedError

    def act(self, g: Perm, i: int) -> int:
        return self.perm(g)[i]

    @cached_property
    def generator_images(self) -> list[Perm]:
        return [self.perm(s) for s in self.group.generators]

    def orbit(self, i: int, gens: Iterable[Perm] | None = None) -> set[int]:
        images = self.generator_images if gens is None else [self.perm(s) for s in gens]
        seen = {i}
        stack = [i]
        while stack:
            x = stack.pop()
            for p in images:
                y = p[x]
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def is_transitive(self, gens: Iterable[Perm] | None = None) -> bool:
        return self.degree == 0 or len(self.orbit(0, gens)) == self.degree

    def stabilizer(self, i: int) -> Subgroup:
        els = [g for g in self.group.elements if self.perm(g)[i] == i]
        return Subgroup.from_elements(self.group, els)


class CosetAction(Action):
    """Left translation of G on its left cosets gH."""

    def __init__(self, group: PermGroup, subgroup: PermGroup):
        self.group = group
        self.subgroup = as_subgroup(group, subgroup)
        H = sorted(self.subgroup.elements)
        where: dict[Perm, int] = {}
        cosets: list[list[Perm]] = []
        for g in group.sorted_elements:
            if g in where:
                continue
            # g is the least element not yet covered, hence the least of its coset
            k = len(cosets)
            coset = [mul(g, h) for h in H]
            for x in coset:
                where[x] = k
            cosets.append(coset)
        self.coset_of = where
        self.reps: list[Perm] = [min(c) for c in cosets]
        self.degree = len(cosets)
        self._perm_cache: dict[Perm, Perm] = {}

    def act(self, g: Perm, i: int) -> int:
        return self.coset_of[mul(g, self.reps[i])]

    def perm(self, g: Perm) -> Perm:
        p = self._perm_cache.get(g)
        if p is None:
            where = self.coset_of
            p = tuple(where[mul(g, r)] for r in self.reps)
            if len(self._perm_cache) < 4096:
                self._perm_cache[g] = p
        return p


class NaturalAction(Action):
    """Restriction of a group's own action to the invariant block ``offset .. offset+degree-1``."""

    def __init__(self, group: PermGroup, offset: int, degree: int):
        self.group = group
        self.offset = offset
        self.degree = degree

    def perm(self, g: Perm) -> Perm:
        o = self.offset
        return tuple(x - o for x in g[o : o + self.degree])


def coset_action(G: PermGroup, H: PermGroup) -> CosetAction:
    return CosetAction(G, H)


def fixed_points(action: Action, g: Sequence[int]) -> int:
    g = action.group.require(g)
    p = action.perm(g)
    return sum(1 for i, j in enumerate(p) if i == j)


def fixed_point_formula(G: PermGroup, H: PermGroup, g: Sequence[int]) -> int:
    """|C_G(g)| * |g^G ∩ H| / |H|, the number of cosets of H fixed by g."""
    H = as_subgroup(G, H)
    cls = conjugacy_class(G, g)
    meet = sum(1 for h in H.elements if h in cls)
    num = centralizer_order(G, g) * meet
    q, r = divmod(num, H.order)
    if r:
        raise NonIntegralResult(f"{num} is not divisible by |H| = {H.order}")
    return q


def minimal_block(images: Sequence[Perm], degree: int, a: int, b: int) -> list[int]:
    """Smallest block of imprimitivity containing a and b (union-find over generator images)."""
    parent = list(range(degree))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = [(a, b)]
    parent[find(b)] = find(a)
    while queue:
        x, y = queue.pop()
        for p in images:
            u, v = find(p[x]), find(p[y])
            if u != v:
                parent[v] = u
                queue.append((u, v))
    root = find(a)
    return [i for i in range(degree) if find(i) == root]


def is_primitive(action: Action) -> bool:
    d = action.degree
    if d < 2:
        raise DegenerateAction(f"primitivity needs degree >= 2, got {d}")
    images = action.generator_images
    if not action.is_transitive():
        return False
    for b in range(1, d):
        if len(minimal_block(images, d, 0, b)) < d:
            return False
    return True


def core(G: PermGroup, H: PermGroup) -> Subgroup:
    """Largest normal subgroup of G inside H (kernel of the action on G/H)."""
    H = as_subgroup(G, H)
    action = CosetAction(G, H)
    reps = action.reps
    Hel = H.elements
    kernel = [h for h in H.elements if all(conj(h, r) in Hel for r in reps)]
    return Subgroup.from_elements(G, kernel)


def is_conjugate(G: PermGroup, U: PermGroup, V: PermGroup, action: CosetAction | None = None) -> bool:
    """Is g^-1 U g = V for some g in G?  Searches coset representatives of V."""
    U = as_subgroup(G, U)
    V = as_subgroup(G, V)
    if U.order != V.order:
        return False
    action = action or CosetAction(G, V)
    Vel = V.elements
    for r in action.reps:
        # r^-1 u r in V for all generators u, i.e. U fixes the coset rV
        if all(conj(u, r) in Vel for u in U.generators):
            return True
    return False
