"""Point-line incidence geometries, drum geometries and their verification."""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exactla import ExactMatrix, determinant
from .gstriple import GSTriple, Verdict, _coset_action, check_ac
from .permcore import (
    Action,
    NaturalAction,
    Perm,
    PermGroup,
    Subgroup,
    as_subgroup,
)

AUTOMORPHISM_BUDGET = 10**6


class GeometryError(ValueError):
    pass


class NotSquare(GeometryError):
    pass


class NotTransitive(GeometryError):
    pass


class NotTransitiveSubgroup(GeometryError):
    pass


class PreconditionUnmet(GeometryError):
    pass


class IncidenceGeometry:
    """Finite rank 2 geometry stored as a boolean point x line matrix."""

    def __init__(self, num_points: int, num_lines: int, incident, labels: dict | None = None):
        self.num_points = num_points
        self.num_lines = num_lines
        m = np.zeros((num_points, num_lines), dtype=bool)
        for p, l in incident:
            if not (0 <= p < num_points and 0 <= l < num_lines):
                raise GeometryError(f"incidence ({p}, {l}) out of range")
            m[p, l] = True
        m.setflags(write=False)
        self.incidence = m
        self.labels = labels or {}

    @classmethod
    def from_matrix(cls, matrix) -> IncidenceGeometry:
        m = np.asarray(matrix, dtype=bool)
        return cls(m.shape[0], m.shape[1], zip(*np.nonzero(m)))

    def __repr__(self) -> str:
        return f"<IncidenceGeometry {self.num_points} points, {self.num_lines} lines>"

    def __eq__(self, other) -> bool:
        return isinstance(other, IncidenceGeometry) and np.array_equal(self.incidence, other.incidence)

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(p), int(l)) for p, l in zip(*np.nonzero(self.incidence))]

    @cached_property
    def lines_on(self) -> list[frozenset[int]]:
        return [frozenset(int(l) for l in np.nonzero(row)[0]) for row in self.incidence]

    @cached_property
    def points_on(self) -> list[frozenset[int]]:
        return [frozenset(int(p) for p in np.nonzero(col)[0]) for col in self.incidence.T]

    def dual(self) -> IncidenceGeometry:
        return IncidenceGeometry(self.num_lines, self.num_points, [(l, p) for p, l in self.pairs()])

    def to_json(self) -> dict:
        return {"points": self.num_points, "lines": self.num_lines, "incident": [list(x) for x in self.pairs()]}

    @classmethod
    def from_json(cls, doc: dict) -> IncidenceGeometry:
        return cls(doc["points"], doc["lines"], [tuple(x) for x in doc["incident"]])

    def to_dot(self, name: str = "geometry") -> str:
        out = [f"graph {name} {{", "  node [shape=circle];"]
        out += [f"  p{p};" for p in range(self.num_points)]
        out += [f"  l{l} [shape=box];" for l in range(self.num_lines)]
        out += [f"  p{p} -- l{l};" for p, l in self.pairs()]
        out.append("}")
        return "\n".join(out) + "\n"


@dataclass
class DGeometry:
    """A geometry with a group acting on its points and on its lines."""

    geometry: IncidenceGeometry
    group: PermGroup
    point_action: Action
    line_action: Action
    name: str | None = None

    def __post_init__(self):
        g = self.geometry
        if self.point_action.degree != g.num_points or self.line_action.degree != g.num_lines:
            raise GeometryError("action degrees do not match the geometry")
        for s in self.group.generators:
            p, l = self.point_action.perm(s), self.line_action.perm(s)
            if not preserves_incidence(g, p, l):
                raise GeometryError(f"generator {list(s)} does not preserve incidence")

    @classmethod
    def natural(cls, geometry: IncidenceGeometry, group: PermGroup, name: str | None = None) -> DGeometry:
        """Group given as permutations of points ⊔ lines (points first)."""
        mu = geometry.num_points
        return cls(geometry, group, NaturalAction(group, 0, mu), NaturalAction(group, mu, geometry.num_lines), name)

    def is_transitive(self) -> bool:
        return self.point_action.is_transitive() and self.line_action.is_transitive()

    def fixed_counts(self, g: Perm) -> tuple[int, int]:
        p, l = self.point_action.perm(g), self.line_action.perm(g)
        return sum(i == j for i, j in enumerate(p)), sum(i == j for i, j in enumerate(l))

    def combined(self, g: Perm) -> Perm:
        mu = self.geometry.num_points
        return self.point_action.perm(g) + tuple(mu + x for x in self.line_action.perm(g))


def preserves_incidence(g: IncidenceGeometry, p: Sequence[int], l: Sequence[int]) -> bool:
    m = g.incidence
    return bool(np.array_equal(m, m[np.ix_(np.argsort(p), np.argsort(l))]))


def build_drum_geometry(t: GSTriple) -> DGeometry:
    """Points G/U, lines G/V; aU and bV are incident iff the cosets meet."""
    G = t.group
    a = _coset_action(G, t.left)
    b = _coset_action(G, t.right)
    pairs = {(a.coset_of[g], b.coset_of[g]) for g in G.elements}
    geometry = IncidenceGeometry(a.degree, b.degree, sorted(pairs))
    return DGeometry(geometry, G, a, b, name=t.name)


def _fixed_count_check(dg: DGeometry, compare) -> Verdict:
    for g in dg.group.class_reps:
        fp, fl = dg.fixed_counts(g)
        if not compare(fp, fl):
            return Verdict(False, f"{list(g)} fixes {fp} points and {fl} lines", {"element": list(g), "points": fp, "lines": fl})
    return Verdict(True, None, {"classes_checked": len(dg.group.class_reps)})


def verify_D(dg: DGeometry) -> Verdict:
    """Every element fixes a point iff it fixes a line (checked on class representatives)."""
    return _fixed_count_check(dg, lambda p, l: (p > 0) == (l > 0))


def verify_SD(dg: DGeometry) -> Verdict:
    return _fixed_count_check(dg, lambda p, l: p == l)


def triple_from_geometry(dg: DGeometry, x: int = 0, Y: int | None = None) -> GSTriple:
    """Stabilizers of point x and line Y; Y defaults to the first line through x."""
    if not dg.is_transitive():
        raise NotTransitive("group is not transitive on both points and lines")
    if Y is None:
        through = sorted(dg.geometry.lines_on[x])
        if not through:
            raise GeometryError(f"point {x} lies on no line")
        Y = through[0]
    G = dg.group
    pa, la = dg.point_action, dg.line_action
    Gx = [g for g in G.elements if pa.act(g, x) == x]
    GY = [g for g in G.elements if la.act(g, Y) == Y]
    return GSTriple(G, Subgroup.from_elements(G, Gx), Subgroup.from_elements(G, GY), name=dg.name)


def incidence_matrix(g: IncidenceGeometry) -> ExactMatrix:
    return ExactMatrix(g.incidence.astype(int).tolist())


def verify_pa_eq_al(dg: DGeometry, alpha: Perm, matrix: ExactMatrix | None = None) -> bool:
    """PA = AL for the point/line permutation matrices of alpha."""
    alpha = dg.group.require(alpha)
    A = incidence_matrix(dg.geometry) if matrix is None else matrix
    P = ExactMatrix.permutation(dg.point_action.perm(alpha))
    L = ExactMatrix.permutation(dg.line_action.perm(alpha))
    return P @ A == A @ L


def is_super_strong(g: IncidenceGeometry) -> tuple[bool, int]:
    if g.num_points != g.num_lines:
        raise NotSquare(f"{g.num_points} points but {g.num_lines} lines")
    d = determinant(incidence_matrix(g))
    return d != 0, d


def is_symmetric_design(g: IncidenceGeometry) -> tuple[int, int, int] | None:
    v = g.num_points
    if v != g.num_lines or v < 2:
        return None
    m = g.incidence.astype(np.int64)
    k_rows = set(m.sum(axis=1).tolist())
    k_cols = set(m.sum(axis=0).tolist())
    if len(k_rows) != 1 or k_rows != k_cols:
        return None
    k = k_rows.pop()
    off = ~np.eye(v, dtype=bool)
    pp = (m @ m.T)[off]  # blocks through two distinct points
    bb = (m.T @ m)[off]  # points on two distinct blocks
    lam = set(pp.tolist()) | set(bb.tolist())
    if len(lam) != 1:
        return None
    return v, k, lam.pop()


# --- isomorphisms, automorphisms, dualities ----------------------------------


def _isomorphisms(
    g1: IncidenceGeometry, g2: IncidenceGeometry, budget: int, prefix: dict[int, int] | None = None
) -> Iterator[tuple[Perm, Perm] | None]:
    """Yield incidence-preserving (point map, line map) pairs g1 -> g2.

    Backtracks over point images, pruning with degrees and with the number of
    lines through each pair and triple of already-mapped points.  ``prefix``
    forces the images of some points.  Yields None once if the node budget runs out.
    """
    prefix = prefix or {}
    if (g1.num_points, g1.num_lines) != (g2.num_points, g2.num_lines):
        return
    n = g1.num_points
    deg1 = [len(s) for s in g1.lines_on]
    deg2 = [len(s) for s in g2.lines_on]
    if sorted(deg1) != sorted(deg2) or sorted(map(len, g1.points_on)) != sorted(map(len, g2.points_on)):
        return
    m1 = g1.incidence.astype(np.int64)
    m2 = g2.incidence.astype(np.int64)
    common1 = m1 @ m1.T
    common2 = m2 @ m2.T
    L1, L2 = g1.lines_on, g2.lines_on
    # order points so that each new point shares lines with earlier ones
    order: list[int] = list(prefix)
    remaining = set(range(n)) - set(prefix)
    while remaining:
        nxt = max(remaining, key=lambda p: (sum(common1[p, q] for q in order), deg1[p], -p))
        order.append(nxt)
        remaining.remove(nxt)
    nodes = 0
    image: dict[int, int] = {}
    used: set[int] = set()

    def line_map(pmap: Sequence[int]) -> Perm | None:
        targets: dict[frozenset[int], list[int]] = {}
        for l, pts in enumerate(g2.points_on):
            targets.setdefault(pts, []).append(l)
        out = []
        for pts in g1.points_on:
            key = frozenset(pmap[p] for p in pts)
            bucket = targets.get(key)
            if not bucket:
                return None
            out.append(bucket.pop(0))
        return tuple(out)

    def rec(k: int):
        nonlocal nodes
        if k == n:
            pmap = tuple(image[p] for p in range(n))
            lmap = line_map(pmap)
            if lmap is not None:
                yield pmap, lmap
            return
        p = order[k]
        done = order[:k]
        for q in ([prefix[p]] if p in prefix else range(n)):
            if q in used or deg2[q] != deg1[p]:
                continue
            nodes += 1
            if nodes > budget:
                raise _Budget
            if any(common1[p, r] != common2[q, image[r]] for r in done):
                continue
            ok = True
            for r, s in itertools.combinations(done, 2):
                if common1[p, r] and common1[p, s] and common1[r, s]:
                    c1 = len(L1[p] & L1[r] & L1[s])
                    c2 = len(L2[q] & L2[image[r]] & L2[image[s]])
                    if c1 != c2:
                        ok = False
                        break
            if not ok:
                continue
            image[p] = q
            used.add(q)
            yield from rec(k + 1)
            del image[p]
            used.discard(q)

    try:
        yield from rec(0)
    except _Budget:
        yield None


class _Budget(Exception):
    pass


def automorphism_group(g: IncidenceGeometry, budget: int = AUTOMORPHISM_BUDGET) -> PermGroup | None:
    """Full automorphism group as permutations of points ⊔ lines; None if the budget runs out.

    Builds a stabilizer chain along the points: at each level one automorphism is
    searched for per point not yet known to lie in the orbit of the base point.
    """
    mu = g.num_points
    gens: list[Perm] = []
    fixed: dict[int, int] = {}
    spent = 0
    for b in range(mu):
        level: list[Perm] = []
        orbit = {b}
        for q in range(mu):
            if q in orbit or q in fixed.values():
                continue
            found = None
            for iso in _isomorphisms(g, g, budget - spent, {**fixed, b: q}):
                if iso is None:
                    return None
                found = iso
                break
            spent += 1
            if found is None:
                continue
            p, l = found
            level.append(p + tuple(mu + x for x in l))
            orbit = _point_orbit(b, level)
        gens.extend(level)
        fixed[b] = b
    degree = mu + g.num_lines
    return PermGroup(degree, gens or [tuple(range(degree))], name="Aut")


def _point_orbit(b: int, gens: list[Perm]) -> set[int]:
    seen = {b}
    stack = [b]
    while stack:
        x = stack.pop()
        for s in gens:
            if s[x] not in seen:
                seen.add(s[x])
                stack.append(s[x])
    return seen


@dataclass(frozen=True)
class Duality:
    point_to_line: Perm
    line_to_point: Perm

    def as_perm(self, num_points: int) -> Perm:
        """As a permutation of points ⊔ lines (points first)."""
        return tuple(num_points + x for x in self.point_to_line) + tuple(self.line_to_point)


def find_duality(g: IncidenceGeometry, budget: int = AUTOMORPHISM_BUDGET) -> Duality | None:
    if g.num_points != g.num_lines:
        return None
    for iso in _isomorphisms(g, g.dual(), budget):
        if iso is None:
            return None
        # a point map into the dual's points is a map points -> lines
        return Duality(*iso)
    return None


def is_duality(g: IncidenceGeometry, d: Duality) -> bool:
    m = g.incidence
    return all(m[d.line_to_point[l], d.point_to_line[p]] for p, l in g.pairs()) and sorted(d.point_to_line) == list(
        range(g.num_lines)
    )


def derived_triple_subgroup(dg: DGeometry, X: PermGroup) -> GSTriple:
    X = as_subgroup(dg.group, X)
    gens = X.generators
    if not (dg.point_action.is_transitive(gens) and dg.line_action.is_transitive(gens)):
        raise NotTransitiveSubgroup("subgroup is not transitive on both points and lines")
    sub = DGeometry(dg.geometry, X, _Restricted(X, dg.point_action), _Restricted(X, dg.line_action), dg.name)
    return triple_from_geometry(sub)


class _Restricted(Action):
    def __init__(self, group: PermGroup, parent: Action):
        self.group = group
        self.parent = parent
        self.degree = parent.degree

    def perm(self, g: Perm) -> Perm:
        return self.parent.perm(g)


def derived_triple_overgroup(dg: DGeometry, B: PermGroup) -> GSTriple:
    """(B, B_x, B_Y) for an overgroup B of A acting naturally on points ⊔ lines."""
    g = dg.geometry
    mu = g.num_points
    if B.degree != mu + g.num_lines:
        raise PreconditionUnmet(f"B must act on {mu + g.num_lines} points ⊔ lines")
    for s in B.generators:
        if any(x >= mu for x in s[:mu]) or not preserves_incidence(g, s[:mu], [x - mu for x in s[mu:]]):
            raise PreconditionUnmet(f"{list(s)} is not an automorphism of the geometry")
    for a in dg.group.generators:
        if dg.combined(a) not in B.elements:
            raise PreconditionUnmet("A is not contained in B")
    square = g.num_points == g.num_lines
    if not (square and is_super_strong(g)[0]) and is_symmetric_design(g) is None:
        raise PreconditionUnmet("geometry is neither super strong nor a symmetric 2-design")
    t = triple_from_geometry(DGeometry.natural(g, B, dg.name))
    if not check_ac(t):
        raise AssertionError("overgroup triple is not almost conjugate")
    return t


def extended_by_duality(dg: DGeometry, d: Duality, aut: PermGroup | None = None) -> GSTriple:
    """(<Aut, delta>, stabilizer of point 0, stabilizer of line 0) on points ⊔ lines."""
    g = dg.geometry
    aut = aut or automorphism_group(g)
    if aut is None:
        raise PreconditionUnmet("automorphism group search exhausted its budget")
    mu = g.num_points
    E = PermGroup(mu + g.num_lines, list(aut.generators) + [d.as_perm(mu)], name="Aut+duality")
    Ex = [e for e in E.elements if e[0] == 0]
    EY = [e for e in E.elements if e[mu] == mu]
    return GSTriple(E, Subgroup.from_elements(E, Ex), Subgroup.from_elements(E, EY))
