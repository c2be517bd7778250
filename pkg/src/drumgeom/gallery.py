"""Constructors for the example families: projective spaces, quadratic designs,
polygons, wreath products and the bundled GWW drums."""

from __future__ import annotations

import itertools
import json
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from math import prod

from .geom import (
    DGeometry,
    IncidenceGeometry,
    is_symmetric_design,
    triple_from_geometry,
)
from .gstriple import GSTriple, _coset_action
from .permcore import CapExceeded, PermGroup, Subgroup, closure, element_cap


class NonPrime(ValueError):
    pass


class DegenerateParameters(ValueError):
    pass


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % d for d in range(2, int(p**0.5) + 1))


def pgl_order(n: int, p: int) -> int:
    return prod(p**n - p**i for i in range(n)) // (p - 1)


# --- projective spaces -------------------------------------------------------


@dataclass(frozen=True)
class ProjectiveSpec:
    n: int
    p: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("need n >= 3")
        if not _is_prime(self.p):
            raise NonPrime(f"{self.p} is not prime")


def _normalize(v: Sequence[int], p: int) -> tuple[int, ...]:
    lead = next(x for x in v if x % p)
    s = pow(lead, -1, p)
    return tuple(x * s % p for x in v)


def _projective_points(n: int, p: int) -> list[tuple[int, ...]]:
    """Normalised representatives (first nonzero coordinate 1), sorted."""
    return sorted({_normalize(v, p) for v in itertools.product(range(p), repeat=n) if any(v)})


def _matvec(M, v, p):
    return tuple(sum(M[i][j] * v[j] for j in range(len(v))) % p for i in range(len(M)))


def _primitive_root(p: int) -> int:
    for w in range(1, p):
        if len({pow(w, k, p) for k in range(1, p)}) == p - 1:
            return w
    raise NonPrime(p)


def _generator_matrices(n: int, p: int):
    """Elementary transvections plus one diagonal matrix; together they generate GL_n(p)."""
    mats = []
    for i in range(n):
        for j in range(n):
            if i != j:
                M = [[int(a == b) for b in range(n)] for a in range(n)]
                M[i][j] = 1
                mats.append(M)
    if p > 2:
        D = [[int(a == b) for b in range(n)] for a in range(n)]
        D[0][0] = _primitive_root(p)
        mats.append(D)
    return mats


def _inverse_transpose(M, p):
    n = len(M)
    a = [list(M[i]) + [int(i == j) for j in range(n)] for i in range(n)]
    for c in range(n):
        r = next(r for r in range(c, n) if a[r][c] % p)
        a[c], a[r] = a[r], a[c]
        s = pow(a[c][c], -1, p)
        a[c] = [x * s % p for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[c])]
    inv = [row[n:] for row in a]
    return [[inv[j][i] for j in range(n)] for i in range(n)]


def projective_geometry(spec: ProjectiveSpec) -> tuple[DGeometry, GSTriple]:
    """Points and hyperplanes of PG(n-1, p) with PGL_n(p) acting on both."""
    n, p = spec.n, spec.p
    order = pgl_order(n, p)
    if order > element_cap():
        raise CapExceeded(f"|PGL_{n}({p})| = {order} exceeds the cap")
    pts = _projective_points(n, p)
    index = {v: i for i, v in enumerate(pts)}
    mu = len(pts)
    # hyperplanes use the same normalised vectors as dual coordinates
    incident = [(i, j) for i, x in enumerate(pts) for j, a in enumerate(pts) if sum(u * w for u, w in zip(x, a)) % p == 0]
    geometry = IncidenceGeometry(mu, mu, incident)
    gens = []
    for M in _generator_matrices(n, p):
        Mt = _inverse_transpose(M, p)
        on_points = [index[_normalize(_matvec(M, x, p), p)] for x in pts]
        on_hyper = [mu + index[_normalize(_matvec(Mt, a, p), p)] for a in pts]
        gens.append(on_points + on_hyper)
    G = PermGroup(2 * mu, gens, name=f"PGL({n},{p})")
    dg = DGeometry.natural(geometry, G, name=f"PG({n - 1},{p})")
    t = triple_from_geometry(dg)
    return dg, t


# --- quadratic-form designs --------------------------------------------------


@dataclass(frozen=True)
class QuadraticDesignSpec:
    m: int
    form_type: str  # "hyperbolic" or "elliptic"

    def __post_init__(self):
        if self.form_type not in ("hyperbolic", "elliptic"):
            raise ValueError(f"unknown form type {self.form_type!r}")
        if self.m < 2:
            raise DegenerateParameters("need m >= 2")

    @property
    def epsilon(self) -> int:
        return -1 if self.form_type == "hyperbolic" else 1

    @property
    def parameters(self) -> tuple[int, int, int]:
        m, e = self.m, self.epsilon
        return 2 ** (2 * m), 2 ** (2 * m - 1) + e * 2 ** (m - 1), 2 ** (2 * m - 2) + e * 2 ** (m - 1)


def quadratic_form(spec: QuadraticDesignSpec):
    """q(v) on F_2^{2m}, vectors encoded as ints with bit i = coordinate x_{i+1}."""
    m = spec.m

    def q(v: int) -> int:
        x = [(v >> i) & 1 for i in range(2 * m)]
        val = sum(x[2 * i] * x[2 * i + 1] for i in range(m))
        if spec.form_type == "elliptic":
            val += x[0] + x[1]  # x1^2 + x2^2 over F_2
        return val % 2

    return q


def _orthogonal_maps(spec: QuadraticDesignSpec) -> list[tuple[int, ...]]:
    """All linear maps preserving q, as images of the basis vectors (backtracking)."""
    dim = 2 * spec.m
    q = quadratic_form(spec)
    size = 1 << dim

    def bil(u: int, v: int) -> int:
        return q(u ^ v) ^ q(u) ^ q(v)

    basis = [1 << i for i in range(dim)]
    found = []

    def rec(chosen: list[int]):
        k = len(chosen)
        if k == dim:
            found.append(tuple(chosen))
            return
        for w in range(1, size):
            if q(w) != q(basis[k]):
                continue
            if all(bil(w, chosen[j]) == bil(basis[k], basis[j]) for j in range(k)):
                chosen.append(w)
                rec(chosen)
                chosen.pop()

    rec([])
    return found


def _apply_linear(images: Sequence[int], v: int) -> int:
    out = 0
    i = 0
    while v:
        if v & 1:
            out ^= images[i]
        v >>= 1
        i += 1
    return out


def quadratic_design(spec: QuadraticDesignSpec, orthogonal: bool = False) -> DGeometry:
    """Points F_2^{2m}, blocks the translates a + D of D = {v : q(v) = 1}."""
    v = 2 ** (2 * spec.m)
    if 2 * v > element_cap():
        raise CapExceeded(f"{v} points exceed the cap")
    q = quadratic_form(spec)
    D = [x for x in range(v) if q(x) == 1]
    incident = [(a ^ d, a) for a in range(v) for d in D]
    geometry = IncidenceGeometry(v, v, incident)
    gens = []
    for i in range(2 * spec.m):
        t = 1 << i
        gens.append(tuple([x ^ t for x in range(v)] + [v + (a ^ t) for a in range(v)]))
    if orthogonal:
        # x -> Mx maps a + D to Ma + D since M preserves D
        span = closure(2 * v, gens)
        for images in _orthogonal_maps(spec):
            img = [_apply_linear(images, x) for x in range(v)]
            g = tuple(img + [v + y for y in img])
            if g not in span:
                gens.append(g)
                span = closure(2 * v, gens)
    G = PermGroup(2 * v, gens, name=f"translations{'+O' if orthogonal else ''}")
    dg = DGeometry.natural(geometry, G, name=f"S{'+' if spec.epsilon > 0 else '-'}({2 * spec.m})")
    if is_symmetric_design(geometry) != spec.parameters:
        raise AssertionError(f"design parameters {is_symmetric_design(geometry)} != {spec.parameters}")
    return dg


# --- polygons -----------------------------------------------------------------


def dihedral_geometry(n: int) -> DGeometry:
    """Vertices and sides of an n-gon; point i lies on lines i and i+1 (mod n)."""
    if n < 3:
        raise ValueError("need n >= 3")
    incident = [(i, i) for i in range(n)] + [(i, (i + 1) % n) for i in range(n)]
    geometry = IncidenceGeometry(n, n, incident)
    # line j = {j - 1, j}
    rot = [(i + 1) % n for i in range(n)] + [n + (j + 1) % n for j in range(n)]
    ref = [(-i) % n for i in range(n)] + [n + (1 - j) % n for j in range(n)]
    G = PermGroup(2 * n, [rot, ref], name=f"D{n}")
    return DGeometry.natural(geometry, G, name=f"{n}-gon")


def cyclic_geometry(n: int) -> DGeometry:
    """The n-gon with rotations only."""
    dg = dihedral_geometry(n)
    G = PermGroup(2 * n, [dg.group.generators[0]], name=f"C{n}")
    return DGeometry.natural(dg.geometry, G, name=dg.name)


# --- wreath products -----------------------------------------------------------


@dataclass
class WreathSpec:
    base: GSTriple
    copies: int
    top: PermGroup

    def __post_init__(self):
        if self.copies < 2:
            raise ValueError("need at least two copies")
        if self.top.degree != self.copies:
            raise ValueError("top group must act on the copies")
        if not _transitive(self.top):
            raise ValueError("top group must be transitive")


def _transitive(T: PermGroup) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for g in T.generators:
            if g[x] not in seen:
                seen.add(g[x])
                stack.append(g[x])
    return len(seen) == T.degree


def wreath_triple(spec: WreathSpec) -> GSTriple:
    """(A wr T, A_x wr T, A_L wr T) on copies x d points, d = [A:A_x] + [A:A_L]."""
    t = spec.base
    A = t.group
    a = _coset_action(A, t.left)
    b = _coset_action(A, t.right)
    d = a.degree + b.degree

    def base_image(g):
        return a.perm(g) + tuple(a.degree + x for x in b.perm(g))

    n = spec.copies
    order = A.order**n * spec.top.order
    if order > element_cap():
        raise CapExceeded(f"|A wr T| = {order} exceeds the cap")

    def on_block0(g):
        img = base_image(g)
        return list(img) + list(range(d, n * d))

    def top_image(s):
        return [s[i // d] * d + i % d for i in range(n * d)]

    tops = [top_image(s) for s in spec.top.generators]
    W = PermGroup(n * d, [on_block0(g) for g in A.generators] + tops, name=f"{A.name or 'A'} wr T")
    Ux = Subgroup(W, [on_block0(g) for g in t.left.generators] + tops)
    UL = Subgroup(W, [on_block0(g) for g in t.right.generators] + tops)
    if W.order != order:
        raise AssertionError(f"|A wr T| = {W.order}, expected {order}; is the base triple FF?")
    if Ux.order != t.left.order**n * spec.top.order or UL.order != t.right.order**n * spec.top.order:
        raise AssertionError("subgroup orders do not match |H|^n |T|")
    return GSTriple(W, Ux, UL, name=f"{t.name or 'base'} wr T")


def symmetric_group(n: int) -> PermGroup:
    if n == 1:
        return PermGroup(1, [(0,)], name="S1")
    if n == 2:
        return PermGroup(2, [(1, 0)], name="S2")
    cycle = tuple(list(range(1, n)) + [0])
    swap = (1, 0) + tuple(range(2, n))
    return PermGroup(n, [cycle, swap], name=f"S{n}")


# --- planar domains -------------------------------------------------------------

Point = tuple[Fraction, Fraction]


class TileDomain:
    """A planar domain given as a union of triangles with exact rational vertices."""

    def __init__(self, triangles: Sequence[Sequence[Sequence]], name: str | None = None):
        tris = []
        for t in triangles:
            if len(t) != 3:
                raise ValueError("triangles need three vertices")
            tris.append(tuple((Fraction(x), Fraction(y)) for x, y in t))
        self.triangles: tuple[tuple[Point, Point, Point], ...] = tuple(tris)
        self.name = name
        for t in self.triangles:
            if triangle_area(t) == 0:
                raise ValueError(f"degenerate triangle {t}")

    def __repr__(self) -> str:
        return f"<TileDomain {self.name or ''} {len(self.triangles)} tiles>"

    @property
    def area(self) -> Fraction:
        return sum((triangle_area(t) for t in self.triangles), Fraction(0))

    def edges(self) -> dict[frozenset, int]:
        """Tile edges with the number of tiles containing each."""
        out: dict[frozenset, int] = {}
        for t in self.triangles:
            for u, v in itertools.combinations(t, 2):
                e = frozenset((u, v))
                out[e] = out.get(e, 0) + 1
        return out

    def boundary_edges(self) -> list[tuple[Point, Point]]:
        return [tuple(sorted(e)) for e, c in self.edges().items() if c == 1]

    def perimeter_squared_terms(self) -> dict[Fraction, int]:
        """Boundary length as a multiset of squared edge lengths (exact)."""
        out: dict[Fraction, int] = {}
        for u, v in self.boundary_edges():
            L2 = (u[0] - v[0]) ** 2 + (u[1] - v[1]) ** 2
            out[L2] = out.get(L2, 0) + 1
        return out

    @property
    def perimeter(self) -> float:
        return float(sum(c * float(L2) ** 0.5 for L2, c in self.perimeter_squared_terms().items()))

    def adjacency(self) -> list[tuple[int, int]]:
        """Pairs of tiles sharing a full edge."""
        owner: dict[frozenset, list[int]] = {}
        for i, t in enumerate(self.triangles):
            for u, v in itertools.combinations(t, 2):
                owner.setdefault(frozenset((u, v)), []).append(i)
        return sorted(tuple(v) for v in owner.values() if len(v) == 2)

    def transformed(self, f) -> TileDomain:
        return TileDomain([[f(*v) for v in t] for t in self.triangles], name=self.name)

    def to_json(self) -> dict:
        tris = [[[x.numerator, x.denominator, y.numerator, y.denominator] for x, y in t] for t in self.triangles]
        doc = {"triangles": tris}
        if self.name:
            doc["name"] = self.name
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> TileDomain:
        tris = [[(Fraction(xn, xd), Fraction(yn, yd)) for xn, xd, yn, yd in t] for t in doc["triangles"]]
        return cls(tris, name=doc.get("name"))


def triangle_area(t) -> Fraction:
    (x1, y1), (x2, y2), (x3, y3) = t
    return abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)) / 2


def gww_domains() -> tuple[TileDomain, TileDomain]:
    """The Gordon-Webb-Wolpert pair, seven half-squares each."""
    out = []
    for name in ("gww_a", "gww_b"):
        text = resources.files("drumgeom").joinpath("data", f"{name}.json").read_text()
        out.append(TileDomain.from_json(json.loads(text)))
    return out[0], out[1]


_LATTICE_ISOMETRIES = [
    lambda x, y: (x, y),
    lambda x, y: (-x, y),
    lambda x, y: (x, -y),
    lambda x, y: (-x, -y),
    lambda x, y: (y, x),
    lambda x, y: (-y, x),
    lambda x, y: (y, -x),
    lambda x, y: (-y, -x),
]


def _centroid(d: TileDomain) -> Point:
    A = d.area
    cx = sum(triangle_area(t) * sum(v[0] for v in t) / 3 for t in d.triangles) / A
    cy = sum(triangle_area(t) * sum(v[1] for v in t) / 3 for t in d.triangles) / A
    return cx, cy


def _outline(d: TileDomain) -> frozenset:
    """Boundary as maximal straight segments, independent of the triangulation."""
    edges = {frozenset(e) for e in d.boundary_edges()}
    merged = True
    while merged:
        merged = False
        at: dict[Point, list[frozenset]] = {}
        for e in edges:
            for v in e:
                at.setdefault(v, []).append(e)
        for v, es in at.items():
            if len(es) != 2:
                continue
            (u,) = es[0] - {v}
            (w,) = es[1] - {v}
            if (v[0] - u[0]) * (w[1] - v[1]) == (v[1] - u[1]) * (w[0] - v[0]):
                edges -= set(es)
                edges.add(frozenset((u, w)))
                merged = True
                break
    return frozenset(edges)


def congruent(a: TileDomain, b: TileDomain) -> bool:
    """Is there a lattice isometry, aligning area centroids, that carries a's outline onto b's?"""
    target = _outline(b)
    cb = _centroid(b)
    for f in _LATTICE_ISOMETRIES:
        moved = a.transformed(f)
        ca = _centroid(moved)
        dx, dy = cb[0] - ca[0], cb[1] - ca[1]
        outline = frozenset(frozenset((x + dx, y + dy) for x, y in e) for e in _outline(moved))
        if outline == target:
            return True
    return False


def rectangle_domain(width, height) -> TileDomain:
    """An axis-parallel rectangle split along one diagonal."""
    w, h = Fraction(width), Fraction(height)
    z = Fraction(0)
    return TileDomain([[(z, z), (w, z), (w, h)], [(z, z), (w, h), (z, h)]], name=f"{w}x{h} rectangle")
