"""Gassmann-Sunada triples: almost/elementwise conjugacy, FF/MAX/PAIR, reduction, isomorphism."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Any

from .permcore import (
    CosetAction,
    Perm,
    PermGroup,
    Subgroup,
    as_subgroup,
    class_intersection_sizes,
    closure,
    core,
    is_conjugate,
    is_primitive,
    mul,
    perm_order,
)

ISO_BUDGET = 10**6


@dataclass
class Verdict:
    """Outcome of an exact check; false results carry a witness."""

    holds: bool
    witness: str | None = None
    detail: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.holds


class GSTriple:
    """(G, U, V) with U and V subgroups of G.  ``left``/``right`` are U/V."""

    def __init__(self, group: PermGroup, left: PermGroup, right: PermGroup, name: str | None = None):
        self.group = group
        self.left = as_subgroup(group, left)
        self.right = as_subgroup(group, right)
        self.name = name

    def __repr__(self) -> str:
        return f"<GSTriple {self.name or ''} |G|={self.group.order} |U|={self.left.order} |V|={self.right.order}>"

    def swapped(self) -> GSTriple:
        return GSTriple(self.group, self.right, self.left, name=self.name)

    @property
    def left_action(self) -> CosetAction:
        return _coset_action(self.group, self.left)

    @property
    def right_action(self) -> CosetAction:
        return _coset_action(self.group, self.right)


def _coset_action(G: PermGroup, H: Subgroup) -> CosetAction:
    # cached on the subgroup object; subgroups are immutable once built
    cache = H.__dict__.setdefault("_coset_actions", {})
    key = id(G)
    if key not in cache:
        cache[key] = CosetAction(G, H)
    return cache[key]


def _fmt(g: Perm) -> str:
    return str(list(g))


def check_ac(t: GSTriple) -> Verdict:
    G = t.group
    a = class_intersection_sizes(G, t.left)
    b = class_intersection_sizes(G, t.right)
    for i, (x, y) in enumerate(zip(a, b)):
        if x != y:
            rep = G.class_reps[i]
            return Verdict(
                False,
                f"class of {_fmt(rep)} (size {len(G.conjugacy_classes[i])}) meets U in {x} and V in {y} elements",
                {"class_rep": list(rep), "left": x, "right": y},
            )
    return Verdict(True, None, {"classes_checked": len(a)})


def check_ec(t: GSTriple) -> Verdict:
    G = t.group
    a = class_intersection_sizes(G, t.left)
    b = class_intersection_sizes(G, t.right)
    for i, (x, y) in enumerate(zip(a, b)):
        if bool(x) != bool(y):
            rep = G.class_reps[i]
            side = "U" if x else "V"
            return Verdict(
                False,
                f"class of {_fmt(rep)} meets only {side}",
                {"class_rep": list(rep), "left": x, "right": y},
            )
    return Verdict(True, None, {"classes_checked": len(a)})


def check_conjugate(t: GSTriple) -> bool:
    return is_conjugate(t.group, t.left, t.right, _coset_action(t.group, t.right))


@dataclass
class FlagReport:
    ec: bool
    ac: bool
    ff: bool
    max: bool
    pair: bool
    conjugate: bool
    witnesses: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "ec": self.ec,
            "ac": self.ac,
            "ff": self.ff,
            "max": self.max,
            "pair": self.pair,
            "conjugate": self.conjugate,
            "witnesses": dict(sorted(self.witnesses.items())),
        }


def _is_maximal(G: PermGroup, H: Subgroup) -> tuple[bool, str]:
    if H.order == G.order:
        return False, "subgroup is the whole group"
    action = _coset_action(G, H)
    if is_primitive(action):
        return True, f"action on {action.degree} cosets is primitive"
    return False, f"action on {action.degree} cosets has a nontrivial block system"


def check_flags(t: GSTriple) -> FlagReport:
    G = t.group
    w: dict[str, str] = {}
    ec = check_ec(t)
    ac = check_ac(t)
    n_cls = len(G.conjugacy_classes)
    w["ec"] = ec.witness or f"all {n_cls} classes checked"
    w["ac"] = ac.witness or f"all {n_cls} classes checked"

    common = core(G, t.left).elements & core(G, t.right).elements
    ff = len(common) == 1
    if ff:
        w["ff"] = "core(U) ∩ core(V) is trivial"
    else:
        gens = Subgroup.from_elements(G, common).generators
        w["ff"] = f"normal subgroup of order {len(common)} generated by {[list(g) for g in gens]} lies in U ∩ V"

    mu, why_u = _is_maximal(G, t.left)
    mv, why_v = _is_maximal(G, t.right)
    w["max"] = f"U: {why_u}; V: {why_v}"

    pair = t.left.order == t.right.order
    w["pair"] = f"|U| = {t.left.order}, |V| = {t.right.order}"

    conjugate = check_conjugate(t)
    w["conjugate"] = (
        f"exhaustive over {_coset_action(G, t.right).degree} coset representatives of V"
    )
    return FlagReport(ec.holds, ac.holds, ff, mu and mv, pair, conjugate, w)


def reduce_ff(t: GSTriple) -> GSTriple:
    """Replace G by its faithful image on G/U ⊔ G/V; U and V by their images."""
    G = t.group
    a = _coset_action(G, t.left)
    b = _coset_action(G, t.right)
    n = a.degree

    def image(g: Perm) -> Perm:
        return a.perm(g) + tuple(n + x for x in b.perm(g))

    degree = n + b.degree
    H = PermGroup(degree, [image(g) for g in G.generators], name=G.name)
    if not H.generators:
        H = PermGroup(degree, [tuple(range(degree))], name=G.name)
    U = Subgroup(H, [image(g) for g in t.left.generators] or [H.identity])
    V = Subgroup(H, [image(g) for g in t.right.generators] or [H.identity])
    return GSTriple(H, U, V, name=t.name)


# --- isomorphism ------------------------------------------------------------


class IsoResult(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


def small_generating_set(G: PermGroup, seed: int = 0, tries: int = 2000) -> list[Perm]:
    """Two generators if a seeded random search finds them, else the given ones."""
    gens = list(dict.fromkeys(g for g in G.generators if g != G.identity))
    if len(gens) <= 2:
        return gens
    rng = random.Random(seed)
    els = G.sorted_elements
    order = G.order
    for _ in range(tries):
        x, y = rng.choice(els), rng.choice(els)
        if len(closure(G.degree, [x, y])) == order:
            return [x, y]
    return gens


def _extend_hom(G1: PermGroup, gens: list[Perm], images: list[Perm], G2: PermGroup) -> dict[Perm, Perm] | None:
    """Map gens -> images as a homomorphism; None unless well defined and bijective onto G2."""
    hom = {G1.identity: G2.identity}
    frontier = [G1.identity]
    while frontier:
        nxt = []
        for e in frontier:
            fe = hom[e]
            for s, fs in zip(gens, images):
                x = mul(s, e)
                fx = mul(fs, fe)
                have = hom.get(x)
                if have is None:
                    hom[x] = fx
                    nxt.append(x)
                elif have != fx:
                    return None
        frontier = nxt
    if len(hom) != G1.order or len(set(hom.values())) != G2.order:
        return None
    return hom


def are_isomorphic(t1: GSTriple, t2: GSTriple, budget: int = ISO_BUDGET) -> IsoResult:
    G1, G2 = t1.group, t2.group
    if (G1.order, t1.left.order, t1.right.order) != (G2.order, t2.left.order, t2.right.order):
        return IsoResult.NO
    if sorted(map(len, G1.conjugacy_classes)) != sorted(map(len, G2.conjugacy_classes)):
        return IsoResult.NO

    gens = small_generating_set(G1)
    if not gens:
        # trivial groups
        return IsoResult.YES

    def signature(G: PermGroup, g: Perm) -> tuple[int, int]:
        return perm_order(g), len(G.class_of(g))

    by_sig: dict[tuple[int, int], list[Perm]] = {}
    for g in G2.sorted_elements:
        by_sig.setdefault(signature(G2, g), []).append(g)
    # composing with an inner automorphism of G2 preserves conjugacy of the images,
    # so the first generator may be sent to a class representative
    reps2 = set(G2.class_reps)
    candidates = []
    for k, s in enumerate(gens):
        pool = by_sig.get(signature(G1, s), [])
        if k == 0:
            pool = [g for g in pool if g in reps2]
        candidates.append(pool)
    if any(not c for c in candidates):
        return IsoResult.NO

    pair_orders = {(i, j): perm_order(mul(gens[i], gens[j])) for i in range(len(gens)) for j in range(i)}
    act_u = _coset_action(G2, t2.left)
    act_v = _coset_action(G2, t2.right)
    tried = 0

    def search(k: int, chosen: list[Perm]):
        nonlocal tried
        if k == len(gens):
            tried += 1
            if tried > budget:
                raise _BudgetExhausted
            hom = _extend_hom(G1, gens, chosen, G2)
            if hom is None:
                return False
            U = Subgroup(G2, [hom[g] for g in t1.left.generators] or [G2.identity])
            V = Subgroup(G2, [hom[g] for g in t1.right.generators] or [G2.identity])
            return is_conjugate(G2, U, t2.left, act_u) and is_conjugate(G2, V, t2.right, act_v)
        for c in candidates[k]:
            if all(perm_order(mul(c, chosen[j])) == pair_orders[(k, j)] for j in range(k)):
                chosen.append(c)
                if search(k + 1, chosen):
                    return True
                chosen.pop()
                if tried > budget:
                    raise _BudgetExhausted
        return False

    try:
        return IsoResult.YES if search(0, []) else IsoResult.NO
    except _BudgetExhausted:
        return IsoResult.UNDECIDED


class _BudgetExhausted(Exception):
    pass


def permutation_character(t: GSTriple) -> tuple[list[int], list[int]]:
    """Fixed-point counts of each class representative on G/U and on G/V."""
    a, b = t.left_action, t.right_action
    reps = t.group.class_reps
    return (
        [sum(1 for i, j in enumerate(a.perm(g)) if i == j) for g in reps],
        [sum(1 for i, j in enumerate(b.perm(g)) if i == j) for g in reps],
    )
