import corpus
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drumgeom.gallery import symmetric_group
from drumgeom.geom import triple_from_geometry
from drumgeom.gstriple import (
    GSTriple,
    IsoResult,
    are_isomorphic,
    check_ac,
    check_conjugate,
    check_ec,
    check_flags,
    permutation_character,
    reduce_ff,
)
from drumgeom.permcore import (
    PermGroup,
    Subgroup,
    conj,
    coset_action,
    fixed_points,
    from_cycles,
    mul,
    perm_order,
)

S4 = symmetric_group(4)
S4_ELEMENTS = S4.sorted_elements


def c4_c2():
    c, d = from_cycles(6, (0, 1, 2, 3)), from_cycles(6, (4, 5))
    return PermGroup(6, [c, d], name="C4xC2"), c, d


def brute_ac(t):
    for r in t.group.class_reps:
        cls = {conj(r, g) for g in t.group.elements}
        if len(cls & t.left.elements) != len(cls & t.right.elements):
            return False
    return True


class TestAC:
    def test_same_subgroup(self):
        t = corpus.fano()[1]
        assert check_ac(GSTriple(t.group, t.left, t.left))
        assert check_ec(GSTriple(t.group, t.left, t.left))
        assert check_conjugate(GSTriple(t.group, t.left, t.left))

    def test_a4_not_ac(self):
        v = check_ac(corpus.a4_ec())
        assert not v.holds
        assert v.detail["class_rep"] == list(from_cycles(4, (0, 1), (2, 3)))
        assert (v.detail["left"], v.detail["right"]) == (1, 3)

    def test_a4_ec(self):
        assert check_ec(corpus.a4_ec()).holds

    def test_fano(self):
        t = corpus.fano()[1]
        assert check_ac(t).holds
        assert not check_conjugate(t)

    def test_s3_not_ec(self):
        v = check_ec(corpus.s3_control())
        assert not v.holds
        assert perm_order(tuple(v.detail["class_rep"])) == 2

    def test_pentagon_conjugate(self):
        assert check_conjugate(corpus.triple("pentagon"))

    @pytest.mark.parametrize("name", corpus.SMALL)
    def test_against_brute_force(self, name):
        t = corpus.triple(name)
        assert check_ac(t).holds == brute_ac(t)


class TestFlags:
    def test_fano(self):
        f = check_flags(corpus.fano()[1])
        assert (f.ec, f.ac, f.ff, f.max, f.pair, f.conjugate) == (True, True, True, True, True, False)
        assert set(f.to_json()) == {"ec", "ac", "ff", "max", "pair", "conjugate", "witnesses"}

    def test_a4_pair_fails(self):
        f = check_flags(corpus.a4_ec())
        assert not f.pair
        assert "2" in f.witnesses["pair"] and "4" in f.witnesses["pair"]

    def test_c4_not_ff(self):
        C = PermGroup(4, [(1, 2, 3, 0)])
        sq = Subgroup(C, [(2, 3, 0, 1)])
        f = check_flags(GSTriple(C, sq, sq))
        assert not f.ff
        assert "order 2" in f.witnesses["ff"]

    @pytest.mark.parametrize("name", corpus.SMALL)
    def test_every_witness_present(self, name):
        f = check_flags(corpus.triple(name))
        assert all(f.witnesses[k] for k in ("ec", "ac", "ff", "max", "pair", "conjugate"))

    @pytest.mark.parametrize("name", corpus.SMALL)
    def test_swap_invariance(self, name):
        t = corpus.triple(name)
        a, b = check_flags(t).to_json(), check_flags(t.swapped()).to_json()
        a.pop("witnesses"), b.pop("witnesses")
        assert a == b

    @pytest.mark.parametrize("name", corpus.SMALL)
    def test_ac_implies_ec_and_pair(self, name):
        t = corpus.triple(name)
        if check_ac(t):
            assert check_ec(t)
            assert t.left.order == t.right.order


class TestCharacters:
    @pytest.mark.parametrize("name", corpus.SMALL)
    def test_ac_iff_equal_characters(self, name):
        t = corpus.triple(name)
        a, b = permutation_character(t)
        assert check_ac(t).holds == (a == b)

    def test_character_is_fixed_point_count(self):
        t = corpus.fano()[1]
        a, _ = permutation_character(t)
        act = coset_action(t.group, t.left)
        assert a == [fixed_points(act, r) for r in t.group.class_reps]


class TestReduce:
    def test_faithful_unchanged(self):
        t = corpus.fano()[1]
        r = reduce_ff(t)
        assert r.group.order == 168
        assert check_flags(r).to_json()["ac"]
        assert are_isomorphic(t, r) == IsoResult.YES

    def test_order_drops(self):
        G, c, _ = c4_c2()
        U = Subgroup(G, [c])
        t = GSTriple(G, U, U)
        assert not check_flags(t).ff
        r = reduce_ff(t)
        assert r.group.order < G.order
        assert check_flags(r).ff

    def test_shared_normal_part(self):
        G, c, d = c4_c2()
        sq = mul(c, c)
        t = GSTriple(G, Subgroup(G, [sq, d]), Subgroup(G, [sq, mul(c, d)]))
        r = reduce_ff(t)
        assert r.group.order == 4
        assert check_flags(r).ff
        assert check_ac(r).holds == check_ac(t).holds
        assert check_ec(r).holds == check_ec(t).holds

    @pytest.mark.parametrize("name", ["fano", "square", "a4-ec", "pentagon"])
    def test_idempotent(self, name):
        once = reduce_ff(corpus.triple(name))
        twice = reduce_ff(once)
        assert twice.group.order == once.group.order
        assert are_isomorphic(once, twice) == IsoResult.YES


class TestIsomorphism:
    def test_self(self):
        t = corpus.fano()[1]
        assert are_isomorphic(t, t) == IsoResult.YES

    def test_other_flag(self):
        dg, t = corpus.fano()
        x = 4
        other = triple_from_geometry(dg, x, max(dg.geometry.lines_on[x]))
        assert are_isomorphic(t, other) == IsoResult.YES

    def test_order_mismatch(self):
        assert are_isomorphic(corpus.fano()[1], corpus.triple("pentagon")) == IsoResult.NO

    def test_same_group_different_subgroups(self):
        t = corpus.triple("square")
        assert are_isomorphic(t, GSTriple(t.group, t.left, t.left)) == IsoResult.NO

    def test_budget(self):
        t = corpus.fano()[1]
        assert are_isomorphic(t, t, budget=0) in (IsoResult.YES, IsoResult.UNDECIDED)


subgroup_gens = st.lists(st.sampled_from(S4_ELEMENTS), min_size=1, max_size=2)


@settings(max_examples=60, deadline=None)
@given(subgroup_gens, subgroup_gens)
def test_random_s4_triples(ug, vg):
    t = GSTriple(S4, Subgroup(S4, ug), Subgroup(S4, vg))
    ac, ec = check_ac(t).holds, check_ec(t).holds
    assert ac == brute_ac(t)
    a, b = permutation_character(t)
    assert ac == (a == b)
    if ac:
        assert ec and t.left.order == t.right.order
    r = reduce_ff(t)
    assert check_ac(r).holds == ac
    assert check_ec(r).holds == ec
    if check_conjugate(t):
        assert ac
