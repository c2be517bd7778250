from fractions import Fraction

import corpus
import pytest

from drumgeom.gallery import (
    DegenerateParameters,
    NonPrime,
    ProjectiveSpec,
    QuadraticDesignSpec,
    TileDomain,
    WreathSpec,
    congruent,
    gww_domains,
    pgl_order,
    projective_geometry,
    quadratic_form,
    rectangle_domain,
    symmetric_group,
    wreath_triple,
)
from drumgeom.geom import (
    DGeometry,
    automorphism_group,
    is_symmetric_design,
    triple_from_geometry,
    verify_D,
    verify_SD,
)
from drumgeom.gstriple import GSTriple, check_ac, check_flags
from drumgeom.permcore import CapExceeded, PermGroup, Subgroup


class TestProjective:
    @pytest.mark.parametrize("n,p,points,order", [(3, 2, 7, 168), (3, 3, 13, 5616), (4, 2, 15, 20160)])
    def test_sizes(self, n, p, points, order):
        dg, t = corpus.projective(n, p)
        assert dg.geometry.num_points == dg.geometry.num_lines == points
        assert t.group.order == order == pgl_order(n, p)

    @pytest.mark.parametrize("n,p", [(3, 2), (3, 3), (4, 2)])
    def test_facts(self, n, p):
        dg, _ = corpus.projective(n, p)
        assert dg.is_transitive()
        assert verify_D(dg) and verify_SD(dg)

    def test_fano_flags(self):
        f = check_flags(corpus.fano()[1])
        assert f.ff and f.max and f.pair

    def test_non_prime(self):
        with pytest.raises(NonPrime):
            projective_geometry(ProjectiveSpec(3, 4))

    def test_cap(self, monkeypatch):
        monkeypatch.setenv("DRUMGEOM_CAP", "100")
        with pytest.raises(CapExceeded):
            projective_geometry(ProjectiveSpec(3, 2))


class TestDesigns:
    @pytest.mark.parametrize("form,params", [("elliptic", (16, 10, 6)), ("hyperbolic", (16, 6, 2))])
    def test_parameters(self, form, params):
        spec = QuadraticDesignSpec(2, form)
        assert spec.parameters == params
        q = quadratic_form(spec)
        assert sum(q(v) for v in range(16)) == params[1]
        assert is_symmetric_design(corpus.design(form, False)[0].geometry) == params

    def test_epsilon(self):
        assert QuadraticDesignSpec(2, "hyperbolic").epsilon == -1
        assert QuadraticDesignSpec(2, "elliptic").epsilon == 1

    @pytest.mark.parametrize("form", ["elliptic", "hyperbolic"])
    def test_translations_sd(self, form):
        dg = corpus.design(form, False)[0]
        assert dg.group.order == 16
        assert verify_SD(dg)

    def test_degenerate(self):
        with pytest.raises(DegenerateParameters):
            QuadraticDesignSpec(1, "hyperbolic")
        with pytest.raises(ValueError):
            QuadraticDesignSpec(2, "parabolic")

    @pytest.mark.parametrize("form", ["elliptic", "hyperbolic"])
    def test_full_automorphism_group_flags(self, form):
        dg = corpus.design(form)[0]
        aut = automorphism_group(dg.geometry)
        assert aut.order == 11520
        t = triple_from_geometry(DGeometry.natural(dg.geometry, aut))
        f = check_flags(t)
        assert f.ac and f.ff and f.max and f.pair


class TestPolygons:
    def test_pentagon(self):
        dg, t = corpus.polygon(5)
        assert verify_SD(dg)
        assert check_ac(t) and check_flags(t).conjugate

    def test_square(self):
        dg = corpus.polygon(4)[0]
        assert not verify_SD(dg) and not verify_D(dg)

    def test_triangle(self):
        assert verify_SD(corpus.polygon(3)[0])


class TestWreath:
    def test_s3_order(self):
        S3 = symmetric_group(3)
        base = GSTriple(S3, Subgroup(S3, [(1, 0, 2)]), Subgroup(S3, [(0, 2, 1)]))
        w = wreath_triple(WreathSpec(base, 2, symmetric_group(2)))
        assert w.group.order == 6**2 * 2

    def test_cyclic_top(self):
        _, t = corpus.polygon(3)
        C3 = PermGroup(3, [(1, 2, 0)])
        w = wreath_triple(WreathSpec(t, 3, C3))
        assert w.group.order == 6**3 * 3
        assert check_ac(w)

    def test_intransitive_top(self):
        with pytest.raises(ValueError):
            WreathSpec(corpus.polygon(3)[1], 2, PermGroup(2, [(0, 1)]))

    def test_cap(self, monkeypatch):
        monkeypatch.setenv("DRUMGEOM_CAP", "1000")
        with pytest.raises(CapExceeded):
            wreath_triple(WreathSpec(corpus.fano()[1], 2, symmetric_group(2)))

    @pytest.mark.slow
    def test_fano_wreath(self):
        w = corpus.wreath()
        assert w.group.order == 56448
        assert w.group.order // w.left.order == 49
        f = check_flags(w)
        assert (f.ec, f.ac, f.ff, f.max, f.pair, f.conjugate) == (True, True, True, True, True, False)


def is_tree(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return len(edges) == n - 1


class TestDomains:
    def test_gww_area(self):
        a, b = gww_domains()
        assert a.area == b.area == Fraction(7, 2)
        assert len(a.triangles) == len(b.triangles) == 7

    def test_gww_perimeter(self):
        a, b = gww_domains()
        assert a.perimeter_squared_terms() == b.perimeter_squared_terms()

    def test_gww_trees(self):
        for d in gww_domains():
            assert is_tree(7, d.adjacency())

    def test_gww_not_congruent(self):
        a, b = gww_domains()
        assert not congruent(a, b)
        assert congruent(a, a.transformed(lambda x, y: (5 - y, x + 2)))

    def test_congruence_ignores_triangulation(self):
        r = rectangle_domain(2, 1)
        other = TileDomain([[(0, 0), (2, 0), (0, 1)], [(2, 0), (2, 1), (0, 1)]])
        assert congruent(r, other)
        assert congruent(r, rectangle_domain(1, 2))
        assert not congruent(r, rectangle_domain(1, 1))

    def test_json(self):
        a = gww_domains()[0]
        b = TileDomain.from_json(a.to_json())
        assert b.triangles == a.triangles

    def test_degenerate_tile(self):
        with pytest.raises(ValueError):
            TileDomain([[(0, 0), (1, 1), (2, 2)]])
