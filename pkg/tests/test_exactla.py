from fractions import Fraction

import corpus
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drumgeom.exactla import (
    ExactMatrix,
    IndexMismatch,
    NotSquare,
    coefficient_sweep,
    cofactor_determinant,
    determinant,
    find_invertible_intertwiner,
    intertwiner_space,
    intertwines,
    nullspace,
    rank,
)
from drumgeom.geom import build_drum_geometry, incidence_matrix
from drumgeom.gstriple import GSTriple, check_ac
from drumgeom.permcore import CapExceeded, coset_action, fixed_points


def orbit_count(t):
    # orbits of G on G/U x G/V, by Burnside; equals the intertwiner dimension
    a, b = coset_action(t.group, t.left), coset_action(t.group, t.right)
    total = sum(fixed_points(a, g) * fixed_points(b, g) for g in t.group.elements)
    assert total % t.group.order == 0
    return total // t.group.order


class TestMatrix:
    def test_identity_det(self):
        for n in range(1, 6):
            assert determinant(ExactMatrix.identity(n)) == 1

    def test_repeated_row(self):
        assert determinant(ExactMatrix([[1, 2, 3], [4, 5, 6], [1, 2, 3]])) == 0

    def test_rational_entries(self):
        M = ExactMatrix([[Fraction(1, 2), 1], [1, 4]])
        assert determinant(M) == 1
        assert not M.is_integral()

    def test_not_square(self):
        with pytest.raises(NotSquare):
            determinant(ExactMatrix([[1, 2]]))

    def test_json(self):
        M = ExactMatrix([[Fraction(1, 3), -2], [0, 7]])
        assert M.to_json() == [["1/3", "-2"], ["0", "7"]]
        assert ExactMatrix.from_json(M.to_json()) == M

    def test_permutation_matrix(self):
        P = ExactMatrix.permutation((1, 2, 0))
        assert P.tolist() == [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
        assert determinant(P) == 1

    def test_fano_det(self):
        A = incidence_matrix(corpus.geometry("fano").geometry)
        assert abs(determinant(A)) == 24
        assert determinant(A @ A.transpose()) == 576

    def test_nullspace(self):
        M = ExactMatrix([[1, 1, 0], [0, 1, 1]])
        (v,) = nullspace(M)
        assert M @ ExactMatrix([[x] for x in v]) == ExactMatrix.zeros(2, 1)
        assert rank(M) == 2


small = st.integers(min_value=-5, max_value=5)


@settings(max_examples=150, deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_bareiss_matches_cofactor(rows):
    M = ExactMatrix(rows)
    assert determinant(M) == cofactor_determinant(M)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=4).flatmap(lambda n: st.lists(st.lists(small, min_size=n + 1, max_size=n + 1), min_size=n, max_size=n)))
def test_nullspace_vectors(rows):
    M = ExactMatrix(rows)
    basis = nullspace(M)
    assert len(basis) == M.cols - rank(M)
    for v in basis:
        assert all(sum(Fraction(a) * b for a, b in zip(r, v)) == 0 for r in rows)


class TestSweep:
    def test_order(self):
        vs = list(coefficient_sweep(2, 1))
        assert len(vs) == 8
        assert all(max(map(abs, v)) == 1 for v in vs)

    def test_covers_box_once(self):
        vs = list(coefficient_sweep(3))
        assert len(vs) == len(set(vs)) == 7**3 - 1

    def test_basis_elements_first(self):
        assert list(coefficient_sweep(3))[:4] == [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]


class TestIntertwiners:
    def test_same_subgroup_contains_identity(self):
        t = corpus.fano()[1]
        basis = intertwiner_space(GSTriple(t.group, t.left, t.left))
        T = find_invertible_intertwiner(basis)
        assert T is not None
        n = len(basis[0].entries)
        assert rank(stack(basis + [ExactMatrix.identity(n)])) == len(basis)

    def test_identity_basis(self):
        assert find_invertible_intertwiner([ExactMatrix.identity(3)]) == ExactMatrix.identity(3)

    def test_fano(self):
        t = corpus.fano()[1]
        basis = intertwiner_space(t)
        assert len(basis) == 2 == orbit_count(t)
        A = incidence_matrix(build_drum_geometry(t).geometry)
        assert rank(stack(basis + [A])) == 2
        T = find_invertible_intertwiner(basis)
        assert T is not None and abs(T.det()) == 24

    @pytest.mark.parametrize("name", ["fano", "pentagon", "square", "triangle", "design-"])
    def test_dimension_is_orbit_count(self, name):
        t = corpus.triple(name)
        assert len(intertwiner_space(t)) == orbit_count(t)

    @pytest.mark.parametrize("name", ["fano", "pentagon", "triangle", "design-", "design+"])
    def test_returned_matrix_intertwines(self, name):
        t = corpus.triple(name)
        T = find_invertible_intertwiner(intertwiner_space(t))
        a, b = coset_action(t.group, t.left), coset_action(t.group, t.right)
        for g in list(t.group.generators) + t.group.sorted_elements[:20]:
            assert intertwines(T, ExactMatrix.permutation(a.perm(g)), ExactMatrix.permutation(b.perm(g)))

    def test_s4_control(self):
        t = corpus.s4_control()
        assert not check_ac(t)
        basis = intertwiner_space(t)
        assert basis
        assert find_invertible_intertwiner(basis) is None

    def test_square_control(self):
        t = corpus.triple("square")
        assert find_invertible_intertwiner(intertwiner_space(t)) is None

    def test_index_mismatch(self):
        with pytest.raises(IndexMismatch):
            intertwiner_space(corpus.s3_control())

    def test_cap(self):
        with pytest.raises(CapExceeded):
            intertwiner_space(corpus.fano()[1], cap=10)


def stack(mats):
    # each matrix flattened into one row
    return ExactMatrix([[x for row in M.entries for x in row] for M in mats])
