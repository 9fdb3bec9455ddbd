import pytest
from sympy import QQ

from common.convolution import check_tilde_relations, convolve
from common.errors import DimensionMismatchError, SymmetryError, ZeroMapError
from common.linalg import Matrix, SPECTRAL, z
from common.module import ModuleMap, check_relations, trivial_module
from common.rmatrix import (
    big_R,
    big_R_deformed,
    check_hexagons,
    check_intertwiner_laws,
    check_r_matrix,
    check_z1z2_dependence,
    deform,
    phi_action,
    phi_matrix,
    phi_word_matrix,
    renormalized_r,
    spectral_orders,
    vanishing_order,
)


def test_phi_on_different_letters_is_tau(l1l2):
    assert phi_matrix(l1l2, 1) == l1l2.tau(1)


def test_phi_on_equal_letters_fixes_killed_vectors(c1):
    l1l1 = c1.module("L1L1")
    phi = phi_matrix(l1l1, 1)
    assert phi.apply({0: QQ(1)}) == {0: QQ(1)}


def test_phi_index_out_of_range(l1l2):
    with pytest.raises(DimensionMismatchError):
        phi_matrix(l1l2, 2)


def test_intertwiner_laws_on_corpus_convolutions(c1, c2):
    for m in (c1.module("L1L1"), c1.module("L1L1L1"), c2.module("L1L2")):
        assert check_intertwiner_laws(m).passed


def test_deform_shifts_x(c1):
    l1 = c1.module("L1")
    shifted = deform(l1)
    assert shifted.x(1).to_rows() == [[z]]
    assert check_relations(shifted, nilpotent=False).passed
    assert shifted.specialize({z: QQ(0)}) == l1


def test_r_matrix_is_a_module_map(c1, c2):
    assert big_R(c1.module("L1"), c1.module("L1")).is_module_map()
    assert big_R(c2.module("L1"), c2.module("L2")).is_module_map()
    assert big_R(c2.module("L1"), c2.module("L21")).is_module_map()


def test_r_matrix_from_trivial_module_is_identity(c2):
    l12 = c2.module("L12")
    one = trivial_module(c2.qfamily)
    assert big_R(one, l12).matrix == Matrix.identity(1)
    assert big_R(l12, one).matrix == Matrix.identity(1)


def test_r_matrix_of_letters_in_two_vertex_family(c2):
    r = big_R(c2.module("L1"), c2.module("L2"))
    # u (x) v goes to tau1 (v (x) u); tau1 (u (x) v) to Q12(0, 0) = 0
    assert r.matrix.to_rows() == [[0, 0], [1, 0]]


def test_deformed_r_matrix_nil_hecke(c1):
    r = big_R_deformed(c1.module("L1"), c1.module("L1"))
    assert r.matrix.to_rows() == [[1, 0], [-z, 1]]
    assert r.is_module_map()
    assert vanishing_order(r) == 0


def test_deformed_r_matrix_two_vertex(c2):
    r = big_R_deformed(c2.module("L1"), c2.module("L2"))
    assert r.matrix.to_rows() == [[0, z], [1, 0]]
    assert vanishing_order(r) == 0


def test_vanishing_order_of_zero_map(l1l2):
    zero = ModuleMap(l1l2, l1l2, Matrix.zeros(2, 2, SPECTRAL))
    with pytest.raises(ZeroMapError):
        vanishing_order(zero)


def test_renormalized_r_nil_hecke(c1):
    r = renormalized_r(c1.module("L1"), c1.module("L1"))
    assert (r.s, r.t) == (0, 0)
    assert r.matrix == Matrix.identity(2)
    assert r.matrix.is_scalar()


def test_renormalized_r_two_vertex(c2):
    r = renormalized_r(c2.module("L1"), c2.module("L2"))
    assert r.s == 0
    assert r.matrix.to_rows() == [[0, 0], [1, 0]]
    assert r.rank == 1
    assert r.image_words() == [(1, 2)]
    assert r.map.is_module_map()


def test_renormalized_r_with_trivial_module_is_identity(c2):
    l21 = c2.module("L21")
    one = trivial_module(c2.qfamily)
    assert renormalized_r(one, l21).matrix == Matrix.identity(1)
    assert renormalized_r(l21, one).matrix == Matrix.identity(1)


def test_renormalized_r_compares_both_sides_over_separate_symmetric_roots(
    c3,
):
    # alpha1 + alpha2 is not symmetric here, alpha1 and alpha2 are
    r = renormalized_r(c3.module("L1"), c3.module("L2"))
    assert (r.s, r.t) == (0, 0)
    assert r.matrix.to_rows() == [[0, 0], [1, 0]]
    assert r.map.is_module_map()
    assert not r.map.is_zero


def test_renormalized_r_needs_a_symmetric_side(c3):
    l12 = c3.module("L12")
    with pytest.raises(SymmetryError):
        renormalized_r(l12, l12)


def test_deforming_a_non_symmetric_module_fails(c3):
    with pytest.raises(SymmetryError):
        big_R_deformed(c3.module("L12"), c3.module("L1"))


def test_spectral_orders(c1, c3):
    assert spectral_orders(c1.module("L1"), c1.module("L1")) == (0, 0)
    assert spectral_orders(c3.module("L12"), c3.module("L1")) == (None, 0)


def test_deformed_r_depends_on_the_difference(c1, c2):
    assert check_z1z2_dependence(c1.module("L1"), c1.module("L1"))
    assert check_z1z2_dependence(c2.module("L1"), c2.module("L2"))
    one = trivial_module(c2.qfamily)
    assert check_z1z2_dependence(one, c2.module("L12"))


def test_r_matrix_checks(c1, c2):
    assert check_r_matrix(c1.module("L1"), c1.module("L1")).passed
    assert check_r_matrix(c2.module("L1"), c2.module("L2")).passed
    assert check_r_matrix(c2.module("L2"), c2.module("L1")).passed


def test_hexagons_two_vertex(c2):
    l1, l2 = c2.module("L1"), c2.module("L2")
    assert check_hexagons(l1, l2, l1).passed
    assert check_hexagons(l1, l1, l2).passed


def test_hexagons_nil_hecke(c1):
    l1 = c1.module("L1")
    assert check_hexagons(l1, l1, l1).passed


def test_r_matrix_of_products_is_a_module_map(c2):
    l1, l2 = c2.module("L1"), c2.module("L2")
    l1l2 = convolve(l1, l2)
    assert big_R(l1l2, l1).is_module_map()
    assert big_R(l1, l1l2).is_module_map()


def test_phi_words_and_single_actions(c1, l1l2):
    l1l1 = c1.module("L1L1")
    assert phi_word_matrix(l1l1, ()) == Matrix.identity(l1l1.dim)
    assert phi_word_matrix(l1l1, (1,)) == phi_matrix(l1l1, 1)
    vector = {0: QQ(1)}
    assert phi_action(l1l2, 1, vector) == l1l2.tau(1).apply(vector)


@pytest.mark.slow
def test_tilde_relations_and_difference_dependence_at_height_three(c1, c2):
    pairs = [
        (c2.module("L1"), c2.module("L21")),
        (c2.module("L12"), c2.module("L1")),
        (c2.module("L2"), c2.module("L12")),
        (c1.module("L1"), c1.module("L1L1")),
        (c1.module("L1L1"), c1.module("L1")),
    ]
    for m, n in pairs:
        assert check_tilde_relations(convolve(n, m)).passed, (m.name, n.name)
        assert check_z1z2_dependence(m, n), (m.name, n.name)


@pytest.mark.slow
def test_renormalized_r_at_height_four_is_invertible(c1):
    r = renormalized_r(c1.module("L1"), c1.module("L1L1L1"))
    assert r.s == r.t
    assert r.map.is_module_map()
    assert r.rank == 24
