from dataclasses import replace

import pytest
from sympy import QQ

from common.convolution import convolve
from common.errors import NotInvariantError, RootMismatchError
from common.klr import RootVector
from common.linalg import Matrix, Subspace
from common.module import (
    check_relations,
    direct_sum,
    dual,
    hom_space,
    invariant_closure,
    is_invariant,
    is_isomorphic,
    letter_module,
    module_from_subspace,
    quotient,
    restrict,
    submodule_spanned,
    trivial_module,
)


def test_letter_module_satisfies_relations(c1):
    assert check_relations(c1.module("L1")).passed


def test_corpus_modules_satisfy_relations(c1, c2, c3):
    for corpus in (c1, c2, c3):
        assert corpus.passed, corpus.validation


def test_non_nilpotent_x_is_reported(c1):
    broken = replace(c1.module("L1"), x_mats=(Matrix.identity(1),))
    assert check_relations(broken).violations == ("nilpotent:1",)
    assert check_relations(broken, nilpotent=False).passed


def test_planted_tau_square_defect_is_located(c2):
    broken = replace(c2.module("L12"), tau_mats=(Matrix.identity(1),))
    report = check_relations(broken)
    assert "tau-square:1" in report.violations


def test_wrong_generator_count_is_reported(c2):
    broken = replace(c2.module("L12"), tau_mats=())
    assert check_relations(broken).violations == ("shape:generator-count",)


def test_dual_of_one_dimensional_module(c2):
    l12 = c2.module("L12")
    assert is_isomorphic(dual(l12), l12)[0]


def test_double_dual_is_the_module(c1, c2):
    for corpus in (c1, c2):
        for m in corpus.modules.values():
            twice = dual(dual(m))
            assert twice.x_mats == m.x_mats
            assert twice.tau_mats == m.tau_mats


def test_dual_swaps_convolution_factors(c2, l1l2):
    l2l1 = convolve(c2.module("L2"), c2.module("L1"))
    found, witness = is_isomorphic(dual(l1l2), l2l1)
    assert found
    assert witness.is_module_map()


def test_restrict_filters_words(c2, l1l2):
    alpha1, alpha2 = RootVector.simple(1), RootVector.simple(2)
    pair = restrict(l1l2, alpha1, alpha2)
    assert pair.first.dim == pair.second.dim == 1
    assert pair.indices == (0,)
    assert restrict(c2.module("L21"), alpha1, alpha2).first.dim == 0


def test_restrict_to_zero_root_keeps_everything(l1l2):
    pair = restrict(l1l2, l1l2.beta, RootVector())
    assert pair.first.words == l1l2.words
    assert pair.first.x_mats == l1l2.x_mats


def test_hom_spaces(c1, c2, l1l2):
    assert len(hom_space(c1.module("L1"), c1.module("L1"))) == 1
    assert hom_space(c2.module("L12"), c2.module("L21")) == []
    assert len(hom_space(l1l2, l1l2)) == 1


def test_hom_space_needs_equal_roots(c2):
    with pytest.raises(RootMismatchError):
        hom_space(c2.module("L1"), c2.module("L2"))


def test_invariant_closure(l1l2):
    line = invariant_closure(l1l2, [{1: QQ(1)}])
    assert line.rank == 1
    assert line.basis == ((0, 1),)
    assert invariant_closure(l1l2, []).rank == 0
    assert invariant_closure(l1l2, [{0: QQ(1)}]).rank == 2


def test_closure_of_a_vector_in_a_simple_module(c1):
    l1l1 = c1.module("L1L1")
    assert invariant_closure(l1l1, [{1: QQ(1)}]).rank == 2


def test_submodule_and_quotient(l1l2):
    line = invariant_closure(l1l2, [{1: QQ(1)}])
    sub, inclusion = module_from_subspace(l1l2, line)
    assert sub.words == ((2, 1),)
    assert inclusion.is_module_map()
    top, projection = quotient(l1l2, line)
    assert top.words == ((1, 2),)
    assert check_relations(top).passed


def test_quotient_by_trivial_subspaces(l1l2):
    same, _ = quotient(l1l2, Subspace.zero(2))
    assert is_isomorphic(same, l1l2)[0]
    nothing, _ = quotient(l1l2, Subspace.full(2))
    assert nothing.dim == 0


def test_non_invariant_subspace_is_rejected(l1l2):
    first_line = Subspace.from_vectors([{0: QQ(1)}], 2)
    assert not is_invariant(l1l2, first_line)
    with pytest.raises(NotInvariantError):
        quotient(l1l2, first_line)


def test_isomorphism_checks(c2):
    l12, l21 = c2.module("L12"), c2.module("L21")
    found, witness = is_isomorphic(l12, l12)
    assert found
    assert witness.matrix == Matrix.identity(1)
    assert is_isomorphic(l12, l21) == (False, None)


def test_direct_sum_and_building_blocks(c1):
    q = c1.qfamily
    l1 = letter_module(q, 1)
    assert l1 == c1.module("L1")
    both = direct_sum(l1, l1)
    assert both.dim == 2
    assert check_relations(both).passed
    assert trivial_module(q).dim == 1


def test_submodule_spanned_by_socle_and_head_vectors(l1l2):
    socle, inclusion = submodule_spanned(l1l2, [{1: QQ(1)}])
    assert socle.dim == 1
    assert inclusion.is_module_map()
    whole, _ = submodule_spanned(l1l2, [{0: QQ(1)}])
    assert whole.dim == 2
