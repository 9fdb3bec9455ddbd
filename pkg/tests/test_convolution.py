import math

import pytest
from sympy import QQ

from common.config import Settings
from common.convolution import (
    Generator,
    NormalFormElement,
    associator,
    associator_inverse,
    check_tilde_relations,
    convolution_power,
    convolve,
    convolve_maps,
    embed_pure_tensor,
    pbw_reduce,
    tilde_operators,
)
from common.errors import SymmetryError
from common.klr import Permutation, braid_path
from common.linalg import Matrix
from common.module import (
    ModuleMap,
    check_relations,
    dual,
    is_isomorphic,
    trivial_module,
)
from common.structure import SimplicityStatus, is_simple

IDENTITY_2 = Permutation.identity(2)
S1 = Permutation.simple(1, 2)


def _identity_map(m):
    return ModuleMap(m, m, Matrix.identity(m.dim))


def test_convolution_dimension_and_words(l1l2):
    assert l1l2.dim == 2
    assert l1l2.words == ((1, 2), (2, 1))
    assert check_relations(l1l2).passed


def test_nil_hecke_square(c1):
    l1l1 = c1.module("L1L1")
    assert l1l1.words == ((1, 1), (1, 1))
    assert l1l1.x(1).to_rows() == [[0, -1], [0, 0]]
    assert l1l1.x(2).to_rows() == [[0, 1], [0, 0]]
    assert l1l1.tau(1).to_rows() == [[0, 0], [1, 0]]


def test_convolution_with_trivial_module(c2):
    l12 = c2.module("L12")
    one = trivial_module(c2.qfamily)
    for product in (convolve(one, l12), convolve(l12, one)):
        assert product.words == l12.words
        assert product.x_mats == l12.x_mats
        assert product.tau_mats == l12.tau_mats


def test_derived_corpus_module_keeps_its_origin(c1):
    l1l1l1 = c1.module("L1L1L1")
    assert l1l1l1.name == "L1L1L1"
    assert l1l1l1.origin.first.name == "L1L1"
    assert l1l1l1.dim == 6


def test_embed_pure_tensor(c2):
    l1, l2 = c2.module("L1"), c2.module("L2")
    one = {0: QQ(1)}
    assert embed_pure_tensor(l1, l2, one, one) == {0: QQ(1)}
    assert embed_pure_tensor(l1, l2, {}, one) == {}
    assert embed_pure_tensor(l1, l2, {0: QQ(3)}, one) == {0: QQ(3)}


def test_embedding_is_linear_in_the_first_factor(c1):
    l1, l1l1 = c1.module("L1"), c1.module("L1L1")
    u1, u2 = {0: QQ(1)}, {1: QQ(2)}
    v = {0: QQ(1)}
    both = embed_pure_tensor(l1l1, l1, {0: QQ(1), 1: QQ(2)}, v)
    assert both == {
        **embed_pure_tensor(l1l1, l1, u1, v),
        **embed_pure_tensor(l1l1, l1, u2, v),
    }


def test_idempotents_filter_terms(c2):
    start = NormalFormElement.basis_element(IDENTITY_2, (1, 2))
    kept = pbw_reduce(Generator.e((1, 2)), start, c2.qfamily)
    assert kept == start
    assert pbw_reduce(Generator.e((2, 1)), start, c2.qfamily).is_zero


def test_x_on_identity_term_bumps_exponent(c2):
    start = NormalFormElement.basis_element(IDENTITY_2, (1, 2))
    result = pbw_reduce(Generator.x(1), start, c2.qfamily)
    assert dict(result.terms) == {(IDENTITY_2, (1, 0), (1, 2)): QQ(1)}


def test_tau_square_rewrites_to_q(c2):
    start = NormalFormElement.basis_element(IDENTITY_2, (1, 2))
    once = pbw_reduce(Generator.tau(1), start, c2.qfamily)
    assert dict(once.terms) == {(S1, (0, 0), (1, 2)): QQ(1)}
    twice = pbw_reduce(Generator.tau(1), once, c2.qfamily)
    assert dict(twice.terms) == {
        (IDENTITY_2, (1, 0), (1, 2)): QQ(1),
        (IDENTITY_2, (0, 1), (1, 2)): QQ(-1),
    }


def test_nil_hecke_relation_in_normal_form(c1):
    start = NormalFormElement.basis_element(S1, (1, 1))
    result = pbw_reduce(Generator.x(1), start, c1.qfamily)
    # x1 tau1 = tau1 x2 - 1 on equal letters
    assert dict(result.terms) == {
        (S1, (0, 1), (1, 1)): QQ(1),
        (IDENTITY_2, (0, 0), (1, 1)): QQ(-1),
    }


@pytest.mark.parametrize("n", [1, 2, 3])
def test_powers_of_l1_are_simple(c1, n):
    power = convolution_power(c1.module("L1"), n)
    assert power.dim == math.factorial(n)
    assert is_simple(power) == SimplicityStatus.SIMPLE


@pytest.mark.slow
def test_fourth_power_of_l1_is_simple(c1):
    power = convolution_power(c1.module("L1"), 4)
    assert power.dim == 24
    assert check_relations(power).passed
    assert is_simple(power) == SimplicityStatus.SIMPLE


def test_associators_are_inverse_module_maps(c2):
    l1, l2 = c2.module("L1"), c2.module("L2")
    forward = associator(l1, l2, l1)
    backward = associator_inverse(l1, l2, l1)
    assert forward.is_module_map()
    assert backward.is_module_map()
    assert (backward @ forward).matrix == Matrix.identity(forward.source.dim)


def test_convolving_identity_maps(c2, l1l2):
    l1, l2 = c2.module("L1"), c2.module("L2")
    product = convolve_maps(
        _identity_map(l1), _identity_map(l2), l1l2, l1l2
    )
    assert product.matrix == Matrix.identity(2)


def test_rewriting_cache_round_trip(c2, tmp_path):
    settings = Settings(cache_dir=tmp_path)
    l1, l21 = c2.module("L1"), c2.module("L21")
    first = convolve(l1, l21, settings)
    assert list(tmp_path.glob("rewrite-*.pkl"))
    second = convolve(l1, l21, settings)
    assert first == second
    assert first == convolve(l1, l21, Settings())


def test_three_factor_word_decomposition(c2):
    product = convolve(c2.module("L1"), c2.module("L21"))
    counts = {word: product.words.count(word) for word in set(product.words)}
    assert counts == {(1, 2, 1): 1, (2, 1, 1): 2}


def test_tilde_relations_hold(c1, l1l2):
    assert check_tilde_relations(c1.module("L1L1")).passed
    assert check_tilde_relations(l1l2).passed


def test_tilde_operators_on_disjoint_supports(l1l2):
    ops = tilde_operators(l1l2)
    assert all(x.is_zero for x in ops.x.values())


def test_tilde_x_on_a_common_letter(c1):
    l1l1 = c1.module("L1L1")
    ops = tilde_operators(l1l1)
    assert ops.x[(1, 2)] == l1l1.x(1) - l1l1.x(2)


def test_tilde_relations_need_symmetric_factors(c3):
    product = convolve(c3.module("L12"), c3.module("L1"))
    with pytest.raises(SymmetryError):
        check_tilde_relations(product)


def test_dimension_law_and_duality_on_corpus_pairs(c1, c2):
    for corpus in (c1, c2):
        for a, b in corpus.pairs:
            m, n = corpus.module(a), corpus.module(b)
            if m.height + n.height > 3:
                continue
            product = convolve(m, n)
            expected = (
                math.comb(m.height + n.height, m.height) * m.dim * n.dim
            )
            assert product.dim == expected
            swapped = convolve(dual(n), dual(m))
            found, witness = is_isomorphic(dual(product), swapped)
            assert found, (a, b)
            assert witness.is_module_map()


def test_convolution_is_associative_on_corpus_triples(c1, c2):
    for corpus in (c1, c2):
        for names in corpus.triples:
            a, b, c = (corpus.module(name) for name in names)
            if a.height + b.height + c.height > 4:
                continue
            forward = associator(a, b, c)
            backward = associator_inverse(a, b, c)
            assert forward.is_module_map(), names
            assert forward.rank == forward.source.dim
            assert (forward @ backward).matrix == Matrix.identity(
                forward.target.dim
            )
    l1 = c1.module("L1")
    found, witness = is_isomorphic(
        convolve(convolve(l1, l1), l1), convolve(l1, convolve(l1, l1))
    )
    assert found
    assert witness.is_module_map()


def _tau_word(word, start, qfamily):
    element = start
    for k in reversed(word):
        element = pbw_reduce(Generator.tau(k), element, qfamily)
    return element


def _difference(first, second):
    keys = set(first.terms) | set(second.terms)
    diff = {
        key: first.terms.get(key, QQ.zero) - second.terms.get(key, QQ.zero)
        for key in keys
    }
    return {key: value for key, value in diff.items() if value}


def test_reduced_words_of_the_longest_element_agree_in_nil_hecke(c1):
    one_way, other_way = (1, 2, 1, 3, 2, 1), (3, 2, 3, 1, 2, 3)
    braid_path(one_way, other_way)
    longest = Permutation((4, 3, 2, 1))
    assert Permutation.from_word(other_way, 4) == longest
    start = NormalFormElement.basis_element(Permutation.identity(4), (1,) * 4)
    first = _tau_word(one_way, start, c1.qfamily)
    second = _tau_word(other_way, start, c1.qfamily)
    assert first == second
    assert dict(first.terms) == {(longest, (0,) * 4, (1,) * 4): QQ(1)}


def test_braid_rewriting_is_confluent_in_two_vertex_family(c2):
    identity = Permutation.identity(3)
    for word in [(1, 1, 2), (2, 1, 1), (2, 2, 1), (1, 2, 2)]:
        start = NormalFormElement.basis_element(identity, word)
        assert _tau_word((1, 2, 1), start, c2.qfamily) == _tau_word(
            (2, 1, 2), start, c2.qfamily
        ), word
    # nu_1 = nu_3: the two sides differ by the Q-bar term, here a unit
    start = NormalFormElement.basis_element(identity, (1, 2, 1))
    diff = _difference(
        _tau_word((1, 2, 1), start, c2.qfamily),
        _tau_word((2, 1, 2), start, c2.qfamily),
    )
    assert list(diff) == [(identity, (0, 0, 0), (1, 2, 1))]
    assert abs(diff[(identity, (0, 0, 0), (1, 2, 1))]) == 1
