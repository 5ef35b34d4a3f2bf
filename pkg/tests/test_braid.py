from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncsg import braid
from ncsg.braid import (
    BraidError,
    GarsideForm,
    IndexTooSmall,
    delta_word,
    free_reduce,
    half_twist,
    handle_reduce,
    insert_relators,
    inverse_word,
    is_trivial,
    left_canonical_form,
    perm_of_positive_word,
    relators,
    standard_commuting_subgroups,
    words_equal,
)

from conftest import braid_words


def test_half_twist_of_b3_from_positive_word():
    assert perm_of_positive_word((1, 2, 1), 3) == half_twist(3) == (2, 1, 0)
    assert perm_of_positive_word((2, 1, 2), 3) == half_twist(3)


def test_delta_is_a_pure_infimum():
    for n in range(2, 7):
        form = left_canonical_form(delta_word(n), n)
        assert form == GarsideForm(n, 1, ())


def test_positive_word_with_double_crossing_is_not_a_permutation_braid():
    with pytest.raises(BraidError):
        perm_of_positive_word((1, 1), 3)


def test_single_inverse_generator():
    form = left_canonical_form((-1,), 3)
    assert form.infimum == -1
    assert form.factors == ((1, 2, 0),)
    # Delta^-1 (sigma_2 sigma_1) = sigma_1^-1
    assert words_equal(form.to_word(), (-1,))


def test_far_commutation_and_braid_relation_give_the_same_form():
    assert left_canonical_form((1, 3), 4) == left_canonical_form((3, 1), 4)
    assert left_canonical_form((1, 2, 1), 3) == left_canonical_form((2, 1, 2), 3)
    assert left_canonical_form((1, 2), 3) != left_canonical_form((2, 1), 3)


def test_every_permutation_braid_is_its_own_form():
    n = 4
    for p in itertools.permutations(range(n)):
        if p == tuple(range(n)) or p == half_twist(n):
            continue
        form = left_canonical_form(braid.reduced_word(p), n)
        assert form.infimum == 0 and form.factors == (p,)


def test_handle_reduction_examples():
    assert handle_reduce((1, 3, -1, -3)) == ()
    assert handle_reduce((1, 2, -1)) == (-2, 1, 2)
    assert is_trivial((1, 2, 1, -2, -1, -2))
    assert not is_trivial((1, 2, -1, -2))


def test_relators_are_trivial():
    for n in range(2, 8):
        for r in relators(n):
            assert is_trivial(r)
            assert left_canonical_form(r, n).is_identity()


@pytest.mark.parametrize("n", range(5, 13))
def test_standard_commuting_subgroups(n):
    lb, ub = standard_commuting_subgroups(n)
    low = max(abs(g.payload[0]) for g in lb.generators)
    high = min(abs(g.payload[0]) for g in ub.generators)
    assert high - low >= 2
    for x in lb.generators:
        for y in ub.generators:
            assert x * y == y * x


def test_commuting_subgroups_need_five_strands():
    with pytest.raises(IndexTooSmall):
        standard_commuting_subgroups(4)


@given(braid_words(5, 24))
def test_canonical_form_is_valid_and_idempotent(w):
    form = left_canonical_form(w, 5)
    assert form.is_valid()
    assert left_canonical_form(form.to_word(), 5) == form


@given(braid_words(5, 16), braid_words(5, 16))
def test_garside_equality_agrees_with_handle_reduction(u, v):
    same = left_canonical_form(u, 5) == left_canonical_form(v, 5)
    assert same == words_equal(u, v)


@given(braid_words(4, 20))
def test_word_times_inverse_is_trivial(w):
    assert is_trivial(w + inverse_word(w))
    assert left_canonical_form(w + inverse_word(w), 4).is_identity()


@given(braid_words(4, 20))
def test_free_reduction_preserves_the_element(w):
    assert left_canonical_form(free_reduce(w), 4) == left_canonical_form(w, 4)


@given(braid_words(6, 20), st.integers(0, 2**32))
def test_relator_insertion_preserves_the_form(w, seed):
    rewritten = insert_relators(w, 6, random.Random(seed), count=3)
    assert left_canonical_form(rewritten, 6) == left_canonical_form(w, 6)
    assert words_equal(rewritten, w)


@given(braid_words(5, 12), braid_words(5, 12))
def test_canonical_length_is_subadditive(u, v):
    lu, lv = left_canonical_form(u, 5), left_canonical_form(v, 5)
    luv = left_canonical_form(u + v, 5)
    assert luv.supremum <= lu.supremum + lv.supremum
    assert luv.infimum >= lu.infimum + lv.infimum


def test_commuting_subgroups_for_six_and_five_strands():
    lb, ub = standard_commuting_subgroups(6)
    assert [g.payload for g in lb.generators] == [(1,), (2,)]
    assert [g.payload for g in ub.generators] == [(4,), (5,)]
    lb, ub = standard_commuting_subgroups(5)
    assert [g.payload for g in lb.generators] == [(1,)]
    assert [g.payload for g in ub.generators] == [(3,), (4,)]


def test_empty_word_has_trivial_form():
    assert left_canonical_form((), 4) == GarsideForm(4, 0, ())
    assert handle_reduce(()) == ()


def test_canonical_form_is_idempotent_on_ten_thousand_words():
    rng = random.Random(2024)
    for _ in range(10_000):
        n = rng.randint(3, 6)
        w = braid.random_word(n, rng.randint(0, 20), rng)
        form = left_canonical_form(w, n)
        assert left_canonical_form(form.to_word(), n) == form
