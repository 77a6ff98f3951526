import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from treedim import oracle
from treedim.treefam import (
    DepthExceeded,
    collect_prefixes,
    enumerate_level,
    format_word,
    iter_prefixes,
    member_full,
    member_pref,
    parse_word,
    random_word,
    successors,
)

from conftest import family, w


def test_member_full_examples(fam_a):
    assert member_full(fam_a, 0, w("10"))
    assert not member_full(fam_a, 0, w("01"))
    assert member_full(fam_a, 1, w("001000"))
    assert not member_full(fam_a, 1, w("001001"))


def test_member_pref_examples(fam_a):
    assert member_pref(fam_a, w("101"))
    assert not member_pref(fam_a, w("11"))
    assert member_pref(fam_a, ())


def test_successors_examples(fam_a):
    assert successors(fam_a, w("1")) == {0}
    assert successors(fam_a, ()) == {0, 1}
    assert successors(fam_a, w("0010")) == {0}


def test_successors_off_tree(fam_a):
    with pytest.raises(ValueError):
        successors(fam_a, w("11"))


def test_enumerate_level_examples(fam_a):
    assert enumerate_level(fam_a, 0, 100) == [w("00"), w("10")]
    assert enumerate_level(fam_a, 1, 100) == [w(x) for x in ("000000", "001000", "100000", "101000")]
    with pytest.raises(ValueError, match="cap"):
        enumerate_level(fam_a, 1, 2)


def test_depth_exceeded_names_levels(fam_a):
    with pytest.raises(DepthExceeded, match="more level"):
        member_pref(fam_a, (0,) * 7)


def test_bad_letters(fam_a):
    with pytest.raises(ValueError):
        member_pref(fam_a, (2,))


def test_word_io():
    assert parse_word("0110") == (0, 1, 1, 0)
    assert parse_word("3,11,0", 12) == (3, 11, 0)
    assert format_word((3, 11, 0), 12) == "3,11,0"
    assert parse_word("") == ()
    with pytest.raises(ValueError):
        parse_word("012", 2)


@pytest.mark.parametrize("terms,variant", [
    (["1/2", "1/3"], "suffix-pad"),
    (["1/3", "1/2"], "prefix-pad"),
    (["1/2", "1/3", "1/4"], "suffix-pad"),
    (["2/3", "1/4"], "prefix-pad"),
])
def test_membership_matches_explicit_sets(terms, variant):
    fam = family(terms, variant)
    for i in range(fam.depth + 1):
        lang = oracle.brute_trees(fam, i)
        ell = fam.levels[i].ell
        pref = {x[:n] for x in lang.words for n in range(ell + 1)}
        for n in range(min(ell, 12) + 1):
            for v in itertools.product(range(2), repeat=n):
                assert member_pref(fam, v, level=i) == (v in pref)
        if 2**ell <= 4096:
            for v in itertools.product(range(2), repeat=ell):
                assert member_full(fam, i, v) == (v in lang.words)


def test_ternary_alphabet():
    fam = family(["1/2", "1/3"], X=3)
    lang = oracle.brute_trees(fam, 1)
    assert len(lang) == 3 ** fam.levels[1].k
    assert enumerate_level(fam, 1, 10**4) == sorted(lang.words)


def test_iter_prefixes_is_lexicographic(fam_b):
    nodes = list(iter_prefixes(fam_b, 12))
    assert nodes == sorted(nodes)
    assert len([x for x in nodes if len(x) == 12]) == 64


def test_collect_prefixes_modes(fam_a, fam_c):
    nodes, mode = collect_prefixes(fam_a, 5)
    assert mode == "exhaustive" and len(nodes) == 17
    nodes, mode = collect_prefixes(fam_c, 100, max_nodes=500, walks=20)
    assert mode == "sampled"
    assert all(member_pref(fam_c, x) for x in nodes)


def test_random_word_is_member(fam_c):
    rng = random.Random(7)
    for i in range(fam_c.depth + 1):
        for _ in range(20):
            assert member_full(fam_c, i, random_word(fam_c, i, rng))
    assert len(random_word(fam_c, 2, rng, 50)) == 50


@settings(max_examples=50)
@given(st.integers(0, 2**30))
def test_sampled_words_have_dichotomous_successors(seed):
    fam = family(["1/2", "1/3", "2/5"])
    rng = random.Random(seed)
    v = random_word(fam, 2, rng, rng.randrange(120))
    assert len(successors(fam, v)) in (1, 2)
