from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from treedim import oracle
from treedim.derivation import derive_family
from treedim.sequences import explicit
from treedim.structure import (
    ExponentFn,
    check_bounds,
    density,
    dim_estimate,
    exponent,
    monotone_check,
)
from treedim.treefam import DepthExceeded

from conftest import family


def test_exponent_examples(fam_a, fam_b):
    fa = ExponentFn(fam_a)
    assert [exponent(fa, n) for n in range(7)] == [0, 1, 1, 2, 2, 2, 2]
    fb = ExponentFn(fam_b)
    assert [fb(n) for n in (3, 6, 9, 10, 11, 12)] == [1, 2, 3, 4, 5, 6]


def test_exponent_hits_k_at_every_level(fam_c, fam_osc):
    for fam in (fam_c, fam_osc):
        fn = ExponentFn(fam)
        assert all(fn(lv.ell) == lv.k for lv in fam.levels)


def test_exponent_beyond_last_level(fam_a):
    with pytest.raises(DepthExceeded):
        ExponentFn(fam_a)(7)


def test_density_examples(fam_a, fam_b):
    fa, fb = ExponentFn(fam_a), ExponentFn(fam_b)
    assert density(fa, 6) == F(1, 3)
    assert density(fa, 2) == F(1, 2)
    assert density(fb, 12) == F(1, 2)


def test_check_bounds_examples(fam_a, fam_b, fam_c):
    fa = ExponentFn(fam_a)
    cert = check_bounds(fa, 0)
    assert cert.ok
    assert fa.density(4) == F(1, 2)
    assert all(F(1, 3) <= fa.density(n) <= F(1, 2) for n in range(4, 7))
    fb = ExponentFn(fam_b)
    assert check_bounds(fb, 0).ok
    assert fb.density(9) == F(1, 3)
    dens = [fb.density(n) for n in range(9, 13)]
    assert dens == sorted(dens) and all(F(1, 3) <= d <= F(1, 2) for d in dens)
    assert check_bounds(ExponentFn(fam_c), 1).ok


def test_dim_estimate_examples(fam_a, fam_dec):
    fa = ExponentFn(fam_a)
    est = dim_estimate(fa, 6)
    assert est.empirical_min_density == F(1, 3)
    assert est.certified_lower == F(2, 9)
    assert all(fa.density(n) >= F(2, 9) for n in range(2, 7))
    assert dim_estimate(ExponentFn(fam_dec), fam_dec.ell_last).empirical_min_density == F(1, 4)


def test_monotone_examples(fam_a, fam_b):
    assert monotone_check(ExponentFn(fam_a), "decreasing", F(1, 3), 6).ok
    assert monotone_check(ExponentFn(fam_b), "increasing", F(1, 2), 12).ok
    wrong = family(["1/2", "1/3"], "prefix-pad")
    with pytest.raises(ValueError, match="variant"):
        monotone_check(ExponentFn(wrong), "decreasing", F(1, 3), 6)


def test_exponent_steps_are_zero_or_one(fam_osc):
    fn = ExponentFn(fam_osc)
    for n in range(0, 5000):
        assert fn(n + 1) - fn(n) in (0, 1)


def rationals(max_den=9):
    return st.integers(2, max_den).flatmap(
        lambda d: st.integers(1, d - 1).map(lambda n: F(n, d)))


@settings(max_examples=40, deadline=None)
@given(st.lists(rationals(), min_size=2, max_size=3), st.sampled_from(["suffix-pad", "prefix-pad"]))
def test_exponent_matches_brute_counts(qs, variant):
    if any(a == b for a, b in zip(qs, qs[1:])):
        return
    fam = family([str(q) for q in qs], variant)
    fn = ExponentFn(fam)
    for i in range(fam.depth + 1):
        try:
            lang = oracle.brute_trees(fam, i, cap=2**14)
        except oracle.CapExceeded:
            continue
        counts = oracle.brute_structure(lang)
        assert all(counts[n] == 2 ** fn(n) for n in counts)
