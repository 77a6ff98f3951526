from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from treedim.derivation import (
    DEFAULT_POLICY,
    TRIVIAL_POLICY,
    DerivationError,
    GrowthPolicy,
    PolySpec,
    bound_chain_holds,
    derive_family,
    derive_level,
    family_violations,
)
from treedim.sequences import explicit
from treedim.treefam import FULL, SINGLETON, LevelParams, TreeFamily

from conftest import family


def test_derive_level_decreasing():
    s = derive_level(F(1, 2), F(1, 3), 1, 2)
    assert (s.r, s.p, s.kappa, s.appendix) == (2, 1, 0, SINGLETON)
    assert (s.k_next, s.ell_next) == (2, 6)


def test_derive_level_increasing():
    s = derive_level(F(1, 3), F(1, 2), 1, 3)
    assert (s.r, s.p, s.kappa, s.appendix) == (3, 1, 1, FULL)
    assert (s.k_next, s.ell_next) == (6, 12)


def test_derive_level_scaled():
    s = derive_level(F(1, 2), F(1, 3), 1, 2, scale=2)
    assert (s.r, s.p, s.kappa) == (4, 2, 0)
    assert (s.k_next, s.ell_next) == (4, 12)


@pytest.mark.parametrize("args", [
    (F(1, 2), F(1, 2), 1, 2),
    (F(1, 2), F(3, 2), 1, 2),
    (F(1, 2), F(1, 3), 1, 3),
])
def test_derive_level_rejects(args):
    with pytest.raises(DerivationError):
        derive_level(*args)


def test_derive_family_examples(fam_a, fam_b):
    assert fam_a.levels == (LevelParams(1, 2, 2, 1, 0, SINGLETON), LevelParams(2, 6))
    assert fam_b.levels == (LevelParams(1, 3, 3, 1, 1, FULL), LevelParams(6, 12))


def test_min_ratio_forces_scale():
    policy = GrowthPolicy(PolySpec((1,)), PolySpec((5,)))
    fam = derive_family(explicit("1/2", "1/3"), 1, policy)
    assert fam.ells == [2, 12]
    assert fam.levels[0].r == 4


def test_three_term_sizes(fam_c):
    assert fam_c.ells == [2, 6, 120]
    assert [lv.k for lv in fam_c.levels] == [1, 2, 48]
    assert (fam_c.levels[1].r, fam_c.levels[1].p, fam_c.levels[1].appendix) == (18, 2, FULL)


def test_default_policy_growth(fam_osc):
    for i, lv in enumerate(fam_osc.levels):
        assert lv.ell >= max(1, i * i)
        if i:
            assert lv.ell >= i * fam_osc.levels[i - 1].ell


@pytest.mark.parametrize("text,values", [
    ("const:3", [3, 3, 3]),
    ("linear:2", [1, 2, 4]),
    ("quadratic:1", [1, 1, 4]),
    ("poly:1,1", [1, 2, 3]),
])
def test_polyspec(text, values):
    spec = PolySpec.parse(text)
    assert [spec(i) for i in range(3)] == values
    assert PolySpec.parse(str(spec)) == spec


@pytest.mark.parametrize("text", ["cubic:1", "const:", "poly:", "linear:-1", "const:1.5"])
def test_polyspec_rejects(text):
    with pytest.raises(ValueError):
        PolySpec.parse(text)


def test_family_violations_clean(fam_a, fam_b, fam_c, fam_osc):
    for fam in (fam_a, fam_b, fam_c, fam_osc):
        assert family_violations(fam) == []


def test_family_violations_catch_corruption(fam_a):
    lv = fam_a.levels[0]
    bad = TreeFamily(2, fam_a.t0_variant, (LevelParams(1, 2, lv.r + 1, 1, 0, SINGLETON), fam_a.levels[1]))
    assert family_violations(bad)
    bad = TreeFamily(2, fam_a.t0_variant, (LevelParams(1, 2, 2, 1, 0, FULL), fam_a.levels[1]))
    assert family_violations(bad)


def test_inadmissible_sequence():
    with pytest.raises(DerivationError, match="consecutive"):
        family(["1/2", "1/2"])


def rationals(max_den=50):
    return st.integers(2, max_den).flatmap(
        lambda d: st.integers(1, d - 1).map(lambda n: F(n, d)))


@given(rationals(), rationals(), st.integers(1, 4), st.integers(1, 3))
def test_step_identities(q, q_next, mult, scale):
    if q == q_next:
        return
    k, ell = q.numerator * mult, q.denominator * mult
    s = derive_level(q, q_next, k, ell, scale)
    assert F(s.k_next, s.ell_next) == q_next
    assert s.ell_next == (s.r + s.p) * ell
    assert s.k_next == s.r * k + s.kappa * ell
    assert s.kappa == (0 if q_next < q else s.p)
    for t in (0, s.p * ell // 2, s.p * ell):
        assert bound_chain_holds(q, q_next, k, ell, s.r, t)


@given(st.lists(rationals(12), min_size=2, max_size=4, unique=True))
def test_derived_families_are_consistent(qs):
    if any(a == b for a, b in zip(qs, qs[1:])):
        return
    fam = derive_family(explicit(*qs), len(qs) - 1, DEFAULT_POLICY)
    assert family_violations(fam) == []
    assert [lv.q for lv in fam.levels] == qs
