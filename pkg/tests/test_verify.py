from fractions import Fraction as F

from treedim.derivation import family_violations
from treedim.treefam import FULL, SINGLETON, LevelParams, TreeFamily
from treedim.verify import run_suite

from conftest import family


def test_suite_passes_on_small_families(fam_a, fam_b, fam_dec):
    for fam in (fam_a, fam_b, fam_dec):
        results = run_suite(fam, 30)
        assert all(r.ok for r in results), [r.line() for r in results if not r.ok]
        assert len(results) == 9


def test_suite_runs_sigma(fam_b):
    results = run_suite(fam_b, 11, sigma=F(2, 3))
    assert all(r.ok for r in results)


def test_consistent_but_foreign_family_checks_run():
    # a hand-built family whose parameters satisfy every recurrence
    fam = TreeFamily(3, "prefix-pad", (LevelParams(1, 2, 1, 1, 1, FULL), LevelParams(3, 4)))
    assert family_violations(fam) == []
    assert all(r.ok for r in run_suite(fam, 4))


def test_appendix_flip_stops_suite(fam_a):
    lv = fam_a.levels[0]
    bad = TreeFamily(2, "suffix-pad", (LevelParams(lv.k, lv.ell, lv.r, lv.p, lv.kappa, FULL), fam_a.levels[1]),
                     fam_a.declared_q)
    results = run_suite(bad, 6)
    assert [r.name for r in results] == ["parameters"] and not results[0].ok
