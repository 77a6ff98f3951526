import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from treedim.derivation import DEFAULT_POLICY, TRIVIAL_POLICY, derive_family
from treedim.sequences import builtin, explicit
from treedim.treefam import PREFIX_PAD, SUFFIX_PAD

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"


def family(terms, variant=SUFFIX_PAD, policy=TRIVIAL_POLICY, n_levels=None, X=2):
    seq = explicit(*terms)
    n = len(terms) - 1 if n_levels is None else n_levels
    return derive_family(seq, n, policy, variant, X)


def w(text):
    return tuple(int(c) for c in text)


@pytest.fixture(scope="session")
def fam_a():
    return family(["1/2", "1/3"])


@pytest.fixture(scope="session")
def fam_b():
    return family(["1/3", "1/2"], PREFIX_PAD)


@pytest.fixture(scope="session")
def fam_c():
    return family(["1/2", "1/3", "2/5"])


@pytest.fixture(scope="session")
def fam_dec():
    return family(["1/2", "1/3", "1/4"])


@pytest.fixture(scope="session")
def fam_inc():
    return family(["1/4", "1/3", "1/2"], PREFIX_PAD)


@pytest.fixture(scope="session")
def fam_osc():
    seq = builtin("oscillating", c=F(1, 2), d=F(1), m=3, period=2)
    return derive_family(seq, 5, DEFAULT_POLICY)


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion, whatever the capture mode
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
