"""Brute-force reference computations on explicit word sets.

Nothing here calls into the recursive oracles of ``treefam``,
``structure`` or ``gales``: trees are built by literal set concatenation
and every count is taken from the resulting word sets.  Only the level
parameters are read from the family.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .treefam import TreeFamily

DEFAULT_CAP = 10**6


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True)
class ExplicitLanguage:
    alphabet_size: int
    words: frozenset  # of tuple[int, ...], all the same length
    length: int

    def __post_init__(self):
        if any(len(w) != self.length for w in self.words):
            raise ValueError("explicit languages need uniform word length")

    @classmethod
    def of(cls, alphabet_size: int, words) -> ExplicitLanguage:
        words = frozenset(tuple(w) for w in words)
        length = len(next(iter(words))) if words else 0
        return cls(alphabet_size, words, length)

    def __len__(self) -> int:
        return len(self.words)


def _concat(a: frozenset, b: frozenset) -> frozenset:
    return frozenset(x + y for x in a for y in b)


def _size_exponents(fam: TreeFamily) -> list[int]:
    # projected log_|X| |T_j| from the product structure alone
    exps = [fam.levels[0].k]
    for lv in fam.levels[:-1]:
        exps.append(exps[-1] * lv.r + (lv.p * lv.ell if lv.appendix == "full" else 0))
    return exps


def _over_cap(X: int, exp: int, cap: int) -> bool:
    # X^exp > cap without building X^exp for huge exp
    return exp > cap.bit_length() or X**exp > cap


def _base(fam: TreeFamily) -> frozenset:
    X, lv = fam.alphabet_size, fam.levels[0]
    pad = (0,) * (lv.ell - lv.k)
    free = itertools.product(range(X), repeat=lv.k)
    if fam.t0_variant == "suffix-pad":
        return frozenset(f + pad for f in free)
    return frozenset(pad + f for f in free)


def _appendix(fam: TreeFamily, j: int) -> frozenset:
    lv = fam.levels[j]
    n = lv.p * lv.ell
    if lv.appendix == "full":
        return frozenset(itertools.product(range(fam.alphabet_size), repeat=n))
    return frozenset([(0,) * n])


def brute_trees(fam: TreeFamily, i: int, cap: int = DEFAULT_CAP) -> ExplicitLanguage:
    """``T_i`` as an explicit set, built bottom-up by concatenation."""
    exp = _size_exponents(fam)[i]
    if _over_cap(fam.alphabet_size, exp, cap):
        raise CapExceeded(f"|T_{i}| = {fam.alphabet_size}^{exp} exceeds cap {cap}")
    t = _base(fam)
    for j in range(i):
        lv = fam.levels[j]
        block = frozenset([()])
        for _ in range(lv.r):
            block = _concat(block, t)
        t = _concat(block, _appendix(fam, j))
    return ExplicitLanguage(fam.alphabet_size, t, fam.levels[i].ell)


def brute_factors(fam: TreeFamily, i: int, cap: int = DEFAULT_CAP) -> list[ExplicitLanguage]:
    """``T_i`` as the factor list ``T_{i-1}, ..., T_{i-1}, U_{i-1}``.

    For levels too large to enumerate; each factor must itself fit the cap.
    """
    if i == 0:
        return [brute_trees(fam, 0, cap)]
    prev = brute_trees(fam, i - 1, cap)
    lv = fam.levels[i - 1]
    if lv.appendix == "full" and _over_cap(fam.alphabet_size, lv.p * lv.ell, cap):
        raise CapExceeded(f"appendix X^{lv.p * lv.ell} exceeds cap {cap}")
    if lv.r > cap:
        raise CapExceeded(f"{lv.r} factors exceed cap {cap}")
    u = ExplicitLanguage(fam.alphabet_size, _appendix(fam, i - 1), lv.p * lv.ell)
    return [prev] * lv.r + [u]


def brute_structure(lang: ExplicitLanguage) -> dict[int, int]:
    """Number of distinct length-``l`` prefixes, for ``l = 0 .. length``."""
    return {n: len({w[:n] for w in lang.words}) for n in range(lang.length + 1)}


def product_structure(factors: Sequence[ExplicitLanguage]) -> dict[int, int]:
    """Prefix counts of a concatenation of fixed-length languages.

    Words of a product of uniform-length sets factor uniquely, so the
    length-``l`` prefixes are (all complete factors) x (prefixes of the
    factor that ``l`` ends in).  Checked against :func:`brute_structure`
    on small products in the test suite.
    """
    counts = {0: 1}
    done, offset = 1, 0
    for f in factors:
        inner = brute_structure(f)
        for n in range(1, f.length + 1):
            counts[offset + n] = done * inner[n]
        done *= len(f)
        offset += f.length
    return counts


def brute_balance(lang: ExplicitLanguage) -> bool:
    """Same-length prefixes always have equally many extensions of each length."""
    L = lang.length
    prefixes = [{w[:n] for w in lang.words} for n in range(L + 1)]
    for n in range(L + 1):
        for m in range(n + 1, L + 1):
            counts: dict[tuple, int] = defaultdict(int)
            for v in prefixes[m]:
                counts[v[:n]] += 1
            if len(set(counts.values())) > 1 or len(counts) != len(prefixes[n]):
                return False
    return True


def brute_martingale(lang: ExplicitLanguage) -> dict[tuple, Fraction]:
    """``V_E`` by its defining recursion over the explicit prefix tree.

    ``V(e) = 1``; a child on the tree gets ``|X| / (#children on the tree)``
    times its parent's value, a child off the tree gets 0.  The map covers
    every prefix and every one-letter extension of a proper prefix.
    """
    X = lang.alphabet_size
    pref = set()
    for w in lang.words:
        for n in range(lang.length + 1):
            pref.add(w[:n])
    values: dict[tuple, Fraction] = {(): Fraction(1)}
    frontier = [()]
    while frontier:
        nxt = []
        for w in frontier:
            if len(w) == lang.length:
                continue
            kids = [w + (x,) for x in range(X)]
            on = [c for c in kids if c in pref]
            for c in kids:
                if c in pref:
                    values[c] = Fraction(X, len(on)) * values[w]
                    nxt.append(c)
                else:
                    values[c] = Fraction(0)
        frontier = nxt
    return values
