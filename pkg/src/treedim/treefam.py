"""Symbolic tree family ``T_0, T_1, ..., T_n`` and its membership oracles.

``T_{i+1}`` is ``r_i`` concatenated copies of ``T_i`` followed by an
appendix of length ``p_i * ell_i`` that is either completely free
(``full``) or the single word ``0^(p_i * ell_i)`` (``singleton``).  Words of
``T_i`` are never stored; every query recurses through the level
parameters.  Letters are the integers ``0 .. alphabet_size - 1``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

SUFFIX_PAD = "suffix-pad"  # T_0 = X^k0 . 0^(ell0 - k0)
PREFIX_PAD = "prefix-pad"  # T_0 = 0^(ell0 - k0) . X^k0
T0_VARIANTS = (SUFFIX_PAD, PREFIX_PAD)

FULL = "full"
SINGLETON = "singleton"

Word = tuple  # tuple[int, ...]


class DepthExceeded(ValueError):
    pass


@dataclass(frozen=True)
class LevelParams:
    """Level ``i``: ``T_i`` has words of length ``ell`` and ``|X|^k`` members.

    ``r, p, kappa, appendix`` describe the step to level ``i+1`` and are
    ``None`` on the deepest materialized level.
    """

    k: int
    ell: int
    r: int | None = None
    p: int | None = None
    kappa: int | None = None
    appendix: str | None = None

    @property
    def q(self) -> Fraction:
        return Fraction(self.k, self.ell)

    @property
    def has_step(self) -> bool:
        return self.r is not None


@dataclass(frozen=True)
class TreeFamily:
    alphabet_size: int
    t0_variant: str
    levels: tuple[LevelParams, ...]
    # optional declared q_i, carried by family documents for cross-checks
    declared_q: tuple[Fraction, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if self.alphabet_size < 2:
            raise ValueError("alphabet_size must be >= 2")
        if self.t0_variant not in T0_VARIANTS:
            raise ValueError(f"t0_variant must be one of {T0_VARIANTS}, got {self.t0_variant!r}")
        if not self.levels:
            raise ValueError("a family needs at least level 0")
        for i, lv in enumerate(self.levels):
            last = i == len(self.levels) - 1
            if lv.has_step == last:
                raise ValueError(f"level {i}: step parameters must be present on every level but the deepest")
            if lv.has_step and lv.appendix not in (FULL, SINGLETON):
                raise ValueError(f"level {i}: appendix must be {FULL!r} or {SINGLETON!r}")
            if not 0 <= lv.k <= lv.ell or lv.ell < 1:
                raise ValueError(f"level {i}: need 0 <= k <= ell and ell >= 1")

    @property
    def depth(self) -> int:
        """Index of the deepest materialized level."""
        return len(self.levels) - 1

    @property
    def ells(self) -> list[int]:
        return [lv.ell for lv in self.levels]

    @property
    def ell_last(self) -> int:
        return self.levels[-1].ell

    def q(self, i: int) -> Fraction:
        return self.levels[i].q

    def truncated(self, depth: int) -> TreeFamily:
        """The same family materialized only up to level ``depth``."""
        if not 0 <= depth <= self.depth:
            raise IndexError(depth)
        lvs = list(self.levels[: depth + 1])
        top = lvs[-1]
        lvs[-1] = LevelParams(top.k, top.ell)
        dq = self.declared_q[: depth + 1] if self.declared_q is not None else None
        return TreeFamily(self.alphabet_size, self.t0_variant, tuple(lvs), dq)

    # -- recursive oracles -------------------------------------------------

    def _base_ok(self, w: Sequence[int], lo: int, hi: int) -> bool:
        # w[lo:hi] against the T_0 pattern, read from position 0
        lv = self.levels[0]
        if self.t0_variant == SUFFIX_PAD:
            free_lo, free_hi = 0, lv.k
        else:
            free_lo, free_hi = lv.ell - lv.k, lv.ell
        for j in range(lo, hi):
            pos = j - lo
            if not free_lo <= pos < free_hi and w[j] != 0:
                return False
        return True

    def _full(self, i: int, w: Sequence[int], lo: int) -> bool:
        # w[lo : lo + ell_i] in T_i
        if i == 0:
            return self._base_ok(w, lo, lo + self.levels[0].ell)
        step = self.levels[i - 1]
        pos = lo
        for _ in range(step.r):
            if not self._full(i - 1, w, pos):
                return False
            pos += step.ell
        if step.appendix == SINGLETON:
            return all(w[j] == 0 for j in range(pos, pos + step.p * step.ell))
        return True

    def _pref(self, i: int, w: Sequence[int], lo: int, hi: int) -> bool:
        # w[lo:hi] in pref(T_i); requires hi - lo <= ell_i
        if i == 0:
            return self._base_ok(w, lo, hi)
        step = self.levels[i - 1]
        pos = lo
        for _ in range(step.r):
            if hi - pos <= step.ell:
                return self._pref(i - 1, w, pos, hi)
            if not self._full(i - 1, w, pos):
                return False
            pos += step.ell
        if step.appendix == SINGLETON:
            return all(w[j] == 0 for j in range(pos, hi))
        return True

    def _check_letters(self, w: Sequence[int]) -> None:
        for x in w:
            if not 0 <= x < self.alphabet_size:
                raise ValueError(f"letter {x} outside alphabet of size {self.alphabet_size}")

    def levels_needed(self, length: int) -> int:
        """Upper bound on extra levels before words of ``length`` are covered.

        Each step multiplies ``ell`` by ``r + p >= 2``.
        """
        n, ell = 0, self.ell_last
        while ell < length:
            ell *= 2
            n += 1
        return n


def member_full(fam: TreeFamily, i: int, w: Sequence[int]) -> bool:
    """``w in T_i``."""
    if not 0 <= i <= fam.depth:
        raise IndexError(f"level {i} not materialized (deepest is {fam.depth})")
    if len(w) != fam.levels[i].ell:
        raise ValueError(f"|w| = {len(w)} but words of T_{i} have length {fam.levels[i].ell}")
    fam._check_letters(w)
    return fam._full(i, w, 0)


def member_pref(fam: TreeFamily, w: Sequence[int], level: int | None = None) -> bool:
    """``w in pref(F)``, or ``w in pref(T_level)`` when ``level`` is given.

    Because pref(T_i) and pref(T_{i+1}) agree up to length ``ell_i``, the
    deepest level decides membership for every word it covers.
    """
    i = fam.depth if level is None else level
    if not 0 <= i <= fam.depth:
        raise IndexError(f"level {i} not materialized (deepest is {fam.depth})")
    bound = fam.levels[i].ell
    if len(w) > bound:
        if level is not None:
            raise DepthExceeded(f"|w| = {len(w)} exceeds ell_{i} = {bound}")
        raise DepthExceeded(
            f"|w| = {len(w)} exceeds the deepest materialized length ell_{i} = {bound}; "
            f"at most {fam.levels_needed(len(w))} more level(s) are needed"
        )
    fam._check_letters(w)
    return fam._pref(i, w, 0, len(w))


def successors(fam: TreeFamily, w: Sequence[int], level: int | None = None) -> frozenset[int]:
    """Letters ``x`` with ``w x`` in pref(F); always all of X or exactly one."""
    i = fam.depth if level is None else level
    if len(w) >= fam.levels[i].ell:
        raise DepthExceeded(f"|w| = {len(w)} leaves no room below ell_{i} = {fam.levels[i].ell}")
    if not member_pref(fam, w, level):
        raise ValueError(f"{format_word(w, fam.alphabet_size)!r} is not in pref(F)")
    w = tuple(w)
    out = frozenset(x for x in range(fam.alphabet_size) if fam._pref(i, w + (x,), 0, len(w) + 1))
    if len(out) not in (1, fam.alphabet_size):
        raise AssertionError(
            f"spherical symmetry broken at {format_word(w, fam.alphabet_size)!r}: successors {sorted(out)}"
        )
    return out


def iter_prefixes(fam: TreeFamily, max_len: int, level: int | None = None) -> Iterator[Word]:
    """Depth-first, lexicographic walk over pref(F) up to length ``max_len``."""
    stack: list[Word] = [()]
    while stack:
        w = stack.pop()
        yield w
        if len(w) < max_len:
            for x in sorted(successors(fam, w, level), reverse=True):
                stack.append(w + (x,))


def collect_prefixes(
    fam: TreeFamily, depth: int, *, max_nodes: int = 20_000, walks: int = 200, seed: int = 0
) -> tuple[list[Word], str]:
    """Nodes of pref(F) with length <= depth.

    Exhaustive (mode ``"exhaustive"``) while at most ``max_nodes`` nodes are
    seen; otherwise the union of ``walks`` seeded random descents from the
    root down to ``depth`` (mode ``"sampled"``).
    """
    nodes: list[Word] = []
    stack: list[Word] = [()]
    while stack:
        w = stack.pop()
        nodes.append(w)
        if len(nodes) > max_nodes:
            break
        if len(w) < depth:
            stack.extend(w + (x,) for x in sorted(successors(fam, w), reverse=True))
    else:
        return nodes, "exhaustive"
    rng = random.Random(seed)
    seen: dict[Word, None] = {(): None}
    for _ in range(walks):
        w: Word = ()
        while len(w) < depth:
            w = w + (rng.choice(sorted(successors(fam, w))),)
            seen[w] = None
    return list(seen), "sampled"


def enumerate_level(fam: TreeFamily, i: int, cap: int) -> list[Word]:
    """All of ``T_i`` in lexicographic order, refusing above ``cap`` words."""
    k = fam.levels[i].k
    if k > cap.bit_length() or fam.alphabet_size**k > cap:
        raise ValueError(f"|T_{i}| = {fam.alphabet_size}^{k} exceeds cap {cap}")
    ell = fam.levels[i].ell
    return [w for w in iter_prefixes(fam, ell, level=i) if len(w) == ell]


def random_word(fam: TreeFamily, i: int, rng: random.Random, length: int | None = None) -> Word:
    """A uniformly random element of ``T_i`` (or its first ``length`` letters)."""
    if not 0 <= i <= fam.depth:
        raise IndexError(f"level {i} not materialized (deepest is {fam.depth})")
    X = fam.alphabet_size
    limit = fam.levels[i].ell if length is None else min(length, fam.levels[i].ell)
    out: list[int] = []

    def build(j: int) -> None:
        if len(out) >= limit:
            return
        if j == 0:
            lv = fam.levels[0]
            free = rng.choices(range(X), k=lv.k)
            pad = [0] * (lv.ell - lv.k)
            out.extend(free + pad if fam.t0_variant == SUFFIX_PAD else pad + free)
            return
        step = fam.levels[j - 1]
        for _ in range(step.r):
            build(j - 1)
            if len(out) >= limit:
                return
        n = min(step.p * step.ell, limit - len(out))
        out.extend(rng.choices(range(X), k=n) if step.appendix == FULL else [0] * n)

    build(i)
    return tuple(out[:limit])


def parse_word(text: str, alphabet_size: int = 2) -> Word:
    """``"101"`` for alphabets up to 10 letters, ``"3,11,0"`` above that."""
    text = text.strip()
    if not text:
        return ()
    if alphabet_size > 10 or "," in text:
        letters = tuple(int(t) for t in text.split(","))
    else:
        if not text.isdigit():
            raise ValueError(f"malformed word {text!r}")
        letters = tuple(int(c) for c in text)
    for x in letters:
        if not 0 <= x < alphabet_size:
            raise ValueError(f"letter {x} outside alphabet of size {alphabet_size}")
    return letters


def format_word(w: Sequence[int], alphabet_size: int = 2) -> str:
    if alphabet_size > 10:
        return ",".join(str(x) for x in w)
    return "".join(str(x) for x in w)
