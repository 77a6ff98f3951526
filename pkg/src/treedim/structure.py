"""Structure function of F in exponent form.

``s_F(ell)`` is always an exact power of ``|X|``, so everything here works
with ``e(ell) = log_|X| s_F(ell)``, a natural number.  ``e`` is evaluated
by a mixed-radix walk down the levels: a length inside the copy region of
level ``i`` splits into whole ``T_i`` blocks plus a shorter remainder,
and a length inside the appendix adds either nothing or one per letter.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .treefam import FULL, PREFIX_PAD, SUFFIX_PAD, DepthExceeded, TreeFamily

EXHAUSTIVE_LIMIT = 10**5
SAMPLE_POINTS = 10**3


class ExponentFn:
    """Memoized ``ell -> e(ell)`` for one tree family.

    The cache is an implementation detail: results are identical with or
    without it, and single dict writes keep concurrent readers safe.
    """

    def __init__(self, fam: TreeFamily):
        self.fam = fam
        self._ells = fam.ells
        self._cache: dict[int, int] = {}

    def __call__(self, ell: int) -> int:
        return self.exponent(ell)

    def exponent(self, ell: int) -> int:
        if ell < 0:
            raise ValueError("length must be >= 0")
        if ell > self.fam.ell_last:
            raise DepthExceeded(
                f"length {ell} exceeds the deepest materialized ell_{self.fam.depth} = {self.fam.ell_last}"
            )
        hit = self._cache.get(ell)
        if hit is None:
            hit = self._cache[ell] = self._compute(ell)
        return hit

    def _compute(self, ell: int) -> int:
        levels = self.fam.levels
        acc = 0
        while ell:
            i = bisect.bisect_right(self._ells, ell) - 1
            if i < 0:
                return acc + self._base(ell)
            lv = levels[i]
            if not lv.has_step:
                # only reachable with ell == ell_last
                return acc + lv.k
            if ell <= lv.r * lv.ell:
                j, ell = divmod(ell, lv.ell)
                acc += j * lv.k
                continue
            t = ell - lv.r * lv.ell
            return acc + lv.r * lv.k + (t if lv.appendix == FULL else 0)
        return acc

    def _base(self, t: int) -> int:
        lv = self.fam.levels[0]
        if self.fam.t0_variant == SUFFIX_PAD:
            return min(t, lv.k)
        assert self.fam.t0_variant == PREFIX_PAD
        return max(0, t - (lv.ell - lv.k))

    def density(self, ell: int) -> Fraction:
        if ell < 1:
            raise ValueError("density needs ell >= 1")
        return Fraction(self.exponent(ell), ell)


def exponent(fn: ExponentFn, ell: int) -> int:
    return fn.exponent(ell)


def density(fn: ExponentFn, ell: int) -> Fraction:
    return fn.density(ell)


def sample_lengths(lo: int, hi: int, must: Iterable[int] = ()) -> list[int]:
    """All of ``[lo, hi]`` when small, else endpoints plus evenly spaced points."""
    if hi < lo:
        return []
    if hi - lo <= EXHAUSTIVE_LIMIT:
        return list(range(lo, hi + 1))
    pts = {lo, hi}
    pts.update(x for x in must if lo <= x <= hi)
    span = hi - lo
    for n in range(1, SAMPLE_POINTS + 1):
        pts.add(lo + span * n // (SAMPLE_POINTS + 1))
    return sorted(pts)


@dataclass(frozen=True)
class Segment:
    level: int
    lo: int
    hi: int
    lower: Fraction
    upper: Fraction
    regime: str  # "copy", "copy-base" or "appendix"
    checked: int


@dataclass
class DensityCertificate:
    level: int
    segments: list[Segment] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_bounds(fn: ExponentFn, i: int) -> DensityCertificate:
    """Certify the density bounds on ``[ell_i, ell_{i+1}]``.

    Copy region ``[ell_i, r_i*ell_i)``: density is at least
    ``(1 - ell_{i-1}/ell_i) * min(q_{i-1}, q_i)``.  For ``i = 0`` there is no
    earlier level; every length there is at least one whole ``T_0`` block
    and less than one more, which gives ``q_0 / 2``.

    Appendix region ``[r_i*ell_i, ell_{i+1}]``: density lies between ``q_i``
    and ``q_{i+1}``.
    """
    fam = fn.fam
    if not 0 <= i < fam.depth:
        raise IndexError(f"check_bounds needs levels {i} and {i + 1} materialized")
    lv, nxt = fam.levels[i], fam.levels[i + 1]
    q_i, q_n = lv.q, nxt.q
    cert = DensityCertificate(level=i)
    split = lv.r * lv.ell

    if i == 0:
        copy_lower, regime = q_i / 2, "copy-base"
    else:
        prev = fam.levels[i - 1]
        copy_lower, regime = (1 - Fraction(prev.ell, lv.ell)) * min(prev.q, q_i), "copy"
    # block boundaries carry the equality cases
    must = [lv.ell * j for j in (1, 2, lv.r - 1, lv.r)] + [split - 1, split + 1]
    copy_pts = sample_lengths(lv.ell, split - 1, must) if lv.r > 1 else []
    for ell in copy_pts:
        d = fn.density(ell)
        if not copy_lower <= d <= 1:
            cert.violations.append(f"level {i} copy region: density({ell}) = {d} below {copy_lower}")
    cert.segments.append(Segment(i, lv.ell, split, copy_lower, Fraction(1), regime, len(copy_pts)))

    lo_b, hi_b = min(q_i, q_n), max(q_i, q_n)
    app_pts = sample_lengths(split, nxt.ell)
    for ell in app_pts:
        d = fn.density(ell)
        if not lo_b <= d <= hi_b:
            cert.violations.append(
                f"level {i} appendix region: density({ell}) = {d} outside [{lo_b}, {hi_b}]"
            )
    cert.segments.append(Segment(i, split, nxt.ell, lo_b, hi_b, "appendix", len(app_pts)))
    return cert


def block_boundary_violations(fn: ExponentFn, max_blocks: int = 1000) -> list[str]:
    """``e(j * ell_i) = j * k_i`` for ``1 <= j <= r_i`` (sampled when r_i is huge)."""
    out = []
    for i, lv in enumerate(fn.fam.levels):
        js = [1] if not lv.has_step else sorted({*range(1, min(lv.r, max_blocks) + 1), lv.r})
        for j in js:
            e = fn.exponent(j * lv.ell)
            if e != j * lv.k:
                out.append(f"level {i}: e({j}*ell_{i}) = {e} != {j}*k_{i} = {j * lv.k}")
    return out


@dataclass(frozen=True)
class DimensionEstimate:
    empirical_min_density: Fraction
    block_densities: list[tuple[int, int, Fraction]]  # (level, ell_i, density)
    certified_lower: Fraction
    max_ell_ratio: Fraction  # largest ell_{i-1}/ell_i seen


def dim_estimate(fn: ExponentFn, up_to: int) -> DimensionEstimate:
    fam = fn.fam
    if fam.depth < 1 or up_to < fam.levels[1].ell:
        raise ValueError("dim_estimate needs up_to >= ell_1")
    if up_to > fam.ell_last:
        raise DepthExceeded(f"up_to = {up_to} exceeds ell_last = {fam.ell_last}")
    blocks = [(i, lv.ell, fn.density(lv.ell)) for i, lv in enumerate(fam.levels) if lv.ell <= up_to]
    lowers, ratios = [], []
    for i, _, _ in blocks[1:]:
        ratio = Fraction(fam.levels[i - 1].ell, fam.levels[i].ell)
        qs = [fam.q(j) for j in (i - 1, i, i + 1) if j <= fam.depth]
        lowers.append((1 - ratio) * min(qs))
        ratios.append(ratio)
    return DimensionEstimate(
        empirical_min_density=min(d for _, _, d in blocks),
        block_densities=blocks,
        certified_lower=min(lowers),
        max_ell_ratio=max(ratios),
    )


@dataclass
class MonotoneReport:
    direction: str
    alpha_hat: Fraction
    checked: int
    violations: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def monotone_check(fn: ExponentFn, direction: str, alpha_hat: Fraction, up_to: int) -> MonotoneReport:
    """Compare ``e(ell)`` against ``alpha_hat * ell`` on ``1 .. up_to``.

    Decreasing sequences (suffix-padded ``T_0``) stay above the line,
    increasing ones (prefix-padded) stay below it.
    """
    fam = fn.fam
    expected = {"decreasing": SUFFIX_PAD, "increasing": PREFIX_PAD}
    if direction not in expected:
        raise ValueError(f"direction must be 'decreasing' or 'increasing', got {direction!r}")
    if fam.t0_variant != expected[direction]:
        raise ValueError(
            f"variant mismatch: {direction} families need t0_variant={expected[direction]!r}, "
            f"got {fam.t0_variant!r}"
        )
    qs = [fam.q(i) for i in range(fam.depth + 1)]
    pairs = list(zip(qs, qs[1:]))
    if direction == "decreasing" and any(b >= a for a, b in pairs):
        raise ValueError("q sequence is not strictly decreasing on the materialized levels")
    if direction == "increasing" and any(b <= a for a, b in pairs):
        raise ValueError("q sequence is not strictly increasing on the materialized levels")
    alpha_hat = Fraction(alpha_hat)
    up_to = min(up_to, fam.ell_last)
    must = []
    for lv in fam.levels:
        if lv.has_step:
            must += [lv.ell, lv.r * lv.ell, lv.r * lv.ell + 1]
    pts = sample_lengths(1, up_to, must)
    rep = MonotoneReport(direction, alpha_hat, len(pts))
    for ell in pts:
        e = fn.exponent(ell)
        bad = e < alpha_hat * ell if direction == "decreasing" else e > alpha_hat * ell
        if bad:
            rep.violations.append(ell)
    return rep
