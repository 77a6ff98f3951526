"""Per-level parameters ``(k, ell, r, p, kappa)`` from consecutive ``q_i``.

Given ``q = k/ell`` and the next target ``q'``, write ``q'/q = a/b`` in
lowest terms and scale both by an integer ``c``.  Decreasing steps repeat
``T_i`` ``a`` times and append a fixed word; increasing steps append a
free block so the free-letter density climbs to ``q'``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .sequences import QSequence, validate_sequence
from .treefam import FULL, SINGLETON, SUFFIX_PAD, LevelParams, TreeFamily


class DerivationError(ValueError):
    pass


@dataclass(frozen=True)
class PolySpec:
    """Integer polynomial ``c0 + c1*i + c2*i^2 + ...`` in the level index.

    Text forms: ``const:C``, ``linear:C`` (C*i), ``quadratic:C`` (C*i^2),
    ``poly:c0,c1,...``.
    """

    coeffs: tuple[int, ...]

    def __call__(self, i: int) -> int:
        # values below 1 are clamped: a minimum of 0 imposes nothing
        return max(1, sum(c * i**n for n, c in enumerate(self.coeffs)))

    @classmethod
    def parse(cls, text: str) -> PolySpec:
        m = re.fullmatch(r"\s*(const|constant|linear|quadratic|poly)\s*:\s*([-\d,\s]+)", text)
        if m is None:
            raise ValueError(f"malformed growth spec {text!r}")
        kind, body = m.group(1), m.group(2)
        try:
            nums = [int(t) for t in body.split(",")]
        except ValueError:
            raise ValueError(f"malformed growth spec {text!r}") from None
        if kind != "poly" and len(nums) != 1:
            raise ValueError(f"{kind} spec takes one coefficient: {text!r}")
        if kind in ("const", "constant"):
            coeffs = (nums[0],)
        elif kind == "linear":
            coeffs = (0, nums[0])
        elif kind == "quadratic":
            coeffs = (0, 0, nums[0])
        else:
            coeffs = tuple(nums)
        if any(c < 0 for c in coeffs):
            raise ValueError(f"growth spec coefficients must be non-negative: {text!r}")
        return cls(coeffs)

    def __str__(self) -> str:
        c = self.coeffs
        if len(c) == 1:
            return f"const:{c[0]}"
        if len(c) == 2 and c[0] == 0:
            return f"linear:{c[1]}"
        if len(c) == 3 and c[0] == 0 and c[1] == 0:
            return f"quadratic:{c[2]}"
        return "poly:" + ",".join(str(x) for x in c)


@dataclass(frozen=True)
class GrowthPolicy:
    min_ell: PolySpec
    min_ratio: PolySpec


DEFAULT_POLICY = GrowthPolicy(min_ell=PolySpec((0, 0, 1)), min_ratio=PolySpec((1, 1)))
TRIVIAL_POLICY = GrowthPolicy(min_ell=PolySpec((1,)), min_ratio=PolySpec((1,)))


@dataclass(frozen=True)
class LevelStep:
    r: int
    p: int
    kappa: int
    appendix: str
    k_next: int
    ell_next: int


def _base_ratio(q: Fraction, q_next: Fraction) -> tuple[int, int]:
    ratio = Fraction(q_next) / Fraction(q)
    return ratio.numerator, ratio.denominator


def derive_level(q: Fraction, q_next: Fraction, k: int, ell: int, scale: int = 1) -> LevelStep:
    """One construction step from ``(k, ell)`` with ``k/ell = q`` towards ``q_next``."""
    q, q_next = Fraction(q), Fraction(q_next)
    if q == q_next:
        raise DerivationError(f"consecutive q values are equal ({q}); the construction excludes this")
    if not (0 < q < 1 and 0 < q_next < 1):
        raise DerivationError(f"q values must lie in (0,1): {q}, {q_next}")
    if Fraction(k, ell) != q:
        raise DerivationError(f"k/ell = {k}/{ell} does not equal q = {q}")
    if scale < 1:
        raise DerivationError("scale must be >= 1")
    a, b = _base_ratio(q, q_next)
    a, b = a * scale, b * scale
    if q > q_next:
        r, p, kappa, appendix = a, b - a, 0, SINGLETON
    else:
        r = b * ell - a * k
        p = kappa = (a - b) * k
        appendix = FULL
    if r < 1 or p < 1:
        raise DerivationError(f"degenerate step r={r}, p={p} for q={q} -> {q_next}")
    ell_next = (r + p) * ell
    k_next = r * k + kappa * ell
    if Fraction(k_next, ell_next) != q_next:
        raise DerivationError(f"exactness check failed: {k_next}/{ell_next} != {q_next}")
    return LevelStep(r, p, kappa, appendix, k_next, ell_next)


def bound_chain_holds(q: Fraction, q_next: Fraction, k: int, ell: int, r: int, t: int) -> bool:
    """Density of the step after ``t`` appendix letters stays between q and q_next."""
    if q > q_next:
        mid = Fraction(r * k, r * ell + t)
        return q >= mid >= q_next
    mid = Fraction(r * k + t, r * ell + t)
    return q <= mid <= q_next


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def minimal_scale(q: Fraction, q_next: Fraction, k: int, ell: int, target_ell: int) -> int:
    # ell_next is linear in the scale in both branches
    base = derive_level(q, q_next, k, ell, 1).ell_next
    return max(1, _ceil_div(target_ell, base))


def derive_family(
    seq: QSequence,
    n_levels: int,
    policy: GrowthPolicy = DEFAULT_POLICY,
    t0_variant: str = SUFFIX_PAD,
    alphabet_size: int = 2,
) -> TreeFamily:
    """Levels ``0..n_levels`` with every ``k_i/ell_i = q_i`` exactly."""
    if n_levels < 0:
        raise DerivationError("n_levels must be >= 0")
    report = validate_sequence(seq, n_levels + 1)
    if not report.ok:
        raise DerivationError(f"inadmissible sequence: {report}")
    qs = [seq.term(i) for i in range(n_levels + 1)]

    q0 = qs[0]
    mult = _ceil_div(policy.min_ell(0), q0.denominator)
    k, ell = q0.numerator * mult, q0.denominator * mult

    levels: list[LevelParams] = []
    for i in range(n_levels):
        target = max(policy.min_ell(i + 1), policy.min_ratio(i) * ell)
        scale = minimal_scale(qs[i], qs[i + 1], k, ell, target)
        step = derive_level(qs[i], qs[i + 1], k, ell, scale)
        levels.append(LevelParams(k, ell, step.r, step.p, step.kappa, step.appendix))
        k, ell = step.k_next, step.ell_next
    levels.append(LevelParams(k, ell))
    return TreeFamily(alphabet_size, t0_variant, tuple(levels), tuple(qs))


def family_violations(fam: TreeFamily) -> list[str]:
    """Every broken recurrence or invariant of the level parameters.

    Empty for any family produced by :func:`derive_family`; used to reject
    hand-edited or corrupted family documents before the symbolic checks.
    """
    out: list[str] = []
    lv = fam.levels
    if fam.declared_q is not None:
        if len(fam.declared_q) != len(lv):
            out.append(f"{len(fam.declared_q)} declared q values for {len(lv)} levels")
        for i, (q, level) in enumerate(zip(fam.declared_q, lv)):
            if level.q != q:
                out.append(f"level {i}: k/ell = {level.k}/{level.ell} != declared q = {q}")
    for i, level in enumerate(lv):
        if not 0 < level.k < level.ell:
            out.append(f"level {i}: need 0 < k < ell (k={level.k}, ell={level.ell})")
    for i, level in enumerate(lv[:-1]):
        nxt = lv[i + 1]
        if level.r < 1 or level.p < 1:
            out.append(f"level {i}: need r >= 1 and p >= 1 (r={level.r}, p={level.p})")
            continue
        if nxt.ell != (level.r + level.p) * level.ell:
            out.append(f"level {i}: ell_{i+1} = {nxt.ell} != (r+p)*ell = {(level.r + level.p) * level.ell}")
        if nxt.k != level.r * level.k + level.kappa * level.ell:
            out.append(f"level {i}: k_{i+1} = {nxt.k} != r*k + kappa*ell = {level.r * level.k + level.kappa * level.ell}")
        up = nxt.q > level.q
        if nxt.q == level.q:
            out.append(f"level {i}: q_{i} = q_{i+1} = {level.q}")
        elif up and not (level.kappa == level.p and level.appendix == FULL):
            out.append(f"level {i}: increasing step needs kappa = p and a full appendix")
        elif not up and not (level.kappa == 0 and level.appendix == SINGLETON):
            out.append(f"level {i}: decreasing step needs kappa = 0 and a singleton appendix")
    return out
