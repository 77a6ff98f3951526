"""Martingale ``V_F``, sigma-gales and cut points, all in exact arithmetic.

Gale values built from ``V_F`` are powers of ``|X|`` with rational
exponents.  They are kept symbolic: a value is a finite sum
``sum_f c_f * b^f`` where ``b`` is the smallest integer with
``|X| = b^m``, ``f`` ranges over ``[0, 1)`` and ``c_f`` is rational.
Powers ``b^f`` with distinct ``f`` are linearly independent over the
rationals, so a sum with one term has an exact sign and a sum with
several terms is never zero unless every coefficient is; its sign is
then found by interval arithmetic at growing precision.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from mpmath.ctx_iv import MPIntervalContext

from .structure import ExponentFn
from .sequences import parse_rat
from .treefam import TreeFamily, Word, collect_prefixes, format_word, member_pref

log = logging.getLogger(__name__)

DEFAULT_PRECISION = 32


# -- exact powers -------------------------------------------------------------


def root_base(n: int) -> tuple[int, int]:
    """``(b, m)`` with ``n = b^m`` and ``m`` maximal."""
    if n < 2:
        raise ValueError("base must be >= 2")
    for m in range(n.bit_length(), 1, -1):
        b = round(n ** (1.0 / m))
        for cand in (b - 1, b, b + 1):
            if cand >= 2 and cand**m == n:
                return cand, m
    return n, 1


def _frac_split(x: Fraction) -> tuple[int, Fraction]:
    n = math.floor(x)
    return n, x - n


@dataclass(frozen=True)
class PowerValue:
    """``|X|^exponent``, or zero."""

    exponent: Fraction = Fraction(0)
    zero: bool = False

    @classmethod
    def of_zero(cls) -> PowerValue:
        return cls(Fraction(0), True)

    def __mul__(self, other: PowerValue) -> PowerValue:
        if self.zero or other.zero:
            return PowerValue.of_zero()
        return PowerValue(self.exponent + other.exponent)

    def scaled(self, shift: Fraction) -> PowerValue:
        """Multiply by ``|X|^shift``."""
        return self if self.zero else PowerValue(self.exponent + shift)

    def _key(self):
        return (0, 0) if self.zero else (1, self.exponent)

    def __lt__(self, other: PowerValue) -> bool:
        return self._key() < other._key()

    def __le__(self, other: PowerValue) -> bool:
        return self._key() <= other._key()

    def is_integral(self) -> bool:
        return self.zero or self.exponent.denominator == 1

    def to_fraction(self, base: int) -> Fraction:
        if self.zero:
            return Fraction(0)
        if self.exponent.denominator != 1:
            raise ValueError(f"{base}^{self.exponent} is irrational")
        return Fraction(base) ** int(self.exponent)

    def __str__(self) -> str:
        return "0" if self.zero else f"|X|^({self.exponent})"


GaleValue = Union[Fraction, PowerValue]


class PowerSum:
    """Exact ``sum_f c_f * b^f`` over a fixed alphabet size."""

    __slots__ = ("alphabet_size", "b", "m", "terms")

    def __init__(self, alphabet_size: int, terms: Mapping[Fraction, Fraction] | None = None):
        self.alphabet_size = alphabet_size
        self.b, self.m = root_base(alphabet_size)
        self.terms: dict[Fraction, Fraction] = {}
        for f, c in (terms or {}).items():
            self._add(f, c)

    def _add(self, exp_b: Fraction, coeff: Fraction) -> None:
        # exp_b is in units of log_b
        if coeff == 0:
            return
        n, f = _frac_split(Fraction(exp_b))
        c = self.terms.get(f, Fraction(0)) + Fraction(coeff) * Fraction(self.b) ** n
        if c == 0:
            self.terms.pop(f, None)
        else:
            self.terms[f] = c

    @classmethod
    def of(cls, value: GaleValue, alphabet_size: int) -> PowerSum:
        s = cls(alphabet_size)
        if isinstance(value, PowerValue):
            if not value.zero:
                s._add(value.exponent * s.m, Fraction(1))
        else:
            s._add(Fraction(0), Fraction(value))
        return s

    def copy(self) -> PowerSum:
        out = PowerSum.__new__(PowerSum)
        out.alphabet_size, out.b, out.m = self.alphabet_size, self.b, self.m
        out.terms = dict(self.terms)
        return out

    def __add__(self, other: PowerSum) -> PowerSum:
        out = self.copy()
        for f, c in other.terms.items():
            out._add(f, c)
        return out

    def __neg__(self) -> PowerSum:
        out = self.copy()
        out.terms = {f: -c for f, c in out.terms.items()}
        return out

    def __sub__(self, other: PowerSum) -> PowerSum:
        return self + (-other)

    def times_power(self, exponent: Fraction) -> PowerSum:
        """Multiply by ``|X|^exponent``."""
        out = PowerSum(self.alphabet_size)
        shift = Fraction(exponent) * self.m
        for f, c in self.terms.items():
            out._add(f + shift, c)
        return out

    def times_rational(self, c: Fraction) -> PowerSum:
        out = self.copy()
        if c == 0:
            out.terms = {}
        else:
            out.terms = {f: v * c for f, v in out.terms.items()}
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def as_rational(self) -> Fraction | None:
        if not self.terms:
            return Fraction(0)
        if set(self.terms) == {Fraction(0)}:
            return self.terms[Fraction(0)]
        return None

    def interval(self, prec: int):
        # private context: the shared mpmath.iv precision is global state
        iv = MPIntervalContext()
        iv.prec = prec
        total = iv.mpf(0)
        lb = iv.log(iv.mpf(self.b))
        for f, c in self.terms.items():
            term = iv.mpf(c.numerator) / iv.mpf(c.denominator)
            if f:
                term = term * iv.exp(lb * iv.mpf(f.numerator) / iv.mpf(f.denominator))
            total = total + term
        return total

    def sign(self) -> int:
        if not self.terms:
            return 0
        if len(self.terms) == 1:
            (c,) = self.terms.values()
            return 1 if c > 0 else -1
        prec = 64
        while True:
            lo, hi = _iv_bounds(self.interval(prec))
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            prec *= 2

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for f in sorted(self.terms):
            c = self.terms[f]
            if f == 0:
                parts.append(str(c))
            else:
                parts.append(f"{c}*{self.b}^({f})")
        return " + ".join(parts)


def _mpf_to_fraction(raw) -> Fraction:
    sign, man, exp, _ = raw
    v = Fraction(int(man)) * (Fraction(2) ** exp)
    return -v if sign else v


def _iv_bounds(x) -> tuple[Fraction, Fraction]:
    a, b = x._mpi_
    return _mpf_to_fraction(a), _mpf_to_fraction(b)


def format_gale_value(v: GaleValue) -> str:
    if isinstance(v, PowerValue):
        return "0" if v.zero else f"|X|^({v.exponent.numerator}/{v.exponent.denominator})"
    return f"{v.numerator}/{v.denominator}"


def parse_gale_value(text: str) -> GaleValue:
    text = text.strip()
    if text.startswith("|X|^"):
        body = text[4:].strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        return PowerValue(parse_rat(body))
    v = parse_rat(text)
    if v < 0:
        raise ValueError(f"gale values must be non-negative, got {text!r}")
    return v


# -- the martingale V_F --------------------------------------------------------


def vf_value(fam: TreeFamily, w: Sequence[int], fn: ExponentFn | None = None) -> PowerValue:
    """``V_F(w) = |X|^(|w| - e(|w|))`` on pref(F), zero elsewhere."""
    if not member_pref(fam, w):
        return PowerValue.of_zero()
    fn = fn or ExponentFn(fam)
    return PowerValue(Fraction(len(w) - fn.exponent(len(w))))


@dataclass(frozen=True)
class MartingaleViolation:
    word: Word
    expected: Fraction
    got: Fraction


@dataclass
class MartingaleReport:
    depth: int
    mode: str  # "exhaustive" or "sampled"
    nodes: int
    violations: list[MartingaleViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def martingale_defect(
    fam: TreeFamily,
    depth: int,
    *,
    max_nodes: int = 20_000,
    walks: int = 200,
    seed: int = 0,
    nodes: tuple[list[Word], str] | None = None,
) -> MartingaleReport:
    """Check ``sum_x V_F(wx) = |X| * V_F(w)`` on pref(F) up to ``depth``.

    Off-tree words carry zero and need no check.  When pref(F) has more
    than ``max_nodes`` nodes to that depth, seeded random descents through
    pref(F) are checked instead and the report says so.  A precomputed
    ``(nodes, mode)`` pair from :func:`collect_prefixes` may be passed in.
    """
    if depth >= fam.ell_last:
        raise ValueError(f"depth must be < ell_last = {fam.ell_last}")
    fn = ExponentFn(fam)
    base = fam.alphabet_size
    if nodes is None:
        nodes = collect_prefixes(fam, depth, max_nodes=max_nodes, walks=walks, seed=seed)
    nodes, mode = nodes
    rep = MartingaleReport(depth, mode, len(nodes))
    for w in nodes:
        v = vf_value(fam, w, fn)
        if v.zero:
            continue
        lhs = sum((vf_value(fam, w + (x,), fn).to_fraction(base) for x in range(base)), Fraction(0))
        rhs = base * v.to_fraction(base)
        if lhs != rhs:
            rep.violations.append(MartingaleViolation(w, rhs, lhs))
    return rep


# -- gales ---------------------------------------------------------------------


@dataclass
class GaleTable:
    sigma: Fraction | None
    alphabet_size: int
    values: dict[Word, GaleValue]

    def __post_init__(self):
        for w in self.values:
            if w and w[:-1] not in self.values:
                raise ValueError(f"domain is not prefix-closed: parent of {format_word(w, self.alphabet_size)!r} missing")
        for w, v in self.values.items():
            if isinstance(v, Fraction) and v < 0:
                raise ValueError(f"negative value at {format_word(w, self.alphabet_size)!r}")

    def value(self, w: Word) -> PowerSum:
        return PowerSum.of(self.values.get(w, Fraction(0)), self.alphabet_size)

    def non_leaves(self) -> list[Word]:
        parents = {w[:-1] for w in self.values if w}
        return sorted(parents, key=lambda w: (len(w), w))

    def children_sum(self, w: Word, warn: bool = True) -> PowerSum:
        total = PowerSum(self.alphabet_size)
        for x in range(self.alphabet_size):
            child = w + (x,)
            if child not in self.values:
                if warn:
                    log.warning("child %r of non-leaf %r absent; treating it as 0",
                                format_word(child, self.alphabet_size), format_word(w, self.alphabet_size))
                continue
            total = total + self.value(child)
        return total


def gale_from_martingale(
    V: Callable[[Word], PowerValue],
    sigma: Fraction,
    domain: Iterable[Word],
    alphabet_size: int,
) -> GaleTable:
    """``d(w) = V(w) / |X|^((1 - sigma) |w|)`` tabulated on ``domain``.

    Integral powers become exact Fractions; fractional ones stay symbolic.
    """
    sigma = Fraction(sigma)
    if not 0 <= sigma <= 1:
        raise ValueError("sigma must lie in [0, 1]")
    values: dict[Word, GaleValue] = {}
    for w in domain:
        w = tuple(w)
        d = V(w).scaled(-(1 - sigma) * len(w))
        values[w] = d.to_fraction(alphabet_size) if d.is_integral() else d
    return GaleTable(sigma, alphabet_size, values)


@dataclass(frozen=True)
class SupergaleViolation:
    word: Word
    slack: PowerSum  # |X|^sigma d(w) - sum_x d(wx), negative here

    def __str__(self) -> str:
        return f"{format_word(self.word, self.slack.alphabet_size) or 'e'}: slack {self.slack}"


def supergale_check(t: GaleTable, sigma: Fraction | None = None) -> list[SupergaleViolation]:
    """Nodes violating ``|X|^sigma * d(w) >= sum_x d(wx)``."""
    s = t.sigma if sigma is None else Fraction(sigma)
    if s is None:
        raise ValueError("no sigma given and the table carries none")
    out = []
    for w in t.non_leaves():
        slack = t.value(w).times_power(s) - t.children_sum(w)
        if slack.sign() < 0:
            out.append(SupergaleViolation(w, slack))
    return out


@dataclass(frozen=True)
class CutPoint:
    """Cut point of a table: exact, bracketed, or infinite.

    ``kind`` is ``"exact"`` (``lo == hi == value``), ``"bracket"``
    (``lo < chi <= hi``), ``"+inf"`` or ``"-inf"`` (no node constrains sigma).
    """

    kind: str
    lo: Fraction | None = None
    hi: Fraction | None = None
    witness: Word | None = None

    @property
    def value(self) -> Fraction | None:
        return self.lo if self.kind == "exact" else None

    def __str__(self) -> str:
        if self.kind == "exact":
            return f"{self.lo.numerator}/{self.lo.denominator}"
        if self.kind == "bracket":
            return f"[{self.lo}, {self.hi}]"
        return self.kind


def _exact_log(r: Fraction, b: int) -> int | None:
    # integer n with r == b^n, for b not a perfect power
    if r <= 0:
        return None
    num, den = r.numerator, r.denominator
    if num != 1 and den != 1:
        return None
    big, sign = (num, 1) if den == 1 else (den, -1)
    n = 0
    while big % b == 0:
        big //= b
        n += 1
    return sign * n if big == 1 else None


def _bisect_log(rho: PowerSum, bits: int) -> tuple[Fraction, Fraction]:
    """Bracket ``log_|X| rho`` to width ``2^-bits`` by bisection.

    The predicate ``|X|^q >= rho`` is monotone in ``q``; it is decided with
    interval arithmetic, doubling precision until the interval is clear.
    """
    m = rho.m
    approx, _ = _iv_bounds(rho.interval(64))
    est = 0.0
    if approx > 0:
        est = (math.log(approx.numerator) - math.log(approx.denominator)) / math.log(rho.alphabet_size)
    lo, hi = Fraction(math.floor(est) - 1), Fraction(math.ceil(est) + 1)

    def holds(q: Fraction) -> bool:
        return (PowerSum(rho.alphabet_size, {q * m: Fraction(1)}) - rho).sign() >= 0

    while holds(lo):
        lo -= 1
    while not holds(hi):
        hi += 1
    width = Fraction(1, 2**bits)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if holds(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def node_log_ratio(t: GaleTable, w: Word, bits: int = DEFAULT_PRECISION):
    """``log_|X| (sum_x d(wx) / d(w))`` for one node: exact, bracket, or None for 0."""
    dw = t.values.get(w, Fraction(0))
    children = t.children_sum(w, warn=False)
    if children.is_zero():
        return None
    if isinstance(dw, PowerValue):
        rho = children.times_power(-dw.exponent)
    else:
        rho = children.times_rational(1 / Fraction(dw))
    if len(rho.terms) == 1:
        ((f, c),) = rho.terms.items()
        n = _exact_log(c, rho.b)
        if n is not None:
            return Fraction(n + f, rho.m)
    lo, hi = _bisect_log(rho, bits)
    return lo, hi


def _is_positive(v: GaleValue) -> bool:
    return (not v.zero) if isinstance(v, PowerValue) else v > 0


def cut_point(t: GaleTable, precision: int = DEFAULT_PRECISION) -> CutPoint:
    """Smallest sigma making the table a sigma-supergale."""
    if not t.values:
        raise ValueError("empty gale table")
    best_exact: tuple[Fraction, Word] | None = None
    brackets: list[tuple[Fraction, Fraction, Word]] = []
    for w in t.non_leaves():
        dw = t.values.get(w, Fraction(0))
        if not _is_positive(dw):
            if not t.children_sum(w, warn=False).is_zero():
                return CutPoint("+inf", witness=w)
            continue
        r = node_log_ratio(t, w, precision)
        if r is None:
            continue
        if isinstance(r, Fraction):
            if best_exact is None or r > best_exact[0]:
                best_exact = (r, w)
        else:
            brackets.append((r[0], r[1], w))
    if best_exact is None and not brackets:
        return CutPoint("-inf")
    if not brackets or (best_exact is not None and best_exact[0] >= max(h for _, h, _ in brackets)):
        return CutPoint("exact", best_exact[0], best_exact[0], best_exact[1])
    lo_b, hi_b, w_b = max(brackets, key=lambda x: x[1])
    lo = max([lo for lo, _, _ in brackets] + ([best_exact[0]] if best_exact else []))
    return CutPoint("bracket", lo, hi_b, w_b)


def shadow_check(t: GaleTable, alpha_hat: Fraction, precision: int = DEFAULT_PRECISION) -> tuple[Fraction | None, list]:
    """Pick a rational ``q`` strictly between the cut point and ``alpha_hat``.

    Returns ``(q, violations of the q-supergale condition)``; ``q`` is None
    when no such rational exists (cut point not below ``alpha_hat``).
    """
    cp = cut_point(t, precision)
    alpha_hat = Fraction(alpha_hat)
    if cp.kind == "+inf":
        return None, []
    upper = cp.hi if cp.kind in ("exact", "bracket") else alpha_hat - 1
    if upper >= alpha_hat:
        return None, []
    q = (upper + alpha_hat) / 2
    return q, supergale_check(t, q)


def vf_gale_table(fam: TreeFamily, sigma: Fraction, depth: int) -> GaleTable:
    """Gale table of ``V_F`` at ``sigma`` on pref(F) up to ``depth`` plus off-tree children."""
    fn = ExponentFn(fam)
    domain: list[Word] = []
    stack: list[Word] = [()]
    while stack:
        w = stack.pop()
        domain.append(w)
        if len(w) < depth and member_pref(fam, w):
            stack.extend(w + (x,) for x in range(fam.alphabet_size))
    return gale_from_martingale(lambda w: vf_value(fam, w, fn), sigma, domain, fam.alphabet_size)


def full_gale_table(V: Callable[[Word], PowerValue], sigma: Fraction, depth: int, alphabet_size: int) -> GaleTable:
    """Gale table on every word of length ``<= depth``."""
    domain: list[Word] = [()]
    frontier: list[Word] = [()]
    for _ in range(depth):
        frontier = [w + (x,) for w in frontier for x in range(alphabet_size)]
        domain.extend(frontier)
    return gale_from_martingale(V, sigma, domain, alphabet_size)


# -- witness exponents -------------------------------------------------------


@dataclass(frozen=True)
class WitnessRecord:
    level: int
    q: Fraction
    ell: int
    thm2_exponent: Fraction  # log_|X| of d(w) at w in pref F of length ell_i
    borderline_exponent: Fraction  # alpha_hat * ell_i - e(ell_i)
    scan_flag: bool  # alpha_hat - q_i > 1/i
    flag_bound_ok: bool | None  # borderline >= ell_i / i, when flagged
    ell_ge_i_squared: bool


def witness_exponents(
    fam: TreeFamily, sigma: Fraction, alpha_hat: Fraction, levels: Iterable[int] | None = None
) -> list[WitnessRecord]:
    """Per-level growth exponents of the gale and borderline ratios.

    ``thm2_exponent`` is computed along the gale path: the exponent of
    ``V_F(w) / |X|^((1-sigma)|w|)`` at ``|w| = ell_i``, which equals
    ``(sigma - q_i) * ell_i``.
    """
    sigma, alpha_hat = Fraction(sigma), Fraction(alpha_hat)
    if not (0 < sigma < 1 and 0 < alpha_hat < 1):
        raise ValueError("sigma and alpha_hat must lie in (0, 1)")
    fn = ExponentFn(fam)
    idx = range(fam.depth + 1) if levels is None else levels
    out = []
    for i in idx:
        if not 0 <= i <= fam.depth:
            raise IndexError(f"level {i} not materialized (deepest is {fam.depth})")
        lv = fam.levels[i]
        e = fn.exponent(lv.ell)
        v_exp = Fraction(lv.ell - e)
        thm2 = v_exp - (1 - sigma) * lv.ell
        border = alpha_hat * lv.ell - e
        flag = i >= 1 and alpha_hat - lv.q > Fraction(1, i)
        bound_ok = (border >= Fraction(lv.ell, i)) if flag else None
        out.append(WitnessRecord(i, lv.q, lv.ell, thm2, border, flag, bound_ok, lv.ell >= i * i))
    return out
