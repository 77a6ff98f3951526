"""Driving rational sequences ``q_0, q_1, ...`` for the tree construction.

A sequence is either an explicit finite list of rationals or one of the
builtin infinite families.  Every term must lie strictly between 0 and 1
and consecutive terms must differ.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

Rat = Fraction

_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rat(text) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer) into an exact Fraction.

    Floats are rejected on purpose; they would silently lose exactness.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ValueError(f"expected a rational string 'num/den', got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    m = _RAT_RE.match(text)
    if m is None:
        raise ValueError(f"malformed rational {text!r}")
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


def format_rat(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class SequenceError(ValueError):
    pass


@dataclass(frozen=True)
class ExplicitSequence:
    terms: tuple[Fraction, ...]
    kind: str = field(default="explicit", init=False)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(Fraction(t) for t in self.terms))

    @property
    def length(self) -> int | None:
        return len(self.terms)

    def term(self, i: int) -> Fraction:
        if not 0 <= i < len(self.terms):
            raise IndexError(f"index {i} out of range for explicit sequence of length {len(self.terms)}")
        return self.terms[i]

    def params(self) -> dict:
        return {"terms": [format_rat(t) for t in self.terms]}


def _check_open_unit(value: Fraction, i: int, name: str) -> Fraction:
    if not 0 < value < 1:
        raise SequenceError(f"{name} family produces q_{i} = {value}, outside (0,1)")
    return value


@dataclass(frozen=True)
class Alternating:
    """``q_i = c + (-1)^i * d / (i + m)``."""

    c: Fraction
    d: Fraction
    m: int
    kind: str = field(default="alternating", init=False)
    length = None

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "d", Fraction(self.d))
        if self.m < 1:
            raise SequenceError("alternating family needs m >= 1")
        if self.d == 0:
            raise SequenceError("alternating family needs d != 0 (consecutive terms would coincide)")

    def term(self, i: int) -> Fraction:
        if i < 0:
            raise IndexError(i)
        sign = 1 if i % 2 == 0 else -1
        return _check_open_unit(self.c + sign * self.d / (i + self.m), i, self.kind)

    def params(self) -> dict:
        return {"c": format_rat(self.c), "d": format_rat(self.d), "m": self.m}


@dataclass(frozen=True)
class GeometricDecay:
    """``q_i = target + (start - target) * ratio^i`` with ``0 < ratio < 1``."""

    start: Fraction
    target: Fraction
    ratio: Fraction
    kind: str = field(default="geometric", init=False)
    length = None

    def __post_init__(self):
        for name in ("start", "target", "ratio"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not 0 < self.ratio < 1:
            raise SequenceError("geometric family needs 0 < ratio < 1")
        if self.start == self.target:
            raise SequenceError("geometric family needs start != target")
        if not 0 < self.start < 1 or not 0 <= self.target <= 1:
            raise SequenceError("geometric family needs 0 < start < 1 and 0 <= target <= 1")

    def term(self, i: int) -> Fraction:
        if i < 0:
            raise IndexError(i)
        return _check_open_unit(self.target + (self.start - self.target) * self.ratio**i, i, self.kind)

    def params(self) -> dict:
        return {
            "start": format_rat(self.start),
            "target": format_rat(self.target),
            "ratio": format_rat(self.ratio),
        }


@dataclass(frozen=True)
class Oscillating:
    """Slow oscillation: the sign of the offset flips every ``period`` terms.

    ``q_i = c + s_i * d / (i + m)`` with ``s_i = (-1)^(i // period)``.  Runs
    of ``period`` terms approach ``c`` from one side, so windowed minima
    move non-monotonically as the window slides.
    """

    c: Fraction
    d: Fraction
    m: int
    period: int = 2
    kind: str = field(default="oscillating", init=False)
    length = None

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "d", Fraction(self.d))
        if self.m < 1 or self.period < 1:
            raise SequenceError("oscillating family needs m >= 1 and period >= 1")
        if self.d == 0:
            raise SequenceError("oscillating family needs d != 0")

    def term(self, i: int) -> Fraction:
        if i < 0:
            raise IndexError(i)
        sign = 1 if (i // self.period) % 2 == 0 else -1
        return _check_open_unit(self.c + sign * self.d / (i + self.m), i, self.kind)

    def params(self) -> dict:
        return {"c": format_rat(self.c), "d": format_rat(self.d), "m": self.m, "period": self.period}


QSequence = Union[ExplicitSequence, Alternating, GeometricDecay, Oscillating]

BUILTIN_FAMILIES = {
    "alternating": Alternating,
    "geometric": GeometricDecay,
    "oscillating": Oscillating,
}


def explicit(*terms) -> ExplicitSequence:
    return ExplicitSequence(tuple(parse_rat(t) for t in terms))


def builtin(kind: str, **params) -> QSequence:
    try:
        cls = BUILTIN_FAMILIES[kind]
    except KeyError:
        raise SequenceError(f"unknown builtin family {kind!r}; known: {sorted(BUILTIN_FAMILIES)}") from None
    converted = {}
    for key, value in params.items():
        if key in ("m", "period"):
            if isinstance(value, bool) or not isinstance(value, (int, str)):
                raise SequenceError(f"{key} must be an integer")
            converted[key] = int(value)
        else:
            converted[key] = parse_rat(value)
    try:
        return cls(**converted)
    except TypeError as exc:
        raise SequenceError(f"bad parameters for {kind!r}: {exc}") from None


def q_at(seq: QSequence, i: int) -> Fraction:
    return seq.term(i)


@dataclass(frozen=True)
class Violation:
    index: int
    kind: str  # "range" | "consecutive-equal" | "missing"
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    def __bool__(self) -> bool:
        return not self.violations

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "sequence admissible"
        return "; ".join(f"index {v.index}: {v.message}" for v in self.violations)


def validate_sequence(seq: QSequence, n: int) -> ValidationReport:
    """Check the first ``n`` terms for range and consecutive-distinctness."""
    if n < 1:
        raise ValueError("n must be >= 1")
    report = ValidationReport()
    prev = None
    for i in range(n):
        try:
            q = seq.term(i)
        except IndexError:
            report.violations.append(Violation(i, "missing", f"sequence has only {seq.length} terms"))
            break
        except SequenceError as exc:
            report.violations.append(Violation(i, "range", str(exc)))
            prev = None
            continue
        if not 0 < q < 1:
            report.violations.append(Violation(i, "range", f"q_{i} = {q} outside (0,1)"))
        if prev is not None and q == prev:
            report.violations.append(Violation(i, "consecutive-equal", f"consecutive terms equal (q_{i-1} = q_{i} = {q})"))
        prev = q
    return report


def liminf_window(seq: QSequence, start: int, stop: int) -> Fraction:
    """Minimum of ``q_start .. q_stop`` (inclusive).

    A finite stand-in for ``liminf q_i``; the true liminf is not finitely
    computable, so callers always name the window they trust.
    """
    if start > stop:
        raise ValueError(f"empty window [{start}, {stop}]")
    return min(seq.term(i) for i in range(start, stop + 1))
