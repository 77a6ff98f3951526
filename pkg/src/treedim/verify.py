"""The invariant suite behind ``treedim verify``."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from . import oracle
from .derivation import bound_chain_holds, family_violations
from .gales import cut_point, martingale_defect, supergale_check, vf_gale_table, vf_value
from .structure import ExponentFn, block_boundary_violations, check_bounds, monotone_check
from .treefam import (
    PREFIX_PAD,
    SUFFIX_PAD,
    TreeFamily,
    collect_prefixes,
    enumerate_level,
    format_word,
    member_pref,
    random_word,
    successors,
)

# prefixes walked exhaustively by the symmetry and martingale checks before sampling
PREFIX_NODES = 5000
# largest |X|^len word space scanned exhaustively by the extension check
EXTENSION_EXHAUSTIVE = 2**14
# longest T_{i+1} words sampled by the extension check, and how many
EXTENSION_MAX_LEN = 10**6
EXTENSION_SAMPLES = 200
# largest s_F(depth) for the gale table check
GALE_NODES = 2**10
# longest level compared through its factor list when T_i itself is too big
FACTOR_MAX_LEN = 10**4


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}" + (f": {self.detail}" if self.detail else "")


def _result(name: str, problems: list[str], note: str = "") -> CheckResult:
    if problems:
        shown = "; ".join(problems[:5])
        more = f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""
        return CheckResult(name, False, shown + more)
    return CheckResult(name, True, note)


def check_bound_chains(fam: TreeFamily) -> CheckResult:
    problems = []
    for i, lv in enumerate(fam.levels[:-1]):
        q, q_next = lv.q, fam.levels[i + 1].q
        top = lv.p * lv.ell
        for t in (0, top // 2, top):
            if not bound_chain_holds(q, q_next, lv.k, lv.ell, lv.r, t):
                problems.append(f"level {i}, t={t}")
    return _result("bound-chain", problems)


def check_density(fam: TreeFamily, fn: ExponentFn) -> CheckResult:
    problems = block_boundary_violations(fn)
    segments = 0
    for i in range(fam.depth):
        cert = check_bounds(fn, i)
        problems += cert.violations
        segments += len(cert.segments)
    return _result("density-bounds", problems, f"{segments} segments certified")


def check_oracle(fam: TreeFamily, fn: ExponentFn, cap: int) -> CheckResult:
    """Symbolic results against explicit enumeration, level by level."""
    X = fam.alphabet_size
    problems, notes = [], []
    for i, lv in enumerate(fam.levels):
        try:
            lang = oracle.brute_trees(fam, i, cap)
        except oracle.CapExceeded:
            if lv.ell > FACTOR_MAX_LEN:
                notes.append(f"level {i} beyond cap")
                continue
            try:
                factors = oracle.brute_factors(fam, i, cap)
            except oracle.CapExceeded:
                notes.append(f"level {i} beyond cap")
                continue
            size = 1
            for f in factors:
                size *= len(f)
            if size != X**lv.k:
                problems.append(f"level {i}: product size {size} != |X|^k")
            counts = oracle.product_structure(factors)
            bad = [n for n in range(lv.ell + 1) if counts[n] != X ** fn.exponent(n)]
            if bad:
                problems.append(f"level {i}: prefix counts differ at lengths {bad[:5]}")
            notes.append(f"level {i} via factors")
            continue
        if len(lang) != X**lv.k:
            problems.append(f"level {i}: |T_i| = {len(lang)} != |X|^{lv.k}")
        counts = oracle.brute_structure(lang)
        bad = [n for n in range(lv.ell + 1) if counts[n] != X ** fn.exponent(n)]
        if bad:
            problems.append(f"level {i}: prefix counts differ at lengths {bad[:5]}")
        if enumerate_level(fam, i, cap) != sorted(lang.words):
            problems.append(f"level {i}: enumerate_level disagrees with the explicit product")
        if not oracle.brute_balance(lang):
            problems.append(f"level {i}: explicit tree is not balanced")
        mart = oracle.brute_martingale(lang)
        for w, v in mart.items():
            got = vf_value(fam, w, fn).to_fraction(X)
            if got != v:
                problems.append(f"level {i}: V_F({format_word(w, X)!r}) = {got}, recursion gives {v}")
                break
        notes.append(f"level {i} explicit")
    return _result("oracle", problems, ", ".join(notes))


def _nodes(fam: TreeFamily, depth: int) -> tuple[int, tuple[list, str]]:
    depth = min(depth, fam.ell_last - 1)
    return depth, collect_prefixes(fam, depth, max_nodes=PREFIX_NODES)


def check_symmetry(fam: TreeFamily, depth: int, nodes=None) -> CheckResult:
    if nodes is None:
        depth, nodes = _nodes(fam, depth)
    nodes, mode = nodes
    problems = []
    by_len: dict[int, set[int]] = {}
    for w in nodes:
        if len(w) >= fam.ell_last:
            continue
        try:
            n = len(successors(fam, w))
        except AssertionError as exc:
            problems.append(str(exc))
            continue
        by_len.setdefault(len(w), set()).add(n)
    problems += [f"length {n}: successor counts {sorted(c)}" for n, c in by_len.items() if len(c) > 1]
    return _result("spherical-symmetry", problems, f"{len(nodes)} prefixes, {mode}, depth {depth}")


def check_extension(fam: TreeFamily, seed: int = 0) -> CheckResult:
    """pref(T_i) and pref(T_{i+1}) agree on words of length <= ell_i."""
    X = fam.alphabet_size
    rng = random.Random(seed)
    problems, modes = [], []
    for i in range(fam.depth):
        ell = fam.levels[i].ell
        if ell < EXTENSION_EXHAUSTIVE.bit_length() and X**ell <= EXTENSION_EXHAUSTIVE:
            words = (w for n in range(ell + 1) for w in itertools.product(range(X), repeat=n))
            modes.append("exhaustive")
        elif fam.levels[i + 1].ell <= EXTENSION_MAX_LEN:
            # prefixes of random members of T_{i+1}, and one-letter mutations of them
            words = []
            for _ in range(EXTENSION_SAMPLES):
                w = random_word(fam, i + 1, rng, rng.randint(0, ell))
                words.append(w)
                if w:
                    j = rng.randrange(len(w))
                    words.append(w[:j] + ((w[j] + 1) % X,) + w[j + 1:])
            modes.append("sampled")
        else:
            modes.append(f"level {i} skipped")
            continue
        for w in words:
            if member_pref(fam, w, level=i) != member_pref(fam, w, level=i + 1):
                problems.append(f"level {i}: {format_word(w, X)!r}")
                break
    return _result("extension", problems, ", ".join(sorted(set(modes))))


def check_martingale(fam: TreeFamily, depth: int, nodes=None) -> CheckResult:
    if nodes is None:
        depth, nodes = _nodes(fam, depth)
    rep = martingale_defect(fam, depth, nodes=nodes)
    problems = [f"{format_word(v.word, fam.alphabet_size) or 'e'}: sum {v.got} != {v.expected}" for v in rep.violations]
    return _result("martingale", problems, f"{rep.nodes} nodes, {rep.mode}, depth {depth}")


def check_gale(fam: TreeFamily, fn: ExponentFn, depth: int, sigma: Fraction) -> CheckResult:
    """The V_F gale at sigma is a sigma-supergale with cut point exactly sigma."""
    d = min(depth, fam.ell_last - 1)
    while d > 1 and fam.alphabet_size ** fn.exponent(d) > GALE_NODES:
        d -= 1
    table = vf_gale_table(fam, sigma, d)
    problems = [str(v) for v in supergale_check(table)]
    cp = cut_point(table)
    if cp.kind != "exact" or cp.value != sigma:
        problems.append(f"cut point {cp} != sigma = {sigma}")
    return _result("gale", problems, f"sigma={sigma}, depth {d}, {len(table.values)} words")


def check_monotone(fam: TreeFamily, fn: ExponentFn) -> CheckResult:
    qs = [fam.q(i) for i in range(fam.depth + 1)]
    pairs = list(zip(qs, qs[1:]))
    if pairs and all(b < a for a, b in pairs) and fam.t0_variant == SUFFIX_PAD:
        rep = monotone_check(fn, "decreasing", min(qs), fam.ell_last)
    elif pairs and all(b > a for a, b in pairs) and fam.t0_variant == PREFIX_PAD:
        rep = monotone_check(fn, "increasing", max(qs), fam.ell_last)
    else:
        return CheckResult("monotone", True, "not applicable")
    return _result("monotone", [f"length {n}" for n in rep.violations],
                   f"{rep.direction}, alpha_hat={rep.alpha_hat}, {rep.checked} lengths")


def run_suite(
    fam: TreeFamily,
    depth: int,
    *,
    cap: int = oracle.DEFAULT_CAP,
    sigma: Fraction | None = None,
) -> list[CheckResult]:
    """Run every check; structural failures stop the rest."""
    violations = family_violations(fam)
    results = [_result("parameters", violations, f"{fam.depth + 1} levels")]
    if violations:
        return results
    fn = ExponentFn(fam)
    sigma = Fraction(1, 2) if sigma is None else Fraction(sigma)
    depth, nodes = _nodes(fam, depth)
    results += [
        check_bound_chains(fam),
        check_density(fam, fn),
        check_oracle(fam, fn, cap),
        check_symmetry(fam, depth, nodes),
        check_extension(fam),
        check_martingale(fam, depth, nodes),
        check_gale(fam, fn, depth, sigma),
        check_monotone(fam, fn),
    ]
    return results
