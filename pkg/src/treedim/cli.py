"""Command-line interface: ``treedim <subcommand> ...``.

Exit codes: 0 success, 1 failed verification, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import Sequence

from .config import ConfigError, dump_toml, family_to_document, load_family, load_gale_table
from .derivation import family_violations
from .gales import DEFAULT_PRECISION, cut_point, vf_value, witness_exponents
from .sequences import format_rat, parse_rat
from .structure import ExponentFn, dim_estimate
from .treefam import DepthExceeded, format_word, member_pref, parse_word, successors
from .verify import run_suite

STRUCTURE_COLUMNS = ("ell", "exponent", "density_num", "density_den")
WITNESS_COLUMNS = (
    "level", "q_i", "ell_i", "thm2_exp_num", "thm2_exp_den",
    "borderline_exp_num", "borderline_exp_den", "scan_flag",
)


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _nat(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def _rat_arg(text: str) -> Fraction:
    try:
        return parse_rat(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _checked_family(path: str, n_levels: int | None = None):
    loaded = load_family(path, n_levels)
    bad = family_violations(loaded.family)
    if bad:
        raise ConfigError("inconsistent family: " + "; ".join(bad[:3]))
    return loaded


def structure_rows(fn: ExponentFn, max_len: int) -> list[tuple[int, int, int, int]]:
    rows = []
    for ell in range(1, max_len + 1):
        e = fn.exponent(ell)
        d = Fraction(e, ell)
        rows.append((ell, e, d.numerator, d.denominator))
    return rows


def format_structure(rows, fmt: str, alphabet_size: int) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(STRUCTURE_COLUMNS)
        writer.writerows(rows)
        return buf.getvalue()
    doc = {
        "alphabet_size": str(alphabet_size),
        "columns": list(STRUCTURE_COLUMNS),
        "rows": [dict(zip(STRUCTURE_COLUMNS, map(str, r))) for r in rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def cmd_derive(args) -> int:
    fam = _checked_family(args.config).family
    _emit(dump_toml(family_to_document(fam)), args.out)
    return 0


def cmd_structure(args) -> int:
    fam = _checked_family(args.config).family
    if args.max_len > fam.ell_last:
        raise UsageError(f"--max-len {args.max_len} exceeds ell_last = {fam.ell_last}")
    rows = structure_rows(ExponentFn(fam), args.max_len)
    _emit(format_structure(rows, args.format, fam.alphabet_size), args.out)
    return 0


def cmd_member(args) -> int:
    fam = _checked_family(args.config).family
    w = parse_word(args.word, fam.alphabet_size)
    verdict = member_pref(fam, w)
    print(f"word: {format_word(w, fam.alphabet_size) or 'e'}")
    print(f"member: {'true' if verdict else 'false'}")
    if not verdict:
        print("successors: -")
    elif len(w) >= fam.ell_last:
        print("successors: n/a (deepest materialized length)")
    else:
        succ = successors(fam, w)
        kind = "all" if len(succ) == fam.alphabet_size else "forced"
        print(f"successors: {','.join(map(str, sorted(succ)))} ({kind})")
    return 0


def cmd_martingale(args) -> int:
    fam = _checked_family(args.config).family
    w = parse_word(args.word, fam.alphabet_size)
    v = vf_value(fam, w)
    print(f"word: {format_word(w, fam.alphabet_size) or 'e'}")
    if v.zero:
        print("V_F: 0")
    else:
        print(f"V_F: |X|^{v.exponent} = {v.to_fraction(fam.alphabet_size)}")
    if args.sigma is not None:
        if v.zero:
            print(f"gale_exponent (sigma={format_rat(args.sigma)}): -inf (value 0)")
        else:
            g = v.exponent - (1 - args.sigma) * len(w)
            print(f"gale_exponent (sigma={format_rat(args.sigma)}): {format_rat(g)}")
    return 0


def cmd_verify(args) -> int:
    fam = load_family(args.config).family
    results = run_suite(fam, args.depth, sigma=args.sigma)
    for r in results:
        print(r.line())
    ok = all(r.ok for r in results)
    print("verify: " + ("all checks passed" if ok else "FAILED"))
    return 0 if ok else 1


def cmd_dimension(args) -> int:
    loaded = _checked_family(args.config, args.levels)
    fam = loaded.family
    fn = ExponentFn(fam)
    est = dim_estimate(fn, fam.ell_last)
    qs = [fam.q(i) for i in range(fam.depth + 1)]
    cfg = loaded.config
    alpha_hat = args.alpha_hat or (cfg.alpha_hat if cfg else None) or min(qs)
    sigma = args.sigma or (cfg.sigma if cfg else None) or (alpha_hat + max(qs)) / 2
    summary = [
        f"levels: 0..{fam.depth}",
        f"empirical_min_density: {format_rat(est.empirical_min_density)}",
        f"certified_lower: {format_rat(est.certified_lower)}",
        f"max_ell_ratio: {format_rat(est.max_ell_ratio)}",
        f"sigma: {format_rat(sigma)}",
        f"alpha_hat: {format_rat(alpha_hat)}",
    ]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(WITNESS_COLUMNS)
    for rec in witness_exponents(fam, sigma, alpha_hat):
        writer.writerow((
            rec.level, format_rat(rec.q), rec.ell,
            rec.thm2_exponent.numerator, rec.thm2_exponent.denominator,
            rec.borderline_exponent.numerator, rec.borderline_exponent.denominator,
            "true" if rec.scan_flag else "false",
        ))
    if args.out:
        print("\n".join(summary))
        _emit(buf.getvalue(), args.out)
    else:
        print("\n".join(summary))
        print()
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_cutpoint(args) -> int:
    table = load_gale_table(args.gale)
    cp = cut_point(table, args.precision)
    if cp.kind == "exact":
        print(f"cut_point: {format_rat(cp.value)} (exact)")
    elif cp.kind == "bracket":
        print(f"cut_point: [{format_rat(cp.lo)}, {format_rat(cp.hi)}] (bracket, width <= 2^-{args.precision})")
    else:
        print(f"cut_point: {cp.kind}")
    if cp.witness is not None:
        print(f"witness: {format_word(cp.witness, table.alphabet_size) or 'e'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treedim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="emit per-level parameters as a family document")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("structure", help="emit the (ell, exponent, density) table")
    p.add_argument("--config", required=True)
    p.add_argument("--max-len", type=_nat, required=True)
    p.add_argument("--format", choices=("csv", "jsonlike"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_structure)

    p = sub.add_parser("member", help="prefix membership and branching set of a word")
    p.add_argument("--config", required=True)
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_member)

    p = sub.add_parser("martingale", help="V_F(w) and its sigma-gale exponent")
    p.add_argument("--config", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--sigma", type=_rat_arg)
    p.set_defaults(func=cmd_martingale)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--config", required=True)
    p.add_argument("--depth", type=_nat, required=True)
    p.add_argument("--sigma", type=_rat_arg, help="sigma for the gale check (default 1/2)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dimension", help="density estimates and witness exponents")
    p.add_argument("--config", required=True)
    p.add_argument("--levels", type=_nat, required=True)
    p.add_argument("--sigma", type=_rat_arg)
    p.add_argument("--alpha-hat", type=_rat_arg)
    p.add_argument("--out", help="write the witness CSV here")
    p.set_defaults(func=cmd_dimension)

    p = sub.add_parser("cutpoint", help="cut point of a gale table")
    p.add_argument("--gale", required=True)
    p.add_argument("--precision", type=_nat, default=DEFAULT_PRECISION)
    p.set_defaults(func=cmd_cutpoint)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, UsageError, DepthExceeded, ValueError, IndexError) as exc:
        print(f"treedim {args.command}: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
