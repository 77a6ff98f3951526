"""TOML documents: family configs, derived family documents, gale tables.

All rationals are ``"num/den"`` strings and all level integers are decimal
strings, since level lengths outgrow 64-bit TOML integers quickly.

Family config::

    alphabet_size = 2
    t0_variant = "suffix-pad"        # or "prefix-pad"
    n_levels = 1

    [sequence]
    kind = "explicit"                # or "alternating", "geometric", "oscillating"
    terms = ["1/2", "1/3"]           # builtin kinds take their own parameters

    [policy]                         # optional; defaults quadratic:1 / poly:1,1
    min_ell = "const:1"
    min_ratio = "const:1"

    [witness]                        # optional, used by `dimension`
    sigma = "1/2"
    alpha_hat = "1/3"

Family document (written by ``derive``): top-level ``alphabet_size`` and
``t0_variant`` plus an array ``[[levels]]`` with string fields ``i, q, k,
ell`` and, on all but the deepest level, ``r, p, kappa, appendix``.

Gale table: ``sigma`` (optional), ``alphabet_size`` and a ``[values]``
table mapping word strings (``""`` is the empty word) to ``"num/den"`` or
``"|X|^(a/b)"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import tomli
import tomli_w

from .derivation import DEFAULT_POLICY, GrowthPolicy, PolySpec, derive_family
from .gales import GaleTable, format_gale_value, parse_gale_value
from .sequences import QSequence, builtin, explicit, format_rat, parse_rat
from .treefam import T0_VARIANTS, LevelParams, TreeFamily, format_word, parse_word


class ConfigError(ValueError):
    pass


def load_toml(path: str | Path) -> dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            return tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _int(value, name: str) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be an integer")
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None


def _rat(value, name: str) -> Fraction:
    try:
        return parse_rat(value)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from None


@dataclass(frozen=True)
class FamilyConfig:
    alphabet_size: int
    t0_variant: str
    sequence: QSequence
    n_levels: int
    policy: GrowthPolicy
    sigma: Fraction | None = None
    alpha_hat: Fraction | None = None

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> FamilyConfig:
        alphabet_size = _int(d.get("alphabet_size", 2), "alphabet_size")
        if alphabet_size < 2:
            raise ConfigError("alphabet_size must be >= 2")
        variant = d.get("t0_variant", "suffix-pad")
        if variant not in T0_VARIANTS:
            raise ConfigError(f"t0_variant must be one of {T0_VARIANTS}")
        if "n_levels" not in d:
            raise ConfigError("missing n_levels")
        n_levels = _int(d["n_levels"], "n_levels")
        seq_d = d.get("sequence")
        if not isinstance(seq_d, dict):
            raise ConfigError("missing [sequence] section")
        seq_d = dict(seq_d)
        kind = seq_d.pop("kind", "explicit")
        try:
            if kind == "explicit":
                terms = seq_d.get("terms")
                if not isinstance(terms, list) or not terms:
                    raise ConfigError("explicit sequence needs a non-empty terms list")
                seq = explicit(*terms)
            else:
                seq = builtin(kind, **seq_d)
        except ValueError as exc:
            raise ConfigError(f"[sequence]: {exc}") from None
        pol_d = d.get("policy", {})
        try:
            policy = GrowthPolicy(
                min_ell=PolySpec.parse(pol_d["min_ell"]) if "min_ell" in pol_d else DEFAULT_POLICY.min_ell,
                min_ratio=PolySpec.parse(pol_d["min_ratio"]) if "min_ratio" in pol_d else DEFAULT_POLICY.min_ratio,
            )
        except ValueError as exc:
            raise ConfigError(f"[policy]: {exc}") from None
        wit = d.get("witness", {})
        sigma = _rat(wit["sigma"], "witness.sigma") if "sigma" in wit else None
        alpha_hat = _rat(wit["alpha_hat"], "witness.alpha_hat") if "alpha_hat" in wit else None
        return cls(alphabet_size, variant, seq, n_levels, policy, sigma, alpha_hat)

    def derive(self, n_levels: int | None = None) -> TreeFamily:
        n = self.n_levels if n_levels is None else n_levels
        try:
            return derive_family(self.sequence, n, self.policy, self.t0_variant, self.alphabet_size)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def family_from_document(d: dict[str, Any]) -> TreeFamily:
    alphabet_size = _int(d.get("alphabet_size", 2), "alphabet_size")
    variant = d.get("t0_variant", "suffix-pad")
    rows = d.get("levels")
    if not isinstance(rows, list) or not rows:
        raise ConfigError("family document needs a non-empty [[levels]] array")
    levels, qs = [], []
    for n, row in enumerate(rows):
        if _int(row.get("i", n), "i") != n:
            raise ConfigError(f"levels out of order at position {n}")
        k, ell = _int(row.get("k"), f"levels[{n}].k"), _int(row.get("ell"), f"levels[{n}].ell")
        if "q" in row:
            qs.append(_rat(row["q"], f"levels[{n}].q"))
        if n < len(rows) - 1:
            levels.append(LevelParams(
                k, ell,
                _int(row.get("r"), f"levels[{n}].r"),
                _int(row.get("p"), f"levels[{n}].p"),
                _int(row.get("kappa"), f"levels[{n}].kappa"),
                row.get("appendix"),
            ))
        else:
            levels.append(LevelParams(k, ell))
    if qs and len(qs) != len(rows):
        raise ConfigError("either every level or none declares q")
    try:
        return TreeFamily(alphabet_size, variant, tuple(levels), tuple(qs) if qs else None)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def family_to_document(fam: TreeFamily) -> dict[str, Any]:
    rows = []
    for i, lv in enumerate(fam.levels):
        row = {"i": str(i), "q": format_rat(lv.q), "k": str(lv.k), "ell": str(lv.ell)}
        if lv.has_step:
            row.update(r=str(lv.r), p=str(lv.p), kappa=str(lv.kappa), appendix=lv.appendix)
        rows.append(row)
    return {"alphabet_size": fam.alphabet_size, "t0_variant": fam.t0_variant, "levels": rows}


def dump_toml(d: dict[str, Any]) -> str:
    return tomli_w.dumps(d)


@dataclass(frozen=True)
class Loaded:
    family: TreeFamily
    config: FamilyConfig | None  # None for family documents


def load_family(path: str | Path, n_levels: int | None = None) -> Loaded:
    d = load_toml(path)
    if "levels" in d:
        fam = family_from_document(d)
        if n_levels is not None:
            if n_levels > fam.depth:
                raise ConfigError(f"document has only {fam.depth} levels; cannot materialize {n_levels}")
            fam = fam.truncated(n_levels)
        return Loaded(fam, None)
    cfg = FamilyConfig.from_dict(d)
    return Loaded(cfg.derive(n_levels), cfg)


def load_gale_table(path: str | Path) -> GaleTable:
    d = load_toml(path)
    X = _int(d.get("alphabet_size", 2), "alphabet_size")
    sigma = _rat(d["sigma"], "sigma") if "sigma" in d else None
    raw = d.get("values")
    if not isinstance(raw, dict) or not raw:
        raise ConfigError("gale table needs a non-empty [values] table")
    try:
        values = {parse_word(w, X): parse_gale_value(str(v)) for w, v in raw.items()}
        return GaleTable(sigma, X, values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def gale_table_to_document(t: GaleTable) -> dict[str, Any]:
    d: dict[str, Any] = {"alphabet_size": t.alphabet_size}
    if t.sigma is not None:
        d["sigma"] = format_rat(t.sigma)
    ordered = sorted(t.values, key=lambda w: (len(w), w))
    d["values"] = {format_word(w, t.alphabet_size): format_gale_value(t.values[w]) for w in ordered}
    return d
