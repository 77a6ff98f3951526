"""Exact-arithmetic iterated tree families, structure functions and gales."""

from .derivation import DEFAULT_POLICY, TRIVIAL_POLICY, GrowthPolicy, PolySpec, derive_family, derive_level
from .gales import GaleTable, PowerValue, cut_point, martingale_defect, supergale_check, vf_value, witness_exponents
from .sequences import builtin, explicit, liminf_window, q_at, validate_sequence
from .structure import ExponentFn, check_bounds, dim_estimate, monotone_check
from .treefam import LevelParams, TreeFamily, enumerate_level, member_full, member_pref, successors

__all__ = [
    "DEFAULT_POLICY", "TRIVIAL_POLICY", "GrowthPolicy", "PolySpec", "derive_family", "derive_level",
    "GaleTable", "PowerValue", "cut_point", "martingale_defect", "supergale_check", "vf_value", "witness_exponents",
    "builtin", "explicit", "liminf_window", "q_at", "validate_sequence",
    "ExponentFn", "check_bounds", "dim_estimate", "monotone_check",
    "LevelParams", "TreeFamily", "enumerate_level", "member_full", "member_pref", "successors",
]
