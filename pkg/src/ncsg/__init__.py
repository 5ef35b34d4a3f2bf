"""Authentication and key agreement over non-commutative semigroups."""

from __future__ import annotations

from .algebra import (
    DecodeError,
    Element,
    NonInvertible,
    Platform,
    PlatformKind,
    SubsetSpec,
    canonicalize,
    commute,
    deserialize,
    equal,
    invert,
    sample,
    serialize,
)
from .attacks import (
    AttackResult,
    DecompositionInstance,
    attack_A_key,
    attack_B_key,
    attack_variant_B,
    brute_force_dp,
    double_coset_search,
)
from .braid import GarsideForm, handle_reduce, left_canonical_form, standard_commuting_subgroups
from .conditions import (
    ConditionReport,
    check_condition_a,
    check_condition_b,
    check_conditions,
    select_method2,
    select_method3,
)
from .presets import PRESETS, preset
from .protocols import (
    H,
    KeyPair,
    ProtocolParams,
    keygen,
    run_auth,
    run_ka,
)
from .session import SessionConfig, run_pair, run_session

__version__ = "0.1.0"

__all__ = [
    "AttackResult", "ConditionReport", "DecodeError", "DecompositionInstance", "Element",
    "GarsideForm", "H", "KeyPair", "NonInvertible", "PRESETS", "Platform", "PlatformKind",
    "ProtocolParams", "SessionConfig", "SubsetSpec", "attack_A_key", "attack_B_key",
    "attack_variant_B", "brute_force_dp", "canonicalize", "check_condition_a",
    "check_condition_b", "check_conditions", "commute", "deserialize", "double_coset_search",
    "equal", "handle_reduce", "invert", "keygen", "left_canonical_form", "preset", "run_auth",
    "run_ka", "run_pair", "run_session", "sample", "select_method2", "select_method3",
    "serialize", "standard_commuting_subgroups",
]
