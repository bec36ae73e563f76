"""Exact computational social choice: rules, axioms, manipulation and committees."""

from .core import (
    BudgetExceeded,
    LEXICOGRAPHIC,
    NO_TIEBREAK,
    Profile,
    ProfileFormatError,
    ScrutineerError,
    TieBreak,
    WeakOrder,
    enumerate_profiles,
    parse_profile,
    permute_alternatives,
    permute_voters,
    rank_of,
    render_profile,
    restrict,
    support,
)
from .fixtures import FIXTURE_NAMES, fixture
from .rules import ChoiceResult, RuleHandle, parse_rule, resolve

__all__ = [
    "BudgetExceeded", "ChoiceResult", "FIXTURE_NAMES", "LEXICOGRAPHIC", "NO_TIEBREAK",
    "Profile", "ProfileFormatError", "RuleHandle", "ScrutineerError", "TieBreak", "WeakOrder",
    "enumerate_profiles", "fixture", "parse_profile", "parse_rule", "permute_alternatives",
    "permute_voters", "rank_of", "render_profile", "resolve", "restrict", "support",
]

__version__ = "0.1.0"
