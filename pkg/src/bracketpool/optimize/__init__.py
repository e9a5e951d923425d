"""Entry-selection algorithms and model export."""

from .config import DiversificationConfig, SolveBudget, load_settings
from .gsaa import gsaa_generate, subproblem_solve
from .prop import PropPlusThresholds, prop_generate, prop_plus_generate
from .sip import sip_generate
from .single import best_single_entry

__all__ = [
    "DiversificationConfig", "PropPlusThresholds", "SolveBudget", "best_single_entry",
    "gsaa_generate", "load_settings", "prop_generate", "prop_plus_generate", "sip_generate",
    "subproblem_solve",
]
