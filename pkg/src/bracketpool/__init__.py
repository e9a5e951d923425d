"""Multi-entry bracket selection for single-elimination tournament pools."""

from .errors import (BracketPoolError, GuardRefusal, InfeasibleBracketError,
                     InfeasibleConstraintsError, ProbabilityError, StructuralError)
from .exact import brute_force_ems, dp_ems, outcome_probability
from .probability import propagate, pteam_from_ratings, validate_pteam
from .simulation import mc_ems, sample_pool
from .tournament import build_tournament, max_set_score, overlap_counts, score, validate_bracket

__all__ = [
    "BracketPoolError", "GuardRefusal", "InfeasibleBracketError", "InfeasibleConstraintsError",
    "ProbabilityError", "StructuralError", "brute_force_ems", "build_tournament", "dp_ems",
    "max_set_score", "mc_ems", "outcome_probability", "overlap_counts", "propagate",
    "pteam_from_ratings", "sample_pool", "score", "validate_bracket", "validate_pteam",
]
