"""Safe-square statistics for randomly placed rooks, bishops and queens on k-D boards."""

__version__ = "0.1.0"

from .asymptotics import LemmaParams, appendix_expression, lemma_ratio
from .exact import (
    AttackHistogram,
    ExactResult,
    PlacementModel,
    attack_histogram,
    brute_force_distribution,
    default_piece_count,
    distribution_moments,
    exact_variance,
    expected_safe_fraction,
    safe_probability,
    safe_probability_exact,
)
from .geometry import (
    BoardSpec,
    Family,
    PieceSpec,
    RingVector,
    Scope,
    attack_count,
    attack_set,
    attacks,
    closed_form_attack_count,
    make_board,
    ring_index_2d,
    ring_vector,
)
from .limits import LimitConstant, limit_constant
from .montecarlo import McResult, TrialConfig, run_trials, sample_placement, simulate_once
