"""Ex-post equilibrium toolkit for constant-sum Bayesian games."""
from .equilibrium import (
    EquilibriumCertificate,
    certify,
    check_identifiable,
    interim_payoff,
    verify_bne,
    verify_expost,
    verify_interim_constancy,
    verify_single_outcome,
)
from .game import (
    BehaviorStrategy,
    FiniteBayesGame,
    OutcomeMap,
    PureStrategy,
    StrategyProfile,
    conditional_matrix,
    validate_game,
)
from .solver import (
    best_response,
    enumerate_pure_bne,
    induce_normal_form,
    security_level,
    solve_minimax_lp,
)
from .statistics import (
    check_completeness,
    check_convex_independence,
    check_sli,
    statistics_report,
)

__version__ = "0.1.0"

__all__ = [
    "BehaviorStrategy",
    "EquilibriumCertificate",
    "FiniteBayesGame",
    "OutcomeMap",
    "PureStrategy",
    "StrategyProfile",
    "best_response",
    "certify",
    "check_completeness",
    "check_convex_independence",
    "check_identifiable",
    "check_sli",
    "conditional_matrix",
    "enumerate_pure_bne",
    "induce_normal_form",
    "interim_payoff",
    "security_level",
    "solve_minimax_lp",
    "statistics_report",
    "validate_game",
    "verify_bne",
    "verify_expost",
    "verify_interim_constancy",
    "verify_single_outcome",
]
