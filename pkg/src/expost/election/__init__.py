"""Downsian election models: normal-quadratic and Beta-Bernoulli."""
from .beta import (
    BetaModel,
    LinearPosteriorModel,
    beta_overreaction_strategy,
    beta_posterior_pair,
    beta_posterior_single,
    beta_unbiased_outcome,
    linear_posterior_antipander,
    verify_beta_midpoint,
)
from .normal import (
    MonteCarloConfig,
    NormalModel,
    VoterRule,
    WelfareDecomposition,
    WelfareEstimate,
    closed_form_welfares,
    make_strategy,
    mc_decomposition,
    mc_welfare,
    mimic_win_probability,
    opponent_conditional,
    posterior_pair,
    posterior_single,
    verify_antipander_indifference,
    verify_mixed_motives_dominance,
    voter_decide,
)
from .truncnorm import truncated_normal_mean, truncated_normal_variance
