import math

import numpy as np
import pytest

from expost.election.normal import (
    AffineStrategy,
    CustomStrategy,
    MonteCarloConfig,
    NormalModel,
    VoterRule,
    a_wins,
    closed_form_welfares,
    estimate,
    make_strategy,
    mc_decomposition,
    mc_welfare,
    mc_welfare_samples,
    mimic_win_probability,
    opponent_conditional,
    posterior_pair,
    posterior_single,
    verify_antipander_indifference,
    verify_mixed_motives_dominance,
    voter_decide,
)
from expost.errors import AsymmetricBenevolentUnsupported, AsymmetricUnsupported, NonInvertibleConjecture

from oracles import truncnorm_mean_quad

UNIT = NormalModel.symmetric(1.0, 1.0)


def _oracle_welfare(model, slope_a, slope_b, rule, n, seed):
    """Independent simulation with numpy's default generator for affine profiles."""
    rng = np.random.default_rng(seed)
    theta = rng.normal(0, 1 / math.sqrt(model.alpha), n)
    s_a = theta + rng.normal(0, 1 / math.sqrt(model.beta_a), n)
    s_b = theta + rng.normal(0, 1 / math.sqrt(model.beta_b), n)
    x_a, x_b = slope_a * s_a, slope_b * s_b
    if rule == "coin":
        wins = rng.random(n) < 0.5
    else:
        wins = np.abs(x_a) > np.abs(x_b)
    w = -(np.where(wins, x_a, x_b) - theta) ** 2
    return w.mean(), w.std(ddof=1) / math.sqrt(n)


def test_posteriors():
    assert posterior_single(UNIT, "A", 1.0) == 0.5
    assert posterior_pair(UNIT, 1.0, 2.0) == 1.0
    mean, var = opponent_conditional(UNIT, "A", 2.0)
    assert (mean, var) == (1.0, 1.5)


def test_model_validation():
    with pytest.raises(ValueError):
        NormalModel(0.0, 1.0)
    assert NormalModel(1.0, 2.0).is_symmetric
    with pytest.raises(AsymmetricUnsupported):
        NormalModel(1.0, 2.0, 3.0).beta


def test_strategy_slopes():
    model = NormalModel.symmetric(1.0, 2.0)
    assert make_strategy(model, "unbiased")(1.0) == pytest.approx(2 / 3)
    assert make_strategy(model, "antipander")(1.0) == pytest.approx(0.8)
    assert make_strategy(model, "fullpander")(3.0) == 0.0
    assert not make_strategy(model, "fullpander").invertible
    assert make_strategy(model, "affine-offset", c=0.5, sign=-1)(0.0) == -0.5
    with pytest.raises(ValueError):
        make_strategy(model, "nonsense")


def test_asymmetric_antipander_slopes():
    model = NormalModel(1.0, 1.0, 3.0)
    assert make_strategy(model, "antipander", "A")(1.0) == pytest.approx(2 / 5)
    assert make_strategy(model, "antipander", "B")(1.0) == pytest.approx(6 / 5)


def test_benevolent_matches_quadrature():
    strat = make_strategy(UNIT, "benevolent")
    for s in (0.3, 1.0, -2.5, 4.0):
        h = truncnorm_mean_quad(s / 2, math.sqrt(1.5), -abs(s), abs(s))
        assert strat(s) == pytest.approx((s + h) / 3, abs=1e-10)
    assert strat(1.0) == pytest.approx(0.3670, abs=1e-3)
    assert strat(0.0) == 0.0
    values = strat(np.linspace(-3, 3, 61))
    assert np.all(np.diff(values) > 0)
    with pytest.raises(AsymmetricBenevolentUnsupported):
        make_strategy(NormalModel(1.0, 1.0, 2.0), "benevolent")


def test_voter_rules():
    unb = make_strategy(UNIT, "unbiased")
    br = VoterRule.best_response(unb, unb)
    # signals 2 and -1: posterior 1/3, platforms 1 and -1/2
    assert voter_decide(br, UNIT, 1.0, -0.5) == "A"
    assert voter_decide(VoterRule("more-extreme"), UNIT, 0.2, -0.3) == "B"
    assert voter_decide(VoterRule("more-extreme", tie_break="A"), UNIT, 0.3, -0.3) == "A"
    assert voter_decide(VoterRule("coin"), UNIT, 5.0, 0.0, draw=0.7) == "B"
    assert voter_decide(VoterRule("always-elect", elect="B"), UNIT, 1.0, 0.0) == "B"
    with pytest.raises(NonInvertibleConjecture):
        VoterRule.best_response(make_strategy(UNIT, "fullpander"), unb)
    with pytest.raises(ValueError):
        VoterRule("always-elect")


def test_best_response_equals_more_extreme_for_unbiased():
    unb = make_strategy(UNIT, "unbiased")
    rng = np.random.default_rng(0)
    xa, xb = rng.normal(size=(2, 1000))
    draw = rng.random(1000)
    np.testing.assert_array_equal(a_wins(VoterRule.best_response(unb, unb), UNIT, xa, xb, draw),
                                  a_wins(VoterRule("more-extreme"), UNIT, xa, xb, draw))


def test_custom_strategy_inverse():
    strat = CustomStrategy(lambda s: 2 * s, "double", lambda x: x / 2)
    assert strat.invertible and strat.inverse(4.0) == 2.0
    assert AffineStrategy(2.0, 1.0).inverse(5.0) == 2.0


def test_closed_forms():
    cf = closed_form_welfares(UNIT)
    assert (cf.full_pander, cf.anti_pander, cf.delegation) == (-1.0, -5 / 9, -0.5)
    cf = closed_form_welfares(NormalModel.symmetric(2.0, 1.0))
    assert cf.anti_pander == pytest.approx(-6 / 16)


@pytest.mark.parametrize("profile,rule", [("antipander", "coin"), ("unbiased", "more-extreme")])
def test_mc_agrees_with_independent_simulation(profile, rule):
    n = 200_000
    strat = make_strategy(UNIT, profile)
    est = mc_welfare(UNIT, strat, strat, VoterRule(rule), MonteCarloConfig(3, n))
    mean, se = _oracle_welfare(UNIT, strat.slope, strat.slope, rule, n, seed=4)
    assert abs(est.mean - mean) <= 4 * math.hypot(est.std_error, se)


def test_asymmetric_antipander_welfare_is_equal_for_either_winner():
    model = NormalModel(1.0, 1.0, 3.0)
    sa, sb = make_strategy(model, "antipander", "A"), make_strategy(model, "antipander", "B")
    cfg = MonteCarloConfig(5, 100_000)
    wa = mc_welfare_samples(model, sa, sb, VoterRule("always-elect", elect="A"), cfg)
    wb = mc_welfare_samples(model, sa, sb, VoterRule("always-elect", elect="B"), cfg)
    # equal conditional expected loss, so the paired difference has mean zero
    diff = estimate(wa - wb)
    assert abs(diff.mean) <= 4 * diff.std_error


def test_workers_do_not_change_results():
    strat = make_strategy(UNIT, "antipander")
    one = mc_welfare(UNIT, strat, strat, VoterRule("coin"), MonteCarloConfig(9, 150_000, 1))
    many = mc_welfare(UNIT, strat, strat, VoterRule("coin"), MonteCarloConfig(9, 150_000, 4))
    assert one == many


def test_estimate_matches_numpy():
    values = np.random.default_rng(2).normal(size=200_001)
    est = estimate(values)
    assert est.mean == pytest.approx(values.mean(), rel=1e-12)
    assert est.std_error == pytest.approx(values.std(ddof=1) / math.sqrt(values.size), rel=1e-10)


def test_samples_match_estimate():
    strat = make_strategy(UNIT, "unbiased")
    cfg = MonteCarloConfig(1, 70_000)
    rule = VoterRule("more-extreme")
    assert estimate(mc_welfare_samples(UNIT, strat, strat, rule, cfg)).mean == \
        pytest.approx(mc_welfare(UNIT, strat, strat, rule, cfg).mean, abs=1e-14)


def test_mimic_probability():
    p = mimic_win_probability(UNIT, 0.0, 1.0)
    assert p == pytest.approx(2 * 0.5 * (1 + math.erf(1 / math.sqrt(1.5) / math.sqrt(2))) - 1, abs=1e-14)
    grid = np.linspace(0, 3, 31)
    assert np.all(np.diff(mimic_win_probability(UNIT, 0.5, grid)) > 0)


def test_decomposition_small():
    ben = make_strategy(UNIT, "benevolent")
    d = mc_decomposition(UNIT, ben, ben, VoterRule("more-extreme"), MonteCarloConfig(11, 100_000))
    assert d.method == "closed-form"
    assert abs(d.le) < 1e-10
    assert d.reassembly_gap <= 3 * d.gap_std_error + 1e-12
    unb = make_strategy(UNIT, "unbiased")
    d = mc_decomposition(UNIT, unb, unb, VoterRule("coin"), MonteCarloConfig(11, 100_000))
    assert d.method == "binned"
    assert d.reassembly_gap <= 4 * d.gap_std_error


def test_indifference_and_dominance():
    v = verify_antipander_indifference(UNIT, n_checks=2000)
    assert v.holds and v.max_residual <= 1e-10
    assert verify_antipander_indifference(NormalModel(2.0, 1.0, 4.0), n_checks=2000).holds
    for b in (-0.5, 0.0, 1.0):
        d = verify_mixed_motives_dominance(UNIT, b, n_checks=2000)
        assert d.holds and d.n_passed + d.n_equal_platforms == 2000


def test_config_validation():
    with pytest.raises(ValueError):
        MonteCarloConfig(-1, 10)
    with pytest.raises(ValueError):
        MonteCarloConfig(1, 1)
    with pytest.raises(ValueError):
        MonteCarloConfig(1, 10, 0)
