from fractions import Fraction

import mpmath as mp
import pytest

from expost.election.beta import (
    SIGNAL_PAIRS,
    BetaModel,
    LinearPosteriorModel,
    beta_overreaction_strategy,
    beta_posterior_pair,
    beta_posterior_single,
    beta_unbiased_outcome,
    linear_posterior_antipander,
    overreaction_chain_holds,
    predicted_unbiased_winner,
    verify_beta_midpoint,
)
from expost.errors import EqualParams


def _quad_posterior(alpha, beta, signals):
    """E[theta | signals] by numerical integration of prior times likelihood."""
    a, b = float(alpha), float(beta)

    def weight(t):
        lik = 1
        for s in signals:
            lik *= t if s == 1 else 1 - t
        return t ** (a - 1) * (1 - t) ** (b - 1) * lik

    return float(mp.quad(lambda t: t * weight(t), [0, 1]) / mp.quad(weight, [0, 1]))


@pytest.mark.parametrize("alpha,beta", [(1, 1), (2, 5), (Fraction(1, 2), 3), (4.5, 0.7)])
def test_posteriors_match_quadrature(alpha, beta):
    model = BetaModel(alpha, beta)
    for s in (0, 1):
        assert float(beta_posterior_single(model, s)) == pytest.approx(_quad_posterior(alpha, beta, [s]), abs=1e-10)
    for sa, sb in SIGNAL_PAIRS:
        assert float(beta_posterior_pair(model, sa, sb)) == \
            pytest.approx(_quad_posterior(alpha, beta, [sa, sb]), abs=1e-10)


def test_exact_midpoint():
    verdict = verify_beta_midpoint(BetaModel(Fraction(3, 2), 2))
    assert verdict.exact and verdict.holds and verdict.max_residual == 0


def test_float_midpoint():
    verdict = verify_beta_midpoint(BetaModel(1.3, 2.9))
    assert not verdict.exact and verdict.holds and verdict.max_residual <= 1e-12


def test_overreaction_platforms():
    assert beta_overreaction_strategy(BetaModel(1, 1)) == (Fraction(1, 4), Fraction(3, 4))
    assert overreaction_chain_holds(BetaModel(Fraction(7, 2), Fraction(1, 2)))


def test_unbiased_outcome_direction():
    model = BetaModel(1, 3)
    res = beta_unbiased_outcome(model, 1, 0)
    assert res.winner == "A" == predicted_unbiased_winner(model, 1, 0)
    assert res.same_direction and res.stronger
    assert beta_unbiased_outcome(BetaModel(3, 1), 1, 0).winner == "B"
    assert beta_unbiased_outcome(model, 1, 1).winner == "tie"


def test_equal_params_rejected():
    with pytest.raises(EqualParams):
        beta_unbiased_outcome(BetaModel(2, 2), 0, 1)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        BetaModel(0, 1)
    with pytest.raises(ValueError):
        beta_posterior_single(BetaModel(1, 1), 2)


def test_linear_form_reduces_to_beta_and_normal():
    model = BetaModel(Fraction(5, 2), 1)
    lin = LinearPosteriorModel.from_beta(model)
    y0, y1 = beta_overreaction_strategy(model)
    assert linear_posterior_antipander(lin, 0) == y0
    assert linear_posterior_antipander(lin, 1) == y1
    normal = LinearPosteriorModel.from_normal(1, 2)
    assert linear_posterior_antipander(normal, 1.5) == pytest.approx(4 / 5 * 1.5)
