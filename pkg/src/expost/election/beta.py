"""Beta-Bernoulli elections and the general linear-posterior overreaction form.

The state is ``theta ~ Beta(alpha, beta)`` and each candidate sees one Bernoulli
signal. All identities here are exact, so integer or ``Fraction`` inputs are
computed in rational arithmetic and floats fall back to a 1e-12 tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Literal, Union

from ..errors import EqualParams

Number = Union[int, float, Fraction]
FLOAT_TOL = 1e-12
SIGNAL_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


def _num(x: Number) -> Number:
    """Keep rationals exact, everything else as float."""
    if isinstance(x, Rational):
        return Fraction(x)
    return float(x)


def _check_signal(s: int) -> int:
    if s not in (0, 1):
        raise ValueError(f"Bernoulli signal must be 0 or 1, got {s!r}")
    return int(s)


@dataclass(frozen=True)
class BetaModel:
    alpha: Number
    beta: Number

    def __post_init__(self) -> None:
        for name in ("alpha", "beta"):
            v = _num(getattr(self, name))
            if not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")
            object.__setattr__(self, name, v)

    @property
    def equal_params(self) -> bool:
        return self.alpha == self.beta

    @property
    def exact(self) -> bool:
        return isinstance(self.alpha, Fraction) and isinstance(self.beta, Fraction)

    @property
    def prior_mean(self) -> Number:
        return self.alpha / (self.alpha + self.beta)

    def signal_probability(self, s: int) -> Number:
        """Ex-ante probability of observing signal ``s``."""
        return self.prior_mean if _check_signal(s) == 1 else 1 - self.prior_mean


def beta_posterior_single(model: BetaModel, s: int) -> Number:
    """E[theta | s]."""
    return (model.alpha + _check_signal(s)) / (model.alpha + model.beta + 1)


def beta_posterior_pair(model: BetaModel, s_a: int, s_b: int) -> Number:
    """E[theta | s_A, s_B]."""
    return (model.alpha + _check_signal(s_a) + _check_signal(s_b)) / (model.alpha + model.beta + 2)


def beta_overreaction_strategy(model: BetaModel) -> tuple[Number, Number]:
    """Platforms ``(y(0), y(1))`` of the symmetric fully revealing overreaction equilibrium."""
    d = model.alpha + model.beta + 2
    return model.alpha / d, (model.alpha + 2) / d


def overreaction_chain_holds(model: BetaModel) -> bool:
    """y(0) < E[theta|0] < E[theta] < E[theta|1] < y(1)."""
    y0, y1 = beta_overreaction_strategy(model)
    chain = [y0, beta_posterior_single(model, 0), model.prior_mean,
             beta_posterior_single(model, 1), y1]
    return all(lo < hi for lo, hi in zip(chain, chain[1:]))


@dataclass(frozen=True)
class MidpointVerdict:
    holds: bool
    max_residual: Number
    residuals: dict[str, Number]
    exact: bool

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "max_residual": float(self.max_residual),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "exact": self.exact,
        }


def verify_beta_midpoint(model: BetaModel) -> MidpointVerdict:
    """Pair posterior equals the midpoint of the two overreaction platforms."""
    y = beta_overreaction_strategy(model)
    residuals = {
        f"{sa}{sb}": abs(beta_posterior_pair(model, sa, sb) - (y[sa] + y[sb]) / 2)
        for sa, sb in SIGNAL_PAIRS
    }
    worst = max(residuals.values())
    holds = worst == 0 if model.exact else worst <= FLOAT_TOL
    return MidpointVerdict(holds, worst, residuals, model.exact)


Winner = Literal["A", "B", "tie"]


@dataclass(frozen=True)
class UnbiasedOutcome:
    winner: Winner
    pair_shift: Number
    single_shift: Number

    @property
    def same_direction(self) -> bool:
        return (self.pair_shift > 0) == (self.single_shift > 0) and self.single_shift != 0

    @property
    def stronger(self) -> bool:
        return abs(self.pair_shift) > abs(self.single_shift)

    def to_dict(self) -> dict:
        return {
            "winner": self.winner,
            "pair_shift": float(self.pair_shift),
            "single_shift": float(self.single_shift),
            "same_direction": self.same_direction,
            "stronger": self.stronger,
        }


def beta_unbiased_outcome(model: BetaModel, s_a: int, s_b: int) -> UnbiasedOutcome:
    """Voter's choice when both candidates announce their own posterior means.

    ``pair_shift`` is E[theta|s_A,s_B] - E[theta] and ``single_shift`` is the average
    of the two single-signal posteriors minus E[theta]. The voter picks the platform
    closer to the pair posterior.
    """
    if model.equal_params:
        raise EqualParams("alpha = beta leaves the voter indifferent between unbiased platforms")
    prior = model.prior_mean
    x_a = beta_posterior_single(model, s_a)
    x_b = beta_posterior_single(model, s_b)
    m = beta_posterior_pair(model, s_a, s_b)
    pair_shift = m - prior
    single_shift = (x_a + x_b) / 2 - prior
    gap_a, gap_b = abs(x_a - m), abs(x_b - m)
    tol = 0 if model.exact else FLOAT_TOL
    if abs(gap_a - gap_b) <= tol:
        winner: Winner = "tie"
    else:
        winner = "A" if gap_a < gap_b else "B"
    return UnbiasedOutcome(winner, pair_shift, single_shift)


def predicted_unbiased_winner(model: BetaModel, s_a: int, s_b: int) -> Winner:
    """The signal-1 candidate wins when beta > alpha, the signal-0 candidate otherwise."""
    if s_a == s_b:
        return "tie"
    favoured = 1 if model.beta > model.alpha else 0
    return "A" if s_a == favoured else "B"


@dataclass(frozen=True)
class LinearPosteriorModel:
    """Posterior mean ``(w0 * s0 + w1 * sum of signals) / (w0 + n * w1)``."""

    w0: Number
    w1: Number
    s0: Number = 0

    def __post_init__(self) -> None:
        for name in ("w0", "w1", "s0"):
            object.__setattr__(self, name, _num(getattr(self, name)))
        if not (self.w0 > 0 and self.w1 > 0):
            raise ValueError("w0 and w1 must be positive")

    @classmethod
    def from_beta(cls, model: BetaModel) -> "LinearPosteriorModel":
        return cls(model.alpha + model.beta, 1, model.prior_mean)

    @classmethod
    def from_normal(cls, alpha: Number, beta: Number) -> "LinearPosteriorModel":
        return cls(alpha, beta, 0)


def linear_posterior_antipander(model: LinearPosteriorModel, s: Number) -> Number:
    """Overreaction platform ``(2 w1 s + w0 s0) / (w0 + 2 w1)``."""
    w0, w1 = model.w0, model.w1
    return (2 * w1) / (w0 + 2 * w1) * _num(s) + w0 / (w0 + 2 * w1) * model.s0
