"""Firms competing in a market and for a government decision at the same time.

Firm A's payoff is its market share ``m(xA, xB)`` plus its valuation of the
government's action. The government sees only a statistic ``tau(xA, xB)`` of
the firms' actions and answers with a (possibly mixed) action. Holding the
government strategy fixed, the firms play a constant-sum Bayesian game with
type-independent payoffs.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .equilibrium import DEFAULT_TOL, path_distribution, verify_bne
from .errors import DimensionMismatch, NotAnEquilibrium, UnreachableStatistic, ValidationError
from .game import ON_PATH_EPS, FiniteBayesGame, StrategyProfile

SUM_TOL = 1e-12


def _label_table(rows: Sequence[Sequence[Any]], name: str) -> np.ndarray:
    table = np.array([[str(v) for v in row] for row in rows], dtype=object)
    if table.ndim != 2 or 0 in table.shape:
        raise DimensionMismatch(f"{name} must be a non-empty rectangular table")
    return table


@dataclass(frozen=True, eq=False)
class DualSphereGame:
    """Market shares, government channel and type distribution.

    Labels (statistics, government actions, states) are stored as strings so the
    JSON form round-trips.
    """

    market: np.ndarray
    statistic: np.ndarray
    gov_actions: tuple[str, ...]
    valuation: Mapping[str, float]
    type_dist: np.ndarray
    state_of: np.ndarray | None = None

    def __post_init__(self) -> None:
        market = np.array(self.market, dtype=float)
        if market.ndim != 2 or 0 in market.shape:
            raise DimensionMismatch("market must be a non-empty matrix")
        if np.any(~np.isfinite(market)) or market.min() < 0 or market.max() > 1:
            raise ValidationError("market shares must lie in [0, 1]")
        object.__setattr__(self, "market", market)
        statistic = _label_table(self.statistic, "statistic")
        if statistic.shape != market.shape:
            raise DimensionMismatch(f"statistic shape {statistic.shape} != market shape {market.shape}")
        object.__setattr__(self, "statistic", statistic)
        actions = tuple(str(a) for a in self.gov_actions)
        if not actions or len(set(actions)) != len(actions):
            raise ValidationError("government actions must be distinct and non-empty")
        object.__setattr__(self, "gov_actions", actions)
        valuation = {str(k): float(v) for k, v in self.valuation.items()}
        missing = set(actions) - set(valuation)
        if missing:
            raise ValidationError(f"valuation missing for government actions {sorted(missing)}")
        if not all(np.isfinite(v) for v in valuation.values()):
            raise ValidationError("valuation must be finite")
        object.__setattr__(self, "valuation", valuation)
        # validated through the game-core type
        joint = FiniteBayesGame(self.type_dist, np.zeros((1, 1))).joint
        object.__setattr__(self, "type_dist", joint)
        if self.state_of is not None:
            states = _label_table(self.state_of, "state_of")
            if states.shape != joint.shape:
                raise DimensionMismatch(f"state_of shape {states.shape} != type_dist shape {joint.shape}")
            object.__setattr__(self, "state_of", states)

    @property
    def firm_actions(self) -> dict[str, int]:
        return {"A": self.market.shape[0], "B": self.market.shape[1]}

    @property
    def statistic_labels(self) -> list[str]:
        return sorted(set(self.statistic.ravel()))

    def to_dict(self) -> dict[str, Any]:
        out = {
            "firm_actions": self.firm_actions,
            "market": self.market.tolist(),
            "statistic": self.statistic.tolist(),
            "gov_actions": list(self.gov_actions),
            "valuation": dict(self.valuation),
            "type_dist": self.type_dist.tolist(),
        }
        if self.state_of is not None:
            out["state_of"] = self.state_of.tolist()
        return out


@dataclass(frozen=True)
class GovernmentStrategy:
    """Mixed government response to each statistic label."""

    mixing: Mapping[str, Mapping[str, float]]

    def __post_init__(self) -> None:
        clean = {}
        for label, row in self.mixing.items():
            probs = {str(a): float(p) for a, p in row.items()}
            if any(p < 0 for p in probs.values()) or abs(sum(probs.values()) - 1.0) > SUM_TOL:
                raise ValidationError(f"government mixing at statistic {label!r} is not a distribution")
            clean[str(label)] = probs
        object.__setattr__(self, "mixing", clean)

    @classmethod
    def pure(cls, choice: Mapping[Any, Any]) -> "GovernmentStrategy":
        return cls({str(k): {str(a): 1.0} for k, a in choice.items()})

    def expected_valuation(self, dsg: DualSphereGame, label: str) -> float:
        if label not in self.mixing:
            raise ValidationError(f"government strategy has no response to statistic {label!r}")
        row = self.mixing[label]
        unknown = set(row) - set(dsg.gov_actions)
        if unknown:
            raise ValidationError(f"unknown government actions {sorted(unknown)}")
        return sum(p * dsg.valuation[a] for a, p in row.items())


def load_dual(data: Mapping[str, Any]) -> tuple[DualSphereGame, GovernmentStrategy | None]:
    """Parse the dual-sphere JSON object, returning the game and its government strategy."""
    try:
        dsg = DualSphereGame(
            market=data["market"],
            statistic=data["statistic"],
            gov_actions=data["gov_actions"],
            valuation=data["valuation"],
            type_dist=data["type_dist"],
            state_of=data.get("state_of"),
        )
    except KeyError as exc:
        raise DimensionMismatch(f"dual-sphere JSON is missing key {exc}") from None
    declared = data.get("firm_actions")
    if declared is not None and {k: int(v) for k, v in declared.items()} != dsg.firm_actions:
        raise DimensionMismatch(f"declared firm actions {declared} do not match market {dsg.market.shape}")
    gov = data.get("gov_strategy")
    return dsg, (GovernmentStrategy(gov) if gov is not None else None)


def surplus_matrix(dsg: DualSphereGame, gov: GovernmentStrategy) -> np.ndarray:
    """``m(xA, xB) + v_gov(tau(xA, xB))`` for every action pair."""
    v = np.vectorize(lambda label: gov.expected_valuation(dsg, label), otypes=[float])
    return dsg.market + v(dsg.statistic)


def induce_firm_game(dsg: DualSphereGame, gov: GovernmentStrategy) -> FiniteBayesGame:
    """Firm A receives the surplus, firm B its negative."""
    return FiniteBayesGame(dsg.type_dist, surplus_matrix(dsg, gov), 0.0)


@dataclass(frozen=True)
class SurplusVerdict:
    holds: bool
    constant: float | None
    spread: float
    witness: dict[str, Any] | None
    tolerance: float

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "constant": self.constant,
            "spread": self.spread,
            "witness": self.witness,
            "tolerance": self.tolerance,
        }


def verify_surplus_constancy(dsg: DualSphereGame, gov: GovernmentStrategy, profile: StrategyProfile,
                             tol: float = DEFAULT_TOL) -> SurplusVerdict:
    """Market share plus expected government valuation is the same on every on-path pair."""
    game = induce_firm_game(dsg, gov)
    verdict = verify_bne(game, profile, tol)
    if not verdict.is_bne:
        raise NotAnEquilibrium(
            f"firm profile is not a Bayes-Nash equilibrium (worst regret {verdict.worst_regret:.3g})"
        )
    path = path_distribution(game, profile)
    on = np.argwhere(path > ON_PATH_EPS)
    values = game.payoff_a[on[:, 0], on[:, 1]]
    lo, hi = int(np.argmin(values)), int(np.argmax(values))
    spread = float(values[hi] - values[lo])
    if spread <= tol:
        return SurplusVerdict(True, float(values.mean()), spread, None, tol)

    def pair(i: int) -> dict[str, Any]:
        xa, xb = (int(v) for v in on[i])
        return {
            "action_a": xa,
            "action_b": xb,
            "market": float(dsg.market[xa, xb]),
            "statistic": str(dsg.statistic[xa, xb]),
            "surplus": float(values[i]),
            "probability": float(path[xa, xb]),
        }

    return SurplusVerdict(False, None, spread, {"low": pair(lo), "high": pair(hi)}, tol)


def posterior_from_statistic(dsg: DualSphereGame, profile: StrategyProfile,
                             label: Any) -> dict[str, float]:
    """Distribution of the state label given the observed statistic."""
    if dsg.state_of is None:
        raise ValidationError("game has no state labels")
    label = str(label)
    hit = (dsg.statistic == label).astype(float)
    # reach[sA, sB] = P(tau = label | sA, sB)
    reach = profile.strat_a.dist @ hit @ profile.strat_b.dist.T
    if reach.shape != dsg.type_dist.shape:
        raise DimensionMismatch("profile does not match the type distribution")
    weight = dsg.type_dist * reach
    total = float(weight.sum())
    if total <= ON_PATH_EPS:
        raise UnreachableStatistic(f"statistic {label!r} has zero probability under the profile")
    post: dict[str, float] = defaultdict(float)
    for (sa, sb), w in np.ndenumerate(weight):
        post[str(dsg.state_of[sa, sb])] += float(w) / total
    return dict(sorted(post.items()))
