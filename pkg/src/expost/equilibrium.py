"""Interim payoffs and equilibrium-property verifiers for finite games."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from .errors import NotAnEquilibrium
from .game import (
    ON_PATH_EPS,
    PLAYERS,
    BehaviorStrategy,
    FiniteBayesGame,
    OutcomeMap,
    Player,
    StrategyProfile,
    conditional_matrix,
    other,
)
from .statistics import DEFAULT_RANK_TOL, numerical_rank

DEFAULT_TOL = 1e-9


def check_identifiable(strategy: BehaviorStrategy, rank_tol: float = DEFAULT_RANK_TOL) -> bool:
    """Full column rank of the mixing matrix restricted to actions that are ever played.

    Every type has positive probability (enforced by the game), so an action is on
    path exactly when some type plays it with positive probability.
    """
    on_path = strategy.dist.max(axis=0) > ON_PATH_EPS
    sub = strategy.dist[:, on_path]
    return numerical_rank(sub, rank_tol) == sub.shape[1]


def interim_table(game: FiniteBayesGame, profile: StrategyProfile, player: Player) -> np.ndarray:
    """``table[t, x]``: expected payoff of ``player`` of type ``t`` choosing action ``x``."""
    profile.check_against(game)
    opp = profile.of(other(player)).dist
    return conditional_matrix(game, player) @ opp @ game.payoff(player).T


def interim_payoff(game: FiniteBayesGame, profile: StrategyProfile, player: Player,
                   type_: int, action: int) -> float:
    return float(interim_table(game, profile, player)[type_, action])


def path_distribution(game: FiniteBayesGame, profile: StrategyProfile) -> np.ndarray:
    """Probability of each action pair ``(xA, xB)`` under the profile."""
    return profile.strat_a.dist.T @ game.joint @ profile.strat_b.dist


def ex_ante_value(game: FiniteBayesGame, profile: StrategyProfile) -> float:
    """Player A's ex-ante expected payoff."""
    profile.check_against(game)
    return float(np.sum(path_distribution(game, profile) * game.payoff_a))


def _on_path_type_actions(game: FiniteBayesGame, strategy: BehaviorStrategy) -> np.ndarray:
    marg = game.marginal(strategy.player)
    return marg[:, None] * strategy.dist > ON_PATH_EPS


@dataclass(frozen=True)
class BneVerdict:
    is_bne: bool
    worst_regret: float
    witness: dict[str, Any] | None

    def __bool__(self) -> bool:
        return self.is_bne

    def to_dict(self) -> dict:
        return asdict(self)


def verify_bne(game: FiniteBayesGame, profile: StrategyProfile,
               tol: float = DEFAULT_TOL) -> BneVerdict:
    """Every on-path action of every type must be an interim best response within ``tol``."""
    worst = 0.0
    witness = None
    for player in PLAYERS:
        table = interim_table(game, profile, player)
        best = table.max(axis=1, keepdims=True)
        regret = np.where(_on_path_type_actions(game, profile.of(player)), best - table, 0.0)
        t, x = np.unravel_index(int(np.argmax(regret)), regret.shape)
        if regret[t, x] > worst:
            worst = float(regret[t, x])
            witness = {
                "player": player,
                "type": int(t),
                "action": int(x),
                "best_action": int(np.argmax(table[t])),
                "payoff": float(table[t, x]),
                "best_payoff": float(best[t, 0]),
            }
    return BneVerdict(worst <= tol, worst, witness)


@dataclass(frozen=True)
class ExPostVerdict:
    is_expost: bool
    value_a: float
    max_deviation: float
    witness: dict[str, Any] | None

    def __bool__(self) -> bool:
        return self.is_expost

    def to_dict(self) -> dict:
        return asdict(self)


def _require_bne(game, profile, tol) -> BneVerdict:
    verdict = verify_bne(game, profile, tol)
    if not verdict.is_bne:
        raise NotAnEquilibrium(
            f"profile is not a Bayes-Nash equilibrium (worst regret {verdict.worst_regret:.3g})"
        )
    return verdict


def verify_expost(game: FiniteBayesGame, profile: StrategyProfile,
                  tol: float = DEFAULT_TOL) -> ExPostVerdict:
    """Every positive-probability action pair must pay exactly the equilibrium value."""
    _require_bne(game, profile, tol)
    value = ex_ante_value(game, profile)
    path = path_distribution(game, profile)
    gap = np.where(path > ON_PATH_EPS, np.abs(game.payoff_a - value), 0.0)
    xa, xb = np.unravel_index(int(np.argmax(gap)), gap.shape)
    max_dev = float(gap[xa, xb])
    if max_dev <= tol:
        return ExPostVerdict(True, value, max_dev, None)
    # locate a type pair that reaches the violating action pair
    reach = (game.joint * np.outer(profile.strat_a.dist[:, xa], profile.strat_b.dist[:, xb]))
    sa, sb = np.unravel_index(int(np.argmax(reach)), reach.shape)
    witness = {
        "type_a": int(sa),
        "type_b": int(sb),
        "action_a": int(xa),
        "action_b": int(xb),
        "payoff_a": float(game.payoff_a[xa, xb]),
        "probability": float(path[xa, xb]),
    }
    return ExPostVerdict(False, value, max_dev, witness)


@dataclass(frozen=True)
class ConstancyVerdict:
    holds: bool
    value_a: float
    value_b: float
    max_deviation: float

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return asdict(self)


def verify_interim_constancy(game: FiniteBayesGame, profile: StrategyProfile,
                             tol: float = DEFAULT_TOL) -> ConstancyVerdict:
    """Each type's interim payoff at every action some type plays equals the value."""
    _require_bne(game, profile, tol)
    value_a = ex_ante_value(game, profile)
    values = {"A": value_a, "B": game.constant_sum - value_a}
    max_dev = 0.0
    for player in PLAYERS:
        played = _on_path_type_actions(game, profile.of(player)).any(axis=0)
        table = interim_table(game, profile, player)[:, played]
        max_dev = max(max_dev, float(np.abs(table - values[player]).max()))
    return ConstancyVerdict(max_dev <= tol, values["A"], values["B"], max_dev)


@dataclass(frozen=True)
class SingleOutcomeVerdict:
    single_outcome: bool
    outcome: Any
    outcome_mass: dict[str, float]

    def __bool__(self) -> bool:
        return self.single_outcome

    def to_dict(self) -> dict:
        return asdict(self)


def verify_single_outcome(game: FiniteBayesGame, outcome_map: OutcomeMap,
                          profile: StrategyProfile, tol: float = DEFAULT_TOL) -> SingleOutcomeVerdict:
    outcome_map.check_against(game)
    _require_bne(game, profile, tol)
    path = path_distribution(game, profile)
    mass: dict[Any, float] = defaultdict(float)
    for (i, j), label in np.ndenumerate(outcome_map.labels):
        if path[i, j] > ON_PATH_EPS:
            mass[label] += float(path[i, j])
    top = max(mass, key=mass.get)
    return SingleOutcomeVerdict(
        mass[top] >= 1.0 - tol,
        top if mass[top] >= 1.0 - tol else None,
        {str(k): v for k, v in mass.items()},
    )


@dataclass(frozen=True)
class EquilibriumCertificate:
    value_a: float
    value_b: float
    interim_payoffs: dict[str, dict[int, dict[int, float]]]
    bne: BneVerdict
    expost: ExPostVerdict | None
    identifiable_a: bool
    identifiable_b: bool
    tolerance: float

    @property
    def is_bne(self) -> bool:
        return self.bne.is_bne

    @property
    def is_expost(self) -> bool:
        return self.expost is not None and self.expost.is_expost

    def to_dict(self) -> dict:
        return {
            "value_A": self.value_a,
            "value_B": self.value_b,
            "interim_payoffs": {
                p: {str(t): {str(x): v for x, v in row.items()} for t, row in rows.items()}
                for p, rows in self.interim_payoffs.items()
            },
            "is_bne": self.bne.to_dict(),
            "is_expost": (
                self.expost.to_dict() if self.expost is not None
                else {"is_expost": False, "reason": "not an equilibrium"}
            ),
            "identifiable_A": self.identifiable_a,
            "identifiable_B": self.identifiable_b,
            "tolerance": self.tolerance,
        }


def certify(game: FiniteBayesGame, profile: StrategyProfile, tol: float = DEFAULT_TOL,
            rank_tol: float = DEFAULT_RANK_TOL) -> EquilibriumCertificate:
    bne = verify_bne(game, profile, tol)
    value_a = ex_ante_value(game, profile)
    interim: dict[str, dict[int, dict[int, float]]] = {}
    for player in PLAYERS:
        table = interim_table(game, profile, player)
        mask = _on_path_type_actions(game, profile.of(player))
        interim[player] = {
            int(t): {int(x): float(table[t, x]) for x in np.flatnonzero(mask[t])}
            for t in range(table.shape[0])
        }
    return EquilibriumCertificate(
        value_a=value_a,
        value_b=game.constant_sum - value_a,
        interim_payoffs=interim,
        bne=bne,
        expost=verify_expost(game, profile, tol) if bne.is_bne else None,
        identifiable_a=check_identifiable(profile.strat_a, rank_tol),
        identifiable_b=check_identifiable(profile.strat_b, rank_tol),
        tolerance=tol,
    )
