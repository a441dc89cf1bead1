"""Finite two-player constant-sum Bayesian games with type-independent payoffs.

Payoffs are stored for player A only; player B receives ``constant_sum - payoff_a``,
so the constant-sum property holds by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptySupport,
    InconsistentOutcomeMap,
    InvalidStrategy,
    NegativeProbability,
    NonStochasticJoint,
)

Player = Literal["A", "B"]
PLAYERS: tuple[Player, Player] = ("A", "B")

SUM_TOL = 1e-12
# probability mass at or below this is treated as off the equilibrium path
ON_PATH_EPS = 1e-12


def other(player: Player) -> Player:
    if player == "A":
        return "B"
    if player == "B":
        return "A"
    raise ValueError(f"unknown player {player!r}")


def _as_matrix(values: Any, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 2 or 0 in arr.shape:
        raise DimensionMismatch(f"{name} must be a non-empty matrix, got shape {arr.shape}")
    return arr


@dataclass(frozen=True, eq=False)
class FiniteBayesGame:
    """Joint type distribution plus the constant-sum payoff kernel.

    ``joint[sA, sB]`` is the probability of the type pair and ``payoff_a[xA, xB]``
    is A's payoff from the action pair. Type counts and action counts are read off
    the array shapes.
    """

    joint: np.ndarray
    payoff_a: np.ndarray
    constant_sum: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "joint", _as_matrix(self.joint, "joint"))
        object.__setattr__(self, "payoff_a", _as_matrix(self.payoff_a, "payoff_a"))
        object.__setattr__(self, "constant_sum", float(self.constant_sum))
        self.joint.setflags(write=False)
        self.payoff_a.setflags(write=False)
        validate_game(self)

    @property
    def n_types(self) -> dict[str, int]:
        return {"A": self.joint.shape[0], "B": self.joint.shape[1]}

    @property
    def n_actions(self) -> dict[str, int]:
        return {"A": self.payoff_a.shape[0], "B": self.payoff_a.shape[1]}

    @property
    def payoff_b(self) -> np.ndarray:
        return self.constant_sum - self.payoff_a

    def payoff(self, player: Player) -> np.ndarray:
        """Payoff matrix of ``player`` indexed ``[own action, opponent action]``."""
        if player == "A":
            return self.payoff_a
        return self.payoff_b.T

    def marginal(self, player: Player) -> np.ndarray:
        return self.joint.sum(axis=1) if player == "A" else self.joint.sum(axis=0)

    @property
    def payoff_bound(self) -> float:
        return float(max(np.abs(self.payoff_a).max(), np.abs(self.payoff_b).max()))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "FiniteBayesGame":
        try:
            joint = data["joint"]
            payoff = data["payoff_A"]
        except KeyError as exc:
            raise DimensionMismatch(f"game JSON is missing key {exc}") from None
        game = cls(joint, payoff, data.get("constant_sum", 0.0))
        declared_types = data.get("types")
        if declared_types is not None and (
            int(declared_types["A"]) != game.n_types["A"]
            or int(declared_types["B"]) != game.n_types["B"]
        ):
            raise DimensionMismatch(
                f"declared types {dict(declared_types)} do not match joint shape {game.joint.shape}"
            )
        declared_actions = data.get("actions")
        if declared_actions is not None and (
            int(declared_actions["A"]) != game.n_actions["A"]
            or int(declared_actions["B"]) != game.n_actions["B"]
        ):
            raise DimensionMismatch(
                f"declared actions {dict(declared_actions)} do not match payoff shape "
                f"{game.payoff_a.shape}"
            )
        return game

    def to_dict(self) -> dict[str, Any]:
        return {
            "types": self.n_types,
            "joint": self.joint.tolist(),
            "actions": self.n_actions,
            "payoff_A": self.payoff_a.tolist(),
            "constant_sum": self.constant_sum,
        }


def validate_game(game: FiniteBayesGame) -> bool:
    """Check the game's invariants, raising on the first violation."""
    joint = game.joint
    if np.any(~np.isfinite(joint)):
        raise NonStochasticJoint("joint contains non-finite entries")
    if np.any(joint < 0):
        idx = tuple(int(i) for i in np.argwhere(joint < 0)[0])
        raise NegativeProbability(f"joint{list(idx)} = {joint[idx]} is negative")
    total = float(joint.sum())
    if abs(total - 1.0) > SUM_TOL:
        raise NonStochasticJoint(f"joint sums to {total!r}, not 1")
    for player, marg in (("A", joint.sum(axis=1)), ("B", joint.sum(axis=0))):
        empty = np.flatnonzero(marg <= 0)
        if empty.size:
            raise EmptySupport(f"type {int(empty[0])} of player {player} has zero marginal")
    if np.any(~np.isfinite(game.payoff_a)):
        raise DimensionMismatch("payoff_A contains non-finite entries")
    return True


def conditional_matrix(game: FiniteBayesGame, player: Player) -> np.ndarray:
    """Row ``t`` is the distribution of the opponent's type given ``player``'s type ``t``."""
    joint = game.joint if player == "A" else game.joint.T
    return joint / joint.sum(axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class BehaviorStrategy:
    """Type-contingent mixed strategy: ``dist[type, action]``."""

    player: Player
    dist: np.ndarray

    def __post_init__(self) -> None:
        if self.player not in PLAYERS:
            raise InvalidStrategy(f"unknown player {self.player!r}")
        dist = _as_matrix(self.dist, "strategy")
        if np.any(~np.isfinite(dist)) or np.any(dist < 0):
            raise InvalidStrategy("strategy probabilities must be finite and non-negative")
        row_sums = dist.sum(axis=1)
        bad = np.flatnonzero(np.abs(row_sums - 1.0) > SUM_TOL)
        if bad.size:
            raise InvalidStrategy(
                f"row for type {int(bad[0])} sums to {row_sums[bad[0]]!r}, not 1"
            )
        dist.setflags(write=False)
        object.__setattr__(self, "dist", dist)

    @property
    def n_types(self) -> int:
        return self.dist.shape[0]

    @property
    def n_actions(self) -> int:
        return self.dist.shape[1]

    @property
    def is_pure(self) -> bool:
        return bool(np.all((self.dist == 0.0) | (self.dist == 1.0)))

    def to_pure(self) -> "PureStrategy":
        if not self.is_pure:
            raise InvalidStrategy("strategy is not pure")
        return PureStrategy(self.player, tuple(int(a) for a in self.dist.argmax(axis=1)))

    @classmethod
    def constant(cls, player: Player, n_types: int, mix: Sequence[float]) -> "BehaviorStrategy":
        return cls(player, np.tile(np.asarray(mix, dtype=float), (n_types, 1)))

    def to_dict(self) -> dict[str, Any]:
        if self.is_pure:
            return {"pure": list(self.to_pure().action_of)}
        return {"behavior": self.dist.tolist()}


@dataclass(frozen=True)
class PureStrategy:
    player: Player
    action_of: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "action_of", tuple(int(a) for a in self.action_of))
        if any(a < 0 for a in self.action_of):
            raise InvalidStrategy("action indices must be non-negative")

    def to_behavior(self, n_actions: int) -> BehaviorStrategy:
        if any(a >= n_actions for a in self.action_of):
            raise InvalidStrategy(f"action index out of range for {n_actions} actions")
        dist = np.zeros((len(self.action_of), n_actions))
        dist[np.arange(len(self.action_of)), self.action_of] = 1.0
        return BehaviorStrategy(self.player, dist)


@dataclass(frozen=True, eq=False)
class StrategyProfile:
    strat_a: BehaviorStrategy
    strat_b: BehaviorStrategy

    def __post_init__(self) -> None:
        if self.strat_a.player != "A" or self.strat_b.player != "B":
            raise InvalidStrategy("profile needs an A strategy and a B strategy")

    def of(self, player: Player) -> BehaviorStrategy:
        return self.strat_a if player == "A" else self.strat_b

    def check_against(self, game: FiniteBayesGame) -> None:
        for player in PLAYERS:
            strat = self.of(player)
            shape = (game.n_types[player], game.n_actions[player])
            if strat.dist.shape != shape:
                raise DimensionMismatch(
                    f"strategy of {player} has shape {strat.dist.shape}, game expects {shape}"
                )

    @classmethod
    def pure(cls, game: FiniteBayesGame, actions_a: Sequence[int],
             actions_b: Sequence[int]) -> "StrategyProfile":
        return cls(
            PureStrategy("A", tuple(actions_a)).to_behavior(game.n_actions["A"]),
            PureStrategy("B", tuple(actions_b)).to_behavior(game.n_actions["B"]),
        )

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], game: FiniteBayesGame) -> "StrategyProfile":
        strategies = {}
        for player in PLAYERS:
            if player not in data:
                raise InvalidStrategy(f"strategy JSON is missing player {player}")
            spec = data[player]
            if "pure" in spec:
                strategies[player] = PureStrategy(player, tuple(spec["pure"])).to_behavior(
                    game.n_actions[player]
                )
            elif "behavior" in spec:
                strategies[player] = BehaviorStrategy(player, spec["behavior"])
            else:
                raise InvalidStrategy(f"strategy for {player} needs 'pure' or 'behavior'")
        profile = cls(strategies["A"], strategies["B"])
        profile.check_against(game)
        return profile

    def to_dict(self) -> dict[str, Any]:
        return {"A": self.strat_a.to_dict(), "B": self.strat_b.to_dict()}


@dataclass(frozen=True, eq=False)
class OutcomeMap:
    """Outcome labels over action pairs plus each player's utility of an outcome."""

    outcome_of: Sequence[Sequence[Any]]
    utility_a: Mapping[Any, float]
    utility_b: Mapping[Any, float]
    labels: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        labels = np.empty((len(self.outcome_of), len(self.outcome_of[0])), dtype=object)
        for i, row in enumerate(self.outcome_of):
            if len(row) != labels.shape[1]:
                raise InconsistentOutcomeMap("outcome table is ragged")
            for j, label in enumerate(row):
                labels[i, j] = label
        object.__setattr__(self, "labels", labels)
        for name, util in (("A", self.utility_a), ("B", self.utility_b)):
            values = list(util.values())
            if len(set(values)) != len(values):
                raise InconsistentOutcomeMap(f"utility of player {name} is not injective")

    def check_against(self, game: FiniteBayesGame, tol: float = 1e-9) -> None:
        if self.labels.shape != game.payoff_a.shape:
            raise InconsistentOutcomeMap(
                f"outcome table shape {self.labels.shape} != payoff shape {game.payoff_a.shape}"
            )
        for (i, j), label in np.ndenumerate(self.labels):
            if label not in self.utility_a or label not in self.utility_b:
                raise InconsistentOutcomeMap(f"outcome {label!r} has no utility")
            if abs(self.utility_a[label] - game.payoff_a[i, j]) > tol:
                raise InconsistentOutcomeMap(f"utility of {label!r} for A disagrees at {(i, j)}")
            if abs(self.utility_b[label] - game.payoff_b[i, j]) > tol:
                raise InconsistentOutcomeMap(f"utility of {label!r} for B disagrees at {(i, j)}")


def identity_outcome_map(game: FiniteBayesGame) -> OutcomeMap:
    """Outcomes are the utility-equivalence classes of action pairs."""
    values = sorted({float(v) for v in game.payoff_a.ravel()})
    table = [[float(v) for v in row] for row in game.payoff_a]
    return OutcomeMap(
        table,
        {v: v for v in values},
        {v: game.constant_sum - v for v in values},
    )
