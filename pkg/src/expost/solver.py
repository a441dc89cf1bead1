"""Value and equilibria of finite constant-sum Bayesian games.

The game is reduced ex ante to a matrix game whose pure strategies are maps from
types to actions. Its value is computed by linear programming, and pure
Bayes-Nash equilibria are found by scanning every pure profile.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import kernels
from .equilibrium import DEFAULT_TOL, EquilibriumCertificate, certify
from .errors import SizeCapExceeded
from .game import (
    BehaviorStrategy,
    FiniteBayesGame,
    Player,
    PureStrategy,
    StrategyProfile,
    conditional_matrix,
    other,
)

DEFAULT_CELL_CAP = 10**6
_LP_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


def pure_strategy_count(game: FiniteBayesGame, player: Player) -> int:
    return game.n_actions[player] ** game.n_types[player]


def _check_cap(game: FiniteBayesGame, cap: int) -> None:
    cells = pure_strategy_count(game, "A") * pure_strategy_count(game, "B")
    if cells > cap:
        raise SizeCapExceeded(f"induced normal form has {cells} cells, cap is {cap}")


@dataclass(frozen=True, eq=False)
class InducedNormalForm:
    expected_payoff: np.ndarray
    strategies_a: np.ndarray
    strategies_b: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.expected_payoff.shape


def induce_normal_form(game: FiniteBayesGame, cap: int = DEFAULT_CELL_CAP,
                       backend: str | None = None) -> InducedNormalForm:
    _check_cap(game, cap)
    digits_a = kernels.pure_strategy_table(game.n_types["A"], game.n_actions["A"])
    digits_b = kernels.pure_strategy_table(game.n_types["B"], game.n_actions["B"])
    matrix = kernels.induced_payoff_matrix(game.joint, game.payoff_a, digits_a, digits_b,
                                           backend=backend)
    return InducedNormalForm(matrix, digits_a, digits_b)


def _project(weights: np.ndarray, digits: np.ndarray, n_actions: int,
             player: Player) -> BehaviorStrategy:
    """Per-type action distribution implied by a mixture over pure strategies."""
    n_types = digits.shape[1]
    dist = np.zeros((n_types, n_actions))
    for t in range(n_types):
        np.add.at(dist[t], digits[:, t], weights)
    dist /= dist.sum(axis=1, keepdims=True)
    return BehaviorStrategy(player, dist)


def _clean(weights: np.ndarray) -> np.ndarray:
    w = np.clip(weights, 0.0, None)
    return w / w.sum()


def _maximin(matrix: np.ndarray) -> np.ndarray:
    """Row player's optimal mixture for ``max_x min_j (x^T M)_j``."""
    k_rows, k_cols = matrix.shape
    # variables (x_1..x_k, v); minimise -v subject to v - (M^T x)_j <= 0
    c = np.zeros(k_rows + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-matrix.T, np.ones((k_cols, 1))])
    a_eq = np.hstack([np.ones((1, k_rows)), np.zeros((1, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(k_cols), A_eq=a_eq, b_eq=[1.0],
                  bounds=[(0, None)] * k_rows + [(None, None)],
                  method="highs-ds", options=_LP_OPTIONS)
    if res.status != 0:
        raise RuntimeError(f"minimax LP failed: {res.message}")
    return _clean(res.x[:-1])


@dataclass(frozen=True, eq=False)
class MinimaxSolution:
    value: float
    maxmin: float
    minmax: float
    mixed_a: np.ndarray
    mixed_b: np.ndarray
    behavioral_a: BehaviorStrategy
    behavioral_b: BehaviorStrategy
    normal_form: InducedNormalForm

    @property
    def duality_gap(self) -> float:
        return self.minmax - self.maxmin

    @property
    def profile(self) -> StrategyProfile:
        return StrategyProfile(self.behavioral_a, self.behavioral_b)

    def to_dict(self, support_tol: float = 1e-12) -> dict:
        def support(weights, digits):
            return [
                {"strategy": [int(a) for a in digits[i]], "weight": float(weights[i])}
                for i in np.flatnonzero(weights > support_tol)
            ]

        return {
            "value": self.value,
            "maxmin": self.maxmin,
            "minmax": self.minmax,
            "duality_gap": self.duality_gap,
            "mixed_A": support(self.mixed_a, self.normal_form.strategies_a),
            "mixed_B": support(self.mixed_b, self.normal_form.strategies_b),
            "behavioral_A": self.behavioral_a.dist.tolist(),
            "behavioral_B": self.behavioral_b.dist.tolist(),
        }


def solve_minimax_lp(game: FiniteBayesGame, cap: int = DEFAULT_CELL_CAP) -> MinimaxSolution:
    """Value of the induced matrix game for player A with both optimal mixtures.

    The payoffs are centred at ``constant_sum / 2`` for the LP and shifted back;
    ``maxmin``/``minmax`` are re-evaluated exactly from the returned mixtures.
    """
    nf = induce_normal_form(game, cap)
    shift = game.constant_sum / 2.0
    centred = nf.expected_payoff - shift
    x = _maximin(centred)
    y = _maximin(-centred.T)
    maxmin = float((x @ centred).min()) + shift
    minmax = float((centred @ y).max()) + shift
    return MinimaxSolution(
        value=0.5 * (maxmin + minmax),
        maxmin=maxmin,
        minmax=minmax,
        mixed_a=x,
        mixed_b=y,
        behavioral_a=_project(x, nf.strategies_a, game.n_actions["A"], "A"),
        behavioral_b=_project(y, nf.strategies_b, game.n_actions["B"], "B"),
        normal_form=nf,
    )


def security_level(game: FiniteBayesGame, strategy: BehaviorStrategy) -> float:
    """Worst-case ex-ante payoff of ``strategy`` over all opponent strategies.

    The opponent's best reply decomposes type by type, so the minimum over the
    induced pure strategies is a sum of per-type minima.
    """
    player = strategy.player
    joint = game.joint if player == "A" else game.joint.T
    if strategy.dist.shape != (game.n_types[player], game.n_actions[player]):
        raise ValueError("strategy does not match the game")
    # weight[s_opp, x_own] = sum_s joint[s, s_opp] * sigma[s, x_own]
    weight = joint.T @ strategy.dist
    per_type = weight @ game.payoff(player)  # (n_opp_types, m_opp)
    return float(per_type.min(axis=1).sum())


@dataclass(frozen=True)
class BestResponse:
    strategy: PureStrategy
    payoffs: tuple[float, ...]


def best_response(game: FiniteBayesGame, opponent: BehaviorStrategy, player: Player,
                  tie_tol: float = 1e-12) -> BestResponse:
    """Interim best response per type, ties going to the lowest action index."""
    if opponent.player != other(player):
        raise ValueError(f"opponent strategy must belong to {other(player)}")
    table = conditional_matrix(game, player) @ opponent.dist @ game.payoff(player).T
    best = table.max(axis=1, keepdims=True)
    actions = np.argmax(table >= best - tie_tol, axis=1)
    return BestResponse(
        PureStrategy(player, tuple(int(a) for a in actions)),
        tuple(float(v) for v in best[:, 0]),
    )


@dataclass(frozen=True)
class BneEntry:
    actions_a: tuple[int, ...]
    actions_b: tuple[int, ...]
    certificate: EquilibriumCertificate

    def to_dict(self) -> dict:
        return {
            "A": list(self.actions_a),
            "B": list(self.actions_b),
            "certificate": self.certificate.to_dict(),
        }


@dataclass(frozen=True)
class BneEnumeration:
    entries: list[BneEntry]
    profiles_scanned: int
    lp_value: float | None
    tolerance: float

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def to_dict(self) -> dict:
        return {
            "profiles_scanned": self.profiles_scanned,
            "count": len(self.entries),
            "lp_value": self.lp_value,
            "tolerance": self.tolerance,
            "equilibria": [e.to_dict() for e in self.entries],
        }


def pure_profile_regrets(game: FiniteBayesGame, cap: int = DEFAULT_CELL_CAP,
                         backend: str | None = None):
    """Worst interim regret of A and of B for every pure profile, lexicographic order."""
    _check_cap(game, cap)
    digits_a = kernels.pure_strategy_table(game.n_types["A"], game.n_actions["A"])
    digits_b = kernels.pure_strategy_table(game.n_types["B"], game.n_actions["B"])
    reg_a, reg_b = kernels.pure_profile_regrets(
        conditional_matrix(game, "A"), conditional_matrix(game, "B"),
        game.payoff("A"), game.payoff("B"), digits_a, digits_b, backend=backend,
    )
    return reg_a, reg_b, digits_a, digits_b


def enumerate_pure_bne(game: FiniteBayesGame, tol: float = DEFAULT_TOL,
                       cap: int = DEFAULT_CELL_CAP, with_value: bool = True,
                       backend: str | None = None) -> BneEnumeration:
    reg_a, reg_b, digits_a, digits_b = pure_profile_regrets(game, cap, backend)
    hits = np.argwhere(np.maximum(reg_a, reg_b) <= tol)  # row-major = lexicographic
    entries = []
    for k, l in hits:
        profile = StrategyProfile.pure(game, digits_a[k], digits_b[l])
        entries.append(BneEntry(
            tuple(int(a) for a in digits_a[k]),
            tuple(int(a) for a in digits_b[l]),
            certify(game, profile, tol),
        ))
    lp_value = solve_minimax_lp(game, cap).value if with_value else None
    return BneEnumeration(entries, int(reg_a.size), lp_value, tol)
