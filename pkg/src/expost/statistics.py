"""Statistical richness conditions on the joint type distribution.

Completeness for a player means no non-zero function of the opponent's type has
zero conditional mean at every own type, which for finite types is full rank of
the joint matrix in the opponent's dimension. SLI is linear independence of a
player's own conditional rows; convex independence only forbids a row from lying
in the convex hull of the others.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import linprog

from .game import FiniteBayesGame, Player, conditional_matrix, other

DEFAULT_RANK_TOL = 1e-9
HULL_SLACK = 1e-9


def numerical_rank(matrix: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    """Count singular values at or above ``rank_tol`` times the largest one."""
    sv = np.linalg.svd(np.asarray(matrix, dtype=float), compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv >= rank_tol * sv[0]))


def check_completeness(game: FiniteBayesGame, player: Player,
                       rank_tol: float = DEFAULT_RANK_TOL) -> tuple[bool, int]:
    """Return (complete for ``player``, rank of the joint matrix)."""
    rank = numerical_rank(game.joint, rank_tol)
    return rank == game.n_types[other(player)], rank


def check_sli(game: FiniteBayesGame, player: Player,
              rank_tol: float = DEFAULT_RANK_TOL) -> bool:
    cond = conditional_matrix(game, player)
    return numerical_rank(cond, rank_tol) == cond.shape[0]


def hull_distance(points: np.ndarray, target: np.ndarray) -> float:
    """Smallest max-norm distance from ``target`` to the convex hull of ``points``.

    Solved as the LP: minimise t subject to -t <= sum_j w_j p_j - target <= t,
    w >= 0, sum w = 1.
    """
    points = np.atleast_2d(points)
    k, d = points.shape
    if k == 0:
        return float("inf")
    # variables: w_1..w_k, t
    c = np.zeros(k + 1)
    c[-1] = 1.0
    ones = np.ones((d, 1))
    a_ub = np.vstack([np.hstack([points.T, -ones]), np.hstack([-points.T, -ones])])
    b_ub = np.concatenate([target, -target])
    a_eq = np.hstack([np.ones((1, k)), np.zeros((1, 1))])
    res = linprog(
        c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0],
        bounds=[(0, None)] * (k + 1), method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise RuntimeError(f"hull LP failed: {res.message}")
    return float(res.fun)


def check_convex_independence(game: FiniteBayesGame, player: Player,
                              slack: float = HULL_SLACK) -> bool:
    cond = conditional_matrix(game, player)
    for row in range(cond.shape[0]):
        rest = np.delete(cond, row, axis=0)
        if rest.shape[0] and hull_distance(rest, cond[row]) <= slack:
            return False
    return True


@dataclass(frozen=True)
class StatisticsReport:
    completeness_a: bool
    completeness_b: bool
    rank_joint: int
    sli_a: bool
    sli_b: bool
    convex_indep_a: bool
    convex_indep_b: bool
    rank_tolerance: float

    def to_dict(self) -> dict:
        return asdict(self)


def statistics_report(game: FiniteBayesGame,
                      rank_tol: float = DEFAULT_RANK_TOL) -> StatisticsReport:
    comp_a, rank = check_completeness(game, "A", rank_tol)
    comp_b, _ = check_completeness(game, "B", rank_tol)
    return StatisticsReport(
        completeness_a=comp_a,
        completeness_b=comp_b,
        rank_joint=rank,
        sli_a=check_sli(game, "A", rank_tol),
        sli_b=check_sli(game, "B", rank_tol),
        convex_indep_a=check_convex_independence(game, "A"),
        convex_indep_b=check_convex_independence(game, "B"),
        rank_tolerance=rank_tol,
    )
