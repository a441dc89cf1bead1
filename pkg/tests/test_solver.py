import itertools

import numpy as np
import pytest
from scipy.optimize import linprog

from expost.equilibrium import ex_ante_value
from expost.errors import SizeCapExceeded
from expost.game import BehaviorStrategy, FiniteBayesGame, StrategyProfile
from expost.solver import (
    best_response,
    enumerate_pure_bne,
    induce_normal_form,
    pure_strategy_count,
    security_level,
    solve_minimax_lp,
)

from conftest import random_game


def _brute_normal_form(game):
    """Ex-ante payoff of A for every pure strategy pair, by direct summation."""
    sa = list(itertools.product(range(game.n_actions["A"]), repeat=game.n_types["A"]))
    sb = list(itertools.product(range(game.n_actions["B"]), repeat=game.n_types["B"]))
    out = np.zeros((len(sa), len(sb)))
    for i, a in enumerate(sa):
        for j, b in enumerate(sb):
            out[i, j] = sum(game.joint[s, t] * game.payoff_a[a[s], b[t]]
                            for s in range(len(a)) for t in range(len(b)))
    return out, sa, sb


def _brute_bne(game, tol=1e-9):
    matrix, sa, sb = _brute_normal_form(game)
    col_best = matrix.max(axis=0)
    row_worst = matrix.min(axis=1)
    return [(sa[i], sb[j]) for i in range(len(sa)) for j in range(len(sb))
            if matrix[i, j] >= col_best[j] - tol and matrix[i, j] <= row_worst[i] + tol]


def _ipm_value(matrix):
    """Matrix game value via the textbook positive-shift LP, solved by interior point."""
    shift = 1.0 - matrix.min()
    m = matrix + shift
    k, n = m.shape
    res = linprog(np.ones(k), A_ub=-m.T, b_ub=-np.ones(n), bounds=[(0, None)] * k,
                  method="highs-ipm")
    return 1.0 / res.fun - shift


def test_pure_strategy_count(appendix_b):
    assert pure_strategy_count(appendix_b, "A") == 16


def test_normal_form_lexicographic(example1):
    nf = induce_normal_form(example1)
    np.testing.assert_array_equal(nf.strategies_a, [[0, 0], [0, 1], [1, 0], [1, 1]])
    brute, _, _ = _brute_normal_form(example1)
    np.testing.assert_allclose(nf.expected_payoff, brute, atol=1e-14)


def test_cap_enforced(appendix_b):
    with pytest.raises(SizeCapExceeded):
        induce_normal_form(appendix_b, cap=255)
    with pytest.raises(SizeCapExceeded):
        enumerate_pure_bne(appendix_b, cap=100)
    assert induce_normal_form(appendix_b, cap=256).shape == (16, 16)


def test_example1_enumeration(example1):
    result = enumerate_pure_bne(example1)
    assert result.profiles_scanned == 16
    listed = [(e.actions_a, e.actions_b) for e in result]
    assert listed == _brute_bne(example1)
    assert len(result) == 4
    assert result.lp_value == pytest.approx(0.5, abs=1e-12)
    assert any(not e.certificate.is_expost for e in result)


def test_full_rank_matching_has_no_pure_bne(full_rank):
    assert len(enumerate_pure_bne(full_rank)) == 0
    assert solve_minimax_lp(full_rank).value == pytest.approx(0.5, abs=1e-9)


@pytest.mark.parametrize("seed", range(25))
def test_enumeration_matches_brute_force(seed):
    rng = np.random.default_rng(1000 + seed)
    game = random_game(rng, n_types=(2, 3), n_actions=(2, 3), kind=["full", "independent"][seed % 2])
    result = enumerate_pure_bne(game)
    assert [(e.actions_a, e.actions_b) for e in result] == _brute_bne(game)
    for e in result:
        assert e.certificate.value_a == pytest.approx(result.lp_value, abs=1e-9)


@pytest.mark.parametrize("seed", range(25))
def test_lp_value_matches_oracle(seed):
    rng = np.random.default_rng(2000 + seed)
    game = random_game(rng, n_types=(2, 3), n_actions=(2, 3), values=(0.0, 0.3, 0.6, 1.0))
    sol = solve_minimax_lp(game)
    brute, _, _ = _brute_normal_form(game)
    assert sol.value == pytest.approx(_ipm_value(brute), abs=1e-8)
    assert abs(sol.duality_gap) <= 1e-9
    # projected behavioural strategies guarantee the value on both sides
    assert security_level(game, sol.behavioral_a) == pytest.approx(sol.value, abs=1e-9)
    assert game.constant_sum - security_level(game, sol.behavioral_b) == pytest.approx(sol.value, abs=1e-9)
    assert ex_ante_value(game, sol.profile) == pytest.approx(sol.value, abs=1e-9)


def test_security_level_matches_brute_force():
    rng = np.random.default_rng(9)
    for _ in range(20):
        game = random_game(rng, n_types=(2, 3), n_actions=(2, 3), values=(0.0, 0.5, 1.0))
        dist = rng.dirichlet(np.ones(game.n_actions["A"]), size=game.n_types["A"])
        strat = BehaviorStrategy("A", dist)
        worst = np.inf
        for b in itertools.product(range(game.n_actions["B"]), repeat=game.n_types["B"]):
            reply = StrategyProfile.pure(game, (0,) * game.n_types["A"], b).strat_b
            profile = StrategyProfile(strat, reply)
            worst = min(worst, ex_ante_value(game, profile))
        assert security_level(game, strat) == pytest.approx(worst, abs=1e-12)


def test_best_response_tie_breaks_low(example1):
    uniform = BehaviorStrategy("B", [[0.5, 0.5], [0.5, 0.5]])
    br = best_response(example1, uniform, "A")
    assert br.strategy.action_of == (0, 0)
    assert br.payoffs == (0.5, 0.5)
    with pytest.raises(ValueError):
        best_response(example1, uniform, "B")


def test_best_response_of_b(example1):
    br = best_response(example1, BehaviorStrategy("A", [[1.0, 0.0], [1.0, 0.0]]), "B")
    assert br.strategy.action_of == (1, 1)
    assert br.payoffs == (1.0, 1.0)


def test_solution_dict(example1):
    data = solve_minimax_lp(example1).to_dict()
    assert data["value"] == pytest.approx(0.5)
    assert sum(s["weight"] for s in data["mixed_A"]) == pytest.approx(1.0)


def test_cell_cap_default_for_larger_game():
    # 5 types with 5 actions each: 3125^2 cells
    game = FiniteBayesGame(np.full((5, 5), 1 / 25), np.eye(5), 1.0)
    with pytest.raises(SizeCapExceeded):
        enumerate_pure_bne(game)
