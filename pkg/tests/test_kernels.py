import os
import subprocess
import sys

import numpy as np
import pytest

from expost import kernels
from expost.game import conditional_matrix
from expost.solver import enumerate_pure_bne, induce_normal_form

from conftest import random_game


def test_backend_selected():
    assert kernels.BACKEND in kernels.available_backends()
    assert "numpy" in kernels.available_backends()


def test_pure_strategy_table_order():
    table = kernels.pure_strategy_table(2, 3)
    assert table.shape == (9, 2)
    assert table[:4].tolist() == [[0, 0], [0, 1], [0, 2], [1, 0]]
    assert kernels.pure_strategy_table(3, 1).tolist() == [[0, 0, 0]]


@pytest.mark.parametrize("seed", range(15))
def test_backends_agree(seed):
    rng = np.random.default_rng(seed)
    game = random_game(rng, kind=["full", "independent", "2"][seed % 3], values=(0.0, 0.4, 1.0))
    da = kernels.pure_strategy_table(game.n_types["A"], game.n_actions["A"])
    db = kernels.pure_strategy_table(game.n_types["B"], game.n_actions["B"])
    args = (conditional_matrix(game, "A"), conditional_matrix(game, "B"),
            game.payoff("A"), game.payoff("B"), da, db)
    results = {b: kernels.pure_profile_regrets(*args, backend=b) for b in kernels.available_backends()}
    mats = {b: kernels.induced_payoff_matrix(game.joint, game.payoff_a, da, db, backend=b)
            for b in kernels.available_backends()}
    ref = results["numpy"]
    for b in results:
        np.testing.assert_allclose(results[b][0], ref[0], atol=1e-12)
        np.testing.assert_allclose(results[b][1], ref[1], atol=1e-12)
        np.testing.assert_allclose(mats[b], mats["numpy"], atol=1e-12)
    listed = {b: [(e.actions_a, e.actions_b) for e in enumerate_pure_bne(game, with_value=False, backend=b)]
              for b in kernels.available_backends()}
    assert all(v == listed["numpy"] for v in listed.values())


def test_regrets_are_nonnegative(appendix_b):
    for backend in kernels.available_backends():
        reg_a, reg_b = kernels.pure_profile_regrets(
            conditional_matrix(appendix_b, "A"), conditional_matrix(appendix_b, "B"),
            appendix_b.payoff("A"), appendix_b.payoff("B"),
            kernels.pure_strategy_table(4, 2), kernels.pure_strategy_table(4, 2), backend=backend,
        )
        assert reg_a.shape == reg_b.shape == (16, 16)
        assert reg_a.min() >= 0 and reg_b.min() >= 0
    assert induce_normal_form(appendix_b).shape == (16, 16)


def test_env_forces_fallback():
    env = dict(os.environ, EXPOST_KERNELS="numpy")
    out = subprocess.run(
        [sys.executable, "-c", "from expost import kernels; print(kernels.BACKEND, kernels.available_backends())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy ['numpy']"
