import numpy as np
import pytest

from expost.fixtures import load_game, load_profile
from expost.game import FiniteBayesGame

# acceptance criteria register their verdicts here; printed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])


@pytest.fixture
def example1():
    return load_game("example1.json")


@pytest.fixture
def example1_profile(example1):
    return load_profile("example1_strategy.json", example1)


@pytest.fixture
def appendix_b():
    return load_game("appendixB_4x4.json")


@pytest.fixture
def appendix_b_profile(appendix_b):
    return load_profile("appendixB_4x4_strategy.json", appendix_b)


@pytest.fixture
def full_rank():
    return load_game("fullrank_2x2.json")


def random_joint(rng, n_a, n_b, kind="full"):
    """Random joint type distribution.

    ``kind`` is 'full', 'independent', 'grid-independent' (independent with marginal
    weights drawn from {1, 2, 3}, so beliefs are coarse rationals) or a target rank.
    """
    if kind == "full":
        return rng.dirichlet(np.ones(n_a * n_b)).reshape(n_a, n_b)
    if kind == "independent":
        return np.outer(rng.dirichlet(np.ones(n_a)), rng.dirichlet(np.ones(n_b)))
    if kind == "grid-independent":
        pa, pb = rng.integers(1, 4, size=n_a), rng.integers(1, 4, size=n_b)
        return np.outer(pa / pa.sum(), pb / pb.sum())
    rank = int(kind)
    joint = sum(np.outer(rng.dirichlet(np.ones(n_a)), rng.dirichlet(np.ones(n_b))) * w
                for w in rng.dirichlet(np.ones(rank)))
    return joint / joint.sum()


def random_game(rng, n_types=(2, 4), n_actions=(2, 4), kind="full", values=(0.0, 1.0)):
    n_a, n_b = rng.integers(n_types[0], n_types[1] + 1, size=2)
    m_a, m_b = rng.integers(n_actions[0], n_actions[1] + 1, size=2)
    while True:
        payoff = rng.choice(values, size=(m_a, m_b))
        if np.ptp(payoff) > 0:
            break
    return FiniteBayesGame(random_joint(rng, n_a, n_b, kind), payoff, 1.0)
