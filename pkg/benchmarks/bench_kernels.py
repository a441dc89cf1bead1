"""Time the compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Each case is a random game;
both backends are checked for agreement before timing.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from expost import kernels
from expost.game import FiniteBayesGame, conditional_matrix

CASES = [(2, 2), (3, 3), (4, 2), (4, 3), (4, 4), (5, 3)]


def random_game(n_types: int, n_actions: int, rng: np.random.Generator) -> FiniteBayesGame:
    joint = rng.dirichlet(np.ones(n_types * n_types)).reshape(n_types, n_types)
    payoff = rng.integers(0, 3, size=(n_actions, n_actions)).astype(float)
    return FiniteBayesGame(joint, payoff, 2.0)


def kernel_args(game: FiniteBayesGame):
    digits_a = kernels.pure_strategy_table(game.n_types["A"], game.n_actions["A"])
    digits_b = kernels.pure_strategy_table(game.n_types["B"], game.n_actions["B"])
    return {
        "induced_payoff_matrix": (game.joint, game.payoff_a, digits_a, digits_b),
        "pure_profile_regrets": (conditional_matrix(game, "A"), conditional_matrix(game, "B"),
                                 game.payoff("A"), game.payoff("B"), digits_a, digits_b),
    }


def best_time(fn, repeat: int) -> float:
    number = 1
    while timeit.timeit(fn, number=number) < 0.05 and number < 10_000:
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels unavailable; only the numpy fallback is installed")
    rng = np.random.default_rng(args.seed)
    header = f"{'kernel':<24}{'types x acts':>13}{'cells':>10}" + "".join(f"{b + ' ms':>12}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for n_types, n_actions in CASES:
        game = random_game(n_types, n_actions, rng)
        for name, call_args in kernel_args(game).items():
            outputs = [getattr(kernels, name)(*call_args, backend=b) for b in backends]
            first = np.atleast_3d(np.asarray(outputs[0]))
            for other in outputs[1:]:
                assert np.allclose(first, np.atleast_3d(np.asarray(other)), atol=1e-12), name
            times = [best_time(lambda b=b: getattr(kernels, name)(*call_args, backend=b), args.repeat)
                     for b in backends]
            cells = (n_actions ** n_types) ** 2
            line = f"{name:<24}{f'{n_types} x {n_actions}':>13}{cells:>10}"
            line += "".join(f"{1e3 * t:>12.3f}" for t in times)
            if len(times) > 1:
                line += f"{times[backends.index('numpy')] / times[backends.index('cython')]:>9.1f}x"
            print(line)


if __name__ == "__main__":
    main()
