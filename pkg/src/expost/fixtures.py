"""Executable worked examples with their expected verdicts.

Each fixture builds its objects, computes a dictionary of observed quantities
and compares them with a list of expectations. Game and strategy files for the
finite examples ship in ``expost/data``.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Callable

import numpy as np

from .dual import (
    DualSphereGame,
    GovernmentStrategy,
    induce_firm_game,
    load_dual,
    posterior_from_statistic,
    verify_surplus_constancy,
)
from .election.beta import (
    BetaModel,
    SIGNAL_PAIRS,
    beta_unbiased_outcome,
    overreaction_chain_holds,
    predicted_unbiased_winner,
    verify_beta_midpoint,
)
from .election.normal import NormalModel, verify_mixed_motives_dominance
from .equilibrium import (
    DEFAULT_TOL,
    certify,
    check_identifiable,
    ex_ante_value,
    path_distribution,
    verify_expost,
    verify_interim_constancy,
    verify_single_outcome,
)
from .game import FiniteBayesGame, OutcomeMap, StrategyProfile, identity_outcome_map
from .solver import enumerate_pure_bne, solve_minimax_lp
from .statistics import statistics_report


def load_data(name: str) -> Any:
    return json.loads(resources.files("expost").joinpath("data", name).read_text())


def load_game(name: str) -> FiniteBayesGame:
    return FiniteBayesGame.from_dict(load_data(name))


def load_profile(name: str, game: FiniteBayesGame) -> StrategyProfile:
    return StrategyProfile.from_dict(load_data(name), game)


@dataclass(frozen=True)
class Expectation:
    check: str
    expected: Any
    tol: float = 0.0


@dataclass(frozen=True)
class CheckResult:
    check: str
    expected: Any
    observed: Any
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        def plain(v):
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, (np.bool_, bool)):
                return bool(v)
            if isinstance(v, (np.integer, np.floating)):
                return v.item()
            return v

        return {"check": self.check, "expected": plain(self.expected),
                "observed": plain(self.observed), "tolerance": self.tol, "passed": self.passed}


def _compare(expected: Any, observed: Any, tol: float) -> bool:
    if isinstance(expected, (bool, np.bool_)) or isinstance(observed, (bool, np.bool_)):
        return bool(expected) == bool(observed)
    if isinstance(expected, (int, float, Fraction)) and isinstance(observed, (int, float, Fraction, np.number)):
        return abs(observed - expected) <= tol
    return expected == observed


@dataclass(frozen=True)
class FixtureRecord:
    name: str
    description: str
    builder: Callable[[float], dict[str, Any]]
    expectations: list[Expectation]


@dataclass
class RunReport:
    fixture: str
    checks: list[CheckResult] = field(default_factory=list)
    wall_clock_seconds: float = 0.0
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "fixture": self.fixture,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "wall_clock_seconds": self.wall_clock_seconds,
            "seed": self.seed,
        }


def run_fixture(record: FixtureRecord, tol: float = DEFAULT_TOL) -> RunReport:
    start = time.perf_counter()
    observed = record.builder(tol)
    checks = []
    for exp in record.expectations:
        value = observed.get(exp.check)
        checks.append(CheckResult(exp.check, exp.expected, value, exp.tol,
                                  exp.check in observed and _compare(exp.expected, value, exp.tol)))
    return RunReport(record.name, checks, time.perf_counter() - start, observed.get("seed"))


# ---------------------------------------------------------------- finite examples


def _game_checks(game: FiniteBayesGame, profile: StrategyProfile, tol: float) -> dict[str, Any]:
    cert = certify(game, profile, tol)
    stats = statistics_report(game)
    out = {
        "completeness_A": stats.completeness_a,
        "completeness_B": stats.completeness_b,
        "rank_joint": stats.rank_joint,
        "sli_A": stats.sli_a,
        "sli_B": stats.sli_b,
        "convex_indep_A": stats.convex_indep_a,
        "convex_indep_B": stats.convex_indep_b,
        "bne": cert.is_bne,
        "value_A": cert.value_a,
        "identifiable_A": cert.identifiable_a,
        "identifiable_B": cert.identifiable_b,
        "lp_value": solve_minimax_lp(game).value,
    }
    if cert.is_bne:
        out["ex_post"] = cert.is_expost
        out["interim_constancy"] = verify_interim_constancy(game, profile, tol).holds
    return out


def example1(tol: float) -> dict[str, Any]:
    game = load_game("example1.json")
    profile = load_profile("example1_strategy.json", game)
    out = _game_checks(game, profile, tol)
    out["single_outcome"] = verify_single_outcome(game, identity_outcome_map(game), profile, tol).single_outcome
    bne = enumerate_pure_bne(game, tol)
    out["pure_bne_count"] = len(bne)
    out["non_expost_bne_found"] = any(not e.certificate.is_expost for e in bne)
    return out


def example2(tol: float) -> dict[str, Any]:
    game = load_game("example2.json")
    profile = load_profile("example2_strategy.json", game)
    return _game_checks(game, profile, tol)


def example3_voter_table() -> dict[str, Any]:
    return load_data("example3_voter_table.json")


def example3_game() -> FiniteBayesGame:
    """Candidates' win-probability game induced by the voter's election rule."""
    table = example3_voter_table()
    payoff = [[1.0 if w == "A" else 0.0 for w in row] for row in table["elected"]]
    n = len(payoff)
    return FiniteBayesGame(np.full((n, n), 1.0 / n**2), payoff, 1.0)


def example3_welfare(game: FiniteBayesGame, profile: StrategyProfile) -> float:
    """Probability that the elected platform is the correct policy."""
    table = example3_voter_table()
    policies = table["policies"]
    correct = np.array(table["correct_policy"])
    elected = table["elected"]
    total = 0.0
    for (sa, sb), p in np.ndenumerate(game.joint):
        for xa in range(game.n_actions["A"]):
            for xb in range(game.n_actions["B"]):
                q = profile.strat_a.dist[sa, xa] * profile.strat_b.dist[sb, xb]
                winner_policy = policies[xa] if elected[xa][xb] == "A" else policies[xb]
                total += p * q * (winner_policy == correct[sa, sb])
    return total


def single_signal_welfare(player: str) -> Fraction:
    """Best welfare the voter can reach from one candidate's signal alone, by enumeration."""
    table = example3_voter_table()
    correct = table["correct_policy"]
    n = len(correct)
    total = Fraction(0)
    for own in range(n):
        column = [correct[own][o] if player == "A" else correct[o][own] for o in range(n)]
        best = max(sum(1 for c in column if c == policy) for policy in table["policies"])
        total += Fraction(best, n * n)
    return total


def winner_outcome_map() -> OutcomeMap:
    elected = example3_voter_table()["elected"]
    return OutcomeMap(elected, {"A": 1.0, "B": 0.0}, {"A": 0.0, "B": 1.0})


def example3(tol: float) -> dict[str, Any]:
    game = example3_game()
    profile = load_profile("example3_strategy.json", game)
    out = _game_checks(game, profile, tol)
    out["welfare"] = example3_welfare(game, profile)
    out["v_star_A"] = single_signal_welfare("A")
    out["v_star_B"] = single_signal_welfare("B")
    out["welfare_exceeds_v_star"] = out["welfare"] > max(out["v_star_A"], out["v_star_B"])
    out["single_outcome"] = verify_single_outcome(game, winner_outcome_map(), profile, tol).single_outcome
    return out


def appendix_b_convex(tol: float) -> dict[str, Any]:
    game = load_game("appendixB_4x4.json")
    profile = load_profile("appendixB_4x4_strategy.json", game)
    out = _game_checks(game, profile, tol)
    listed = [(e.actions_a, e.actions_b) for e in enumerate_pure_bne(game, tol)]
    out["profile_enumerated"] = ((1, 0, 1, 0), (1, 0, 1, 0)) in listed
    return out


# ---------------------------------------------------------------- countable example


def exact_rank(rows: list[list[Fraction]]) -> int:
    """Rank by Gaussian elimination over the rationals."""
    m = [list(r) for r in rows]
    rank = 0
    n_cols = len(m[0]) if m else 0
    for col in range(n_cols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def countable_conditional(s_a: int, s_b: int) -> Fraction:
    """F(s_B | s_A): geometric after the uninformative signal 0, a point mass otherwise."""
    if s_a == 0:
        return Fraction(1, 2**s_b)
    return Fraction(int(s_b == s_a))


def countable_marginal_a(s_a: int) -> Fraction:
    return Fraction(1, 2) if s_a == 0 else Fraction(1, 3**s_a)


def sli_identity_residual(depth: int) -> Fraction:
    """Largest |F(s_B|0) - sum_{s_A<=K} 2^-s_A F(s_B|s_A)| over s_B <= K."""
    return max(
        abs(countable_conditional(0, sb)
            - sum(Fraction(1, 2**sa) * countable_conditional(sa, sb) for sa in range(1, depth + 1)))
        for sb in range(1, depth + 1)
    )


def completeness_test_residual(depth: int) -> Fraction:
    """Largest |sum_{s_A} F(s_A, s_B) g(s_A)| over s_B <= K for the unbounded g."""
    def g(s_a: int) -> Fraction:
        return Fraction(1) if s_a == 0 else -Fraction(1, 2) * Fraction(3, 2) ** s_a

    return max(
        abs(sum(countable_marginal_a(sa) * countable_conditional(sa, sb) * g(sa)
                for sa in range(0, depth + 1)))
        for sb in range(1, depth + 1)
    )


def truncated_rows_independent(depth: int) -> bool:
    """Conditional rows for s_A = 0..K over s_B = 1..K plus the tail {s_B > K}."""
    rows = []
    for sa in range(depth + 1):
        head = [countable_conditional(sa, sb) for sb in range(1, depth + 1)]
        rows.append(head + [1 - sum(head)])
    return exact_rank(rows) == depth + 1


COUNTABLE_DEPTHS = (8, 16, 32)


def appendix_b_li_not_sli(tol: float) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k in COUNTABLE_DEPTHS:
        out[f"sli_identity_residual_K{k}"] = sli_identity_residual(k)
        out[f"test_function_residual_K{k}"] = completeness_test_residual(k)
        out[f"truncated_rows_independent_K{k}"] = truncated_rows_independent(k)
    return out


# ---------------------------------------------------------------- dual spheres


def dual_counterexample_game(valuation_zero: bool) -> tuple[DualSphereGame, GovernmentStrategy]:
    data = load_data("dual_counterexample.json")
    if valuation_zero:
        data = {**data, "valuation": {k: 0.0 for k in data["valuation"]}}
    dsg, gov = load_dual(data)
    return dsg, gov


def dual_counterexample(tol: float) -> dict[str, Any]:
    out: dict[str, Any] = {}
    dsg, gov = dual_counterexample_game(valuation_zero=True)
    game = induce_firm_game(dsg, gov)
    profile = load_profile("dual_counterexample_strategy.json", game)
    cert = certify(game, profile, tol)
    out["zero_v_completeness"] = statistics_report(game).completeness_a
    out["zero_v_bne"] = cert.is_bne
    out["zero_v_identifiable"] = cert.identifiable_a and cert.identifiable_b
    out["zero_v_constancy"] = verify_surplus_constancy(dsg, gov, profile, tol).holds
    post = {str(m): posterior_from_statistic(dsg, profile, m) for m in (0, 1)}
    out["zero_v_degenerate_posterior"] = all(max(p.values()) == 1.0 for p in post.values())

    dsg, gov = dual_counterexample_game(valuation_zero=False)
    verdict = verify_surplus_constancy(dsg, gov, profile, tol)
    out["offset_constancy"] = verdict.holds
    out["offset_constant"] = verdict.constant
    out["offset_posterior_m0_theta1"] = posterior_from_statistic(dsg, profile, 0).get("1", 0.0)
    out["offset_posterior_m1_theta0"] = posterior_from_statistic(dsg, profile, 1).get("0", 0.0)

    dsg, gov = load_dual(load_data("dual_fullrank.json"))
    game = induce_firm_game(dsg, gov)
    out["fullrank_completeness"] = statistics_report(game).completeness_a
    entries = enumerate_pure_bne(game, tol, with_value=False).entries
    out["fullrank_bne_count_positive"] = len(entries) > 0
    out["fullrank_constancy_all"] = all(
        verify_surplus_constancy(dsg, gov, StrategyProfile.pure(game, e.actions_a, e.actions_b), tol).holds
        for e in entries
    )
    return out


# ---------------------------------------------------------------- election identities

BETA_GRID = tuple(Fraction(v) for v in ("1/2", "1", "2", "3", "7/2"))


def beta_bernoulli(tol: float) -> dict[str, Any]:
    midpoint = 0
    chain = True
    same_direction = True
    stronger = True
    winner_rule = True
    for a in BETA_GRID:
        for b in BETA_GRID:
            model = BetaModel(a, b)
            midpoint = max(midpoint, verify_beta_midpoint(model).max_residual)
            chain &= overreaction_chain_holds(model)
            if model.equal_params:
                continue
            for sa, sb in SIGNAL_PAIRS:
                if sa == sb:
                    continue
                res = beta_unbiased_outcome(model, sa, sb)
                same_direction &= res.same_direction
                stronger &= res.stronger
                winner_rule &= res.winner == predicted_unbiased_winner(model, sa, sb)
    return {
        "midpoint_max_residual": midpoint,
        "overreaction_chain": chain,
        "shift_same_direction": same_direction,
        "pair_shift_stronger": stronger,
        "winner_matches_branch": winner_rule,
    }


MIXED_BIASES = (-0.5, 0.0, 0.2, 1.0)
MIXED_SEED = 20240601


def mixed_motives(tol: float) -> dict[str, Any]:
    model = NormalModel(1.0, 1.0)
    out: dict[str, Any] = {"seed": MIXED_SEED}
    for b in MIXED_BIASES:
        out[f"dominance_b{b:+g}"] = verify_mixed_motives_dominance(model, b, 10_000, MIXED_SEED).holds
    return out


# ---------------------------------------------------------------- registry

_HALF = Fraction(1, 2)

FIXTURES: dict[str, FixtureRecord] = {
    r.name: r
    for r in [
        FixtureRecord(
            "example1-matching-pennies",
            "independent uniform types, matching payoff; identifiable equilibrium that is not ex post",
            example1,
            [
                Expectation("completeness_A", False),
                Expectation("completeness_B", False),
                Expectation("rank_joint", 1),
                Expectation("bne", True),
                Expectation("value_A", 0.5, 1e-9),
                Expectation("lp_value", 0.5, 1e-9),
                Expectation("identifiable_A", True),
                Expectation("identifiable_B", True),
                Expectation("ex_post", False),
                Expectation("interim_constancy", True),
                Expectation("single_outcome", False),
                Expectation("pure_bne_count", 4),
                Expectation("non_expost_bne_found", True),
            ],
        ),
        FixtureRecord(
            "example2-complete-info-mix",
            "singleton types, both players mix uniformly",
            example2,
            [
                Expectation("identifiable_A", False),
                Expectation("identifiable_B", False),
                Expectation("bne", True),
                Expectation("ex_post", False),
                Expectation("interim_constancy", True),
                Expectation("value_A", 0.5, 1e-9),
            ],
        ),
        FixtureRecord(
            "example3-downsian-4x4",
            "uniform 4x4 signals, voter table shipped as data; first-best welfare without completeness",
            example3,
            [
                Expectation("completeness_A", False),
                Expectation("completeness_B", False),
                Expectation("bne", True),
                Expectation("value_A", 0.5, 1e-9),
                Expectation("interim_constancy", True),
                Expectation("welfare", 1.0, 1e-12),
                Expectation("v_star_A", Fraction(9, 16)),
                Expectation("v_star_B", Fraction(11, 16)),
                Expectation("welfare_exceeds_v_star", True),
                Expectation("ex_post", False),
                Expectation("single_outcome", False),
            ],
        ),
        FixtureRecord(
            "appendixB-convex-independence",
            "convex independent but rank-deficient 4x4 joint with a non ex-post equilibrium",
            appendix_b_convex,
            [
                Expectation("rank_joint", 3),
                Expectation("completeness_A", False),
                Expectation("completeness_B", False),
                Expectation("sli_A", False),
                Expectation("sli_B", False),
                Expectation("convex_indep_A", True),
                Expectation("convex_indep_B", True),
                Expectation("bne", True),
                Expectation("identifiable_A", True),
                Expectation("identifiable_B", True),
                Expectation("value_A", -0.5, 1e-9),
                Expectation("lp_value", -0.5, 1e-9),
                Expectation("ex_post", False),
                Expectation("interim_constancy", True),
                Expectation("profile_enumerated", True),
            ],
        ),
        FixtureRecord(
            "appendixB-li-not-sli",
            "countable signals truncated at several depths; the SLI-violating identity holds exactly",
            appendix_b_li_not_sli,
            [
                e
                for k in COUNTABLE_DEPTHS
                for e in (
                    Expectation(f"sli_identity_residual_K{k}", Fraction(0)),
                    Expectation(f"test_function_residual_K{k}", Fraction(0)),
                    Expectation(f"truncated_rows_independent_K{k}", True),
                )
            ],
        ),
        FixtureRecord(
            "dual-counterexample",
            "firm game without completeness, with and without an offsetting government",
            dual_counterexample,
            [
                Expectation("zero_v_completeness", False),
                Expectation("zero_v_bne", True),
                Expectation("zero_v_identifiable", True),
                Expectation("zero_v_constancy", False),
                Expectation("zero_v_degenerate_posterior", True),
                Expectation("offset_constancy", True),
                Expectation("offset_constant", 1.0, 1e-9),
                Expectation("offset_posterior_m0_theta1", 1.0, 1e-12),
                Expectation("offset_posterior_m1_theta0", 1.0, 1e-12),
                Expectation("fullrank_completeness", True),
                Expectation("fullrank_bne_count_positive", True),
                Expectation("fullrank_constancy_all", True),
            ],
        ),
        FixtureRecord(
            "beta-bernoulli",
            "Beta prior with Bernoulli signals over a grid of rational parameters",
            beta_bernoulli,
            [
                Expectation("midpoint_max_residual", Fraction(0)),
                Expectation("overreaction_chain", True),
                Expectation("shift_same_direction", True),
                Expectation("pair_shift_stronger", True),
                Expectation("winner_matches_branch", True),
            ],
        ),
        FixtureRecord(
            "mixed-motives",
            "biased winner against a compensating loser; the voter always elects the winner",
            mixed_motives,
            [Expectation(f"dominance_b{b:+g}", True) for b in MIXED_BIASES],
        ),
    ]
}


def run_all(tol: float = DEFAULT_TOL) -> list[RunReport]:
    return [run_fixture(r, tol) for r in FIXTURES.values()]
