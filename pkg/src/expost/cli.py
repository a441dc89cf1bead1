"""Command-line front end.

Exit codes: 0 when every expectation holds, 1 when a checked expectation
fails, 2 on bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from scipy.special import ndtri

from . import __version__
from .dual import induce_firm_game, load_dual, posterior_from_statistic, verify_surplus_constancy
from .election import beta as beta_mod
from .election.normal import (
    MonteCarloConfig,
    NormalModel,
    VoterRule,
    closed_form_welfares,
    make_strategy,
    mc_decomposition,
    mc_welfare,
    mimic_win_probability,
    verify_antipander_indifference,
)
from .election.streams import uniforms
from .equilibrium import certify, verify_interim_constancy, verify_single_outcome
from .errors import EqualParams, ExpostError
from .fixtures import FIXTURES, run_fixture
from .game import FiniteBayesGame, StrategyProfile, identity_outcome_map
from .solver import DEFAULT_CELL_CAP, enumerate_pure_bne, solve_minimax_lp
from .statistics import statistics_report

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2

PROFILES = ("antipander", "fullpander", "unbiased", "benevolent", "delegation", "mixed")
RULES = ("coin", "more-extreme", "best-response", "always-elect-A", "always-elect-B")


class InputError(Exception):
    pass


# ---------------------------------------------------------------- output


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def _flatten(obj: Any, prefix: str = "") -> list[tuple[str, Any]]:
    if isinstance(obj, dict):
        return [kv for k, v in obj.items() for kv in _flatten(v, f"{prefix}{k}.")]
    if isinstance(obj, list):
        return [kv for i, v in enumerate(obj) for kv in _flatten(v, f"{prefix}{i}.")]
    return [(prefix[:-1], obj)]


def _csv_text(rows: list[dict[str, Any]], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _plain(row.get(c)) for c in columns})
    return buf.getvalue()


def emit(args: argparse.Namespace, payload: Any, rows: list[dict] | None = None,
         columns: Sequence[str] | None = None) -> None:
    """Write JSON, or CSV when requested; tabular commands pass ``rows``."""
    if args.format == "csv":
        if rows is None:
            pairs = _flatten(_plain(payload))
            rows, columns = [{"key": k, "value": v} for k, v in pairs], ("key", "value")
        text = _csv_text(rows, columns)
    else:
        text = json.dumps(_plain(payload), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- input


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _load_game(path: str) -> FiniteBayesGame:
    return FiniteBayesGame.from_dict(_read_json(path))


def _grid(spec: str) -> np.ndarray:
    try:
        start, stop, step = (float(v) for v in spec.split(":"))
    except ValueError:
        raise InputError(f"grid must be start:stop:step, got {spec!r}") from None
    if step <= 0 or stop < start:
        raise InputError("grid needs step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def _floats(spec: str) -> list[float]:
    try:
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated numbers, got {spec!r}") from None


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a number: {text!r}") from None


# ---------------------------------------------------------------- finite games


def cmd_check(args) -> int:
    game = _load_game(args.game)
    report = statistics_report(game, args.rank_tol)
    emit(args, {"game": args.game, **report.to_dict()})
    return EXIT_OK


def cmd_solve(args) -> int:
    game = _load_game(args.game)
    sol = solve_minimax_lp(game, args.cap)
    emit(args, {"game": args.game, **sol.to_dict(), "tolerance": args.tol})
    return EXIT_OK


def cmd_enumerate(args) -> int:
    game = _load_game(args.game)
    result = enumerate_pure_bne(game, args.tol, args.cap)
    emit(args, {"game": args.game, **result.to_dict()})
    return EXIT_OK


def cmd_verify(args) -> int:
    game = _load_game(args.game)
    profile = StrategyProfile.from_dict(_read_json(args.strategy), game)
    cert = certify(game, profile, args.tol, args.rank_tol)
    report: dict[str, Any] = {"game": args.game, "strategy": args.strategy, **cert.to_dict()}
    if cert.is_bne:
        report["interim_constancy"] = verify_interim_constancy(game, profile, args.tol).to_dict()
        report["single_outcome"] = verify_single_outcome(
            game, identity_outcome_map(game), profile, args.tol).to_dict()
    emit(args, report)
    return EXIT_OK if cert.is_bne else EXIT_FAILED


# ---------------------------------------------------------------- elections


def _model(args) -> NormalModel:
    return NormalModel(args.alpha, args.beta, args.beta_b if args.beta_b is not None else args.beta)


def _profile(model: NormalModel, name: str, bias: float):
    """Strategy pair and default voter rule of a named profile."""
    if name == "delegation":
        return make_strategy(model, "unbiased", "A"), make_strategy(model, "delegation-loser"), "always-elect-A"
    if name == "mixed":
        return (make_strategy(model, "mixed-winner", b=bias),
                make_strategy(model, "mixed-loser", b=bias), "always-elect-A")
    if name in ("antipander", "unbiased"):
        return make_strategy(model, name, "A"), make_strategy(model, name, "B"), "coin"
    if name in ("fullpander", "benevolent"):
        s = make_strategy(model, name)
        return s, s, "more-extreme" if name == "benevolent" else "coin"
    raise InputError(f"unknown profile {name!r}; choose from {', '.join(PROFILES)}")


def _rule(name: str, strat_a, strat_b, tie_break: str) -> VoterRule:
    if name == "best-response":
        return VoterRule.best_response(strat_a, strat_b, tie_break)
    if name in ("always-elect-A", "always-elect-B"):
        return VoterRule("always-elect", elect=name[-1], tie_break=tie_break)
    if name in ("coin", "more-extreme"):
        return VoterRule(name, tie_break=tie_break)
    raise InputError(f"unknown rule {name!r}; choose from {', '.join(RULES)}")


def _closed_form(model: NormalModel, profile: str) -> float | None:
    if not model.is_symmetric:
        return None
    cf = closed_form_welfares(model)
    return {"fullpander": cf.full_pander, "antipander": cf.anti_pander,
            "delegation": cf.delegation}.get(profile)


def _welfare_row(model, profile, rule_name, args) -> dict[str, Any]:
    sa, sb, default_rule = _profile(model, profile, args.bias)
    rule_name = rule_name or default_rule
    rule = _rule(rule_name, sa, sb, args.tie_break)
    est = mc_welfare(model, sa, sb, rule, MonteCarloConfig(args.seed, args.n, args.workers))
    target = _closed_form(model, profile)
    z = (est.mean - target) / est.std_error if target is not None and est.std_error > 0 else None
    return {
        "alpha": model.alpha, "beta": model.beta_a, "beta_b": model.beta_b,
        "profile": profile, "rule": rule_name, "seed": args.seed, "n": args.n,
        "mean": est.mean, "stderr": est.std_error, "closed_form": target, "z_score": z,
    }


def cmd_election_welfare(args) -> int:
    model = _model(args)
    row = _welfare_row(model, args.profile, args.rule, args)
    if model.is_symmetric:
        row["closed_form_welfares"] = closed_form_welfares(model).to_dict()
        row["margin_over_delegation"] = row["mean"] - row["closed_form_welfares"]["delegation"]
        row["margin_over_delegation_z"] = row["margin_over_delegation"] / row["stderr"]
    emit(args, row, [row], list(row)[:11])
    within = row["z_score"] is None or abs(row["z_score"]) <= 3.0
    return EXIT_OK if within or not args.check else EXIT_FAILED


SWEEP_COLUMNS = ("alpha", "beta", "profile", "rule", "seed", "n", "mean", "stderr", "closed_form", "z_score")


def cmd_election_sweep(args) -> int:
    rows = []
    for a in _floats(args.alphas):
        for b in _floats(args.betas):
            model = NormalModel(a, b)
            for profile in args.profiles.split(","):
                for rule in (args.rules.split(",") if args.rules else [None]):
                    rows.append(_welfare_row(model, profile, rule, args))
    emit(args, {"rows": [{c: r[c] for c in SWEEP_COLUMNS} for r in rows]}, rows, SWEEP_COLUMNS)
    return EXIT_OK


def cmd_election_deviation(args) -> int:
    model = _model(args)
    grid = _grid(args.grid)
    probs = mimic_win_probability(model, args.s_true, grid)
    rows = [{"s_mimic": float(s), "win_prob": float(p)} for s, p in zip(grid, probs)]
    columns = ["s_mimic", "win_prob"]
    if args.mc_n:
        # opponent signal given s_true, drawn from the counter-based stream
        mu = model.beta_a / (model.alpha + model.beta_a) * args.s_true
        sd = math.sqrt(1.0 / (model.alpha + model.beta_a) + 1.0 / model.beta_b)
        opp = mu + sd * ndtri(uniforms(args.seed, 0, args.mc_n)[:, 0])
        for row in rows:
            wins = np.abs(opp) < abs(row["s_mimic"])
            p = float(wins.mean())
            row["mc_win_prob"] = p
            row["mc_stderr"] = math.sqrt(max(p * (1 - p), 0.0) / args.mc_n)
        columns += ["mc_win_prob", "mc_stderr"]
    increasing = all(r2["win_prob"] > r1["win_prob"] for r1, r2 in zip(rows, rows[1:])
                     if abs(r2["s_mimic"]) > abs(r1["s_mimic"]))
    payload = {"alpha": model.alpha, "beta": model.beta_a, "s_true": args.s_true,
               "seed": args.seed, "strictly_increasing": increasing, "rows": rows}
    emit(args, payload, rows, columns)
    return EXIT_OK if increasing else EXIT_FAILED


def cmd_election_decompose(args) -> int:
    model = _model(args)
    sa, sb, default_rule = _profile(model, args.profile, args.bias)
    rule_name = args.rule or default_rule
    rule = _rule(rule_name, sa, sb, args.tie_break)
    dec = mc_decomposition(model, sa, sb, rule, MonteCarloConfig(args.seed, args.n, args.workers))
    report = {"alpha": model.alpha, "beta": model.beta, "profile": args.profile, "rule": rule_name,
              "seed": args.seed, **dec.to_dict(),
              "reassembly_within_3se": dec.reassembly_gap <= 3 * dec.gap_std_error}
    emit(args, report)
    return EXIT_OK if report["reassembly_within_3se"] else EXIT_FAILED


def cmd_election_indifference(args) -> int:
    model = _model(args)
    offsets = tuple(_floats(args.offsets))
    verdict = verify_antipander_indifference(model, args.n_checks, args.seed, offsets)
    emit(args, {"alpha": model.alpha, "beta_a": model.beta_a, "beta_b": model.beta_b,
                "seed": args.seed, **verdict.to_dict()})
    return EXIT_OK if verdict.holds else EXIT_FAILED


# ---------------------------------------------------------------- beta, dual, fixtures


def cmd_beta_verify(args) -> int:
    model = beta_mod.BetaModel(_rational(args.alpha), _rational(args.beta))
    y0, y1 = beta_mod.beta_overreaction_strategy(model)
    midpoint = beta_mod.verify_beta_midpoint(model)
    lin = beta_mod.LinearPosteriorModel.from_beta(model)
    lin_residual = max(abs(beta_mod.linear_posterior_antipander(lin, s) - y)
                       for s, y in ((0, y0), (1, y1)))
    report: dict[str, Any] = {
        "alpha": model.alpha, "beta": model.beta,
        "posterior_single": {str(s): beta_mod.beta_posterior_single(model, s) for s in (0, 1)},
        "posterior_pair": {f"{a}{b}": beta_mod.beta_posterior_pair(model, a, b)
                           for a, b in beta_mod.SIGNAL_PAIRS},
        "overreaction_strategy": {"0": y0, "1": y1},
        "overreaction_chain": beta_mod.overreaction_chain_holds(model),
        "midpoint": midpoint.to_dict(),
        "linear_posterior_residual": lin_residual,
    }
    ok = midpoint.holds and report["overreaction_chain"] and lin_residual == 0
    try:
        outcomes = {}
        for a, b in beta_mod.SIGNAL_PAIRS:
            res = beta_mod.beta_unbiased_outcome(model, a, b)
            outcomes[f"{a}{b}"] = {**res.to_dict(),
                                   "predicted_winner": beta_mod.predicted_unbiased_winner(model, a, b)}
            if a != b:
                ok &= res.same_direction and res.stronger and res.winner == outcomes[f"{a}{b}"]["predicted_winner"]
        report["unbiased_outcomes"] = outcomes
    except EqualParams as exc:
        report["unbiased_outcomes"] = {"skipped": str(exc)}
    report["all_identities_hold"] = ok
    emit(args, report)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_dual_verify(args) -> int:
    dsg, gov = load_dual(_read_json(args.game))
    if gov is None:
        raise InputError("dual-sphere file needs a gov_strategy")
    game = induce_firm_game(dsg, gov)
    if args.strategy:
        profiles = [StrategyProfile.from_dict(_read_json(args.strategy), game)]
    else:
        entries = enumerate_pure_bne(game, args.tol, args.cap, with_value=False).entries
        profiles = [StrategyProfile.pure(game, e.actions_a, e.actions_b) for e in entries]
    stats = statistics_report(game, args.rank_tol)
    results = []
    for profile in profiles:
        cert = certify(game, profile, args.tol, args.rank_tol)
        item: dict[str, Any] = {"profile": profile.to_dict(), "is_bne": cert.is_bne,
                                "identifiable_A": cert.identifiable_a,
                                "identifiable_B": cert.identifiable_b}
        if cert.is_bne:
            item["constancy"] = verify_surplus_constancy(dsg, gov, profile, args.tol).to_dict()
            if dsg.state_of is not None:
                posts = {}
                for label in dsg.statistic_labels:
                    try:
                        posts[label] = posterior_from_statistic(dsg, profile, label)
                    except ExpostError:
                        posts[label] = None
                item["posterior_by_statistic"] = posts
        results.append(item)
    emit(args, {"game": args.game, "completeness_A": stats.completeness_a,
                "completeness_B": stats.completeness_b, "payoff_A": game.payoff_a.tolist(),
                "profiles": results})
    return EXIT_OK if all(r["is_bne"] for r in results) else EXIT_FAILED


def cmd_fixtures(args) -> int:
    if args.list:
        emit(args, {name: r.description for name, r in FIXTURES.items()})
        return EXIT_OK
    if args.all or not args.name:
        names = list(FIXTURES)
    elif args.name in FIXTURES:
        names = [args.name]
    else:
        raise InputError(f"unknown fixture {args.name!r}; use --list")
    reports = [run_fixture(FIXTURES[n], args.tol) for n in names]
    emit(args, {"passed": all(r.passed for r in reports), "fixtures": [r.to_dict() for r in reports]})
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


# ---------------------------------------------------------------- parser


def _common(defaults: bool) -> argparse.ArgumentParser:
    """Global flags, accepted before or after the subcommand."""
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--tol", type=float, default=d(1e-9), help="equilibrium tolerance")
    p.add_argument("--rank-tol", type=float, default=d(1e-9), help="relative singular-value cutoff")
    p.add_argument("--seed", type=int, default=d(7), help="Monte Carlo seed")
    p.add_argument("--out", default=d(None), help="write output to this path")
    p.add_argument("--format", choices=("json", "csv"), default=d("json"))
    return p


def _mc_flags(p: argparse.ArgumentParser, with_n: bool = True) -> None:
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--beta-b", type=float, default=None, help="B's precision if different")
    if with_n:
        p.add_argument("--n", type=int, default=1_000_000)
        p.add_argument("--workers", type=int, default=1, help="thread hint; never changes results")
        p.add_argument("--bias", type=float, default=0.2, help="bias b for the mixed profile")
        p.add_argument("--tie-break", choices=("coin", "A", "B"), default="coin")


def build_parser() -> argparse.ArgumentParser:
    common = _common(defaults=False)
    parser = argparse.ArgumentParser(prog="expost", parents=[_common(defaults=True)],
                                     description="Constant-sum Bayesian games and Downsian election welfare.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="completeness, SLI and convex independence")
    p.add_argument("game")
    p.set_defaults(func=cmd_check)

    for name, func, help_ in (("solve", cmd_solve, "minimax value and optimal strategies"),
                              ("enumerate", cmd_enumerate, "all pure Bayes-Nash equilibria")):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("game")
        p.add_argument("--cap", type=int, default=DEFAULT_CELL_CAP, help="normal-form cell cap")
        p.set_defaults(func=func)

    p = sub.add_parser("verify", parents=[common], help="certificate for a strategy profile")
    p.add_argument("game")
    p.add_argument("strategy")
    p.set_defaults(func=cmd_verify)

    election = sub.add_parser("election", help="normal-quadratic election tools")
    esub = election.add_subparsers(dest="election_command", required=True)

    p = esub.add_parser("welfare", parents=[common], help="Monte Carlo voter welfare")
    _mc_flags(p)
    p.add_argument("--profile", choices=PROFILES, default="antipander")
    p.add_argument("--rule", choices=RULES, default=None)
    p.add_argument("--check", action="store_true", help="exit 1 if |z| > 3 against the closed form")
    p.set_defaults(func=cmd_election_welfare)

    p = esub.add_parser("sweep", parents=[common], help="welfare over a parameter grid")
    _mc_flags(p)
    p.add_argument("--alphas", default="1")
    p.add_argument("--betas", default="1")
    p.add_argument("--profiles", default="fullpander,antipander,delegation")
    p.add_argument("--rules", default=None, help="comma-separated; default per profile")
    p.set_defaults(func=cmd_election_sweep)

    p = esub.add_parser("deviation", parents=[common], help="win probability of mimicking another signal")
    _mc_flags(p, with_n=False)
    p.add_argument("--s-true", type=float, default=0.0)
    p.add_argument("--grid", default="0:3:0.5", help="start:stop:step of mimicked signals")
    p.add_argument("--mc-n", type=int, default=0, help="also estimate by simulation with this many draws")
    p.set_defaults(func=cmd_election_deviation)

    p = esub.add_parser("decompose", parents=[common], help="welfare decomposition")
    _mc_flags(p)
    p.add_argument("--profile", choices=PROFILES, default="benevolent")
    p.add_argument("--rule", choices=RULES, default=None)
    p.set_defaults(func=cmd_election_decompose)

    p = esub.add_parser("indifference", parents=[common], help="anti-pandering indifference identity")
    _mc_flags(p, with_n=False)
    p.add_argument("--n-checks", type=int, default=10_000)
    p.add_argument("--offsets", default="0,0.7,-1.3")
    p.set_defaults(func=cmd_election_indifference)

    beta = sub.add_parser("beta", help="Beta-Bernoulli identities")
    bsub = beta.add_subparsers(dest="beta_command", required=True)
    p = bsub.add_parser("verify", parents=[common])
    p.add_argument("--alpha", default="2", help="rational, e.g. 2 or 3/2")
    p.add_argument("--beta", default="1")
    p.set_defaults(func=cmd_beta_verify)

    dual = sub.add_parser("dual", help="dual-sphere firm competition")
    dsub = dual.add_subparsers(dest="dual_command", required=True)
    p = dsub.add_parser("verify", parents=[common])
    p.add_argument("game")
    p.add_argument("strategy", nargs="?", help="firm profile; default enumerates pure equilibria")
    p.add_argument("--cap", type=int, default=DEFAULT_CELL_CAP)
    p.set_defaults(func=cmd_dual_verify)

    p = sub.add_parser("fixtures", parents=[common], help="run bundled worked examples")
    p.add_argument("name", nargs="?")
    p.add_argument("--all", action="store_true")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ExpostError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
