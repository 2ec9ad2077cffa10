"""Command-line surface.

Every analysis subcommand reads the pairs CSV, runs once per value on the
gamma grid, and emits one JSON report (stdout unless --out is given).
Validation problems exit with status 2; unexpected failures with 1.
"""

from __future__ import annotations

import dataclasses
import sys
from pathlib import Path

import click

from . import __version__
from .core import SensitivityParams, build_comparison_frame
from .dominance import test_dominance
from .errors import RuleRankError
from .io import load_pairs, make_report, match_pairs, report_text, write_matched
from .order import OrderSet, hasse_edges, to_dot, transitive_closure
from .selection import SelectionPlan, canonical_method, run_selection
from .sensitivity import amplify, asymptotic_params, moment_summary, sensitivity_value
from .simulate import load_scenario, run_scenario


def _fail(exc: RuleRankError) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


def _emit(doc: dict, out: str | None) -> None:
    text = report_text(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


def _gammas(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise click.BadParameter(f"cannot parse gamma list {text!r}")
    if not values:
        raise click.BadParameter("empty gamma list")
    return values


def _record_dict(rec) -> dict:
    doc = dataclasses.asdict(rec)
    doc["hypothesis"] = dataclasses.asdict(rec.hypothesis)
    return doc


def _result_dict(result) -> dict:
    doc = {
        "gamma": result.gamma,
        "order_set": sorted(result.order_set),
        "records": [_record_dict(r) for r in result.records],
    }
    if result.maximal_set is not None:
        doc["maximal_set"] = sorted(result.maximal_set)
    if result.positive_set is not None:
        doc["positive_set"] = sorted(result.positive_set)
    return doc


pairs_opt = click.option("--pairs", required=True, type=click.Path(exists=True, dir_okay=False))
alpha_opt = click.option("--alpha", default=0.05, show_default=True)
delta_opt = click.option("--delta", default=0.0, show_default=True)
gamma_opt = click.option("--gamma", default="1.0", show_default=True, help="comma-separated list")
method_opt = click.option(
    "--method",
    default="bonferroni",
    show_default=True,
    type=click.Choice(["bonferroni", "power", "value"]),
)
split_opt = click.option("--split", default=0.5, show_default=True, help="planning fraction")
seed_opt = click.option("--seed", default=0, show_default=True)
control_opt = click.option("--control", default=0, show_default=True, help="control rule index")
out_opt = click.option("--out", default=None, type=click.Path(dir_okay=False))
dot_opt = click.option("--dot", default=None, type=click.Path(dir_okay=False))


@click.group()
@click.version_option(version=__version__, prog_name="rulerank")
def main() -> None:
    """Rank and select treatment rules under bounded unmeasured confounding."""


@main.command()
@pairs_opt
@click.option("--rules", default="0,1", show_default=True, help="rule pair I,J to compare")
@gamma_opt
@alpha_opt
@delta_opt
@out_opt
def compare(pairs, rules, gamma, alpha, delta, out):
    """Dominance test for one ordered rule pair across the gamma grid."""
    try:
        i, j = (int(x) for x in rules.split(","))
    except ValueError:
        raise click.BadParameter(f"--rules needs two indices, got {rules!r}")
    try:
        sample = load_pairs(pairs)
        analyses = []
        for g in _gammas(gamma):
            params = SensitivityParams(gamma=g, alpha=alpha, delta=delta)
            res = test_dominance(sample, i, j, params)
            analyses.append(dataclasses.asdict(res))
        doc = make_report(
            "compare",
            {
                "pairs": str(pairs),
                "rules": [i, j],
                "gamma": _gammas(gamma),
                "alpha": alpha,
                "delta": delta,
                "version": __version__,
            },
            analyses,
        )
    except RuleRankError as exc:
        _fail(exc)
    _emit(doc, out)


@main.command()
@pairs_opt
@click.option("--rules", default=None, help="rule pair I,J; default: every rule vs control")
@alpha_opt
@control_opt
@out_opt
def sensvalue(pairs, rules, alpha, control, out):
    """Sensitivity value (tipping point) for rule comparisons."""
    try:
        sample = load_pairs(pairs)
        if rules:
            try:
                pair_list = [tuple(int(x) for x in rules.split(","))]
            except ValueError:
                raise click.BadParameter(f"--rules needs two indices, got {rules!r}")
        else:
            pair_list = [(control, j) for j in range(sample.rule_count) if j != control]
        analyses = []
        for i, j in pair_list:
            frame = build_comparison_frame(sample, i, j)
            value = sensitivity_value(frame, alpha)
            moments = moment_summary(frame)
            entry = {
                "rules": [i, j],
                "m": frame.m,
                "kappa_star": value.kappa_star,
                "gamma_star": value.gamma_star,
                "moments": dataclasses.asdict(moments),
            }
            if moments.mean_abs > 0:
                entry["asymptotics"] = dataclasses.asdict(asymptotic_params(moments))
            analyses.append(entry)
        doc = make_report(
            "sensvalue",
            {"pairs": str(pairs), "alpha": alpha, "control": control, "version": __version__},
            analyses,
        )
    except RuleRankError as exc:
        _fail(exc)
    _emit(doc, out)


def _selection_command(goal, pairs, gamma, alpha, delta, method, split, seed, control, out, dot):
    try:
        sample = load_pairs(pairs)
        grid = _gammas(gamma)
        plan = SelectionPlan(
            goal=goal,
            method=canonical_method(method),
            split_fraction=split,
            seed=seed,
            control=control,
        )
        analyses = []
        dot_texts = []
        for g in grid:
            params = SensitivityParams(gamma=g, alpha=alpha, delta=delta)
            result = run_selection(sample, params, plan)
            entry = _result_dict(result)
            if goal in ("order", "maximal"):
                order = OrderSet(
                    result.order_set, sample.rule_count, gamma=g
                )
                closed = transitive_closure(order)
                diagram = hasse_edges(order)
                entry["closure"] = sorted(closed.relations)
                entry["hasse_edges"] = sorted(diagram.edges)
                dot_texts.append(to_dot(diagram))
            analyses.append(entry)
        doc = make_report(
            goal if goal != "order" else "rank",
            {
                "pairs": str(pairs),
                "gamma": grid,
                "alpha": alpha,
                "delta": delta,
                "method": canonical_method(method),
                "split": split,
                "seed": seed,
                "control": control,
                "version": __version__,
            },
            analyses,
        )
        if dot and dot_texts:
            Path(dot).write_text("".join(dot_texts), encoding="utf-8")
    except RuleRankError as exc:
        _fail(exc)
    _emit(doc, out)


@main.command()
@pairs_opt
@gamma_opt
@alpha_opt
@delta_opt
@method_opt
@split_opt
@seed_opt
@control_opt
@out_opt
@dot_opt
def rank(pairs, gamma, alpha, delta, method, split, seed, control, out, dot):
    """Estimate the dominance order of all rules (one analysis per gamma)."""
    _selection_command("order", pairs, gamma, alpha, delta, method, split, seed, control, out, dot)


@main.command("select-max")
@pairs_opt
@gamma_opt
@alpha_opt
@delta_opt
@method_opt
@split_opt
@seed_opt
@control_opt
@out_opt
@dot_opt
def select_max(pairs, gamma, alpha, delta, method, split, seed, control, out, dot):
    """Confidence set for the maximal (undominated) rules."""
    _selection_command("maximal", pairs, gamma, alpha, delta, method, split, seed, control, out, dot)


@main.command("select-pos")
@pairs_opt
@gamma_opt
@alpha_opt
@delta_opt
@method_opt
@split_opt
@seed_opt
@control_opt
@out_opt
def select_pos(pairs, gamma, alpha, delta, method, split, seed, control, out):
    """Rules affirmed to dominate the control rule by margin delta."""
    _selection_command("positive", pairs, gamma, alpha, delta, method, split, seed, control, out, None)


@main.command()
@click.option("--scenario", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--workers", default=1, show_default=True)
@out_opt
@click.option("--tsv", default=None, type=click.Path(dir_okay=False))
def simulate(scenario, workers, out, tsv):
    """Monte Carlo power/error study from a scenario JSON file."""
    try:
        sc = load_scenario(scenario)
        table = run_scenario(sc, workers=workers)
    except RuleRankError as exc:
        _fail(exc)
    if tsv:
        Path(tsv).write_text(table.to_tsv(), encoding="utf-8")
    if out:
        Path(out).write_text(table.to_json(), encoding="utf-8")
    if not out and not tsv:
        click.echo(table.to_tsv(), nl=False)


@main.command("amplify")
@click.option("--gamma", required=True, type=float)
@click.option("--lambda", "lam", required=True, type=float, help="treatment-odds bound")
def amplify_cmd(gamma, lam):
    """Amplify gamma into a (lambda, delta) two-parameter explanation."""
    try:
        delta = amplify(gamma, lam)
    except RuleRankError as exc:
        _fail(exc)
    click.echo(f"gamma={gamma:g} lambda={lam:g} delta={delta!r}")


@main.command("match")
@click.option("--units", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--keys", required=True, help="comma-separated exact-match columns")
@click.option("--treatment", default="treatment", show_default=True)
@click.option("--outcome", default="outcome", show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
def match(units, keys, treatment, outcome, out):
    """Greedy exact-key pairing of treated and control units."""
    try:
        result = match_pairs(units, [k for k in keys.split(",") if k], treatment, outcome)
        write_matched(result, out)
    except RuleRankError as exc:
        _fail(exc)
    click.echo(f"wrote {len(result.rows)} pairs to {out}; {len(result.unmatched_rows)} units unmatched")


if __name__ == "__main__":
    main()
