"""The ``recapture`` command line.

Exit codes: 0 valid / holds, 1 invalid / fails, 2 usage or definition
error, 3 proof-search budget exhausted (or a verdict left open by it).
"""

from __future__ import annotations

import functools
import json
import os
import re
import sys
from pathlib import Path

import click

from .cache import cached_snapshot
from .engines.intuitionistic import Budget
from .engines.kripke import kripke_countermodel
from .engines.matrix import counter_valuation
from .errors import BoundsTooLarge, BudgetExhausted, ConstraintError, LogicError
from .logicfile import load_definition
from .syntax import SCHEMES, Bounds, Signature, parse_sequent
from .systems import (
    BUILTIN_SYSTEMS,
    HOLDS,
    NOT_APPLICABLE,
    PREDICATES,
    TRANSLATIONS,
    ConsequenceSystem,
    IntuitionisticSystem,
    MatrixSystem,
    RecaptureConstraint,
    Verdict,
    check_conservative_extension,
    check_equivalence,
    check_recapture,
    compare_theorems,
    fragment,
)
from .taxonomy import REPORT_FORMAT, Tri, classify_stance, derive_formal_answers

ALIASES = {"Ł3": "L3", "Ł": "L3"}
PATH_ENV = "RECAPTURE_LOGIC_PATH"


class Logic:
    def __init__(self, system: ConsequenceSystem, schemes: dict):
        self.system = system
        self.schemes = schemes


def load_logic(ref: str) -> Logic:
    name = ALIASES.get(ref, ref)
    if name in BUILTIN_SYSTEMS:
        return Logic(BUILTIN_SYSTEMS[name], {})
    path = Path(ref) if ref.endswith(".logic") or Path(ref).is_file() else find_named(ref)
    if path is not None:
        d = load_definition(path)
        return Logic(d.system, d.schemes)
    known = ", ".join(BUILTIN_SYSTEMS)
    raise click.BadParameter(
        f"unknown logic {ref!r}; use one of {known}, a .logic file, or the name of one on ${PATH_ENV}",
        param_hint="logic",
    )


def search_path() -> list[Path]:
    extra = [Path(p) for p in os.environ.get(PATH_ENV, "").split(os.pathsep) if p]
    return extra + [Path.cwd(), Path.cwd() / "logics"]


_NAME_LINE = re.compile(r"^name\s*:\s*(\S+)\s*(?:#.*)?$", re.M)


def find_named(name: str) -> Path | None:
    """Find a definition file by its declared name (read without full parsing,
    so a broken file is still found and reported with its line number)."""
    for d in search_path():
        for f in sorted(d.glob("*.logic")) if d.is_dir() else ():
            m = _NAME_LINE.search(f.read_text(encoding="utf-8", errors="replace"))
            if m and m.group(1) == name:
                return f
    return None


def parse_constraint(constraint: str, logic: Logic) -> RecaptureConstraint:
    kind, _, arg = constraint.partition(":")
    if kind == "relativize":
        scheme = logic.schemes.get(arg) or SCHEMES.get(arg)
        if scheme is None:
            raise click.BadParameter(f"unknown scheme {arg!r}; built-ins are {', '.join(SCHEMES)}", param_hint="constraint")
        return RecaptureConstraint.relativization(scheme)
    if kind == "restrict":
        values = [v for v in arg.split(",") if v]
        if not values:
            raise click.BadParameter("restrict: needs values, e.g. restrict:t,f", param_hint="constraint")
        return RecaptureConstraint.restriction(values)
    if kind == "predicate":
        if arg not in PREDICATES:
            raise click.BadParameter(f"unknown predicate {arg!r}; use one of {', '.join(PREDICATES)}", param_hint="constraint")
        return RecaptureConstraint.wff_predicate(arg, PREDICATES[arg])
    raise click.BadParameter("expected relativize:<scheme>, restrict:<values> or predicate:<name>", param_hint="constraint")


class Config:
    def __init__(self, atoms, depth, ante, worlds, steps, fmt, method):
        self.bounds = Bounds(atoms, depth, ante)
        self.budget = Budget(steps, worlds)
        self.fmt = fmt
        self.method = method

    def emit(self, doc: dict, text: str) -> None:
        if self.fmt == "json":
            click.echo(json.dumps({"format": REPORT_FORMAT, **doc}, indent=2, sort_keys=True))
        else:
            click.echo(text)


def run_options(fn):
    opts = [
        click.option("--atoms", default=2, show_default=True, type=click.IntRange(0, 11), help="Atoms p, q, ... in play."),
        click.option("--depth", default=3, show_default=True, type=click.IntRange(0), help="Maximum formula depth."),
        click.option("--ante", default=2, show_default=True, type=click.IntRange(0), help="Maximum antecedent size."),
        click.option("--worlds", default=4, show_default=True, type=click.IntRange(1), help="Kripke worlds per model."),
        click.option("--steps", default=1_000_000, show_default=True, type=click.IntRange(1), help="Proof-search steps per query."),
        click.option("--format", "fmt", default="text", type=click.Choice(["text", "json"]), show_default=True),
        click.option("--method", default="auto", type=click.Choice(["auto", "explicit", "quotient"]), show_default=True,
                     help="Enumerate sequents (explicit) or semantic patterns (quotient)."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)

    @functools.wraps(fn)
    def wrapper(atoms, depth, ante, worlds, steps, fmt, method, **kw):
        return fn(Config(atoms, depth, ante, worlds, steps, fmt, method), **kw)

    return wrapper


def guarded(fn):
    """Map package errors onto the exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kw):
        try:
            code = fn(*args, **kw)
        except BudgetExhausted as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
        except (LogicError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        sys.exit(code or 0)

    return wrapper


def verdict_exit(v: Verdict) -> int:
    if v.outcome == HOLDS:
        return 0
    if v.outcome == NOT_APPLICABLE:
        return 3 if v.reason == "budget" else 2
    return 1


def describe_verdict(v: Verdict) -> str:
    if v.outcome == HOLDS:
        cov = "" if v.coverage is None else f", coverage {v.coverage:.1f}"
        return f"holds at bounds{cov}"
    if v.outcome == NOT_APPLICABLE:
        return f"not applicable ({v.reason}): {v.notes[0] if v.notes else ''}"
    if v.witness is None:
        return f"fails ({v.reason})"
    return f"fails; witness: {v.witness}"


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact", prog_name="recapture")
def cli() -> None:
    """Compare consequence systems and classify logical theory change."""


@cli.command()
@click.option("--logic", "logic_ref", required=True, help="K, J, LP, K3, L3 or a .logic file.")
@click.argument("sequent")
@run_options
@guarded
def prove(cfg: Config, logic_ref: str, sequent: str) -> int:
    """Decide one sequent such as "p, p -> q |- q"."""
    system = load_logic(logic_ref).system
    s = parse_sequent(sequent, system.signature)
    valid = system.validates(s, cfg.budget)
    search = f"proof search <= {cfg.budget.steps:,} steps; countermodels <= {cfg.budget.worlds} worlds"
    doc = {"command": "prove", "logic": system.name, "sequent": str(s), "valid": valid, "countermodel": None,
           "bounds": search}
    lines = [f"{s}: {'valid' if valid else 'invalid'} in {system.name}"]
    if not valid:
        if isinstance(system, MatrixSystem) and system.admits(s):
            val = counter_valuation(system.matrix, s)
            doc["countermodel"] = val
            lines.append("counter-valuation: " + ", ".join(f"{a}={v}" for a, v in val.items()))
        elif isinstance(system, IntuitionisticSystem):
            model = kripke_countermodel(s, cfg.budget.worlds)
            doc["countermodel"] = None if model is None else model.describe()
            lines.append(
                f"countermodel: {model.describe()}" if model is not None
                else f"no countermodel within {cfg.budget.worlds} worlds (proof search is decisive)"
            )
    lines.append(f"bounds: {search}")
    cfg.emit(doc, "\n".join(lines))
    return 0 if valid else 1


def _maps(forward: str, back: str):
    return TRANSLATIONS[forward], TRANSLATIONS[back]


map_options = [
    click.option("--map", "forward", default="identity", type=click.Choice(sorted(TRANSLATIONS)), show_default=True,
                 help="Translation from the first system into the second."),
    click.option("--back", default="identity", type=click.Choice(sorted(TRANSLATIONS)), show_default=True,
                 help="Translation from the second system into the first."),
]


def with_maps(fn):
    for opt in reversed(map_options):
        fn = opt(fn)
    return fn


@cli.command()
@click.option("--new", "new_ref", required=True)
@click.option("--old", "old_ref", required=True)
@with_maps
@run_options
@guarded
def compare(cfg: Config, new_ref: str, old_ref: str, forward: str, back: str) -> int:
    """Equivalence, conservative extension and divergence of two systems."""
    new, old = load_logic(new_ref).system, load_logic(old_ref).system
    f, g = _maps(forward, back)
    eq = check_equivalence(new, old, f, g, cfg.bounds, cfg.budget, cfg.method)
    ce = check_conservative_extension(new, old, cfg.bounds, cfg.budget, cfg.method)
    thm = compare_theorems(new, old, cfg.bounds, cfg.budget, cfg.method)
    if eq.outcome == HOLDS:
        names = f"{f.name} maps" if f.name == g.name else f"{f.name}/{g.name} maps"
        eq_line = f"equivalent at bounds ({names}), coverage {eq.coverage:.1f}"
    elif eq.outcome == NOT_APPLICABLE:
        eq_line = f"undecided at bounds ({eq.reason})"
    else:
        eq_line = "not equivalent at bounds" + (f"; witness: {eq.witness}" if eq.witness else f" ({eq.reason})")
    lines = [
        f"compare {new.name} (new) with {old.name} (old)",
        f"equivalence: {eq_line}",
        f"conservative extension: {describe_verdict(ce)}",
        "theorems: " + ("equal at bounds" if thm.theorems_equal else f"differ at bounds; witness: |- {thm.theorem_witness}"),
        "consequence: " + ("agrees at bounds" if thm.consequence_equal else f"diverges at bounds; witness: {thm.consequence_witness}"),
        f"bounds: {cfg.bounds}",
    ]
    doc = {
        "command": "compare", "new": new.name, "old": old.name,
        "equivalence": eq.to_dict(), "conservative_extension": ce.to_dict(), "theorems": thm.to_dict(),
        "bounds": str(cfg.bounds),
    }
    cfg.emit(doc, "\n".join(lines))
    return verdict_exit(eq)


@cli.command()
@click.option("--host", "host_ref", required=True)
@click.option("--target", "target_ref", required=True)
@click.option("--constraint", "constraint", required=True, help="relativize:<scheme>, restrict:<values> or predicate:<name>.")
@with_maps
@run_options
@guarded
def recapture(cfg: Config, host_ref: str, target_ref: str, constraint: str, forward: str, back: str) -> int:
    """Does a constrained subsystem of HOST match TARGET?"""
    host_logic = load_logic(host_ref)
    host, target = host_logic.system, load_logic(target_ref).system
    c = parse_constraint(constraint, host_logic)
    v = check_recapture(host, target, c, _maps(forward, back), cfg.bounds, cfg.budget, cfg.method)
    lines = [
        f"recapture of {target.name} by {host.name} under {c.name}: {describe_verdict(v)}",
        f"bounds: {cfg.bounds}",
    ]
    cfg.emit({"command": "recapture", "host": host.name, "target": target.name, "constraint": c.name,
              "verdict": v.to_dict(), "bounds": str(cfg.bounds)}, "\n".join(lines))
    return verdict_exit(v)


@cli.command()
@click.option("--new", "new_ref", required=True)
@click.option("--old", "old_ref", required=True)
@click.option("--constraint", "constraint", default=None, help="Recapture constraint to try on the new system.")
@click.option("--meaningful", type=click.Choice(["yes", "no"]), default=None,
              help="Can the old system be read meaningfully in the new theory? Interpretive; never derived.")
@with_maps
@run_options
@guarded
def classify(cfg: Config, new_ref: str, old_ref: str, constraint: str | None, meaningful: str | None,
             forward: str, back: str) -> int:
    """Place a change of logic on the left/right stance chart."""
    new_logic = load_logic(new_ref)
    new, old = new_logic.system, load_logic(old_ref).system
    c = None if constraint is None else parse_constraint(constraint, new_logic)
    flag = None if meaningful is None else meaningful == "yes"
    answers = derive_formal_answers(new, old, _maps(forward, back), c, cfg.bounds, cfg.budget, cfg.method, flag)
    report = classify_stance(answers)
    if report.blocking == "meaningful":
        click.echo(
            "error: recapture holds, so the stance turns on whether the old system can be given a meaningful "
            "interpretation in the new theory. That question is interpretive and is not machine-decidable; "
            "pass --meaningful yes or --meaningful no.",
            err=True,
        )
        return 2
    doc = {"command": "classify", "new": new.name, "old": old.name,
           "constraint": None if c is None else c.name,
           "answers": {"equivalent": str(answers.equivalent),
                       "conservative_extension": str(answers.conservative_extension),
                       "recaptures": str(answers.recaptures), "meaningful": meaningful},
           "report": report.to_dict()}
    cfg.emit(doc, f"classify {new.name} (new) against {old.name} (old)\n" + report.render())
    return 3 if report.stance == "indeterminate" else 0


@cli.command()
@click.option("--logic", "logic_ref", required=True)
@click.option("--sig", default=None, help="Restrict to these connectives, e.g. not,and.")
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Defaults to $RECAPTURE_CACHE_DIR or ~/.cache/recapture.")
@run_options
@guarded
def snapshot(cfg: Config, logic_ref: str, sig: str | None, cache_dir: Path | None) -> int:
    """Decide and cache every bounded sequent of a system."""
    system = load_logic(logic_ref).system
    if sig is not None:
        sub = Signature.parse(sig)
        if sub != system.signature:
            system = fragment(system, sub)
    try:
        snap, path, written = cached_snapshot(system, cfg.bounds, cache_dir, cfg.budget)
    except BoundsTooLarge as exc:
        raise ValueError(str(exc)) from None
    doc = {"command": "snapshot", "logic": system.name, "signature": str(system.signature),
           "bounds": str(cfg.bounds), "wffs": len(snap.wffs), "sequents": snap.sequent_count,
           "valid": snap.valid_count, "path": str(path), "written": written}
    cfg.emit(doc, f"{snap.summary()}\n{'wrote' if written else 'read'} {path}\nbounds: {cfg.bounds}")
    return 0


def main() -> None:
    cli(prog_name="recapture")


if __name__ == "__main__":
    main()
