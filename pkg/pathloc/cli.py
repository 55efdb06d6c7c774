from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING

from pathloc.config import Command, RunConfig
from pathloc.errors import GraphError, PathlocError, ShapeViolation
from pathloc.evaluator import (
    AlgebraKind,
    Context,
    evaluate,
    inverse,
    render,
    resolve_kind,
)
from pathloc.graphfile import load_graph
from pathloc.monoid import Equal, NotEqual, mon_equal, monoid_of_graph, parse_element
from pathloc.parser import parse
from pathloc.pathalg import AlgMatrix, PathAlgebra
from pathloc.qalg import (
    QElement,
    SigmaPrimeDecomposition,
    check_sigma_prime_factorization,
    q_normalize,
    sigma_prime_decompose,
)
from pathloc.quiver import assert_tree
from pathloc.report import (
    ComponentEntry,
    DecomposeReport,
    ErrorReport,
    EvalReport,
    MonoidReport,
    Report,
    ShapeEntry,
    ValidateReport,
    VerifyReport,
    dump_q,
)
from pathloc.suites import SUITES, run_suites
from pathloc.utils import join_commas, plural

if TYPE_CHECKING:
    from collections.abc import Sequence

    from pathloc.ast import Expression
    from pathloc.evaluator import Value
    from pathloc.graphfile import GraphSpec

log = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("graph", type=Path, help="graph file")
    common.add_argument("--degree", type=int, default=8, help="truncation degree N")
    common.add_argument("--bound", type=int, default=12, help="monoid search depth")
    common.add_argument("--max-visited", type=int, default=100_000)
    common.add_argument("--json", action="store_true", help="print a JSON report")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--trials", type=float, default=1.0, help="scale suite sample counts")
    common.add_argument(
        "--algebra", choices=[k.value for k in AlgebraKind], default=AlgebraKind.PATH.value
    )

    parser = argparse.ArgumentParser(
        prog="pathloc", description="Leavitt path algebras and their regular algebras"
    )
    parser.add_argument("--log-level", default="WARNING")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser(Command.VALIDATE, parents=[common], help="check the component tree")

    for name, help_ in ((Command.EVAL, "evaluate an element"), (Command.INVERT, "invert it")):
        sub = commands.add_parser(name, parents=[common], help=help_)
        sub.add_argument("expression")

    sub = commands.add_parser(Command.MONOID_EQ, parents=[common], help="compare in M(E)")
    sub.add_argument("left")
    sub.add_argument("right")

    sub = commands.add_parser(Command.DECOMPOSE, parents=[common], help="Σ′ decomposition")
    sub.add_argument("matrix", help="matrix literal such as [[e1, 0], [0, e2]]")

    sub = commands.add_parser(Command.VERIFY, parents=[common], help="run property suites")
    sub.add_argument("--suite", choices=["all", *SUITES], default="all")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    command = Command(args.command)
    arguments = {
        Command.EVAL: ("expression",),
        Command.INVERT: ("expression",),
        Command.MONOID_EQ: ("left", "right"),
        Command.DECOMPOSE: ("matrix",),
    }.get(command, ())

    return RunConfig(
        graph=args.graph,
        command=command,
        arguments=tuple(getattr(args, a) for a in arguments),
        degree=args.degree,
        bound=args.bound,
        max_visited=args.max_visited,
        json_output=args.json,
        seed=args.seed,
        trials=args.trials,
        suite=getattr(args, "suite", "all"),
        algebra=AlgebraKind(args.algebra),
    )


def cmd_validate(config: RunConfig, spec: GraphSpec) -> tuple[ValidateReport, str]:
    poset = spec.poset()
    components = [
        ComponentEntry(id=c, vertices=list(poset.members[c]), below=list(poset.lower_covers(c)))
        for c in poset.classes
    ]

    tree_error = None
    try:
        assert_tree(poset)
    except GraphError as err:
        tree_error = f"{type(err).__name__}: {err}"

    shape = None
    if spec.has_shape:
        violations: list[str] = []
        try:
            spec.shape(poset)
        except ShapeViolation as err:
            violations = [f"{c} (clause {k}): {why}" for c, k, why in err.violations]
        shape = ShapeEntry(
            ok=not violations,
            free=sorted(spec.free, key=poset.classes.index),
            regular=sorted(spec.regular, key=poset.classes.index),
            violations=violations,
        )

    report = ValidateReport(
        vertices=len(spec.quiver.vertices),
        edges=len(spec.quiver.edges),
        components=components,
        root=None if tree_error else poset.root,
        depth=None if tree_error else poset.depth(),
        tree=tree_error is None,
        tree_error=tree_error,
        shape=shape,
    )

    lines = [
        f"{plural(report.vertices, 'vertex', 'vertices')}, {plural(report.edges, 'edge')}, "
        f"{plural(len(components), 'component')}",
    ]
    lines.extend(
        f"  [{c.id}] = {{{join_commas(c.vertices)}}}"
        + (f" > {join_commas(c.below)}" if c.below else "")
        for c in components
    )
    if report.tree:
        lines.append(f"tree ok: root {report.root}, depth {report.depth}")
    else:
        lines.append(f"not a tree: {tree_error}")
    if shape is not None:
        lines.append("shape ok" if shape.ok else "shape violations:")
        lines.extend(f"  {v}" for v in shape.violations)
    return report, "\n".join(lines)


def _context(config: RunConfig, spec: GraphSpec, expression: str) -> tuple[Context, Expression]:
    node = parse(expression)
    paths = PathAlgebra.over(spec.poset())
    ctx = Context(paths, resolve_kind(node, config.algebra), config.degree)
    return ctx, node


def _eval_report(config: RunConfig, expression: str, value: Value, ctx: Context) -> EvalReport:
    representation = None
    if isinstance(value, QElement):
        representation = dump_q(q_normalize(value, ctx.degree))
    return EvalReport(
        expression=expression,
        algebra=ctx.kind,
        degree=config.degree,
        value=render(value, ctx),
        representation=representation,
    )


def cmd_eval(config: RunConfig, spec: GraphSpec) -> tuple[EvalReport, str]:
    (expression,) = config.arguments
    ctx, node = _context(config, spec, expression)
    value = evaluate(node, ctx)
    report = _eval_report(config, expression, value, ctx)
    return report, report.value


def cmd_invert(config: RunConfig, spec: GraphSpec) -> tuple[EvalReport, str]:
    (expression,) = config.arguments
    ctx, node = _context(config, spec, expression)
    value = inverse(evaluate(node, ctx), ctx, config.degree)
    report = _eval_report(config, f"inv({expression})", value, ctx)
    return report, report.value


def cmd_monoid_eq(config: RunConfig, spec: GraphSpec) -> tuple[MonoidReport, str]:
    left_text, right_text = config.arguments
    quiver = spec.quiver
    left, right = parse_element(quiver, left_text), parse_element(quiver, right_text)
    verdict = mon_equal(left, right, config.bound, config.max_visited)
    presentation = monoid_of_graph(quiver)

    match verdict:
        case Equal():
            report = MonoidReport(
                left=str(left),
                right=str(right),
                verdict="equal",
                witness=str(verdict.witness),
                left_steps=list(verdict.left_steps),
                right_steps=list(verdict.right_steps),
                bound=config.bound,
                presentation=presentation.note,
            )
            text = f"equal: both rewrite to {verdict.witness} (depth {verdict.depth})"
        case NotEqual():
            report = MonoidReport(
                left=str(left),
                right=str(right),
                verdict="not-equal",
                visited=verdict.left_closure + verdict.right_closure,
                bound=config.bound,
                presentation=presentation.note,
            )
            text = "not equal: the rewriting closures are finite and disjoint"
        case _:
            report = MonoidReport(
                left=str(left),
                right=str(right),
                verdict="unknown",
                visited=verdict.visited,
                bound=config.bound,
                presentation=presentation.note,
            )
            text = f"unknown: no common descendant within depth {config.bound}"

    return report, f"{text}\n{presentation.note}"


def _flatten_parts(d: SigmaPrimeDecomposition) -> dict[str, AlgMatrix]:
    parts: dict[str, AlgMatrix] = {}
    for k, part in d.parts:
        parts[k] = part.matrix
        parts.update(_flatten_parts(part))
    return parts


def cmd_decompose(config: RunConfig, spec: GraphSpec) -> tuple[DecomposeReport, str]:
    (literal,) = config.arguments
    poset = spec.poset()
    paths = PathAlgebra.over(poset)
    value = evaluate(parse(literal), Context(paths, AlgebraKind.PATH, config.degree))
    if not isinstance(value, AlgMatrix):
        msg = f"Expected a matrix literal, got {literal!r}"
        raise PathlocError(msg)

    d = sigma_prime_decompose(value, poset)
    holds = check_sigma_prime_factorization(d, config.degree)
    parts = {k: str(m) for k, m in _flatten_parts(d).items()}
    report = DecomposeReport(
        matrix=str(value),
        root=d.root,
        a0=str(d.a0),
        b=str(d.b),
        parts=parts,
        factorization_holds=holds,
        degree=config.degree,
    )

    lines = [f"A₀ ({d.root}) = {report.a0}", f"B = {report.b}"]
    lines.extend(f"A_{k} = {m}" for k, m in parts.items())
    lines.append(
        f"factorization {'holds' if holds else 'FAILS'} modulo degree {config.degree}"
    )
    return report, "\n".join(lines)


def cmd_verify(config: RunConfig, spec: GraphSpec) -> tuple[VerifyReport, str]:
    report = run_suites(config, spec)
    lines: list[str] = []
    for s in report.suites:
        if s.skipped:
            lines.append(f"{s.name}: skipped ({s.skipped})")
            continue
        status = "ok" if s.ok else "FAILED"
        lines.append(f"{s.name}: {status} {s.passed}/{s.checks}")
        for f in s.failures:
            example = ", ".join(f"{k}={v}" for k, v in f.counterexample.items())
            lines.append(f"  {f.property}: {example}")
    return report, "\n".join(lines)


COMMANDS = {
    Command.VALIDATE: cmd_validate,
    Command.EVAL: cmd_eval,
    Command.INVERT: cmd_invert,
    Command.MONOID_EQ: cmd_monoid_eq,
    Command.DECOMPOSE: cmd_decompose,
    Command.VERIFY: cmd_verify,
}


def exit_code(report: Report) -> int:
    match report:
        case ValidateReport() | VerifyReport():
            return 0 if report.ok else 1
        case DecomposeReport():
            return 0 if report.factorization_holds else 1
        case _:
            return 0


def run(config: RunConfig) -> tuple[Report, str]:
    spec = load_graph(config.graph)
    log.debug("loaded %s", config.graph)
    return COMMANDS[config.command](config, spec)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )

    config = config_from_args(args)
    try:
        report, text = run(config)
    except (PathlocError, OSError) as err:
        if config.json_output:
            print(ErrorReport(error=str(err), kind=type(err).__name__).to_json())
        else:
            print(f"error: {err}", file=sys.stderr)
        return 1

    print(report.to_json() if config.json_output else text)
    return exit_code(report)
