"""
Evaluation of element literals in the path algebra, the Leavitt algebra or `Q_K(E)`.

Integers and `x_<class>` are scalars; a scalar added to an element stands for its multiple
of the unit `Σ v`. The target algebra is fixed before evaluation starts: a path-algebra
request that uses `~` or `star` is evaluated in the Leavitt algebra.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property

from sympy.polys.fields import FracElement

from pathloc.ast import (
    ArrayLiteral,
    CallExpression,
    Expression,
    Identifier,
    InfixExpression,
    IntegerLiteral,
    Node,
    PrefixExpression,
)
from pathloc.errors import DivisionByZero, NotApplicable, ParseError
from pathloc.leavitt import (
    LeavittAlgebra,
    LeavittElement,
    le_add,
    le_mul,
    le_neg,
    le_pow,
    le_scale,
    star,
)
from pathloc.pathalg import (
    AlgMatrix,
    PathAlgebra,
    PathElement,
    invert_element,
    matrix,
    pe_add,
    pe_mul,
    pe_neg,
    pe_pow,
    scale,
)
from pathloc.parser import parse
from pathloc.qalg import (
    QAlgebra,
    QElement,
    q_add,
    q_inverse_of,
    q_mul,
    q_neg,
    q_normalize,
    q_polynomial,
    q_pow,
    q_scale,
    q_star,
    q_str,
)
from pathloc.scalars import variable_name

log = logging.getLogger(__name__)


class AlgebraKind(StrEnum):
    PATH = "path"
    LEAVITT = "leavitt"
    Q = "q"


type Element = PathElement | LeavittElement | QElement
type Value = FracElement | Element | AlgMatrix


@dataclass(frozen=True, eq=False)
class Context:
    paths: PathAlgebra
    kind: AlgebraKind = AlgebraKind.PATH
    degree: int = 8

    @cached_property
    def leavitt(self) -> LeavittAlgebra:
        return LeavittAlgebra(self.paths)

    @cached_property
    def q(self) -> QAlgebra:
        return QAlgebra(self.paths, self.degree)

    def unit(self) -> Element:
        match self.kind:
            case AlgebraKind.PATH:
                return self.paths.one()
            case AlgebraKind.LEAVITT:
                return self.leavitt.one()
            case AlgebraKind.Q:
                return self.q.one()

    def vertex(self, v: str) -> Element:
        match self.kind:
            case AlgebraKind.PATH:
                return self.paths.vertex(v)
            case AlgebraKind.LEAVITT:
                return self.leavitt.vertex(v)
            case AlgebraKind.Q:
                return self.q.vertex(v)

    def edge(self, e: str) -> Element:
        match self.kind:
            case AlgebraKind.PATH:
                return self.paths.edge(e)
            case AlgebraKind.LEAVITT:
                return self.leavitt.edge(e)
            case AlgebraKind.Q:
                return self.q.edge(e)


def uses_involution(node: Node) -> bool:
    match node:
        case PrefixExpression():
            return node.operator == "~" or uses_involution(node.right)
        case InfixExpression():
            return uses_involution(node.left) or uses_involution(node.right)
        case CallExpression():
            return node.function.value == "star" or any(
                uses_involution(n) for n in [*node.arguments, *(k.value for k in node.keywords)]
            )
        case ArrayLiteral():
            return any(uses_involution(n) for n in node.values)
        case _:
            return False


def resolve_kind(node: Node, requested: AlgebraKind) -> AlgebraKind:
    if requested == AlgebraKind.PATH and uses_involution(node):
        log.debug("ghost edges requested, evaluating in the Leavitt algebra")
        return AlgebraKind.LEAVITT
    return requested


def evaluate(node: Node, ctx: Context) -> Value:  # noqa: PLR0911
    match node:
        case IntegerLiteral():
            return ctx.paths.tower.field(node.value)

        case Identifier():
            return evaluate_identifier(node, ctx)

        case PrefixExpression():
            right = evaluate(node.right, ctx)
            if node.operator == "-":
                return negate(right)
            return involution(right, ctx)

        case InfixExpression():
            if node.operator == "^":
                assert isinstance(node.right, IntegerLiteral)  # noqa: S101
                return power(evaluate(node.left, ctx), node.right.value, ctx)
            return evaluate_infix_expression(
                node.operator, evaluate(node.left, ctx), evaluate(node.right, ctx), ctx
            )

        case CallExpression():
            return evaluate_call(node, ctx)

        case ArrayLiteral():
            return evaluate_matrix(node, ctx)

        case _:
            msg = f"Cannot evaluate {node}"
            raise ParseError(msg)


def evaluate_identifier(node: Identifier, ctx: Context) -> Value:
    quiver = ctx.paths.quiver
    name = node.value

    if quiver.has_vertex(name):
        return ctx.vertex(name)
    if quiver.has_edge(name):
        return ctx.edge(name)
    for cls in ctx.paths.poset.classes:
        if variable_name(cls) == name:
            return ctx.paths.tower.var(cls).value

    msg = f"Unknown identifier {name}"
    raise ParseError(msg, column=node.token.column)


def evaluate_infix_expression(operator: str, left: Value, right: Value, ctx: Context) -> Value:
    match operator:
        case "+":
            return add(left, right, ctx)
        case "-":
            return add(left, negate(right), ctx)
        case "*" | ".":
            return multiply(left, right, ctx)
        case "/":
            return divide(left, right, ctx)
        case _:
            msg = f"Unknown operator {operator}"
            raise ParseError(msg)


def element_of(x: Value, ctx: Context) -> Element:
    "A scalar as its multiple of the unit."
    match x:
        case FracElement():
            return scale_element(x, ctx.unit())
        case AlgMatrix():
            msg = "Matrix literals only appear at the top level"
            raise NotApplicable(msg)
        case _:
            return x


def add(x: Value, y: Value, ctx: Context) -> Value:
    if isinstance(x, FracElement) and isinstance(y, FracElement):
        return x + y

    match element_of(x, ctx), element_of(y, ctx):
        case PathElement() as a, PathElement() as b:
            return pe_add(a, b)
        case LeavittElement() as a, LeavittElement() as b:
            return le_add(a, b)
        case QElement() as a, QElement() as b:
            return q_add(a, b)
        case _:
            msg = "Operands live in different algebras"
            raise NotApplicable(msg)


def negate(x: Value) -> Value:
    match x:
        case FracElement():
            return -x
        case PathElement():
            return pe_neg(x)
        case LeavittElement():
            return le_neg(x)
        case QElement():
            return q_neg(x)
        case AlgMatrix():
            msg = "Matrix literals only appear at the top level"
            raise NotApplicable(msg)


def scale_element(c: FracElement, x: Element) -> Element:
    match x:
        case PathElement():
            return scale(c, x)
        case LeavittElement():
            return le_scale(c, x)
        case QElement():
            return q_scale(c, x)


def multiply(x: Value, y: Value, ctx: Context) -> Value:
    match x, y:
        case FracElement(), FracElement():
            return x * y
        case FracElement(), _:
            return scale_element(x, element_of(y, ctx))
        case _, FracElement():
            return scale_element(y, element_of(x, ctx))

    match element_of(x, ctx), element_of(y, ctx):
        case PathElement() as a, PathElement() as b:
            return pe_mul(a, b)
        case LeavittElement() as a, LeavittElement() as b:
            return le_mul(a, b)
        case QElement() as a, QElement() as b:
            return q_mul(a, b, ctx.degree)
        case _:
            msg = "Operands live in different algebras"
            raise NotApplicable(msg)


def divide(x: Value, y: Value, ctx: Context) -> Value:
    if not isinstance(y, FracElement):
        msg = "Only division by a scalar is supported; use inv(...)"
        raise NotApplicable(msg)
    if not y:
        msg = "Division by zero"
        raise DivisionByZero(msg)
    return multiply(x, 1 / y, ctx)


def power(x: Value, k: int, ctx: Context) -> Value:
    match x:
        case FracElement():
            return x**k
        case PathElement():
            return pe_pow(x, k)
        case LeavittElement():
            return le_pow(x, k)
        case QElement():
            return q_pow(x, k)
        case AlgMatrix():
            return power(element_of(x, ctx), k, ctx)


def involution(x: Value, ctx: Context) -> Value:
    match x:
        case FracElement():
            return x
        case PathElement():
            return star(ctx.leavitt.from_paths(x))
        case LeavittElement():
            return star(x)
        case QElement():
            return q_star(x)
        case AlgMatrix():
            return involution(element_of(x, ctx), ctx)


def inverse(x: Value, ctx: Context, degree: int) -> Value:
    match x:
        case FracElement():
            return divide(ctx.paths.tower.field.one, x, ctx)
        case PathElement():
            return invert_element(x, degree)
        case QElement():
            return ctx.q.embed_rational(q_inverse_of(q_polynomial(x)))
        case LeavittElement():
            msg = "inv is not defined in the Leavitt algebra; evaluate in Q_K(E) instead"
            raise NotApplicable(msg)
        case AlgMatrix():
            return inverse(element_of(x, ctx), ctx, degree)


def builtin_inv(ctx: Context, args: list[Value], keywords: dict[str, Value]) -> Value:
    if len(args) != 1:
        msg = f"inv takes 1 argument, got {len(args)}"
        raise NotApplicable(msg)
    degree = keywords.pop("N", None)
    if keywords:
        msg = f"inv takes only N=, got {', '.join(keywords)}"
        raise NotApplicable(msg)
    return inverse(args[0], ctx, ctx.degree if degree is None else _natural(degree))


def builtin_star(ctx: Context, args: list[Value], keywords: dict[str, Value]) -> Value:
    if len(args) != 1 or keywords:
        msg = "star takes exactly 1 argument"
        raise NotApplicable(msg)
    return involution(args[0], ctx)


def _natural(x: Value) -> int:
    text = str(x)
    if not isinstance(x, FracElement) or not text.isdigit():
        msg = f"Expected a natural number, got {text}"
        raise NotApplicable(msg)
    return int(text)


builtins: dict[str, Callable[[Context, list[Value], dict[str, Value]], Value]] = {
    "inv": builtin_inv,
    "star": builtin_star,
}


def evaluate_call(node: CallExpression, ctx: Context) -> Value:
    fn = builtins.get(node.function.value)
    if fn is None:
        msg = f"Unknown function {node.function.value}"
        raise ParseError(msg, column=node.function.token.column)

    args = [evaluate(a, ctx) for a in node.arguments]
    keywords = {k.name: evaluate(k.value, ctx) for k in node.keywords}
    return fn(ctx, args, keywords)


def evaluate_matrix(node: ArrayLiteral, ctx: Context) -> AlgMatrix:
    if ctx.kind != AlgebraKind.PATH:
        msg = "Matrix literals are read over the path algebra"
        raise NotApplicable(msg)
    if not node.values or not all(isinstance(r, ArrayLiteral) for r in node.values):
        msg = "A matrix literal is a non-empty list of rows"
        raise ParseError(msg, column=node.token.column)

    rows: list[list[PathElement]] = []
    for row in node.values:
        assert isinstance(row, ArrayLiteral)  # noqa: S101
        entries: list[PathElement] = []
        for x in row.values:
            value = element_of(evaluate(x, ctx), ctx)
            if not isinstance(value, PathElement):
                msg = f"Matrix entry {x} is not a path-algebra element"
                raise NotApplicable(msg)
            entries.append(value)
        rows.append(entries)
    return matrix(ctx.paths, rows)


def render(value: Value, ctx: Context) -> str:
    if isinstance(value, QElement):
        return q_str(q_normalize(value, ctx.degree), ctx.degree)
    return str(value)


def evaluate_text(
    code: str, paths: PathAlgebra, kind: AlgebraKind = AlgebraKind.PATH, degree: int = 8
) -> tuple[Value, Context]:
    "Parse and evaluate one literal; returns the value with the context it was computed in."
    node: Expression = parse(code)
    ctx = Context(paths, resolve_kind(node, kind), degree)
    return evaluate(node, ctx), ctx
