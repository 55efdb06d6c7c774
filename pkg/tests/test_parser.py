import pytest

from pathloc.ast import (
    ArrayLiteral,
    CallExpression,
    Expression,
    Identifier,
    InfixExpression,
    IntegerLiteral,
    PrefixExpression,
)
from pathloc.errors import ParseError
from pathloc.parser import parse


@pytest.mark.parametrize(
    ("code", "expected"),
    [
        ("e1", "e1"),
        ("-alpha", "(-alpha)"),
        ("~e1", "(~e1)"),
        ("1 - x_u*alpha", "(1 - (x_u * alpha))"),
        ("~e1 . e1", "((~e1) . e1)"),
        ("e2 . ~e2", "(e2 . (~e2))"),
        ("a + b . c", "(a + (b . c))"),
        ("a . b . c", "((a . b) . c)"),
        ("a - b - c", "((a - b) - c)"),
        ("(a + b) . c", "((a + b) . c)"),
        ("alpha^3", "(alpha ^ 3)"),
        ("alpha**3", "(alpha ^ 3)"),
        ("-alpha^2", "(-(alpha ^ 2))"),
        ("x_u*alpha^2", "(x_u * (alpha ^ 2))"),
        ("e1 / 2", "(e1 / 2)"),
        ("inv(1 - alpha, N=3)", "inv((1 - alpha), N=3)"),
        ("star(e1 + e2)", "star((e1 + e2))"),
        ("[[e1, 0], [0, e2]]", "[[e1, 0], [0, e2]]"),
    ],
)
def test_operator_precedence(code: str, expected: str) -> None:
    assert str(parse(code)) == expected


def test_prefix_expressions() -> None:
    expr = parse("~e1")
    assert isinstance(expr, PrefixExpression)
    assert expr.operator == "~"
    assert_identifier(expr.right, "e1")


def test_power_exponent_is_integer() -> None:
    expr = parse("alpha ** 4")
    assert isinstance(expr, InfixExpression)
    assert expr.operator == "^"
    assert_identifier(expr.left, "alpha")
    assert_int_literal(expr.right, 4)


def test_call_expression() -> None:
    call = parse("inv(1 - x_u*alpha, N=3)")

    assert isinstance(call, CallExpression)
    assert_identifier(call.function, "inv")
    assert len(call.arguments) == 1
    assert isinstance(call.arguments[0], InfixExpression)
    assert len(call.keywords) == 1
    assert call.keywords[0].name == "N"
    assert_int_literal(call.keywords[0].value, 3)


def test_call_without_arguments() -> None:
    call = parse("star()")
    assert isinstance(call, CallExpression)
    assert call.arguments == []
    assert call.keywords == []


def test_matrix_literal() -> None:
    expr = parse("[[e1, 0], [0, e2]]")
    num_rows = 2

    assert isinstance(expr, ArrayLiteral)
    assert len(expr.values) == num_rows
    first = expr.values[0]
    assert isinstance(first, ArrayLiteral)
    assert_identifier(first.values[0], "e1")
    assert_int_literal(first.values[1], 0)


@pytest.mark.parametrize(
    ("code", "message", "column"),
    [
        ("alpha^x", "Expected INTEGER, got 'x'", 7),
        ("(a + b", "Expected ), got end of input", 7),
        ("a b", "Unexpected 'b'", 3),
        ("inv(N=3, a)", "Positional argument after keyword argument", 10),
        ("2(b)", "Only named functions can be called", 2),
        ("+ a", "Expected an expression, got '+'", 1),
        ("e1 $", "Illegal character: $", 4),
    ],
)
def test_errors(code: str, message: str, column: int) -> None:
    with pytest.raises(ParseError) as info:
        parse(code)

    assert info.value.msg == message
    assert info.value.column == column
    assert isinstance(info.value, SyntaxError)


def assert_identifier(expr: Expression, value: str) -> None:
    assert isinstance(expr, Identifier)
    assert expr.value == value
    assert expr.token_literal() == value


def assert_int_literal(expr: Expression, value: int) -> None:
    assert isinstance(expr, IntegerLiteral)
    assert expr.value == value
    assert expr.token_literal() == str(value)
