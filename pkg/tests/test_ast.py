from pathloc.ast import (
    CallExpression,
    Identifier,
    InfixExpression,
    IntegerLiteral,
    KeywordArgument,
    PrefixExpression,
)
from pathloc.token import Token, TokenType


def test_str() -> None:
    alpha = Identifier(Token(TokenType.IDENTIFIER, "alpha"), "alpha")
    x_u = Identifier(Token(TokenType.IDENTIFIER, "x_u"), "x_u")
    one = IntegerLiteral(Token(TokenType.INTEGER, "1"), 1)
    three = IntegerLiteral(Token(TokenType.INTEGER, "3"), 3)

    product = InfixExpression(Token(TokenType.ASTERISK, "*"), x_u, "*", alpha)
    difference = InfixExpression(Token(TokenType.MINUS, "-"), one, "-", product)
    call = CallExpression(
        Token(TokenType.LEFT_PAREN, "("),
        Identifier(Token(TokenType.IDENTIFIER, "inv"), "inv"),
        [difference],
        [KeywordArgument(Token(TokenType.IDENTIFIER, "N"), "N", three)],
    )

    assert str(call) == "inv((1 - (x_u * alpha)), N=3)"


def test_prefix_str() -> None:
    e1 = Identifier(Token(TokenType.IDENTIFIER, "e1"), "e1")
    ghost = PrefixExpression(Token(TokenType.TILDE, "~"), "~", e1)

    assert str(ghost) == "(~e1)"
    assert ghost.token_literal() == "~"
