from __future__ import annotations

from collections.abc import Callable, Generator
from enum import IntEnum
from typing import final

from pathloc.ast import (
    ArrayLiteral,
    CallExpression,
    Expression,
    Identifier,
    InfixExpression,
    IntegerLiteral,
    KeywordArgument,
    PrefixExpression,
)
from pathloc.errors import ParseError
from pathloc.lexer import lex
from pathloc.token import Token, TokenType


class Precedence(IntEnum):
    LOWEST = 1
    SUM = 2
    PRODUCT = 3
    PREFIX = 4
    POWER = 5
    CALL = 6


_PRECEDENCES: dict[TokenType, Precedence] = {
    TokenType.PLUS: Precedence.SUM,
    TokenType.MINUS: Precedence.SUM,
    TokenType.SLASH: Precedence.PRODUCT,
    TokenType.ASTERISK: Precedence.PRODUCT,
    TokenType.DOT: Precedence.PRODUCT,
    TokenType.CARET: Precedence.POWER,
    TokenType.LEFT_PAREN: Precedence.CALL,
}


@final
class TokenIterator:
    "A two-token window over the token stream: `current` and the lookahead `next`."

    def __init__(self, lexer: Generator[Token]) -> None:
        self._lexer = lexer

        self.current = Token(TokenType.ILLEGAL, "")
        self.next = Token(TokenType.ILLEGAL, "")

        self.advance()  # Populate next token
        self.advance()  # Populate current token

    def advance(self) -> None:
        "Advance by one token."
        self.current = self.next
        self.next = next(self._lexer)

    def current_is(self, t: TokenType) -> bool:
        return self.current.type == t

    def next_is(self, t: TokenType) -> bool:
        return self.next.type == t

    def expect_next(self, t: TokenType) -> None:
        """
        Expect the next token to be of the given type.

        If it is, the iterator will be advanced. If it is not, a `ParseError` pointing at
        the offending token is raised.
        """

        if self.next.type != t:
            msg = f"Expected {t.value}, got {describe_token(self.next)}"
            raise ParseError(msg, column=self.next.column)

        self.advance()


PrefixParseFn = Callable[[], Expression]
# Takes the operand already parsed on the left; consumes its right operand itself.
InfixParseFn = Callable[[Expression], Expression]


@final
class Parser:
    "A Pratt parser for element literals such as `inv(1 - x_u*alpha, N=3)` or `~e1 . e1`."

    def __init__(self, lexer: Generator[Token]) -> None:
        self._tokens = TokenIterator(lexer)

        self._prefix_parse_fns: dict[TokenType, PrefixParseFn] = {
            TokenType.IDENTIFIER: self._parse_identifier,
            TokenType.INTEGER: self._parse_integer_literal,
            TokenType.LEFT_BRACKET: self._parse_array_literal,
            TokenType.MINUS: self._parse_prefix_expression,
            TokenType.TILDE: self._parse_prefix_expression,
            TokenType.LEFT_PAREN: self._parse_grouped_expression,
        }

        self._infix_parse_fns: dict[TokenType, InfixParseFn] = {
            TokenType.PLUS: self._parse_infix_expression,
            TokenType.MINUS: self._parse_infix_expression,
            TokenType.SLASH: self._parse_infix_expression,
            TokenType.ASTERISK: self._parse_infix_expression,
            TokenType.DOT: self._parse_infix_expression,
            TokenType.CARET: self._parse_power_expression,
            TokenType.LEFT_PAREN: self._parse_call_expression,
        }

    def parse(self) -> Expression:
        "Parse one whole expression; trailing tokens are an error."
        expr = self._parse_expression()

        if not self._tokens.next_is(TokenType.END_OF_FILE):
            msg = f"Unexpected {describe_token(self._tokens.next)}"
            raise ParseError(msg, column=self._tokens.next.column)

        return expr

    def _parse_expression(self, precedence: Precedence = Precedence.LOWEST) -> Expression:
        prefix_fn = self._prefix_parse_fns.get(self._tokens.current.type)
        if prefix_fn is None:
            msg = f"Expected an expression, got {describe_token(self._tokens.current)}"
            raise ParseError(msg, column=self._tokens.current.column)
        left = prefix_fn()

        while precedence < self._next_precedence():
            infix_fn = self._infix_parse_fns.get(self._tokens.next.type)
            if infix_fn is None:
                return left

            self._tokens.advance()
            left = infix_fn(left)

        return left

    def _parse_prefix_expression(self) -> Expression:
        token = self._tokens.current
        operator = token.literal

        self._tokens.advance()
        right = self._parse_expression(Precedence.PREFIX)

        return PrefixExpression(token, operator, right)

    def _parse_infix_expression(self, left: Expression) -> Expression:
        token = self._tokens.current
        operator = token.literal

        precedence = self._current_precedence()
        self._tokens.advance()
        right = self._parse_expression(precedence)

        return InfixExpression(token, left, operator, right)

    def _parse_power_expression(self, left: Expression) -> Expression:
        token = self._tokens.current

        # <base>^<integer>
        self._tokens.expect_next(TokenType.INTEGER)
        exponent = self._parse_integer_literal()

        return InfixExpression(token, left, "^", exponent)

    def _parse_grouped_expression(self) -> Expression:
        self._tokens.advance()
        expr = self._parse_expression()
        self._tokens.expect_next(TokenType.RIGHT_PAREN)
        return expr

    def _parse_call_expression(self, fn: Expression) -> CallExpression:
        token = self._tokens.current
        if not isinstance(fn, Identifier):
            msg = "Only named functions can be called"
            raise ParseError(msg, column=token.column)

        args: list[Expression] = []
        keywords: list[KeywordArgument] = []

        if self._tokens.next_is(TokenType.RIGHT_PAREN):
            self._tokens.advance()
            return CallExpression(token, fn, args, keywords)

        while True:
            self._tokens.advance()

            if self._tokens.current_is(TokenType.IDENTIFIER) and self._tokens.next_is(
                TokenType.ASSIGN
            ):
                keywords.append(self._parse_keyword_argument())
            elif keywords:
                msg = "Positional argument after keyword argument"
                raise ParseError(msg, column=self._tokens.current.column)
            else:
                args.append(self._parse_expression())

            if not self._tokens.next_is(TokenType.COMMA):
                break
            self._tokens.advance()

        self._tokens.expect_next(TokenType.RIGHT_PAREN)

        return CallExpression(token, fn, args, keywords)

    def _parse_keyword_argument(self) -> KeywordArgument:
        # <name>
        token = self._tokens.current

        # <name>=
        self._tokens.advance()
        self._tokens.advance()

        # <name>=<value>
        value = self._parse_expression()

        return KeywordArgument(token, token.literal, value)

    def _parse_array_literal(self) -> ArrayLiteral:
        token = self._tokens.current
        self._tokens.advance()  # Skip opening bracket

        if self._tokens.current_is(TokenType.RIGHT_BRACKET):
            return ArrayLiteral(token, [])

        values: list[Expression] = [self._parse_expression()]

        while self._tokens.next_is(TokenType.COMMA):
            self._tokens.advance()
            self._tokens.advance()
            values.append(self._parse_expression())

        self._tokens.expect_next(TokenType.RIGHT_BRACKET)

        return ArrayLiteral(token, values)

    def _parse_identifier(self) -> Identifier:
        return Identifier(self._tokens.current, self._tokens.current.literal)

    def _parse_integer_literal(self) -> IntegerLiteral:
        return IntegerLiteral(self._tokens.current, int(self._tokens.current.literal))

    def _current_precedence(self) -> Precedence:
        return _PRECEDENCES.get(self._tokens.current.type, Precedence.LOWEST)

    def _next_precedence(self) -> Precedence:
        return _PRECEDENCES.get(self._tokens.next.type, Precedence.LOWEST)


def describe_token(token: Token) -> str:
    if token.type == TokenType.END_OF_FILE:
        return "end of input"
    return repr(token.literal)


def parse(code: str) -> Expression:
    return Parser(lex(code)).parse()
