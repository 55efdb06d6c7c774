from __future__ import annotations

import re
from typing import TYPE_CHECKING

from pathloc.errors import ParseError
from pathloc.token import Token, TokenType

if TYPE_CHECKING:
    from collections.abc import Generator

PATTERNS = {
    TokenType.IDENTIFIER: re.compile(r"[A-Za-z_][A-Za-z0-9_]*"),
    TokenType.INTEGER: re.compile(r"\d+"),
    TokenType.ASSIGN: re.compile(r"="),
    TokenType.CARET: re.compile(r"\^|\*\*"),
    TokenType.PLUS: re.compile(r"\+"),
    TokenType.MINUS: re.compile(r"-"),
    TokenType.ASTERISK: re.compile(r"\*"),
    TokenType.SLASH: re.compile(r"/"),
    TokenType.DOT: re.compile(r"\."),
    TokenType.TILDE: re.compile(r"~"),
    TokenType.LEFT_PAREN: re.compile(r"\("),
    TokenType.RIGHT_PAREN: re.compile(r"\)"),
    TokenType.LEFT_BRACKET: re.compile(r"\["),
    TokenType.RIGHT_BRACKET: re.compile(r"\]"),
    TokenType.COMMA: re.compile(r","),
}


def lex(code: str) -> Generator[Token]:
    cursor = 0

    while cursor < len(code):
        current_char = code[cursor]

        if current_char.isspace():
            cursor += 1
            continue

        token = None

        for token_type, regex in PATTERNS.items():
            match = regex.match(code, cursor)
            if match:
                token = Token(token_type, match.group(), cursor + 1)
                cursor = match.end()
                break

        if token is None:
            msg = f"Illegal character: {current_char}"
            raise ParseError(msg, column=cursor + 1)

        yield token

    while True:
        yield Token(TokenType.END_OF_FILE, "", len(code) + 1)
