from dataclasses import dataclass
from enum import Enum


class TokenType(Enum):
    ILLEGAL = "ILLEGAL"
    END_OF_FILE = "END_OF_FILE"

    IDENTIFIER = "IDENTIFIER"
    INTEGER = "INTEGER"

    ASSIGN = "="
    PLUS = "+"
    MINUS = "-"
    SLASH = "/"
    ASTERISK = "*"
    DOT = "."
    CARET = "^"
    TILDE = "~"

    COMMA = ","

    LEFT_PAREN = "("
    RIGHT_PAREN = ")"
    LEFT_BRACKET = "["
    RIGHT_BRACKET = "]"


@dataclass(frozen=True)
class Token:
    type: TokenType
    literal: str
    column: int = 0
    "1-based position of the first character."
