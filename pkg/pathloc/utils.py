from collections.abc import Sequence


def join_commas(xs: Sequence[object]) -> str:
    return ", ".join(str(x) for x in xs)


def plural(n: int, word: str, many: str | None = None) -> str:
    if n == 1:
        return f"{n} {word}"
    return f"{n} {many or word + 's'}"
