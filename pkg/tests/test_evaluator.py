import pytest

from pathloc.errors import DivisionByZero, NotApplicable, ParseError
from pathloc.evaluator import AlgebraKind, Context, evaluate, evaluate_text, render, resolve_kind
from pathloc.graphfile import parse_graph
from pathloc.leavitt import LeavittElement
from pathloc.parser import parse
from pathloc.pathalg import AlgMatrix, PathAlgebra, PathElement
from pathloc.qalg import QElement, q_equal, q_mul

ROSE = "vertex w\nedge e1 w w\nedge e2 w w\n"
TOEPLITZ = "vertex u\nvertex v\nedge alpha u u\nedge f u v\nedge beta v v\n"
DEGREE = 6


@pytest.mark.parametrize(
    ("code", "expected"),
    [
        ("u", "u"),
        ("2*alpha + u", "u + 2*alpha"),
        ("1 + alpha", "u + v + alpha"),
        ("alpha^2 - alpha . alpha", "0"),
        ("f . alpha", "0"),
        ("alpha . f . beta", "alpha.f.beta"),
        ("-(u - f)", "-u + f"),
        ("x_u * beta", "x_u*beta"),
    ],
)
def test_path_algebra(code: str, expected: str) -> None:
    value, ctx = evaluate_text(code, make_algebra(TOEPLITZ))

    assert ctx.kind == AlgebraKind.PATH
    assert isinstance(value, PathElement)
    assert render(value, ctx) == expected


def test_scalars() -> None:
    paths = make_algebra(TOEPLITZ)

    value, _ = evaluate_text("2 + 3 * 4", paths)
    assert value == paths.tower.field(14)

    value, _ = evaluate_text("x_u^2 / x_u", paths)
    assert value == paths.tower.var("u").value


@pytest.mark.parametrize(
    ("code", "expected"),
    [
        ("~e1 . e1", "w"),
        ("~e1 . e2", "0"),
        ("e2 . ~e2", "w - e1.~e1"),
        ("star(e1 . ~e2)", "e2.~e1"),
    ],
)
def test_ghosts_switch_to_leavitt(code: str, expected: str) -> None:
    value, ctx = evaluate_text(code, make_algebra(ROSE))

    assert ctx.kind == AlgebraKind.LEAVITT
    assert isinstance(value, LeavittElement)
    assert render(value, ctx) == expected


def test_resolve_kind() -> None:
    assert resolve_kind(parse("e1 . e2"), AlgebraKind.PATH) == AlgebraKind.PATH
    assert resolve_kind(parse("inv(1 + star(e1))"), AlgebraKind.PATH) == AlgebraKind.LEAVITT
    assert resolve_kind(parse("~e1"), AlgebraKind.Q) == AlgebraKind.Q


def test_truncated_inverse() -> None:
    value, ctx = evaluate_text("inv(1 - x_u*alpha, N=3)", make_algebra(TOEPLITZ))

    assert render(value, ctx) == (
        "u + v + x_u*alpha + x_u**2*alpha.alpha + x_u**3*alpha.alpha.alpha + O(4)"
    )


def test_q_relations() -> None:
    paths = make_algebra(ROSE)

    value, ctx = evaluate_text("~e1 . e1", paths, AlgebraKind.Q, DEGREE)
    assert isinstance(value, QElement)
    assert q_equal(value, ctx.q.vertex("w"), DEGREE)

    value, ctx = evaluate_text("e1 . ~e1 + e2 . ~e2", paths, AlgebraKind.Q, DEGREE)
    assert isinstance(value, QElement)
    assert q_equal(value, ctx.q.one(), DEGREE)


def test_q_inverse() -> None:
    paths = make_algebra(TOEPLITZ)

    value, ctx = evaluate_text("inv(1 - alpha)", paths, AlgebraKind.Q, DEGREE)
    x, _ = evaluate_text("1 - alpha", paths, AlgebraKind.Q, DEGREE)

    assert isinstance(value, QElement)
    assert isinstance(x, QElement)
    assert q_equal(q_mul(x, value, DEGREE), ctx.q.one(), DEGREE)


def test_matrix_literal() -> None:
    value, _ = evaluate_text("[[alpha, 0], [f, 1]]", make_algebra(TOEPLITZ))

    assert isinstance(value, AlgMatrix)
    assert str(value) == "[[alpha, 0], [f, u + v]]"


@pytest.mark.parametrize("code", ["[[w, ~e1]]", "[[w], [e1 . ~e1]]", "[[star(e2)]]"])
def test_matrix_entries_must_be_path_elements(code: str) -> None:
    ctx = Context(make_algebra(ROSE), AlgebraKind.PATH)

    with pytest.raises(NotApplicable):
        evaluate(parse(code), ctx)


@pytest.mark.parametrize(
    ("code", "kind", "error"),
    [
        ("e1 / e2", AlgebraKind.PATH, NotApplicable),
        ("e1 / 0", AlgebraKind.PATH, DivisionByZero),
        ("inv(w, e1)", AlgebraKind.PATH, NotApplicable),
        ("inv(w, N=x_w)", AlgebraKind.PATH, NotApplicable),
        ("inv(w, M=3)", AlgebraKind.PATH, NotApplicable),
        ("inv(w - ~e1)", AlgebraKind.PATH, NotApplicable),
        ("star(e1, e2)", AlgebraKind.PATH, NotApplicable),
        ("[[e1]]", AlgebraKind.Q, NotApplicable),
        ("[e1]", AlgebraKind.PATH, ParseError),
    ],
)
def test_errors(code: str, kind: AlgebraKind, error: type[Exception]) -> None:
    with pytest.raises(error):
        evaluate_text(code, make_algebra(ROSE), kind)


@pytest.mark.parametrize(
    ("code", "column"),
    [
        ("w + z", 5),
        ("sqrt(w)", 1),
        ("e1 . (w - x_v)", 11),
    ],
)
def test_unknown_names(code: str, column: int) -> None:
    with pytest.raises(ParseError) as info:
        evaluate_text(code, make_algebra(ROSE))

    assert info.value.column == column


def make_algebra(text: str) -> PathAlgebra:
    return PathAlgebra.over(parse_graph(text).poset())
