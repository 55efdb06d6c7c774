import pytest
from sympy import sympify

from pathloc.errors import DivisionByZero, IncomparableHomes, MembershipError, NotASubfield
from pathloc.graphfile import parse_graph
from pathloc.scalars import FieldScalar, FieldTower, amalgamate, coerce, inv

TOEPLITZ = "vertex u\nvertex v\nedge alpha u u\nedge f u v\nedge beta v v\n"
TREE = "vertex r\nvertex a\nvertex b\nedge g r a\nedge h r b\n"


def test_fields_grow_down_the_tree() -> None:
    tower = make_tower(TOEPLITZ)
    x_u, x_v = tower.var("u").value, tower.var("v").value

    assert tower.fits(x_u, "u")
    assert tower.fits(x_u, "v")
    assert tower.fits(x_v, "v")
    assert not tower.fits(x_v, "u")
    assert tower.fits(tower.field(3) / (x_u + 1), "u")


@pytest.mark.parametrize(
    ("expr", "home"),
    [
        ("3", "u"),
        ("x_u", "u"),
        ("x_v", "v"),
        ("x_u*x_v", "v"),
        ("1/(x_u + x_v)", "v"),
    ],
)
def test_home_of(expr: str, home: str) -> None:
    tower = make_tower(TOEPLITZ)
    symbols = {str(s): s for s in tower.field.symbols}
    value = tower.field.from_expr(sympify(expr, locals=symbols))

    assert tower.home_of(value) == home


def test_constant_tower() -> None:
    tower = make_tower(TOEPLITZ).constant()
    x_v = tower.var("v").value

    assert tower.fits(x_v, "u")
    assert tower.home_of(x_v) == "u"


def test_membership_is_enforced() -> None:
    tower = make_tower(TOEPLITZ)

    with pytest.raises(MembershipError):
        FieldScalar(tower.var("v").value, "u", tower)

    with pytest.raises(MembershipError):
        tower.var("nowhere")


def test_arithmetic_lands_in_the_deeper_field() -> None:
    tower = make_tower(TOEPLITZ)
    s, t = tower.var("u"), tower.var("v")

    assert (s + t).home == "v"
    assert (s * s).home == "u"
    assert (s - s).is_zero
    assert (s / s).value == tower.field.one
    assert (-t).value == -t.value


def test_division_by_zero() -> None:
    tower = make_tower(TOEPLITZ)

    with pytest.raises(DivisionByZero):
        inv(tower.const(0))

    with pytest.raises(ZeroDivisionError):
        tower.var("u") / tower.const(0)


def test_incomparable_homes() -> None:
    tower = make_tower(TREE)

    with pytest.raises(IncomparableHomes):
        tower.var("a") + tower.var("b")


def test_coerce() -> None:
    tower = make_tower(TOEPLITZ)

    moved = coerce(tower.var("u"), "v")
    assert moved.home == "v"
    assert moved.value == tower.var("u").value

    with pytest.raises(NotASubfield):
        coerce(tower.var("v"), "u")


def test_amalgamation_squares_commute() -> None:
    tower = make_tower(TOEPLITZ)
    amalgamation = amalgamate(tower)
    upper = tower.subfield("u")
    value = (upper.gens[0] + 1) / (upper.gens[0] - 2)

    assert amalgamation.square_commutes("v", "u", value)
    assert amalgamation.embed("u", value) == (tower.var("u").value + 1) / (
        tower.var("u").value - 2
    )

    with pytest.raises(NotASubfield):
        amalgamation.include("v", "u", value)

    included = amalgamation.include("u", "v", value)
    assert included.field == tower.subfield("v")


def test_embedding_checks_membership() -> None:
    tower = make_tower(TOEPLITZ)
    amalgamation = amalgamate(tower)
    lower = tower.subfield("v")
    x_u, x_v = lower.gens

    with pytest.raises(MembershipError):
        amalgamation.embed("u", x_v + 1)

    with pytest.raises(MembershipError):
        amalgamation.include("u", "v", x_u / x_v)

    assert amalgamation.embed("v", x_u / x_v) == tower.var("u").value / tower.var("v").value


def make_tower(text: str) -> FieldTower:
    return FieldTower(parse_graph(text).poset())

