import pytest

from pathloc.errors import MembershipError, NonSquare, NotInvertible
from pathloc.graphfile import parse_graph
from pathloc.pathalg import (
    PathAlgebra,
    PathElement,
    augment,
    check_right_derivation,
    geometric_inverse,
    identity,
    invert_element,
    invert_eps_unit,
    is_invertible,
    mat_mul,
    matrix,
    pe_pow,
    scale,
    tau,
    transduce,
)

TOEPLITZ = "vertex u\nvertex v\nedge alpha u u\nedge f u v\nedge beta v v\n"


def test_concatenation_product() -> None:
    paths = make_algebra(TOEPLITZ)
    alpha, f, beta = paths.edge("alpha"), paths.edge("f"), paths.edge("beta")

    assert str(alpha * f * beta) == "alpha.f.beta"
    assert (beta * f).is_zero
    assert paths.vertex("u") * alpha == alpha
    assert (paths.vertex("v") * alpha).is_zero
    assert paths.one() * f == f == f * paths.one()


def test_coefficients_live_in_range_fields() -> None:
    paths = make_algebra(TOEPLITZ)
    x_u, x_v = paths.tower.var("u").value, paths.tower.var("v").value
    quiver = paths.quiver

    assert str(paths.element({quiver.path("f"): x_v})) == "x_v*f"
    assert str(paths.element({quiver.path("beta"): x_u + 1})) == "(x_u + 1)*beta"

    with pytest.raises(MembershipError):
        paths.element({quiver.path("alpha"): x_v})

    with pytest.raises(MembershipError):
        scale(x_v, paths.edge("alpha"))


@pytest.mark.parametrize(
    ("terms", "expected"),
    [
        ({}, "0"),
        ({"u": 1}, "u"),
        ({"u": -1}, "-u"),
        ({"u": 1, "alpha": -2}, "u - 2*alpha"),
        ({"alpha": 3, "u": 1}, "u + 3*alpha"),
    ],
)
def test_str(terms: dict[str, int], expected: str) -> None:
    paths = make_algebra(TOEPLITZ)
    assert str(element(paths, terms)) == expected


def test_truncated_inverse() -> None:
    paths = make_algebra(TOEPLITZ)
    x_u = paths.tower.var("u").value
    a = paths.one() - scale(x_u, paths.edge("alpha"))
    degree = 3

    inverse = invert_element(a, degree)

    assert str(inverse) == (
        "u + v + x_u*alpha + x_u**2*alpha.alpha + x_u**3*alpha.alpha.alpha + O(4)"
    )
    assert (a * inverse).agrees(paths.one(), degree)
    assert (inverse * a).agrees(paths.one(), degree)


@pytest.mark.parametrize(
    "terms",
    [
        {"alpha": 1},
        {"u": 1, "f": 1},
        {},
    ],
)
def test_not_invertible(terms: dict[str, int]) -> None:
    paths = make_algebra(TOEPLITZ)

    with pytest.raises(NotInvertible):
        invert_element(element(paths, terms), 4)


def test_truncation() -> None:
    paths = make_algebra(TOEPLITZ)
    series = pe_pow(paths.one() + paths.edge("alpha"), 3).truncate(1)

    assert str(series) == "u + v + 3*alpha + O(2)"
    assert not series.is_exact
    assert series.agrees(paths.one() + scale(3, paths.edge("alpha")), 1)


def test_augmentation_and_tau() -> None:
    paths = make_algebra(TOEPLITZ)
    a = element(paths, {"u": 2, "v": 5, "alpha": 1})
    f = paths.quiver.edge("f")

    assert augment(a).at("u") == paths.tower.field(2)
    assert augment(a).at("v") == paths.tower.field(5)
    assert str(tau(f, a)) == "2*v"


def test_transduction_strips_a_leading_edge() -> None:
    paths = make_algebra(TOEPLITZ)
    quiver = paths.quiver
    alpha = quiver.edge("alpha")
    a = paths.element({quiver.path("alpha", "alpha"): 1, quiver.path("alpha", "f"): 2})
    a = a + paths.vertex("u") + paths.edge("f")

    assert str(transduce(alpha, a)) == "alpha + 2*f"
    assert str(transduce(quiver.edge("f"), a)) == "v"


def test_right_derivation_law() -> None:
    paths = make_algebra(TOEPLITZ)
    r = element(paths, {"u": 2, "alpha": 1, "f": -1})
    s = element(paths, {"u": 1, "v": 3, "alpha": 4, "beta": 1})

    for e in paths.quiver.edges:
        assert check_right_derivation(e, r, s)


def test_matrix_inverse() -> None:
    paths = make_algebra(TOEPLITZ)
    one, zero, f = paths.one(), paths.zero(), paths.edge("f")
    m = matrix(paths, [[one, f], [zero, one]])
    degree = 4

    inverse = invert_eps_unit(m, degree)

    assert str(inverse) == "[[u + v + O(5), -f + O(5)], [0 + O(5), u + v + O(5)]]"
    assert mat_mul(m, inverse).agrees(identity(paths, 2), degree)


def test_geometric_inverse() -> None:
    paths = make_algebra(TOEPLITZ)
    b = matrix(paths, [[paths.edge("alpha")]])

    inverse = geometric_inverse(b, 2)

    assert str(inverse) == "[[u + v + alpha + alpha.alpha + O(3)]]"


def test_invertibility_criterion() -> None:
    paths = make_algebra(TOEPLITZ)
    alpha, one = paths.edge("alpha"), paths.one()

    assert is_invertible(matrix(paths, [[one + alpha]]))
    assert not is_invertible(matrix(paths, [[alpha]]))
    assert is_invertible(matrix(paths, [[paths.vertex("u")]]), vertices={"u"})

    with pytest.raises(NonSquare):
        is_invertible(matrix(paths, [[one, alpha]]))


def make_algebra(text: str) -> PathAlgebra:
    return PathAlgebra.over(parse_graph(text).poset())


def element(paths: PathAlgebra, terms: dict[str, int]) -> PathElement:
    quiver = paths.quiver
    return paths.element(
        {
            quiver.trivial(p) if quiver.has_vertex(p) else quiver.path(p): c
            for p, c in terms.items()
        }
    )
