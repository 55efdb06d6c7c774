import random

import pytest

from pathloc.errors import (
    BadAugmentation,
    NotApplicable,
    NotFreeLoopComponent,
    NotInvertible,
    ZeroConstantTerm,
)
from pathloc.graphfile import parse_graph
from pathloc.pathalg import PathAlgebra, PathElement, matrix, pe_mul, scale
from pathloc.qalg import (
    QAlgebra,
    check_q_relations,
    check_sigma_prime_factorization,
    determinant_remark_check,
    invert_free_polynomial,
    q_add,
    q_equal,
    q_from_leavitt,
    q_inverse_of,
    q_mul,
    q_polynomial,
    q_star,
    q_to_leavitt,
    sigma_prime_decompose,
    sigma_prime_member,
)
from pathloc.ratseries import expand
from pathloc.suites import Sampler

ROSE = "vertex w\nedge e1 w w\nedge e2 w w\n"
TOEPLITZ = "vertex u\nvertex v\nedge alpha u u\nedge f u v\nedge beta v v\n"
TREE = "vertex r\nvertex a\nvertex b\nedge rho r r\nedge g r a\nedge h r b\nedge alpha a a\n"
SHAPED = (
    "vertex u\nvertex w\nedge alpha u u\nedge f u w\nedge e1 w w\nedge e2 w w\n"
    "free u\nregular w\n"
)
DEGREE = 6


@pytest.mark.parametrize("text", [ROSE, TOEPLITZ, TREE])
def test_relations_hold_in_the_regular_algebra(text: str) -> None:
    checks = check_q_relations(make_algebra(text), DEGREE)

    assert checks
    assert all(c.holds for c in checks), [c for c in checks if not c.holds]


def test_cuntz_krieger_normal_form() -> None:
    algebra = make_algebra(ROSE)
    quiver = algebra.paths.quiver

    product = q_mul(algebra.edge("e2"), algebra.ghost("e2"), DEGREE)

    assert set(product.terms) == {quiver.trivial("w"), quiver.path("e1")}
    assert str(expand(product.terms[quiver.path("e1")], DEGREE)) == f"-e1 + O({DEGREE + 1})"
    assert str(q_to_leavitt(product)) == "w - e1.~e1"

    total = q_add(product, q_mul(algebra.edge("e1"), algebra.ghost("e1"), DEGREE))
    assert q_equal(total, algebra.vertex("w"), DEGREE)


@pytest.mark.parametrize("text", [ROSE, TOEPLITZ, TREE])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_product_is_associative(text: str, seed: int) -> None:
    algebra = make_algebra(text)
    sampler = Sampler(algebra.paths, random.Random(seed))  # noqa: S311
    x, y, z = (sampler.q_element(algebra) for _ in range(3))

    left = q_mul(q_mul(x, y, DEGREE), z, DEGREE)
    right = q_mul(x, q_mul(y, z, DEGREE), DEGREE)

    assert q_equal(left, right, DEGREE - 2)


def test_vertices_and_edges_print_as_polynomials() -> None:
    algebra = make_algebra(TOEPLITZ)

    assert str(algebra.vertex("u")) == "u"
    assert str(algebra.edge("f")) == "f"
    assert str(algebra.zero()) == "0"


def test_ghost_commutes_past_coefficients() -> None:
    algebra = make_algebra(ROSE)

    product = q_mul(algebra.ghost("e1"), algebra.edge("e1"), DEGREE)
    assert q_equal(product, algebra.vertex("w"), DEGREE)

    product = q_mul(algebra.ghost("e1"), algebra.edge("e2"), DEGREE)
    assert q_equal(product, algebra.zero(), DEGREE)


def test_inverse_of_a_polynomial() -> None:
    algebra = make_algebra(TOEPLITZ)
    paths = algebra.paths
    x_u = paths.tower.var("u")
    p = paths.one() - scale(x_u, paths.edge("alpha"))

    inverse = algebra.embed_rational(q_inverse_of(p))

    assert q_equal(q_mul(algebra.embed_path(p), inverse, DEGREE), algebra.one(), DEGREE)
    assert q_equal(q_mul(inverse, algebra.embed_path(p), DEGREE), algebra.one(), DEGREE)


def test_polynomial_without_augmentation_is_not_invertible() -> None:
    paths = make_algebra(TOEPLITZ).paths

    with pytest.raises(NotInvertible):
        q_inverse_of(paths.edge("alpha"))


def test_leavitt_round_trip_and_involution() -> None:
    algebra = make_algebra(ROSE)
    x = q_mul(algebra.edge("e1"), algebra.ghost("e2"), DEGREE)

    leavitt = q_to_leavitt(x)
    assert str(leavitt) == "e1.~e2"
    assert q_equal(q_from_leavitt(algebra, leavitt), x, DEGREE)
    assert q_equal(q_star(algebra.edge("e1")), algebra.ghost("e1"), DEGREE)


def test_polynomial_view() -> None:
    algebra = make_algebra(TOEPLITZ)

    assert str(q_polynomial(algebra.edge("f"))) == "f"

    with pytest.raises(NotApplicable):
        q_polynomial(algebra.ghost("f"))


def test_invert_free_polynomial() -> None:
    paths = make_algebra(TOEPLITZ).paths
    p = loop_polynomial(paths, [2, -1, 3])

    inverse = expand(invert_free_polynomial("u", p, 8), 8)

    assert pe_mul(p, inverse).agrees(paths.vertex("u"), 8)
    assert pe_mul(inverse, p).agrees(paths.vertex("u"), 8)


def test_invert_free_polynomial_errors() -> None:
    paths = make_algebra(TOEPLITZ).paths

    with pytest.raises(ZeroConstantTerm):
        invert_free_polynomial("u", loop_polynomial(paths, [0, 1]))

    with pytest.raises(NotFreeLoopComponent):
        invert_free_polynomial("u", paths.vertex("u") + paths.edge("f"))

    rose = make_algebra(ROSE).paths
    with pytest.raises(NotFreeLoopComponent):
        invert_free_polynomial("w", rose.vertex("w"))


def test_determinant_remark() -> None:
    paths = make_algebra(TOEPLITZ).paths
    alpha = paths.edge("alpha")
    a = matrix(paths, [[alpha, pe_mul(alpha, alpha)], [scale(2, alpha), paths.zero()]])

    remark = determinant_remark_check("u", a)

    assert remark.constant_is_one
    assert str(remark.determinant) == "u - alpha - 2*alpha.alpha.alpha"


def test_sigma_prime_decomposition() -> None:
    paths = make_algebra(TOEPLITZ).paths
    alpha, f, beta = paths.edge("alpha"), paths.edge("f"), paths.edge("beta")
    a = matrix(paths, [[alpha + pe_mul(f, beta), f], [paths.zero(), beta]])

    d = sigma_prime_decompose(a, paths.poset)

    assert d.root == "u"
    assert str(d.a0) == "[[alpha, 0], [0, 0]]"
    assert str(d.b) == "[[f.beta, f], [0, 0]]"
    assert [k for k, _ in d.parts] == ["v"]
    assert str(d.parts[0][1].matrix) == "[[0, 0], [0, beta]]"
    assert check_sigma_prime_factorization(d, DEGREE)


def test_sigma_prime_over_a_tree() -> None:
    paths = make_algebra(TREE).paths
    rho, g, h, alpha = (paths.edge(e) for e in ("rho", "g", "h", "alpha"))
    a = matrix(paths, [[rho + g, h], [pe_mul(g, alpha), alpha]])

    d = sigma_prime_decompose(a, paths.poset)

    assert [k for k, _ in d.parts] == ["a", "b"]
    assert check_sigma_prime_factorization(d, DEGREE)


def test_sigma_prime_needs_zero_augmentation() -> None:
    paths = make_algebra(TOEPLITZ).paths

    with pytest.raises(BadAugmentation):
        sigma_prime_decompose(matrix(paths, [[paths.one()]]), paths.poset)


@pytest.mark.parametrize(
    ("component", "entry", "expected"),
    [
        ("u", {"u": 2, "alpha": 1}, True),
        ("u", {"alpha": 1}, False),
        ("u", {"u": 1, "f": 1}, False),
        ("w", {"w": 1, "e1": 1}, True),
        ("w", {"e1": 1}, False),
        ("w", {"f": 1}, False),
    ],
)
def test_sigma_prime_membership(component: str, entry: dict[str, int], expected: bool) -> None:
    spec = parse_graph(SHAPED)
    poset = spec.poset()
    paths = PathAlgebra.over(poset)
    quiver = paths.quiver
    x = paths.element(
        {quiver.trivial(p) if quiver.has_vertex(p) else quiver.path(p): c for p, c in entry.items()}
    )

    assert sigma_prime_member(matrix(paths, [[x]]), component, spec.shape(poset)) is expected


def make_algebra(text: str) -> QAlgebra:
    return QAlgebra(PathAlgebra.over(parse_graph(text).poset()), DEGREE)


def loop_polynomial(paths: PathAlgebra, coefficients: list[int]) -> PathElement:
    quiver = paths.quiver
    terms = {
        quiver.trivial("u") if k == 0 else quiver.path(*["alpha"] * k): c
        for k, c in enumerate(coefficients)
    }
    return paths.element(terms)
