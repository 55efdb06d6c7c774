import pytest

from pathloc.errors import (
    AnchorMismatch,
    BadAugmentation,
    NotCrossing,
    NotHereditary,
    SeriesError,
)
from pathloc.graphfile import parse_graph
from pathloc.pathalg import PathAlgebra, matrix, pe_mul, scale
from pathloc.ratseries import (
    LinRep,
    branch_supports,
    check_inverse_factorization,
    coefficient,
    corner_formula,
    crossing_independence_check,
    expand,
    independent_over_root,
    left_strip,
    prat_membership_certificate,
    rep_add,
    rep_mul,
    rep_neg,
    rep_scale,
    split_by_hereditary,
    verify_decomposition,
)

TOEPLITZ = "vertex u\nvertex v\nedge alpha u u\nedge f u v\nedge beta v v\n"
DEGREE = 5


def test_expand_geometric_series() -> None:
    paths = make_algebra(TOEPLITZ)
    r = LinRep.geometric(paths.one(), paths.edge("alpha"), paths.one())

    assert str(expand(r, 3)) == "u + v + alpha + alpha.alpha + alpha.alpha.alpha + O(4)"
    assert coefficient(r, paths.quiver.path("alpha", "alpha")) == paths.tower.field.one
    assert not coefficient(r, paths.quiver.path("f"))


def test_ring_operations_agree_with_series() -> None:
    paths = make_algebra(TOEPLITZ)
    r1 = LinRep.geometric(paths.one(), paths.edge("alpha"), paths.one())
    r2 = LinRep.geometric(paths.one(), paths.edge("f") + paths.edge("beta"), paths.vertex("v"))
    a1, a2 = expand(r1, DEGREE), expand(r2, DEGREE)

    assert expand(rep_add(r1, r2), DEGREE).agrees(a1 + a2, DEGREE)
    assert expand(rep_mul(r1, r2), DEGREE).agrees(pe_mul(a1, a2), DEGREE)
    assert expand(rep_mul(r2, r1), DEGREE).agrees(pe_mul(a2, a1), DEGREE)
    assert expand(rep_add(r1, rep_neg(r1)), DEGREE).is_zero
    assert expand(rep_scale(r1, 3), DEGREE).agrees(scale(3, a1), DEGREE)


def test_transition_matrix_needs_zero_augmentation() -> None:
    paths = make_algebra(TOEPLITZ)

    with pytest.raises(BadAugmentation):
        LinRep.geometric(paths.one(), paths.one(), paths.one())


def test_shapes_must_match() -> None:
    paths = make_algebra(TOEPLITZ)
    zero, one = paths.zero(), paths.one()

    with pytest.raises(SeriesError):
        LinRep(
            paths,
            matrix(paths, [[one, one]]),
            matrix(paths, [[zero]]),
            matrix(paths, [[one]]),
        )


def test_trim_drops_dead_states() -> None:
    paths = make_algebra(TOEPLITZ)
    r = LinRep.geometric(paths.one(), paths.edge("alpha"), paths.one())
    padded = rep_add(r, LinRep.zero(paths))

    assert padded.dimension == 2  # noqa: PLR2004
    assert padded.trim().dimension == 1
    assert expand(padded.trim(), DEGREE).agrees(expand(r, DEGREE), DEGREE)


def test_left_strip() -> None:
    paths = make_algebra(TOEPLITZ)
    quiver = paths.quiver
    f = quiver.edge("f")
    lam = paths.one()
    r = LinRep.geometric(lam, paths.edge("alpha"), paths.edge("f") + paths.vertex("v"))

    d = left_strip(f, r)

    expected = LinRep.geometric(lam, paths.edge("alpha"), paths.vertex("u"))
    assert expand(d, DEGREE).agrees(expand(expected, DEGREE), DEGREE)


def test_split_needs_a_hereditary_set() -> None:
    paths = make_algebra(TOEPLITZ)
    b = matrix(paths, [[paths.edge("f")]])

    with pytest.raises(NotHereditary):
        split_by_hereditary(b, {"u"})

    split = split_by_hereditary(b, {"v"})
    assert split.b1.is_zero
    assert split.b2_out.same_as(b)
    assert split.b2_in.is_zero


def test_inverse_factorization() -> None:
    paths = make_algebra(TOEPLITZ)
    alpha, f, beta = paths.edge("alpha"), paths.edge("f"), paths.edge("beta")
    b = matrix(paths, [[alpha + f, pe_mul(f, beta)], [paths.zero(), beta]])

    assert check_inverse_factorization(b, {"v"}, DEGREE)
    assert check_inverse_factorization(b, {"u", "v"}, DEGREE)


def test_corner_formula() -> None:
    paths = make_algebra(TOEPLITZ)
    r = sample_rep(paths)
    p = paths.p_set({"v"})

    value = corner_formula(r, {"v"}, DEGREE)

    assert value.agrees(pe_mul(pe_mul(p, expand(r, DEGREE)), p), DEGREE)


def test_crossing_independence() -> None:
    paths = make_algebra(TOEPLITZ)
    f = paths.quiver.edge("f")
    left = [paths.vertex("u"), paths.edge("alpha")]
    right = [paths.vertex("v"), paths.edge("beta")]

    check = crossing_independence_check(f, left, right)

    assert check.applicable
    assert check.independent
    assert not check.total.is_zero
    assert check.holds


def test_crossing_errors() -> None:
    paths = make_algebra(TOEPLITZ)
    quiver = paths.quiver

    with pytest.raises(NotCrossing):
        crossing_independence_check(quiver.edge("alpha"), [paths.vertex("u")], [paths.vertex("u")])

    with pytest.raises(AnchorMismatch):
        crossing_independence_check(quiver.edge("f"), [paths.vertex("u")], [paths.edge("alpha")])


def test_independence_over_the_root_field() -> None:
    paths = make_algebra(TOEPLITZ)
    v = paths.vertex("v")
    x_u, x_v = paths.tower.var("u"), paths.tower.var("v")

    assert independent_over_root([v, paths.edge("beta")])
    assert not independent_over_root([v, scale(x_u, v)])
    assert independent_over_root([v, scale(x_v, v)])
    assert not independent_over_root([paths.zero()])


def test_membership_certificate() -> None:
    paths = make_algebra(TOEPLITZ)
    r = sample_rep(paths)

    d = prat_membership_certificate(r, paths.poset)

    assert d.root == "u"
    assert [b.component for b in d.branches] == ["v"]
    assert d.depth == 1
    assert verify_decomposition(d, DEGREE)

    supports = branch_supports(d, DEGREE)
    assert all(p.range == "v" for p in supports["v"])


def make_algebra(text: str) -> PathAlgebra:
    return PathAlgebra.over(parse_graph(text).poset())


def sample_rep(paths: PathAlgebra) -> LinRep:
    alpha, f, beta = paths.edge("alpha"), paths.edge("f"), paths.edge("beta")
    b = matrix(paths, [[alpha, f], [paths.zero(), beta]])
    return LinRep(
        paths,
        matrix(paths, [[paths.vertex("u"), paths.vertex("u")]]),
        b,
        matrix(paths, [[paths.vertex("u") + f], [paths.vertex("v")]]),
    )
