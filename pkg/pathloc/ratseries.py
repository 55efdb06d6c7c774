"""
Rational series as linear representations `a = λ(I - B)^{-1}ρ` with `ε(B) = 0`.

Besides the ring operations on representations this module holds the constructive side of
the description of the rational closure: splitting `B` along a hereditary vertex set,
the factorizations of `(I - B)^{-1}` it gives, the corner formula for `p_H x`, the
independence test over a crossing edge and the recursive decomposition along the
component tree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import networkx as nx
from sympy.polys.matrices import DomainMatrix

from pathloc.errors import (
    AnchorMismatch,
    BadAugmentation,
    MismatchedCorner,
    NotCrossing,
    NotHereditary,
    SeriesError,
)
from pathloc.pathalg import (
    AlgMatrix,
    PathAlgebra,
    PathElement,
    SeriesTruncation,
    augment,
    exact,
    geometric_inverse,
    mat_add,
    mat_mul,
    matrix,
    pe_add,
    pe_filter,
    pe_mul,
    pe_neg,
    scale,
    zeros,
)
from pathloc.quiver import assert_tree

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

    from pathloc.pathalg import Coefficient
    from pathloc.quiver import ComponentPoset, Edge, Path
    from pathloc.scalars import Frac

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinRep:
    """
    A linear representation `(λ, B, ρ)` of dimension `n` over `P_K(E)`.

    `row` is `1×n`, `matrix` is `n×n` with `ε(matrix) = 0` and `column` is `n×1`; every
    entry is an exact path element.
    """

    algebra: PathAlgebra
    row: AlgMatrix
    matrix: AlgMatrix
    column: AlgMatrix

    def __post_init__(self) -> None:
        n = self.row.shape[1]
        if n < 1 or self.row.shape != (1, n) or self.matrix.shape != (n, n):
            msg = f"Inconsistent representation shapes {self.row.shape}, {self.matrix.shape}"
            raise SeriesError(msg)
        if self.column.shape != (n, 1):
            msg = f"Column of shape {self.column.shape} does not match dimension {n}"
            raise SeriesError(msg)

        for part in (self.row, self.matrix, self.column):
            if any(not x.is_exact for x in part.entries()):
                msg = "Representation entries must be exact path elements"
                raise SeriesError(msg)

        if any(not augment(x).is_zero for x in self.matrix.entries()):
            msg = "The transition matrix has a non-zero constant term"
            raise BadAugmentation(msg)

    @property
    def dimension(self) -> int:
        return self.row.shape[1]

    def entry(self, i: int, j: int) -> PathElement:
        return self.matrix.rows[i][j]

    @classmethod
    def from_entries(
        cls,
        algebra: PathAlgebra,
        row: Sequence[PathElement],
        transitions: Sequence[Sequence[PathElement]],
        column: Sequence[PathElement],
    ) -> LinRep:
        return cls(
            algebra,
            matrix(algebra, [row]),
            matrix(algebra, transitions),
            matrix(algebra, [[c] for c in column]),
        )

    @classmethod
    def constant(cls, p: PathElement) -> LinRep:
        "The polynomial `p`, as `p·(I - 0)^{-1}·1`."
        algebra = p.algebra
        return cls.from_entries(algebra, [exact(p)], [[algebra.zero()]], [algebra.one()])

    @classmethod
    def geometric(cls, lam: PathElement, b: PathElement, rho: PathElement) -> LinRep:
        "`λ(1 - b)^{-1}ρ` for a single element `b` with `ε(b) = 0`."
        return cls.from_entries(lam.algebra, [lam], [[b]], [rho])

    @classmethod
    def zero(cls, algebra: PathAlgebra) -> LinRep:
        return cls.constant(algebra.zero())

    def states(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.dimension))
        g.add_edges_from(
            (i, j)
            for i in range(self.dimension)
            for j in range(self.dimension)
            if not self.entry(i, j).is_zero
        )
        return g

    def restrict(self, keep: Sequence[int]) -> LinRep:
        "The representation on the states `keep`."
        algebra = self.algebra
        return LinRep.from_entries(
            algebra,
            [self.row.rows[0][i] for i in keep],
            [[self.entry(i, j) for j in keep] for i in keep],
            [self.column.rows[i][0] for i in keep],
        )

    def trim(self) -> LinRep:
        "Drop the states that are unreachable from `λ` or cannot reach `ρ`."
        g = self.states()
        starts = [i for i in range(self.dimension) if not self.row.rows[0][i].is_zero]
        ends = [j for j in range(self.dimension) if not self.column.rows[j][0].is_zero]

        forward = set(starts).union(*(nx.descendants(g, i) for i in starts))
        backward = set(ends).union(*(nx.ancestors(g, j) for j in ends))
        keep = sorted(forward & backward)

        if not keep:
            return LinRep.zero(self.algebra)
        if len(keep) == self.dimension:
            return self
        return self.restrict(keep)


def expand(r: LinRep, degree: int) -> SeriesTruncation:
    "`λ Σ_{k≤N} B^k ρ` modulo paths longer than `N`."
    vector = r.row.truncate(degree)
    total = mat_mul(vector, r.column)
    matrix_ = r.matrix.truncate(degree)

    for _ in range(degree):
        vector = mat_mul(vector, matrix_)
        if vector.is_zero:
            break
        total = mat_add(total, mat_mul(vector, r.column))

    return total.entry(0, 0).truncate(degree)


def coefficient(r: LinRep, p: Path) -> Frac:
    "The exact coefficient of one path."
    return expand(r, p.length).coefficient(p)


def _block_diagonal(algebra: PathAlgebra, a: AlgMatrix, b: AlgMatrix) -> AlgMatrix:
    n, m = a.shape[0], b.shape[0]
    rows = [(*a.rows[i], *zeros(algebra, 1, m).rows[0]) for i in range(n)]
    rows += [(*zeros(algebra, 1, n).rows[0], *b.rows[i]) for i in range(m)]
    return AlgMatrix(algebra, tuple(rows))


def rep_add(r1: LinRep, r2: LinRep) -> LinRep:
    algebra = r1.algebra
    return LinRep(
        algebra,
        AlgMatrix(algebra, ((*r1.row.rows[0], *r2.row.rows[0]),)),
        _block_diagonal(algebra, r1.matrix, r2.matrix),
        AlgMatrix(algebra, r1.column.rows + r2.column.rows),
    )


def rep_neg(r: LinRep) -> LinRep:
    return LinRep(r.algebra, r.row.map(pe_neg), r.matrix, r.column)


def rep_sub(r1: LinRep, r2: LinRep) -> LinRep:
    return rep_add(r1, rep_neg(r2))


def rep_mul(r1: LinRep, r2: LinRep) -> LinRep:
    """
    The product representation.

    With `C = ρ₁λ₂`, take `λ = (λ₁, λ₁C)`, `B = [[B₁, B₁C], [0, B₂]]` and `ρ = (0, ρ₂)`.
    Both blocks of the new row start with `λ₁` and `ε(B₁C) = 0`, so the result stays in
    the normalized form.
    """

    algebra = r1.algebra
    cross = mat_mul(r1.column, r2.row)
    n1, n2 = r1.dimension, r2.dimension
    shifted = mat_mul(r1.matrix, cross)

    top = [(*r1.matrix.rows[i], *shifted.rows[i]) for i in range(n1)]
    bottom = [(*zeros(algebra, 1, n1).rows[0], *r2.matrix.rows[i]) for i in range(n2)]

    return LinRep(
        algebra,
        AlgMatrix(algebra, ((*r1.row.rows[0], *mat_mul(r1.row, cross).rows[0]),)),
        AlgMatrix(algebra, tuple(top + bottom)),
        AlgMatrix(algebra, zeros(algebra, n1, 1).rows + r2.column.rows),
    )


def rep_scale(r: LinRep, c: Coefficient) -> LinRep:
    "The right scalar multiple `a·c`."
    return LinRep(r.algebra, r.row, r.matrix, r.column.map(lambda x: scale(c, x)))


def rep_left(p: PathElement, r: LinRep) -> LinRep:
    "`p·a` for a polynomial `p`."
    return LinRep(r.algebra, r.row.map(lambda x: pe_mul(p, x)), r.matrix, r.column)


def rep_right(r: LinRep, p: PathElement) -> LinRep:
    "`a·p` for a polynomial `p`."
    return LinRep(r.algebra, r.row, r.matrix, r.column.map(lambda x: pe_mul(x, p)))


def rep_anchor(r: LinRep, v: str) -> LinRep:
    "`a·v`, the part of `a` ending at `v`."
    return rep_right(r, r.algebra.vertex(v))


def _strip_last(e: Edge, a: PathElement) -> PathElement:
    "The coefficients of `γe`, moved to `γ`."
    algebra = a.algebra
    quiver = algebra.quiver
    terms = {}
    for p, c in a.terms.items():
        if p.is_trivial or p.edges[-1] != e.id:
            continue
        rest = quiver.trivial(e.source) if p.length == 1 else quiver.path(*p.edges[:-1])
        terms[rest] = c
    return algebra.element(terms)


def _sigma_last(e: Edge, a: PathElement) -> PathElement:
    "`ε(a)_{r(e)} · s(e)`."
    c = augment(a).at(e.range)
    if not c:
        return a.algebra.zero()
    return a.algebra.element({a.algebra.quiver.trivial(e.source): c})


def left_strip(e: Edge, r: LinRep) -> LinRep:
    """
    A representation of `d` with `a = d·e + (terms not ending in e)`.

    Stripping a trailing `e` obeys `∂(xy) = x∂(y) + ∂(x)σ(y)` with
    `σ(y) = ε(y)_{r(e)} s(e)`; since `σ(B) = 0` this gives
    `∂(a) = λ(I - B)^{-1}(∂ρ + ∂B·σ(ρ)) + ∂λ·σ(ρ)`.

    Raises `MembershipError` when the stripped coefficients do not lie in `K_{[s(e)]}`.
    """

    algebra = r.algebra
    sigma = r.column.map(lambda x: _sigma_last(e, x))
    strip_b = r.matrix.map(lambda x: _strip_last(e, x))
    column = mat_add(r.column.map(lambda x: _strip_last(e, x)), mat_mul(strip_b, sigma))
    main = LinRep(algebra, r.row, r.matrix, column)

    correction = mat_mul(r.row.map(lambda x: _strip_last(e, x)), sigma).entry(0, 0)
    if correction.is_zero:
        return main.trim()
    return rep_add(main, LinRep.constant(correction)).trim()


@dataclass(frozen=True)
class SupportSplit:
    """
    `B = B₁ + B₂` along a hereditary set `H`: `B₁` collects the paths ending outside `H`,
    `B₂` those ending inside. `B₂ = B₂′ + B₂″` splits again by where the paths start.
    """

    hereditary: frozenset[str]
    b1: AlgMatrix
    b2: AlgMatrix
    b2_out: AlgMatrix
    b2_in: AlgMatrix


def _matrix_filter(m: AlgMatrix, keep: Callable[[Path], bool]) -> AlgMatrix:
    return m.map(lambda x: pe_filter(x, keep))


def split_by_hereditary(b: AlgMatrix, hereditary: Iterable[str]) -> SupportSplit:
    h = frozenset(hereditary)
    quiver = b.algebra.quiver
    if not quiver.is_hereditary(h):
        msg = f"Vertex set {{{', '.join(sorted(h, key=quiver.vertex_key))}}} is not hereditary"
        raise NotHereditary(msg)
    if any(not augment(x).is_zero for x in b.entries()):
        msg = "Cannot split a matrix with non-zero augmentation"
        raise BadAugmentation(msg)

    b1 = _matrix_filter(b, lambda p: p.range not in h)
    b2 = _matrix_filter(b, lambda p: p.range in h)
    b2_out = _matrix_filter(b2, lambda p: p.source not in h)
    b2_in = _matrix_filter(b2, lambda p: p.source in h)

    checks = {
        "B₂B₁": mat_mul(b2, b1),
        "B₂″B₂′": mat_mul(b2_in, b2_out),
        "B₂′B₂′": mat_mul(b2_out, b2_out),
    }
    for name, product in checks.items():
        if not product.is_zero:
            msg = f"{name} is not zero for a hereditary split"
            raise SeriesError(msg)

    return SupportSplit(h, b1, b2, b2_out, b2_in)


def check_inverse_factorization(b: AlgMatrix, hereditary: Iterable[str], degree: int) -> bool:
    """
    `(I - B)^{-1} = (I - B₁)^{-1}(I - B₂)^{-1}` and
    `(I - B)^{-1} = (I - B₁)^{-1} + (I - B₁)^{-1}B₂(I - B₂)^{-1}`, modulo degree `N`.
    """

    split = split_by_hereditary(b, hereditary)
    whole = geometric_inverse(b, degree)
    first = geometric_inverse(split.b1, degree)
    second = geometric_inverse(split.b2, degree)

    product = mat_mul(first, second)
    expanded = mat_add(first, mat_mul(mat_mul(first, split.b2.truncate(degree)), second))
    return whole.agrees(product, degree) and whole.agrees(expanded, degree)


def _corner(p: PathElement, m: AlgMatrix) -> AlgMatrix:
    return m.map(lambda x: pe_mul(pe_mul(p, x), p))


def corner_formula(r: LinRep, hereditary: Iterable[str], degree: int) -> SeriesTruncation:
    """
    `p_H x = p_Hλp_H ρ p_H + p_Hλp_H B₂ p_H (I - B₂″)^{-1} p_H ρ p_H` modulo degree `N`.

    The right-hand side is compared with `p_H x p_H` from the expansion and returned.
    """

    algebra = r.algebra
    h = frozenset(hereditary)
    split = split_by_hereditary(r.matrix, h)
    p = algebra.p_set(h)

    lam = _corner(p, r.row)
    rho = _corner(p, r.column)
    b2 = split.b2.map(lambda x: pe_mul(x, p))
    inner = mat_mul(geometric_inverse(split.b2_in, degree), rho.truncate(degree))

    value = pe_add(
        mat_mul(lam, rho).entry(0, 0).truncate(degree),
        mat_mul(mat_mul(lam, b2), inner).entry(0, 0),
    ).truncate(degree)

    direct = pe_mul(pe_mul(p, expand(r, degree)), p)
    if not value.agrees(direct, degree):
        msg = f"Corner formula disagrees with p_H x p_H modulo degree {degree}"
        raise MismatchedCorner(msg)
    return value


@dataclass(frozen=True)
class CrossingCheck:
    applicable: bool
    independent: bool
    total: PathElement

    @property
    def holds(self) -> bool:
        "False when not applicable; otherwise independence forces a non-zero sum."
        if not self.applicable:
            return False
        return not self.independent or not self.total.is_zero


def independent_over_root(elements: Sequence[PathElement]) -> bool:
    """
    Linear independence over the root field `K_{i_0}`.

    After clearing a common denominator the coefficients are polynomials; splitting their
    monomials into the root variable and the rest gives vectors over `K_{i_0}`, whose
    rank decides independence.
    """

    if not elements:
        return True

    algebra = elements[0].algebra
    tower = algebra.tower
    field_ = tower.field
    root = tower.poset.classes.index(tower.root)

    denominator = field_.ring.one
    for a in elements:
        for c in a.terms.values():
            if not denominator.rem(c.denom).is_zero:
                denominator *= c.denom

    rows: list[dict[tuple[Path, tuple[int, ...]], Coefficient]] = []
    for a in elements:
        row: dict[tuple[Path, tuple[int, ...]], Coefficient] = {}
        for p, c in a.terms.items():
            numer = c.numer * denominator.exquo(c.denom)
            for monom, coeff in numer.terms():
                rest = tuple(0 if k == root else d for k, d in enumerate(monom))
                piece = field_(coeff) * field_.gens[root] ** monom[root]
                key = (p, rest)
                row[key] = row[key] + piece if key in row else piece
        rows.append(row)

    columns = sorted(
        {k for row in rows for k in row}, key=lambda k: (algebra.quiver.path_key(k[0]), k[1])
    )
    if not columns:
        return False

    entries = [[row.get(k, field_.zero) for k in columns] for row in rows]
    rank = DomainMatrix(entries, (len(rows), len(columns)), field_.to_domain()).rank()
    return rank == len(elements)


def crossing_independence_check(
    e: Edge,
    a: Sequence[PathElement],
    b: Sequence[PathElement],
    hereditary: Iterable[str] | None = None,
) -> CrossingCheck:
    """
    `Σ a_i e b_i ≠ 0` for `b_i ∈ r(e)P(E_H)` independent over `K_{i_0}`, when some
    `a_i e ≠ 0`.

    Truncations in `b` are read as the polynomials they store, for which the implication
    is exact. `H` defaults to the vertices reachable from `r(e)`.
    """

    algebra = b[0].algebra if b else a[0].algebra
    quiver = algebra.quiver
    h = quiver.reachable(e.range) if hereditary is None else frozenset(hereditary)

    if e.source in h or e.range not in h:
        msg = f"Edge {e.id} does not cross into the hereditary set"
        raise NotCrossing(msg)
    if len(a) != len(b):
        msg = "Expected as many left factors as right factors"
        raise SeriesError(msg)

    for x in b:
        if any(p.source != e.range or p.range not in h for p in x.terms):
            msg = f"Right factors must start at {e.range} and stay in H"
            raise AnchorMismatch(msg)

    edge = algebra.edge(e.id)
    left = [pe_mul(exact(x), edge) for x in a]
    applicable = any(not x.is_zero for x in left)

    total = algebra.zero()
    for x, y in zip(left, b, strict=True):
        total = pe_add(total, pe_mul(x, exact(y)))

    polys = [exact(y) for y in b]
    return CrossingCheck(applicable, independent_over_root(polys), total)


@dataclass(frozen=True)
class BranchTerm:
    """
    The part of `x` passing through the lower cover `component`:
    `Σ_j left_j · right_j` with `left_j = (λ(I - B₁)^{-1}B₂p_{H_k})_j` and
    `right_j = (p_{H_k}(I - B₂″)^{-1}ρ)_j`.
    """

    component: str
    left: tuple[LinRep, ...]
    right: tuple[RationalDecomposition, ...]


@dataclass(frozen=True)
class RationalDecomposition:
    """`x = λ(I - B₁)^{-1}ρ + Σ_k (branch k)` at the root of a (sub)tree."""

    root: str
    rep: LinRep
    head: LinRep
    branches: tuple[BranchTerm, ...]

    @property
    def depth(self) -> int:
        return max(
            (1 + d.depth for branch in self.branches for d in branch.right),
            default=0,
        )


def prat_membership_certificate(x: LinRep, poset: ComponentPoset) -> RationalDecomposition:
    """
    Decompose `x` along the tree `poset`.

    With `H` the vertices below the root, `(I - B)^{-1} = (I - B₁)^{-1}(I - B₂)^{-1}` and
    `B₂(I - B₂)^{-1} = B₂(I - B₂″)^{-1}` leave a head term over the root and one term per
    lower cover `i_k`, whose right factors are rational over `E_{I↓i_k}` and are
    decomposed in turn.
    """

    assert_tree(poset)
    algebra = x.algebra
    root = poset.root
    covers = poset.lower_covers(root)
    below = poset.vertices_of(c for c in poset.classes if c != root)

    split = split_by_hereditary(x.matrix, below)
    head = LinRep(algebra, x.row, split.b1, x.column).trim()
    branches: list[BranchTerm] = []

    for k in covers:
        h_k = poset.vertices_of(poset.lower_set(k))
        p_k = algebra.p_set(h_k)
        crossing = split.b2.map(lambda y, p=p_k: pe_mul(y, p))

        lefts: list[LinRep] = []
        rights: list[RationalDecomposition] = []
        for j in range(x.dimension):
            column = crossing.column(j)
            if column.is_zero:
                continue
            lefts.append(LinRep(algebra, x.row, split.b1, column).trim())

            unit = [p_k if t == j else algebra.zero() for t in range(x.dimension)]
            inner = split.b2_in.map(lambda y, p=p_k: pe_mul(p, y))
            right = LinRep(algebra, matrix(algebra, [unit]), inner, x.column).trim()
            rights.append(prat_membership_certificate(right, poset.subtree(k)))

        if lefts:
            branches.append(BranchTerm(k, tuple(lefts), tuple(rights)))

    log.debug("decomposed at %s into %d branch term(s)", root, len(branches))
    return RationalDecomposition(root, x, head, tuple(branches))


def decomposition_value(d: RationalDecomposition, degree: int) -> SeriesTruncation:
    "The sum the decomposition stands for, with each right factor rebuilt from its parts."
    total = expand(d.head, degree)
    for branch in d.branches:
        for left, right in zip(branch.left, branch.right, strict=True):
            total = pe_add(total, pe_mul(expand(left, degree), decomposition_value(right, degree)))
    return total.truncate(degree)


def verify_decomposition(d: RationalDecomposition, degree: int) -> bool:
    "Every level of the decomposition sums back to its series modulo degree `N`."
    if not decomposition_value(d, degree).agrees(expand(d.rep, degree), degree):
        return False
    return all(
        verify_decomposition(right, degree) for branch in d.branches for right in branch.right
    )


def branch_supports(d: RationalDecomposition, degree: int) -> dict[str, frozenset[Path]]:
    "The paths each branch term contributes, modulo degree `N`."
    supports: dict[str, frozenset[Path]] = {}
    for branch in d.branches:
        paths: set[Path] = set()
        for left, right in zip(branch.left, branch.right, strict=True):
            paths |= set(pe_mul(expand(left, degree), expand(right.rep, degree)).terms)
        supports[branch.component] = frozenset(paths)
    return supports

