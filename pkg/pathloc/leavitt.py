"""
The Leavitt path algebra `L_K(E)` over a poset of fields.

Elements are kept as `Σ c·γμ*` over pairs of paths with `r(γ) = r(μ)`. Products contract
`μ*γ′` with (V), (E1), (E2) and (CK1); the normal form then removes every monomial
`γe₀(μe₀)*` where `e₀` is the designated edge of its source, using (CK2).
"""

from __future__ import annotations

import logging
import random
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, override

from pathloc.errors import ReductionFuelExhausted, SinkVertex
from pathloc.pathalg import PathAlgebra, format_terms

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

    from pathloc.pathalg import Coefficient, PathElement
    from pathloc.quiver import Edge, Path, Quiver
    from pathloc.scalars import Amalgamation, Frac

log = logging.getLogger(__name__)

type Monomial = tuple[Path, Path]


@dataclass(frozen=True, eq=False)
class LeavittAlgebra:
    """Generators and the normal form of `L_K(E)` for one path algebra."""

    paths: PathAlgebra

    @property
    def quiver(self) -> Quiver:
        return self.paths.quiver

    @cached_property
    def _designated(self) -> dict[str, Edge | None]:
        poset = self.paths.poset
        chosen: dict[str, Edge | None] = {}
        for v in self.quiver.vertices:
            out = self.quiver.out_edges(v)
            inside = [e for e in out if poset.class_of(e.range) == poset.class_of(v)]
            chosen[v] = (inside or out or [None])[-1]
        return chosen

    def designated(self, v: str) -> Edge | None:
        """
        The edge of `s^{-1}(v)` that (CK2) eliminates: the last one in file order staying in
        `[v]`, or the last one when every edge leaves `[v]`.
        """
        return self._designated[v]

    def element(self, terms: Mapping[Monomial, Coefficient]) -> LeavittElement:
        values = {m: self.paths.coefficient_value(c) for m, c in terms.items()}
        for (gamma, _), c in values.items():
            self.paths.check_terms({gamma: c})
        return normal_form(self, values.items())

    def zero(self) -> LeavittElement:
        return LeavittElement(self, {})

    def one(self) -> LeavittElement:
        return self.from_paths(self.paths.one())

    def vertex(self, v: str) -> LeavittElement:
        t = self.quiver.trivial(v)
        return LeavittElement(self, {(t, t): self.paths.tower.field.one})

    def path(self, p: Path) -> LeavittElement:
        return self.element({(p, self.quiver.trivial(p.range)): 1})

    def ghost_path(self, p: Path) -> LeavittElement:
        "`p*`."
        return self.element({(self.quiver.trivial(p.range), p): 1})

    def edge(self, e: str) -> LeavittElement:
        return self.path(self.quiver.path(e))

    def ghost(self, e: str) -> LeavittElement:
        return self.ghost_path(self.quiver.path(e))

    def from_paths(self, a: PathElement) -> LeavittElement:
        "The image of a path-algebra element."
        terms = {(p, self.quiver.trivial(p.range)): c for p, c in a.terms.items()}
        return normal_form(self, terms.items())


@dataclass(frozen=True, eq=False)
class LeavittElement:
    algebra: LeavittAlgebra
    terms: Mapping[Monomial, Frac]

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[Monomial, Frac]]:
        key = self.algebra.quiver.path_key

        def order(item: tuple[Monomial, Frac]) -> tuple[object, ...]:
            (gamma, mu), _ = item
            return (gamma.length + mu.length, key(gamma), key(mu))

        return sorted(self.terms.items(), key=order)

    def __add__(self, other: LeavittElement) -> LeavittElement:
        return le_add(self, other)

    def __sub__(self, other: LeavittElement) -> LeavittElement:
        return le_add(self, le_neg(other))

    def __neg__(self) -> LeavittElement:
        return le_neg(self)

    def __mul__(self, other: LeavittElement) -> LeavittElement:
        return le_mul(self, other)

    @override
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LeavittElement):
            return NotImplemented
        return dict(self.terms) == dict(other.terms)

    __hash__ = None  # type: ignore[assignment]

    @override
    def __str__(self) -> str:
        return format_terms(
            [(MonomialText(gamma, mu), c) for (gamma, mu), c in self.sorted_terms()]
        )


@dataclass(frozen=True)
class MonomialText:
    gamma: Path
    mu: Path

    @override
    def __str__(self) -> str:
        if self.gamma.is_trivial and self.mu.is_trivial:
            return self.gamma.source
        pieces = [*self.gamma.edges, *(f"~{e}" for e in reversed(self.mu.edges))]
        return ".".join(pieces)


def _reduce_once(
    algebra: LeavittAlgebra, monomial: Monomial, c: Frac
) -> list[tuple[Monomial, Frac]] | None:
    "One (CK2) step on `c·γe₀(μe₀)*`, or None when the monomial is already reduced."
    gamma, mu = monomial
    if gamma.is_trivial or mu.is_trivial or gamma.edges[-1] != mu.edges[-1]:
        return None

    quiver = algebra.quiver
    last = quiver.edge(gamma.edges[-1])
    v = last.source
    if algebra.designated(v) != last:
        return None

    tower = algebra.paths.tower
    if not tower.fits(c, algebra.paths.poset.class_of(v)):
        return None

    def prefix(p: Path) -> Path:
        return quiver.trivial(v) if p.length == 1 else quiver.path(*p.edges[:-1])

    g, m = prefix(gamma), prefix(mu)
    result = [((g, m), c)]
    for e in quiver.out_edges(v):
        if e == last:
            continue
        tail = quiver.path(e.id)
        result.append(((quiver.concat(g, tail), quiver.concat(m, tail)), -c))
    return result


def normal_form(
    algebra: LeavittAlgebra,
    terms: Iterable[tuple[Monomial, Frac]],
    rng: random.Random | None = None,
    fuel: int | None = None,
) -> LeavittElement:
    """
    Reduce a combination of monomials with (CK2).

    `rng` picks the next monomial at random instead of in order; `fuel` bounds the number of
    rewriting steps and raises `ReductionFuelExhausted` when spent.
    """

    work = [(m, c) for m, c in terms if c]
    done: dict[Monomial, Frac] = defaultdict(lambda: algebra.paths.tower.field.zero)
    steps = 0

    while work:
        index = rng.randrange(len(work)) if rng is not None else len(work) - 1
        work[index], work[-1] = work[-1], work[index]
        monomial, c = work.pop()

        reduced = _reduce_once(algebra, monomial, c)
        if reduced is None:
            done[monomial] += c
            continue

        steps += 1
        if fuel is not None and steps > fuel:
            msg = f"Reduction did not finish within {fuel} steps"
            raise ReductionFuelExhausted(msg)
        work.extend(reduced)

    log.debug("normal form after %d rewriting steps", steps)
    return LeavittElement(algebra, {m: c for m, c in done.items() if c})


def le_add(a: LeavittElement, b: LeavittElement) -> LeavittElement:
    terms: dict[Monomial, Frac] = dict(a.terms)
    for m, c in b.terms.items():
        terms[m] = terms[m] + c if m in terms else c
    return LeavittElement(a.algebra, {m: c for m, c in terms.items() if c})


def le_neg(a: LeavittElement) -> LeavittElement:
    return LeavittElement(a.algebra, {m: -c for m, c in a.terms.items()})


def le_scale(c: Coefficient, a: LeavittElement) -> LeavittElement:
    value = a.algebra.paths.coefficient_value(c)
    for (gamma, _), x in a.terms.items():
        a.algebra.paths.check_terms({gamma: value * x})
    return LeavittElement(a.algebra, {m: value * x for m, x in a.terms.items() if value * x})


def contract(quiver: Quiver, left: Monomial, right: Monomial) -> Monomial | None:
    """
    `(γμ*)(γ′μ′*)` as a single monomial.

    `μ*γ′` is `ρ` when `γ′ = μρ`, `κ*` when `μ = γ′κ`, and zero otherwise.
    """

    gamma, mu = left
    gamma2, mu2 = right
    if mu.source != gamma2.source:
        return None

    if gamma2.edges[: mu.length] == mu.edges:
        rest = gamma2.edges[mu.length :]
        rho = quiver.path(*rest) if rest else quiver.trivial(mu.range)
        return (_join(quiver, gamma, rho), mu2)

    if mu.edges[: gamma2.length] == gamma2.edges:
        rest = mu.edges[gamma2.length :]
        kappa = quiver.path(*rest) if rest else quiver.trivial(gamma2.range)
        return (gamma, _join(quiver, mu2, kappa))

    return None


def _join(quiver: Quiver, p: Path, q: Path) -> Path:
    joined = quiver.concat(p, q)
    if joined is None:
        msg = f"Paths {p} and {q} do not compose"
        raise ValueError(msg)
    return joined


def le_mul(
    a: LeavittElement, b: LeavittElement, rng: random.Random | None = None
) -> LeavittElement:
    quiver = a.algebra.quiver
    products: list[tuple[Monomial, Frac]] = []

    for left, x in a.terms.items():
        for right, y in b.terms.items():
            monomial = contract(quiver, left, right)
            if monomial is not None:
                products.append((monomial, x * y))

    return normal_form(a.algebra, products, rng)


def star(a: LeavittElement) -> LeavittElement:
    "The involution `(c·γμ*)* = c·μγ*`."
    return LeavittElement(a.algebra, {(mu, gamma): c for (gamma, mu), c in a.terms.items()})


def le_pow(a: LeavittElement, k: int) -> LeavittElement:
    result = a.algebra.one()
    for _ in range(k):
        result = le_mul(result, a)
    return result


@dataclass(frozen=True)
class ProjectiveWitness:
    """
    `Y = (e_1 ... e_n)` and `X = (e_1*, ..., e_n*)ᵀ` for `s^{-1}(v) = {e_1, ..., e_n}`,
    with `YX = v` and `XY = diag(r(e_1), ..., r(e_n))` computed in `L_K(E)`.
    """

    vertex: str
    edges: tuple[Edge, ...]
    row_column: LeavittElement
    column_row: tuple[tuple[LeavittElement, ...], ...]

    @property
    def verified(self) -> bool:
        algebra = self.row_column.algebra
        if self.row_column != algebra.vertex(self.vertex):
            return False

        for i, e in enumerate(self.edges):
            for j in range(len(self.edges)):
                expected = algebra.vertex(e.range) if i == j else algebra.zero()
                if self.column_row[i][j] != expected:
                    return False
        return True

    def ranges(self) -> tuple[str, ...]:
        return tuple(e.range for e in self.edges)


def projective_witness(algebra: LeavittAlgebra, v: str) -> ProjectiveWitness:
    edges = algebra.quiver.out_edges(v)
    if not edges:
        msg = f"Vertex {v} is a sink and has no projective witness"
        raise SinkVertex(msg)

    row = [algebra.edge(e.id) for e in edges]
    column = [algebra.ghost(e.id) for e in edges]

    row_column = algebra.zero()
    for y, x in zip(row, column, strict=True):
        row_column = le_add(row_column, le_mul(y, x))

    column_row = tuple(tuple(le_mul(x, y) for y in row) for x in column)
    return ProjectiveWitness(v, edges, row_column, column_row)


def map_coefficients(
    x: LeavittElement, amalgamation: Amalgamation, target: LeavittAlgebra | None = None
) -> LeavittElement:
    """`φ(Σ c·γμ*) = Σ φ_{[r(γ)]}(c)·γμ*` into the constant system."""

    source = x.algebra
    if target is None:
        paths = source.paths
        target = LeavittAlgebra(PathAlgebra(paths.poset, amalgamation.tower.constant()))

    poset = source.paths.poset
    terms = [
        (m, amalgamation.embed(poset.class_of(m[0].range), c)) for m, c in x.terms.items()
    ]
    return normal_form(target, terms)


@dataclass(frozen=True)
class RelationCheck:
    family: str
    label: str
    holds: bool


def check_defining_relations(algebra: LeavittAlgebra) -> tuple[RelationCheck, ...]:
    "Evaluate (V), (E1), (E2), (CK1) and (CK2) on every applicable generator."
    quiver = algebra.quiver
    checks: list[RelationCheck] = []

    def record(family: str, label: str, lhs: LeavittElement, rhs: LeavittElement) -> None:
        checks.append(RelationCheck(family, label, lhs == rhs))

    for v in quiver.vertices:
        for w in quiver.vertices:
            expected = algebra.vertex(v) if v == w else algebra.zero()
            record("V", f"{v}·{w}", algebra.vertex(v) * algebra.vertex(w), expected)

    for e in quiver.edges:
        edge = algebra.edge(e.id)
        record("E1", f"{e.source}·{e.id}", algebra.vertex(e.source) * edge, edge)
        record("E1", f"{e.id}·{e.range}", edge * algebra.vertex(e.range), edge)

    for e in quiver.edges:
        ghost = algebra.ghost(e.id)
        record("E2", f"{e.range}·~{e.id}", algebra.vertex(e.range) * ghost, ghost)
        record("E2", f"~{e.id}·{e.source}", ghost * algebra.vertex(e.source), ghost)

    for e in quiver.edges:
        for f in quiver.edges:
            expected = algebra.vertex(e.range) if e == f else algebra.zero()
            record("CK1", f"~{e.id}·{f.id}", algebra.ghost(e.id) * algebra.edge(f.id), expected)

    for v in quiver.vertices:
        if quiver.is_sink(v):
            continue
        total = algebra.zero()
        for e in quiver.out_edges(v):
            total = total + algebra.edge(e.id) * algebra.ghost(e.id)
        record("CK2", f"Σ e·~e at {v}", total, algebra.vertex(v))

    return tuple(checks)
