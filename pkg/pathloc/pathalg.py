from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, override

from sympy.polys.matrices import DomainMatrix

from pathloc.errors import MembershipError, NonSquare, NotInvertible
from pathloc.scalars import FieldScalar, FieldTower, Frac
from pathloc.utils import join_commas

if TYPE_CHECKING:
    from pathloc.quiver import ComponentPoset, Edge, Path, Quiver

log = logging.getLogger(__name__)

type Coefficient = Frac | FieldScalar | int


@dataclass(frozen=True, eq=False)
class PathAlgebra:
    """`P_K(E)` and its truncated power series over a poset of fields."""

    poset: ComponentPoset
    tower: FieldTower

    @classmethod
    def over(cls, poset: ComponentPoset, *, constant: bool = False) -> PathAlgebra:
        return cls(poset, FieldTower(poset, is_constant=constant))

    @property
    def quiver(self) -> Quiver:
        return self.poset.quiver

    def range_class(self, p: Path) -> str:
        return self.poset.class_of(p.range)

    def coefficient_value(self, c: Coefficient) -> Frac:
        if isinstance(c, FieldScalar):
            return c.value
        if isinstance(c, int):
            return self.tower.field(c)
        return c

    def check_terms(self, terms: Mapping[Path, Frac]) -> None:
        "Enforce `a_γ ∈ K_{[r(γ)]}`."
        for p, c in terms.items():
            if not self.tower.fits(c, self.range_class(p)):
                msg = f"Coefficient {c} of {p} does not lie in K_{self.range_class(p)}"
                raise MembershipError(msg)

    def element(self, terms: Mapping[Path, Coefficient]) -> PathElement:
        values = {p: self.coefficient_value(c) for p, c in terms.items()}
        cleaned = {p: c for p, c in values.items() if c}
        self.check_terms(cleaned)
        return PathElement(self, cleaned)

    def series(self, terms: Mapping[Path, Coefficient], degree: int) -> SeriesTruncation:
        values = {p: self.coefficient_value(c) for p, c in terms.items()}
        cleaned = {p: c for p, c in values.items() if c and p.length <= degree}
        self.check_terms(cleaned)
        return SeriesTruncation(self, cleaned, degree)

    def zero(self) -> PathElement:
        return PathElement(self, {})

    def one(self) -> PathElement:
        "The unit `Σ v`."
        return self.p_set(self.quiver.vertices)

    def p_set(self, vertices: Iterable[str]) -> PathElement:
        "The idempotent `p_H = Σ_{v∈H} v`."
        one = self.tower.field.one
        return PathElement(self, {self.quiver.trivial(v): one for v in vertices})

    def vertex(self, v: str) -> PathElement:
        return PathElement(self, {self.quiver.trivial(v): self.tower.field.one})

    def edge(self, e: str) -> PathElement:
        return PathElement(self, {self.quiver.path(e): self.tower.field.one})

    def path(self, p: Path, coefficient: Coefficient = 1) -> PathElement:
        return self.element({p: coefficient})


@dataclass(frozen=True, eq=False)
class PathElement:
    """
    A finite `K`-linear combination of paths, `Σ a_γ γ` with `a_γ ∈ K_{[r(γ)]}`.

    `degree` is None for exact elements. A `SeriesTruncation` carries the degree `N` it is
    known modulo.
    """

    algebra: PathAlgebra
    terms: Mapping[Path, Frac]
    degree: int | None = field(default=None)

    @property
    def is_exact(self) -> bool:
        return self.degree is None

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, p: Path) -> Frac:
        return self.terms.get(p, self.algebra.tower.field.zero)

    def max_length(self) -> int:
        return max((p.length for p in self.terms), default=0)

    def sorted_terms(self) -> list[tuple[Path, Frac]]:
        return sorted(self.terms.items(), key=lambda kv: self.algebra.quiver.path_key(kv[0]))

    def truncate(self, degree: int) -> SeriesTruncation:
        d = degree if self.degree is None else min(degree, self.degree)
        return SeriesTruncation(
            self.algebra, {p: c for p, c in self.terms.items() if p.length <= d}, d
        )

    def agrees(self, other: PathElement, degree: int) -> bool:
        "Equality modulo paths longer than `degree` (and the degrees both are known to)."
        d = min(x for x in (degree, self.degree, other.degree) if x is not None)
        return self.truncate(d).terms == other.truncate(d).terms

    def __add__(self, other: PathElement) -> PathElement:
        return pe_add(self, other)

    def __sub__(self, other: PathElement) -> PathElement:
        return pe_add(self, pe_neg(other))

    def __neg__(self) -> PathElement:
        return pe_neg(self)

    def __mul__(self, other: PathElement) -> PathElement:
        return pe_mul(self, other)

    @override
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PathElement):
            return NotImplemented
        return self.degree == other.degree and dict(self.terms) == dict(other.terms)

    __hash__ = None  # type: ignore[assignment]

    @override
    def __str__(self) -> str:
        body = format_terms(self.sorted_terms())
        if self.degree is None:
            return body
        return f"{body} + O({self.degree + 1})"


@dataclass(frozen=True, eq=False)
class SeriesTruncation(PathElement):
    """A power series of `P_K((E))` known modulo paths of length greater than `degree`."""

    @override
    def __eq__(self, other: object) -> bool:
        return super().__eq__(other)

    __hash__ = None  # type: ignore[assignment]


def format_terms(terms: Sequence[tuple[object, Frac]]) -> str:
    "Render `c·m` monomials as `m`, `-m`, `3*m` or `(x_u + 1)*m`."
    if not terms:
        return "0"

    pieces: list[str] = []
    for monomial, c in terms:
        text = str(c)
        sign = "+"
        if text.startswith("-") and _is_atomic(text[1:]):
            sign, text = "-", text[1:]

        if text == "1":
            piece = str(monomial)
        elif _is_atomic(text):
            piece = f"{text}*{monomial}"
        else:
            piece = f"({text})*{monomial}"
        pieces.append(f"{sign} {piece}")

    first = pieces[0]
    head = first[2:] if first.startswith("+") else f"-{first[2:]}"
    return " ".join([head, *pieces[1:]])


def _is_atomic(text: str) -> bool:
    return not any(ch in text for ch in "+-/ ")


def _make(algebra: PathAlgebra, terms: dict[Path, Frac], degree: int | None) -> PathElement:
    cleaned = {p: c for p, c in terms.items() if c}
    if degree is None:
        return PathElement(algebra, cleaned)
    kept = {p: c for p, c in cleaned.items() if p.length <= degree}
    return SeriesTruncation(algebra, kept, degree)


def _min_degree(*degrees: int | None) -> int | None:
    known = [d for d in degrees if d is not None]
    return min(known) if known else None


def pe_add(a: PathElement, b: PathElement) -> PathElement:
    terms = dict(a.terms)
    for p, c in b.terms.items():
        terms[p] = terms[p] + c if p in terms else c
    return _make(a.algebra, terms, _min_degree(a.degree, b.degree))


def pe_neg(a: PathElement) -> PathElement:
    return _make(a.algebra, {p: -c for p, c in a.terms.items()}, a.degree)


def pe_sub(a: PathElement, b: PathElement) -> PathElement:
    return pe_add(a, pe_neg(b))


def pe_mul(a: PathElement, b: PathElement) -> PathElement:
    """
    The concatenation product.

    Coefficients of composable pairs multiply inside `K_{[r(γμ)]}`, which contains both
    factors because `[r(γ)] ≥ [r(μ)]`; non-composable pairs vanish.
    """

    degree = _min_degree(a.degree, b.degree)
    concat = a.algebra.quiver.concat
    terms: dict[Path, Frac] = {}

    for p, x in a.terms.items():
        for q, y in b.terms.items():
            if degree is not None and p.length + q.length > degree:
                continue
            pq = concat(p, q)
            if pq is None:
                continue
            terms[pq] = terms[pq] + x * y if pq in terms else x * y

    return _make(a.algebra, terms, degree)


def pe_filter(a: PathElement, keep: Callable[[Path], bool]) -> PathElement:
    "The part of `a` supported on the paths `keep` accepts."
    return _make(a.algebra, {p: c for p, c in a.terms.items() if keep(p)}, a.degree)


def exact(a: PathElement) -> PathElement:
    "A truncation read as the polynomial it stores."
    return PathElement(a.algebra, dict(a.terms))


def scale(c: Coefficient, a: PathElement) -> PathElement:
    "`c·a`, checking that `c` lands in every `K_{[r(γ)]}` it touches."
    value = a.algebra.coefficient_value(c)
    result = _make(a.algebra, {p: value * x for p, x in a.terms.items()}, a.degree)
    a.algebra.check_terms(result.terms)
    return result


def pe_pow(a: PathElement, k: int) -> PathElement:
    result = a.algebra.one() if a.degree is None else a.algebra.one().truncate(a.degree)
    for _ in range(k):
        result = pe_mul(result, a)
    return result


@dataclass(frozen=True)
class AugValue:
    """An element of `⊕ K_{[v]} v`, the image of the augmentation."""

    values: Mapping[str, Frac]

    def at(self, v: str) -> Frac | int:
        return self.values.get(v, 0)

    @property
    def is_zero(self) -> bool:
        return not any(self.values.values())

    def __mul__(self, other: AugValue) -> AugValue:
        keys = self.values.keys() & other.values.keys()
        return AugValue({v: self.values[v] * other.values[v] for v in keys})

    def __add__(self, other: AugValue) -> AugValue:
        keys = self.values.keys() | other.values.keys()
        return AugValue({v: self.at(v) + other.at(v) for v in keys})

    def same_as(self, other: AugValue) -> bool:
        keys = self.values.keys() | other.values.keys()
        return all(self.at(v) == other.at(v) for v in keys)


def augment(a: PathElement) -> AugValue:
    "`ε(a)`: the coefficients of the trivial paths."
    return AugValue({p.source: c for p, c in a.terms.items() if p.is_trivial})


def tau(e: Edge, a: PathElement) -> PathElement:
    "`τ_e(a) = ε(a)_{s(e)} · r(e)`."
    c = augment(a).at(e.source)
    if not c:
        return _make(a.algebra, {}, a.degree)
    return _make(a.algebra, {a.algebra.quiver.trivial(e.range): c}, a.degree)


def transduce(e: Edge, a: PathElement) -> PathElement:
    """
    The right transduction `δ̃_e`: strip a leading `e`.

    The coefficient of `α` (with `s(α) = r(e)`) in the result is that of `eα` in `a`. A
    truncation of degree `N` yields one of degree `N - 1`.
    """

    terms: dict[Path, Frac] = {}
    quiver = a.algebra.quiver

    for p, c in a.terms.items():
        if p.is_trivial or p.edges[0] != e.id:
            continue
        rest = quiver.trivial(e.range) if p.length == 1 else quiver.path(*p.edges[1:])
        terms[rest] = c

    degree = None if a.degree is None else max(a.degree - 1, 0)
    return _make(a.algebra, terms, degree)


def transduce_path(edges: Sequence[Edge], a: PathElement) -> PathElement:
    "`δ̃_{e_n} ∘ ... ∘ δ̃_{e_1}` for the path `e_1 ... e_n`."
    for e in edges:
        a = transduce(e, a)
    return a


def check_right_derivation(e: Edge, r: PathElement, s: PathElement) -> bool:
    "`δ̃_e(rs) = δ̃_e(r)s + τ_e(r)δ̃_e(s)`, exactly."
    lhs = transduce(e, pe_mul(r, s))
    rhs = pe_add(pe_mul(transduce(e, r), s), pe_mul(tau(e, r), transduce(e, s)))
    return lhs == rhs


@dataclass(frozen=True)
class AlgMatrix:
    """
    A rectangular matrix over `P_K(E)` or `P_K((E))`.

    Square matrices may carry vertex `tags`: entry `(i, j)` then lives in the corner
    `t_i P t_j` and the unit is `diag(t_1, ..., t_n)`.
    """

    algebra: PathAlgebra
    rows: tuple[tuple[PathElement, ...], ...]
    tags: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            msg = "Matrix rows have different lengths"
            raise ValueError(msg)
        if self.tags is not None and len(self.tags) != len(self.rows):
            msg = "One vertex tag per row is required"
            raise ValueError(msg)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    @property
    def is_square(self) -> bool:
        n, m = self.shape
        return n == m

    @property
    def degree(self) -> int | None:
        return _min_degree(*(x.degree for row in self.rows for x in row))

    def entry(self, i: int, j: int) -> PathElement:
        return self.rows[i][j]

    def entries(self) -> Iterable[PathElement]:
        for row in self.rows:
            yield from row

    def column(self, j: int) -> AlgMatrix:
        return AlgMatrix(self.algebra, tuple((row[j],) for row in self.rows))

    def map(self, fn: Callable[[PathElement], PathElement]) -> AlgMatrix:
        rows = tuple(tuple(fn(x) for x in row) for row in self.rows)
        return AlgMatrix(self.algebra, rows, self.tags)

    def truncate(self, degree: int) -> AlgMatrix:
        return self.map(lambda x: x.truncate(degree))

    @property
    def is_zero(self) -> bool:
        return all(x.is_zero for x in self.entries())

    def same_as(self, other: AlgMatrix) -> bool:
        return self.shape == other.shape and all(
            a == b for a, b in zip(self.entries(), other.entries(), strict=True)
        )

    def agrees(self, other: AlgMatrix, degree: int) -> bool:
        return self.shape == other.shape and all(
            a.agrees(b, degree) for a, b in zip(self.entries(), other.entries(), strict=True)
        )

    def __add__(self, other: AlgMatrix) -> AlgMatrix:
        return mat_add(self, other)

    def __sub__(self, other: AlgMatrix) -> AlgMatrix:
        return mat_add(self, mat_neg(other))

    def __matmul__(self, other: AlgMatrix) -> AlgMatrix:
        return mat_mul(self, other)

    @override
    def __str__(self) -> str:
        return "[" + join_commas(["[" + join_commas(list(row)) + "]" for row in self.rows]) + "]"


def matrix(algebra: PathAlgebra, rows: Sequence[Sequence[PathElement]]) -> AlgMatrix:
    return AlgMatrix(algebra, tuple(tuple(r) for r in rows))


def identity(algebra: PathAlgebra, n: int, tags: Sequence[str] | None = None) -> AlgMatrix:
    diagonal = [algebra.one() if tags is None else algebra.vertex(tags[i]) for i in range(n)]
    rows = tuple(
        tuple(diagonal[i] if i == j else algebra.zero() for j in range(n)) for i in range(n)
    )
    return AlgMatrix(algebra, rows, None if tags is None else tuple(tags))


def zeros(algebra: PathAlgebra, n: int, m: int) -> AlgMatrix:
    return AlgMatrix(algebra, tuple(tuple(algebra.zero() for _ in range(m)) for _ in range(n)))


def mat_add(a: AlgMatrix, b: AlgMatrix) -> AlgMatrix:
    if a.shape != b.shape:
        msg = f"Cannot add matrices of shapes {a.shape} and {b.shape}"
        raise ValueError(msg)
    rows = tuple(
        tuple(pe_add(x, y) for x, y in zip(ra, rb, strict=True))
        for ra, rb in zip(a.rows, b.rows, strict=True)
    )
    return AlgMatrix(a.algebra, rows, a.tags or b.tags)


def mat_neg(a: AlgMatrix) -> AlgMatrix:
    return a.map(pe_neg)


def mat_sub(a: AlgMatrix, b: AlgMatrix) -> AlgMatrix:
    return mat_add(a, mat_neg(b))


def mat_mul(a: AlgMatrix, b: AlgMatrix) -> AlgMatrix:
    n, k = a.shape
    k2, m = b.shape
    if k != k2:
        msg = f"Cannot multiply matrices of shapes {a.shape} and {b.shape}"
        raise ValueError(msg)

    degree = _min_degree(a.degree, b.degree)
    rows: list[tuple[PathElement, ...]] = []
    for i in range(n):
        row: list[PathElement] = []
        for j in range(m):
            acc = _make(a.algebra, {}, degree)
            for t in range(k):
                left, right = a.rows[i][t], b.rows[t][j]
                if left.is_zero or right.is_zero:
                    continue
                acc = pe_add(acc, pe_mul(left, right))
            row.append(acc)
        rows.append(tuple(row))

    return AlgMatrix(a.algebra, tuple(rows), a.tags if a.tags == b.tags else None)


def mat_scale_left(element: PathElement, a: AlgMatrix) -> AlgMatrix:
    return a.map(lambda x: pe_mul(element, x))


def mat_scale_right(a: AlgMatrix, element: PathElement) -> AlgMatrix:
    return a.map(lambda x: pe_mul(x, element))


def block(algebra: PathAlgebra, blocks: Sequence[Sequence[AlgMatrix]]) -> AlgMatrix:
    "Assemble a block matrix; every block in a block row shares its height."
    rows: list[tuple[PathElement, ...]] = []
    for block_row in blocks:
        height = block_row[0].shape[0]
        for i in range(height):
            rows.append(tuple(x for b in block_row for x in b.rows[i]))
    return AlgMatrix(algebra, tuple(rows))


def _index_groups(m: AlgMatrix) -> dict[str, list[int]]:
    "For each vertex, the indices whose unit involves it."
    n = m.shape[0]
    if m.tags is None:
        return {v: list(range(n)) for v in m.algebra.quiver.vertices}
    groups: dict[str, list[int]] = {}
    for i, t in enumerate(m.tags):
        groups.setdefault(t, []).append(i)
    return groups


def _scalar_block(m: AlgMatrix, v: str, indices: Sequence[int]) -> DomainMatrix:
    domain = m.algebra.tower.field.to_domain()
    field_ = m.algebra.tower.field
    entries = [[field_(augment(m.rows[i][j]).at(v)) for j in indices] for i in indices]
    return DomainMatrix(entries, (len(indices), len(indices)), domain)


def is_invertible(m: AlgMatrix, vertices: Iterable[str] | None = None) -> bool:
    """
    Whether `m` is invertible over `P_K((E))`: its augmentation must be invertible over
    each `K_{[v]}`.

    With vertex tags the criterion is the one for the corner `diag(t) P diag(t)`.
    `vertices` restricts the check, which gives the corner criterion `ε_i` for a component.
    """

    if not m.is_square:
        msg = f"Matrix of shape {m.shape} is not square"
        raise NonSquare(msg)

    wanted = None if vertices is None else set(vertices)
    for v, indices in _index_groups(m).items():
        if wanted is not None and v not in wanted:
            continue
        if indices and not _scalar_block(m, v, indices).det():
            return False
    return True


def eps_inverse(m: AlgMatrix) -> AlgMatrix:
    "`ε(m)^{-1}` as a matrix over `⊕ K_{[v]} v`."
    if not is_invertible(m):
        msg = "Augmentation is not invertible"
        raise NotInvertible(msg)

    algebra = m.algebra
    n = m.shape[0]
    terms: list[list[dict[Path, Frac]]] = [[{} for _ in range(n)] for _ in range(n)]

    for v, indices in _index_groups(m).items():
        if not indices:
            continue
        inverse = _scalar_block(m, v, indices).inv().to_list()
        trivial = algebra.quiver.trivial(v)
        for a, i in enumerate(indices):
            for b, j in enumerate(indices):
                if inverse[a][b]:
                    terms[i][j][trivial] = inverse[a][b]

    rows = tuple(tuple(_make(algebra, terms[i][j], None) for j in range(n)) for i in range(n))
    return AlgMatrix(algebra, rows, m.tags)


def eps_matrix(m: AlgMatrix) -> AlgMatrix:
    "`ε(m)` entrywise, as a matrix of trivial-path combinations."
    algebra = m.algebra
    return m.map(
        lambda x: _make(algebra, {p: c for p, c in x.terms.items() if p.is_trivial}, None)
    )


def geometric_inverse(b: AlgMatrix, degree: int) -> AlgMatrix:
    "`(I - B)^{-1} = Σ_{k≤N} B^k` modulo degree `N`, for `ε(B) = 0`."
    n = b.shape[0]
    unit = identity(b.algebra, n, b.tags).truncate(degree)
    power = unit
    total = unit
    b_trunc = b.truncate(degree)

    for _ in range(degree):
        power = mat_mul(power, b_trunc)
        if power.is_zero:
            break
        total = mat_add(total, power)

    return total


def invert_eps_unit(m: AlgMatrix, degree: int) -> AlgMatrix:
    """
    `m^{-1}` modulo degree `N` for `m` with invertible augmentation.

    Writing `m = E(I - E^{-1}C)` with `E = ε(m)` and `C = E - m`, the inverse is
    `Σ_{k≤N} (E^{-1}C)^k E^{-1}`. The result is checked on both sides.
    """

    e_inv = eps_inverse(m)
    c = mat_sub(eps_matrix(m), m)
    x = mat_mul(e_inv, c)
    inverse = mat_mul(geometric_inverse(x, degree), e_inv.truncate(degree))

    unit = identity(m.algebra, m.shape[0], m.tags)
    if not (mat_mul(m, inverse).agrees(unit, degree) and mat_mul(inverse, m).agrees(unit, degree)):
        msg = "Truncated inverse failed its product check"
        raise NotInvertible(msg)

    log.debug("inverted %dx%d matrix modulo degree %d", *m.shape, degree)
    return inverse


def invert_element(a: PathElement, degree: int) -> SeriesTruncation:
    """
    `a^{-1}` modulo degree `N` inside the corner `p_V P p_V`, `V` being the support of `ε(a)`.

    With `E = ε(a)` and `X = p_V - E^{-1}a`, the inverse is `Σ_{k≤N} X^k E^{-1}`.
    """

    algebra = a.algebra
    eps = augment(a)
    support = [v for v in algebra.quiver.vertices if eps.at(v)]
    inside = set(support)
    if not support or any(p.source not in inside or p.range not in inside for p in a.terms):
        msg = f"{a} is not invertible: its augmentation does not cover its support"
        raise NotInvertible(msg)

    e_inv = algebra.element({algebra.quiver.trivial(v): 1 / eps.at(v) for v in support})
    unit = algebra.p_set(support)
    x = pe_sub(unit, pe_mul(e_inv, a)).truncate(degree)

    total = unit.truncate(degree)
    power = total
    for _ in range(degree):
        power = pe_mul(power, x)
        if power.is_zero:
            break
        total = pe_add(total, power)

    inverse = pe_mul(total, e_inv)
    if not (pe_mul(a, inverse).agrees(unit, degree) and pe_mul(inverse, a).agrees(unit, degree)):
        msg = "Truncated inverse failed its product check"
        raise NotInvertible(msg)
    return inverse
