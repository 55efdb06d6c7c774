"""
The regular algebra `Q_K(E)`.

An element is a finite sum `Σ a_γ γ*` whose coefficients are rational series anchored at
`r(γ)`. Ghost edges move past coefficients by `e*·a = τ_e(a)e* + δ̃_e(a)`; (CK2) is applied
through `q_v = v - Σ ee*` by splitting off the part of a coefficient that ends in the
designated edge. Coefficients are compared modulo a truncation degree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, override

from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement, ring

from pathloc.errors import (
    BadAugmentation,
    MembershipError,
    NotApplicable,
    NotFreeLoopComponent,
    NotInvertible,
    SeriesError,
    ZeroConstantTerm,
)
from pathloc.leavitt import LeavittAlgebra, LeavittElement, MonomialText, RelationCheck, star
from pathloc.pathalg import (
    AlgMatrix,
    PathAlgebra,
    PathElement,
    augment,
    geometric_inverse,
    identity,
    is_invertible,
    mat_add,
    mat_mul,
    mat_sub,
    pe_add,
    pe_filter,
    pe_mul,
    pe_sub,
    scale,
    tau,
    transduce,
)
from pathloc.quiver import assert_tree
from pathloc.ratseries import (
    LinRep,
    expand,
    left_strip,
    rep_add,
    rep_anchor,
    rep_mul,
    rep_neg,
    rep_right,
    rep_scale,
    rep_sub,
)

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

    from pathloc.pathalg import Coefficient
    from pathloc.quiver import AbpShape, ComponentPoset, Edge, Path
    from pathloc.scalars import Frac

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QAlgebra:
    paths: PathAlgebra
    degree: int = 8

    @cached_property
    def leavitt(self) -> LeavittAlgebra:
        return LeavittAlgebra(self.paths)

    def designated(self, v: str) -> Edge | None:
        return self.leavitt.designated(v)

    def zero(self) -> QElement:
        return QElement(self, {})

    def one(self) -> QElement:
        return self.embed_rational(LinRep.constant(self.paths.one()))

    def vertex(self, v: str) -> QElement:
        return self.embed_path(self.paths.vertex(v))

    def edge(self, e: str) -> QElement:
        return self.embed_path(self.paths.edge(e))

    def ghost(self, e: str) -> QElement:
        return self.embed_ghost(self.paths.quiver.path(e))

    def embed_path(self, a: PathElement) -> QElement:
        return self.embed_rational(LinRep.constant(a))

    def embed_ghost(self, p: Path) -> QElement:
        "`p*`, with coefficient `r(p)`."
        return QElement(self, {p: LinRep.constant(self.paths.vertex(p.range))})

    def embed_rational(self, r: LinRep) -> QElement:
        "A rational series as `Σ_w (a·w) w*`."
        quiver = self.paths.quiver
        terms = {quiver.trivial(w): rep_anchor(r, w).trim() for w in quiver.vertices}
        return QElement(self, terms).dropped_zeros()


@dataclass(frozen=True, eq=False)
class QElement:
    algebra: QAlgebra
    terms: Mapping[Path, LinRep]

    def coefficient(self, p: Path) -> LinRep | None:
        return self.terms.get(p)

    def sorted_terms(self) -> list[tuple[Path, LinRep]]:
        key = self.algebra.paths.quiver.path_key
        return sorted(self.terms.items(), key=lambda kv: key(kv[0]))

    def dropped_zeros(self, degree: int | None = None) -> QElement:
        n = self.algebra.degree if degree is None else degree
        return QElement(
            self.algebra, {p: r for p, r in self.terms.items() if not expand(r, n).is_zero}
        )

    def __add__(self, other: QElement) -> QElement:
        return q_add(self, other)

    def __sub__(self, other: QElement) -> QElement:
        return q_add(self, q_neg(other))

    def __neg__(self) -> QElement:
        return q_neg(self)

    def __mul__(self, other: QElement) -> QElement:
        return q_mul(self, other)

    @override
    def __str__(self) -> str:
        return q_str(self)


def q_str(x: QElement, degree: int | None = None) -> str:
    "Coefficients are printed as their expansions; polynomial ones print exactly."
    n = x.algebra.degree if degree is None else degree
    quiver = x.algebra.paths.quiver
    pieces: list[str] = []

    for p, r in x.sorted_terms():
        value = polynomial_value(r)
        text = str(value if value is not None else expand(r, n))
        if p.is_trivial:
            pieces.append(text)
        else:
            pieces.append(f"({text})*{MonomialText(quiver.trivial(p.range), p)}")

    return " + ".join(pieces) if pieces else "0"


def polynomial_value(r: LinRep) -> PathElement | None:
    "`λρ` when `B = 0`, which is then the exact value."
    if not all(x.is_zero for x in r.matrix.entries()):
        return None
    return mat_mul(r.row, r.column).entry(0, 0)


def q_add(x: QElement, y: QElement) -> QElement:
    terms = dict(x.terms)
    for p, r in y.terms.items():
        terms[p] = rep_add(terms[p], r) if p in terms else r
    return QElement(x.algebra, terms)


def q_neg(x: QElement) -> QElement:
    return QElement(x.algebra, {p: rep_neg(r) for p, r in x.terms.items()})


def q_sub(x: QElement, y: QElement) -> QElement:
    return q_add(x, q_neg(y))


def tau_rep(e: Edge, r: LinRep) -> LinRep:
    "`τ_e(a) = ε(a)_{s(e)} r(e)`; `ε(a) = ε(λ)ε(ρ)` since `ε(B) = 0`."
    return LinRep.constant(tau(e, expand(r, 0)))


def transduce_rep(e: Edge, r: LinRep) -> LinRep:
    """
    A representation of `δ̃_e(λ(I - B)^{-1}ρ)`.

    The derivation law and `τ_e(B) = 0` give
    `δ̃_e(a) = [δ̃_e(λ) + τ_e(λ)δ̃_e(B)](I - B)^{-1}ρ + τ_e(λ)δ̃_e(ρ)`: the same `B` with a
    new row, plus a polynomial correction.
    """

    if any(not augment(x).is_zero for x in r.matrix.entries()):
        msg = "Transduction needs ε(B) = 0"
        raise BadAugmentation(msg)

    algebra = r.algebra
    tau_row = r.row.map(lambda x: tau(e, x))
    delta_b = r.matrix.map(lambda x: transduce(e, x))
    row = mat_add(r.row.map(lambda x: transduce(e, x)), mat_mul(tau_row, delta_b))

    main = LinRep(algebra, row, r.matrix, r.column)
    correction = mat_mul(tau_row, r.column.map(lambda x: transduce(e, x))).entry(0, 0)
    if correction.is_zero:
        return main.trim()
    return rep_add(main, LinRep.constant(correction)).trim()


def _accumulate(terms: dict[Path, LinRep], p: Path, r: LinRep) -> None:
    terms[p] = rep_add(terms[p], r) if p in terms else r


def ghost_times(gamma: Path, b: LinRep, anchor: str) -> dict[Path, LinRep]:
    """
    `γ*·b` as `Σ_ν c_ν ν*`, for `b` anchored at `anchor`.

    `γ* = e_n* ⋯ e_1*`, so `e_1*` is applied first; each step sends `c ν*` to
    `τ_e(c)(νe)* + δ̃_e(c)ν*`, the first term only when `r(ν) = s(e)`.
    """

    paths = b.algebra
    quiver = paths.quiver
    state: dict[Path, LinRep] = {quiver.trivial(anchor): b}

    for edge_id in gamma.edges:
        e = quiver.edge(edge_id)
        nxt: dict[Path, LinRep] = {}

        for nu, c in state.items():
            if nu.range == e.source:
                t = tau(e, expand(c, 0))
                if not t.is_zero:
                    _accumulate(nxt, quiver.path(*nu.edges, e.id), LinRep.constant(t))
            _accumulate(nxt, nu, transduce_rep(e, c))

        state = nxt

    return state


def q_mul(x: QElement, y: QElement, degree: int | None = None) -> QElement:
    "`(aγ*)(bμ*) = Σ_ν (a c_ν)(μν)*` with `γ*b = Σ c_ν ν*`, then normalized."
    quiver = x.algebra.paths.quiver
    terms: dict[Path, LinRep] = {}

    for gamma, a in x.terms.items():
        for mu, b in y.terms.items():
            for nu, c in ghost_times(gamma, b, mu.range).items():
                target = quiver.concat(mu, nu)
                if target is None:
                    continue
                r = rep_mul(a, c).trim()
                terms[target] = rep_add(terms[target], r) if target in terms else r

    return q_normalize(QElement(x.algebra, terms), degree)


def q_normalize(x: QElement, degree: int | None = None) -> QElement:
    """
    Rewrite `a·(γ′e₀)*` with `e₀` designated at `v = s(e₀)`: writing `a = d·e₀ + a′`,
    `d e₀e₀*γ′* = dγ′* - Σ_{e≠e₀} (d·e)(γ′e)*`. Longest ghost paths go first; shorter
    ones and non-designated tails are never revisited at the same length.
    """

    algebra = x.algebra
    quiver = algebra.paths.quiver
    n = algebra.degree if degree is None else degree
    terms = {p: r for p, r in x.terms.items() if not expand(r, n).is_zero}

    def put(p: Path, r: LinRep) -> None:
        terms[p] = rep_add(terms[p], r).trim() if p in terms else r

    for length in range(max((p.length for p in terms), default=0), 0, -1):
        for gamma in sorted((p for p in terms if p.length == length), key=quiver.path_key):
            last = quiver.edge(gamma.edges[-1])
            if algebra.designated(last.source) != last:
                continue

            a = terms[gamma]
            try:
                d = left_strip(last, a)
            except MembershipError:
                continue
            if expand(d, n).is_zero:
                continue

            prefix = quiver.trivial(last.source) if length == 1 else quiver.path(*gamma.edges[:-1])
            terms[gamma] = rep_sub(a, rep_right(d, algebra.paths.edge(last.id))).trim()
            put(prefix, d)
            for e in quiver.out_edges(last.source):
                if e != last:
                    branch = quiver.concat(prefix, quiver.path(e.id))
                    put(branch, rep_neg(rep_right(d, algebra.paths.edge(e.id))))

    return QElement(algebra, terms).dropped_zeros(n)


def q_equal(x: QElement, y: QElement, degree: int | None = None) -> bool:
    return not q_normalize(q_sub(x, y), degree).terms


def q_pow(x: QElement, k: int) -> QElement:
    result = x.algebra.one()
    for _ in range(k):
        result = q_mul(result, x)
    return result


def q_inverse_of(p: PathElement) -> LinRep:
    """
    The inverse of a polynomial in the corner `p_V P p_V` with `V` the support of `ε(p)`.

    With `E = ε(p)` and `X = p_V - E^{-1}p`, `p^{-1} = p_V(I - X)^{-1}E^{-1}`.
    """

    algebra = p.algebra
    eps = augment(p)
    support = [v for v in algebra.quiver.vertices if eps.at(v)]
    if not support:
        msg = f"{p} has zero augmentation"
        raise NotInvertible(msg)

    inside = set(support)
    if any(q.source not in inside or q.range not in inside for q in p.terms):
        msg = f"{p} is not invertible: it leaves the corner of its augmentation"
        raise NotInvertible(msg)

    quiver = algebra.quiver
    e_inv = algebra.element({quiver.trivial(v): 1 / eps.at(v) for v in support})
    unit = algebra.p_set(support)
    x = pe_sub(unit, pe_mul(e_inv, p))
    return LinRep.geometric(unit, x, e_inv)


def free_loop(poset: ComponentPoset, v: str) -> Edge:
    "The loop `α^v` when `[v]` is a single vertex with a single loop."
    graph = poset.component_graph(poset.class_of(v))
    if len(graph.vertices) != 1 or len(graph.edges) != 1:
        msg = f"Component of {v} is not a single vertex with one loop"
        raise NotFreeLoopComponent(msg)
    return graph.edges[0]


def loop_coefficients(p: PathElement, v: str, loop: Edge) -> dict[int, Frac]:
    "`p = Σ c_k (α^v)^k`, rejecting anything else."
    coefficients: dict[int, Frac] = {}
    for q, c in p.terms.items():
        if q.source != v or any(e != loop.id for e in q.edges):
            msg = f"{p} is not a polynomial in {loop.id}"
            raise NotFreeLoopComponent(msg)
        coefficients[q.length] = c
    return coefficients


def invert_free_polynomial(v: str, p: PathElement, degree: int = 8) -> LinRep:
    """
    `p(α^v)^{-1}` in `vQv` for `p(0) ≠ 0`: `p = p(0)(v - q)` with `ε(q) = 0`, so
    `p^{-1} = p(0)^{-1}(v - q)^{-1}`.
    """

    algebra = p.algebra
    loop = free_loop(algebra.poset, v)
    coefficients = loop_coefficients(p, v, loop)
    constant = coefficients.get(0)
    if not constant:
        msg = f"{p} has zero constant term"
        raise ZeroConstantTerm(msg)

    unit = algebra.vertex(v)
    q = pe_sub(unit, scale(1 / constant, p))
    inverse = LinRep.geometric(scale(1 / constant, unit), q, unit)

    series = expand(inverse, degree)
    if not (pe_mul(p, series).agrees(unit, degree) and pe_mul(series, p).agrees(unit, degree)):
        msg = "Free polynomial inverse failed its product check"
        raise NotInvertible(msg)
    return inverse


@dataclass(frozen=True)
class SigmaPrimeDecomposition:
    """
    `A = A₀ + B + Σ A_k` at the root of a (sub)tree: `A₀` inside the root component, `B`
    from the root component down, `A_k` inside the lower set of the `k`-th lower cover.
    """

    root: str
    matrix: AlgMatrix
    a0: AlgMatrix
    b: AlgMatrix
    parts: tuple[tuple[str, SigmaPrimeDecomposition], ...]

    @property
    def lower_sum(self) -> AlgMatrix:
        total = _zero_like(self.matrix)
        for _, part in self.parts:
            total = mat_add(total, part.matrix)
        return total


def _zero_like(m: AlgMatrix) -> AlgMatrix:
    return m.map(lambda x: x.algebra.zero())


def sigma_prime_decompose(a: AlgMatrix, poset: ComponentPoset) -> SigmaPrimeDecomposition:
    assert_tree(poset)
    if any(not augment(x).is_zero for x in a.entries()):
        msg = "Σ′ decomposition needs ε(A) = 0"
        raise BadAugmentation(msg)

    root = poset.root
    top = set(poset.members[root])
    a0 = a.map(lambda x: pe_filter(x, lambda p: p.source in top and p.range in top))
    b = a.map(lambda x: pe_filter(x, lambda p: p.source in top and p.range not in top))

    parts: list[tuple[str, SigmaPrimeDecomposition]] = []
    for k in poset.lower_covers(root):
        inside = poset.vertices_of(poset.lower_set(k))
        a_k = a.map(lambda x, h=inside: pe_filter(x, lambda p: p.source in h))
        parts.append((k, sigma_prime_decompose(a_k, poset.subtree(k))))

    d = SigmaPrimeDecomposition(root, a, a0, b, tuple(parts))
    _check_orthogonality(d)
    log.debug("Σ′ decomposition at %s with %d lower part(s)", root, len(parts))
    return d


def _check_orthogonality(d: SigmaPrimeDecomposition) -> None:
    lower = d.lower_sum
    rebuilt = mat_add(mat_add(d.a0, d.b), lower)
    if not rebuilt.same_as(d.matrix):
        msg = "A₀ + B + ΣA_k does not rebuild A"
        raise SeriesError(msg)

    checks = {
        "(B + ΣA_k)A₀": mat_mul(mat_add(d.b, lower), d.a0),
        "(ΣA_k)B": mat_mul(lower, d.b),
    }
    for (k, x), (l, y) in ((p, q) for p in d.parts for q in d.parts if p[0] != q[0]):
        checks[f"A_{k}A_{l}"] = mat_mul(x.matrix, y.matrix)

    for name, product in checks.items():
        if not product.is_zero:
            msg = f"{name} is not zero"
            raise SeriesError(msg)


def check_sigma_prime_factorization(d: SigmaPrimeDecomposition, degree: int) -> bool:
    """
    `(I - A)^{-1} = (I - A₀)^{-1}(I - (B + ΣA_k))^{-1}`,
    `(I - (B + ΣA_k))^{-1} = (I + B)(I - ΣA_k)^{-1}` with `(I - B)(I + B) = I` exactly,
    and `(I - ΣA_k)^{-1} = Π (I - A_k)^{-1}`, at every level, modulo degree `N`.
    """

    algebra = d.matrix.algebra
    n = d.matrix.shape[0]
    unit = identity(algebra, n)
    lower = d.lower_sum

    whole = geometric_inverse(d.matrix, degree)
    root_inv = geometric_inverse(d.a0, degree)
    rest_inv = geometric_inverse(mat_add(d.b, lower), degree)
    if not whole.agrees(mat_mul(root_inv, rest_inv), degree):
        return False

    if not mat_mul(mat_sub(unit, d.b), mat_add(unit, d.b)).same_as(unit):
        return False

    lower_inv = geometric_inverse(lower, degree)
    if not rest_inv.agrees(mat_mul(mat_add(unit, d.b), lower_inv), degree):
        return False

    product = unit.truncate(degree)
    for _, part in d.parts:
        product = mat_mul(product, geometric_inverse(part.matrix, degree))
    if not lower_inv.agrees(product, degree):
        return False

    return all(check_sigma_prime_factorization(part, degree) for _, part in d.parts)


@dataclass(frozen=True)
class DeterminantRemark:
    determinant: PathElement
    tail: PathElement

    @property
    def constant_is_one(self) -> bool:
        return augment(self.tail).is_zero


def determinant_remark_check(v: str, a: AlgMatrix) -> DeterminantRemark:
    """
    `det(Iv - A′) = v + p(α^v)` with `p(0) = 0`, computed in `K_{[v]}[t]` with `t ↦ α^v`.
    """

    algebra = a.algebra
    loop = free_loop(algebra.poset, v)
    if not a.is_square:
        msg = f"Matrix of shape {a.shape} is not square"
        raise SeriesError(msg)
    if any(not augment(x).is_zero for x in a.entries()):
        msg = "The determinant remark needs ε(A′) = 0"
        raise BadAugmentation(msg)

    field_ = algebra.tower.field
    poly_ring, _ = ring("t", field_.to_domain())

    def to_poly(x: PathElement) -> PolyElement:
        coefficients = loop_coefficients(x, v, loop)
        return poly_ring.from_dict({(k,): c for k, c in coefficients.items()})

    n = a.shape[0]
    entries = [
        [(poly_ring.one if i == j else poly_ring.zero) - to_poly(a.rows[i][j]) for j in range(n)]
        for i in range(n)
    ]
    det = DomainMatrix(entries, (n, n), poly_ring.to_domain()).det()

    quiver = algebra.quiver
    terms = {}
    for (k,), c in det.terms():
        path = quiver.trivial(v) if k == 0 else quiver.path(*([loop.id] * k))
        terms[path] = c
    determinant = algebra.element(terms)
    tail = pe_sub(determinant, algebra.vertex(v))
    return DeterminantRemark(determinant, tail)


def sigma_prime_member(m: AlgMatrix, component: str, shape: AbpShape) -> bool:
    """
    Membership in `Σ_i`.

    For a free non-minimal component: a `1×1` polynomial in its loop with `p(0) ≠ 0`. For a
    regular one: a square matrix over the corner of the component with coefficients in
    `K_i` whose augmentation `ε_i` is invertible.
    """

    algebra = m.algebra
    poset = algebra.poset

    if component in shape.free and not poset.is_minimal(component):
        if m.shape != (1, 1):
            return False
        v = poset.members[component][0]
        try:
            coefficients = loop_coefficients(m.entry(0, 0), v, free_loop(poset, v))
        except NotFreeLoopComponent:
            return False
        return bool(coefficients.get(0))

    if component in shape.regular:
        if not m.is_square:
            return False
        inside = set(poset.members[component])
        tower = algebra.tower
        for x in m.entries():
            for p, c in x.terms.items():
                if p.source not in inside or p.range not in inside:
                    return False
                if not tower.fits(c, component):
                    return False
        return is_invertible(m, vertices=inside)

    msg = f"Component {component} has no Σ′ family"
    raise NotApplicable(msg)


def check_q_relations(algebra: QAlgebra, degree: int | None = None) -> tuple[RelationCheck, ...]:
    "(V), (E1), (E2), (CK1) and (CK2) under the embedding into `Q_K(E)`."
    quiver = algebra.paths.quiver
    checks: list[RelationCheck] = []

    def record(family: str, label: str, lhs: QElement, rhs: QElement) -> None:
        checks.append(RelationCheck(family, label, q_equal(lhs, rhs, degree)))

    def mul(x: QElement, y: QElement) -> QElement:
        return q_mul(x, y, degree)

    for v in quiver.vertices:
        for w in quiver.vertices:
            expected = algebra.vertex(v) if v == w else algebra.zero()
            record("V", f"{v}·{w}", mul(algebra.vertex(v), algebra.vertex(w)), expected)

    for e in quiver.edges:
        edge, ghost = algebra.edge(e.id), algebra.ghost(e.id)
        record("E1", f"{e.source}·{e.id}", mul(algebra.vertex(e.source), edge), edge)
        record("E1", f"{e.id}·{e.range}", mul(edge, algebra.vertex(e.range)), edge)
        record("E2", f"{e.range}·~{e.id}", mul(algebra.vertex(e.range), ghost), ghost)
        record("E2", f"~{e.id}·{e.source}", mul(ghost, algebra.vertex(e.source)), ghost)

    for e in quiver.edges:
        for f in quiver.edges:
            expected = algebra.vertex(e.range) if e == f else algebra.zero()
            product = mul(algebra.ghost(e.id), algebra.edge(f.id))
            record("CK1", f"~{e.id}·{f.id}", product, expected)

    for v in quiver.vertices:
        if quiver.is_sink(v):
            continue
        total = algebra.zero()
        for e in quiver.out_edges(v):
            total = q_add(total, mul(algebra.edge(e.id), algebra.ghost(e.id)))
        record("CK2", f"Σ e·~e at {v}", total, algebra.vertex(v))

    return tuple(checks)


def embed_terms(algebra: QAlgebra, terms: Iterable[tuple[Path, LinRep]]) -> QElement:
    "Build a normalized element from raw `(γ, a_γ)` pairs, anchoring each `a_γ` at `r(γ)`."
    raw: dict[Path, LinRep] = {}
    for p, r in terms:
        anchored = rep_anchor(r, p.range).trim()
        raw[p] = rep_add(raw[p], anchored) if p in raw else anchored
    return q_normalize(QElement(algebra, raw))


def q_from_leavitt(algebra: QAlgebra, x: LeavittElement) -> QElement:
    "The image of a Leavitt element `Σ c·γμ*` as `Σ (cγ) μ*`."
    paths = algebra.paths
    pairs = [(mu, LinRep.constant(paths.path(gamma, c))) for (gamma, mu), c in x.terms.items()]
    return embed_terms(algebra, pairs)


def q_to_leavitt(x: QElement) -> LeavittElement:
    "The Leavitt element of `x` when every coefficient is a polynomial."
    leavitt = x.algebra.leavitt
    terms: dict[tuple[Path, Path], Frac] = {}
    for mu, r in x.terms.items():
        value = polynomial_value(r)
        if value is None:
            msg = f"The coefficient of {mu} is not a polynomial"
            raise NotApplicable(msg)
        for gamma, c in value.terms.items():
            key = (gamma, mu)
            terms[key] = terms[key] + c if key in terms else c
    return leavitt.element(terms)


def q_star(x: QElement) -> QElement:
    "The involution, defined on the image of `L_K(E)`."
    return q_from_leavitt(x.algebra, star(q_to_leavitt(x)))


def q_scale(c: Coefficient, x: QElement) -> QElement:
    return QElement(x.algebra, {p: rep_scale(r, c) for p, r in x.terms.items()}).dropped_zeros()


def q_polynomial(x: QElement) -> PathElement:
    "`x` as a path-algebra polynomial; fails when a ghost or a rational coefficient remains."
    total = x.algebra.paths.zero()
    for p, r in x.terms.items():
        value = polynomial_value(r)
        if not p.is_trivial or value is None:
            msg = f"{q_str(x)} is not a polynomial of the path algebra"
            raise NotApplicable(msg)
        total = pe_add(total, value)
    return total
