"""
Property suites run by `verify`.

Each suite draws its samples from its own `random.Random`, seeded from the run seed and
the suite name, so suites are reproducible one by one and in any order.
"""

from __future__ import annotations

import logging
import random
from collections.abc import Callable
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import TYPE_CHECKING

from pathloc.errors import GraphError, NotApplicable, NotFreeLoopComponent, PathlocError
from pathloc.leavitt import LeavittAlgebra, LeavittElement, check_defining_relations, le_mul
from pathloc.monoid import (
    Equal,
    applicable,
    element,
    local_confluence_check,
    mon_equal,
    relation_pairs,
    vmonoid_generators_check,
)
from pathloc.pathalg import (
    AlgMatrix,
    PathAlgebra,
    PathElement,
    check_right_derivation,
    invert_element,
    matrix,
    pe_add,
    pe_mul,
    transduce,
)
from pathloc.qalg import (
    QAlgebra,
    QElement,
    check_q_relations,
    check_sigma_prime_factorization,
    determinant_remark_check,
    free_loop,
    invert_free_polynomial,
    q_add,
    q_equal,
    q_mul,
    sigma_prime_decompose,
    sigma_prime_member,
    transduce_rep,
)
from pathloc.quiver import ComponentPoset, Edge, Quiver, assert_tree, condense, hereditary_vertices
from pathloc.ratseries import (
    LinRep,
    check_inverse_factorization,
    corner_formula,
    expand,
    rep_anchor,
)
from pathloc.report import Failure, SuiteResult, VerifyReport
from pathloc.scalars import FieldTower, amalgamate, coerce, inv, mul
from pathloc.scalars import add as scalar_add

if TYPE_CHECKING:
    from pathloc.config import RunConfig
    from pathloc.graphfile import GraphSpec
    from pathloc.quiver import Path
    from pathloc.scalars import Frac

log = logging.getLogger(__name__)

MAX_LOWER_SET_CLASSES = 8


@dataclass
class Sampler:
    """Random elements of a path algebra with coefficients in the right fields."""

    paths: PathAlgebra
    rng: random.Random

    @cached_property
    def _by_length(self) -> dict[int, list[Path]]:
        table: dict[int, list[Path]] = {}
        for p in self.paths.quiver.paths(3):
            table.setdefault(p.length, []).append(p)
        return table

    def scalar(self, cls: str) -> Frac:
        "A small element of `K_cls`: an integer, sometimes plus a multiple of a variable."
        tower = self.paths.tower
        value = tower.field(self.rng.choice([1, 2, 3, -1, -2]))
        if self.rng.random() < 0.3:  # noqa: PLR2004
            var = tower.var(self.rng.choice(self.paths.poset.up_chain(cls)))
            value += self.rng.choice([1, -1]) * var.value
        return value

    def element(self, max_length: int = 3, terms: int = 3, *, min_length: int = 0) -> PathElement:
        candidates = [
            p for k in range(min_length, max_length + 1) for p in self._by_length.get(k, [])
        ]
        if not candidates:
            return self.paths.zero()
        chosen: dict[Path, Frac] = {}
        for p in self.rng.sample(candidates, min(terms, len(candidates))):
            chosen[p] = self.scalar(self.paths.range_class(p))
        return self.paths.element(chosen)

    def eps_zero(self, max_length: int = 2) -> PathElement:
        if self.rng.random() < 0.3:  # noqa: PLR2004
            return self.paths.zero()
        return self.element(max_length, self.rng.randint(1, 2), min_length=1)

    def eps_zero_matrix(self, n: int, max_length: int = 2) -> AlgMatrix:
        return matrix(self.paths, [[self.eps_zero(max_length) for _ in range(n)] for _ in range(n)])

    def rep(self, max_dimension: int = 3) -> LinRep:
        n = self.rng.randint(1, max_dimension)
        return LinRep.from_entries(
            self.paths,
            [self.element(1, 2) for _ in range(n)],
            self.eps_zero_matrix(n).rows,
            [self.element(1, 2) for _ in range(n)],
        )

    def edge(self) -> Edge:
        return self.rng.choice(self.paths.quiver.edges)

    def leavitt(self, algebra: LeavittAlgebra, terms: int = 2) -> LeavittElement:
        "A sum of `c·γμ*` with `|γ|, |μ| ≤ 2`."
        by_range: dict[str, list[Path]] = {}
        for p in self.paths.quiver.paths(2):
            by_range.setdefault(p.range, []).append(p)
        monomials: dict[tuple[Path, Path], Frac] = {}
        for _ in range(terms):
            v = self.rng.choice(self.paths.quiver.vertices)
            gamma, mu = self.rng.choice(by_range[v]), self.rng.choice(by_range[v])
            monomials[gamma, mu] = self.scalar(self.paths.poset.class_of(v))
        return algebra.element(monomials)

    def q_element(self, algebra: QAlgebra, terms: int = 2) -> QElement:
        "A sum of `a_γ γ*` with rational `a_γ` of dimension at most 2 and `|γ| ≤ 1`."
        ghosts = self.paths.quiver.paths(1)
        total = algebra.zero()
        for _ in range(terms):
            gamma = self.rng.choice(ghosts)
            a = rep_anchor(self.rep(2), gamma.range).trim()
            total = q_add(total, QElement(algebra, {gamma: a}))
        return total


@dataclass
class Tally:
    name: str
    checks: int = 0
    passed: int = 0
    skipped: str | None = None
    failures: list[Failure] = field(default_factory=list)

    def record(self, prop: str, ok: bool, **counterexample: object) -> None:  # noqa: FBT001
        self.checks += 1
        if ok:
            self.passed += 1
            return
        log.warning("%s: %s failed on %s", self.name, prop, counterexample)
        self.failures.append(
            Failure(property=prop, counterexample={k: str(v) for k, v in counterexample.items()})
        )

    def attempt(self, prop: str, check: Callable[[], bool], **counterexample: object) -> None:
        "Record `check()`, counting a library error as a failure."
        try:
            ok = check()
        except PathlocError as err:
            counterexample["error"] = err
            ok = False
        self.record(prop, ok, **counterexample)

    def result(self) -> SuiteResult:
        return SuiteResult(
            name=self.name,
            checks=self.checks,
            passed=self.passed,
            skipped=self.skipped,
            failures=self.failures,
        )


@dataclass
class SuiteRun:
    config: RunConfig
    spec: GraphSpec
    poset: ComponentPoset
    tally: Tally
    rng: random.Random

    @cached_property
    def paths(self) -> PathAlgebra:
        return PathAlgebra.over(self.poset)

    @cached_property
    def sampler(self) -> Sampler:
        return Sampler(self.paths, self.rng)

    @property
    def degree(self) -> int:
        return self.config.degree

    def samples(self, base: int) -> int:
        return self.config.samples(base)


def hereditary_sets(poset: ComponentPoset) -> list[frozenset[str]]:
    "Vertex sets of the non-empty lower sets of `poset`, principal ones only for large posets."
    classes = poset.classes
    if len(classes) > MAX_LOWER_SET_CLASSES:
        candidates = [poset.lower_set(c) for c in classes]
    else:
        candidates = [
            frozenset(s)
            for k in range(1, len(classes) + 1)
            for s in combinations(classes, k)
            if poset.is_lower_set(s)
        ]

    found: list[frozenset[str]] = []
    for j in candidates:
        h = hereditary_vertices(poset, j)
        if h not in found:
            found.append(h)
    return found


def suite_relations(run: SuiteRun) -> None:
    leavitt = LeavittAlgebra(run.paths)
    for c in check_defining_relations(leavitt):
        run.tally.record(f"leavitt {c.family}", c.holds, relation=c.label)
    for c in check_q_relations(QAlgebra(run.paths, run.degree), run.degree):
        run.tally.record(f"regular {c.family}", c.holds, relation=c.label)


def suite_q_associativity(run: SuiteRun) -> None:
    algebra = QAlgebra(run.paths, run.degree)
    n = run.degree
    for _ in range(run.samples(15)):
        x, y, z = (run.sampler.q_element(algebra) for _ in range(3))
        run.tally.attempt(
            "(xy)z = x(yz)",
            lambda x=x, y=y, z=z: q_equal(
                q_mul(q_mul(x, y, n), z, n), q_mul(x, q_mul(y, z, n), n), max(n - 2, 0)
            ),
            x=x,
            y=y,
            z=z,
        )


def suite_factorization(run: SuiteRun) -> None:
    sets = hereditary_sets(run.poset)
    for _ in range(run.samples(200)):
        b = run.sampler.eps_zero_matrix(run.rng.randint(1, 3))
        for h in sets:
            run.tally.attempt(
                "(I-B)^-1 factorization",
                lambda b=b, h=h: check_inverse_factorization(b, h, run.degree),
                matrix=b,
                hereditary=sorted(h),
            )


def suite_corner(run: SuiteRun) -> None:
    sets = hereditary_sets(run.poset)
    for _ in range(run.samples(100)):
        r = run.sampler.rep()
        h = run.rng.choice(sets)
        run.tally.attempt(
            "corner formula",
            lambda r=r, h=h: corner_formula(r, h, run.degree) is not None,
            row=r.row,
            matrix=r.matrix,
            column=r.column,
            hereditary=sorted(h),
        )


def suite_derivation(run: SuiteRun) -> None:
    if not run.paths.quiver.edges:
        run.tally.skipped = "graph has no edges"
        return
    for _ in range(run.samples(500)):
        e, r, s = run.sampler.edge(), run.sampler.element(), run.sampler.element()
        run.tally.record("right derivation law", check_right_derivation(e, r, s), e=e, r=r, s=s)


def suite_transduction(run: SuiteRun) -> None:
    if not run.paths.quiver.edges:
        run.tally.skipped = "graph has no edges"
        return
    n = run.degree
    for _ in range(run.samples(200)):
        e, r = run.sampler.edge(), run.sampler.rep()

        def check(e: Edge = e, r: LinRep = r) -> bool:
            lhs = expand(transduce_rep(e, r), n - 1)
            return lhs.agrees(transduce(e, expand(r, n)), n - 1)

        run.tally.attempt(
            "transduction of a representation",
            check,
            e=e,
            row=r.row,
            matrix=r.matrix,
            column=r.column,
        )


def suite_witnesses(run: SuiteRun) -> None:
    leavitt = LeavittAlgebra(run.paths)
    for w in vmonoid_generators_check(leavitt, run.config.bound):
        run.tally.record("projective witness", w.idempotents_verified, relation=w.relation)
        run.tally.record("monoid relation", w.monoid_verified, relation=w.relation)
    for a, b in relation_pairs(run.paths.quiver):
        verdict = mon_equal(a, b, run.config.bound, run.config.max_visited)
        ok = isinstance(verdict, Equal) and verdict.depth <= 1 and verdict.replays(a, b)
        run.tally.record("relation at depth 1", ok, left=a, right=b)


def suite_sigma_prime(run: SuiteRun) -> None:
    try:
        assert_tree(run.poset)
    except GraphError as err:
        run.tally.skipped = str(err)
        return

    for _ in range(run.samples(100)):
        a = run.sampler.eps_zero_matrix(run.rng.randint(1, 3))
        run.tally.attempt(
            "Σ′ factorization chain",
            lambda a=a: check_sigma_prime_factorization(
                sigma_prime_decompose(a, run.poset), run.degree
            ),
            matrix=a,
        )

    for v in run.paths.quiver.vertices:
        try:
            loop = free_loop(run.poset, v)
        except NotFreeLoopComponent:
            continue
        _free_loop_checks(run, v, loop)

    if run.spec.has_shape:
        _shape_membership(run)


def _free_loop_checks(run: SuiteRun, v: str, loop: Edge) -> None:
    paths, quiver = run.paths, run.paths.quiver
    cls = run.poset.class_of(v)

    def loop_power(k: int) -> Path:
        return quiver.trivial(v) if k == 0 else quiver.path(*[loop.id] * k)

    for _ in range(run.samples(50)):
        top = run.rng.randint(1, 3)
        p = paths.element({loop_power(k): run.sampler.scalar(cls) for k in range(top + 1)})
        run.tally.attempt(
            "free polynomial inverse",
            lambda p=p: invert_free_polynomial(v, p, run.degree) is not None,
            vertex=v,
            p=p,
        )

    for _ in range(run.samples(10)):
        n = run.rng.randint(1, 2)
        entries = [
            paths.path(loop_power(run.rng.randint(1, 2)), run.sampler.scalar(cls))
            for _ in range(n * n)
        ]
        a = matrix(paths, [entries[i * n : (i + 1) * n] for i in range(n)])
        run.tally.attempt(
            "det(I - A′) has constant term v",
            lambda a=a: determinant_remark_check(v, a).constant_is_one,
            vertex=v,
            matrix=a,
        )


def _shape_membership(run: SuiteRun) -> None:
    shape = run.spec.shape(run.poset)
    for c in sorted(shape.regular, key=run.poset.classes.index):
        corner = matrix(run.paths, [[run.paths.p_set(run.poset.members[c])]])
        run.tally.attempt(
            "regular corner unit in Σ_i",
            lambda m=corner, c=c: sigma_prime_member(m, c, shape),
            component=c,
        )


def _random_tree(rng: random.Random) -> ComponentPoset:
    k = rng.randint(1, 6)
    vertices = tuple(f"c{i}" for i in range(k))
    edges = tuple(Edge(f"t{i}", f"c{rng.randrange(i)}", f"c{i}") for i in range(1, k))
    return condense(Quiver(vertices, edges))


def suite_amalgamation(run: SuiteRun) -> None:
    for _ in range(run.samples(20)):
        poset = _random_tree(run.rng)
        tower = FieldTower(poset)
        amalgamation = amalgamate(tower)
        for i in poset.classes:
            for j in poset.up_chain(i):
                field_ = tower.subfield(j)
                value = field_(run.rng.randint(-3, 3))
                for g in field_.gens:
                    value += run.rng.randint(-2, 2) * g
                if run.rng.random() < 0.5:  # noqa: PLR2004
                    value /= field_.gens[0] + 1
                run.tally.attempt(
                    "embedding square",
                    lambda i=i, j=j, x=value: amalgamation.square_commutes(i, j, x),
                    lower=i,
                    upper=j,
                    value=value,
                )


def suite_confluence(run: SuiteRun) -> None:
    leavitt = LeavittAlgebra(run.paths)
    for n in range(run.samples(300)):
        a, b = run.sampler.leavitt(leavitt), run.sampler.leavitt(leavitt)
        first = le_mul(a, b, random.Random(2 * n))  # noqa: S311
        second = le_mul(a, b, random.Random(2 * n + 1))  # noqa: S311
        run.tally.record("reduction order independence", first == second, a=a, b=b)


def suite_scalars(run: SuiteRun) -> None:
    tower = run.paths.tower
    classes = run.poset.classes
    for _ in range(run.samples(100)):
        i, j = run.rng.choice(classes), run.rng.choice(classes)
        s, t = tower.of(run.sampler.scalar(i), i), tower.of(run.sampler.scalar(j), j)
        if not run.poset.comparable(i, j):
            continue

        total = scalar_add(s, t)
        fits = tower.fits(total.value, total.home)
        run.tally.record("sum lives in the deeper field", fits, s=s, t=t)
        if not s.is_zero:
            run.tally.attempt(
                "inverse", lambda s=s: mul(s, inv(s)).value == tower.field.one, s=s
            )
        below = [c for c in classes if run.poset.le(c, s.home)]
        target = run.rng.choice(below)
        run.tally.attempt(
            "coercion into a larger field",
            lambda s=s, c=target: coerce(s, c).value == s.value,
            s=s,
            target=target,
        )


def suite_pathalg(run: SuiteRun) -> None:
    paths = run.paths
    for _ in range(run.samples(100)):
        a, b, c = (run.sampler.element(2, 2) for _ in range(3))
        run.tally.record(
            "associativity", pe_mul(pe_mul(a, b), c) == pe_mul(a, pe_mul(b, c)), a=a, b=b, c=c
        )
        run.tally.record(
            "distributivity",
            pe_mul(a, pe_add(b, c)) == pe_add(pe_mul(a, b), pe_mul(a, c)),
            a=a,
            b=b,
            c=c,
        )
        run.tally.record("unit", pe_mul(paths.one(), a) == a == pe_mul(a, paths.one()), a=a)

        unit = paths.element(
            {
                paths.quiver.trivial(v): run.sampler.scalar(run.poset.class_of(v))
                for v in paths.quiver.vertices
            }
        )
        x = pe_add(unit, run.sampler.eps_zero())
        run.tally.attempt(
            "truncated inverse",
            lambda x=x: pe_mul(x, invert_element(x, run.degree)).agrees(paths.one(), run.degree),
            x=x,
        )


def suite_monoid(run: SuiteRun) -> None:
    quiver = run.paths.quiver
    for a, b in relation_pairs(quiver):
        verdict = mon_equal(a, b, run.config.bound, run.config.max_visited)
        ok = isinstance(verdict, Equal) and verdict.replays(a, b)
        run.tally.record("defining relation", ok, left=a, right=b)

    for _ in range(run.samples(30)):
        a = element(quiver, {v: run.rng.randint(0, 2) for v in quiver.vertices})
        run.tally.record("reflexivity", isinstance(mon_equal(a, a, 0), Equal), a=a)
        moves = applicable(a)
        for v, w in combinations(moves, 2):
            run.tally.record(
                "local confluence",
                local_confluence_check(a, v, w, run.config.bound, run.config.max_visited),
                a=a,
                v=v,
                w=w,
            )


SUITES: dict[str, Callable[[SuiteRun], None]] = {
    "relations": suite_relations,
    "q-associativity": suite_q_associativity,
    "factorization": suite_factorization,
    "corner": suite_corner,
    "derivation": suite_derivation,
    "transduction": suite_transduction,
    "witnesses": suite_witnesses,
    "sigma-prime": suite_sigma_prime,
    "amalgamation": suite_amalgamation,
    "confluence": suite_confluence,
    "scalars": suite_scalars,
    "pathalg": suite_pathalg,
    "monoid": suite_monoid,
}


def run_suite(name: str, config: RunConfig, spec: GraphSpec, poset: ComponentPoset) -> SuiteResult:
    if name not in SUITES:
        msg = f"Unknown suite {name}; expected one of {', '.join(SUITES)}"
        raise NotApplicable(msg)

    rng = random.Random(f"{config.seed}:{name}")  # noqa: S311
    run = SuiteRun(config, spec, poset, Tally(name), rng)
    log.info("suite %s started", name)
    SUITES[name](run)
    log.info("suite %s: %d/%d passed", name, run.tally.passed, run.tally.checks)
    return run.tally.result()


def run_suites(config: RunConfig, spec: GraphSpec) -> VerifyReport:
    poset = spec.poset()
    names = list(SUITES) if config.suite == "all" else [config.suite]
    return VerifyReport(
        graph=str(config.graph),
        seed=config.seed,
        degree=config.degree,
        suites=[run_suite(name, config, spec, poset) for name in names],
    )
