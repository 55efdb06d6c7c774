"""
The graph monoid `M(E)`: generators `E^0` and relations `v = Σ_{e∈s^{-1}(v)} r(e)`.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, override

from pathloc.errors import NotApplicable, ParseError
from pathloc.leavitt import LeavittAlgebra, projective_witness
from pathloc.lexer import lex
from pathloc.parser import TokenIterator, describe_token
from pathloc.token import TokenType

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

    from pathloc.quiver import Quiver

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MonoidElement:
    """Multiplicities of the vertices, in file order."""

    counts: tuple[int, ...]
    quiver: Quiver = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.counts) != len(self.quiver.vertices):
            msg = "One multiplicity per vertex is required"
            raise ValueError(msg)
        if any(c < 0 for c in self.counts):
            msg = "Multiplicities are natural numbers"
            raise ValueError(msg)

    def at(self, v: str) -> int:
        return self.counts[self.quiver.vertex_key(v)]

    def __add__(self, other: MonoidElement) -> MonoidElement:
        return MonoidElement(
            tuple(a + b for a, b in zip(self.counts, other.counts, strict=True)), self.quiver
        )

    @override
    def __str__(self) -> str:
        pieces = [
            v if c == 1 else f"{c}{v}"
            for v, c in zip(self.quiver.vertices, self.counts, strict=True)
            if c
        ]
        return " + ".join(pieces) if pieces else "0"


def element(quiver: Quiver, counts: Mapping[str, int]) -> MonoidElement:
    for v in counts:
        if not quiver.has_vertex(v):
            msg = f"Unknown vertex {v}"
            raise NotApplicable(msg)
    return MonoidElement(tuple(counts.get(v, 0) for v in quiver.vertices), quiver)


def parse_element(quiver: Quiver, text: str) -> MonoidElement:
    "Read `2u+3v`, `2*u + v` or `0` with the expression lexer."
    tokens = TokenIterator(lex(text))
    if (
        tokens.current_is(TokenType.INTEGER)
        and int(tokens.current.literal) == 0
        and tokens.next_is(TokenType.END_OF_FILE)
    ):
        return element(quiver, {})

    counts: dict[str, int] = {}
    while True:
        n = 1
        if tokens.current_is(TokenType.INTEGER):
            n = int(tokens.current.literal)
            tokens.advance()
            if tokens.current_is(TokenType.ASTERISK):
                tokens.advance()

        vertex = tokens.current
        if vertex.type != TokenType.IDENTIFIER or not quiver.has_vertex(vertex.literal):
            msg = f"Expected a vertex, got {describe_token(vertex)}"
            raise ParseError(msg, column=vertex.column)
        counts[vertex.literal] = counts.get(vertex.literal, 0) + n
        tokens.advance()

        if tokens.current_is(TokenType.END_OF_FILE):
            return element(quiver, counts)
        if not tokens.current_is(TokenType.PLUS):
            msg = f"Expected +, got {describe_token(tokens.current)}"
            raise ParseError(msg, column=tokens.current.column)
        tokens.advance()


def step(a: MonoidElement, v: str) -> MonoidElement:
    "`a - v + Σ_{e∈s^{-1}(v)} r(e)`."
    quiver = a.quiver
    if not quiver.has_vertex(v) or a.at(v) < 1:
        msg = f"{v} does not occur in {a}"
        raise NotApplicable(msg)
    if quiver.is_sink(v):
        msg = f"{v} is a sink"
        raise NotApplicable(msg)

    counts = list(a.counts)
    counts[quiver.vertex_key(v)] -= 1
    for e in quiver.out_edges(v):
        counts[quiver.vertex_key(e.range)] += 1
    return MonoidElement(tuple(counts), quiver)


def applicable(a: MonoidElement) -> list[str]:
    return [v for v in a.quiver.vertices if a.at(v) and not a.quiver.is_sink(v)]


def replay(a: MonoidElement, steps: Iterable[str]) -> MonoidElement:
    for v in steps:
        a = step(a, v)
    return a


@dataclass(frozen=True)
class Equal:
    witness: MonoidElement
    left_steps: tuple[str, ...]
    right_steps: tuple[str, ...]

    @property
    def depth(self) -> int:
        return max(len(self.left_steps), len(self.right_steps))

    def replays(self, a: MonoidElement, b: MonoidElement) -> bool:
        return replay(a, self.left_steps) == self.witness == replay(b, self.right_steps)


@dataclass(frozen=True)
class NotEqual:
    left_closure: int
    right_closure: int


@dataclass(frozen=True)
class Unknown:
    visited: int
    depth: int


type MonoidComparison = Equal | NotEqual | Unknown


@dataclass
class _Search:
    parents: dict[MonoidElement, tuple[MonoidElement, str] | None]
    frontier: deque[MonoidElement]

    @classmethod
    def start(cls, a: MonoidElement) -> _Search:
        return cls({a: None}, deque([a]))

    @property
    def complete(self) -> bool:
        return not self.frontier

    def expand_layer(self) -> list[MonoidElement]:
        found: list[MonoidElement] = []
        layer, self.frontier = self.frontier, deque()
        for a in layer:
            for v in applicable(a):
                b = step(a, v)
                if b not in self.parents:
                    self.parents[b] = (a, v)
                    self.frontier.append(b)
                    found.append(b)
        return found

    def steps_to(self, target: MonoidElement) -> tuple[str, ...]:
        steps: list[str] = []
        parent = self.parents[target]
        while parent is not None:
            previous, v = parent
            steps.append(v)
            parent = self.parents[previous]
        return tuple(reversed(steps))


def mon_equal(
    a: MonoidElement, b: MonoidElement, bound: int = 12, max_visited: int = 100_000
) -> MonoidComparison:
    """
    Bounded search of the one-step rewriting closures of `a` and `b`.

    Rewriting is confluent, so a common descendant proves equality. Two finished closures
    without a common element prove inequality; anything else is `Unknown`.
    """

    left, right = _Search.start(a), _Search.start(b)

    def common() -> Equal | None:
        shared = left.parents.keys() & right.parents.keys()
        if not shared:
            return None
        witness = min(
            shared, key=lambda c: (len(left.steps_to(c)) + len(right.steps_to(c)), c.counts)
        )
        return Equal(witness, left.steps_to(witness), right.steps_to(witness))

    for depth in range(bound + 1):
        if found := common():
            log.debug("equal at depth %d via %s", depth, found.witness)
            return found

        if left.complete and right.complete:
            return NotEqual(len(left.parents), len(right.parents))
        if depth == bound or len(left.parents) + len(right.parents) > max_visited:
            break

        left.expand_layer()
        right.expand_layer()

    return Unknown(len(left.parents) + len(right.parents), bound)


def local_confluence_check(
    a: MonoidElement, v: str, w: str, bound: int = 12, max_visited: int = 100_000
) -> bool:
    "The two one-step rewrites of `a` at `v` and `w` meet again within the bound."
    return isinstance(mon_equal(step(a, v), step(a, w), bound, max_visited), Equal)


@dataclass(frozen=True)
class Relation:
    vertex: str
    value: MonoidElement

    @override
    def __str__(self) -> str:
        return f"{self.vertex} = {self.value}"


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relations: tuple[Relation, ...]

    @property
    def is_free(self) -> bool:
        return not self.relations

    @property
    def note(self) -> str:
        if self.is_free:
            return f"free commutative monoid (Z+)^{len(self.generators)}"
        return f"{len(self.generators)} generators, {len(self.relations)} relations"


def monoid_of_graph(quiver: Quiver) -> Presentation:
    relations = tuple(
        Relation(v, step(element(quiver, {v: 1}), v))
        for v in quiver.vertices
        if not quiver.is_sink(v)
    )
    return Presentation(quiver.vertices, relations)


@dataclass(frozen=True)
class GeneratorWitness:
    relation: Relation
    ranges: tuple[str, ...]
    idempotents_verified: bool
    monoid_verified: bool

    @property
    def verified(self) -> bool:
        return self.idempotents_verified and self.monoid_verified


def vmonoid_generators_check(
    algebra: LeavittAlgebra, bound: int = 12
) -> tuple[GeneratorWitness, ...]:
    """
    For each relation `v = Σ r(e)`, the projective witness in `L_K(E)` and the monoid-side
    equality `v ≡ Σ r(e)`.
    """

    quiver = algebra.quiver
    report: list[GeneratorWitness] = []
    for relation in monoid_of_graph(quiver).relations:
        witness = projective_witness(algebra, relation.vertex)
        counts: dict[str, int] = {}
        for v in witness.ranges():
            counts[v] = counts.get(v, 0) + 1
        target = element(quiver, counts)
        verdict = mon_equal(element(quiver, {relation.vertex: 1}), target, bound)
        report.append(
            GeneratorWitness(
                relation, witness.ranges(), witness.verified, isinstance(verdict, Equal)
            )
        )
    return tuple(report)


def relation_pairs(quiver: Quiver) -> Sequence[tuple[MonoidElement, MonoidElement]]:
    return [(element(quiver, {r.vertex: 1}), r.value) for r in monoid_of_graph(quiver).relations]
