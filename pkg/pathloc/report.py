"""
Versioned report models for the CLI and the JSON form of rational representations.

Every report carries `"schema": 1`. Field order is declaration order and every list is
built in file order, so equal configurations serialize to equal bytes.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Literal

from pydantic import BaseModel, ConfigDict, Field

from pathloc.errors import ParseError
from pathloc.evaluator import AlgebraKind, Context, element_of, evaluate
from pathloc.parser import parse
from pathloc.pathalg import PathElement, exact
from pathloc.ratseries import LinRep
from pathloc.qalg import QAlgebra, QElement

if TYPE_CHECKING:
    from pathloc.pathalg import PathAlgebra
    from pathloc.quiver import Path, Quiver


class Report(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    schema_version: Literal[1] = Field(default=1, alias="schema")

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, by_alias=True)


class ErrorReport(Report):
    error: str
    kind: str


class ComponentEntry(BaseModel):
    id: str
    vertices: list[str]
    below: list[str]


class ShapeEntry(BaseModel):
    ok: bool
    free: list[str]
    regular: list[str]
    violations: list[str] = []


class ValidateReport(Report):
    vertices: int
    edges: int
    components: list[ComponentEntry]
    root: str | None
    depth: int | None
    tree: bool
    tree_error: str | None = None
    shape: ShapeEntry | None = None

    @property
    def ok(self) -> bool:
        return self.tree and (self.shape is None or self.shape.ok)


class RepModel(BaseModel):
    "A linear representation with element literals as entries."

    dimension: int
    row: list[str]
    matrix: list[list[str]]
    column: list[str]


class QElementModel(BaseModel):
    terms: dict[str, RepModel]


class EvalReport(Report):
    expression: str
    algebra: AlgebraKind
    degree: int
    value: str
    representation: QElementModel | None = None


class MonoidReport(Report):
    left: str
    right: str
    verdict: Literal["equal", "not-equal", "unknown"]
    witness: str | None = None
    left_steps: list[str] = []
    right_steps: list[str] = []
    visited: int | None = None
    bound: int
    presentation: str


class DecomposeReport(Report):
    matrix: str
    root: str
    a0: str
    b: str
    parts: dict[str, str]
    factorization_holds: bool
    degree: int


class Failure(BaseModel):
    property: str
    counterexample: dict[str, str]


class SuiteResult(BaseModel):
    name: str
    checks: int
    passed: int
    skipped: str | None = None
    failures: list[Failure] = []

    @property
    def ok(self) -> bool:
        return not self.failures


class VerifyReport(Report):
    graph: str
    seed: int
    degree: int
    suites: list[SuiteResult]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.suites)


def dump_rep(r: LinRep) -> RepModel:
    return RepModel(
        dimension=r.dimension,
        row=[str(x) for x in r.row.entries()],
        matrix=[[str(x) for x in row] for row in r.matrix.rows],
        column=[str(x) for x in r.column.entries()],
    )


def _literal(paths: PathAlgebra, text: str) -> PathElement:
    ctx = Context(paths, AlgebraKind.PATH)
    value = element_of(evaluate(parse(text), ctx), ctx)
    if not isinstance(value, PathElement):
        msg = f"Expected a path-algebra polynomial, got {text!r}"
        raise ParseError(msg)
    return exact(value)


def load_rep(paths: PathAlgebra, model: RepModel) -> LinRep:
    return LinRep.from_entries(
        paths,
        [_literal(paths, x) for x in model.row],
        [[_literal(paths, x) for x in row] for row in model.matrix],
        [_literal(paths, x) for x in model.column],
    )


def dump_q(x: QElement) -> QElementModel:
    return QElementModel(terms={str(p): dump_rep(r) for p, r in x.sorted_terms()})


def path_from_text(quiver: Quiver, text: str) -> Path:
    "Read `e1.e2` or a vertex name."
    if quiver.has_vertex(text):
        return quiver.trivial(text)
    return quiver.path(*text.split("."))


def load_q(algebra: QAlgebra, model: QElementModel) -> QElement:
    quiver = algebra.paths.quiver
    terms = {
        path_from_text(quiver, p): load_rep(algebra.paths, r) for p, r in model.terms.items()
    }
    return QElement(algebra, terms)
