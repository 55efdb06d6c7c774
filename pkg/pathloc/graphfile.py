"""
Graph text format.

One declaration per line; `#` starts a comment:

    vertex <id>
    edge <id> <src> <dst>
    component <class-id> <vertex>...
    order <classA> > <classB>
    free <class>
    regular <class>
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING

from pathloc.errors import InvalidQuiver, ParseError
from pathloc.quiver import AbpShape, ComponentPoset, Edge, Quiver, condense, validate_abp_shape

if TYPE_CHECKING:
    from collections.abc import Mapping

IDENT = r"[A-Za-z_][A-Za-z0-9_]*"


class Declaration(Enum):
    VERTEX = "vertex"
    EDGE = "edge"
    COMPONENT = "component"
    ORDER = "order"
    FREE = "free"
    REGULAR = "regular"


PATTERNS = {
    Declaration.VERTEX: rf"vertex\s+({IDENT})",
    Declaration.EDGE: rf"edge\s+({IDENT})\s+({IDENT})\s+({IDENT})",
    Declaration.COMPONENT: rf"component\s+({IDENT})((?:\s+{IDENT})+)",
    Declaration.ORDER: rf"order\s+({IDENT})\s*>\s*({IDENT})",
    Declaration.FREE: rf"free\s+({IDENT})",
    Declaration.REGULAR: rf"regular\s+({IDENT})",
}

_COMPILED = {d: re.compile(p) for d, p in PATTERNS.items()}


@dataclass(frozen=True)
class GraphSpec:
    quiver: Quiver
    partition: Mapping[str, tuple[str, ...]] | None = None
    order: tuple[tuple[str, str], ...] = ()
    free: frozenset[str] = field(default_factory=frozenset)
    regular: frozenset[str] = field(default_factory=frozenset)

    @property
    def has_shape(self) -> bool:
        return bool(self.free or self.regular)

    def poset(self) -> ComponentPoset:
        return condense(self.quiver, self.partition, self.order)

    def shape(self, poset: ComponentPoset | None = None) -> AbpShape:
        p = self.poset() if poset is None else poset
        return validate_abp_shape(self.quiver, p, self.free, self.regular)


def parse_graph(text: str) -> GraphSpec:
    vertices: list[str] = []
    edges: list[Edge] = []
    partition: dict[str, tuple[str, ...]] = {}
    order: list[tuple[str, str]] = []
    free: set[str] = set()
    regular: set[str] = set()
    lines: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        for declaration, regex in _COMPILED.items():
            match = regex.fullmatch(line)
            if match:
                break
        else:
            msg = f"Unrecognised declaration: {line!r}"
            raise ParseError(msg, line=lineno)

        match declaration:
            case Declaration.VERTEX:
                vertices.append(match.group(1))
                lines[match.group(1)] = lineno
            case Declaration.EDGE:
                edges.append(Edge(match.group(1), match.group(2), match.group(3)))
                lines[match.group(1)] = lineno
            case Declaration.COMPONENT:
                name = match.group(1)
                if name in partition:
                    msg = f"Component {name} declared twice"
                    raise ParseError(msg, line=lineno)
                partition[name] = tuple(match.group(2).split())
            case Declaration.ORDER:
                order.append((match.group(1), match.group(2)))
            case Declaration.FREE:
                free.add(match.group(1))
            case Declaration.REGULAR:
                regular.add(match.group(1))

    try:
        quiver = Quiver(tuple(vertices), tuple(edges))
    except InvalidQuiver as err:
        raise ParseError(str(err), line=lines[err.identifier]) from err

    return GraphSpec(
        quiver,
        partition or None,
        tuple(order),
        frozenset(free),
        frozenset(regular),
    )


def load_graph(path: Path) -> GraphSpec:
    return parse_graph(Path(path).read_text())
