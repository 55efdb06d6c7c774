from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import override

import networkx as nx

from pathloc.errors import (
    GraphError,
    IncompatiblePartition,
    InvalidQuiver,
    NotATree,
    NotHereditary,
    NotLowerSet,
    ShapeViolation,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    range: str

    @override
    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class Path:
    """
    A path `e_1 ... e_n` with `r(e_t) = s(e_{t+1})`.

    Trivial paths have no edges and are anchored at a vertex, so `source == range`.
    """

    edges: tuple[str, ...]
    source: str
    range: str

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def is_trivial(self) -> bool:
        return not self.edges

    @override
    def __str__(self) -> str:
        if self.is_trivial:
            return self.source
        return ".".join(self.edges)


@dataclass(frozen=True)
class Quiver:
    """A finite quiver `E = (E^0, E^1, r, s)`; declaration order is the iteration order."""

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for name in (*self.vertices, *(e.id for e in self.edges)):
            if name in seen:
                msg = f"Identifier {name} is declared twice"
                raise InvalidQuiver(msg, identifier=name)
            seen.add(name)

        known = set(self.vertices)
        for e in self.edges:
            if e.source not in known or e.range not in known:
                msg = f"Edge {e.id} joins undeclared vertices {e.source} -> {e.range}"
                raise InvalidQuiver(msg, identifier=e.id)

    @cached_property
    def _edges_by_id(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _edge_index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def _out_edges(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.source].append(e)
        return {v: tuple(es) for v, es in out.items()}

    def has_vertex(self, v: str) -> bool:
        return v in self._vertex_index

    def has_edge(self, e: str) -> bool:
        return e in self._edges_by_id

    def edge(self, e: str) -> Edge:
        try:
            return self._edges_by_id[e]
        except KeyError:
            msg = f"Unknown edge {e}"
            raise GraphError(msg) from None

    def out_edges(self, v: str) -> tuple[Edge, ...]:
        return self._out_edges[v]

    def is_sink(self, v: str) -> bool:
        return not self._out_edges[v]

    def sinks(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if self.is_sink(v))

    def trivial(self, v: str) -> Path:
        if v not in self._vertex_index:
            msg = f"Unknown vertex {v}"
            raise GraphError(msg)
        return Path((), v, v)

    def path(self, *edge_ids: str) -> Path:
        "Build a path from edge ids, checking that consecutive edges compose."
        if not edge_ids:
            msg = "A non-trivial path needs at least one edge; use trivial() for vertices"
            raise GraphError(msg)

        edges = [self.edge(e) for e in edge_ids]
        for prev, curr in zip(edges, edges[1:], strict=False):
            if prev.range != curr.source:
                msg = f"Edges {prev.id} and {curr.id} do not compose"
                raise GraphError(msg)

        return Path(tuple(edge_ids), edges[0].source, edges[-1].range)

    def concat(self, p: Path, q: Path) -> Path | None:
        "The product `pq`, or None when `r(p) != s(q)`."
        if p.range != q.source:
            return None
        if p.is_trivial:
            return q
        if q.is_trivial:
            return p
        return Path(p.edges + q.edges, p.source, q.range)

    def path_key(self, p: Path) -> tuple[int, tuple[int, ...], int]:
        "Deterministic order on paths: by length, then edges in file order."
        return (p.length, tuple(self._edge_index[e] for e in p.edges), self._vertex_index[p.source])

    def vertex_key(self, v: str) -> int:
        return self._vertex_index[v]

    def paths(self, max_length: int, source: str | None = None) -> list[Path]:
        "All paths of length at most `max_length`, optionally starting at `source`."
        starts = self.vertices if source is None else (source,)
        layer = [self.trivial(v) for v in starts]
        found = list(layer)

        for _ in range(max_length):
            layer = [
                Path((*p.edges, e.id), p.source, e.range)
                for p in layer
                for e in self.out_edges(p.range)
            ]
            found.extend(layer)

        return found

    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from((e.source, e.range) for e in self.edges)
        return g

    def reachable(self, v: str) -> frozenset[str]:
        "Vertices `w` with a path from `v` to `w`, including `v` itself."
        return frozenset(nx.descendants(self.digraph(), v)) | {v}

    def is_hereditary(self, vertices: Iterable[str]) -> bool:
        h = set(vertices)
        return all(e.range in h for e in self.edges if e.source in h)

    def crossing_edges(self, vertices: Iterable[str]) -> tuple[Edge, ...]:
        "Edges leaving the complement of `vertices` and landing inside it."
        h = set(vertices)
        return tuple(e for e in self.edges if e.source not in h and e.range in h)

    def restriction(self, vertices: Iterable[str]) -> Quiver:
        "The graph on `vertices` with every edge whose ends both lie in it."
        keep = set(vertices)
        return Quiver(
            tuple(v for v in self.vertices if v in keep),
            tuple(e for e in self.edges if e.source in keep and e.range in keep),
        )


@dataclass(frozen=True)
class ComponentPoset:
    """
    The antisymmetrization `I` of a pre-order on `E^0` compatible with reachability.

    `less` holds the strict order as pairs `(lower, upper)`, already transitively closed.
    """

    quiver: Quiver
    classes: tuple[str, ...]
    members: Mapping[str, tuple[str, ...]]
    less: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    @cached_property
    def _class_of(self) -> dict[str, str]:
        return {v: c for c, vs in self.members.items() for v in vs}

    def class_of(self, v: str) -> str:
        return self._class_of[v]

    def lt(self, i: str, j: str) -> bool:
        return (i, j) in self.less

    def le(self, i: str, j: str) -> bool:
        return i == j or (i, j) in self.less

    def comparable(self, i: str, j: str) -> bool:
        return self.le(i, j) or self.le(j, i)

    def maxima(self) -> tuple[str, ...]:
        return tuple(c for c in self.classes if not any(self.lt(c, d) for d in self.classes))

    def is_minimal(self, i: str) -> bool:
        return not any(self.lt(j, i) for j in self.classes)

    @property
    def root(self) -> str:
        maxima = self.maxima()
        if len(maxima) != 1:
            msg = f"Expected a unique maximum, found {len(maxima)}: {', '.join(maxima)}"
            raise NotATree(msg, witness=maxima)
        return maxima[0]

    def up_chain(self, i: str) -> tuple[str, ...]:
        "The interval `[i, i_0]`, deepest first."
        above = [j for j in self.classes if self.le(i, j)]
        return tuple(sorted(above, key=lambda j: len(self.lower_set(j))))

    def lower_set(self, i: str) -> frozenset[str]:
        "`I↓i`, the principal lower set of `i`."
        return frozenset(j for j in self.classes if self.le(j, i))

    def lower_covers(self, i: str) -> tuple[str, ...]:
        below = [j for j in self.classes if self.lt(j, i)]
        return tuple(j for j in below if not any(self.lt(j, k) and self.lt(k, i) for k in below))

    def is_lower_set(self, classes: Iterable[str]) -> bool:
        j = set(classes)
        return all(k in j for i in j for k in self.classes if self.lt(k, i))

    def maximal_elements(self, classes: Iterable[str]) -> tuple[str, ...]:
        j = set(classes)
        return tuple(c for c in self.classes if c in j and not any(self.lt(c, d) for d in j))

    def depth(self) -> int:
        "Length of the longest chain `i_k < ... < i_0`."
        g = nx.DiGraph()
        g.add_nodes_from(self.classes)
        g.add_edges_from((upper, lower) for lower, upper in self.less)
        return nx.dag_longest_path_length(g)

    def vertices_of(self, classes: Iterable[str]) -> frozenset[str]:
        return frozenset(v for c in classes for v in self.members[c])

    def component_graph(self, i: str) -> Quiver:
        "`E[v]` for `[v] = i`."
        return self.quiver.restriction(self.members[i])

    def subtree(self, i: str) -> ComponentPoset:
        "The poset `I↓i` over the hereditary restriction `E_{I↓i}`, rooted at `i`."
        keep = self.lower_set(i)
        return ComponentPoset(
            self.quiver.restriction(self.vertices_of(keep)),
            tuple(c for c in self.classes if c in keep),
            {c: self.members[c] for c in self.classes if c in keep},
            frozenset((a, b) for a, b in self.less if a in keep and b in keep),
        )


@dataclass(frozen=True)
class AbpShape:
    free: frozenset[str]
    regular: frozenset[str]
    components: Mapping[str, Quiver]

    def loop_of(self, i: str) -> Edge | None:
        "The loop `α^v` of a free component with a single loop, if any."
        graph = self.components[i]
        if i in self.free and len(graph.vertices) == 1 and len(graph.edges) == 1:
            return graph.edges[0]
        return None


def condense(
    q: Quiver,
    partition: Mapping[str, Iterable[str]] | None = None,
    extra_order: Iterable[tuple[str, str]] = (),
) -> ComponentPoset:
    """
    Build the component poset of `q`.

    Without a partition the classes are the strongly connected components, each named by its
    first vertex in file order. A partition may merge vertices into coarser classes; vertices
    it leaves out become singletons. `extra_order` holds pairs `(upper, lower)` declared on top
    of reachability.
    """

    if partition is None:
        sccs = nx.strongly_connected_components(q.digraph())
        groups = [sorted(c, key=q.vertex_key) for c in sccs]
        members = {g[0]: tuple(g) for g in sorted(groups, key=lambda g: q.vertex_key(g[0]))}
    else:
        members = _members_from_partition(q, partition)

    class_of = {v: c for c, vs in members.items() for v in vs}
    classes = tuple(members)

    g = nx.DiGraph()
    g.add_nodes_from(classes)
    for e in q.edges:
        if class_of[e.source] != class_of[e.range]:
            g.add_edge(class_of[e.source], class_of[e.range])
    for upper, lower in extra_order:
        for c in (upper, lower):
            if c not in members:
                msg = f"Order refers to unknown class {c}"
                raise GraphError(msg)
        if upper != lower:
            g.add_edge(upper, lower)

    if not nx.is_directed_acyclic_graph(g):
        cycle = nx.find_cycle(g)
        upper, lower = cycle[0][0], cycle[0][1]
        msg = (
            f"Class {lower} is reachable from {upper} and back; "
            "the partition is not compatible with paths"
        )
        raise IncompatiblePartition(msg, source=upper, target=lower)

    closure = nx.transitive_closure_dag(g)
    less = frozenset((lower, upper) for upper, lower in closure.edges)

    log.debug("condensed %d vertices into %d classes", len(q.vertices), len(classes))
    return ComponentPoset(q, classes, members, less)


def _members_from_partition(
    q: Quiver, partition: Mapping[str, Iterable[str]]
) -> dict[str, tuple[str, ...]]:
    members: dict[str, tuple[str, ...]] = {}
    seen: set[str] = set()

    for c, vs in partition.items():
        group = tuple(vs)
        for v in group:
            if not q.has_vertex(v):
                msg = f"Component {c} lists unknown vertex {v}"
                raise GraphError(msg)
            if v in seen:
                msg = f"Vertex {v} is listed in more than one component"
                raise GraphError(msg)
            seen.add(v)
        members[c] = tuple(sorted(group, key=q.vertex_key))

    for v in q.vertices:
        if v not in seen:
            if v in members:
                msg = f"Vertex {v} is unassigned but its name is taken by a component"
                raise GraphError(msg)
            members[v] = (v,)

    return dict(sorted(members.items(), key=lambda kv: q.vertex_key(kv[1][0])))


def assert_tree(p: ComponentPoset) -> None:
    "Raise `NotATree` unless `p` has a maximum and every `[i, i_0]` is a chain."
    root = p.root

    for i in p.classes:
        above = [j for j in p.classes if p.le(i, j)]
        for a, b in combinations(above, 2):
            if not p.comparable(a, b):
                msg = f"Classes {a} and {b} are incomparable but both lie above {i}"
                raise NotATree(msg, witness=(a, b))

    log.debug("tree with root %s and %d classes", root, len(p.classes))


def lower_set(p: ComponentPoset, i: str) -> frozenset[str]:
    if i not in p.members:
        msg = f"Unknown class {i}"
        raise GraphError(msg)
    return p.lower_set(i)


def hereditary_vertices(p: ComponentPoset, classes: Iterable[str]) -> frozenset[str]:
    "`E^0_J` for a lower set `J`."
    j = set(classes)

    missing = tuple(k for k in p.classes if k not in j and any(p.lt(k, i) for i in j))
    if missing:
        msg = f"Not a lower set; missing {', '.join(missing)}"
        raise NotLowerSet(msg, missing=missing)

    vertices = p.vertices_of(j)
    if not p.quiver.is_hereditary(vertices):
        msg = "Vertex set of a lower set is not hereditary; the order is not compatible"
        raise NotHereditary(msg)
    return vertices


def validate_abp_shape(
    q: Quiver, p: ComponentPoset, free: Iterable[str], regular: Iterable[str]
) -> AbpShape:
    """
    Check the four shape conditions on a partition `I = I_free ⊔ I_reg`.

    1. the partition covers `I` with disjoint parts;
    2. a non-minimal free component is a single vertex with a single loop;
    3. a regular component has at least two edges;
    4. a minimal component is a sink or regular.
    """

    free_set, regular_set = frozenset(free), frozenset(regular)
    violations: list[tuple[str, int, str]] = []

    for c in sorted(free_set | regular_set):
        if c not in p.members:
            violations.append((c, 1, "unknown component"))
    for c in p.classes:
        if c in free_set and c in regular_set:
            violations.append((c, 1, "declared both free and regular"))
        elif c not in free_set and c not in regular_set:
            violations.append((c, 1, "declared neither free nor regular"))

    components = {c: p.component_graph(c) for c in p.classes}

    for c in p.classes:
        graph = components[c]
        minimal = p.is_minimal(c)

        if c in free_set and not minimal:
            single_loop = len(graph.vertices) == 1 and len(graph.edges) == 1
            if not single_loop:
                violations.append((c, 2, "free component is not a single vertex with one loop"))

        if c in regular_set and len(graph.edges) < 2:  # noqa: PLR2004
            violations.append((c, 3, f"regular component has {len(graph.edges)} edge(s)"))

        if minimal and c not in regular_set and not all(q.is_sink(v) for v in p.members[c]):
            violations.append((c, 4, "minimal component is neither a sink nor regular"))

    if violations:
        summary = "; ".join(f"{c}: clause ({n}) {why}" for c, n, why in violations)
        msg = f"Shape violated: {summary}"
        raise ShapeViolation(msg, violations=tuple(violations))

    return AbpShape(free_set, regular_set, components)
