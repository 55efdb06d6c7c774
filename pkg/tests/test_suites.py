import random
from pathlib import Path

import pytest

from pathloc.config import Command, RunConfig
from pathloc.errors import NotApplicable
from pathloc.graphfile import GraphSpec, load_graph
from pathloc.pathalg import PathAlgebra
from pathloc.suites import Sampler, hereditary_sets, run_suite, run_suites

GRAPHS = Path(__file__).parent.parent / "graphs"


@pytest.mark.parametrize(
    ("graph", "suite"),
    [
        ("toeplitz.graph", "relations"),
        ("rose2.graph", "q-associativity"),
        ("tree3.graph", "q-associativity"),
        ("rose2.graph", "relations"),
        ("toeplitz.graph", "witnesses"),
        ("tree3.graph", "monoid"),
        ("toeplitz.graph", "confluence"),
        ("tree3.graph", "scalars"),
        ("toeplitz.graph", "pathalg"),
        ("toeplitz.graph", "derivation"),
        ("shaped.graph", "sigma-prime"),
    ],
)
def test_suite_passes(graph: str, suite: str) -> None:
    config, spec = make_run(graph, suite)

    result = run_suite(suite, config, spec, spec.poset())

    assert result.checks > 0
    assert result.passed == result.checks
    assert result.ok


def test_sigma_prime_needs_a_tree() -> None:
    config, spec = make_run("two_maximal.graph", "sigma-prime")

    result = run_suite("sigma-prime", config, spec, spec.poset())

    assert result.skipped
    assert result.checks == 0


def test_unknown_suite() -> None:
    config, spec = make_run("rose2.graph", "relations")

    with pytest.raises(NotApplicable):
        run_suite("nonsense", config, spec, spec.poset())


def test_runs_are_reproducible() -> None:
    config, spec = make_run("toeplitz.graph", "factorization")

    first = run_suites(config, spec)
    second = run_suites(config, spec)

    assert [s.name for s in first.suites] == ["factorization"]
    assert first.to_json() == second.to_json()


def test_hereditary_sets() -> None:
    spec = load_graph(GRAPHS / "toeplitz.graph")

    assert hereditary_sets(spec.poset()) == [frozenset({"v"}), frozenset({"u", "v"})]


def test_sampler_respects_range_fields() -> None:
    spec = load_graph(GRAPHS / "tree3.graph")
    paths = PathAlgebra.over(spec.poset())
    sampler = Sampler(paths, random.Random(7))  # noqa: S311

    for _ in range(20):
        a = sampler.element()
        for p, c in a.terms.items():
            assert paths.tower.fits(c, paths.range_class(p))


def make_run(graph: str, suite: str) -> tuple[RunConfig, GraphSpec]:
    path = GRAPHS / graph
    config = RunConfig(
        graph=path, command=Command.VERIFY, suite=suite, trials=0.1, degree=4, seed=3
    )
    return config, load_graph(path)
