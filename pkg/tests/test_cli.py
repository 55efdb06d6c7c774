import json
from pathlib import Path

import pytest

from pathloc.cli import main

GRAPHS = Path(__file__).parent.parent / "graphs"


def test_validate(capsys: pytest.CaptureFixture[str]) -> None:
    code = main(["validate", str(GRAPHS / "toeplitz.graph")])

    assert code == 0
    assert capsys.readouterr().out.splitlines() == [
        "2 vertices, 3 edges, 2 components",
        "  [u] = {u} > v",
        "  [v] = {v}",
        "tree ok: root u, depth 1",
    ]


def test_validate_rejects_a_forest(capsys: pytest.CaptureFixture[str]) -> None:
    code = main(["validate", str(GRAPHS / "two_maximal.graph"), "--json"])

    report = json.loads(capsys.readouterr().out)
    assert code == 1
    assert report["schema"] == 1
    assert not report["tree"]
    assert report["root"] is None
    assert report["tree_error"].startswith("NotATree")


def test_validate_shape(capsys: pytest.CaptureFixture[str]) -> None:
    code = main(["validate", str(GRAPHS / "shaped.graph")])

    assert code == 0
    assert capsys.readouterr().out.splitlines()[-1] == "shape ok"


@pytest.mark.parametrize(
    ("graph", "args", "expected"),
    [
        ("rose2.graph", ["eval", "~e1 . e1"], "w"),
        ("rose2.graph", ["eval", "e2 . ~e2"], "w - e1.~e1"),
        ("toeplitz.graph", ["eval", "alpha . f - f"], "-f + alpha.f"),
        (
            "toeplitz.graph",
            ["invert", "1 - x_u*alpha", "--degree", "3"],
            "u + v + x_u*alpha + x_u**2*alpha.alpha + x_u**3*alpha.alpha.alpha + O(4)",
        ),
        (
            "rose2.graph",
            ["monoid-eq", "w", "2w"],
            "equal: both rewrite to 2w (depth 1)\n1 generators, 1 relations",
        ),
        (
            "two_maximal.graph",
            ["monoid-eq", "a", "2c"],
            "not equal: the rewriting closures are finite and disjoint\n"
            "3 generators, 2 relations",
        ),
    ],
)
def test_commands(
    capsys: pytest.CaptureFixture[str], graph: str, args: list[str], expected: str
) -> None:
    code = main([args[0], str(GRAPHS / graph), *args[1:]])

    assert code == 0
    assert capsys.readouterr().out == expected + "\n"


def test_eval_json(capsys: pytest.CaptureFixture[str]) -> None:
    main(["eval", str(GRAPHS / "rose2.graph"), "e2 . ~e2", "--json"])

    report = json.loads(capsys.readouterr().out)
    assert report["schema"] == 1
    assert report["algebra"] == "leavitt"
    assert report["value"] == "w - e1.~e1"
    assert report["representation"] is None


def test_eval_q_json(capsys: pytest.CaptureFixture[str]) -> None:
    main(["eval", str(GRAPHS / "toeplitz.graph"), "f", "--algebra", "q", "--json"])

    report = json.loads(capsys.readouterr().out)
    assert report["algebra"] == "q"
    assert list(report["representation"]["terms"]) == ["v"]


def test_decompose(capsys: pytest.CaptureFixture[str]) -> None:
    code = main(["decompose", str(GRAPHS / "toeplitz.graph"), "[[alpha + f . beta, f], [0, beta]]"])

    lines = capsys.readouterr().out.splitlines()
    assert code == 0
    assert lines[0] == "A₀ (u) = [[alpha, 0], [0, 0]]"
    assert lines[1] == "B = [[f.beta, f], [0, 0]]"
    assert lines[2] == "A_v = [[0, 0], [0, beta]]"
    assert lines[-1] == "factorization holds modulo degree 8"


def test_verify_is_deterministic(capsys: pytest.CaptureFixture[str]) -> None:
    args = ["verify", str(GRAPHS / "toeplitz.graph"), "--suite", "monoid", "--trials", "0.2"]

    assert main([*args, "--json", "--seed", "5"]) == 0
    first = capsys.readouterr().out
    assert main([*args, "--json", "--seed", "5"]) == 0
    second = capsys.readouterr().out

    assert first == second
    assert json.loads(first)["suites"][0]["name"] == "monoid"


def test_graph_errors(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    broken = tmp_path / "broken.graph"
    broken.write_text("vertex w\nedge e1 w z\n")

    assert main(["validate", str(broken)]) == 1
    assert capsys.readouterr().err.startswith("error: ")

    assert main(["validate", str(broken), "--json"]) == 1
    assert json.loads(capsys.readouterr().out)["kind"] == "ParseError"

    assert main(["validate", str(tmp_path / "missing.graph")]) == 1


def test_bad_expression(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["eval", str(GRAPHS / "rose2.graph"), "w +"]) == 1
    assert "column" in capsys.readouterr().err
