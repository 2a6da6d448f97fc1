import json

import pytest
from click.testing import CliRunner

from helper_functions.file_reader import read_graph, write_graph, write_json_atomic
from mbdom_game.cli import EXIT_FAILURES, EXIT_INPUT, EXIT_RESOURCE, cli
from mbdom_game.graphcore import path_graph


@pytest.fixture
def runner(monkeypatch):
    for name in ("MBDOM_WORKERS", "MBDOM_NODE_LIMIT", "MBDOM_MEMO_CAPACITY", "MBDOM_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    return CliRunner()


# -------------------- SOLVE --------------------
@pytest.mark.parametrize(
    "target, expected",
    [("figure:fig2a", "D"), ("figure:fig2b", "N"), ("figure:fig2c", "S"), ("empty:0", "D")],
)
def test_solve_prints_outcome(runner, target, expected):
    result = runner.invoke(cli, ["solve", target])
    assert result.exit_code == 0, result.output
    assert result.output.strip() == f"outcome: {expected}"


def test_solve_with_mover_prints_winner_and_move(runner):
    result = runner.invoke(cli, ["solve", "path:3", "--first", "staller"])
    assert result.exit_code == 0, result.output
    assert result.output.splitlines() == ["winner: staller", "best move: 0"]


def test_solve_json(runner):
    result = runner.invoke(cli, ["solve", "star:3", "--dominator", "0", "--json"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output) == {"outcome": "D"}


def test_solve_reads_claims_from_file(runner, tmp_path):
    path = write_json_atomic(
        tmp_path / "position.json",
        {"n": 2, "edges": [[0, 1]], "staller": [0], "to_move": "staller"},
    )
    result = runner.invoke(cli, ["solve", str(path), "--first", "staller", "--json"])
    assert result.exit_code == 0, result.output
    assert json.loads(result.output)["winner"] == "staller"


def test_solve_reads_edge_list(runner, tmp_path):
    path = write_graph(path_graph(4), tmp_path / "p4.txt")
    result = runner.invoke(cli, ["solve", str(path)])
    assert result.output.strip() == "outcome: D"


def test_solve_missing_file_is_input_error(runner, tmp_path):
    result = runner.invoke(cli, ["solve", str(tmp_path / "nothing.json")])
    assert result.exit_code == EXIT_INPUT


def test_solve_overlapping_claims(runner):
    result = runner.invoke(cli, ["solve", "path:3", "-d", "1", "-s", "1"])
    assert result.exit_code == EXIT_INPUT


def test_solve_unknown_family(runner):
    result = runner.invoke(cli, ["solve", "hypercube:3"])
    assert result.exit_code == EXIT_INPUT


def test_node_limit_exit_code(runner, monkeypatch):
    monkeypatch.setenv("MBDOM_NODE_LIMIT", "1")
    result = runner.invoke(cli, ["solve", "cycle:8"])
    assert result.exit_code == EXIT_RESOURCE


def test_bad_log_level(runner, monkeypatch):
    monkeypatch.setenv("MBDOM_LOG_LEVEL", "LOUD")
    result = runner.invoke(cli, ["solve", "path:2"])
    assert result.exit_code == EXIT_INPUT


# -------------------- SHORT --------------------
@pytest.mark.parametrize(
    "role, k, first, expected",
    [
        ("breaker", 2, "maker", "true"),
        ("breaker", 1, "maker", "false"),
        ("breaker", 1, "breaker", "true"),
        ("maker", 2, "maker", "false"),
    ],
)
def test_short_on_reference_hypergraph(runner, role, k, first, expected):
    result = runner.invoke(cli, ["short", "figure:fig1a", "--role", role, "--k", str(k), "--first", first])
    assert result.exit_code == 0, result.output
    assert result.output.strip() == expected


def test_short_on_graph(runner):
    result = runner.invoke(
        cli, ["short", "empty:2", "--role", "staller", "--k", "1", "--first", "staller", "--json"]
    )
    assert json.loads(result.output)["wins"] is True


def test_short_role_mismatch(runner):
    result = runner.invoke(cli, ["short", "figure:fig1a", "--role", "staller", "--k", "1", "--first", "staller"])
    assert result.exit_code == EXIT_INPUT


# -------------------- KERNELIZE --------------------
def test_kernelize_nd(runner):
    result = runner.invoke(cli, ["kernelize", "clique:5", "--param", "nd", "--json"])
    assert result.exit_code == 0, result.output
    data = json.loads(result.output)
    assert data["graph"]["n"] == 2
    assert data["trace"][0]["rule"] == "replace_module"
    assert data["details"]["twin_classes"] == 1


def test_kernelize_mw_prints_outcome(runner):
    result = runner.invoke(cli, ["kernelize", "figure:fig3", "--param", "mw"])
    assert result.exit_code == 0, result.output
    assert "outcome:" in result.output
    assert "modular_width: 4" in result.output


def test_kernelize_dtc_needs_k(runner):
    result = runner.invoke(cli, ["kernelize", "path:4", "--param", "dtc"])
    assert result.exit_code == EXIT_INPUT


def test_kernelize_dtc_infeasible(runner):
    result = runner.invoke(cli, ["kernelize", "path:6", "--param", "dtc", "--k", "1"])
    assert result.exit_code == EXIT_INPUT


def test_kernelize_fen(runner):
    result = runner.invoke(cli, ["kernelize", "cycle:6", "--param", "fen", "-n", "1", "--json"])
    assert result.exit_code == 0, result.output
    data = json.loads(result.output)
    assert data["details"]["feedback_edge_number"] == 1
    assert data["outcome"] in ("D", "N", "S")


def test_kernelize_p4_with_tree(runner, tmp_path):
    tree = write_json_atomic(
        tmp_path / "tree.json", {"tree": {"kind": "spider", "r": None, "c": [1, 2], "s": [0, 3], "thick": False}}
    )
    result = runner.invoke(cli, ["kernelize", "path:4", "--param", "p4", "--k", "2", "--tree", str(tree)])
    assert result.exit_code == 0, result.output
    assert "outcome: D" in result.output


# -------------------- GADGET / GEN --------------------
def test_gadget_universal(runner):
    result = runner.invoke(cli, ["gadget", "universal", "path:3"])
    assert result.exit_code == 0, result.output
    data = json.loads(result.output)
    assert data["correspondence"]["universal"] == [3]


def test_gadget_staller_from_figure(runner):
    result = runner.invoke(cli, ["gadget", "staller", "figure:fig1a", "--k", "2"])
    assert json.loads(result.output)["graph"]["n"] == 12


def test_gadget_staller_needs_hypergraph(runner):
    result = runner.invoke(cli, ["gadget", "staller", "path:3", "--k", "1"])
    assert result.exit_code == EXIT_INPUT


def test_gen_writes_edge_list(runner, tmp_path):
    out = tmp_path / "cycle.edges"
    result = runner.invoke(cli, ["gen", "cycle:6", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert read_graph(out).edge_count == 6


def test_gen_to_stdout(runner):
    result = runner.invoke(cli, ["gen", "random:8,0.5,3"])
    assert json.loads(result.output)["n"] == 8


@pytest.mark.parametrize(
    "spec, n, m",
    [
        ("attach_path:0,1,7@clique:2", 9, 9),
        ("attach_pending_path:0,3@path:2", 5, 4),
        ("add_universal_vertex@empty:2", 3, 2),
        ("add_universal_vertex@attach_path:0,1,1@clique:2", 4, 6),
    ],
)
def test_gen_builds_on_a_base_graph(runner, spec, n, m):
    result = runner.invoke(cli, ["gen", spec])
    assert result.exit_code == 0, result.output
    data = json.loads(result.output)
    assert (data["n"], len(data["edges"])) == (n, m)


@pytest.mark.parametrize("spec", ["attach_path:0,1,7", "path:3@clique:2", "attach_path:0,5,7@clique:2"])
def test_gen_rejects_misplaced_base_graphs(runner, spec):
    assert runner.invoke(cli, ["gen", spec]).exit_code == EXIT_INPUT


# -------------------- VERIFY / INIT / REPORT --------------------
def test_verify_figure_outcomes(runner, tmp_path):
    out, html = tmp_path / "report.json", tmp_path / "report.html"
    result = runner.invoke(
        cli, ["verify", "--suite", "figure-outcomes", "--seed", "0", "--out", str(out), "--html", str(html)]
    )
    assert result.exit_code == 0, result.output
    assert result.output.splitlines()[0] == "figure-outcomes (seed 0): 3/3 checks passed"
    assert json.loads(out.read_text(encoding="utf-8"))["summary"]["failed"] == 0
    assert "<html" in html.read_text(encoding="utf-8")


def test_verify_json_is_reproducible(runner):
    args = ["verify", "--suite", "union-join-tables", "--seed", "5", "--count", "3", "--json"]
    assert runner.invoke(cli, args).output == runner.invoke(cli, args).output


def test_verify_unknown_suite(runner):
    result = runner.invoke(cli, ["verify", "--suite", "everything", "--seed", "0"])
    assert result.exit_code == 2


def test_init_creates_env(runner):
    with runner.isolated_filesystem():
        first = runner.invoke(cli, ["init"])
        second = runner.invoke(cli, ["init"])
        assert "default template" in first.output
        assert "already exists" in second.output


def test_init_writes_env_at_project_root(runner, tmp_path, monkeypatch):
    (tmp_path / "pyproject.toml").write_text("", encoding="utf-8")
    nested = tmp_path / "docs" / "notes"
    nested.mkdir(parents=True)
    monkeypatch.chdir(nested)
    result = runner.invoke(cli, ["init"])
    assert result.exit_code == 0
    assert (tmp_path / ".env").exists()
    assert not (nested / ".env").exists()


def test_report_without_results(runner):
    with runner.isolated_filesystem():
        result = runner.invoke(cli, ["report"])
        assert result.exit_code == EXIT_FAILURES
