import json

import pytest

from helper_functions.file_reader import (
    read_arena,
    read_edge_list,
    read_graph,
    read_json,
    read_json_files_from_folder,
    read_position,
    read_tree,
    write_graph,
    write_json_atomic,
)
from mbdom_game.decomposition import SpiderNode
from mbdom_game.errors import InputError
from mbdom_game.graphcore import Player, cycle_graph, path_graph
from mbdom_game.hypergame import Hypergraph


# -------------------- JSON --------------------
def test_read_json_files_from_folder_merges_and_skips_bad_files(tmp_path):
    write_json_atomic(tmp_path / "results_gw0.json", {"checks": [{"id": 1}]})
    write_json_atomic(tmp_path / "results_gw1.json", {"checks": [{"id": 2}, {"id": 3}]})
    (tmp_path / "results_gw2.json").write_text("{not json", encoding="utf-8")
    write_json_atomic(tmp_path / "results_gw3.json", {"checks": "nope"})
    write_json_atomic(tmp_path / "other.json", {"checks": [{"id": 9}]})

    items = read_json_files_from_folder(tmp_path, "checks", "results_*.json")
    assert [i["id"] for i in items] == [1, 2, 3]


def test_read_json_files_from_missing_folder(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_json_files_from_folder(tmp_path / "absent", "checks")


def test_write_json_atomic_leaves_no_temp_files(tmp_path):
    target = write_json_atomic(tmp_path / "nested" / "out.json", {"b": 1, "a": 2})
    assert target.read_text(encoding="utf-8").startswith('{\n  "a": 2')
    assert [p.name for p in target.parent.iterdir()] == ["out.json"]


@pytest.mark.parametrize(
    "content", ["[1, 2]", "{broken"], ids=["not-an-object", "invalid"]
)
def test_read_json_errors(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(InputError):
        read_json(path)


def test_read_json_missing_file(tmp_path):
    with pytest.raises(InputError):
        read_json(tmp_path / "missing.json")


# -------------------- EDGE LISTS --------------------
def test_edge_list_file(tmp_path):
    path = write_graph(cycle_graph(5), tmp_path / "c5.el")
    assert path.read_text(encoding="utf-8").splitlines()[0] == "5 5"
    assert read_graph(path) == cycle_graph(5)


def test_edge_list_comments_and_blank_lines(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("# a path\n\n3\n0 1  # first edge\n1 2\n", encoding="utf-8")
    assert read_edge_list(path) == path_graph(3)


@pytest.mark.parametrize("content", ["", "3 4\n0 1\n", "3 1 7\n0 1\n", "3\n0 x\n", "3\n0 1 2\n"])
def test_malformed_edge_lists(tmp_path, content):
    path = tmp_path / "g.edges"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(InputError):
        read_edge_list(path)


# -------------------- DOMAIN OBJECTS --------------------
def test_read_position_with_claims(tmp_path):
    path = write_json_atomic(
        tmp_path / "pos.json",
        {"graph": {"n": 3, "edges": [[0, 1], [1, 2]]}, "dominator": [0], "staller": [2], "to_move": "dominator"},
    )
    position = read_position(path)
    assert position.dominator == frozenset({0})
    assert position.staller == frozenset({2})
    assert position.to_move is Player.DOMINATOR
    assert read_position(path, "staller").to_move is Player.STALLER


def test_read_arena_distinguishes_kinds(tmp_path):
    graph_path = write_json_atomic(tmp_path / "g.json", {"n": 2, "edges": [[0, 1]]})
    hyper_path = write_json_atomic(tmp_path / "h.json", {"kind": "hypergraph", "n": 3, "edges": [[0, 1], [2]]})
    assert read_arena(graph_path) == ("graph", path_graph(2))
    kind, hypergraph = read_arena(hyper_path)
    assert kind == "hypergraph"
    assert isinstance(hypergraph, Hypergraph)
    assert hypergraph.edges == ((0, 1), (2,))


def test_read_arena_unknown_kind(tmp_path):
    path = write_json_atomic(tmp_path / "x.json", {"kind": "matroid"})
    with pytest.raises(InputError):
        read_arena(path)


def test_read_tree(tmp_path):
    path = tmp_path / "tree.json"
    path.write_text(
        json.dumps({"tree": {"kind": "spider", "r": None, "c": [1, 2], "s": [0, 3], "thick": False}}),
        encoding="utf-8",
    )
    tree = read_tree(path)
    assert isinstance(tree, SpiderNode)
    assert tree.c == (1, 2)
