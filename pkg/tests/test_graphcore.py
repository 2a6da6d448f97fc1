import json
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mbdom_game.errors import InconsistencyError, InputError
from mbdom_game.graphcore import (
    Composition,
    Outcome,
    Player,
    Position,
    TwinKind,
    are_twins,
    attach_path,
    attach_pending_path,
    build_graph,
    cluster_profile,
    clique_graph,
    closed_neighborhood,
    compose,
    cycle_graph,
    dominating_set_of_size,
    domination_number,
    empty_graph,
    feedback_edge_set,
    figure_catalogue,
    figure_graph,
    figure_position,
    generate,
    graph_from_dict,
    is_dominating,
    is_module,
    minimum_dominating_sets,
    parse_family_spec,
    path_graph,
    random_graph,
    star_graph,
    twin_partition,
)

# -------------------- DATA --------------------
BASE_DIR = Path(__file__).resolve().parent.parent
FIGURE_CASES = json.loads((BASE_DIR / "metadata" / "figures.json").read_text(encoding="utf-8"))["figures"]


@st.composite
def small_graphs(draw, max_n: int = 7):
    n = draw(st.integers(min_value=0, max_value=max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return build_graph(n, chosen)


# -------------------- CONSTRUCTION --------------------
def test_build_graph_rejects_self_loop():
    with pytest.raises(InputError):
        build_graph(3, [(1, 1)])


def test_build_graph_rejects_out_of_range_endpoint():
    with pytest.raises(InputError):
        build_graph(3, [(0, 3)])


def test_build_graph_ignores_duplicate_edges():
    graph = build_graph(3, [(0, 1), (1, 0), (0, 1)])
    assert graph.edge_count == 1


def test_graph_from_dict_reports_missing_order():
    with pytest.raises(InputError):
        graph_from_dict({"edges": [[0, 1]]})


def test_labels_must_match_order():
    with pytest.raises(InputError):
        build_graph(2, [(0, 1)], labels=["a"])


# -------------------- POSITIONS --------------------
def test_position_rejects_overlapping_claims():
    with pytest.raises(InputError):
        Position(path_graph(3), frozenset({1}), frozenset({1}))


def test_claim_alternates_players():
    position = Position.start(path_graph(3))
    after = position.claim(1)
    assert after.staller == frozenset({1})
    assert after.to_move is Player.DOMINATOR
    assert after.claim(0).dominator == frozenset({0})


def test_claim_rejects_taken_vertex():
    position = Position(path_graph(3), frozenset({0}), frozenset())
    with pytest.raises(InputError):
        position.claim(0)


def test_unclaimed_lists_free_vertices():
    position = Position(path_graph(4), frozenset({0}), frozenset({3}))
    assert position.unclaimed == [1, 2]


# -------------------- OUTCOMES --------------------
@pytest.mark.parametrize(
    "outcome, first, winner",
    [
        (Outcome.D, Player.STALLER, Player.DOMINATOR),
        (Outcome.S, Player.DOMINATOR, Player.STALLER),
        (Outcome.N, Player.STALLER, Player.STALLER),
        (Outcome.N, Player.DOMINATOR, Player.DOMINATOR),
    ],
)
def test_outcome_winner(outcome, first, winner):
    assert outcome.winner(first) is winner


def test_from_winners_rejects_second_player_win():
    with pytest.raises(InconsistencyError):
        Outcome.from_winners(Player.STALLER, Player.DOMINATOR)


# -------------------- QUERIES --------------------
def test_closed_neighborhood_contains_vertex():
    assert closed_neighborhood(path_graph(3), 1) == frozenset({0, 1, 2})


def test_is_dominating():
    graph = path_graph(5)
    assert is_dominating(graph, [1, 3])
    assert not is_dominating(graph, [0, 4])


def test_is_module():
    graph = figure_graph("fig3")
    assert is_module(graph, [0, 1, 2, 3])
    assert not is_module(graph, [0, 4])


def test_twin_partition_of_clique_is_one_true_class():
    partition = twin_partition(clique_graph(4))
    assert partition.classes == ((0, 1, 2, 3),)
    assert partition.kinds == (TwinKind.TRUE,)


def test_twin_partition_of_star_groups_leaves():
    partition = twin_partition(star_graph(3))
    assert dict(partition) == {(0,): TwinKind.TRUE, (1, 2, 3): TwinKind.FALSE}
    assert are_twins(star_graph(3), 1, 2)
    assert not are_twins(star_graph(3), 0, 1)


@pytest.mark.parametrize(
    "graph, expected",
    [(path_graph(6), 0), (cycle_graph(5), 1), (clique_graph(4), 3), (empty_graph(3), 0)],
    ids=["path", "cycle", "clique", "empty"],
)
def test_feedback_edge_set_size(graph, expected):
    count, extra = feedback_edge_set(graph)
    assert count == expected
    assert len(extra) == expected


def test_cluster_profile():
    two_cliques = compose(clique_graph(3), clique_graph(2), Composition.UNION)
    assert cluster_profile(two_cliques) == (True, 0)
    assert cluster_profile(compose(two_cliques, empty_graph(2), "union")) == (True, 2)
    assert cluster_profile(path_graph(3))[0] is False


def test_compose_join_adds_all_cross_edges():
    joined = compose(empty_graph(2), empty_graph(3), Composition.JOIN)
    assert joined.n == 5
    assert joined.edge_count == 6


def test_compose_rejects_cluster_kind():
    with pytest.raises(InputError):
        compose(path_graph(2), path_graph(2), Composition.CLUSTER)


def test_domination_helpers():
    assert dominating_set_of_size(path_graph(4), 1) is None
    assert dominating_set_of_size(path_graph(4), 2) == (0, 2)
    assert domination_number(path_graph(5)) == 2
    assert list(minimum_dominating_sets(star_graph(3), 1)) == [(0,)]


# -------------------- FAMILIES --------------------
def test_attach_path_numbering():
    graph = attach_path(path_graph(2), 0, 1, 3)
    assert graph.n == 5
    assert 2 in graph.adjacency[0]
    assert 4 in graph.adjacency[1]
    assert graph.degree(3) == 2


def test_attach_pending_path_leaves_one_leaf():
    graph = attach_pending_path(cycle_graph(4), 0, 3)
    assert [v for v in range(graph.n) if graph.degree(v) == 1] == [6]


def test_random_graph_is_reproducible():
    assert random_graph(9, 0.4, 3) == random_graph(9, 0.4, 3)


def test_parse_family_spec():
    assert parse_family_spec("random:10,0.3,7") == ("random", ["10", "0.3", "7"])
    assert parse_family_spec("path") == ("path", [])


def test_generate_unknown_family():
    with pytest.raises(InputError):
        generate("hypercube", 3)


def test_cycle_needs_three_vertices():
    with pytest.raises(InputError):
        cycle_graph(2)


# -------------------- FIGURES --------------------
@pytest.mark.parametrize("case", FIGURE_CASES, ids=lambda c: c["name"])
def test_figure_catalogue_matches_metadata(case):
    graph = figure_graph(case["name"])
    assert graph == build_graph(case["n"], case["edges"])
    assert figure_position(case["name"]).dominator == frozenset(case["dominator"])


def test_catalogue_is_read_from_metadata():
    catalogue = figure_catalogue()
    assert {c["name"] for c in FIGURE_CASES} | {"fig1a"} == set(catalogue)
    assert catalogue["fig3"]["module_outcome"] == "D"


def test_hypergraph_figure_is_not_a_graph():
    with pytest.raises(InputError):
        figure_graph("fig1a")


def test_unknown_figure():
    with pytest.raises(InputError):
        figure_graph("fig9")


# -------------------- PROPERTIES --------------------
@given(small_graphs())
def test_complement_is_an_involution(graph):
    assert graph.complement().complement() == graph


@given(small_graphs(), st.data())
def test_induced_subgraph_keeps_adjacency(graph, data):
    keep = data.draw(st.sets(st.integers(min_value=0, max_value=max(graph.n - 1, 0))))
    keep = {v for v in keep if v < graph.n}
    sub, index_map = graph.induced_subgraph(keep)
    assert sub.n == len(keep)
    for u in keep:
        for v in keep:
            assert (v in graph.adjacency[u]) == (index_map[v] in sub.adjacency[index_map[u]])


@given(small_graphs())
def test_twin_classes_are_modules(graph):
    partition = twin_partition(graph)
    assert sorted(v for members in partition.classes for v in members) == list(range(graph.n))
    for members in partition.classes:
        assert is_module(graph, members)
