import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbdom_game.errors import InputError
from mbdom_game.graphcore import (
    Composition,
    Outcome,
    Player,
    Position,
    attach_path,
    attach_pending_path,
    build_graph,
    clique_graph,
    compose,
    cycle_graph,
    empty_graph,
    figure_graph,
    figure_position,
    path_graph,
    star_graph,
)
from mbdom_game.rewrite import (
    assign_twins,
    cluster_outcome,
    compose_outcome,
    dominator_end_path_position,
    force_leaf_support,
    internal_paths,
    join_outcome,
    pending_paths,
    reduce_fixpoint,
    remove_dominated_staller_vertex,
    replace_first_module,
    replace_module,
    replacement_for,
    rules_by_name,
    shorten_first_internal_path,
    shorten_first_pending_path,
    shorten_internal_path,
    split_dominator_vertex,
    step_bound,
    union_outcome,
)
from mbdom_game.solver import outcome, solve_position

# -------------------- DATA --------------------
BASE_DIR = Path(__file__).resolve().parent.parent
FIGURES = {
    c["name"]: c
    for c in json.loads((BASE_DIR / "metadata" / "figures.json").read_text(encoding="utf-8"))["figures"]
}


def winners(position: Position):
    return tuple(solve_position(position.with_mover(p)) for p in (Player.DOMINATOR, Player.STALLER))


@st.composite
def small_graphs(draw, max_n: int = 7):
    n = draw(st.integers(min_value=1, max_value=max_n))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return build_graph(n, chosen)


# -------------------- LOCAL RULES --------------------
def test_remove_dominated_staller_vertex():
    before = Position(path_graph(4), frozenset({0}), frozenset({1}))
    result = remove_dominated_staller_vertex(before)
    assert result.step.deleted == (1,)
    assert result.position.graph.n == 3
    assert result.position.dominator == frozenset({0})
    assert winners(result.position) == winners(before)


def test_remove_dominated_staller_vertex_needs_a_dominator_neighbor():
    assert remove_dominated_staller_vertex(Position(path_graph(4), frozenset({0}), frozenset({2}))) is None


def test_split_dominator_vertex_on_reference_figure():
    before = figure_position("fig4")
    result = split_dominator_vertex(before, 0)
    assert result.position.graph.n == FIGURES["fig4"]["split_order"]
    assert len(result.step.added) == 2
    assert all(result.position.graph.degree(v) == 1 for v in result.position.dominator)
    assert winners(result.position) == winners(before)


def test_split_rejects_unclaimed_vertex():
    with pytest.raises(InputError):
        split_dominator_vertex(Position.start(path_graph(3)), 1)


def test_force_leaf_support():
    before = Position.start(path_graph(5))
    result = force_leaf_support(before)
    assert result.step.deleted == (0, 1)
    assert result.position.graph == path_graph(3)
    assert solve_position(result.position) is solve_position(before)


def test_force_leaf_support_waits_for_staller():
    assert force_leaf_support(Position.start(path_graph(5), Player.DOMINATOR)) is None


def test_assign_twins():
    before = Position.start(star_graph(3))
    result = assign_twins(before, 1, 2)
    assert result.position.dominator == frozenset({1})
    assert result.position.staller == frozenset({2})
    assert winners(result.position) == winners(before)


def test_assign_twins_rejects_non_twins():
    with pytest.raises(InputError):
        assign_twins(Position.start(star_graph(3)), 0, 1)


# -------------------- MODULES --------------------
@pytest.mark.parametrize(
    "result, expected",
    [(Outcome.D, path_graph(2)), (Outcome.S, empty_graph(2)), (Outcome.N, path_graph(3))],
)
def test_replacement_graphs(result, expected):
    assert replacement_for(result) == expected
    assert outcome(expected) is result


def test_replace_module_on_reference_figure():
    case = FIGURES["fig3"]
    graph = figure_graph("fig3")
    module_graph, _ = graph.induced_subgraph(case["module"])
    assert outcome(module_graph) is Outcome(case["module_outcome"])
    result = replace_module(graph, case["module"])
    assert result.position.graph.n == graph.n - len(case["module"]) + 2
    assert outcome(result.position.graph) is outcome(graph)


def test_replace_module_rejects_non_module():
    with pytest.raises(InputError):
        replace_module(figure_graph("fig3"), [0, 4])


def test_replace_module_skips_small_modules():
    assert replace_module(star_graph(3), [1, 2]) is None


def test_replace_first_module_ignores_claimed_positions():
    assert replace_first_module(figure_position("fig4")) is None


# -------------------- PATHS --------------------
def test_internal_path_shortening_keeps_outcome():
    base = path_graph(2)
    graph = attach_path(base, 0, 1, 9)
    result = shorten_internal_path(Position.start(graph), 0, 1, list(range(2, 11)))
    assert result.position.graph.n == graph.n - 2
    assert outcome(result.position.graph) is outcome(graph)
    assert outcome(attach_path(base, 0, 1, 7)) is outcome(graph)


def test_internal_path_needs_nine_vertices():
    graph = attach_path(path_graph(2), 0, 1, 8)
    assert shorten_internal_path(Position.start(graph), 0, 1, list(range(2, 10))) is None


def test_internal_path_refuses_staller_claims():
    graph = attach_path(path_graph(2), 0, 1, 9)
    position = Position(graph, frozenset(), frozenset({0}))
    with pytest.raises(InputError):
        shorten_internal_path(position, 0, 1, list(range(2, 11)))


def test_internal_path_rejects_broken_chain():
    graph = attach_path(path_graph(2), 0, 1, 9)
    with pytest.raises(InputError):
        shorten_internal_path(Position.start(graph), 0, 1, [2, 4, 3, 5, 6, 7, 8, 9, 10])


def test_whole_cycle_counts_as_internal_path():
    found = internal_paths(Position.start(cycle_graph(12)))
    assert len(found) == 1
    assert len(found[0][2]) == 10
    result = shorten_first_internal_path(Position.start(cycle_graph(12)))
    assert result.position.graph.n == 10


def test_pending_path_contracts_to_three():
    graph = attach_pending_path(cycle_graph(4), 0, 6)
    position = Position(graph, frozenset({graph.n - 1}), frozenset())
    assert pending_paths(position) == [(0, list(range(4, 10)))]
    result = shorten_first_pending_path(position)
    assert result.position.graph.n == graph.n - 3
    assert winners(result.position) == winners(position)


def test_pending_path_of_three_is_left_alone():
    graph = attach_pending_path(cycle_graph(4), 0, 3)
    assert shorten_first_pending_path(Position(graph, frozenset({graph.n - 1}), frozenset())) is None


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_dominator_end_path_position(n):
    position = dominator_end_path_position(n)
    assert position.dominator == frozenset({0})
    assert position.to_move is Player.STALLER


def test_dominator_end_path_needs_a_vertex():
    with pytest.raises(InputError):
        dominator_end_path_position(0)


# -------------------- OUTCOME TABLES --------------------
@pytest.mark.parametrize(
    "left, right, expected",
    [
        ("D", "D", "D"),
        ("D", "N", "N"),
        ("N", "N", "S"),
        ("S", "D", "S"),
        ("N", "S", "S"),
    ],
)
def test_union_table(left, right, expected):
    assert union_outcome(left, right) is Outcome(expected)


def test_union_table_matches_solver():
    graph = compose(path_graph(2), empty_graph(1), Composition.UNION)
    assert outcome(graph) is union_outcome(Outcome.D, Outcome.N)


def test_join_table():
    assert join_outcome(Outcome.N, Outcome.S, True, False) is Outcome.N
    assert join_outcome(Outcome.S, Outcome.S, False, False) is Outcome.D
    p3 = compose(empty_graph(1), empty_graph(2), Composition.JOIN)
    assert outcome(p3) is compose_outcome("join", Outcome.N, Outcome.S, True, False)


@pytest.mark.parametrize("isolated, expected", [(0, Outcome.D), (1, Outcome.N), (3, Outcome.S)])
def test_cluster_table(isolated, expected):
    graph = compose(clique_graph(3), empty_graph(isolated), Composition.UNION)
    assert cluster_outcome((True, isolated)) is expected
    assert outcome(graph) is expected


def test_cluster_table_needs_a_cluster():
    with pytest.raises(InputError):
        cluster_outcome((False, 0))


# -------------------- FIXPOINT --------------------
def test_reduce_fixpoint_records_every_step():
    position = Position.start(attach_path(clique_graph(3), 0, 1, 10))
    reduced, trace = reduce_fixpoint(position)
    assert len(trace) > 0
    assert trace.to_json_lines().count("\n") == len(trace)
    assert solve_position(reduced) is solve_position(position)
    surviving = trace.correspondence(position.graph.n)
    assert all(0 <= v < reduced.graph.n for v in surviving.values())


def test_rules_by_name_rejects_unknown_rule():
    with pytest.raises(InputError):
        rules_by_name(["remove_dominated_staller_vertex", "teleport"])


@settings(max_examples=30)
@given(small_graphs())
def test_fixpoint_keeps_staller_first_winner(graph):
    position = Position.start(graph)
    reduced, _ = reduce_fixpoint(position)
    assert solve_position(reduced) is solve_position(position)


def test_step_bound_leaves_room_for_split_growth():
    position = Position(star_graph(4), frozenset({0}), frozenset())
    reduced, trace = reduce_fixpoint(position, rules_by_name(["split_dominator_vertex"]))
    assert reduced.graph.n == 8
    assert len(reduced.dominator) == 4
    assert len(trace) <= step_bound(position.graph)
    assert step_bound(position.graph) >= 2 * reduced.graph.n
