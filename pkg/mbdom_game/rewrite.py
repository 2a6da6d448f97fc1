"""Outcome-preserving position rewrites, outcome tables and the fixpoint engine.

Every rule returns ``None`` when it does not apply. A rule that applies returns
a ``RewriteResult``: the new position and a ``TraceStep`` whose index map sends
each surviving vertex to its new index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from helper_functions.log_utils import get_logger
from mbdom_game.decomposition import modular_decomposition, strong_modules
from mbdom_game.errors import InconsistencyError, InputError
from mbdom_game.graphcore import (
    Composition,
    Graph,
    IndexMap,
    Outcome,
    Player,
    Position,
    are_twins,
    build_graph,
    is_module,
    path_graph,
)
from mbdom_game.solver import outcome as solve_outcome

logger = get_logger(__name__)

MAX_MODULE_SIZE = 14
MIN_INTERNAL_PATH = 9
PENDING_PATH_LENGTH = 3


# -----------------------------
# Types


@dataclass(frozen=True)
class TraceStep:
    rule: str
    matched: Tuple[int, ...]
    deleted: Tuple[int, ...]
    added: Tuple[int, ...]
    index_map: IndexMap

    def to_dict(self) -> Dict[str, object]:
        return {
            "rule": self.rule,
            "matched": list(self.matched),
            "deleted": list(self.deleted),
            "added": list(self.added),
            "index_map": {str(k): v for k, v in sorted(self.index_map.items())},
        }


@dataclass(frozen=True)
class RewriteResult:
    position: Position
    step: TraceStep


@dataclass
class ReductionTrace:
    steps: List[TraceStep] = field(default_factory=list)

    def append(self, step: TraceStep) -> None:
        self.steps.append(step)

    def extend(self, other: "ReductionTrace") -> None:
        self.steps.extend(other.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def correspondence(self, original_order: int) -> IndexMap:
        """Original vertex -> final vertex, for vertices that survive every step."""
        mapping = {v: v for v in range(original_order)}
        for step in self.steps:
            mapping = {
                old: step.index_map[cur] for old, cur in mapping.items() if cur in step.index_map
            }
        return mapping

    def to_json_lines(self) -> str:
        return "".join(json.dumps(step.to_dict(), sort_keys=True) + "\n" for step in self.steps)


@dataclass(frozen=True)
class RewriteRule:
    name: str
    apply: Callable[[Position], Optional[RewriteResult]]

    def __call__(self, position: Position) -> Optional[RewriteResult]:
        return self.apply(position)


# -----------------------------
# Plumbing


def _survivors(n: int, removed: Iterable[int]) -> IndexMap:
    gone = set(removed)
    return {old: new for new, old in enumerate(v for v in range(n) if v not in gone)}


def _rebuild(
    position: Position,
    removed: Iterable[int],
    added: int = 0,
    new_edges: Callable[[IndexMap, int], Iterable[Tuple[int, int]]] = lambda m, base: (),
    dominator_added: Iterable[int] = (),
    staller_added: Iterable[int] = (),
) -> Tuple[Position, IndexMap, Tuple[int, ...]]:
    """Delete ``removed`` and append ``added`` fresh vertices.

    ``new_edges`` receives the survivor map and the index of the first fresh
    vertex; fresh-vertex claims are given relative to that index.
    """
    graph = position.graph
    removed = sorted(set(removed))
    index_map = _survivors(graph.n, removed)
    base = len(index_map)
    edges = [
        (index_map[u], index_map[v])
        for u, v in graph.edges()
        if u in index_map and v in index_map
    ]
    edges.extend(new_edges(index_map, base))
    labels = None
    if graph.labels is not None:
        labels = [graph.labels[v] for v in sorted(index_map)] + [
            f"+{base + i}" for i in range(added)
        ]
    new_graph = build_graph(base + added, edges, labels)
    dominator = {index_map[v] for v in position.dominator if v in index_map}
    staller = {index_map[v] for v in position.staller if v in index_map}
    dominator |= {base + i for i in dominator_added}
    staller |= {base + i for i in staller_added}
    new_position = Position(new_graph, frozenset(dominator), frozenset(staller), position.to_move)
    return new_position, index_map, tuple(base + i for i in range(added))


def splice(
    rule: str,
    position: Position,
    matched: Sequence[int],
    removed: Sequence[int],
    **rebuild_args,
) -> RewriteResult:
    """Rebuild ``position`` without ``removed`` and record the step as ``rule``."""
    new_position, index_map, added = _rebuild(position, removed, **rebuild_args)
    step = TraceStep(rule, tuple(matched), tuple(sorted(removed)), added, index_map)
    logger.debug("%s matched %s: n %d -> %d", rule, list(matched), position.graph.n, new_position.graph.n)
    return RewriteResult(new_position, step)


def _as_position(target: Union[Graph, Position]) -> Position:
    return target if isinstance(target, Position) else Position.start(target)


# -----------------------------
# Rules


def remove_dominated_staller_vertex(position: Position) -> Optional[RewriteResult]:
    """Delete the first Staller vertex with a Dominator neighbor."""
    graph = position.graph
    for v in sorted(position.staller):
        if graph.adjacency[v] & position.dominator:
            return splice("remove_dominated_staller_vertex", position, (v,), (v,))
    return None


def split_dominator_vertex(position: Position, v: int) -> RewriteResult:
    """Replace Dominator vertex ``v`` by one fresh Dominator leaf per neighbor."""
    if v not in position.dominator:
        raise InputError(f"vertex {v} is not claimed by Dominator")
    neighbors = sorted(position.graph.adjacency[v])

    def leaves(index_map: IndexMap, base: int) -> List[Tuple[int, int]]:
        return [(index_map[u], base + i) for i, u in enumerate(neighbors)]

    return splice(
        "split_dominator_vertex",
        position,
        (v,),
        (v,),
        added=len(neighbors),
        new_edges=leaves,
        dominator_added=range(len(neighbors)),
    )


def split_first_dominator_vertex(position: Position) -> Optional[RewriteResult]:
    """Split the first Dominator vertex that is not already a leaf."""
    for v in sorted(position.dominator):
        if position.graph.degree(v) != 1:
            return split_dominator_vertex(position, v)
    return None


def force_leaf_support(position: Position) -> Optional[RewriteResult]:
    """Resolve the forced exchange at an unclaimed leaf with unclaimed support.

    Only sound with Staller to move: Staller takes the support, Dominator
    must answer on the leaf.
    """
    if position.to_move is not Player.STALLER:
        return None
    claimed = position.dominator | position.staller
    graph = position.graph
    for leaf in range(graph.n):
        if leaf in claimed or graph.degree(leaf) != 1:
            continue
        (support,) = graph.adjacency[leaf]
        if support not in claimed:
            return splice("force_leaf_support", position, (leaf, support), (leaf, support))
    return None


def assign_twins(position: Position, u: int, v: int) -> RewriteResult:
    """Give twin ``u`` to Dominator and ``v`` to Staller."""
    graph = position.graph
    graph.check_vertices((u, v))
    claimed = position.dominator | position.staller
    if u in claimed or v in claimed:
        raise InputError(f"twins {u} and {v} must both be unclaimed")
    if not are_twins(graph, u, v):
        raise InputError(f"vertices {u} and {v} are not twins")
    new_position = Position(
        graph, position.dominator | {u}, position.staller | {v}, position.to_move
    )
    step = TraceStep("assign_twins", (u, v), (), (), {w: w for w in range(graph.n)})
    logger.debug("assign_twins matched %s", [u, v])
    return RewriteResult(new_position, step)


def assign_first_twins(position: Position) -> Optional[RewriteResult]:
    free = position.unclaimed
    for i, u in enumerate(free):
        for v in free[i + 1:]:
            if are_twins(position.graph, u, v):
                return assign_twins(position, u, v)
    return None


def replacement_for(outcome: Outcome) -> Graph:
    """P2 for D, 2K1 for S, P3 for N."""
    if outcome is Outcome.D:
        return path_graph(2)
    if outcome is Outcome.S:
        return build_graph(2, [])
    return path_graph(3)


def replace_module(
    target: Union[Graph, Position],
    module: Iterable[int],
    known_outcome: Optional[Outcome] = None,
) -> Optional[RewriteResult]:
    """Swap an unclaimed module for the smallest graph with the same outcome.

    Without ``known_outcome`` the module's outcome is solved directly, which is
    refused above ``MAX_MODULE_SIZE`` vertices.
    """
    position = _as_position(target)
    graph = position.graph
    members = graph.check_vertices(module)
    if not is_module(graph, members):
        raise InputError(f"{sorted(members)} is not a module")
    if members & (position.dominator | position.staller):
        raise InputError("module vertices must be unclaimed")
    if len(members) < 3:
        return None
    if known_outcome is None:
        if len(members) > MAX_MODULE_SIZE:
            return None
        inner, _ = graph.induced_subgraph(members)
        known_outcome = solve_outcome(inner)
    replacement = replacement_for(Outcome(known_outcome))
    outside = graph.adjacency[min(members)] - members

    def attach(index_map: IndexMap, base: int) -> List[Tuple[int, int]]:
        edges = [(base + a, base + b) for a, b in replacement.edges()]
        edges += [(index_map[x], base + i) for x in outside for i in range(replacement.n)]
        return edges

    return splice(
        "replace_module",
        position,
        sorted(members),
        sorted(members),
        added=replacement.n,
        new_edges=attach,
    )


def replace_first_module(position: Position) -> Optional[RewriteResult]:
    """Replace the first strong module whose replacement is strictly smaller.

    Only fires on unclaimed positions.
    """
    if position.dominator or position.staller or position.graph.n < 4:
        return None
    graph = position.graph
    candidates = sorted(
        {m for m in strong_modules(modular_decomposition(graph)) if 3 <= len(m) <= MAX_MODULE_SIZE},
        key=lambda m: (len(m), sorted(m)),
    )
    for members in candidates:
        inner, _ = graph.induced_subgraph(members)
        result = solve_outcome(inner)
        if len(members) == 3 and result is Outcome.N:
            continue
        return replace_module(position, members, known_outcome=result)
    return None


def _check_chain(graph: Graph, u: int, v: int, path: Sequence[int]) -> None:
    path = list(path)
    if len(set(path)) != len(path) or u in path or v in path or u == v:
        raise InputError("path and anchors must be distinct vertices")
    graph.check_vertices([u, v, *path])
    for a, b in zip([u, *path], [*path, v]):
        if b not in graph.adjacency[a]:
            raise InputError(f"vertices {a} and {b} are not adjacent")
    for x in path:
        if graph.degree(x) != 2:
            raise InputError(f"path vertex {x} does not have degree 2")


def shorten_internal_path(
    position: Position, u: int, v: int, path: Sequence[int]
) -> Optional[RewriteResult]:
    """Drop two internal vertices from a degree-2 path between anchors ``u`` and ``v``.

    ``path`` lists the internal vertices from the ``u`` side. Needs at least
    nine of them, none claimed, and no Staller claims anywhere.
    """
    _check_chain(position.graph, u, v, path)
    if position.staller:
        raise InputError("internal paths are only shortened before Staller has claimed anything")
    if set(path) & position.dominator:
        raise InputError("internal path vertices must be unclaimed")
    if len(path) < MIN_INTERNAL_PATH:
        return None
    keep_end = path[-3]

    def bridge(index_map: IndexMap, base: int) -> List[Tuple[int, int]]:
        return [(index_map[keep_end], index_map[v])]

    return splice(
        "shorten_internal_path", position, (u, v), (path[-2], path[-1]), new_edges=bridge
    )


def shorten_pending_path(
    position: Position, u: int, path: Sequence[int]
) -> Optional[RewriteResult]:
    """Contract a pending path v1..vk at ``u`` whose far end vk is Dominator's.

    The outcome does not depend on k, so paths longer than three become
    exactly three.
    """
    graph = position.graph
    path = list(path)
    if not path or path[-1] not in position.dominator:
        return None
    if len(set(path)) != len(path) or u in path:
        raise InputError("pending path and anchor must be distinct vertices")
    for a, b in zip([u, *path], path):
        if b not in graph.adjacency[a]:
            raise InputError(f"vertices {a} and {b} are not adjacent")
    if graph.degree(path[-1]) != 1 or any(graph.degree(x) != 2 for x in path[:-1]):
        return None
    if set(path[:-1]) & (position.dominator | position.staller):
        return None
    if len(path) <= PENDING_PATH_LENGTH:
        return None
    removed = path[1:-2]
    first, keep = path[0], path[-2]

    def bridge(index_map: IndexMap, base: int) -> List[Tuple[int, int]]:
        return [(index_map[first], index_map[keep])]

    return splice("shorten_pending_path", position, (u, path[-1]), removed, new_edges=bridge)


def _free_degree_two(position: Position) -> FrozenSet[int]:
    claimed = position.dominator | position.staller
    return frozenset(
        v for v in range(position.graph.n) if v not in claimed and position.graph.degree(v) == 2
    )


def _chain_from(graph: Graph, chain_set: FrozenSet[int], start: int) -> List[int]:
    """Maximal run of ``chain_set`` vertices through ``start``, in path order."""
    seen = {start}
    sides: List[List[int]] = []
    for first in sorted(graph.adjacency[start]):
        if first not in chain_set or first in seen:
            continue
        side = []
        previous, current = start, first
        while current in chain_set and current not in seen:
            side.append(current)
            seen.add(current)
            previous, current = current, next(
                w for w in graph.adjacency[current] if w != previous
            )
        sides.append(side)
    left = sides[0][::-1] if sides else []
    right = sides[1] if len(sides) > 1 else []
    return left + [start] + right


def internal_paths(position: Position) -> List[Tuple[int, int, List[int]]]:
    """Every maximal unclaimed degree-2 chain as ``(u, v, internal vertices)``.

    A whole cycle uses two adjacent cycle vertices as anchors; a cycle hanging
    at a single vertex w uses w and the first chain vertex.
    """
    graph = position.graph
    free = _free_degree_two(position)
    seen: set = set()
    found = []
    for start in sorted(free):
        if start in seen:
            continue
        chain = _chain_from(graph, free, start)
        seen.update(chain)
        ends = []
        for end in (chain[0], chain[-1]):
            ends.append([w for w in graph.adjacency[end] if w not in chain])
        if not ends[0] and not ends[1]:
            if len(chain) >= 3:
                found.append((chain[1], chain[0], chain[2:]))
            continue
        if len(chain) == 1:
            u, v = sorted(graph.adjacency[chain[0]])
            found.append((u, v, chain))
            continue
        u, v = ends[0][0], ends[1][0]
        if u == v:
            found.append((u, chain[0], chain[:0:-1]))
        else:
            found.append((u, v, chain))
    return found


def shorten_first_internal_path(position: Position) -> Optional[RewriteResult]:
    if position.staller:
        return None
    for u, v, path in internal_paths(position):
        if len(path) >= MIN_INTERNAL_PATH and not (set(path) & position.dominator):
            return shorten_internal_path(position, u, v, path)
    return None


def pending_paths(position: Position) -> List[Tuple[int, List[int]]]:
    """Pending paths ending in a Dominator leaf, as ``(anchor, v1..vk)``."""
    graph = position.graph
    free = _free_degree_two(position)
    found = []
    for leaf in sorted(position.dominator):
        if graph.degree(leaf) != 1:
            continue
        path = [leaf]
        previous, current = leaf, next(iter(graph.adjacency[leaf]))
        while current in free and current not in path:
            path.append(current)
            previous, current = current, next(w for w in graph.adjacency[current] if w != previous)
        if current in path:
            continue
        found.append((current, path[::-1]))
    return found


def shorten_first_pending_path(position: Position) -> Optional[RewriteResult]:
    for u, path in pending_paths(position):
        result = shorten_pending_path(position, u, path)
        if result is not None:
            return result
    return None


# -----------------------------
# Outcome tables


def union_outcome(left: Outcome, right: Outcome) -> Outcome:
    left, right = Outcome(left), Outcome(right)
    if Outcome.S in (left, right):
        return Outcome.S
    if left is Outcome.N and right is Outcome.N:
        return Outcome.S
    if left is Outcome.D and right is Outcome.D:
        return Outcome.D
    return Outcome.N


def join_outcome(left: Outcome, right: Outcome, left_is_k1: bool, right_is_k1: bool) -> Outcome:
    left, right = Outcome(left), Outcome(right)
    if (left_is_k1 and right is Outcome.S) or (right_is_k1 and left is Outcome.S):
        return Outcome.N
    return Outcome.D


def cluster_outcome(profile: Tuple[bool, int]) -> Outcome:
    is_cluster, isolated = profile
    if not is_cluster:
        raise InputError("the cluster table only applies to disjoint unions of cliques")
    if isolated == 0:
        return Outcome.D
    if isolated == 1:
        return Outcome.N
    return Outcome.S


def compose_outcome(kind: Composition | str, *inputs) -> Outcome:
    """``union(a, b)``, ``join(a, b, a_is_k1, b_is_k1)`` or ``cluster(profile)``."""
    kind = Composition(kind)
    if kind is Composition.UNION:
        return union_outcome(*inputs)
    if kind is Composition.JOIN:
        return join_outcome(*inputs)
    return cluster_outcome(*inputs)


# -----------------------------
# Fixpoint


RULES: Dict[str, RewriteRule] = {
    rule.name: rule
    for rule in (
        RewriteRule("remove_dominated_staller_vertex", remove_dominated_staller_vertex),
        RewriteRule("force_leaf_support", force_leaf_support),
        RewriteRule("split_dominator_vertex", split_first_dominator_vertex),
        RewriteRule("assign_twins", assign_first_twins),
        RewriteRule("replace_module", replace_first_module),
        RewriteRule("shorten_internal_path", shorten_first_internal_path),
        RewriteRule("shorten_pending_path", shorten_first_pending_path),
    )
}

DEFAULT_RULES: Tuple[RewriteRule, ...] = tuple(
    RULES[name]
    for name in (
        "remove_dominated_staller_vertex",
        "force_leaf_support",
        "split_dominator_vertex",
        "replace_module",
        "shorten_internal_path",
    )
)


def rules_by_name(names: Iterable[str]) -> Tuple[RewriteRule, ...]:
    try:
        return tuple(RULES[name] for name in names)
    except KeyError as exc:
        raise InputError(f"unknown rewrite rule {exc.args[0]!r}") from None


def step_bound(graph: Graph) -> int:
    """Cap on fixpoint steps before ``reduce_fixpoint`` gives up.

    Looser than 2|V|: splits and module replacements create fresh vertices,
    up to 2|E| leaves from splits alone, and each of those can be removed by
    a later step.
    """
    return 3 * graph.n + 4 * graph.edge_count + 1


def reduce_fixpoint(
    position: Position, rules: Sequence[RewriteRule] = DEFAULT_RULES
) -> Tuple[Position, ReductionTrace]:
    """Apply the first applicable rule, in priority order, until none applies."""
    trace = ReductionTrace()
    limit = step_bound(position.graph)
    while True:
        for rule in rules:
            result = rule(position)
            if result is not None:
                position = result.position
                trace.append(result.step)
                break
        else:
            return position, trace
        if len(trace) > limit:
            raise InconsistencyError(f"rewriting did not settle within {limit} steps")


def dominator_end_path_position(n: int) -> Position:
    """P_n with one endpoint claimed by Dominator, Staller to move."""
    if n < 1:
        raise InputError(f"path needs at least one vertex, got {n}")
    return Position(path_graph(n), frozenset({0}), frozenset(), Player.STALLER)
