"""Parameterized algorithms: kernels and decomposition-driven solvers.

Every solver here must agree with ``solver.outcome``; the kernels return the
reduced graph together with the trace of rewrite steps that produced it.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from helper_functions.log_utils import get_logger
from helper_functions.settings import load_settings
from mbdom_game.decomposition import (
    DecompTree,
    JoinNode,
    Leaf,
    SeparableNode,
    SmallNode,
    SpiderNode,
    SubstitutionNode,
    UnionNode,
    modular_decomposition,
    validate_tree,
    width,
)
from mbdom_game.errors import InputError
from mbdom_game.graphcore import (
    Graph,
    IndexMap,
    Outcome,
    Player,
    Position,
    TwinKind,
    connected_components,
    feedback_edge_set,
    twin_partition,
)
from mbdom_game.rewrite import (
    RULES,
    ReductionTrace,
    RewriteResult,
    join_outcome,
    reduce_fixpoint,
    replace_module,
    splice,
    union_outcome,
)
from mbdom_game.solver import GameSolver, SearchConfig, outcome

logger = get_logger(__name__)


# -----------------------------
# Shared plumbing


def _collapse(graph: Graph, modules: Sequence[Tuple[FrozenSet[int], Outcome]]) -> Graph:
    """Replace each disjoint module of three or more vertices by its stand-in."""
    position = Position.start(graph)
    mapping: IndexMap = {v: v for v in range(graph.n)}
    for members, result in modules:
        if len(members) < 3:
            continue
        step = replace_module(position, [mapping[v] for v in members], known_outcome=result)
        assert step is not None
        position = step.position
        mapping = {
            v: step.step.index_map[c] for v, c in mapping.items() if c in step.step.index_map
        }
    return position.graph


def _fold(node: DecompTree, results: Sequence[Tuple[Outcome, int]]) -> Outcome:
    """Combine child outcomes (with child orders) across a union or join node."""
    acc, acc_size = results[0]
    for result, size in results[1:]:
        if isinstance(node, UnionNode):
            acc = union_outcome(acc, result)
        else:
            acc = join_outcome(acc, result, acc_size == 1, size == 1)
        acc_size += size
    return acc


def _node_graph(graph: Graph, node: DecompTree) -> Tuple[Graph, IndexMap]:
    return graph.induced_subgraph(sorted(node.vertices))


# -----------------------------
# Neighborhood diversity


def nd_kernel(graph: Graph) -> Tuple[Graph, ReductionTrace]:
    """Shrink every twin class to at most two vertices."""
    position = Position.start(graph)
    trace = ReductionTrace()
    while True:
        for members, kind in twin_partition(position.graph):
            if len(members) >= 3:
                known = Outcome.D if kind is TwinKind.TRUE else Outcome.S
                step = replace_module(position, members, known_outcome=known)
                position = step.position
                trace.append(step.step)
                break
        else:
            return position.graph, trace


# -----------------------------
# Modular-width


def solve_via_modular_width(graph: Graph, config: Optional[SearchConfig] = None) -> Outcome:
    if graph.n == 0:
        return Outcome.D
    tree = modular_decomposition(graph)
    k = width(tree)
    logger.debug("modular-width %d for n=%d", k, graph.n)
    return _mw_outcome(graph, tree, k, config)


def _mw_outcome(
    graph: Graph, node: DecompTree, k: int, config: Optional[SearchConfig]
) -> Outcome:
    sub, index_map = _node_graph(graph, node)
    if isinstance(node, Leaf) or sub.n <= 3 * k:
        return outcome(sub, config=config)
    if isinstance(node, (UnionNode, JoinNode)):
        results = [(_mw_outcome(graph, c, k, config), len(c.vertices)) for c in node.children]
        return _fold(node, results)
    modules = [
        (frozenset(index_map[v] for v in child.vertices), _mw_outcome(graph, child, k, config))
        for child in node.children
        if len(child.vertices) >= 3
    ]
    return outcome(_collapse(sub, modules), config=config)


# -----------------------------
# P4-fewness


@dataclass(frozen=True)
class SpiderPartition:
    r: Tuple[int, ...]
    c: Tuple[int, ...]
    s: Tuple[int, ...]
    thick: bool

    @property
    def legs(self) -> int:
        return len(self.c)


def _thin_spider(graph: Graph) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]]:
    legs = [v for v in range(graph.n) if graph.degree(v) == 1]
    if len(legs) < 2:
        return None
    body = [next(iter(graph.adjacency[s])) for s in legs]
    if len(set(body)) != len(legs) or set(body) & set(legs):
        return None
    body_set = frozenset(body)
    for c in body:
        if not body_set - {c} <= graph.adjacency[c]:
            return None
    rest = tuple(v for v in range(graph.n) if v not in body_set and v not in legs)
    for r in rest:
        if not body_set <= graph.adjacency[r]:
            return None
    return rest, tuple(body), tuple(legs)


def spider_detect(graph: Graph) -> Optional[SpiderPartition]:
    """Spider partition of ``graph`` if it has one; thin is preferred for two legs."""
    thin = _thin_spider(graph)
    if thin is not None:
        r, c, s = thin
        return SpiderPartition(r, c, s, thick=False)
    # the complement of a thick spider is a thin one with C and S swapped
    thick = _thin_spider(graph.complement())
    if thick is not None and len(thick[1]) >= 3:
        r, c, s = thick
        return SpiderPartition(r, s, c, thick=True)
    return None


def solve_via_p4_decomposition(
    graph: Graph, tree: DecompTree, q: int, config: Optional[SearchConfig] = None
) -> Outcome:
    if q < 1:
        raise InputError(f"P4-fewness parameter must be positive, got {q}")
    validate_tree(tree, graph)
    return _p4_outcome(graph, tree, q, config)


def _p4_outcome(
    graph: Graph, node: DecompTree, q: int, config: Optional[SearchConfig]
) -> Outcome:
    sub, index_map = _node_graph(graph, node)
    if isinstance(node, Leaf):
        return outcome(sub, config=config)
    if isinstance(node, SmallNode):
        if len(node.members) > q:
            raise InputError(f"small node has {len(node.members)} vertices, more than q={q}")
        return outcome(sub, config=config)
    if isinstance(node, (UnionNode, JoinNode)):
        results = [(_p4_outcome(graph, c, q, config), len(c.vertices)) for c in node.children]
        return _fold(node, results)
    if isinstance(node, SpiderNode):
        if not node.thick:
            # Dominator opening in C wins; Staller opening reduces to G[R]
            if node.r is None:
                return Outcome.D
            inner = _p4_outcome(graph, node.r, q, config)
            return Outcome.D if inner.winner(Player.STALLER) is Player.DOMINATOR else Outcome.N
        if len(node.c) >= 4:
            return Outcome.D
        modules = []
        if node.r is not None:
            members = frozenset(index_map[v] for v in node.r.vertices)
            modules.append((members, _p4_outcome(graph, node.r, q, config)))
        return outcome(_collapse(sub, modules), config=config)
    if isinstance(node, SeparableNode):
        if len(node.h1) + len(node.h2) >= q:
            raise InputError(f"separable node has |H| >= q={q}")
        members = frozenset(index_map[v] for v in node.child.vertices)
        inner = _p4_outcome(graph, node.child, q, config)
        return outcome(_collapse(sub, [(members, inner)]), config=config)
    if isinstance(node, SubstitutionNode):
        raise InputError("substitution nodes do not occur in a P4 decomposition")
    raise InputError(f"unsupported node {node!r}")


# -----------------------------
# Distance to cluster


def _find_p3(adjacency: List[int], alive: int) -> Optional[Tuple[int, int, int]]:
    """Induced path a-b-c among ``alive`` vertices, centre b."""
    rest = alive
    while rest:
        low = rest & -rest
        b = low.bit_length() - 1
        rest ^= low
        around = adjacency[b] & alive
        pending = around
        while pending:
            bit_a = pending & -pending
            a = bit_a.bit_length() - 1
            pending ^= bit_a
            far = around & ~adjacency[a] & ~bit_a
            if far:
                c = (far & -far).bit_length() - 1
                return a, b, c
    return None


def cluster_deletion_set(graph: Graph, k: int) -> Optional[Tuple[int, ...]]:
    """Minimum vertex set of size at most ``k`` whose removal leaves a cluster."""
    if k < 0:
        raise InputError(f"deletion budget must be non-negative, got {k}")
    adjacency = [mask & ~(1 << v) for v, mask in enumerate(graph.closed_masks)]

    def branch(alive: int, depth: int) -> Optional[int]:
        p3 = _find_p3(adjacency, alive)
        if p3 is None:
            return alive
        if depth == 0:
            return None
        for v in p3:
            found = branch(alive & ~(1 << v), depth - 1)
            if found is not None:
                return found
        return None

    for depth in range(min(k, graph.n) + 1):
        alive = branch(graph.full_mask, depth)
        if alive is not None:
            return tuple(v for v in range(graph.n) if not alive >> v & 1)
    return None


def f_bound(k: int) -> int:
    return (2**k + 3) * 3 ** (2**k) + 2


MAX_PAIR_RULE_PARAMETER = 6


class _ClusterKernel:
    """Cluster-plus-X graph under reduction, with X tracked across steps."""

    def __init__(self, graph: Graph, deletion: Sequence[int]):
        self.position = Position.start(graph)
        self.x = set(deletion)
        self.trace = ReductionTrace()

    @property
    def graph(self) -> Graph:
        return self.position.graph

    def apply(self, result: RewriteResult) -> None:
        index_map = result.step.index_map
        self.x = {index_map[v] for v in self.x if v in index_map}
        self.position = result.position
        self.trace.append(result.step)

    def cliques(self) -> List[Tuple[int, ...]]:
        rest, index_map = self.graph.delete_vertices(self.x)
        back = {new: old for old, new in index_map.items()}
        return [tuple(back[v] for v in c) for c in connected_components(rest)]

    def x_neighborhood(self, v: int) -> FrozenSet[int]:
        return self.graph.adjacency[v] & frozenset(self.x)

    def signature(self, clique: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
        return tuple(sorted(tuple(sorted(self.x_neighborhood(v))) for v in clique))

    def classes(self, size_filter) -> List[List[Tuple[int, ...]]]:
        groups: Dict[Tuple[Tuple[int, ...], ...], List[Tuple[int, ...]]] = {}
        for clique in self.cliques():
            if size_filter(len(clique)):
                groups.setdefault(self.signature(clique), []).append(clique)
        return [groups[key] for key in sorted(groups)]

    def collapse_large_classes(self, keep_three_cliques: bool) -> None:
        """Four or more equal-signature cliques of order >= 3 become one edge
        joined to their X-neighborhood, or are cut down to three cliques."""
        while True:
            group = next((g for g in self.classes(lambda s: s >= 3) if len(g) >= 4), None)
            if group is None:
                return
            if keep_three_cliques:
                doomed = [v for clique in group[3:] for v in clique]
                self.apply(splice("drop_equal_cliques", self.position, group[0], doomed))
                continue
            y = frozenset().union(*(self.x_neighborhood(v) for v in group[0]))
            doomed = [v for clique in group for v in clique]

            def edge_to_y(index_map: IndexMap, base: int) -> List[Tuple[int, int]]:
                edges = [(base, base + 1)]
                edges += [(index_map[x], base + i) for x in y for i in (0, 1)]
                return edges

            self.apply(
                splice(
                    "replace_clique_class",
                    self.position,
                    group[0],
                    doomed,
                    added=2,
                    new_edges=edge_to_y,
                )
            )

    def truncate_cliques(self) -> None:
        """At most two vertices per X-neighborhood inside each clique."""
        while True:
            for clique in self.cliques():
                by_x: Dict[FrozenSet[int], List[int]] = {}
                for v in clique:
                    by_x.setdefault(self.x_neighborhood(v), []).append(v)
                twins = next((t for t in by_x.values() if len(t) >= 3), None)
                if twins is not None:
                    self.apply(replace_module(self.position, twins, known_outcome=Outcome.D))
                    break
            else:
                return

    def reduce_single_vertices(self) -> None:
        """Isolated-in-cluster vertices with equal X-neighborhood: keep two."""
        for group in self.classes(lambda s: s == 1):
            if len(group) > 2:
                members = [clique[0] for clique in group]
                self.apply(replace_module(self.position, members, known_outcome=Outcome.S))
                return self.reduce_single_vertices()

    def reduce_pairs(self, k: int) -> None:
        if k > MAX_PAIR_RULE_PARAMETER:
            logger.debug("pair-clique rule skipped: bound for k=%d is out of reach", k)
            return
        bound = f_bound(k)
        while True:
            group = next((g for g in self.classes(lambda s: s == 2) if len(g) > bound), None)
            if group is None:
                return
            self.apply(splice("drop_pair_clique", self.position, group[-1], group[-1]))


def dtc_kernel(
    graph: Graph, k: int, keep_three_cliques: bool = False
) -> Optional[Tuple[Graph, ReductionTrace]]:
    """Kernel for distance to cluster at most ``k``; ``None`` when infeasible."""
    deletion = cluster_deletion_set(graph, k)
    if deletion is None:
        return None
    kernel = _ClusterKernel(graph, deletion)
    kernel.collapse_large_classes(keep_three_cliques)
    kernel.truncate_cliques()
    kernel.collapse_large_classes(keep_three_cliques)
    kernel.reduce_single_vertices()
    kernel.reduce_pairs(k)
    logger.debug("dtc kernel: n %d -> %d with X=%s", graph.n, kernel.graph.n, list(deletion))
    return kernel.graph, kernel.trace


# -----------------------------
# Feedback edge number


FEN_RULES = tuple(
    RULES[name]
    for name in (
        "remove_dominated_staller_vertex",
        "force_leaf_support",
        "split_dominator_vertex",
        "shorten_pending_path",
        "shorten_internal_path",
    )
)


@dataclass(frozen=True)
class DegreeBound:
    high_degree: int
    leaves: int
    feedback_edge_number: int

    @property
    def bound(self) -> int:
        return 2 * self.feedback_edge_number - 1

    @property
    def holds(self) -> bool:
        """The bound only speaks about graphs with at most one leaf and a cycle."""
        if self.leaves > 1 or self.feedback_edge_number == 0:
            return True
        return self.high_degree <= self.bound


def high_degree_bound(graph: Graph) -> DegreeBound:
    fen, _ = feedback_edge_set(graph)
    return DegreeBound(
        high_degree=sum(1 for v in range(graph.n) if graph.degree(v) >= 3),
        leaves=sum(1 for v in range(graph.n) if graph.degree(v) == 1),
        feedback_edge_number=fen,
    )


@dataclass(frozen=True)
class FirstMoveResult:
    move: Optional[int]
    residual_order: int
    steps: int
    winner: Player

    def to_dict(self) -> Dict[str, object]:
        return {
            "move": self.move,
            "residual_order": self.residual_order,
            "steps": self.steps,
            "winner": self.winner.value,
        }


@dataclass(frozen=True)
class FenReport:
    outcome: Outcome
    feedback_edge_number: int
    staller_first: FirstMoveResult
    dominator_first: Tuple[FirstMoveResult, ...]

    @property
    def largest_residual(self) -> int:
        return max(r.residual_order for r in (self.staller_first, *self.dominator_first))

    def to_dict(self) -> Dict[str, object]:
        return {
            "outcome": self.outcome.value,
            "feedback_edge_number": self.feedback_edge_number,
            "largest_residual": self.largest_residual,
            "staller_first": self.staller_first.to_dict(),
            "dominator_first": [r.to_dict() for r in self.dominator_first],
        }


def fen_kernel(graph: Graph, first_move: Optional[int] = None) -> Tuple[Position, ReductionTrace]:
    """Residual position with Staller to move, after Dominator's ``first_move``
    (or with Staller opening when it is ``None``)."""
    dominator = frozenset() if first_move is None else graph.check_vertices((first_move,))
    start = Position(graph, dominator, frozenset(), Player.STALLER)
    residual, trace = reduce_fixpoint(start, FEN_RULES)
    bound = high_degree_bound(residual.graph)
    logger.debug(
        "fen residual after %s: n=%d high-degree=%d bound=%d holds=%s",
        first_move,
        residual.graph.n,
        bound.high_degree,
        bound.bound,
        bound.holds,
    )
    return residual, trace


def _first_move(task: Tuple[Graph, Optional[int], SearchConfig]) -> FirstMoveResult:
    graph, move, config = task
    residual, trace = fen_kernel(graph, move)
    winner = GameSolver(residual.graph, config).winner(residual)
    return FirstMoveResult(move, residual.graph.n, len(trace), winner)


def fen_report(
    graph: Graph, workers: Optional[int] = None, config: Optional[SearchConfig] = None
) -> FenReport:
    config = config or SearchConfig.from_settings()
    workers = workers or load_settings().workers
    fen, _ = feedback_edge_set(graph)
    tasks = [(graph, None, config)] + [(graph, v, config) for v in range(graph.n)]
    if workers > 1 and graph.n > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_first_move, tasks))
    else:
        results = [_first_move(task) for task in tasks]
    staller_first, dominator_first = results[0], tuple(results[1:])

    dominator_opening = (
        Player.DOMINATOR
        if graph.n == 0 or any(r.winner is Player.DOMINATOR for r in dominator_first)
        else Player.STALLER
    )
    result = Outcome.from_winners(dominator_opening, staller_first.winner)
    logger.info(
        "fen=%d: %d first moves, largest residual %d, outcome %s",
        fen,
        len(dominator_first),
        max(r.residual_order for r in results),
        result,
    )
    return FenReport(result, fen, staller_first, dominator_first)


def solve_via_fen(
    graph: Graph, workers: Optional[int] = None, config: Optional[SearchConfig] = None
) -> Outcome:
    return fen_report(graph, workers, config).outcome
