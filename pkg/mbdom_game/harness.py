"""Seeded verification suites pairing every rewrite, kernel and gadget with the
exact solver.

Instances are drawn from ``random.Random("<suite>/<seed>/<index>")`` so every
instance is reproducible on its own, whichever worker runs it. Failures are
data: they end up as records with ``passed = False``.
"""

from __future__ import annotations

import itertools
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from helper_functions.log_utils import get_logger
from helper_functions.settings import ToolkitSettings, load_settings
from mbdom_game.errors import InputError
from mbdom_game.fpt import dtc_kernel, nd_kernel, solve_via_fen, solve_via_modular_width
from mbdom_game.gadgets import (
    dominator_hardness_gadget,
    staller_hardness_gadget,
    universal_vertex_gadget,
)
from mbdom_game.graphcore import (
    Composition,
    Graph,
    Outcome,
    Player,
    Position,
    attach_path,
    attach_pending_path,
    build_graph,
    cluster_profile,
    compose,
    dominating_set_of_size,
    figure_graph,
    random_graph,
    twin_partition,
)
from mbdom_game.hypergame import Hypergraph, build_hypergraph
from mbdom_game.rewrite import (
    assign_twins,
    cluster_outcome,
    dominator_end_path_position,
    force_leaf_support,
    join_outcome,
    remove_dominated_staller_vertex,
    replace_module,
    shorten_internal_path,
    split_dominator_vertex,
    union_outcome,
)
from mbdom_game.solver import GameSolver, Role, SearchConfig, ShortQuery, outcome, short_game_win

logger = get_logger(__name__)


# -----------------------------
# Types


@dataclass(frozen=True)
class CheckRecord:
    suite: str
    instance: int
    check: str
    description: str
    expected: str
    actual: str
    passed: bool


@dataclass
class HarnessReport:
    suite: str
    seed: int
    count: int
    records: List[CheckRecord] = field(default_factory=list)

    @property
    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> Dict[str, object]:
        total = len(self.records)
        failed = len(self.failures)
        return {
            "total": total,
            "passed": total - failed,
            "failed": failed,
            "passRate": round((total - failed) / total * 100, 2) if total else 0,
        }

    def to_dict(self) -> Dict[str, object]:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "count": self.count,
            "summary": self.summary(),
            "records": [asdict(r) for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _record(
    suite: str, instance: int, check: str, description: str, expected: object, actual: object
) -> CheckRecord:
    return CheckRecord(suite, instance, check, description, str(expected), str(actual), expected == actual)


# -----------------------------
# Instance generators


def _random_graph(rng: random.Random, low: int, high: int) -> Graph:
    n = rng.randint(low, max(low, high))
    return random_graph(n, rng.choice((0.25, 0.4, 0.55)), rng.randrange(2**31))


def _random_claims(
    rng: random.Random, graph: Graph, exclude: Sequence[int] = (), rate: float = 0.15
) -> Tuple[frozenset, frozenset]:
    dominator, staller = set(), set()
    for v in range(graph.n):
        if v in exclude:
            continue
        roll = rng.random()
        if roll < rate:
            dominator.add(v)
        elif roll < 2 * rate:
            staller.add(v)
    return frozenset(dominator), frozenset(staller)


def _random_tree(rng: random.Random, n: int) -> List[Tuple[int, int]]:
    return [(rng.randrange(v), v) for v in range(1, n)]


def _blow_up(rng: random.Random, cap: int) -> Graph:
    """Random base graph whose vertices become random twin classes."""
    base = _random_graph(rng, 2, min(5, cap))
    sizes = []
    budget = cap - base.n
    for _ in range(base.n):
        extra = rng.randint(0, min(3, budget))
        budget -= extra
        sizes.append(1 + extra)
    starts = list(itertools.accumulate([0] + sizes))
    edges = []
    for v, size in enumerate(sizes):
        if rng.random() < 0.5:
            edges.extend(itertools.combinations(range(starts[v], starts[v] + size), 2))
    for u, v in base.edges():
        edges.extend(
            (a, b)
            for a in range(starts[u], starts[u] + sizes[u])
            for b in range(starts[v], starts[v] + sizes[v])
        )
    return build_graph(starts[-1], edges)


def _clique_sizes(rng: random.Random, total: int) -> List[int]:
    sizes: List[int] = []
    while sum(sizes) < total:
        sizes.append(min(rng.randint(1, 4), total - sum(sizes)))
    return sizes


def _substitute(host: Graph, x: int, module: Graph) -> Tuple[Graph, List[int]]:
    """Replace host vertex ``x`` by ``module``; returns the graph and the module's vertices."""
    n = host.n
    edges = [e for e in host.edges() if x not in e]
    edges += [(n + a, n + b) for a, b in module.edges()]
    edges += [(y, n + i) for y in host.adjacency[x] for i in range(module.n)]
    grown = build_graph(n + module.n, edges)
    graph, index_map = grown.delete_vertices([x])
    return graph, [index_map[n + i] for i in range(module.n)]


@lru_cache(maxsize=None)
def _small_graphs(max_order: int) -> Tuple[Graph, ...]:
    """Every labelled graph on at most ``max_order`` vertices."""
    graphs = []
    for n in range(max_order + 1):
        pairs = list(itertools.combinations(range(n), 2))
        for mask in range(1 << len(pairs)):
            graphs.append(build_graph(n, [p for i, p in enumerate(pairs) if mask >> i & 1]))
    return tuple(graphs)


# -----------------------------
# Suites


FIGURE_EXPECTATIONS = (("fig2a", Outcome.D), ("fig2b", Outcome.N), ("fig2c", Outcome.S))


def figure_outcomes(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    name, expected = FIGURE_EXPECTATIONS[index]
    return [_record(suite, index, "outcome", name, expected, outcome(figure_graph(name)))]


def union_join_tables(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    kind = (Composition.UNION, Composition.JOIN, Composition.CLUSTER)[index % 3]
    if kind is Composition.CLUSTER:
        # clusters run half again as large as the composed parts
        sizes = _clique_sizes(rng, rng.randint(1, max(1, cap * 3 // 2)))
        graph = build_graph(0, [])
        for size in sizes:
            part = build_graph(size, itertools.combinations(range(size), 2))
            graph = compose(graph, part, Composition.UNION)
        expected = cluster_outcome(cluster_profile(graph))
        return [_record(suite, index, "cluster", f"cliques {sizes}", expected, outcome(graph))]

    left, right = _random_graph(rng, 1, cap), _random_graph(rng, 1, cap)
    lo, ro = outcome(left), outcome(right)
    if kind is Composition.UNION:
        expected = union_outcome(lo, ro)
    else:
        expected = join_outcome(lo, ro, left.n == 1, right.n == 1)
    actual = outcome(compose(left, right, kind))
    description = f"{kind.value} of {left.to_dict()} and {right.to_dict()}"
    return [_record(suite, index, kind.value, description, expected, actual)]


def _position_outcome(position: Position) -> Outcome:
    return GameSolver(position.graph).outcome(position.dominator, position.staller)


def rewrite_soundness(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    rule = index % 5
    if rule == 0:
        graph = _random_graph(rng, 2, cap)
        if not graph.edge_count:
            graph = build_graph(graph.n, [(0, 1)])
        a, b = rng.choice(graph.edges())
        dominator, staller = _random_claims(rng, graph, exclude=(a, b))
        before = Position(graph, dominator | {a}, staller | {b})
        result = remove_dominated_staller_vertex(before)
        name = "remove_dominated_staller_vertex"
    elif rule == 1:
        graph = _random_graph(rng, 1, cap)
        v = rng.randrange(graph.n)
        dominator, staller = _random_claims(rng, graph, exclude=(v,))
        before = Position(graph, dominator | {v}, staller)
        result = split_dominator_vertex(before, v)
        name = "split_dominator_vertex"
    elif rule == 2:
        base = _random_graph(rng, 1, cap - 1)
        support = rng.randrange(base.n)
        graph = attach_pending_path(base, support, 1)
        dominator, staller = _random_claims(rng, graph, exclude=(support, base.n))
        before = Position(graph, dominator, staller, Player.STALLER)
        result = force_leaf_support(before)
        assert result is not None
        solver_before = GameSolver(before.graph)
        solver_after = GameSolver(result.position.graph)
        return [
            _record(
                suite,
                index,
                "force_leaf_support",
                f"{graph.to_dict()} D={sorted(dominator)} S={sorted(staller)}",
                solver_before.winner(before),
                solver_after.winner(result.position),
            )
        ]
    elif rule == 3:
        base = _random_graph(rng, 1, cap - 1)
        x = rng.randrange(base.n)
        t = base.n
        true_twin = rng.random() < 0.5
        edges = base.edges() + [(y, t) for y in base.adjacency[x]]
        if true_twin:
            edges.append((x, t))
        graph = build_graph(base.n + 1, edges)
        dominator, staller = _random_claims(rng, graph, exclude=(x, t))
        before = Position(graph, dominator, staller)
        result = assign_twins(before, x, t)
        name = "assign_twins"
    else:
        module = _random_graph(rng, 3, min(5, cap - 1))
        host = _random_graph(rng, 1, max(1, cap - module.n + 1))
        graph, members = _substitute(host, rng.randrange(host.n), module)
        before = Position.start(graph)
        result = replace_module(before, members)
        name = "replace_module"

    assert result is not None
    description = (
        f"{before.graph.to_dict()} D={sorted(before.dominator)} S={sorted(before.staller)}"
    )
    return [
        _record(
            suite, index, name, description, _position_outcome(before), _position_outcome(result.position)
        )
    ]


def anchor_pair_checks(suite: str, index: int, base: Graph) -> List[CheckRecord]:
    """Lengths 7 and 9 agree, and shortening the 9-path keeps the outcome, for every anchor pair."""
    records = []
    for u, v in itertools.combinations(range(base.n), 2):
        seven = attach_path(base, u, v, 7)
        nine = attach_path(base, u, v, 9)
        description = f"{base.to_dict()} anchors {u},{v}"
        nine_outcome = outcome(nine)
        records.append(_record(suite, index, "lengths 7 and 9", description, outcome(seven), nine_outcome))
        shortened = shorten_internal_path(Position.start(nine), u, v, list(range(base.n, base.n + 9)))
        assert shortened is not None
        records.append(
            _record(
                suite, index, "shorten_internal_path", description, nine_outcome, outcome(shortened.position.graph)
            )
        )
    return records


def path_shortening(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    return anchor_pair_checks(suite, index, _random_graph(rng, 2, cap))


def nd_kernel_suite(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    graph = _blow_up(rng, cap)
    kernel, _ = nd_kernel(graph)
    classes = len(twin_partition(graph))
    description = f"{graph.to_dict()}"
    return [
        _record(suite, index, "outcome", description, outcome(graph), outcome(kernel)),
        _record(suite, index, "size", description, True, kernel.n <= 2 * classes),
    ]


def mw_solver(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    graph = _blow_up(rng, cap) if index % 2 else _random_graph(rng, 1, cap)
    return [
        _record(
            suite, index, "outcome", f"{graph.to_dict()}", outcome(graph), solve_via_modular_width(graph)
        )
    ]


def fen_solver(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    if index % 3 == 2:
        # long cycle with a pending path, to exercise path shortening
        length = rng.randint(min(10, cap), min(12, cap))
        edges = [(i, (i + 1) % length) for i in range(length)]
        extra = rng.randint(0, cap - length)
        edges += [(i - 1 if i > length else 0, i) for i in range(length, length + extra)]
        graph = build_graph(length + extra, edges)
    else:
        n = rng.randint(4, cap)
        edges = set(_random_tree(rng, n))
        for _ in range(rng.randint(0, 3)):
            a, b = rng.sample(range(n), 2)
            edges.add((min(a, b), max(a, b)))
        graph = build_graph(n, edges)
    return [
        _record(suite, index, "outcome", f"{graph.to_dict()}", outcome(graph), solve_via_fen(graph, workers=1))
    ]


def dtc_kernel_suite(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    k = rng.randint(0, 2)
    if index % 4 == 3:
        k = min(k, 1)
        sizes = [3, 3, 3, 3]
    else:
        sizes = _clique_sizes(rng, rng.randint(1, cap - k))
    cluster_order = sum(sizes)
    edges = []
    start = 0
    anchors = []
    for size in sizes:
        edges.extend(itertools.combinations(range(start, start + size), 2))
        anchors.append(start)
        start += size
    for x in range(cluster_order, cluster_order + k):
        if index % 4 == 3:
            edges.extend((a, x) for a in anchors)
        else:
            edges.extend((v, x) for v in range(cluster_order) if rng.random() < 0.4)
        edges.extend((y, x) for y in range(cluster_order, x) if rng.random() < 0.5)
    graph = build_graph(cluster_order + k, edges)
    reduced = dtc_kernel(graph, k)
    description = f"k={k} {graph.to_dict()}"
    if reduced is None:
        return [_record(suite, index, "feasible", description, True, False)]
    kernel, _ = reduced
    return [
        _record(suite, index, "outcome", description, outcome(graph), outcome(kernel)),
        _record(suite, index, "never grows", description, True, kernel.n <= graph.n),
    ]


def _random_hypergraph(rng: random.Random, cap: int) -> Hypergraph:
    n = rng.randint(1, cap)
    edges = [
        rng.sample(range(n), rng.randint(1, min(3, n))) for _ in range(rng.randint(1, 4))
    ]
    for v in range(n):
        if not any(v in e for e in edges):
            rng.choice(edges).append(v)
    return build_hypergraph(n, edges)


def gadget_staller(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    hypergraph = _random_hypergraph(rng, cap)
    k = rng.randint(0, 3)
    gadget = staller_hardness_gadget(hypergraph, k)
    records = []
    for maker_first in (True, False):
        maker = short_game_win(
            hypergraph, ShortQuery(Role.MAKER, k, Role.MAKER if maker_first else Role.BREAKER)
        )
        staller = short_game_win(
            gadget.graph,
            ShortQuery(Role.STALLER, k + 1, Role.STALLER if maker_first else Role.DOMINATOR),
        )
        check = "maker first" if maker_first else "breaker first"
        records.append(_record(suite, index, check, f"k={k} {hypergraph.to_dict()}", maker, staller))
    return records


def gadget_dominator(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    graph = _random_graph(rng, 1, cap)
    k = rng.randint(1, 3)
    gadget = dominator_hardness_gadget(graph)
    has_set = dominating_set_of_size(graph, k) is not None
    wins = short_game_win(gadget.graph, ShortQuery(Role.DOMINATOR, k, Role.STALLER))
    description = f"k={k} {graph.to_dict()}"
    converse = "holds" if wins <= has_set else "counterexample"
    return [
        _record(suite, index, "forward", description, True, (not has_set) or wins),
        CheckRecord(suite, index, "converse (informational)", description, "holds", converse, True),
    ]


def gadget_universal(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    graph = _random_graph(rng, 1, cap - 1)
    gadget = universal_vertex_gadget(graph)
    (hub,) = gadget.vertices_of("universal")
    after_hub = Position(gadget.graph, frozenset(), frozenset({hub}), Player.DOMINATOR)
    bare = Position.start(graph, Player.DOMINATOR)
    return [
        _record(
            suite,
            index,
            "continuation",
            f"{graph.to_dict()}",
            GameSolver(graph).winner(bare),
            GameSolver(gadget.graph).winner(after_hub),
        )
    ]


EXHAUSTIVE_ORDER = 5
PATH_CHECKS = 12


def _selfcheck_graph(suite: str, index: int, graph: Graph, rng: random.Random) -> List[CheckRecord]:
    solver = GameSolver(graph)
    description = f"{graph.to_dict()}"
    dominator_first = solver.winner(Position.start(graph, Player.DOMINATOR))
    staller_first = solver.winner(Position.start(graph, Player.STALLER))
    records = [
        _record(
            suite,
            index,
            "first-player advantage",
            description,
            True,
            not (dominator_first is Player.STALLER and staller_first is Player.DOMINATOR),
        ),
        _record(
            suite,
            index,
            "pruning agrees",
            description,
            outcome(graph, config=SearchConfig.reference()),
            Outcome.from_winners(dominator_first, staller_first),
        ),
    ]
    if graph.n:
        v = rng.randrange(graph.n)
        extra_dominator = solver.winner(Position(graph, frozenset({v}), frozenset(), Player.STALLER))
        extra_staller = solver.winner(Position(graph, frozenset(), frozenset({v}), Player.DOMINATOR))
        monotone = (staller_first is Player.STALLER or extra_dominator is Player.DOMINATOR) and (
            dominator_first is Player.DOMINATOR or extra_staller is Player.STALLER
        )
        records.append(_record(suite, index, "free-vertex monotonicity", f"{description} v={v}", True, monotone))
    return records


def solver_selfchecks(suite: str, index: int, rng: random.Random, cap: int) -> List[CheckRecord]:
    small = _small_graphs(EXHAUSTIVE_ORDER)
    if index < PATH_CHECKS:
        n = index + 1
        position = dominator_end_path_position(n)
        return [
            _record(
                suite,
                index,
                "dominator path endpoint",
                f"P{n}",
                Player.DOMINATOR,
                GameSolver(position.graph).winner(position),
            )
        ]
    index_small = index - PATH_CHECKS
    if index_small < len(small):
        return _selfcheck_graph(suite, index, small[index_small], rng)
    graph = _random_graph(rng, EXHAUSTIVE_ORDER + 1, cap)
    return _selfcheck_graph(suite, index, graph, rng)


@dataclass(frozen=True)
class Suite:
    check: Callable[[str, int, random.Random, int], List[CheckRecord]]
    fixed_instances: int = 0
    scales_with_count: bool = True


SUITES: Dict[str, Suite] = {
    "figure-outcomes": Suite(figure_outcomes, len(FIGURE_EXPECTATIONS), scales_with_count=False),
    "union-join-tables": Suite(union_join_tables),
    "rewrite-soundness": Suite(rewrite_soundness),
    "path-shortening": Suite(path_shortening),
    "nd-kernel": Suite(nd_kernel_suite),
    "mw-solver": Suite(mw_solver),
    "fen-solver": Suite(fen_solver),
    "dtc-kernel": Suite(dtc_kernel_suite),
    "gadget-staller": Suite(gadget_staller),
    "gadget-dominator": Suite(gadget_dominator),
    "gadget-universal": Suite(gadget_universal),
    "solver-selfchecks": Suite(solver_selfchecks, PATH_CHECKS),
}


# -----------------------------
# Runner


def _run_instance(task: Tuple[str, int, int, int]) -> List[CheckRecord]:
    suite, seed, index, cap = task
    rng = random.Random(f"{suite}/{seed}/{index}")
    return SUITES[suite].check(suite, index, rng, cap)


def instance_count(suite: str, count: int) -> int:
    spec = SUITES[suite]
    fixed = spec.fixed_instances
    if suite == "solver-selfchecks":
        fixed += len(_small_graphs(EXHAUSTIVE_ORDER))
    return fixed + (count if spec.scales_with_count else 0)


def run_verification_harness(
    suite: str,
    seed: int,
    count: int,
    workers: Optional[int] = None,
    settings: Optional[ToolkitSettings] = None,
) -> HarnessReport:
    if suite not in SUITES:
        raise InputError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    if count < 0:
        raise InputError(f"instance count must be non-negative, got {count}")
    settings = settings or load_settings()
    workers = workers or settings.workers
    cap = settings.harness.cap(suite)
    total = instance_count(suite, count)
    tasks = [(suite, seed, index, cap) for index in range(total)]
    logger.info("suite %s: %d instances, seed %d, cap %d, %d workers", suite, total, seed, cap, workers)

    if workers > 1 and total > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(_run_instance, tasks, chunksize=max(1, total // (4 * workers))))
    else:
        batches = [_run_instance(task) for task in tasks]

    records = sorted(
        (r for batch in batches for r in batch), key=lambda r: (r.instance, r.check)
    )
    report = HarnessReport(suite, seed, count, records)
    logger.info("suite %s finished: %s", suite, report.summary())
    return report
