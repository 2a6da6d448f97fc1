"""Graph and position representation, structural queries and graph families."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from mbdom_game.errors import InconsistencyError, InputError

Edge = Tuple[int, int]
IndexMap = Dict[int, int]


# -----------------------------
# Types


class Player(str, Enum):
    DOMINATOR = "dominator"
    STALLER = "staller"

    @property
    def other(self) -> "Player":
        return Player.STALLER if self is Player.DOMINATOR else Player.DOMINATOR

    def __str__(self) -> str:
        return self.value.capitalize()


class Outcome(str, Enum):
    D = "D"
    N = "N"
    S = "S"

    def winner(self, first: Player) -> Player:
        """Winner of the game when ``first`` moves first."""
        if self is Outcome.D:
            return Player.DOMINATOR
        if self is Outcome.S:
            return Player.STALLER
        return first

    @classmethod
    def from_winners(cls, dominator_first: Player, staller_first: Player) -> "Outcome":
        if dominator_first is Player.DOMINATOR and staller_first is Player.DOMINATOR:
            return cls.D
        if dominator_first is Player.STALLER and staller_first is Player.STALLER:
            return cls.S
        if dominator_first is Player.DOMINATOR and staller_first is Player.STALLER:
            return cls.N
        raise InconsistencyError(
            "second player wins from both sides, which a Maker-Breaker game cannot produce"
        )

    def __str__(self) -> str:
        return self.value


class Composition(str, Enum):
    UNION = "union"
    JOIN = "join"
    CLUSTER = "cluster"


class TwinKind(str, Enum):
    TRUE = "true"  # shared closed neighborhood
    FALSE = "false"  # shared open neighborhood


@dataclass(frozen=True)
class Graph:
    n: int
    adjacency: Tuple[FrozenSet[int], ...]
    labels: Optional[Tuple[str, ...]] = None

    def neighbors(self, v: int) -> FrozenSet[int]:
        self._check_vertex(v)
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def vertices(self) -> range:
        return range(self.n)

    def edges(self) -> List[Edge]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adjacency[u]) if u < v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    @cached_property
    def closed_masks(self) -> Tuple[int, ...]:
        """Closed neighborhoods as bitmasks, indexed by vertex."""
        masks = []
        for v in range(self.n):
            mask = 1 << v
            for u in self.adjacency[v]:
                mask |= 1 << u
            masks.append(mask)
        return tuple(masks)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def label(self, v: int) -> str:
        if self.labels is not None:
            return self.labels[v]
        return str(v)

    def _check_vertex(self, v: int) -> None:
        if not isinstance(v, int) or not 0 <= v < self.n:
            raise InputError(f"vertex {v!r} is not in 0..{self.n - 1}")

    def check_vertices(self, vertices: Iterable[int]) -> FrozenSet[int]:
        result = frozenset(vertices)
        for v in result:
            self._check_vertex(v)
        return result

    def induced_subgraph(self, vertices: Iterable[int]) -> Tuple["Graph", IndexMap]:
        """Subgraph on ``vertices``, renumbered densely in increasing order."""
        keep = sorted(self.check_vertices(vertices))
        index_map = {old: new for new, old in enumerate(keep)}
        edges = [
            (index_map[u], index_map[v])
            for u in keep
            for v in self.adjacency[u]
            if v in index_map and u < v
        ]
        labels = tuple(self.labels[v] for v in keep) if self.labels is not None else None
        return build_graph(len(keep), edges, labels), index_map

    def delete_vertices(self, vertices: Iterable[int]) -> Tuple["Graph", IndexMap]:
        removed = self.check_vertices(vertices)
        return self.induced_subgraph(v for v in range(self.n) if v not in removed)

    def complement(self) -> "Graph":
        edges = [
            (u, v)
            for u in range(self.n)
            for v in range(u + 1, self.n)
            if v not in self.adjacency[u]
        ]
        return build_graph(self.n, edges, self.labels)

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"n": self.n, "edges": [list(e) for e in self.edges()]}
        if self.labels is not None:
            data["labels"] = list(self.labels)
        return data


@dataclass(frozen=True)
class Position:
    graph: Graph
    dominator: FrozenSet[int] = field(default_factory=frozenset)
    staller: FrozenSet[int] = field(default_factory=frozenset)
    to_move: Player = Player.STALLER

    def __post_init__(self) -> None:
        object.__setattr__(self, "dominator", self.graph.check_vertices(self.dominator))
        object.__setattr__(self, "staller", self.graph.check_vertices(self.staller))
        object.__setattr__(self, "to_move", Player(self.to_move))
        overlap = self.dominator & self.staller
        if overlap:
            raise InputError(f"vertices {sorted(overlap)} are claimed by both players")

    @classmethod
    def start(cls, graph: Graph, to_move: Player = Player.STALLER) -> "Position":
        return cls(graph, frozenset(), frozenset(), to_move)

    @property
    def unclaimed(self) -> List[int]:
        claimed = self.dominator | self.staller
        return [v for v in range(self.graph.n) if v not in claimed]

    def claim(self, v: int) -> "Position":
        """Position after the player to move claims ``v``."""
        if v in self.dominator or v in self.staller:
            raise InputError(f"vertex {v} is already claimed")
        if self.to_move is Player.DOMINATOR:
            return Position(self.graph, self.dominator | {v}, self.staller, Player.STALLER)
        return Position(self.graph, self.dominator, self.staller | {v}, Player.DOMINATOR)

    def with_mover(self, to_move: Player) -> "Position":
        return Position(self.graph, self.dominator, self.staller, to_move)


@dataclass(frozen=True)
class TwinPartition:
    classes: Tuple[Tuple[int, ...], ...]
    kinds: Tuple[TwinKind, ...]

    def __iter__(self):
        return iter(zip(self.classes, self.kinds))

    def __len__(self) -> int:
        return len(self.classes)


# -----------------------------
# Construction and queries


def build_graph(
    n: int, edges: Iterable[Sequence[int]], labels: Optional[Sequence[str]] = None
) -> Graph:
    if n < 0:
        raise InputError(f"vertex count must be non-negative, got {n}")
    adjacency: List[set] = [set() for _ in range(n)]
    for edge in edges:
        if len(edge) != 2:
            raise InputError(f"edge {edge!r} does not have two endpoints")
        u, v = int(edge[0]), int(edge[1])
        for w in (u, v):
            if not 0 <= w < n:
                raise InputError(f"edge endpoint {w} is not in 0..{n - 1}")
        if u == v:
            raise InputError(f"self-loop on vertex {u} is not allowed")
        adjacency[u].add(v)
        adjacency[v].add(u)
    if labels is not None:
        labels = tuple(str(label) for label in labels)
        if len(labels) != n:
            raise InputError(f"expected {n} labels, got {len(labels)}")
    return Graph(n, tuple(frozenset(a) for a in adjacency), labels)


def graph_from_dict(data: Dict[str, Any]) -> Graph:
    try:
        return build_graph(int(data["n"]), data.get("edges", []), data.get("labels"))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed graph document: {exc}") from exc


def closed_neighborhood(graph: Graph, v: int) -> FrozenSet[int]:
    return graph.neighbors(v) | {v}


def is_dominating(graph: Graph, vertices: Iterable[int]) -> bool:
    chosen = graph.check_vertices(vertices)
    dominated = 0
    for v in chosen:
        dominated |= graph.closed_masks[v]
    return dominated == graph.full_mask


def is_module(graph: Graph, module: Iterable[int]) -> bool:
    members = graph.check_vertices(module)
    if not members:
        return True
    for x in range(graph.n):
        if x in members:
            continue
        hits = len(graph.adjacency[x] & members)
        if 0 < hits < len(members):
            return False
    return True


def twin_partition(graph: Graph) -> TwinPartition:
    """Group vertices by closed, then open, neighborhood signature.

    Classes are sorted by smallest member. Singletons carry ``TwinKind.TRUE``.
    """
    by_closed: Dict[FrozenSet[int], List[int]] = {}
    for v in range(graph.n):
        by_closed.setdefault(closed_neighborhood(graph, v), []).append(v)

    classes: List[Tuple[Tuple[int, ...], TwinKind]] = []
    leftovers: List[int] = []
    for members in by_closed.values():
        if len(members) >= 2:
            classes.append((tuple(members), TwinKind.TRUE))
        else:
            leftovers.extend(members)

    by_open: Dict[FrozenSet[int], List[int]] = {}
    for v in sorted(leftovers):
        by_open.setdefault(graph.adjacency[v], []).append(v)
    for members in by_open.values():
        kind = TwinKind.FALSE if len(members) >= 2 else TwinKind.TRUE
        classes.append((tuple(members), kind))

    classes.sort(key=lambda item: item[0][0])
    return TwinPartition(
        classes=tuple(c for c, _ in classes), kinds=tuple(k for _, k in classes)
    )


def are_twins(graph: Graph, u: int, v: int) -> bool:
    if u == v:
        return False
    return (
        closed_neighborhood(graph, u) == closed_neighborhood(graph, v)
        or graph.neighbors(u) == graph.neighbors(v)
    )


def compose(left: Graph, right: Graph, kind: Composition | str) -> Graph:
    kind = Composition(kind)
    if kind is Composition.CLUSTER:
        raise InputError("graphs compose by union or join only")
    shift = left.n
    edges = left.edges() + [(u + shift, v + shift) for u, v in right.edges()]
    if kind is Composition.JOIN:
        edges += [(u, v + shift) for u in range(left.n) for v in range(right.n)]
    labels = None
    if left.labels is not None or right.labels is not None:
        labels = [left.label(v) for v in range(left.n)] + [
            right.label(v) if right.labels is not None else str(v + shift)
            for v in range(right.n)
        ]
    return build_graph(left.n + right.n, edges, labels)


def feedback_edge_set(graph: Graph) -> Tuple[int, List[Edge]]:
    """Non-tree edges of a spanning forest; their number is m - n + components."""
    nx_graph = graph.to_networkx()
    forest = {
        (min(u, v), max(u, v))
        for u, v in nx.minimum_spanning_edges(nx_graph, algorithm="kruskal", data=False)
    }
    extra = [e for e in graph.edges() if e not in forest]
    components = nx.number_connected_components(nx_graph) if graph.n else 0
    count = graph.edge_count - graph.n + components
    assert count == len(extra)
    return count, extra


def cluster_profile(graph: Graph) -> Tuple[bool, int]:
    is_cluster = True
    isolated = 0
    for component in nx.connected_components(graph.to_networkx()):
        size = len(component)
        if size == 1:
            isolated += 1
        inner = sum(len(graph.adjacency[v] & component) for v in component) // 2
        if inner != size * (size - 1) // 2:
            is_cluster = False
    return is_cluster, isolated


def connected_components(graph: Graph) -> List[List[int]]:
    return sorted(
        (sorted(c) for c in nx.connected_components(graph.to_networkx())),
        key=lambda c: c[0],
    )


def minimum_dominating_sets(graph: Graph, k: int) -> Iterator[Tuple[int, ...]]:
    """Every dominating set of exactly ``k`` vertices, in lexicographic order."""
    full = graph.full_mask
    masks = graph.closed_masks
    for combo in itertools.combinations(range(graph.n), k):
        dominated = 0
        for v in combo:
            dominated |= masks[v]
        if dominated == full:
            yield combo


def dominating_set_of_size(graph: Graph, k: int) -> Optional[Tuple[int, ...]]:
    """Lexicographically first dominating set with at most ``k`` vertices."""
    for size in range(0, min(k, graph.n) + 1):
        found = next(minimum_dominating_sets(graph, size), None)
        if found is not None:
            return found
    return None


def domination_number(graph: Graph) -> int:
    found = dominating_set_of_size(graph, graph.n)
    assert found is not None
    return len(found)


# -----------------------------
# Families


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def clique_graph(n: int) -> Graph:
    return build_graph(n, itertools.combinations(range(n), 2))


def star_graph(leaves: int) -> Graph:
    """Star with centre 0 and ``leaves`` leaves."""
    return build_graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError(f"a cycle needs at least 3 vertices, got {n}")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def empty_graph(n: int) -> Graph:
    return build_graph(n, [])


def attach_path(graph: Graph, u: int, v: int, k: int) -> Graph:
    """Add a k-vertex path whose extremities are joined to ``u`` and ``v``.

    The new path occupies indices n..n+k-1, in order from the ``u`` side.
    """
    graph.check_vertices((u, v))
    if k < 1:
        raise InputError(f"attached path needs at least one vertex, got {k}")
    n = graph.n
    edges = graph.edges() + [(n + i, n + i + 1) for i in range(k - 1)]
    edges += [(u, n), (v, n + k - 1)]
    return build_graph(n + k, edges)


def attach_pending_path(graph: Graph, u: int, k: int) -> Graph:
    """Add a k-vertex path v1..vk with only v1 joined to ``u``."""
    graph.check_vertices((u,))
    if k < 1:
        raise InputError(f"pending path needs at least one vertex, got {k}")
    n = graph.n
    edges = graph.edges() + [(n + i, n + i + 1) for i in range(k - 1)] + [(u, n)]
    return build_graph(n + k, edges)


def add_universal_vertex(graph: Graph) -> Graph:
    n = graph.n
    return build_graph(n + 1, graph.edges() + [(v, n) for v in range(n)])


def random_graph(n: int, edge_probability: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p) drawn with networkx from ``random.Random(seed)``."""
    if not 0.0 <= edge_probability <= 1.0:
        raise InputError(f"edge probability must be in [0, 1], got {edge_probability}")
    sample = nx.gnp_random_graph(n, edge_probability, seed=seed)
    return build_graph(n, sample.edges())


FAMILIES = {
    "path": path_graph,
    "clique": clique_graph,
    "star": star_graph,
    "cycle": cycle_graph,
    "empty": empty_graph,
    "attach_path": attach_path,
    "attach_pending_path": attach_pending_path,
    "add_universal_vertex": add_universal_vertex,
    "random": random_graph,
}

# families whose first argument is a base graph
GRAPH_FAMILIES = frozenset({"attach_path", "attach_pending_path", "add_universal_vertex"})


def generate(family: str, *args: Any) -> Graph:
    try:
        builder = FAMILIES[family]
    except KeyError:
        raise InputError(
            f"unknown family {family!r}; expected one of {', '.join(sorted(FAMILIES))}"
        ) from None
    return builder(*args)


def parse_family_spec(text: str) -> Tuple[str, List[str]]:
    """Split ``name:arg1,arg2`` into its family name and raw arguments."""
    name, _, rest = text.partition(":")
    args = [a.strip() for a in rest.split(",")] if rest else []
    return name.strip(), args


# -----------------------------
# Reference figures

FIGURES_FILE = Path(__file__).resolve().parent.parent / "metadata" / "figures.json"


@lru_cache(maxsize=None)
def figure_catalogue() -> Dict[str, Dict[str, Any]]:
    """Entries of ``metadata/figures.json`` by name, graphs and hypergraphs alike."""
    # file_reader imports this module
    from helper_functions.file_reader import read_json

    data = read_json(FIGURES_FILE)
    return {entry["name"]: entry for entry in [*data.get("figures", []), *data.get("hypergraphs", [])]}


def _figure_entry(name: str) -> Dict[str, Any]:
    graphs = {k: v for k, v in figure_catalogue().items() if "dominator" in v}
    try:
        return graphs[name]
    except KeyError:
        raise InputError(
            f"unknown figure {name!r}; expected one of {', '.join(sorted(graphs))}"
        ) from None


def figure_graph(name: str) -> Graph:
    entry = _figure_entry(name)
    return build_graph(entry["n"], [tuple(e) for e in entry["edges"]])


def figure_position(name: str) -> Position:
    """The figure's graph with its printed Dominator claims, Staller to move."""
    graph = figure_graph(name)
    return Position(graph, frozenset(_figure_entry(name)["dominator"]), frozenset(), Player.STALLER)
