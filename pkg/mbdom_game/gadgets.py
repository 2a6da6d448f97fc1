"""Graph constructions from the hardness reductions.

Each constructor returns a ``GadgetInstance`` whose correspondence names the
source object behind every output vertex, so checks can talk about hyperedges
and source vertices instead of raw indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from mbdom_game.errors import InconsistencyError, InputError
from mbdom_game.graphcore import Graph, add_universal_vertex, build_graph
from mbdom_game.hypergame import Hypergraph


@dataclass(frozen=True)
class GadgetInstance:
    kind: str
    graph: Graph
    correspondence: Dict[str, Tuple[int, ...]]
    k: Optional[int] = None

    def __post_init__(self) -> None:
        covered = sorted(v for vertices in self.correspondence.values() for v in vertices)
        if covered != list(range(self.graph.n)):
            raise InconsistencyError(f"{self.kind} gadget correspondence does not cover each vertex once")

    def vertices_of(self, source: str) -> Tuple[int, ...]:
        try:
            return self.correspondence[source]
        except KeyError:
            raise InputError(f"{source!r} is not a source object of this gadget") from None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "k": self.k,
            "graph": self.graph.to_dict(),
            "correspondence": {key: list(value) for key, value in self.correspondence.items()},
        }


def staller_hardness_gadget(hypergraph: Hypergraph, k: int) -> GadgetInstance:
    """Clique on the hypergraph vertices plus k+2 copies of every hyperedge.

    A copy of hyperedge f is adjacent to exactly the clique vertices of f, so
    Staller isolates it by holding all of f and the copy itself.
    """
    if k < 0:
        raise InputError(f"k must be non-negative, got {k}")
    covered = {v for edge in hypergraph.edges for v in edge}
    isolated = sorted(set(range(hypergraph.n)) - covered)
    if isolated:
        raise InputError(f"hypergraph vertices {isolated} lie in no hyperedge")

    n = hypergraph.n
    copies = k + 2
    edges: List[Tuple[int, int]] = [(u, v) for u in range(n) for v in range(u + 1, n)]
    labels = [f"v{i}" for i in range(n)]
    correspondence: Dict[str, Tuple[int, ...]] = {f"u{i}": (i,) for i in range(n)}
    for j, edge in enumerate(hypergraph.edges):
        start = n + j * copies
        block = tuple(range(start, start + copies))
        correspondence[f"f{j}"] = block
        for t, copy in enumerate(block):
            labels.append(f"v_f{j}^{t + 1}")
            edges.extend((member, copy) for member in edge)
    graph = build_graph(n + copies * len(hypergraph.edges), edges, labels)
    return GadgetInstance("staller", graph, correspondence, k)


def dominator_hardness_gadget(graph: Graph) -> GadgetInstance:
    """Two copies x_i (index i) and y_i (index n+i) of every vertex.

    x_i y_i is an edge, and every edge v_i v_j becomes the four edges between
    {x_i, y_i} and {x_j, y_j}.
    """
    n = graph.n
    edges: List[Tuple[int, int]] = [(i, n + i) for i in range(n)]
    for i, j in graph.edges():
        edges += [(i, j), (n + i, n + j), (i, n + j), (j, n + i)]
    labels = [f"x{i}" for i in range(n)] + [f"y{i}" for i in range(n)]
    gadget = build_graph(2 * n, edges, labels)
    correspondence = {f"v{i}": (i, n + i) for i in range(n)}
    return GadgetInstance("dominator", gadget, correspondence)


def universal_vertex_gadget(graph: Graph) -> GadgetInstance:
    """``graph`` plus a vertex adjacent to everything, at index n."""
    if graph.n == 0:
        raise InputError("the universal-vertex gadget needs a non-empty graph")
    gadget = add_universal_vertex(graph)
    correspondence = {f"v{i}": (i,) for i in range(graph.n)}
    correspondence["universal"] = (graph.n,)
    return GadgetInstance("universal", gadget, correspondence)


GADGETS = {
    "staller": staller_hardness_gadget,
    "dominator": dominator_hardness_gadget,
    "universal": universal_vertex_gadget,
}
