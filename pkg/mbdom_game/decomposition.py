"""Decomposition trees: modular decomposition plus the spider/separable kinds
used by the P4-fewness solver.

Every node knows the set of original graph vertices below it. ``reconstruct``
rebuilds the graph a tree describes; for a valid tree this is the input graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union

from mbdom_game.errors import InputError
from mbdom_game.graphcore import Edge, Graph, build_graph, connected_components, graph_from_dict


# -----------------------------
# Node kinds


@dataclass(frozen=True)
class Leaf:
    vertex: int
    kind = "leaf"

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset((self.vertex,))


@dataclass(frozen=True)
class UnionNode:
    children: Tuple["DecompTree", ...]
    kind = "union"

    @property
    def vertices(self) -> FrozenSet[int]:
        return _disjoint_vertices(self.children)


@dataclass(frozen=True)
class JoinNode:
    children: Tuple["DecompTree", ...]
    kind = "join"

    @property
    def vertices(self) -> FrozenSet[int]:
        return _disjoint_vertices(self.children)


@dataclass(frozen=True)
class SubstitutionNode:
    """Quotient vertex i stands for ``children[i]``."""

    quotient: Graph
    children: Tuple["DecompTree", ...]
    kind = "substitution"

    @property
    def vertices(self) -> FrozenSet[int]:
        return _disjoint_vertices(self.children)


@dataclass(frozen=True)
class SpiderNode:
    """Spider (R, C, S): ``s[i]`` is matched with ``c[i]``.

    Thin: s[i] ~ c[j] iff i == j. Thick: s[i] ~ c[j] iff i != j.
    """

    r: Optional["DecompTree"]
    c: Tuple[int, ...]
    s: Tuple[int, ...]
    thick: bool
    kind = "spider"

    @property
    def vertices(self) -> FrozenSet[int]:
        parts: List[FrozenSet[int]] = [frozenset(self.c), frozenset(self.s)]
        if self.r is not None:
            parts.append(self.r.vertices)
        return _disjoint_sets(parts)


@dataclass(frozen=True)
class SeparableNode:
    """``child`` spans G'; H1 is complete to G', H2 anticomplete to it."""

    child: "DecompTree"
    h1: Tuple[int, ...]
    h2: Tuple[int, ...]
    h_edges: Tuple[Edge, ...]
    kind = "separable"

    @property
    def vertices(self) -> FrozenSet[int]:
        return _disjoint_sets([self.child.vertices, frozenset(self.h1), frozenset(self.h2)])


@dataclass(frozen=True)
class SmallNode:
    members: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    kind = "small"

    @property
    def vertices(self) -> FrozenSet[int]:
        return frozenset(self.members)


DecompTree = Union[Leaf, UnionNode, JoinNode, SubstitutionNode, SpiderNode, SeparableNode, SmallNode]


def _disjoint_sets(parts: Sequence[FrozenSet[int]]) -> FrozenSet[int]:
    result: FrozenSet[int] = frozenset()
    for part in parts:
        if result & part:
            raise InputError(f"decomposition reuses vertices {sorted(result & part)}")
        result |= part
    return result


def _disjoint_vertices(children: Sequence["DecompTree"]) -> FrozenSet[int]:
    return _disjoint_sets([child.vertices for child in children])


def children_of(node: DecompTree) -> Tuple[DecompTree, ...]:
    if isinstance(node, (UnionNode, JoinNode, SubstitutionNode)):
        return node.children
    if isinstance(node, SpiderNode):
        return (node.r,) if node.r is not None else ()
    if isinstance(node, SeparableNode):
        return (node.child,)
    return ()


def walk(node: DecompTree) -> Iterator[DecompTree]:
    """Pre-order traversal."""
    yield node
    for child in children_of(node):
        yield from walk(child)


# -----------------------------
# Reconstruction


def tree_edges(node: DecompTree) -> List[Edge]:
    if isinstance(node, Leaf):
        return []
    if isinstance(node, SmallNode):
        members = node.vertices
        for u, v in node.edges:
            if u not in members or v not in members or u == v:
                raise InputError(f"small node edge {(u, v)} leaves its vertex set")
        return [tuple(sorted(e)) for e in node.edges]

    edges: List[Edge] = []
    for child in children_of(node):
        edges.extend(tree_edges(child))

    if isinstance(node, UnionNode):
        _check_arity(node, 2)
    elif isinstance(node, JoinNode):
        _check_arity(node, 2)
        for a, b in combinations(node.children, 2):
            edges.extend((u, v) for u in a.vertices for v in b.vertices)
    elif isinstance(node, SubstitutionNode):
        if node.quotient.n != len(node.children):
            raise InputError(
                f"quotient has {node.quotient.n} vertices for {len(node.children)} children"
            )
        for i, j in node.quotient.edges():
            edges.extend(
                (u, v) for u in node.children[i].vertices for v in node.children[j].vertices
            )
    elif isinstance(node, SpiderNode):
        if len(node.c) != len(node.s) or len(node.c) < 2:
            raise InputError("a spider needs |C| = |S| >= 2")
        edges.extend(combinations(node.c, 2))
        for i, s in enumerate(node.s):
            for j, c in enumerate(node.c):
                if (i == j) != node.thick:
                    edges.append((s, c))
        if node.r is not None:
            edges.extend((r, c) for r in node.r.vertices for c in node.c)
    elif isinstance(node, SeparableNode):
        h = frozenset(node.h1) | frozenset(node.h2)
        for u, v in node.h_edges:
            if u not in h or v not in h or u == v:
                raise InputError(f"separable edge {(u, v)} leaves H1 and H2")
        edges.extend(node.h_edges)
        edges.extend((h1, g) for h1 in node.h1 for g in node.child.vertices)
    return [(min(u, v), max(u, v)) for u, v in edges]


def _check_arity(node: DecompTree, minimum: int) -> None:
    if len(children_of(node)) < minimum:
        raise InputError(f"{node.kind} node needs at least {minimum} children")


def reconstruct(tree: DecompTree) -> Graph:
    vertices = tree.vertices
    n = len(vertices)
    if vertices != frozenset(range(n)):
        raise InputError("tree leaves must be exactly the vertices 0..n-1")
    return build_graph(n, tree_edges(tree))


def validate_tree(tree: DecompTree, graph: Graph) -> None:
    if reconstruct(tree) != Graph(graph.n, graph.adjacency):
        raise InputError("decomposition does not reconstruct the graph")


# -----------------------------
# Modular decomposition


def _open_masks(graph: Graph) -> List[int]:
    return [mask & ~(1 << v) for v, mask in enumerate(graph.closed_masks)]


def _module_closure(adjacency: List[int], seed: int, everything: int) -> int:
    """Smallest module containing the vertex mask ``seed``."""
    module = seed
    changed = True
    while changed:
        changed = False
        outside = everything & ~module
        while outside:
            low = outside & -outside
            x = low.bit_length() - 1
            outside ^= low
            hits = adjacency[x] & module
            if hits and hits != module:
                module |= low
                changed = True
    return module


def _maximal_modules(graph: Graph) -> List[List[int]]:
    """Maximal proper strong modules of a connected, co-connected graph."""
    adjacency = _open_masks(graph)
    everything = graph.full_mask
    assigned = 0
    parts: List[List[int]] = []
    for v in range(graph.n):
        if assigned >> v & 1:
            continue
        part = 1 << v
        for w in range(graph.n):
            if w == v:
                continue
            closure = _module_closure(adjacency, (1 << v) | (1 << w), everything)
            if closure != everything:
                part |= closure
        assigned |= part
        parts.append([u for u in range(graph.n) if part >> u & 1])
    return parts


def modular_decomposition(graph: Graph) -> DecompTree:
    if graph.n == 0:
        raise InputError("the empty graph has no modular decomposition")
    return _decompose(graph, list(range(graph.n)))


def _decompose(graph: Graph, vertices: List[int]) -> DecompTree:
    if len(vertices) == 1:
        return Leaf(vertices[0])
    sub, index_map = graph.induced_subgraph(vertices)
    back = {new: old for old, new in index_map.items()}

    def lift(group: Sequence[int]) -> List[int]:
        return sorted(back[v] for v in group)

    components = connected_components(sub)
    if len(components) > 1:
        return UnionNode(tuple(_decompose(graph, lift(c)) for c in components))
    co_components = connected_components(sub.complement())
    if len(co_components) > 1:
        return JoinNode(tuple(_decompose(graph, lift(c)) for c in co_components))

    parts = _maximal_modules(sub)
    representatives = [part[0] for part in parts]
    quotient_edges = [
        (i, j)
        for i, j in combinations(range(len(parts)), 2)
        if representatives[j] in sub.adjacency[representatives[i]]
    ]
    quotient = build_graph(len(parts), quotient_edges)
    return SubstitutionNode(quotient, tuple(_decompose(graph, lift(p)) for p in parts))


def strong_modules(tree: DecompTree) -> List[FrozenSet[int]]:
    """Vertex sets of non-root nodes, plus the leaf children of union/join
    nodes grouped together; every set returned is a module."""
    found: List[FrozenSet[int]] = []
    everything = tree.vertices
    for node in walk(tree):
        if node is not tree:
            found.append(node.vertices)
        if isinstance(node, (UnionNode, JoinNode)):
            singles = frozenset(c.vertex for c in node.children if isinstance(c, Leaf))
            if len(singles) >= 2 and singles != everything:
                found.append(singles)
    return found


def width(tree: DecompTree) -> int:
    """Largest quotient order; union and join nodes count as two."""
    best = 0
    for node in walk(tree):
        if isinstance(node, SubstitutionNode):
            best = max(best, node.quotient.n)
        elif isinstance(node, (UnionNode, JoinNode)):
            best = max(best, 2)
    return best


# -----------------------------
# JSON


def dump_tree(node: DecompTree) -> Dict[str, Any]:
    if isinstance(node, Leaf):
        return {"kind": "leaf", "vertex": node.vertex}
    if isinstance(node, (UnionNode, JoinNode)):
        return {"kind": node.kind, "children": [dump_tree(c) for c in node.children]}
    if isinstance(node, SubstitutionNode):
        return {
            "kind": "substitution",
            "quotient": node.quotient.to_dict(),
            "children": [dump_tree(c) for c in node.children],
        }
    if isinstance(node, SpiderNode):
        return {
            "kind": "spider",
            "r": dump_tree(node.r) if node.r is not None else None,
            "c": list(node.c),
            "s": list(node.s),
            "thick": node.thick,
        }
    if isinstance(node, SeparableNode):
        return {
            "kind": "separable",
            "child": dump_tree(node.child),
            "h1": list(node.h1),
            "h2": list(node.h2),
            "h_edges": [list(e) for e in node.h_edges],
        }
    return {
        "kind": "small",
        "vertices": list(node.members),
        "edges": [list(e) for e in node.edges],
    }


def _edge_list(raw: Any) -> Tuple[Edge, ...]:
    edges = []
    for edge in raw:
        if len(edge) != 2:
            raise InputError(f"edge {edge!r} does not have two endpoints")
        edges.append((int(edge[0]), int(edge[1])))
    return tuple(edges)


def load_tree(data: Dict[str, Any]) -> DecompTree:
    try:
        kind = data["kind"]
        if kind == "leaf":
            return Leaf(int(data["vertex"]))
        if kind in ("union", "join"):
            children = tuple(load_tree(c) for c in data["children"])
            return UnionNode(children) if kind == "union" else JoinNode(children)
        if kind == "substitution":
            return SubstitutionNode(
                graph_from_dict(data["quotient"]),
                tuple(load_tree(c) for c in data["children"]),
            )
        if kind == "spider":
            r = data.get("r")
            return SpiderNode(
                load_tree(r) if r is not None else None,
                tuple(int(v) for v in data["c"]),
                tuple(int(v) for v in data["s"]),
                bool(data["thick"]),
            )
        if kind == "separable":
            return SeparableNode(
                load_tree(data["child"]),
                tuple(int(v) for v in data["h1"]),
                tuple(int(v) for v in data.get("h2", [])),
                _edge_list(data.get("h_edges", [])),
            )
        if kind == "small":
            return SmallNode(
                tuple(int(v) for v in data["vertices"]), _edge_list(data.get("edges", []))
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed decomposition node: {exc}") from exc
    raise InputError(f"unknown decomposition node kind {kind!r}")
