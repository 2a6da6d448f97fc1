"""Hypergraphs for Maker-Breaker positional games.

The domination game on a graph G is the positional game on the hypergraph of
closed neighborhoods, with Staller as Maker and Dominator as Breaker.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, Tuple

from mbdom_game.errors import InconsistencyError, InputError
from mbdom_game.graphcore import Graph, closed_neighborhood, figure_catalogue


class WinStatus(str, Enum):
    MAKER_WON = "maker_won"
    BREAKER_WON = "breaker_won"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Hypergraph:
    n: int
    edges: Tuple[Tuple[int, ...], ...]

    @property
    def edge_masks(self) -> Tuple[int, ...]:
        return tuple(sum(1 << v for v in edge) for edge in self.edges)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}


def build_hypergraph(n: int, edges: Iterable[Iterable[int]]) -> Hypergraph:
    if n < 0:
        raise InputError(f"vertex count must be non-negative, got {n}")
    unique = set()
    for edge in edges:
        members = tuple(sorted({int(v) for v in edge}))
        if not members:
            raise InputError("empty hyperedges are not allowed")
        for v in members:
            if not 0 <= v < n:
                raise InputError(f"hyperedge member {v} is not in 0..{n - 1}")
        unique.add(members)
    return Hypergraph(n, tuple(sorted(unique)))


def hypergraph_from_dict(data: Dict[str, Any]) -> Hypergraph:
    try:
        return build_hypergraph(int(data["n"]), data["edges"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed hypergraph document: {exc}") from exc


def neighborhood_hypergraph(graph: Graph) -> Hypergraph:
    return build_hypergraph(
        graph.n, (closed_neighborhood(graph, v) for v in range(graph.n))
    )


def win_check(
    hypergraph: Hypergraph, maker_set: Iterable[int], breaker_set: Iterable[int]
) -> WinStatus:
    maker = frozenset(maker_set)
    breaker = frozenset(breaker_set)
    if maker & breaker:
        raise InputError(f"vertices {sorted(maker & breaker)} are claimed by both roles")
    for v in maker | breaker:
        if not 0 <= v < hypergraph.n:
            raise InputError(f"vertex {v} is not in 0..{hypergraph.n - 1}")

    maker_won = any(maker.issuperset(edge) for edge in hypergraph.edges)
    breaker_won = all(breaker.intersection(edge) for edge in hypergraph.edges)
    if maker_won and breaker_won:
        # a filled hyperedge cannot also contain a Breaker vertex
        raise InconsistencyError("both roles satisfy their win condition")
    if maker_won:
        return WinStatus.MAKER_WON
    if breaker_won:
        return WinStatus.BREAKER_WON
    return WinStatus.UNDECIDED


def figure_hypergraph(name: str = "fig1a") -> Hypergraph:
    """``fig1a``: four vertices u1..u4 as 0..3 with e = {u3, u4} and f = {u1, u2, u3}."""
    entry = figure_catalogue().get(name)
    if entry is None or "dominator" in entry:
        raise InputError(f"unknown hypergraph figure {name!r}")
    return build_hypergraph(entry["n"], entry["edges"])
