"""Exact game-tree search for Maker-Breaker games and the domination game.

Every game is searched as a positional game over hyperedge bitmasks. The
domination game on G uses the closed neighborhoods of G as hyperedges, with
Staller as Maker and Dominator as Breaker. A Dominator claim set is a
transversal exactly when it dominates G.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from operator import and_
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from helper_functions.log_utils import get_logger
from helper_functions.settings import load_settings
from mbdom_game.errors import InputError, ResourceLimitError, StateError
from mbdom_game.graphcore import Graph, Outcome, Player, Position, twin_partition
from mbdom_game.hypergame import Hypergraph

logger = get_logger(__name__)


# -----------------------------
# Types


class Role(str, Enum):
    MAKER = "maker"
    BREAKER = "breaker"
    DOMINATOR = "dominator"
    STALLER = "staller"

    @property
    def is_graph_role(self) -> bool:
        return self in (Role.DOMINATOR, Role.STALLER)

    @property
    def opponent(self) -> "Role":
        return {
            Role.MAKER: Role.BREAKER,
            Role.BREAKER: Role.MAKER,
            Role.DOMINATOR: Role.STALLER,
            Role.STALLER: Role.DOMINATOR,
        }[self]


@dataclass(frozen=True)
class ShortQuery:
    role: Role
    k: int
    first_player: Role

    def __post_init__(self) -> None:
        object.__setattr__(self, "role", Role(self.role))
        object.__setattr__(self, "first_player", Role(self.first_player))
        if self.k < 0:
            raise InputError(f"move budget must be non-negative, got {self.k}")
        if self.first_player not in (self.role, self.role.opponent):
            raise InputError(
                f"first player {self.first_player.value} does not play the "
                f"{self.role.value} game"
            )


@dataclass(frozen=True)
class SearchConfig:
    prune_dominated_moves: bool = True
    prune_twins: bool = True
    memo_capacity: int = 2_000_000
    node_limit: int = 50_000_000

    @classmethod
    def reference(cls, **overrides) -> "SearchConfig":
        """Configuration with every pruning disabled: the oracle."""
        return cls(prune_dominated_moves=False, prune_twins=False, **overrides)

    @classmethod
    def from_settings(cls) -> "SearchConfig":
        settings = load_settings()
        return cls(memo_capacity=settings.memo_capacity, node_limit=settings.node_limit)


@dataclass
class SearchStats:
    nodes: int = 0
    memo_hits: int = 0
    memo_resets: int = 0


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _is_single(mask: int) -> bool:
    return mask & (mask - 1) == 0


# -----------------------------
# Search engine


@dataclass
class PositionalGame:
    """Maker-Breaker search on ``n`` vertices and hyperedge bitmasks."""

    n: int
    edges: Sequence[int]
    config: SearchConfig = field(default_factory=SearchConfig)
    twin_classes: Sequence[Tuple[int, ...]] = ()
    stats: SearchStats = field(default_factory=SearchStats)

    def __post_init__(self) -> None:
        self.edges = tuple(sorted(set(self.edges)))
        self.full = (1 << self.n) - 1
        self._memo: Dict[Tuple[int, int, bool], bool] = {}
        if not self.config.prune_twins:
            self.twin_classes = ()
        self.twin_classes = tuple(c for c in self.twin_classes if len(c) >= 2)

    # ----- bookkeeping

    def _tick(self) -> None:
        self.stats.nodes += 1
        if self.stats.nodes > self.config.node_limit:
            raise ResourceLimitError(
                f"search expanded more than {self.config.node_limit} nodes"
            )

    def _remember(self, key: Tuple[int, int, bool], value: bool) -> bool:
        if len(self._memo) >= self.config.memo_capacity:
            self._memo.clear()
            self.stats.memo_resets += 1
        self._memo[key] = value
        return value

    def _candidates(self, live: List[int]) -> List[int]:
        """Vertices worth claiming: members of live edges, minus dominated ones.

        A vertex whose live-edge incidence is contained in another vertex's is
        never a better move for either side.
        """
        incidence: Dict[int, int] = {}
        for index, missing in enumerate(live):
            bit = 1 << index
            for v in _bits(missing):
                incidence[v] = incidence.get(v, 0) | bit
        vertices = sorted(incidence)
        if not self.config.prune_dominated_moves:
            return vertices
        kept = []
        for v in vertices:
            mine = incidence[v]
            dominated = False
            for w in vertices:
                if w == v:
                    continue
                theirs = incidence[w]
                if mine & theirs == mine and (mine != theirs or w < v):
                    dominated = True
                    break
            if not dominated:
                kept.append(v)
        return kept

    def _assign_twins(self, maker: int, breaker: int) -> Tuple[int, int]:
        claimed = maker | breaker
        for members in self.twin_classes:
            free = [v for v in members if not claimed >> v & 1]
            while len(free) >= 2:
                u, v = free.pop(0), free.pop(0)
                breaker |= 1 << u
                maker |= 1 << v
        return maker, breaker

    # ----- full game

    def breaker_wins(self, maker: int, breaker: int, breaker_to_move: bool) -> bool:
        if maker & breaker:
            raise InputError("claim sets overlap")
        result = self._search(maker, breaker, breaker_to_move, self._live(maker, breaker))
        logger.debug(
            "search finished: nodes=%d memo=%d hits=%d",
            self.stats.nodes,
            len(self._memo),
            self.stats.memo_hits,
        )
        return result

    def _live(self, maker: int, breaker: int) -> Tuple[int, ...]:
        """Unclaimed part of every hyperedge Breaker has not hit yet."""
        return tuple(edge & ~maker for edge in self.edges if not edge & breaker)

    @staticmethod
    def _restrict(live: Tuple[int, ...], maker_new: int, breaker_new: int) -> Tuple[int, ...]:
        return tuple(m & ~maker_new for m in live if not m & breaker_new)

    def _search(
        self, maker: int, breaker: int, breaker_to_move: bool, live: Tuple[int, ...]
    ) -> bool:
        """``live`` is updated per move instead of rescanning every hyperedge."""
        if self.twin_classes:
            assigned_maker, assigned_breaker = self._assign_twins(maker, breaker)
            if assigned_maker != maker or assigned_breaker != breaker:
                live = self._restrict(live, assigned_maker & ~maker, assigned_breaker & ~breaker)
                maker, breaker = assigned_maker, assigned_breaker
        key = (maker, breaker, breaker_to_move)
        cached = self._memo.get(key)
        if cached is not None:
            self.stats.memo_hits += 1
            return cached
        self._tick()

        if not all(live):
            return self._remember(key, False)
        if not live:
            return self._remember(key, True)

        if breaker_to_move:
            if reduce(and_, live):
                return self._remember(key, True)
            threats = {m for m in live if _is_single(m)}
            if len(threats) >= 2:
                return self._remember(key, False)
            if threats:
                moves = [next(iter(threats)).bit_length() - 1]
            else:
                moves = self._candidates(list(live))
            won = any(
                self._search(maker, breaker | 1 << v, False, self._restrict(live, 0, 1 << v))
                for v in moves
            )
            return self._remember(key, won)

        if any(_is_single(m) for m in live):
            return self._remember(key, False)
        moves = self._candidates(list(live))
        held = all(
            self._search(maker | 1 << v, breaker, True, self._restrict(live, 1 << v, 0))
            for v in moves
        )
        return self._remember(key, held)

    # ----- short games

    def maker_wins_within(self, budget: int, maker_first: bool) -> bool:
        """Can Maker fill a hyperedge using at most ``budget`` own moves?"""
        self._memo.clear()
        return self._maker_within(0, 0, maker_first, min(budget, self.n))

    def _maker_within(self, maker: int, breaker: int, maker_to_move: bool, budget: int) -> bool:
        key = (maker, breaker, maker_to_move)
        cached = self._memo.get(key)
        if cached is not None:
            self.stats.memo_hits += 1
            return cached
        self._tick()

        left = budget - bin(maker).count("1")
        live = []
        for edge in self.edges:
            if edge & breaker:
                continue
            missing = edge & ~maker
            if not missing:
                return self._remember(key, True)
            if bin(missing).count("1") <= left:
                live.append(missing)
        if not live:
            return self._remember(key, False)

        if maker_to_move:
            if any(_is_single(m) for m in live):
                return self._remember(key, True)
            moves = self._candidates(live)
            won = any(self._maker_within(maker | 1 << v, breaker, False, budget) for v in moves)
            return self._remember(key, won)

        threats = {m for m in live if _is_single(m)}
        if len(threats) >= 2:
            return self._remember(key, True)
        moves = [next(iter(threats)).bit_length() - 1] if threats else self._candidates(live)
        held = all(self._maker_within(maker, breaker | 1 << v, True, budget) for v in moves)
        return self._remember(key, held)

    def breaker_wins_within(self, budget: int, breaker_first: bool) -> bool:
        """Can Breaker claim a transversal using at most ``budget`` own moves?"""
        self._memo.clear()
        return self._breaker_within(0, 0, breaker_first, min(budget, self.n))

    def _breaker_within(self, maker: int, breaker: int, breaker_to_move: bool, budget: int) -> bool:
        key = (maker, breaker, breaker_to_move)
        cached = self._memo.get(key)
        if cached is not None:
            self.stats.memo_hits += 1
            return cached
        self._tick()

        unhit = []
        for edge in self.edges:
            if edge & breaker:
                continue
            missing = edge & ~maker
            if not missing:
                return self._remember(key, False)
            unhit.append(missing)
        if not unhit:
            return self._remember(key, True)
        left = budget - bin(breaker).count("1")
        if left <= 0 or _disjoint_lower_bound(unhit) > left:
            return self._remember(key, False)

        if breaker_to_move:
            if reduce(and_, unhit):
                return self._remember(key, True)
            threats = {m for m in unhit if _is_single(m)}
            if len(threats) >= 2 or left == 1:
                return self._remember(key, False)
            moves = [next(iter(threats)).bit_length() - 1] if threats else self._candidates(unhit)
            won = any(self._breaker_within(maker, breaker | 1 << v, False, budget) for v in moves)
            return self._remember(key, won)

        if any(_is_single(m) for m in unhit):
            return self._remember(key, False)
        moves = self._candidates(unhit)
        held = all(self._breaker_within(maker | 1 << v, breaker, True, budget) for v in moves)
        return self._remember(key, held)


def _disjoint_lower_bound(edges: List[int]) -> int:
    """Size of a greedy packing of pairwise disjoint edges."""
    used = 0
    count = 0
    for edge in sorted(edges, key=lambda m: bin(m).count("1")):
        if not edge & used:
            used |= edge
            count += 1
    return count


# -----------------------------
# Domination game


class GameSolver:
    """Domination-game solver bound to one graph; the memo table is reused."""

    def __init__(self, graph: Graph, config: Optional[SearchConfig] = None):
        self.graph = graph
        self.config = config or SearchConfig.from_settings()
        twins: Sequence[Tuple[int, ...]] = ()
        if self.config.prune_twins:
            twins = [members for members, _ in twin_partition(graph) if len(members) >= 2]
        self.engine = PositionalGame(graph.n, graph.closed_masks, self.config, twins)

    @staticmethod
    def _mask(vertices: Iterable[int]) -> int:
        mask = 0
        for v in vertices:
            mask |= 1 << v
        return mask

    def winner(self, position: Position) -> Player:
        if position.graph != self.graph:
            raise InputError("position is played on a different graph")
        dominator_wins = self.engine.breaker_wins(
            self._mask(position.staller),
            self._mask(position.dominator),
            position.to_move is Player.DOMINATOR,
        )
        return Player.DOMINATOR if dominator_wins else Player.STALLER

    def outcome(self, dominator: Iterable[int] = (), staller: Iterable[int] = ()) -> Outcome:
        base = Position(self.graph, frozenset(dominator), frozenset(staller))
        return Outcome.from_winners(
            self.winner(base.with_mover(Player.DOMINATOR)),
            self.winner(base.with_mover(Player.STALLER)),
        )

    def is_terminal(self, position: Position) -> bool:
        if not position.unclaimed:
            return True
        dominated = 0
        for v in position.dominator:
            dominated |= self.graph.closed_masks[v]
        if dominated == self.graph.full_mask:
            return True
        staller = self._mask(position.staller)
        return any(m & ~staller == 0 for m in self.graph.closed_masks)

    def best_move(self, position: Position) -> int:
        """Lowest-index winning move; otherwise the move leaving the opponent
        the fewest winning replies, ties broken by lowest index."""
        if self.is_terminal(position):
            raise StateError("the position is already decided")
        mover = position.to_move
        moves = position.unclaimed
        for v in moves:
            if self.winner(position.claim(v)) is mover:
                return v

        def opponent_options(v: int) -> int:
            child = position.claim(v)
            if self.is_terminal(child):
                return 0
            return sum(
                1 for w in child.unclaimed if self.winner(child.claim(w)) is mover.other
            )

        return min(moves, key=lambda v: (opponent_options(v), v))


def solve_position(position: Position, config: Optional[SearchConfig] = None) -> Player:
    return GameSolver(position.graph, config).winner(position)


def outcome(
    graph: Graph,
    dominator: Iterable[int] = (),
    staller: Iterable[int] = (),
    config: Optional[SearchConfig] = None,
) -> Outcome:
    return GameSolver(graph, config).outcome(dominator, staller)


def best_move(position: Position, config: Optional[SearchConfig] = None) -> int:
    return GameSolver(position.graph, config).best_move(position)


def short_game_win(
    arena: Union[Graph, Hypergraph], query: ShortQuery, config: Optional[SearchConfig] = None
) -> bool:
    config = config or SearchConfig.from_settings()
    # twin assignment is only sound without move budgets
    config = SearchConfig(
        prune_dominated_moves=config.prune_dominated_moves,
        prune_twins=False,
        memo_capacity=config.memo_capacity,
        node_limit=config.node_limit,
    )
    if query.role.is_graph_role:
        if not isinstance(arena, Graph):
            raise InputError(f"the {query.role.value} role is played on a graph")
        edges: Sequence[int] = arena.closed_masks
        maker_role = Role.STALLER
    else:
        if not isinstance(arena, Hypergraph):
            raise InputError(f"the {query.role.value} role is played on a hypergraph")
        edges = arena.edge_masks
        maker_role = Role.MAKER

    engine = PositionalGame(arena.n, edges, config)
    role_first = query.first_player is query.role
    if query.role is maker_role:
        return engine.maker_wins_within(query.k, role_first)
    return engine.breaker_wins_within(query.k, role_first)
