"""Programmatic entry points; each returns what the matching CLI command prints."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Optional, Union

from mbdom_game.decomposition import DecompTree, modular_decomposition, width
from mbdom_game.errors import InputError
from mbdom_game.fpt import (
    cluster_deletion_set,
    dtc_kernel,
    fen_kernel,
    fen_report,
    nd_kernel,
    solve_via_modular_width,
    solve_via_p4_decomposition,
)
from mbdom_game.gadgets import GADGETS, GadgetInstance
from mbdom_game.graphcore import (
    Graph,
    Outcome,
    Player,
    GRAPH_FAMILIES,
    Position,
    generate as build_family,
    parse_family_spec,
    twin_partition,
)
from mbdom_game.harness import HarnessReport, run_verification_harness
from mbdom_game.hypergame import Hypergraph
from mbdom_game.rewrite import ReductionTrace
from mbdom_game.solver import GameSolver, Role, SearchConfig, ShortQuery, short_game_win

KERNEL_PARAMETERS = ("nd", "mw", "dtc", "fen", "p4")


@dataclass(frozen=True)
class KernelResult:
    param: str
    graph: Optional[Graph]
    trace: ReductionTrace
    outcome: Optional[Outcome] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "param": self.param,
            "graph": self.graph.to_dict() if self.graph is not None else None,
            "outcome": self.outcome.value if self.outcome is not None else None,
            "trace": [step.to_dict() for step in self.trace.steps],
            "details": self.details,
        }


def solve(
    target: Union[Graph, Position],
    first: Optional[Union[Player, str]] = None,
    dominator: Iterable[int] = (),
    staller: Iterable[int] = (),
    config: Optional[SearchConfig] = None,
) -> Union[Outcome, Player]:
    """Outcome of the position, or its winner when ``first`` names the player to move."""
    if isinstance(target, Position):
        graph, dominator, staller = target.graph, target.dominator, target.staller
    else:
        graph = target
    solver = GameSolver(graph, config)
    if first is None:
        return solver.outcome(dominator, staller)
    return solver.winner(Position(graph, frozenset(dominator), frozenset(staller), Player(first)))


def short(
    arena: Union[Graph, Hypergraph],
    role: Union[Role, str],
    k: int,
    first: Union[Role, str],
    config: Optional[SearchConfig] = None,
) -> bool:
    return short_game_win(arena, ShortQuery(Role(role), k, Role(first)), config)


def kernelize(
    graph: Graph,
    param: str,
    k: Optional[int] = None,
    workers: Optional[int] = None,
    config: Optional[SearchConfig] = None,
    tree: Optional[DecompTree] = None,
) -> KernelResult:
    """Kernel (nd, dtc, fen) or decomposition-driven outcome (mw, p4) of ``graph``.

    ``k`` is the distance-to-cluster budget for dtc and the P4-fewness q for p4.
    """
    if param == "nd":
        kernel, trace = nd_kernel(graph)
        return KernelResult(param, kernel, trace, details={"twin_classes": len(twin_partition(graph))})
    if param == "mw":
        details = {"modular_width": width(modular_decomposition(graph)) if graph.n else 0}
        return KernelResult(
            param, None, ReductionTrace(), solve_via_modular_width(graph, config), details
        )
    if param == "dtc":
        if k is None:
            raise InputError("the dtc kernel needs --k")
        reduced = dtc_kernel(graph, k)
        if reduced is None:
            raise InputError(f"distance to cluster exceeds {k}")
        kernel, trace = reduced
        return KernelResult(
            param, kernel, trace, details={"deletion_set": list(cluster_deletion_set(graph, k) or ())}
        )
    if param == "fen":
        report = fen_report(graph, workers, config)
        residual, trace = fen_kernel(graph)
        details = report.to_dict()
        details["residual_dominator"] = sorted(residual.dominator)
        return KernelResult(param, residual.graph, trace, report.outcome, details)
    if param == "p4":
        if tree is None or k is None:
            raise InputError("the p4 solver needs a decomposition tree and q")
        result = solve_via_p4_decomposition(graph, tree, k, config)
        return KernelResult(param, None, ReductionTrace(), result, {"q": k})
    raise InputError(f"unknown parameter {param!r}; expected one of {', '.join(KERNEL_PARAMETERS)}")


def gadget(kind: str, source: Union[Graph, Hypergraph], k: Optional[int] = None) -> GadgetInstance:
    if kind not in GADGETS:
        raise InputError(f"unknown gadget {kind!r}; expected one of {', '.join(GADGETS)}")
    if kind == "staller":
        if not isinstance(source, Hypergraph):
            raise InputError("the staller gadget is built from a hypergraph")
        if k is None:
            raise InputError("the staller gadget needs k")
        return GADGETS[kind](source, k)
    if not isinstance(source, Graph):
        raise InputError(f"the {kind} gadget is built from a graph")
    return GADGETS[kind](source)


def _coerce(raw: str) -> Any:
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    return raw


def generate(spec: str) -> Graph:
    """Graph from a family spec such as ``cycle:6`` or ``random:10,0.3,7``.

    Families built on another graph name it after ``@``, e.g.
    ``attach_path:0,1,7@clique:2`` or ``add_universal_vertex@empty:2``.
    """
    head, _, base_spec = spec.partition("@")
    family, args = parse_family_spec(head)
    values = [_coerce(a) for a in args]
    if (family in GRAPH_FAMILIES) != bool(base_spec):
        if base_spec:
            raise InputError(f"family {family!r} does not take a base graph")
        raise InputError(f"family {family!r} needs a base graph: {family}:<args>@<family spec>")
    if base_spec:
        values.insert(0, generate(base_spec))
    try:
        return build_family(family, *values)
    except TypeError as exc:
        raise InputError(f"bad arguments for family {family!r}: {exc}") from exc


def verify(suite: str, seed: int, count: int, workers: Optional[int] = None) -> HarnessReport:
    return run_verification_harness(suite, seed, count, workers)
