"""CLI entry point for mbdom-game."""

import functools
import json
import sys
import webbrowser
from pathlib import Path
from typing import Any, List, Optional, Tuple

import click

from helper_functions.file_reader import (
    read_arena,
    read_graph,
    read_position,
    read_tree,
    write_graph,
    write_json_atomic,
    write_text_atomic,
)
from helper_functions.log_utils import set_level
from helper_functions.report_html import generate_html_report
from helper_functions.settings import ENV_TEMPLATE, load_settings
from mbdom_game import api
from mbdom_game.errors import InconsistencyError, InputError, ResourceLimitError, StateError
from mbdom_game.gadgets import GADGETS
from mbdom_game.graphcore import Graph, Position, figure_graph, figure_position
from mbdom_game.harness import SUITES
from mbdom_game.hypergame import figure_hypergraph
from mbdom_game.solver import GameSolver, Role

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_INCONSISTENT = 4

FILE_SUFFIXES = (".json", ".txt", ".edges", ".el")
PROJECT_MARKERS = ("pytest.ini", "pyproject.toml", ".env")


def _find_project_root() -> Path:
    """Nearest directory, from the working directory upwards, holding pytest.ini,
    pyproject.toml or .env; the working directory itself when none does."""
    cwd = Path.cwd()
    for directory in (cwd, *cwd.parents):
        if any((directory / marker).exists() for marker in PROJECT_MARKERS):
            return directory
    return cwd


def _fail(message: str, code: int) -> None:
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


def exit_codes(command):
    """Map toolkit errors to the documented exit statuses."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ResourceLimitError as exc:
            _fail(str(exc), EXIT_RESOURCE)
        except InconsistencyError as exc:
            _fail(str(exc), EXIT_INCONSISTENT)
        except (InputError, StateError, FileNotFoundError, ValueError) as exc:
            _fail(str(exc), EXIT_INPUT)

    return wrapper


def _emit(data: Any, as_json: bool, text: str) -> None:
    click.echo(json.dumps(data, indent=2, sort_keys=True) if as_json else text)


def _vertex_list(raw: Optional[str]) -> List[int]:
    if not raw:
        return []
    try:
        return [int(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"vertex list must be comma-separated integers, got {raw!r}") from None


def _is_file_argument(text: str) -> bool:
    return Path(text).suffix.lower() in FILE_SUFFIXES or Path(text).exists()


def _load_position(text: str, first: Optional[str] = None) -> Position:
    """A graph file, ``figure:<name>`` or a family spec such as ``cycle:4``."""
    if _is_file_argument(text):
        return read_position(text, first)
    if text.startswith("figure:"):
        position = figure_position(text.partition(":")[2])
    else:
        position = Position.start(api.generate(text))
    return position.with_mover(first) if first else position


def _load_graph(text: str) -> Graph:
    if _is_file_argument(text):
        return read_graph(text)
    if text.startswith("figure:"):
        return figure_graph(text.partition(":")[2])
    return api.generate(text)


def _load_arena(text: str):
    if text == "figure:fig1a":
        return figure_hypergraph()
    if _is_file_argument(text):
        return read_arena(text)[1]
    return _load_graph(text)


@click.group()
@click.version_option(package_name="mbdom-game")
@click.option("--verbose", "-v", is_flag=True, help="Log progress at INFO level.")
def cli(verbose):
    """mbdom-game: Maker-Breaker domination game solver and kernelization toolkit."""
    try:
        settings = load_settings()
    except ValueError as exc:
        _fail(str(exc), EXIT_INPUT)
    set_level("INFO" if verbose else settings.log_level)


@cli.command()
def init():
    """Scaffold a .env file with the toolkit settings."""
    root = _find_project_root()
    env_file = root / ".env"
    env_example = root / ".env.example"

    if not env_file.exists():
        if env_example.exists():
            env_file.write_text(
                env_example.read_text(encoding="utf-8"), encoding="utf-8"
            )
            click.echo(f"Created {env_file} from .env.example")
        else:
            env_file.write_text(ENV_TEMPLATE, encoding="utf-8")
            click.echo(f"Created {env_file} with default template")
    else:
        click.echo(f"{env_file} already exists, skipping.")

    click.echo("Edit .env to change worker count, solver limits and log level.")


@cli.command()
@click.argument("graph")
@click.option("--dominator", "-d", default=None, help="Comma-separated Dominator claims.")
@click.option("--staller", "-s", default=None, help="Comma-separated Staller claims.")
@click.option("--first", type=click.Choice(["dominator", "staller"]), default=None,
              help="Player to move; prints the winner instead of the outcome.")
@click.option("--json", "as_json", is_flag=True, help="Print JSON.")
@exit_codes
def solve(graph, dominator, staller, first, as_json):
    """Solve a position given as a file, figure:<name> or a family spec."""
    position = _load_position(graph, first)
    claims_d = set(position.dominator) | set(_vertex_list(dominator))
    claims_s = set(position.staller) | set(_vertex_list(staller))
    position = Position(position.graph, frozenset(claims_d), frozenset(claims_s), position.to_move)

    if first is None:
        result = api.solve(position)
        _emit({"outcome": result.value}, as_json, f"outcome: {result}")
        return

    solver = GameSolver(position.graph)
    winner = solver.winner(position)
    data = {"winner": winner.value, "to_move": position.to_move.value}
    text = f"winner: {winner}"
    if not solver.is_terminal(position):
        move = solver.best_move(position)
        data["best_move"] = move
        text += f"\nbest move: {move}"
    _emit(data, as_json, text)


@cli.command()
@click.argument("arena")
@click.option("--role", required=True, type=click.Choice([r.value for r in Role]))
@click.option("--k", "k", required=True, type=int, help="Move budget of the role.")
@click.option("--first", required=True, type=click.Choice([r.value for r in Role]))
@click.option("--json", "as_json", is_flag=True, help="Print JSON.")
@exit_codes
def short(arena, role, k, first, as_json):
    """Can ROLE win within K of its own moves?"""
    wins = api.short(_load_arena(arena), role, k, first)
    _emit({"role": role, "k": k, "first": first, "wins": wins}, as_json, str(wins).lower())


@cli.command()
@click.argument("graph")
@click.option("--param", required=True, type=click.Choice(list(api.KERNEL_PARAMETERS)))
@click.option("--k", "k", type=int, default=None, help="Distance-to-cluster budget (dtc) or q (p4).")
@click.option("--tree", "tree_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Decomposition tree JSON (p4).")
@click.option("--workers", "-n", type=int, default=None, help="Worker processes (fen).")
@click.option("--json", "as_json", is_flag=True, help="Print JSON.")
@exit_codes
def kernelize(graph, param, k, tree_path, workers, as_json):
    """Reduce GRAPH with the kernel for PARAM and print the result and its trace."""
    tree = read_tree(tree_path) if tree_path else None
    result = api.kernelize(_load_graph(graph), param, k, workers, tree=tree)
    lines = []
    if result.graph is not None:
        lines.append(f"reduced graph: {json.dumps(result.graph.to_dict())}")
    if result.outcome is not None:
        lines.append(f"outcome: {result.outcome}")
    lines += [f"{key}: {value}" for key, value in result.details.items() if not isinstance(value, (dict, list))]
    lines += [json.dumps(step.to_dict(), sort_keys=True) for step in result.trace.steps]
    _emit(result.to_dict(), as_json, "\n".join(lines))


@cli.command()
@click.argument("kind", type=click.Choice(list(GADGETS)))
@click.argument("source")
@click.option("--k", "k", type=int, default=None, help="Move budget (staller gadget).")
@exit_codes
def gadget(kind, source, k):
    """Build a hardness gadget from a graph or hypergraph file."""
    arena = _load_arena(source)
    click.echo(json.dumps(api.gadget(kind, arena, k).to_dict(), indent=2))


@cli.command()
@click.argument("family_spec")
@click.option("--out", "out", type=click.Path(dir_okay=False), default=None,
              help="Write the graph to a .json or edge-list file instead of stdout.")
@exit_codes
def gen(family_spec, out):
    """Generate a graph, e.g. path:5, cycle:6, random:10,0.3,7.

    Families built on a base graph take it after @, e.g.
    attach_path:0,1,7@clique:2 or add_universal_vertex@empty:2.
    """
    graph = api.generate(family_spec)
    if out:
        click.echo(f"Wrote {write_graph(graph, out)}")
    else:
        click.echo(json.dumps(graph.to_dict()))


@cli.command()
@click.option("--suite", required=True, type=click.Choice(list(SUITES)))
@click.option("--seed", required=True, type=int)
@click.option("--count", default=50, show_default=True, type=int, help="Seeded instances.")
@click.option("--workers", "-n", type=int, default=None, help="Worker processes.")
@click.option("--json", "as_json", is_flag=True, help="Print the full report as JSON.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Also write the JSON report here.")
@click.option("--html", "html_path", type=click.Path(dir_okay=False), default=None,
              help="Also write a standalone HTML report here.")
@exit_codes
def verify(suite, seed, count, workers, as_json, out, html_path):
    """Run a seeded verification suite against the exact solver."""
    report = api.verify(suite, seed, count, workers)
    if out:
        write_json_atomic(out, report.to_dict())
    if html_path:
        write_text_atomic(html_path, generate_html_report({**report.to_dict(), "title": f"mbdom-game verify: {suite}"}))

    if as_json:
        click.echo(report.to_json(), nl=False)
    else:
        summary = report.summary()
        click.echo(f"{suite} (seed {seed}): {summary['passed']}/{summary['total']} checks passed")
        for record in report.failures:
            click.echo(
                f"FAIL #{record.instance} {record.check}: expected {record.expected}, "
                f"got {record.actual} [{record.description}]"
            )
    sys.exit(EXIT_OK if report.ok else EXIT_FAILURES)


def _latest(paths: List[Path]) -> Optional[Path]:
    existing: List[Tuple[float, Path]] = [(p.stat().st_mtime, p) for p in paths if p.exists()]
    return max(existing)[1] if existing else None


@cli.command()
@click.argument("path", required=False, type=click.Path(dir_okay=False))
@click.option("--json", "show_json", is_flag=True, help="Open JSON results instead.")
def report(path, show_json):
    """Open a report in the browser (default: the newest under tests/test-results)."""
    root = _find_project_root()
    results_dir = root / "tests" / "test-results"

    if path:
        target = Path(path)
    else:
        pattern = "*.json" if show_json else "*.html"
        target = _latest(list(results_dir.glob(pattern))) or results_dir / (
            "all_checks_results.json" if show_json else "report.html"
        )

    if not target.exists():
        click.echo(f"Report not found: {target}", err=True)
        click.echo("Run 'mbdom-game verify --html ...' or pytest first to generate a report.")
        sys.exit(EXIT_FAILURES)

    click.echo(f"Opening {target.name}...")
    webbrowser.open(target.resolve().as_uri())


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
