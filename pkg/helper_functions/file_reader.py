import json
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, TypeVar

from helper_functions.log_utils import get_logger
from mbdom_game.decomposition import DecompTree, load_tree
from mbdom_game.errors import InputError
from mbdom_game.graphcore import Graph, Position, build_graph, graph_from_dict
from mbdom_game.hypergame import Hypergraph, hypergraph_from_dict

T = TypeVar("T", bound=Any)

logger = get_logger(__name__)

EDGE_LIST_SUFFIXES = (".txt", ".edges", ".el")


def read_json_files_from_folder(
    folder_path: str | Path, key: str, pattern: str = "*.json"
) -> List[T]:
    """
    Read every JSON file matching ``pattern`` in a folder and return one flat list.
    Each file is expected to hold a top-level ``key`` that is a list.
    """
    folder = Path(folder_path).resolve()

    if not folder.exists():
        raise FileNotFoundError(f"Folder does not exist: {folder}")

    if not folder.is_dir():
        raise NotADirectoryError(f"Path is not a folder: {folder}")

    items: List[T] = []

    for json_file in sorted(folder.glob(pattern)):
        try:
            data = json.loads(json_file.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            logger.warning("Failed to read/parse JSON file %s: %s", json_file, exc)
            continue
        entries = data.get(key, []) if isinstance(data, dict) else None
        if isinstance(entries, list):
            items.extend(entries)
        else:
            logger.warning("'%s' is not a list in file %s", key, json_file)

    return items


def write_text_atomic(path: str | Path, text: str) -> Path:
    """Write through a temporary file in the target folder, then rename over ``path``."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return target


def write_json_atomic(path: str | Path, data: Any) -> Path:
    return write_text_atomic(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def read_json(path: str | Path) -> Dict[str, Any]:
    source = Path(path)
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{source} is not valid JSON: {exc.msg} (line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise InputError(f"{source} must hold a JSON object")
    return data


# -----------------------------
# Edge lists
#
# First non-comment line: "n m" (m may be omitted). Every further line: "u v".


def write_edge_list(graph: Graph, path: str | Path) -> Path:
    lines = [f"{graph.n} {graph.edge_count}"]
    lines += [f"{u} {v}" for u, v in graph.edges()]
    return write_text_atomic(path, "\n".join(lines) + "\n")


def read_edge_list(path: str | Path) -> Graph:
    source = Path(path)
    try:
        raw = source.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror or exc}") from exc
    rows = [line.split("#", 1)[0].split() for line in raw]
    rows = [row for row in rows if row]
    if not rows or len(rows[0]) not in (1, 2):
        raise InputError(f"{source}: first line must be \"n m\" or the vertex count alone")
    try:
        n, *m = (int(x) for x in rows[0])
        edges = [(int(u), int(v)) for u, v in rows[1:]]
    except ValueError as exc:
        raise InputError(f"{source}: malformed edge list ({exc})") from exc
    if m and m[0] != len(edges):
        raise InputError(f"{source}: header announces {m[0]} edges, found {len(edges)}")
    return build_graph(n, edges)


# -----------------------------
# Domain objects


def _is_edge_list(path: Path) -> bool:
    return path.suffix.lower() in EDGE_LIST_SUFFIXES


def read_graph(path: str | Path) -> Graph:
    source = Path(path)
    if _is_edge_list(source):
        return read_edge_list(source)
    data = read_json(source)
    return graph_from_dict(data.get("graph", data))


def write_graph(graph: Graph, path: str | Path) -> Path:
    if _is_edge_list(Path(path)):
        return write_edge_list(graph, path)
    return write_json_atomic(path, graph.to_dict())


def read_position(path: str | Path, first: Optional[str] = None) -> Position:
    """Graph file plus optional "dominator", "staller" and "to_move" keys."""
    source = Path(path)
    if _is_edge_list(source):
        return Position.start(read_edge_list(source), first or "staller")
    data = read_json(source)
    graph = graph_from_dict(data.get("graph", data))
    return Position(
        graph,
        frozenset(data.get("dominator", ())),
        frozenset(data.get("staller", ())),
        first or data.get("to_move", "staller"),
    )


def read_arena(path: str | Path) -> Tuple[str, Graph | Hypergraph]:
    """Graph or hypergraph, told apart by the "kind" key (default: graph)."""
    source = Path(path)
    if _is_edge_list(source):
        return "graph", read_edge_list(source)
    data = read_json(source)
    kind = data.get("kind", "hypergraph" if "hypergraph" in data else "graph")
    if kind == "hypergraph":
        return kind, hypergraph_from_dict(data.get("hypergraph", data))
    if kind == "graph":
        return kind, graph_from_dict(data.get("graph", data))
    raise InputError(f"{source}: unknown arena kind {kind!r}")


def read_tree(path: str | Path) -> DecompTree:
    data = read_json(path)
    return load_tree(data.get("tree", data))
