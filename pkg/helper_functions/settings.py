import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from dotenv import load_dotenv


# -----------------------------
# Types


@dataclass
class HarnessSettings:
    # vertex caps per suite
    size_caps: Dict[str, int] = field(
        default_factory=lambda: {
            "figure-outcomes": 10,
            "union-join-tables": 8,
            "rewrite-soundness": 12,
            "path-shortening": 6,
            "nd-kernel": 12,
            "mw-solver": 14,
            "fen-solver": 14,
            "dtc-kernel": 14,
            "gadget-staller": 6,
            "gadget-dominator": 6,
            "gadget-universal": 10,
            "solver-selfchecks": 7,
        }
    )

    def cap(self, suite: str) -> int:
        return self.size_caps[suite]


@dataclass
class ToolkitSettings:
    workers: int = 1
    node_limit: int = 50_000_000
    memo_capacity: int = 2_000_000
    log_level: str = "WARNING"
    harness: HarnessSettings = field(default_factory=HarnessSettings)


ENV_TEMPLATE = (
    "MBDOM_WORKERS = 1\n"
    "MBDOM_NODE_LIMIT = 50000000\n"
    "MBDOM_MEMO_CAPACITY = 2000000\n"
    "MBDOM_LOG_LEVEL = 'WARNING'\n"
    "# MBDOM_SUITE_MAX_VERTICES = 10\n"
)


# -----------------------------
# Loading


def _int_env(name: str, default: int, minimum: int = 0) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw.strip().strip("'\""))
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None
    if value < minimum:
        raise ValueError(f"{name} must be at least {minimum}, got {value}")
    return value


def load_settings(env_file: Optional[str | Path] = None) -> ToolkitSettings:
    """Read MBDOM_* variables, after loading ``env_file`` (or ./.env) if present."""
    if env_file is not None:
        load_dotenv(env_file)
    else:
        load_dotenv()

    harness = HarnessSettings()
    override = _int_env("MBDOM_SUITE_MAX_VERTICES", 0)
    if override:
        harness.size_caps = {suite: override for suite in harness.size_caps}

    log_level = os.environ.get("MBDOM_LOG_LEVEL", "WARNING").strip().strip("'\"").upper()
    if log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ValueError(f"MBDOM_LOG_LEVEL is not a logging level: {log_level!r}")

    return ToolkitSettings(
        workers=_int_env("MBDOM_WORKERS", 1, minimum=1),
        node_limit=_int_env("MBDOM_NODE_LIMIT", 50_000_000, minimum=1),
        memo_capacity=_int_env("MBDOM_MEMO_CAPACITY", 2_000_000, minimum=1),
        log_level=log_level,
        harness=harness,
    )
