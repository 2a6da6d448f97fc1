import logging
import os

_env_level = os.environ.get("MBDOM_LOG_LEVEL", "WARNING").strip("'\"").upper()

logging.basicConfig(
    level=_env_level if isinstance(logging.getLevelName(_env_level), int) else logging.WARNING,
    format="%(asctime)s %(levelname)s %(name)s - %(message)s"
)

logger = logging.getLogger("mbdom_game")


def get_logger(name: str) -> logging.Logger:
    """Module logger below the package logger, so one level setting covers all."""
    if name.startswith("mbdom_game"):
        return logging.getLogger(name)
    return logger.getChild(name)


def set_level(level: int | str) -> None:
    if isinstance(level, str):
        level = level.upper()
    logger.setLevel(level)
