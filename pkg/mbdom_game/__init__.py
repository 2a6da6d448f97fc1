"""mbdom-game, exact solving and kernelization for the Maker-Breaker domination game."""

__version__ = "0.1.0"

from mbdom_game.api import gadget, generate, kernelize, short, solve, verify  # noqa: E402

__all__ = ["gadget", "generate", "kernelize", "short", "solve", "verify", "__version__"]
