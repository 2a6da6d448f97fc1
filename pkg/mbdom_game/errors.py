"""Exception hierarchy shared by every module of the toolkit."""


class MbdomError(Exception):
    """Base class for toolkit errors."""


class InputError(MbdomError, ValueError):
    """Malformed graph, position, hypergraph, tree or file."""


class StateError(MbdomError, RuntimeError):
    """Operation requested on a position that does not support it."""


class ResourceLimitError(MbdomError, RuntimeError):
    """The solver hit its node limit before deciding the position."""


class InconsistencyError(MbdomError, RuntimeError):
    """A combination of results that game theory rules out was observed."""
