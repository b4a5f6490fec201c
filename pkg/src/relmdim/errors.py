"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class RelmdimError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InvalidArgument(RelmdimError, ValueError):
    """A precondition on an argument does not hold."""

    exit_code = 2


class ResourceLimit(RelmdimError):
    """An exact search would exceed its declared budget."""

    exit_code = 3


class MathematicalFailure(RelmdimError):
    """A construction stage failed for a mathematical reason.

    ``kind`` is a short stable tag (``"independence-shortfall"``,
    ``"empty-fiber"``, ...) that ends up in reports.
    """

    exit_code = 1

    def __init__(self, kind, message=""):
        self.kind = kind
        super().__init__(f"{kind}: {message}" if message else kind)


class EmptyFiber(MathematicalFailure):
    def __init__(self, message=""):
        super().__init__("empty-fiber", message)


class NoSeparation(MathematicalFailure):
    def __init__(self, message=""):
        super().__init__("no-separation", message)


class StructureError(MathematicalFailure):
    """A certificate or structure failed an invariant (fiber-mismatch, ...)."""


class ConfigError(RelmdimError):
    """Malformed configuration or system spec."""

    exit_code = 2
