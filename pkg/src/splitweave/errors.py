"""Exception hierarchy shared by every module.

All domain failures derive from SplitWeaveError so CLI/server layers can map
them to exit codes / HTTP statuses in one place. `node_path` is attached by
the interpreter when an error surfaces while evaluating a specific node.
"""

from __future__ import annotations


class SplitWeaveError(Exception):
    def __init__(self, message: str, node_path: str | None = None):
        super().__init__(message)
        self.node_path = node_path


class RangeError(SplitWeaveError):
    """A parameter or argument is outside its documented bounds."""


class PathNotFound(SplitWeaveError):
    """A node path does not resolve in the given program."""


class KindMismatch(SplitWeaveError):
    """A subtree is not legal at the addressed slot."""


class AxisUnavailable(SplitWeaveError):
    """A field references row/col on fragments that do not carry them."""


class FieldTypeError(SplitWeaveError):
    """A color field feeds a numeric slot, or vice versa; or a merge key
    evaluates to a non-integer."""


class DegenerateSites(SplitWeaveError):
    """Voronoi site sampling kept producing coincident sites."""


class UnsupportedTopology(SplitWeaveError):
    """A merge produced a boundary with a hole or a self-touch."""


class StructureMismatch(SplitWeaveError):
    """Two programs are not structurally identical up to literals."""


class IncompatibleEdit(SplitWeaveError):
    """An edit descriptor cannot be applied to the given program."""


class InvalidResult(SplitWeaveError):
    """An applied edit produced a program that fails validation."""

    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = tuple(diagnostics)


class SamplingExhausted(SplitWeaveError):
    """Quartet construction ran out of retries."""


class MotifParseError(SplitWeaveError):
    """One or more motif asset files could not be read."""

    def __init__(self, message: str, files=()):
        super().__init__(message)
        self.files = tuple(files)


class UnknownMotif(SplitWeaveError):
    """A program references a motif id absent from the registry."""


class IoError(SplitWeaveError):
    """Filesystem failure while writing dataset output."""
