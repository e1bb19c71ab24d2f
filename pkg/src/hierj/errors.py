"""Exception types used across the package."""

from __future__ import annotations


class HierjError(Exception):
    """Base class for all errors raised by this package."""


class TreeStructureError(HierjError):
    """A parent array does not describe a valid binary partition tree."""


class BadLengthError(TreeStructureError):
    """Node count does not match 2 * leaf_count - 1."""


class MultipleRootsError(TreeStructureError):
    """Not exactly one node carries the root sentinel parent."""


class NotBinaryError(TreeStructureError):
    """An internal node does not have exactly two children."""


class CycleError(TreeStructureError):
    """Parent links contain a cycle or leave nodes unreachable from the root."""


class ShapeMismatchError(HierjError):
    """Mask and label map extents differ."""


class LabelOutOfRangeError(HierjError):
    """A leaf label lies outside 0..leaf_count-1."""


class NoPartitionError(HierjError):
    """The requested pixel subset has no partition into tree nodes."""


class InconsistentSelectionError(HierjError):
    """A node selection violates the invariants of its consistency type."""


class EmptyGroundTruthError(HierjError):
    """The ground-truth foreground is empty, so the Jaccard index is undefined."""


class BudgetOutOfRangeError(HierjError):
    """The node budget lies outside 1..leaf_count."""


class BudgetExceededError(HierjError):
    """An exhaustive enumeration would exceed its configured guard."""


class DisconnectedGraphError(HierjError):
    """The edge set does not connect all vertices."""


class ThresholdTooLargeError(HierjError):
    """An area threshold at least as large as the total area was requested."""


class FormatError(HierjError):
    """A file could not be parsed. Carries an optional source location."""

    def __init__(self, message: str, *, line: int | None = None, offset: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"byte {offset}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.offset = offset


class TreeFormatError(FormatError):
    """Malformed tree text file."""


class PgmFormatError(FormatError):
    """Malformed PGM image."""


class PpmFormatError(FormatError):
    """Malformed PPM image."""


class WeightFileError(FormatError):
    """Malformed edge-weight file."""
