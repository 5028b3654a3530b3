"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PrimsegError(Exception):
    """Base class for all primseg errors."""


class UnknownPrimitive(PrimsegError):
    """A primitive name outside the closed 11-element alphabet."""

    def __init__(self, name: str):
        super().__init__(f"unknown primitive: {name!r}")
        self.name = name


class WindowOutOfRange(PrimsegError):
    """A termination window extends past the trajectory bounds."""


class BoundaryNotFound(PrimsegError):
    """No frame satisfied a primitive's termination predicate."""

    def __init__(self, index: int, primitive: str):
        super().__init__(
            f"no boundary found for sequence item {index} ({primitive})"
        )
        self.index = index
        self.primitive = primitive


class SpecInvalid(PrimsegError):
    """A synthetic trajectory spec violates its structural constraints."""


class MissingRole(PrimsegError):
    """A canonical template references a color slot the role map lacks."""

    def __init__(self, slot: str):
        super().__init__(f"missing role for slot {slot!r}")
        self.slot = slot


class ShapeMismatch(PrimsegError):
    """Grid shapes disagree."""


class InsufficientObjects(PrimsegError):
    """The object pair list ran out before the sequence was fully bound."""

    def __init__(self, segment_index: int):
        super().__init__(f"no object pair left for segment {segment_index}")
        self.segment_index = segment_index


class PlanRejected(PrimsegError):
    """An external plan reply failed validation or transport."""


class NoTemplateMatch(PrimsegError):
    """No keyword rule matched the instruction."""


class NoPlan(PrimsegError):
    """Every planning strategy failed for the instruction."""


class LibraryFormatError(PrimsegError):
    """A persisted library file has an incompatible header or payload."""
