"""Exception hierarchy shared by all orbitlab modules."""

from __future__ import annotations


class OrbitlabError(Exception):
    """Base class for library errors."""


class DomainError(OrbitlabError, ValueError):
    """A point lies outside its domain, or dimensions disagree."""


class MapSyntaxError(OrbitlabError, ValueError):
    """Invalid map text. ``offset`` is the byte offset of the offending token."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvaluationError(OrbitlabError, ArithmeticError):
    """Branch-cut evaluation or division by zero inside a map expression."""


class InversionError(OrbitlabError, ArithmeticError):
    """A backward step could not be computed."""


class NewtonDiverged(InversionError):
    pass


class LeftDomain(InversionError):
    pass


class SingularJacobian(InversionError):
    pass


class InconclusiveError(OrbitlabError):
    """A numerical verdict was requested but the evidence is inconclusive."""


class BelowResolution(LeftDomain):
    """The preimage is inside the domain but closer to the boundary than the
    working precision can resolve. Retrying with more digits may help."""
