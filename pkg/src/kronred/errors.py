"""Exception hierarchy shared across the package."""

from __future__ import annotations


class KronredError(Exception):
    """Base class for all errors raised by this package."""


class ExprSyntaxError(KronredError):
    """Law text does not conform to the grammar.

    Carries the character offset of the offending token.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ConvexityError(KronredError):
    """A law's derivative is not strictly positive on its validity interval."""

    def __init__(self, y: float, value: float, source: str = ""):
        label = f" for law {source!r}" if source else ""
        super().__init__(f"g'({y!r}) = {value!r} is not positive{label}")
        self.y = y
        self.value = value


class IntervalError(KronredError):
    """An edge voltage left the law's validity interval."""

    def __init__(self, y: float, interval: tuple[float, float], edge: str = ""):
        label = f" on edge {edge}" if edge else ""
        super().__init__(
            f"value {y!r} outside validity interval [{interval[0]!r}, {interval[1]!r}]{label}"
        )
        self.y = y
        self.interval = interval
        self.edge = edge


class GraphStructureError(KronredError):
    """Graph or Laplacian data violates a structural requirement."""


class SolveError(KronredError):
    """Interior solve failed; carries the last iterate when available."""

    def __init__(self, message: str, result=None, edge: str = ""):
        if edge:
            message = f"{message} (edge {edge})"
        super().__init__(message)
        self.result = result
        self.edge = edge


class AssumptionError(KronredError):
    """A working assumption of the reduction was violated by the data."""


class HomogeneityError(KronredError):
    """Potential is not homogeneous of the requested degree."""

    def __init__(self, z, t: float, lhs: float, rhs: float):
        super().__init__(
            f"homogeneity test failed at t={t!r}: K(t z)={lhs!r} vs t^k K(z)={rhs!r} for z={z!r}"
        )
        self.z = z
        self.t = t
        self.lhs = lhs
        self.rhs = rhs


class NonQuadraticLawError(KronredError):
    """The exact linear path was asked to handle a non-quadratic law."""

    def __init__(self, edge: str):
        super().__init__(f"edge {edge} does not carry a law of the form g*y")
        self.edge = edge


class NetworkFileError(KronredError):
    """A network file failed to parse or validate."""

    def __init__(self, message: str, location: str = ""):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location
