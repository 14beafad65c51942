"""Exception types shared across the package."""


class BoolSketchError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(BoolSketchError, ValueError):
    pass


class SolutionCountExceeded(BoolSketchError):
    """An affine GF(2) system has more solutions than the caller allows.

    In support identification this means the max-value rows do not have
    enough rank, usually because too few of them were observed.
    """

    def __init__(self, count, cap):
        super().__init__(f"system has {count} solutions, cap is {cap}")
        self.count = count
        self.cap = cap


class Infeasible(BoolSketchError):
    """The recovery program has no feasible point."""


class LearnFailed(BoolSketchError):
    """A learning run failed; ``stage`` names the step that gave up."""

    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class GridAmbiguous(BoolSketchError):
    def __init__(self, parity, value, grid):
        super().__init__(
            f"correlation {value:.6g} for parity {sorted(parity)} is too close "
            f"to a midpoint of the 1/{grid} grid"
        )
        self.parity = parity
        self.value = value


class ComponentTooLarge(BoolSketchError):
    def __init__(self, size, cap):
        super().__init__(f"component of size {size} exceeds cap {cap}")
        self.size = size
        self.cap = cap


class NoConsistentHypergraph(BoolSketchError):
    pass


class AmbiguousHypergraph(BoolSketchError):
    """Several hypergraphs share the polynomial; ``candidates`` lists them when known."""

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = candidates


class MalformedLine(BoolSketchError, ValueError):
    def __init__(self, lineno, reason):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno
        self.reason = reason
