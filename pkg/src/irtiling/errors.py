"""Exception hierarchy shared by all modules."""


class TilingError(Exception):
    """Base class for every error raised by irtiling."""


class OutsideSupport(TilingError):
    """A cell or point is not (sufficiently) covered at the requested level."""


class LengthMismatch(TilingError):
    pass


class ResourceLimit(TilingError):
    """A request exceeds a configured size cap."""


class NotCovered(TilingError):
    pass


class NoConsistentAssignment(TilingError):
    pass


class AmbiguousAssignment(TilingError):
    def __init__(self, survivors):
        self.survivors = list(survivors)
        super().__init__(f"{len(self.survivors)} colour assignments survive calibration: {self.survivors}")


class InconsistentBlock(TilingError):
    def __init__(self, cell, colour, message=""):
        self.cell = cell
        self.colour = colour
        super().__init__(message or f"conflicting blocks for {colour} at cell {cell}")


class AmbiguousComposition(TilingError):
    def __init__(self, phases):
        self.phases = list(phases)
        super().__init__(f"several valid phases: {self.phases}")


class NoComposition(TilingError):
    pass


class NotPrimitive(TilingError):
    pass


class WindowTooSmall(TilingError):
    pass


class MismatchAgainstA(TilingError):
    def __init__(self, cell, expected, found):
        self.cell = cell
        self.expected = expected
        self.found = found
        super().__init__(f"packing tile at {cell} is {found}, the tiling has {expected}")


class SearchExhausted(TilingError):
    pass


class UnknownShape(TilingError):
    def __init__(self, cells):
        self.cells = sorted(cells)
        super().__init__(f"visible region {self.cells} is not a prototile shape")


class InconsistentArrows(TilingError):
    pass
