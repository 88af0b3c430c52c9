"""Exception hierarchy. Every error raised by the package derives from DgsnmfError."""


class DgsnmfError(ValueError):
    pass


class ShapeMismatchError(DgsnmfError):
    pass


class NonFiniteError(DgsnmfError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"non-finite entry at {index}")


class NegativeValueError(DgsnmfError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"negative entry at {index}")


class ZeroNormError(DgsnmfError):
    pass


class InvalidBandwidthError(DgsnmfError):
    pass


class ImageTooSmallError(DgsnmfError):
    pass


class NoConvergenceError(DgsnmfError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"conjugate gradient stopped after {iterations} iterations "
            f"with relative residual {residual:.3e}"
        )


class OutOfRangeError(DgsnmfError):
    pass


class DegenerateRowError(DgsnmfError):
    def __init__(self, row):
        self.row = row
        super().__init__(f"abundance row {row} sums to zero")


class BadKError(DgsnmfError):
    pass


class ZeroColumnError(DgsnmfError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"abundance column {column} is all zero")


class EmptyInputError(DgsnmfError):
    pass


class InfeasibleSpecError(DgsnmfError):
    pass


class TooManyEndmembersError(DgsnmfError):
    pass


class DegeneratePixelError(DgsnmfError):
    def __init__(self, pixel):
        self.pixel = pixel
        super().__init__(f"pixel {pixel} has no abundance mass")


class BadMagicError(DgsnmfError):
    pass


class TruncatedPayloadError(DgsnmfError):
    pass
