"""Exception types raised across the package."""


class WealthExError(ValueError):
    """Base class for validation and numerical-precondition failures."""


class GridError(WealthExError):
    pass


class NegativeDensityError(WealthExError):
    def __init__(self, index, value, where="sample"):
        self.index = index
        self.value = value
        super().__init__(f"negative density at {where} {index}: {value!r}")


class NormalizationError(WealthExError):
    pass


class GridMismatchError(WealthExError):
    pass


class MeanDriftError(WealthExError):
    """Operator output mean moved further than the configured tolerance.

    Usually means x_max is too small for the mean of the field or the grid is
    too coarse.
    """


class MalformedRowError(WealthExError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class NonUniformSpacingError(WealthExError):
    pass


class SchemaVersionError(WealthExError):
    def __init__(self, found, expected):
        self.found = found
        self.expected = expected
        super().__init__(f"manifest schema version {found!r} does not match supported version {expected!r}")


class MissingFieldError(WealthExError):
    def __init__(self, field):
        self.field = field
        super().__init__(f"manifest is missing required field {field!r}")
