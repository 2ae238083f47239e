"""Exception hierarchy shared by all topvol modules."""


class TopVolError(Exception):
    """Base class for domain errors raised by topvol."""


class DomainError(TopVolError, ValueError):
    """An argument lies outside the domain of the operation."""


class DegenerateShapeError(DomainError):
    pass


class ParseError(TopVolError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class InconsistentLengthError(ParseError):
    pass


class NonConvergenceError(TopVolError):
    pass


class NoGeometricSolutionError(TopVolError):
    pass


class UnsupportedExpressionError(DomainError):
    pass


class UndecidableError(TopVolError):
    """Sign of an exact expression could not be resolved at the precision ceiling."""


class TieError(TopVolError):
    pass


class CensusFormatError(TopVolError, ValueError):
    def __init__(self, message, path=None, row=None):
        self.path = path
        self.row = row
        where = []
        if path is not None:
            where.append(str(path))
        if row is not None:
            where.append(f"row {row}")
        if where:
            message = f"{': '.join(where)}: {message}"
        super().__init__(message)


class ChecksumError(TopVolError):
    pass


class NotFoundError(TopVolError, LookupError):
    """The manifold is well formed but has no census row."""


class MalformedNameError(DomainError):
    pass


class NotInVError(DomainError):
    pass
