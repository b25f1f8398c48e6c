"""Exception hierarchy shared by every module of the package."""


class FlabbyError(Exception):
    """Base class for all errors raised by :mod:`flabby`."""


# finite spaces
class NotT0(FlabbyError, ValueError):
    pass


class DuplicatePoint(FlabbyError, ValueError):
    pass


class UnknownPoint(FlabbyError, KeyError):
    pass


class NoBasis(FlabbyError, ValueError):
    pass


class IndexOutOfRange(FlabbyError, IndexError):
    pass


class NotOpen(FlabbyError, ValueError):
    pass


# linear algebra
class ShapeMismatch(FlabbyError, ValueError):
    pass


# cosheaves
class SpaceMismatch(FlabbyError, ValueError):
    pass


class NotValidated(FlabbyError, ValueError):
    """The precosheaf fails :func:`flabby.cosheaf.validate`; ``report`` holds the violations."""

    def __init__(self, message, report=()):
        super().__init__(message)
        self.report = list(report)


class NotClosedPoint(FlabbyError, ValueError):
    pass


class NotClosed(FlabbyError, ValueError):
    pass


class NotNested(FlabbyError, ValueError):
    pass


# decomposition
class NotFlabby(FlabbyError, ValueError):
    def __init__(self, message, report=()):
        super().__init__(message)
        self.report = list(report)


class NotCosheaf(FlabbyError, ValueError):
    def __init__(self, message, report=()):
        super().__init__(message)
        self.report = list(report)


class NoProperPoint(FlabbyError, RuntimeError):
    """Internal contradiction: a verified flabby cosheaf without a splittable point."""


# towers
class EmptySystem(FlabbyError, ValueError):
    pass


# ingestion
class DuplicateSingularity(FlabbyError, ValueError):
    pass


class DepthOutOfRange(FlabbyError, ValueError):
    pass


class ParseError(FlabbyError, ValueError):
    pass


class SchemaError(FlabbyError, ValueError):
    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class ValidationError(FlabbyError, ValueError):
    def __init__(self, message, report=()):
        super().__init__(message)
        self.report = list(report)
