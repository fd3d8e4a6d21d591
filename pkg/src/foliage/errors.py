"""Exception hierarchy shared by all foliage modules."""


class FoliageError(Exception):
    """Base class for every error raised by this package."""


# nerve / Cech complex
class MissingFaceError(FoliageError, ValueError):
    """A listed intersection has a face that is not listed (nerve not closed)."""


class BadComponentMapError(FoliageError, ValueError):
    """Face-incidence data for multi-component intersections is absent or inconsistent."""


class DegreeOutOfRangeError(FoliageError, IndexError):
    pass


class DimensionMismatchError(FoliageError, ValueError):
    pass


# linearizations
class DegenerateLinearizationError(FoliageError, ValueError):
    """The linear part is (numerically) singular: the field is not F-nondegenerate there."""


# Hopf ledger
class BadIndexValueError(FoliageError, ValueError):
    pass


class OddDegreeNonzeroError(FoliageError, ValueError):
    pass


class BettiShapeError(FoliageError, ValueError):
    pass


# spectral
class BadParityError(FoliageError, ValueError):
    pass


class NegativeWeightError(FoliageError, ValueError):
    pass


class SpectralGapTooSmallError(FoliageError, ArithmeticError):
    pass


class NonIntegerSupertraceError(FoliageError, ArithmeticError):
    pass


class LocalizationPreconditionError(FoliageError, ValueError):
    """The field vanishes somewhere outside the declared critical regions."""


# input files
class ParseError(FoliageError, ValueError):
    def __init__(self, message, *, path=None, line=None, column=None, field=None):
        self.path = path
        self.line = line
        self.column = column
        self.field = field
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}" + (f", column {column}" if column is not None else ""))
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


class SchemaError(FoliageError, ValueError):
    def __init__(self, message, *, missing=(), extra=(), where=None):
        self.missing = tuple(missing)
        self.extra = tuple(extra)
        self.where = where
        parts = [message]
        if self.missing:
            parts.append("missing fields: " + ", ".join(self.missing))
        if self.extra:
            parts.append("unexpected fields: " + ", ".join(self.extra))
        prefix = f"{where}: " if where else ""
        super().__init__(prefix + "; ".join(parts))
