"""Exception hierarchy shared by all modules."""


class PowerTowerError(Exception):
    """Base class for every error raised by this package."""


class BaseNotSupported(PowerTowerError, ValueError):
    pass


class ArityError(PowerTowerError, ValueError):
    pass


class PromotionError(PowerTowerError, ValueError):
    pass


class BaseMismatch(PowerTowerError, ValueError):
    pass


class DomainError(PowerTowerError, ValueError):
    pass


class DepthError(PowerTowerError, ValueError):
    pass


class MagnitudeError(PowerTowerError, OverflowError):
    """An integer exponent exceeded the configured magnitude cap."""


class UnsupportedShape(PowerTowerError):
    """The exact gamma solver cannot handle this left-hand side."""


class CorruptCheckpoint(PowerTowerError):
    pass


class ParseError(PowerTowerError, ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class HeightError(ParseError):
    pass


class LoweringError(PowerTowerError, ValueError):
    pass


class AtomNotPowerOfBase(LoweringError):
    def __init__(self, literal, base):
        super().__init__(f"literal {literal} is not an integer power of {base}")
        self.literal = literal
        self.base = base
