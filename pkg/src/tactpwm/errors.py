"""Exception types shared across the simulator."""


class TactError(Exception):
    """Base class for simulator errors."""


class DomainError(TactError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigError(TactError, ValueError):
    """A configuration value or file violates its schema or invariants."""


class WeightFileError(ConfigError):
    """Malformed weight file. Carries the 1-based line and column of the fault."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
