"""Exception types shared across the package."""


class SchemaMismatchError(ValueError):
    """An assignment, table, or model refers to variables or values not in the schema."""


class DecomposabilityError(ValueError):
    """A graph that must be chordal is not."""


class CapabilityError(ValueError):
    """A request exceeds a hard limit (e.g. exhaustive enumeration over too many variables)."""


class CorpusParseError(ValueError):
    """Malformed corpus text.  Carries the 1-based line and column of the offender."""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ConfigError(ValueError):
    """Invalid or incomplete run configuration."""
