"""Exception hierarchy; the CLI maps these onto exit codes."""


class PdvoiceError(Exception):
    """Base class for all package-specific failures."""


class DataError(PdvoiceError):
    """Anything wrong with an input file: schema, parsing, emptiness, splits."""


class SchemaError(DataError):
    """Header does not match the expected column set."""


class DataParseError(DataError):
    """A cell failed numeric conversion; message carries row and column."""


class IngestionError(DataError):
    """File-level problem such as an empty or header-only file."""


class SplitError(DataError):
    """Requested partition is impossible, e.g. a class is missing."""


class ConfigError(PdvoiceError):
    """Invalid experiment configuration or command-line usage."""


class TrainingDivergedError(PdvoiceError):
    """Loss became non-finite; carries the epoch where it happened."""

    def __init__(self, epoch: int, message: str | None = None):
        self.epoch = epoch
        super().__init__(message or f"training loss became non-finite at epoch {epoch}")
