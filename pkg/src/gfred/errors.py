"""Exception and warning types shared across the package."""


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes."""


class ZeroColumn(ValueError):
    """Cosine similarity is undefined for an all-zero data vector."""


class KnnTooLarge(ValueError):
    """Neighbor count must satisfy knn <= n - 1."""


class ConvergenceFailure(RuntimeError):
    """The dense symmetric eigensolver did not converge."""


class SpectralOverflow(ArithmeticError):
    """An eigenvalue power grew past 1e150; normalize the spectrum first."""


class DegenerateDirection(ArithmeticError):
    """A search direction carries no energy through the data."""


class NonFiniteValue(ArithmeticError):
    """An iterate picked up NaN or infinity."""


class FingerprintMismatch(ValueError):
    """The model was trained against a different graph spectrum."""


class ConfigError(ValueError):
    """An experiment configuration value is missing or invalid."""


class DataError(Exception):
    """Base class for dataset and model-file problems."""


class BadMagic(DataError):
    """A binary file does not start with the expected magic number."""


class TruncatedFile(DataError):
    """A binary file ends before its declared contents do."""


class CountMismatch(DataError):
    """Paired image and label files disagree on the record count."""


class CsvParseError(DataError):
    """A CSV cell failed to parse; the message carries row and column."""


class InsufficientImages(DataError):
    """A requested subset needs more classes or images than the data holds."""


class CorruptFile(DataError):
    """A model file failed a structural or checksum validation."""


class VersionMismatch(DataError):
    """A model file was written by an unsupported format version."""


class RankDeficiencyWarning(UserWarning):
    """Requested components reach into the numerical null space."""
