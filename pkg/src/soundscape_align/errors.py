"""Exception hierarchy.

Everything raised for bad user input derives from SoundscapeAlignError so
the CLI can map input problems to exit code 1 and keep genuine bugs at 2.
Plain ValueError is used for programming-level argument errors on the
library API.
"""


class SoundscapeAlignError(Exception):
    """Base class for input and data-contract errors."""


class ManifestError(SoundscapeAlignError):
    """Manifest file cannot be loaded or fails validation."""


class FormatError(SoundscapeAlignError):
    """A feature file violates its documented schema."""


class DegenerateVectorError(SoundscapeAlignError):
    """A vector with zero or non-finite norm where a direction is required."""


class DegenerateSeriesError(SoundscapeAlignError):
    """A constant or unusable series where variation is required."""


class ConfigurationError(SoundscapeAlignError):
    """A user-supplied configuration table or option is unusable."""
