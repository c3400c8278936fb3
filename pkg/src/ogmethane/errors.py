"""Exception hierarchy.

Errors fall into four families so the CLI can map them onto exit codes:
configuration, ingestion (file content), computation (model/engine) and
plain I/O (``OSError``, not defined here).
"""

from __future__ import annotations


class MethaneModelError(Exception):
    """Base class for every error raised by the package."""

    #: short pipeline-stage label used in CLI diagnostics
    module = "ogmethane"


class ConfigurationError(MethaneModelError, ValueError):
    module = "config"

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InvalidQuantityError(MethaneModelError, ValueError):
    """A unit constructor received a negative, NaN or infinite value."""

    module = "core-model"


# -- ingestion ---------------------------------------------------------------


class IngestionError(MethaneModelError):
    """Problem with an input file; always tied to a path and 1-based line."""

    module = "ingestion"

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.message = message
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


class SchemaError(IngestionError):
    """Missing, duplicated or unknown column."""


class InvalidValueError(IngestionError):
    """Malformed number or enum token, or an invariant-violating value."""


class DuplicateKeyError(IngestionError):
    pass


class ReferentialIntegrityError(IngestionError):
    pass


class UnknownRegionError(ReferentialIntegrityError):
    pass


class DuplicateAllocationError(IngestionError):
    pass


# -- computation -------------------------------------------------------------


class ComputationError(MethaneModelError):
    module = "engine"


class ZeroProductionError(ComputationError):
    def __init__(self, region: str | None = None):
        self.region = region
        label = f"region {region!r}" if region else "input"
        super().__init__(f"{label} has zero total production; intensity undefined")


class MissingBaselineError(ComputationError):
    module = "production-estimator"

    def __init__(self, region: str, year: int):
        self.region = region
        self.year = year
        super().__init__(f"region {region!r} has no annual gas value for baseline year {year}")


class DegenerateRatioError(ComputationError):
    module = "production-estimator"


class NoEmissionDataError(ComputationError):
    module = "emissions-fusion"

    def __init__(self, region: str, year: int):
        self.region = region
        self.year = year
        super().__init__(f"no emission record for region {region!r} in {year}")


class NoCoverageError(ComputationError):
    pass


class EmptyCategoryError(ComputationError):
    module = "benchmark-stats"


class DegenerateReportError(ComputationError):
    module = "benchmark-stats"
