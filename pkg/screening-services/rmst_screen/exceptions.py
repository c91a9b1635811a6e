#!/usr/bin/env python3
"""
🚨 Screening Errors
Named error hierarchy shared by ingestion, estimation, screening and the CLI.

Input problems derive from InputError (exit code 2 on the command line),
numerical failures derive from ComputationError (exit code 1).
"""

from typing import Optional


class ScreeningError(Exception):
    """Base class for every error raised by rmst_screen"""


class InputError(ScreeningError, ValueError):
    """Invalid user input: files, columns, values or parameters"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        details = []
        if column is not None:
            details.append(f"column '{column}'")
        if row is not None:
            details.append(f"row {row}")
        suffix = f" ({', '.join(details)})" if details else ""
        super().__init__(f"{message}{suffix}")
        self.message = message

    def __reduce__(self):
        return self.__class__, (self.message, self.row, self.column)


class MissingFileError(InputError):
    """Input file does not exist"""


class MalformedFileError(InputError):
    """File is empty, not UTF-8 or not parseable as CSV"""


class MissingColumnError(InputError):
    """A named column is absent from the header"""


class NonNumericCellError(InputError):
    """A cell could not be parsed as a number"""


class MissingValueError(InputError):
    """An empty or NaN cell where a value is required"""


class NegativeTimeError(InputError):
    """Observed time below zero"""


class InvalidStatusError(InputError):
    """Status value other than literal 0 or 1"""


class NoEventsError(InputError):
    """No observed events in the sample"""


class InvertedIntervalError(InputError):
    """Interval with left endpoint not below right endpoint"""


class NoFiniteIntervalsError(InputError):
    """Every interval is right-censored"""


class InvalidFeatureIndexError(InputError):
    """Feature index outside 0..p-1"""


class ConstantCovariateError(InputError):
    """Covariate has a single distinct value where variation is required"""


class DegenerateBasisError(InputError):
    """Basis column with zero variance"""


class UnknownScenarioError(InputError):
    """Scenario id not in the simulation catalogue"""


class ConfigurationError(InputError):
    """Inconsistent parameters (sizes, counts, ranges)"""


class ComputationError(ScreeningError, RuntimeError):
    """Numerical procedure could not produce a result"""


class CalibrationError(ComputationError):
    """Censoring target unattainable within the search bracket"""


class FoldAssignmentError(ComputationError):
    """Cross-validation folds could not be given events"""


class ResidualDomainError(ComputationError):
    """Deviance residual undefined for an event observation"""


class ReplicationError(ComputationError):
    """A benchmark replication failed"""

    def __init__(self, replication: int, cause: Exception):
        self.replication = replication
        self.cause = cause
        super().__init__(f"replication {replication} failed: {cause}")

    def __reduce__(self):
        return self.__class__, (self.replication, self.cause)
