# The MIT License (MIT)
# Copyright © 2025 <kisa134>

from typing import Optional


class DPGDAError(Exception):
    """Base class for every error raised by the dpgda package."""


class ValidationFailure(DPGDAError):
    """Inputs or configuration rejected before any work is done (CLI exit code 2)."""


class DatasetError(ValidationFailure):
    """
    Problems with tabular data: parsing, schema, splits.

    Args:
        message (str): Human readable description.
        row (int, optional): 1-based line number in the source file.
        column (str, optional): Column name the problem was found in.
    """

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"row {row}")
        if column is not None:
            location.append(f"column '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class ConfigError(ValidationFailure):
    """Invalid configuration; `key_path` names the offending key when known."""

    def __init__(self, message: str, key_path: Optional[str] = None):
        self.key_path = key_path
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)


class ConstraintError(ValidationFailure):
    """Malformed rules or bounds, or rules that do not match the data schema."""


class SurrogateError(ValidationFailure):
    """Surrogate forest cannot be trained or queried with the given inputs."""


class StatisticsError(ValidationFailure):
    """Rank statistics preconditions not met (missing cells, too few methods)."""


class InfeasibleAugmentation(DPGDAError):
    """
    No candidate satisfying both the validity gate and every class bound was
    found for a query sample, even after the configured restarts.
    """

    def __init__(self, query_index: Optional[int], attempts: int, message: str = ""):
        self.query_index = query_index
        self.attempts = attempts
        where = f"query {query_index}" if query_index is not None else "query"
        text = f"no feasible candidate for {where} after {attempts} attempt(s)"
        if message:
            text = f"{text}: {message}"
        super().__init__(text)
