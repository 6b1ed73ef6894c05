"""Exception types shared across the pipeline."""

from __future__ import annotations


class ExcellenceMapperError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ExcellenceMapperError):
    """A source row or file failed validation.

    ``line`` is the 1-based line number of the offending row (0 for
    file-level problems), ``field`` the name of the violated field when
    a single field can be blamed.
    """

    def __init__(self, message: str, *, line: int = 0, field: str | None = None):
        self.line = line
        self.field = field
        prefix = f"line {line}: " if line else ""
        super().__init__(f"{prefix}{message}")


class SubjectRejected(ExcellenceMapperError):
    """A subject area fell below the institution threshold.

    Carries the counts needed for the diagnostic message so callers can
    report why the subject was dropped without parsing the string.
    """

    def __init__(self, subject: str, n_surviving: int, min_institutions: int):
        self.subject = subject
        self.n_surviving = n_surviving
        self.min_institutions = min_institutions
        super().__init__(
            f"subject {subject!r} rejected: below min_institutions "
            f"({n_surviving} < {min_institutions})"
        )


class InternalConsistencyError(ExcellenceMapperError):
    """Pipeline stages disagree about which papers exist."""


class NumericalError(ExcellenceMapperError):
    """A numerical routine produced a non-finite intermediate value."""


class UndefinedTestError(ExcellenceMapperError):
    """A test statistic is undefined (zero standard error)."""
