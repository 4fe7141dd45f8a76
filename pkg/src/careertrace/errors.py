"""Exception types raised across the careertrace pipeline.

Exceptions with structured constructor arguments define ``__reduce__`` so
they survive pickling across process-pool workers.
"""

from __future__ import annotations


class CareerTraceError(Exception):
    """Base class for all careertrace errors."""


class MalformedLine(CareerTraceError):
    """A corpus line is not a valid record object."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason

    def __reduce__(self):
        return (MalformedLine, (self.line_no, self.reason))


class DuplicatePubId(CareerTraceError):
    def __init__(self, pub_id: str, line_no: int | None = None):
        at = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"duplicate pub_id {pub_id!r}{at}")
        self.pub_id = pub_id
        self.line_no = line_no

    def __reduce__(self):
        return (DuplicatePubId, (self.pub_id, self.line_no))


class EmptyAuthorList(CareerTraceError):
    def __init__(self, pub_id: str, line_no: int | None = None):
        super().__init__(f"record {pub_id!r} has no authors")
        self.pub_id = pub_id
        self.line_no = line_no

    def __reduce__(self):
        return (EmptyAuthorList, (self.pub_id, self.line_no))


class YearOutOfWindow(CareerTraceError):
    def __init__(self, pub_id: str, year: int, window: tuple[int, int]):
        super().__init__(f"record {pub_id!r} year {year} outside window {window[0]}..{window[1]}")
        self.pub_id = pub_id
        self.year = year
        self.window = window

    def __reduce__(self):
        return (YearOutOfWindow, (self.pub_id, self.year, self.window))


class SchemeError(CareerTraceError):
    """A region scheme violates its structural invariants."""


class HomeMismatch(CareerTraceError):
    def __init__(self, home: str):
        super().__init__(f"home region {home!r} is not a label of the scheme")
        self.home = home

    def __reduce__(self):
        return (HomeMismatch, (self.home,))


class NoStateForYear(CareerTraceError):
    def __init__(self, author_id: str, year: int):
        super().__init__(f"author {author_id!r} has no mobility state in {year}")
        self.author_id = author_id
        self.year = year

    def __reduce__(self):
        return (NoStateForYear, (self.author_id, self.year))


class BeforeCareer(CareerTraceError):
    def __init__(self, author_id: str, year: int, first_year: int):
        super().__init__(f"{year} precedes first publication year {first_year} of {author_id!r}")
        self.author_id = author_id
        self.year = year
        self.first_year = first_year

    def __reduce__(self):
        return (BeforeCareer, (self.author_id, self.year, self.first_year))


class UndefinedRatio(CareerTraceError):
    """Both sides of a stock ratio are zero."""


class EmptyReference(CareerTraceError):
    """The reference population of a share has zero weight."""


class MissingCohort(CareerTraceError):
    def __init__(self, field: str, year: int, doc_type: str):
        super().__init__(f"no citation baseline for cohort ({field}, {year}, {doc_type})")
        self.cohort = (field, year, doc_type)

    def __reduce__(self):
        return (MissingCohort, self.cohort)


class InvalidConfig(CareerTraceError):
    """A scenario or run configuration failed validation."""

    def __init__(self, problems: list[str] | str):
        if isinstance(problems, str):
            problems = [problems]
        super().__init__("; ".join(problems))
        self.problems = problems

    def __reduce__(self):
        return (InvalidConfig, (self.problems,))
