"""Error types shared by the registry, persistence and service layers.

Every rejection carries a stable machine-readable ``code`` (the class name)
so that journal tooling, the HTTP facade and the CLI agree on one vocabulary.
A raised command error guarantees the store value passed in was not touched.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for every command rejection."""

    @property
    def code(self) -> str:
        return type(self).__name__

    def __str__(self) -> str:
        detail = super().__str__()
        return detail if detail else self.code


# -- validation / precondition failures --------------------------------------

class EmptyName(DomainError):
    pass


class EmptyTopic(DomainError):
    pass


class EmptyDescription(DomainError):
    pass


class EmptySpeciality(DomainError):
    pass


class EmptyKind(DomainError):
    pass


class InvalidTerm(DomainError):
    pass


class BadAcademicYear(DomainError):
    pass


class GradeOutOfRange(DomainError):
    pass


class DateBeforeEnrollment(DomainError):
    pass


class DateBeforeStart(DomainError):
    pass


class NonMonotoneDate(DomainError):
    pass


class DeadlineBeforeAnnouncement(DomainError):
    pass


class NotEnrolled(DomainError):
    pass


class NotHabilitated(DomainError):
    pass


class NoOpenSupervision(DomainError):
    pass


class MalformedPayload(DomainError):
    """A command payload does not match the command's parameter schema."""


# -- unknown entities ---------------------------------------------------------

class UnknownDoctorant(DomainError):
    pass


class UnknownSupervisor(DomainError):
    pass


class UnknownCompetition(DomainError):
    pass


class UnknownCommand(DomainError):
    pass


# -- state conflicts ----------------------------------------------------------

class InvalidTransition(DomainError):
    def __init__(self, from_status: str, event: str):
        super().__init__(f"no transition from {from_status} on {event}")
        self.from_status = from_status
        self.event = event


class DuplicateOpenSupervision(DomainError):
    pass


class AlreadyClosed(DomainError):
    pass


class CompetitionClosed(DomainError):
    pass


class SequenceConflict(DomainError):
    pass


# -- persistence failures -----------------------------------------------------

class PersistenceError(DomainError):
    pass


class CorruptJournal(PersistenceError):
    def __init__(self, line_no: int, reason: str = ""):
        super().__init__(f"journal line {line_no}: {reason or 'unreadable entry'}")
        self.line_no = line_no


class CorruptSnapshot(PersistenceError):
    pass


class VersionMismatch(PersistenceError):
    def __init__(self, found: int, supported: int):
        super().__init__(f"snapshot format_version {found}, supported {supported}")
        self.found = found
        self.supported = supported


class IoFailure(PersistenceError):
    pass


class LockHeld(PersistenceError):
    pass
