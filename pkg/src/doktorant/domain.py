"""Pure domain model for doctoral-candidate dossiers.

Everything in this module is an immutable value or a pure function: the
candidate lifecycle state machine, calendar/term arithmetic, academic-year
bucketing and whole-record validation. No storage, no transport, no clocks.
"""

from __future__ import annotations

import calendar
import re
from dataclasses import dataclass
from datetime import date
from decimal import Decimal, InvalidOperation
from enum import Enum
from typing import Optional, Union

from .errors import BadAcademicYear, InvalidTerm, InvalidTransition

DoctorantId = str
SupervisorId = str
CompetitionId = str

GRADE_MIN = Decimal("2.00")
GRADE_MAX = Decimal("6.00")
DEFAULT_PASSING_THRESHOLD = Decimal("4.50")

# Academic years run 1 October through 30 September.
ACADEMIC_YEAR_START_MONTH = 10


class LifecycleStatus(str, Enum):
    APPLIED = "Applied"
    ENROLLED = "Enrolled"
    DISMISSED_WITH_RIGHT = "DismissedWithRight"
    DISMISSED_WITHOUT_RIGHT = "DismissedWithoutRight"
    DEFENDED = "Defended"


class DoctorateForm(str, Enum):
    FULL_TIME = "FullTime"
    PART_TIME = "PartTime"
    INDEPENDENT = "Independent"


class ActivityKind(str, Enum):
    CONFERENCE = "Conference"
    PROJECT = "Project"
    SPECIALIZATION = "Specialization"
    PUBLICATION = "Publication"
    TEACHING = "Teaching"


class DefenseOutcome(str, Enum):
    SUCCESSFUL = "Successful"
    UNSUCCESSFUL = "Unsuccessful"


class CompetitionState(str, Enum):
    OPEN = "Open"
    CLOSED = "Closed"


_ACADEMIC_YEAR_RE = re.compile(r"^(\d{4})/(\d{4})$")


@dataclass(frozen=True, order=True)
class AcademicYear:
    """A reporting year labelled ``YYYY/YYYY+1``, starting 1 October."""

    start_year: int

    @property
    def label(self) -> str:
        return f"{self.start_year}/{self.start_year + 1}"

    @classmethod
    def parse(cls, label: str) -> "AcademicYear":
        m = _ACADEMIC_YEAR_RE.match(label)
        if not m:
            raise BadAcademicYear(f"expected YYYY/YYYY, got {label!r}")
        first, second = int(m.group(1)), int(m.group(2))
        if second != first + 1:
            raise BadAcademicYear(f"years must be consecutive, got {label!r}")
        return cls(first)

    @property
    def first_day(self) -> date:
        return date(self.start_year, ACADEMIC_YEAR_START_MONTH, 1)

    @property
    def last_day(self) -> date:
        return date(self.start_year + 1, ACADEMIC_YEAR_START_MONTH - 1, 30)

    def contains(self, d: date) -> bool:
        return self.first_day <= d <= self.last_day

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class EnrollmentRecord:
    form: DoctorateForm
    enrollment_date: date
    term_months: int
    basis: str


@dataclass(frozen=True)
class DismissalRecord:
    date: date
    right_of_defense: bool
    note: Optional[str] = None


@dataclass(frozen=True)
class DefenseRecord:
    date: date
    outcome: DefenseOutcome
    note: Optional[str] = None


@dataclass(frozen=True)
class TopicVersion:
    seq_no: int
    title: str
    effective_date: date


@dataclass(frozen=True)
class Supervision:
    supervisor_id: SupervisorId
    start_date: date
    end_date: Optional[date] = None

    @property
    def is_open(self) -> bool:
        return self.end_date is None


@dataclass(frozen=True)
class Supervisor:
    id: SupervisorId
    family_name: str
    given_name: str
    habilitated: bool
    academic_title: Optional[str] = None
    department: Optional[str] = None


@dataclass(frozen=True)
class ExamRecord:
    subject: str
    date: date
    grade: Decimal

    def passes(self, threshold: Decimal = DEFAULT_PASSING_THRESHOLD) -> bool:
        return self.grade >= threshold


@dataclass(frozen=True)
class ActivityRecord:
    academic_year: AcademicYear
    kind: ActivityKind
    description: str
    detail: Optional[str] = None


@dataclass(frozen=True)
class DocumentRecord:
    kind: str
    date: date
    note: Optional[str] = None


@dataclass(frozen=True)
class Competition:
    id: CompetitionId
    announced_on: date
    speciality: str
    form: DoctorateForm
    deadline: date
    state: CompetitionState = CompetitionState.OPEN


@dataclass(frozen=True)
class Doctorant:
    """The full dossier of one candidate. Histories are append-only tuples."""

    id: DoctorantId
    family_name: str
    given_name: str
    national_id: Optional[str] = None
    contact: Optional[str] = None
    status: LifecycleStatus = LifecycleStatus.APPLIED
    competition: Optional[CompetitionId] = None
    enrollment: Optional[EnrollmentRecord] = None
    dismissal: Optional[DismissalRecord] = None
    defense: Optional[DefenseRecord] = None
    topics: tuple[TopicVersion, ...] = ()
    supervisions: tuple[Supervision, ...] = ()
    exams: tuple[ExamRecord, ...] = ()
    activities: tuple[ActivityRecord, ...] = ()
    documents: tuple[DocumentRecord, ...] = ()

    def current_topic(self) -> Optional[TopicVersion]:
        return self.topics[-1] if self.topics else None

    def open_supervisions(self) -> tuple[Supervision, ...]:
        return tuple(s for s in self.supervisions if s.is_open)


# -- lifecycle events ---------------------------------------------------------

@dataclass(frozen=True)
class Enroll:
    record: EnrollmentRecord


@dataclass(frozen=True)
class Dismiss:
    record: DismissalRecord


@dataclass(frozen=True)
class Defend:
    record: DefenseRecord


LifecycleEvent = Union[Enroll, Dismiss, Defend]


def event_name(event: LifecycleEvent) -> str:
    return type(event).__name__


def lifecycle_transition(status: LifecycleStatus, event: LifecycleEvent) -> LifecycleStatus:
    """Return the successor status, or raise InvalidTransition.

    The admissible moves:

      Applied            + Enroll               -> Enrolled
      Enrolled           + Dismiss(right=True)  -> DismissedWithRight
      Enrolled           + Dismiss(right=False) -> DismissedWithoutRight
      Enrolled           + Defend               -> Defended
      DismissedWithRight + Defend               -> Defended

    Every other status/event pair is rejected. Pure function: no payload
    validation happens here beyond the right-of-defense flag.
    """
    if isinstance(event, Enroll) and status is LifecycleStatus.APPLIED:
        return LifecycleStatus.ENROLLED
    if isinstance(event, Dismiss) and status is LifecycleStatus.ENROLLED:
        if event.record.right_of_defense:
            return LifecycleStatus.DISMISSED_WITH_RIGHT
        return LifecycleStatus.DISMISSED_WITHOUT_RIGHT
    if isinstance(event, Defend) and status in (
        LifecycleStatus.ENROLLED,
        LifecycleStatus.DISMISSED_WITH_RIGHT,
    ):
        return LifecycleStatus.DEFENDED
    raise InvalidTransition(status.value, event_name(event))


def planned_end_date(enrollment_date: date, term_months: int) -> date:
    """Calendar-month addition; clamps to the target month's last day."""
    if term_months <= 0:
        raise InvalidTerm(f"term_months must be positive, got {term_months}")
    month_index = enrollment_date.year * 12 + (enrollment_date.month - 1) + term_months
    year, month = divmod(month_index, 12)
    month += 1
    day = min(enrollment_date.day, calendar.monthrange(year, month)[1])
    return date(year, month, day)


def academic_year_of(d: date) -> AcademicYear:
    """Map a date to its academic year (1 Oct of Y through 30 Sep of Y+1)."""
    if d.month >= ACADEMIC_YEAR_START_MONTH:
        return AcademicYear(d.year)
    return AcademicYear(d.year - 1)


# -- dossier validation -------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    """One violated invariant: a stable code plus the offending field path."""

    code: str
    path: str

    def __str__(self) -> str:
        return f"{self.code} at {self.path}"


_ENROLLED_OR_LATER = (
    LifecycleStatus.ENROLLED,
    LifecycleStatus.DISMISSED_WITH_RIGHT,
    LifecycleStatus.DISMISSED_WITHOUT_RIGHT,
    LifecycleStatus.DEFENDED,
)


def validate_doctorant(d: Doctorant) -> list[Violation]:
    """Check every dossier invariant; the empty list means the record is sound.

    Violations are data, not exceptions: callers (the integrity checker, the
    registry fuzz suite) want the complete list, not the first failure.
    """
    found: list[Violation] = []

    if not d.family_name.strip():
        found.append(Violation("EMPTY_NAME", "family_name"))
    if not d.given_name.strip():
        found.append(Violation("EMPTY_NAME", "given_name"))

    if d.status is LifecycleStatus.APPLIED:
        if d.enrollment is not None:
            found.append(Violation("UNEXPECTED_ENROLLMENT", "enrollment"))
        if d.dismissal is not None:
            found.append(Violation("UNEXPECTED_DISMISSAL", "dismissal"))
        if d.defense is not None:
            found.append(Violation("UNEXPECTED_DEFENSE", "defense"))

    if d.status in _ENROLLED_OR_LATER and d.enrollment is None:
        found.append(Violation("MISSING_ENROLLMENT", "enrollment"))

    if d.status in (
        LifecycleStatus.DISMISSED_WITH_RIGHT,
        LifecycleStatus.DISMISSED_WITHOUT_RIGHT,
    ):
        if d.dismissal is None:
            found.append(Violation("MISSING_DISMISSAL", "dismissal"))
        elif d.enrollment is not None and d.dismissal.date < d.enrollment.enrollment_date:
            found.append(Violation("DISMISSAL_BEFORE_ENROLLMENT", "dismissal.date"))

    if d.status is LifecycleStatus.DEFENDED:
        if d.defense is None:
            found.append(Violation("MISSING_DEFENSE", "defense"))
        elif d.enrollment is not None and d.defense.date < d.enrollment.enrollment_date:
            found.append(Violation("DEFENSE_BEFORE_ENROLLMENT", "defense.date"))

    if d.enrollment is not None and d.enrollment.term_months <= 0:
        found.append(Violation("INVALID_TERM", "enrollment.term_months"))

    if d.status in _ENROLLED_OR_LATER and not d.topics:
        found.append(Violation("NO_TOPICS", "topics"))
    for i, topic in enumerate(d.topics):
        if topic.seq_no != i + 1:
            found.append(Violation("TOPIC_SEQUENCE_GAP", f"topics[{i}].seq_no"))
        if not topic.title.strip():
            found.append(Violation("EMPTY_TOPIC_TITLE", f"topics[{i}].title"))
        if i > 0 and topic.effective_date < d.topics[i - 1].effective_date:
            found.append(Violation("TOPIC_DATES_NOT_MONOTONE", f"topics[{i}].effective_date"))

    open_by_supervisor: set[SupervisorId] = set()
    for i, sup in enumerate(d.supervisions):
        if sup.end_date is not None and sup.end_date < sup.start_date:
            found.append(Violation("SUPERVISION_END_BEFORE_START", f"supervisions[{i}].end_date"))
        if sup.is_open:
            if sup.supervisor_id in open_by_supervisor:
                found.append(Violation("DUPLICATE_OPEN_SUPERVISION", f"supervisions[{i}]"))
            open_by_supervisor.add(sup.supervisor_id)

    for i, exam in enumerate(d.exams):
        if not exam.subject.strip():
            found.append(Violation("EMPTY_EXAM_SUBJECT", f"exams[{i}].subject"))
        if not (GRADE_MIN <= exam.grade <= GRADE_MAX):
            found.append(Violation("GRADE_OUT_OF_RANGE", f"exams[{i}].grade"))

    for i, act in enumerate(d.activities):
        if not act.description.strip():
            found.append(Violation("EMPTY_ACTIVITY_DESCRIPTION", f"activities[{i}].description"))

    for i, doc in enumerate(d.documents):
        if not doc.kind.strip():
            found.append(Violation("EMPTY_DOCUMENT_KIND", f"documents[{i}].kind"))

    return found


def parse_grade(value: Union[str, int, float, Decimal]) -> Decimal:
    """Normalize a grade to two fractional digits; range is checked by callers.

    Accepts strings and JSON numbers; rejects values carrying more than two
    fractional digits so that "5.505" cannot silently round to a pass.
    """
    try:
        grade = Decimal(str(value))
    except InvalidOperation:
        raise ValueError(f"not a decimal grade: {value!r}") from None
    if -grade.as_tuple().exponent > 2:
        raise ValueError(f"grade has more than two fractional digits: {value!r}")
    return grade.quantize(Decimal("0.01"))
