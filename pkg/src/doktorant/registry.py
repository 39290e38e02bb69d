"""Command handlers over the registry store.

The store is an immutable value; every command is a pure function taking a
store and returning a new one (plus the affected entity id), or raising a
DomainError and leaving the caller's store untouched. That makes per-command
atomicity free and lets the persistence layer replay commands verbatim.

Commands are also addressable by name + JSON-able payload (`apply_command`),
which is the exact shape journalled by the persistence layer and posted by
the HTTP facade.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import date
from decimal import Decimal
from typing import Any, Callable, Optional, Union

from . import domain
from .domain import (
    AcademicYear,
    ActivityKind,
    ActivityRecord,
    Competition,
    CompetitionId,
    CompetitionState,
    DefenseOutcome,
    DefenseRecord,
    Defend,
    Dismiss,
    DismissalRecord,
    Doctorant,
    DoctorantId,
    DoctorateForm,
    DocumentRecord,
    Enroll,
    EnrollmentRecord,
    ExamRecord,
    LifecycleStatus,
    Supervision,
    Supervisor,
    SupervisorId,
    TopicVersion,
    Violation,
    lifecycle_transition,
)
from .errors import (
    AlreadyClosed,
    CompetitionClosed,
    DateBeforeEnrollment,
    DateBeforeStart,
    DeadlineBeforeAnnouncement,
    DuplicateOpenSupervision,
    EmptyDescription,
    EmptyKind,
    EmptyName,
    EmptySpeciality,
    EmptyTopic,
    GradeOutOfRange,
    InvalidTerm,
    MalformedPayload,
    NonMonotoneDate,
    NoOpenSupervision,
    NotEnrolled,
    NotHabilitated,
    UnknownCommand,
    UnknownCompetition,
    UnknownDoctorant,
    UnknownSupervisor,
)


@dataclass(frozen=True)
class Store:
    """All registry state. Maps are treated as immutable: copy on write."""

    doctorants: dict[DoctorantId, Doctorant] = field(default_factory=dict)
    supervisors: dict[SupervisorId, Supervisor] = field(default_factory=dict)
    competitions: dict[CompetitionId, Competition] = field(default_factory=dict)
    next_event_seq: int = 1


def empty_store() -> Store:
    return Store()


@dataclass(frozen=True)
class DoctorantFilter:
    """All fields optional; an empty filter matches every dossier."""

    status: Optional[LifecycleStatus] = None
    form: Optional[DoctorateForm] = None
    academic_year: Optional[AcademicYear] = None
    supervisor_id: Optional[SupervisorId] = None
    name: Optional[str] = None


@dataclass(frozen=True)
class CommandOutcome:
    store: Store
    entity: str          # "doctorant" | "supervisor" | "competition"
    entity_id: str


# -- internal helpers ---------------------------------------------------------

def _new_id(prefix: str, count: int) -> str:
    # Zero-padded so ids sort lexicographically in creation order; nothing is
    # ever deleted, so count+1 is fresh forever.
    return f"{prefix}{count + 1:08d}"


def _get_doctorant(store: Store, doctorant_id: DoctorantId) -> Doctorant:
    try:
        return store.doctorants[doctorant_id]
    except KeyError:
        raise UnknownDoctorant(doctorant_id) from None


def _put_doctorant(store: Store, d: Doctorant) -> Store:
    return replace(
        store,
        doctorants={**store.doctorants, d.id: d},
        next_event_seq=store.next_event_seq + 1,
    )


def _require_name(family_name: str, given_name: str) -> None:
    if not family_name.strip() or not given_name.strip():
        raise EmptyName("family_name and given_name must be non-empty")


# -- commands -----------------------------------------------------------------

def register_doctorant(
    store: Store,
    family_name: str,
    given_name: str,
    national_id: Optional[str] = None,
    competition_id: Optional[CompetitionId] = None,
) -> tuple[Store, DoctorantId]:
    """Open a new dossier in status Applied with empty histories."""
    _require_name(family_name, given_name)
    if competition_id is not None:
        competition = store.competitions.get(competition_id)
        if competition is None:
            raise UnknownCompetition(competition_id)
        if competition.state is not CompetitionState.OPEN:
            raise CompetitionClosed(competition_id)
    new_id = _new_id("D", len(store.doctorants))
    dossier = Doctorant(
        id=new_id,
        family_name=family_name,
        given_name=given_name,
        national_id=national_id,
        competition=competition_id,
    )
    return _put_doctorant(store, dossier), new_id


def enroll(
    store: Store,
    doctorant_id: DoctorantId,
    form: DoctorateForm,
    enrollment_date: date,
    term_months: int,
    basis: str,
    initial_topic_title: str,
) -> Store:
    """Admit an Applied candidate; opens the topic history at seq 1."""
    dossier = _get_doctorant(store, doctorant_id)
    if term_months <= 0:
        raise InvalidTerm(f"term_months must be positive, got {term_months}")
    if not initial_topic_title.strip():
        raise EmptyTopic("initial_topic_title must be non-empty")
    record = EnrollmentRecord(form, enrollment_date, term_months, basis)
    new_status = lifecycle_transition(dossier.status, Enroll(record))
    updated = replace(
        dossier,
        status=new_status,
        enrollment=record,
        topics=(TopicVersion(1, initial_topic_title, enrollment_date),),
    )
    return _put_doctorant(store, updated)


def dismiss(
    store: Store,
    doctorant_id: DoctorantId,
    dismissal_date: date,
    right_of_defense: bool,
    note: Optional[str] = None,
) -> Store:
    dossier = _get_doctorant(store, doctorant_id)
    record = DismissalRecord(dismissal_date, right_of_defense, note)
    new_status = lifecycle_transition(dossier.status, Dismiss(record))
    assert dossier.enrollment is not None  # guaranteed: only Enrolled passes
    if dismissal_date < dossier.enrollment.enrollment_date:
        raise DateBeforeEnrollment(
            f"{dismissal_date} precedes enrollment {dossier.enrollment.enrollment_date}"
        )
    return _put_doctorant(store, replace(dossier, status=new_status, dismissal=record))


def record_defense(
    store: Store,
    doctorant_id: DoctorantId,
    defense_date: date,
    outcome: DefenseOutcome,
    note: Optional[str] = None,
) -> Store:
    """Record a defense attempt; only a successful one reaches Defended."""
    dossier = _get_doctorant(store, doctorant_id)
    record = DefenseRecord(defense_date, outcome, note)
    new_status = lifecycle_transition(dossier.status, Defend(record))
    assert dossier.enrollment is not None
    if defense_date < dossier.enrollment.enrollment_date:
        raise DateBeforeEnrollment(
            f"{defense_date} precedes enrollment {dossier.enrollment.enrollment_date}"
        )
    if outcome is DefenseOutcome.SUCCESSFUL:
        updated = replace(dossier, status=new_status, defense=record)
    else:
        updated = replace(dossier, defense=record)
    return _put_doctorant(store, updated)


def change_topic(
    store: Store,
    doctorant_id: DoctorantId,
    new_title: str,
    effective_date: date,
) -> Store:
    """Append a topic version; prior versions are never touched."""
    dossier = _get_doctorant(store, doctorant_id)
    if dossier.status not in (
        LifecycleStatus.ENROLLED,
        LifecycleStatus.DISMISSED_WITH_RIGHT,
    ):
        raise NotEnrolled(f"{doctorant_id} is {dossier.status.value}")
    if not new_title.strip():
        raise EmptyTopic("new_title must be non-empty")
    last = dossier.topics[-1]
    if effective_date < last.effective_date:
        raise NonMonotoneDate(f"{effective_date} precedes current version date {last.effective_date}")
    version = TopicVersion(last.seq_no + 1, new_title, effective_date)
    return _put_doctorant(store, replace(dossier, topics=dossier.topics + (version,)))


def assign_supervisor(
    store: Store,
    doctorant_id: DoctorantId,
    supervisor_id: SupervisorId,
    start_date: date,
) -> Store:
    """Open a supervision; several supervisors may be open concurrently."""
    dossier = _get_doctorant(store, doctorant_id)
    supervisor = store.supervisors.get(supervisor_id)
    if supervisor is None:
        raise UnknownSupervisor(supervisor_id)
    if not supervisor.habilitated:
        raise NotHabilitated(supervisor_id)
    if any(s.supervisor_id == supervisor_id and s.is_open for s in dossier.supervisions):
        raise DuplicateOpenSupervision(f"{supervisor_id} already supervises {doctorant_id}")
    link = Supervision(supervisor_id, start_date)
    return _put_doctorant(store, replace(dossier, supervisions=dossier.supervisions + (link,)))


def end_supervision(
    store: Store,
    doctorant_id: DoctorantId,
    supervisor_id: SupervisorId,
    end_date: date,
) -> Store:
    """Close the open supervision; the record stays in the history."""
    dossier = _get_doctorant(store, doctorant_id)
    index = next(
        (
            i
            for i, s in enumerate(dossier.supervisions)
            if s.supervisor_id == supervisor_id and s.is_open
        ),
        None,
    )
    if index is None:
        raise NoOpenSupervision(f"{supervisor_id} has no open supervision of {doctorant_id}")
    supervision = dossier.supervisions[index]
    if end_date < supervision.start_date:
        raise DateBeforeStart(f"{end_date} precedes start {supervision.start_date}")
    closed = replace(supervision, end_date=end_date)
    supervisions = (
        dossier.supervisions[:index] + (closed,) + dossier.supervisions[index + 1 :]
    )
    return _put_doctorant(store, replace(dossier, supervisions=supervisions))


def record_exam(
    store: Store,
    doctorant_id: DoctorantId,
    subject: str,
    exam_date: date,
    grade: Decimal,
) -> Store:
    dossier = _get_doctorant(store, doctorant_id)
    if dossier.status is LifecycleStatus.APPLIED:
        raise NotEnrolled(f"{doctorant_id} is Applied")
    if not subject.strip():
        raise MalformedPayload("subject must be non-empty")
    if not (domain.GRADE_MIN <= grade <= domain.GRADE_MAX):
        raise GradeOutOfRange(f"grade {grade} outside [{domain.GRADE_MIN}, {domain.GRADE_MAX}]")
    exam = ExamRecord(subject, exam_date, grade)
    return _put_doctorant(store, replace(dossier, exams=dossier.exams + (exam,)))


def add_activity(
    store: Store,
    doctorant_id: DoctorantId,
    academic_year: Union[AcademicYear, str],
    kind: ActivityKind,
    description: str,
    detail: Optional[str] = None,
) -> Store:
    dossier = _get_doctorant(store, doctorant_id)
    if dossier.status is LifecycleStatus.APPLIED:
        raise NotEnrolled(f"{doctorant_id} is Applied")
    if isinstance(academic_year, str):
        academic_year = AcademicYear.parse(academic_year)
    if not description.strip():
        raise EmptyDescription("description must be non-empty")
    activity = ActivityRecord(academic_year, kind, description, detail)
    return _put_doctorant(store, replace(dossier, activities=dossier.activities + (activity,)))


def register_supervisor(
    store: Store,
    family_name: str,
    given_name: str,
    habilitated: bool,
    academic_title: Optional[str] = None,
    department: Optional[str] = None,
) -> tuple[Store, SupervisorId]:
    """Store a supervisor; habilitation is gated at assignment, not here."""
    _require_name(family_name, given_name)
    new_id = _new_id("S", len(store.supervisors))
    supervisor = Supervisor(new_id, family_name, given_name, habilitated, academic_title, department)
    updated = replace(
        store,
        supervisors={**store.supervisors, new_id: supervisor},
        next_event_seq=store.next_event_seq + 1,
    )
    return updated, new_id


def create_competition(
    store: Store,
    announced_on: date,
    speciality: str,
    form: DoctorateForm,
    deadline: date,
) -> tuple[Store, CompetitionId]:
    if not speciality.strip():
        raise EmptySpeciality()
    if deadline < announced_on:
        raise DeadlineBeforeAnnouncement(f"deadline {deadline} precedes {announced_on}")
    new_id = _new_id("K", len(store.competitions))
    competition = Competition(new_id, announced_on, speciality, form, deadline)
    updated = replace(
        store,
        competitions={**store.competitions, new_id: competition},
        next_event_seq=store.next_event_seq + 1,
    )
    return updated, new_id


def close_competition(store: Store, competition_id: CompetitionId) -> Store:
    competition = store.competitions.get(competition_id)
    if competition is None:
        raise UnknownCompetition(competition_id)
    if competition.state is CompetitionState.CLOSED:
        raise AlreadyClosed(competition_id)
    closed = replace(competition, state=CompetitionState.CLOSED)
    return replace(
        store,
        competitions={**store.competitions, competition_id: closed},
        next_event_seq=store.next_event_seq + 1,
    )


def attach_document(
    store: Store,
    doctorant_id: DoctorantId,
    kind: str,
    document_date: date,
    note: Optional[str] = None,
) -> Store:
    dossier = _get_doctorant(store, doctorant_id)
    if not kind.strip():
        raise EmptyKind("document kind must be non-empty")
    document = DocumentRecord(kind, document_date, note)
    return _put_doctorant(store, replace(dossier, documents=dossier.documents + (document,)))


# -- read side ----------------------------------------------------------------

def query_doctorants(store: Store, filter: DoctorantFilter = DoctorantFilter()) -> list[Doctorant]:
    """All dossiers matching every present filter field, deterministically ordered."""

    def matches(d: Doctorant) -> bool:
        if filter.status is not None and d.status is not filter.status:
            return False
        if filter.form is not None:
            if d.enrollment is None or d.enrollment.form is not filter.form:
                return False
        if filter.academic_year is not None:
            if d.enrollment is None:
                return False
            if domain.academic_year_of(d.enrollment.enrollment_date) != filter.academic_year:
                return False
        if filter.supervisor_id is not None:
            if not any(s.supervisor_id == filter.supervisor_id for s in d.supervisions):
                return False
        if filter.name is not None:
            needle = filter.name.casefold()
            if needle not in d.family_name.casefold() and needle not in d.given_name.casefold():
                return False
        return True

    hits = [d for d in store.doctorants.values() if matches(d)]
    hits.sort(key=lambda d: (d.family_name, d.given_name, d.id))
    return hits


def referential_integrity(store: Store) -> list[Violation]:
    """Dangling supervisor/competition references across the whole store."""
    found: list[Violation] = []
    for d in store.doctorants.values():
        if d.competition is not None and d.competition not in store.competitions:
            found.append(Violation("UNRESOLVED_COMPETITION", f"doctorants[{d.id}].competition"))
        for i, s in enumerate(d.supervisions):
            if s.supervisor_id not in store.supervisors:
                found.append(
                    Violation("UNRESOLVED_SUPERVISOR", f"doctorants[{d.id}].supervisions[{i}]")
                )
    return found


# -- command payload codec ----------------------------------------------------
#
# Each command is addressable as (name, payload) where the payload is a flat
# JSON object mirroring the parameters above. This is the single wire shape
# used by the journal and the HTTP facade, so parsing lives here, next to the
# handlers, and stays strict: unknown or missing keys are rejected.

_F = tuple[str, str, bool]  # (key, kind, required)

_SCHEMAS: dict[str, tuple[_F, ...]] = {
    "register_doctorant": (
        ("family_name", "str", True),
        ("given_name", "str", True),
        ("national_id", "opt_str", False),
        ("competition_id", "opt_str", False),
    ),
    "enroll": (
        ("id", "str", True),
        ("form", "form", True),
        ("enrollment_date", "date", True),
        ("term_months", "int", True),
        ("basis", "str", True),
        ("initial_topic_title", "str", True),
    ),
    "dismiss": (
        ("id", "str", True),
        ("date", "date", True),
        ("right_of_defense", "bool", True),
        ("note", "opt_str", False),
    ),
    "record_defense": (
        ("id", "str", True),
        ("date", "date", True),
        ("outcome", "outcome", True),
        ("note", "opt_str", False),
    ),
    "change_topic": (
        ("id", "str", True),
        ("new_title", "str", True),
        ("effective_date", "date", True),
    ),
    "assign_supervisor": (
        ("doctorant_id", "str", True),
        ("supervisor_id", "str", True),
        ("start_date", "date", True),
    ),
    "end_supervision": (
        ("doctorant_id", "str", True),
        ("supervisor_id", "str", True),
        ("end_date", "date", True),
    ),
    "record_exam": (
        ("id", "str", True),
        ("subject", "str", True),
        ("date", "date", True),
        ("grade", "grade", True),
    ),
    "add_activity": (
        ("id", "str", True),
        ("academic_year", "year", True),
        ("kind", "activity_kind", True),
        ("description", "str", True),
        ("detail", "opt_str", False),
    ),
    "register_supervisor": (
        ("family_name", "str", True),
        ("given_name", "str", True),
        ("habilitated", "bool", True),
        ("academic_title", "opt_str", False),
        ("department", "opt_str", False),
    ),
    "create_competition": (
        ("announced_on", "date", True),
        ("speciality", "str", True),
        ("form", "form", True),
        ("deadline", "date", True),
    ),
    "close_competition": (("competition_id", "str", True),),
    "attach_document": (
        ("id", "str", True),
        ("kind", "str", True),
        ("date", "date", True),
        ("note", "opt_str", False),
    ),
}

COMMAND_NAMES = tuple(_SCHEMAS)


def _parse_value(key: str, kind: str, value: Any) -> Any:
    if kind == "str":
        if not isinstance(value, str):
            raise MalformedPayload(f"{key}: expected string")
        return value
    if kind == "opt_str":
        if value is None:
            return None
        if not isinstance(value, str):
            raise MalformedPayload(f"{key}: expected string or null")
        return value
    if kind == "int":
        if not isinstance(value, int) or isinstance(value, bool):
            raise MalformedPayload(f"{key}: expected integer")
        return value
    if kind == "bool":
        if not isinstance(value, bool):
            raise MalformedPayload(f"{key}: expected boolean")
        return value
    if kind == "date":
        if not isinstance(value, str):
            raise MalformedPayload(f"{key}: expected ISO date string")
        try:
            return date.fromisoformat(value)
        except ValueError:
            raise MalformedPayload(f"{key}: not an ISO date: {value!r}") from None
    if kind == "grade":
        if not isinstance(value, (str, int, float)) or isinstance(value, bool):
            raise MalformedPayload(f"{key}: expected decimal grade")
        try:
            return domain.parse_grade(value)
        except ValueError as exc:
            raise GradeOutOfRange(str(exc)) from None
    if kind == "form":
        return _parse_enum(key, DoctorateForm, value)
    if kind == "outcome":
        return _parse_enum(key, DefenseOutcome, value)
    if kind == "activity_kind":
        return _parse_enum(key, ActivityKind, value)
    if kind == "year":
        if not isinstance(value, str):
            raise MalformedPayload(f"{key}: expected YYYY/YYYY string")
        return AcademicYear.parse(value)
    raise AssertionError(f"unhandled field kind {kind}")


def _parse_enum(key: str, enum_cls: type, value: Any) -> Any:
    try:
        return enum_cls(value)
    except ValueError:
        expected = ", ".join(m.value for m in enum_cls)
        raise MalformedPayload(f"{key}: expected one of {expected}, got {value!r}") from None


def parse_payload(cmd: str, payload: dict[str, Any]) -> dict[str, Any]:
    """Validate and type a raw JSON payload into keyword arguments."""
    schema = _SCHEMAS.get(cmd)
    if schema is None:
        raise UnknownCommand(cmd)
    if not isinstance(payload, dict):
        raise MalformedPayload("payload must be an object")
    known = {key for key, _, _ in schema}
    for key in payload:
        if key not in known:
            raise MalformedPayload(f"unexpected key {key!r} for {cmd}")
    kwargs: dict[str, Any] = {}
    for key, kind, required in schema:
        if key not in payload or payload[key] is None:
            if required:
                raise MalformedPayload(f"{cmd}: missing {key!r}")
            kwargs[key] = None
        else:
            kwargs[key] = _parse_value(key, kind, payload[key])
    return kwargs


def dump_payload(cmd: str, kwargs: dict[str, Any]) -> dict[str, Any]:
    """Serialize typed keyword arguments back to the canonical JSON payload."""
    schema = _SCHEMAS.get(cmd)
    if schema is None:
        raise UnknownCommand(cmd)
    payload: dict[str, Any] = {}
    for key, kind, _ in schema:
        value = kwargs[key]
        if value is None:
            payload[key] = None
        elif kind == "date":
            payload[key] = value.isoformat()
        elif kind == "grade":
            payload[key] = str(value)
        elif kind == "year":
            payload[key] = value.label
        elif kind in ("form", "outcome", "activity_kind"):
            payload[key] = value.value
        else:
            payload[key] = value
    return payload


def canonical_payload(cmd: str, payload: dict[str, Any]) -> dict[str, Any]:
    """Normalize a raw payload: parse then re-dump, all keys present."""
    return dump_payload(cmd, parse_payload(cmd, payload))


def _apply_register_doctorant(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated, new_id = register_doctorant(
        store, a["family_name"], a["given_name"], a["national_id"], a["competition_id"]
    )
    return CommandOutcome(updated, "doctorant", new_id)


def _apply_enroll(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated = enroll(
        store, a["id"], a["form"], a["enrollment_date"], a["term_months"],
        a["basis"], a["initial_topic_title"],
    )
    return CommandOutcome(updated, "doctorant", a["id"])


def _apply_dismiss(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated = dismiss(store, a["id"], a["date"], a["right_of_defense"], a["note"])
    return CommandOutcome(updated, "doctorant", a["id"])


def _apply_record_defense(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated = record_defense(store, a["id"], a["date"], a["outcome"], a["note"])
    return CommandOutcome(updated, "doctorant", a["id"])


def _apply_change_topic(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated = change_topic(store, a["id"], a["new_title"], a["effective_date"])
    return CommandOutcome(updated, "doctorant", a["id"])


def _apply_assign_supervisor(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated = assign_supervisor(store, a["doctorant_id"], a["supervisor_id"], a["start_date"])
    return CommandOutcome(updated, "doctorant", a["doctorant_id"])


def _apply_end_supervision(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated = end_supervision(store, a["doctorant_id"], a["supervisor_id"], a["end_date"])
    return CommandOutcome(updated, "doctorant", a["doctorant_id"])


def _apply_record_exam(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated = record_exam(store, a["id"], a["subject"], a["date"], a["grade"])
    return CommandOutcome(updated, "doctorant", a["id"])


def _apply_add_activity(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated = add_activity(
        store, a["id"], a["academic_year"], a["kind"], a["description"], a["detail"]
    )
    return CommandOutcome(updated, "doctorant", a["id"])


def _apply_register_supervisor(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated, new_id = register_supervisor(
        store, a["family_name"], a["given_name"], a["habilitated"],
        a["academic_title"], a["department"],
    )
    return CommandOutcome(updated, "supervisor", new_id)


def _apply_create_competition(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated, new_id = create_competition(
        store, a["announced_on"], a["speciality"], a["form"], a["deadline"]
    )
    return CommandOutcome(updated, "competition", new_id)


def _apply_close_competition(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated = close_competition(store, a["competition_id"])
    return CommandOutcome(updated, "competition", a["competition_id"])


def _apply_attach_document(store: Store, a: dict[str, Any]) -> CommandOutcome:
    updated = attach_document(store, a["id"], a["kind"], a["date"], a["note"])
    return CommandOutcome(updated, "doctorant", a["id"])


_APPLIERS: dict[str, Callable[[Store, dict[str, Any]], CommandOutcome]] = {
    "register_doctorant": _apply_register_doctorant,
    "enroll": _apply_enroll,
    "dismiss": _apply_dismiss,
    "record_defense": _apply_record_defense,
    "change_topic": _apply_change_topic,
    "assign_supervisor": _apply_assign_supervisor,
    "end_supervision": _apply_end_supervision,
    "record_exam": _apply_record_exam,
    "add_activity": _apply_add_activity,
    "register_supervisor": _apply_register_supervisor,
    "create_competition": _apply_create_competition,
    "close_competition": _apply_close_competition,
    "attach_document": _apply_attach_document,
}


def apply_command(store: Store, cmd: str, payload: dict[str, Any]) -> CommandOutcome:
    """Apply one named command with a raw JSON payload.

    Raises the command's DomainError on rejection; the input store is never
    modified either way.
    """
    kwargs = parse_payload(cmd, payload)
    return _APPLIERS[cmd](store, kwargs)
