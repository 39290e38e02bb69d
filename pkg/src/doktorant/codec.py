"""JSON document codec for domain values and the store.

One canonical document shape per entity, used verbatim by snapshots, API
resources and exports. Dates are ISO strings, enums their stable names,
grades two-digit decimal strings. ``*_from_doc`` functions are strict; a
document that does not round-trip is corrupt.
"""

from __future__ import annotations

from datetime import date
from decimal import Decimal, InvalidOperation
from typing import Any, Optional

from .domain import (
    AcademicYear,
    ActivityKind,
    ActivityRecord,
    Competition,
    CompetitionState,
    DefenseOutcome,
    DefenseRecord,
    DismissalRecord,
    Doctorant,
    DoctorateForm,
    DocumentRecord,
    EnrollmentRecord,
    ExamRecord,
    LifecycleStatus,
    Supervision,
    Supervisor,
    TopicVersion,
)
from .registry import Store


class DocError(ValueError):
    """A document field is missing or has the wrong shape."""


def _opt(value: Optional[Any], convert) -> Optional[Any]:
    return None if value is None else convert(value)


def _date_from(doc_value: Any) -> date:
    try:
        return date.fromisoformat(doc_value)
    except (TypeError, ValueError) as exc:
        raise DocError(f"bad date: {doc_value!r}") from exc


def _grade_from(doc_value: Any) -> Decimal:
    try:
        return Decimal(str(doc_value)).quantize(Decimal("0.01"))
    except InvalidOperation as exc:
        raise DocError(f"bad grade: {doc_value!r}") from exc


def enrollment_to_doc(r: EnrollmentRecord) -> dict[str, Any]:
    return {
        "form": r.form.value,
        "enrollment_date": r.enrollment_date.isoformat(),
        "term_months": r.term_months,
        "basis": r.basis,
    }


def enrollment_from_doc(doc: dict[str, Any]) -> EnrollmentRecord:
    return EnrollmentRecord(
        form=DoctorateForm(doc["form"]),
        enrollment_date=_date_from(doc["enrollment_date"]),
        term_months=int(doc["term_months"]),
        basis=doc["basis"],
    )


def dismissal_to_doc(r: DismissalRecord) -> dict[str, Any]:
    return {"date": r.date.isoformat(), "right_of_defense": r.right_of_defense, "note": r.note}


def dismissal_from_doc(doc: dict[str, Any]) -> DismissalRecord:
    return DismissalRecord(
        date=_date_from(doc["date"]),
        right_of_defense=bool(doc["right_of_defense"]),
        note=doc.get("note"),
    )


def defense_to_doc(r: DefenseRecord) -> dict[str, Any]:
    return {"date": r.date.isoformat(), "outcome": r.outcome.value, "note": r.note}


def defense_from_doc(doc: dict[str, Any]) -> DefenseRecord:
    return DefenseRecord(
        date=_date_from(doc["date"]),
        outcome=DefenseOutcome(doc["outcome"]),
        note=doc.get("note"),
    )


def topic_to_doc(t: TopicVersion) -> dict[str, Any]:
    return {"seq_no": t.seq_no, "title": t.title, "effective_date": t.effective_date.isoformat()}


def topic_from_doc(doc: dict[str, Any]) -> TopicVersion:
    return TopicVersion(
        seq_no=int(doc["seq_no"]),
        title=doc["title"],
        effective_date=_date_from(doc["effective_date"]),
    )


def supervision_to_doc(s: Supervision) -> dict[str, Any]:
    return {
        "supervisor_id": s.supervisor_id,
        "start_date": s.start_date.isoformat(),
        "end_date": _opt(s.end_date, date.isoformat),
    }


def supervision_from_doc(doc: dict[str, Any]) -> Supervision:
    return Supervision(
        supervisor_id=doc["supervisor_id"],
        start_date=_date_from(doc["start_date"]),
        end_date=_opt(doc.get("end_date"), _date_from),
    )


def exam_to_doc(e: ExamRecord) -> dict[str, Any]:
    return {"subject": e.subject, "date": e.date.isoformat(), "grade": str(e.grade)}


def exam_from_doc(doc: dict[str, Any]) -> ExamRecord:
    return ExamRecord(
        subject=doc["subject"],
        date=_date_from(doc["date"]),
        grade=_grade_from(doc["grade"]),
    )


def activity_to_doc(a: ActivityRecord) -> dict[str, Any]:
    return {
        "academic_year": a.academic_year.label,
        "kind": a.kind.value,
        "description": a.description,
        "detail": a.detail,
    }


def activity_from_doc(doc: dict[str, Any]) -> ActivityRecord:
    return ActivityRecord(
        academic_year=AcademicYear.parse(doc["academic_year"]),
        kind=ActivityKind(doc["kind"]),
        description=doc["description"],
        detail=doc.get("detail"),
    )


def document_to_doc(d: DocumentRecord) -> dict[str, Any]:
    return {"kind": d.kind, "date": d.date.isoformat(), "note": d.note}


def document_from_doc(doc: dict[str, Any]) -> DocumentRecord:
    return DocumentRecord(kind=doc["kind"], date=_date_from(doc["date"]), note=doc.get("note"))


def doctorant_to_doc(d: Doctorant) -> dict[str, Any]:
    return {
        "id": d.id,
        "family_name": d.family_name,
        "given_name": d.given_name,
        "national_id": d.national_id,
        "contact": d.contact,
        "status": d.status.value,
        "competition": d.competition,
        "enrollment": _opt(d.enrollment, enrollment_to_doc),
        "dismissal": _opt(d.dismissal, dismissal_to_doc),
        "defense": _opt(d.defense, defense_to_doc),
        "topics": [topic_to_doc(t) for t in d.topics],
        "supervisions": [supervision_to_doc(s) for s in d.supervisions],
        "exams": [exam_to_doc(e) for e in d.exams],
        "activities": [activity_to_doc(a) for a in d.activities],
        "documents": [document_to_doc(x) for x in d.documents],
    }


def doctorant_from_doc(doc: dict[str, Any]) -> Doctorant:
    try:
        return Doctorant(
            id=doc["id"],
            family_name=doc["family_name"],
            given_name=doc["given_name"],
            national_id=doc.get("national_id"),
            contact=doc.get("contact"),
            status=LifecycleStatus(doc["status"]),
            competition=doc.get("competition"),
            enrollment=_opt(doc.get("enrollment"), enrollment_from_doc),
            dismissal=_opt(doc.get("dismissal"), dismissal_from_doc),
            defense=_opt(doc.get("defense"), defense_from_doc),
            topics=tuple(topic_from_doc(t) for t in doc.get("topics", [])),
            supervisions=tuple(supervision_from_doc(s) for s in doc.get("supervisions", [])),
            exams=tuple(exam_from_doc(e) for e in doc.get("exams", [])),
            activities=tuple(activity_from_doc(a) for a in doc.get("activities", [])),
            documents=tuple(document_from_doc(x) for x in doc.get("documents", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DocError(f"bad doctorant document: {exc}") from exc


def supervisor_to_doc(s: Supervisor) -> dict[str, Any]:
    return {
        "id": s.id,
        "family_name": s.family_name,
        "given_name": s.given_name,
        "habilitated": s.habilitated,
        "academic_title": s.academic_title,
        "department": s.department,
    }


def supervisor_from_doc(doc: dict[str, Any]) -> Supervisor:
    try:
        return Supervisor(
            id=doc["id"],
            family_name=doc["family_name"],
            given_name=doc["given_name"],
            habilitated=bool(doc["habilitated"]),
            academic_title=doc.get("academic_title"),
            department=doc.get("department"),
        )
    except (KeyError, TypeError) as exc:
        raise DocError(f"bad supervisor document: {exc}") from exc


def competition_to_doc(c: Competition) -> dict[str, Any]:
    return {
        "id": c.id,
        "announced_on": c.announced_on.isoformat(),
        "speciality": c.speciality,
        "form": c.form.value,
        "deadline": c.deadline.isoformat(),
        "state": c.state.value,
    }


def competition_from_doc(doc: dict[str, Any]) -> Competition:
    try:
        return Competition(
            id=doc["id"],
            announced_on=_date_from(doc["announced_on"]),
            speciality=doc["speciality"],
            form=DoctorateForm(doc["form"]),
            deadline=_date_from(doc["deadline"]),
            state=CompetitionState(doc["state"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DocError(f"bad competition document: {exc}") from exc


def store_to_doc(store: Store) -> dict[str, Any]:
    return {
        "doctorants": {i: doctorant_to_doc(d) for i, d in sorted(store.doctorants.items())},
        "supervisors": {i: supervisor_to_doc(s) for i, s in sorted(store.supervisors.items())},
        "competitions": {i: competition_to_doc(c) for i, c in sorted(store.competitions.items())},
        "next_event_seq": store.next_event_seq,
    }


def store_from_doc(doc: dict[str, Any]) -> Store:
    try:
        return Store(
            doctorants={i: doctorant_from_doc(d) for i, d in doc["doctorants"].items()},
            supervisors={i: supervisor_from_doc(s) for i, s in doc["supervisors"].items()},
            competitions={i: competition_from_doc(c) for i, c in doc["competitions"].items()},
            next_event_seq=int(doc["next_event_seq"]),
        )
    except (KeyError, TypeError, AttributeError) as exc:
        raise DocError(f"bad store document: {exc}") from exc
