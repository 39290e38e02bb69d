"""Read-side aggregations: the governance and ministry reports, with export.

Every operation is a pure function of a store value. Exports are
deterministic: the same report value always serializes to the same bytes
(CSV per RFC 4180 with CRLF and a header row, or JSON mirroring the report's
field names).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from datetime import date
from decimal import Decimal
from typing import Any, Optional, Union

from . import codec
from .domain import (
    AcademicYear,
    ActivityKind,
    ActivityRecord,
    DEFAULT_PASSING_THRESHOLD,
    DefenseOutcome,
    DefenseRecord,
    DismissalRecord,
    Doctorant,
    DoctorateForm,
    EnrollmentRecord,
    LifecycleStatus,
    TopicVersion,
    planned_end_date,
)
from .errors import MalformedPayload, UnknownDoctorant
from .registry import Store


@dataclass(frozen=True)
class MinistryReport:
    academic_year: AcademicYear
    newly_enrolled: dict[DoctorateForm, int]
    dismissed_with_right: int
    dismissed_without_right: int
    defended: int
    active_at_year_end: dict[DoctorateForm, int]


@dataclass(frozen=True)
class SupervisionFact:
    supervisor_id: str
    family_name: str
    given_name: str
    start_date: date
    end_date: Optional[date]


@dataclass(frozen=True)
class ExamFact:
    subject: str
    date: date
    grade: Decimal
    passed: bool


@dataclass(frozen=True)
class IndividualPlanReport:
    doctorant_id: str
    family_name: str
    given_name: str
    national_id: Optional[str]
    contact: Optional[str]
    status: LifecycleStatus
    competition: Optional[str]
    enrollment: Optional[EnrollmentRecord]
    planned_end: Optional[date]
    dismissal: Optional[DismissalRecord]
    defense: Optional[DefenseRecord]
    topics: tuple[TopicVersion, ...]
    current_supervisors: tuple[SupervisionFact, ...]
    former_supervisors: tuple[SupervisionFact, ...]
    exams: tuple[ExamFact, ...]
    activities_by_year: tuple[tuple[str, tuple[ActivityRecord, ...]], ...]


@dataclass(frozen=True)
class LoadRow:
    supervisor_id: str
    family_name: str
    given_name: str
    open_supervisions: int
    total_supervisions: int


@dataclass(frozen=True)
class SupervisorLoadReport:
    rows: tuple[LoadRow, ...]


@dataclass(frozen=True)
class AnnualActivityReport:
    doctorant_id: str
    academic_year: AcademicYear
    activities: dict[ActivityKind, tuple[ActivityRecord, ...]]


Report = Union[MinistryReport, IndividualPlanReport, SupervisorLoadReport, AnnualActivityReport]


def _as_year(year: Union[AcademicYear, str]) -> AcademicYear:
    return AcademicYear.parse(year) if isinstance(year, str) else year


def _enrolled_as_of(d: Doctorant, on: date) -> bool:
    """Whether the dossier's status reconstructed at `on` is Enrolled."""
    if d.enrollment is None or d.enrollment.enrollment_date > on:
        return False
    if d.dismissal is not None and d.dismissal.date <= on:
        return False
    if (
        d.defense is not None
        and d.defense.outcome is DefenseOutcome.SUCCESSFUL
        and d.defense.date <= on
    ):
        return False
    return True


def ministry_report(store: Store, year: Union[AcademicYear, str]) -> MinistryReport:
    """Aggregate enrollment/dismissal/defense counts for one academic year."""
    ay = _as_year(year)
    newly = {form: 0 for form in DoctorateForm}
    active = {form: 0 for form in DoctorateForm}
    dismissed_with = dismissed_without = defended = 0
    year_end = ay.last_day
    for d in store.doctorants.values():
        if d.enrollment is not None:
            if ay.contains(d.enrollment.enrollment_date):
                newly[d.enrollment.form] += 1
            if _enrolled_as_of(d, year_end):
                active[d.enrollment.form] += 1
        if d.dismissal is not None and ay.contains(d.dismissal.date):
            if d.dismissal.right_of_defense:
                dismissed_with += 1
            else:
                dismissed_without += 1
        if (
            d.defense is not None
            and d.defense.outcome is DefenseOutcome.SUCCESSFUL
            and ay.contains(d.defense.date)
        ):
            defended += 1
    return MinistryReport(
        academic_year=ay,
        newly_enrolled=newly,
        dismissed_with_right=dismissed_with,
        dismissed_without_right=dismissed_without,
        defended=defended,
        active_at_year_end=active,
    )


def individual_plan(
    store: Store,
    doctorant_id: str,
    passing_threshold: Decimal = DEFAULT_PASSING_THRESHOLD,
) -> IndividualPlanReport:
    """Project one dossier: complete topic history, supervisions, exams, activities."""
    d = store.doctorants.get(doctorant_id)
    if d is None:
        raise UnknownDoctorant(doctorant_id)

    def fact(s) -> SupervisionFact:
        sup = store.supervisors.get(s.supervisor_id)
        family = sup.family_name if sup else ""
        given = sup.given_name if sup else ""
        return SupervisionFact(s.supervisor_id, family, given, s.start_date, s.end_date)

    current = tuple(fact(s) for s in d.supervisions if s.is_open)
    former = tuple(fact(s) for s in d.supervisions if not s.is_open)
    exams = tuple(
        ExamFact(e.subject, e.date, e.grade, e.passes(passing_threshold)) for e in d.exams
    )
    years = sorted({a.academic_year for a in d.activities})
    by_year = tuple(
        (y.label, tuple(a for a in d.activities if a.academic_year == y)) for y in years
    )
    return IndividualPlanReport(
        doctorant_id=d.id,
        family_name=d.family_name,
        given_name=d.given_name,
        national_id=d.national_id,
        contact=d.contact,
        status=d.status,
        competition=d.competition,
        enrollment=d.enrollment,
        planned_end=(
            planned_end_date(d.enrollment.enrollment_date, d.enrollment.term_months)
            if d.enrollment
            else None
        ),
        dismissal=d.dismissal,
        defense=d.defense,
        topics=d.topics,
        current_supervisors=current,
        former_supervisors=former,
        exams=exams,
        activities_by_year=by_year,
    )


def supervisor_load(store: Store) -> SupervisorLoadReport:
    """One row per registered supervisor, zero-load ones included."""
    open_counts = {sid: 0 for sid in store.supervisors}
    total_counts = {sid: 0 for sid in store.supervisors}
    for d in store.doctorants.values():
        for s in d.supervisions:
            if s.supervisor_id in total_counts:
                total_counts[s.supervisor_id] += 1
                if s.is_open:
                    open_counts[s.supervisor_id] += 1
    rows = [
        LoadRow(
            supervisor_id=sup.id,
            family_name=sup.family_name,
            given_name=sup.given_name,
            open_supervisions=open_counts[sup.id],
            total_supervisions=total_counts[sup.id],
        )
        for sup in store.supervisors.values()
    ]
    rows.sort(key=lambda r: (-r.open_supervisions, r.family_name, r.given_name, r.supervisor_id))
    return SupervisorLoadReport(rows=tuple(rows))


def annual_activity_report(
    store: Store,
    doctorant_id: str,
    year: Union[AcademicYear, str],
) -> AnnualActivityReport:
    """The dossier's activities for one year, partitioned by kind."""
    ay = _as_year(year)
    d = store.doctorants.get(doctorant_id)
    if d is None:
        raise UnknownDoctorant(doctorant_id)
    partitions: dict[ActivityKind, tuple[ActivityRecord, ...]] = {
        kind: tuple(
            a for a in d.activities if a.kind is kind and a.academic_year == ay
        )
        for kind in ActivityKind
    }
    return AnnualActivityReport(doctorant_id=d.id, academic_year=ay, activities=partitions)


# -- export -------------------------------------------------------------------

def report_to_doc(report: Report) -> dict[str, Any]:
    """The JSON document mirroring the report's field names."""
    if isinstance(report, MinistryReport):
        return {
            "academic_year": report.academic_year.label,
            "newly_enrolled": {f.value: report.newly_enrolled[f] for f in DoctorateForm},
            "dismissed_with_right": report.dismissed_with_right,
            "dismissed_without_right": report.dismissed_without_right,
            "defended": report.defended,
            "active_at_year_end": {f.value: report.active_at_year_end[f] for f in DoctorateForm},
        }
    if isinstance(report, IndividualPlanReport):
        return {
            "doctorant_id": report.doctorant_id,
            "family_name": report.family_name,
            "given_name": report.given_name,
            "national_id": report.national_id,
            "contact": report.contact,
            "status": report.status.value,
            "competition": report.competition,
            "enrollment": codec._opt(report.enrollment, codec.enrollment_to_doc),
            "planned_end": report.planned_end.isoformat() if report.planned_end else None,
            "dismissal": codec._opt(report.dismissal, codec.dismissal_to_doc),
            "defense": codec._opt(report.defense, codec.defense_to_doc),
            "topics": [codec.topic_to_doc(t) for t in report.topics],
            "current_supervisors": [_supervision_fact_doc(s) for s in report.current_supervisors],
            "former_supervisors": [_supervision_fact_doc(s) for s in report.former_supervisors],
            "exams": [
                {
                    "subject": e.subject,
                    "date": e.date.isoformat(),
                    "grade": str(e.grade),
                    "passed": e.passed,
                }
                for e in report.exams
            ],
            "activities_by_year": {
                label: [codec.activity_to_doc(a) for a in records]
                for label, records in report.activities_by_year
            },
        }
    if isinstance(report, SupervisorLoadReport):
        return {
            "rows": [
                {
                    "supervisor_id": r.supervisor_id,
                    "family_name": r.family_name,
                    "given_name": r.given_name,
                    "open_supervisions": r.open_supervisions,
                    "total_supervisions": r.total_supervisions,
                }
                for r in report.rows
            ]
        }
    if isinstance(report, AnnualActivityReport):
        return {
            "doctorant_id": report.doctorant_id,
            "academic_year": report.academic_year.label,
            "activities": {
                kind.value: [
                    {"description": a.description, "detail": a.detail}
                    for a in report.activities[kind]
                ]
                for kind in ActivityKind
            },
        }
    raise TypeError(f"not a report: {type(report).__name__}")


def _supervision_fact_doc(s: SupervisionFact) -> dict[str, Any]:
    return {
        "supervisor_id": s.supervisor_id,
        "family_name": s.family_name,
        "given_name": s.given_name,
        "start_date": s.start_date.isoformat(),
        "end_date": s.end_date.isoformat() if s.end_date else None,
    }


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, date):
        return value.isoformat()
    return str(value)


def _csv_bytes(header: list[str], rows: list[list[Any]]) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return out.getvalue().encode("utf-8")


def _ministry_csv(report: MinistryReport) -> bytes:
    header = (
        ["academic_year"]
        + [f"newly_enrolled_{f.value}" for f in DoctorateForm]
        + ["dismissed_with_right", "dismissed_without_right", "defended"]
        + [f"active_{f.value}" for f in DoctorateForm]
    )
    row = (
        [report.academic_year.label]
        + [report.newly_enrolled[f] for f in DoctorateForm]
        + [report.dismissed_with_right, report.dismissed_without_right, report.defended]
        + [report.active_at_year_end[f] for f in DoctorateForm]
    )
    return _csv_bytes(header, [row])


def _load_csv(report: SupervisorLoadReport) -> bytes:
    header = ["supervisor_id", "family_name", "given_name", "open_supervisions", "total_supervisions"]
    rows = [
        [r.supervisor_id, r.family_name, r.given_name, r.open_supervisions, r.total_supervisions]
        for r in report.rows
    ]
    return _csv_bytes(header, rows)


def _activity_csv(report: AnnualActivityReport) -> bytes:
    header = ["doctorant_id", "academic_year", "kind", "description", "detail"]
    rows = [
        [report.doctorant_id, report.academic_year.label, kind.value, a.description, a.detail]
        for kind in ActivityKind
        for a in report.activities[kind]
    ]
    return _csv_bytes(header, rows)


def _plan_csv(report: IndividualPlanReport) -> bytes:
    # Long format: one (section, field, value) row per fact, sections in a
    # fixed order so exports are byte-stable.
    rows: list[list[Any]] = []

    def put(section: str, field: str, value: Any) -> None:
        rows.append([section, field, value])

    for field in ("doctorant_id", "family_name", "given_name", "national_id", "contact"):
        put("identity", field, getattr(report, field))
    put("identity", "status", report.status.value)
    put("identity", "competition", report.competition)
    if report.enrollment:
        put("enrollment", "form", report.enrollment.form.value)
        put("enrollment", "enrollment_date", report.enrollment.enrollment_date)
        put("enrollment", "term_months", report.enrollment.term_months)
        put("enrollment", "basis", report.enrollment.basis)
        put("enrollment", "planned_end", report.planned_end)
    if report.dismissal:
        put("dismissal", "date", report.dismissal.date)
        put("dismissal", "right_of_defense", report.dismissal.right_of_defense)
        put("dismissal", "note", report.dismissal.note)
    if report.defense:
        put("defense", "date", report.defense.date)
        put("defense", "outcome", report.defense.outcome.value)
        put("defense", "note", report.defense.note)
    for t in report.topics:
        section = f"topic[{t.seq_no}]"
        put(section, "title", t.title)
        put(section, "effective_date", t.effective_date)
    for label, group in (("supervisor_current", report.current_supervisors),
                         ("supervisor_former", report.former_supervisors)):
        for i, s in enumerate(group, start=1):
            section = f"{label}[{i}]"
            put(section, "supervisor_id", s.supervisor_id)
            put(section, "family_name", s.family_name)
            put(section, "given_name", s.given_name)
            put(section, "start_date", s.start_date)
            put(section, "end_date", s.end_date)
    for i, e in enumerate(report.exams, start=1):
        section = f"exam[{i}]"
        put(section, "subject", e.subject)
        put(section, "date", e.date)
        put(section, "grade", e.grade)
        put(section, "passed", e.passed)
    for year_label, records in report.activities_by_year:
        for i, a in enumerate(records, start=1):
            section = f"activity[{year_label}][{i}]"
            put(section, "kind", a.kind.value)
            put(section, "description", a.description)
            put(section, "detail", a.detail)
    return _csv_bytes(["section", "field", "value"], rows)


def export_table(report: Report, format: str) -> bytes:
    """Serialize a report; `format` is "csv" or "json"."""
    fmt = format.lower()
    if fmt == "json":
        return (json.dumps(report_to_doc(report), ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        if isinstance(report, MinistryReport):
            return _ministry_csv(report)
        if isinstance(report, SupervisorLoadReport):
            return _load_csv(report)
        if isinstance(report, AnnualActivityReport):
            return _activity_csv(report)
        if isinstance(report, IndividualPlanReport):
            return _plan_csv(report)
        raise TypeError(f"not a report: {type(report).__name__}")
    raise MalformedPayload(f"format must be csv or json, got {format!r}")


# -- raw entity export (CLI surface) -------------------------------------------

def export_entities(store: Store, what: str, format: str) -> bytes:
    """Dump doctorants/supervisors/competitions as JSON documents or flat CSV."""
    if what == "doctorants":
        docs = [codec.doctorant_to_doc(d) for d in _sorted_doctorants(store)]
        header = ["id", "family_name", "given_name", "national_id", "status",
                  "form", "enrollment_date", "current_topic"]
        rows = [
            [
                d.id, d.family_name, d.given_name, d.national_id, d.status.value,
                d.enrollment.form.value if d.enrollment else None,
                d.enrollment.enrollment_date if d.enrollment else None,
                d.topics[-1].title if d.topics else None,
            ]
            for d in _sorted_doctorants(store)
        ]
    elif what == "supervisors":
        items = sorted(store.supervisors.values(), key=lambda s: s.id)
        docs = [codec.supervisor_to_doc(s) for s in items]
        header = ["id", "family_name", "given_name", "habilitated", "academic_title", "department"]
        rows = [
            [s.id, s.family_name, s.given_name, s.habilitated, s.academic_title, s.department]
            for s in items
        ]
    elif what == "competitions":
        items = sorted(store.competitions.values(), key=lambda c: c.id)
        docs = [codec.competition_to_doc(c) for c in items]
        header = ["id", "announced_on", "speciality", "form", "deadline", "state"]
        rows = [
            [c.id, c.announced_on, c.speciality, c.form.value, c.deadline, c.state.value]
            for c in items
        ]
    else:
        raise MalformedPayload(f"unknown export target {what!r}")

    fmt = format.lower()
    if fmt == "json":
        return (json.dumps(docs, ensure_ascii=False, indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        return _csv_bytes(header, rows)
    raise MalformedPayload(f"format must be csv or json, got {format!r}")


def _sorted_doctorants(store: Store) -> list[Doctorant]:
    return sorted(store.doctorants.values(), key=lambda d: d.id)
