"""Shared fixtures and randomized-data builders for the suite."""

from __future__ import annotations

import random
from datetime import date, timedelta
from decimal import Decimal

import pytest
from hypothesis import settings

from doktorant.domain import (
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
from doktorant.registry import Store

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")

FAMILY_NAMES = ["Иванова", "Петров", "Георгиева", "Димитров", "Николова", "Стоянов", "Колева"]
GIVEN_NAMES = ["Мария", "Георги", "Ана", "Иван", "Елена", "Петър", "Яна"]
SUBJECTS = ["Специалност", "Чужд език", "Информатика"]
TOPICS = ["Модели на данни", "Разпределени системи", "Анализ на алгоритми", "Семантични мрежи"]


def rand_date(rng: random.Random, start_year: int = 2018, end_year: int = 2025) -> date:
    start = date(start_year, 1, 1)
    span = (date(end_year, 12, 31) - start).days
    return start + timedelta(days=rng.randrange(span + 1))


def rand_grade(rng: random.Random) -> Decimal:
    return (Decimal(rng.randrange(200, 601)) / Decimal(100)).quantize(Decimal("0.01"))


def _rand_activities(rng: random.Random, n: int) -> tuple[ActivityRecord, ...]:
    out = []
    for _ in range(n):
        year = AcademicYear(rng.randrange(2019, 2026))
        kind = rng.choice(list(ActivityKind))
        out.append(
            ActivityRecord(year, kind, f"дейност {rng.randrange(1000)}", detail=rng.choice([None, "зала 101", "том 4"]))
        )
    return tuple(out)


def build_random_store(rng: random.Random, n_doctorants: int) -> Store:
    """Directly construct a valid store: used by report-oracle comparisons.

    Dossiers cover every lifecycle shape, including unsuccessful defenses on
    still-enrolled candidates and defenses after dismissal-with-right.
    """
    supervisors: dict[str, Supervisor] = {}
    for i in range(rng.randrange(1, 12)):
        sid = f"S{i + 1:08d}"
        supervisors[sid] = Supervisor(
            sid, rng.choice(FAMILY_NAMES), rng.choice(GIVEN_NAMES),
            habilitated=rng.random() < 0.8,
            academic_title=rng.choice([None, "доц.", "проф."]),
        )
    competitions: dict[str, Competition] = {}
    for i in range(rng.randrange(0, 4)):
        cid = f"K{i + 1:08d}"
        announced = rand_date(rng)
        competitions[cid] = Competition(
            cid, announced, "Информатика", rng.choice(list(DoctorateForm)),
            deadline=announced + timedelta(days=rng.randrange(90)),
            state=rng.choice(list(CompetitionState)),
        )

    doctorants: dict[str, Doctorant] = {}
    sup_ids = list(supervisors)
    for i in range(n_doctorants):
        did = f"D{i + 1:08d}"
        d = Doctorant(
            id=did,
            family_name=rng.choice(FAMILY_NAMES),
            given_name=rng.choice(GIVEN_NAMES),
            national_id=rng.choice([None, f"{rng.randrange(10**9):010d}"]),
            competition=rng.choice([None] + list(competitions)) if competitions else None,
        )
        roll = rng.random()
        if roll >= 0.15:  # 85% get past Applied
            enrolled_on = rand_date(rng, 2019, 2024)
            enrollment = EnrollmentRecord(
                form=rng.choice(list(DoctorateForm)),
                enrollment_date=enrolled_on,
                term_months=rng.choice([24, 36, 48]),
                basis="чл. 21",
            )
            topics = tuple(
                TopicVersion(k + 1, rng.choice(TOPICS), enrolled_on + timedelta(days=90 * k))
                for k in range(rng.randrange(1, 4))
            )
            status = LifecycleStatus.ENROLLED
            dismissal = None
            defense = None
            shape = rng.random()
            if shape < 0.2:
                right = rng.random() < 0.5
                dismissal = DismissalRecord(
                    enrolled_on + timedelta(days=rng.randrange(1, 1500)), right
                )
                status = (
                    LifecycleStatus.DISMISSED_WITH_RIGHT
                    if right
                    else LifecycleStatus.DISMISSED_WITHOUT_RIGHT
                )
                if right and rng.random() < 0.4:
                    defense = DefenseRecord(
                        dismissal.date + timedelta(days=rng.randrange(400)),
                        DefenseOutcome.SUCCESSFUL,
                    )
                    status = LifecycleStatus.DEFENDED
            elif shape < 0.35:
                defense = DefenseRecord(
                    enrolled_on + timedelta(days=rng.randrange(1, 1800)),
                    DefenseOutcome.SUCCESSFUL,
                )
                status = LifecycleStatus.DEFENDED
            elif shape < 0.42:
                defense = DefenseRecord(
                    enrolled_on + timedelta(days=rng.randrange(1, 1800)),
                    DefenseOutcome.UNSUCCESSFUL,
                )
            supervisions = []
            for sid in rng.sample(sup_ids, k=min(len(sup_ids), rng.randrange(0, 3))):
                start = enrolled_on + timedelta(days=rng.randrange(200))
                end = None
                if rng.random() < 0.3:
                    end = start + timedelta(days=rng.randrange(800))
                supervisions.append(Supervision(sid, start, end))
            exams = tuple(
                ExamRecord(rng.choice(SUBJECTS), rand_date(rng, 2020, 2025), rand_grade(rng))
                for _ in range(rng.randrange(0, 3))
            )
            d = Doctorant(
                id=did,
                family_name=d.family_name,
                given_name=d.given_name,
                national_id=d.national_id,
                competition=d.competition,
                status=status,
                enrollment=enrollment,
                dismissal=dismissal,
                defense=defense,
                topics=topics,
                supervisions=tuple(supervisions),
                exams=exams,
                activities=_rand_activities(rng, rng.randrange(0, 6)),
                documents=tuple(
                    DocumentRecord("заповед", rand_date(rng)) for _ in range(rng.randrange(0, 2))
                ),
            )
        doctorants[did] = d
    return Store(
        doctorants=doctorants,
        supervisors=supervisors,
        competitions=competitions,
        next_event_seq=1 + n_doctorants,
    )


# -- command-sequence fuzzing ---------------------------------------------------

class CommandFuzzer:
    """Proposes registry commands against the current store state.

    `propose(legal=True)` yields a command expected to be accepted;
    `propose(legal=False)` yields one expected to be rejected. Both shapes are
    (cmd, payload) ready for apply_command / StoreEngine.execute.
    """

    def __init__(self, rng: random.Random, max_doctorants: int = 10_000):
        self.rng = rng
        self.max_doctorants = max_doctorants

    # helpers over store state
    def _by_status(self, store: Store, *statuses: LifecycleStatus) -> list[Doctorant]:
        return [d for d in store.doctorants.values() if d.status in statuses]

    def _habilitated(self, store: Store) -> list[str]:
        return [s.id for s in store.supervisors.values() if s.habilitated]

    def _open_competitions(self, store: Store) -> list[str]:
        return [c.id for c in store.competitions.values() if c.state is CompetitionState.OPEN]

    def propose(self, store: Store, legal: bool = True) -> tuple[str, dict]:
        if legal:
            return self._propose_legal(store)
        return self._propose_illegal(store)

    def _propose_legal(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        moves = []
        if len(store.doctorants) < self.max_doctorants:
            moves += ["register_doctorant"] * 3
        moves += ["register_supervisor", "create_competition"]
        if self._open_competitions(store):
            moves.append("close_competition")
        if self._by_status(store, LifecycleStatus.APPLIED):
            moves += ["enroll"] * 3
        enrolled = self._by_status(store, LifecycleStatus.ENROLLED)
        if enrolled:
            moves += ["dismiss", "record_defense", "record_exam", "add_activity", "attach_document"]
            moves += ["change_topic"] * 2
        with_right = self._by_status(store, LifecycleStatus.DISMISSED_WITH_RIGHT)
        if with_right:
            moves += ["record_defense", "change_topic"]
        if enrolled and self._habilitated(store):
            moves += ["assign_supervisor"] * 2
        if any(
            s.is_open for d in store.doctorants.values() for s in d.supervisions
        ):
            moves.append("end_supervision")
        move = rng.choice(moves)
        return getattr(self, f"_legal_{move}")(store)

    def _legal_register_doctorant(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        competition = None
        open_comps = self._open_competitions(store)
        if open_comps and rng.random() < 0.3:
            competition = rng.choice(open_comps)
        return "register_doctorant", {
            "family_name": rng.choice(FAMILY_NAMES),
            "given_name": rng.choice(GIVEN_NAMES),
            "national_id": rng.choice([None, f"{rng.randrange(10**9):010d}"]),
            "competition_id": competition,
        }

    def _legal_register_supervisor(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        return "register_supervisor", {
            "family_name": rng.choice(FAMILY_NAMES),
            "given_name": rng.choice(GIVEN_NAMES),
            "habilitated": rng.random() < 0.8,
            "academic_title": rng.choice([None, "доц.", "проф."]),
            "department": rng.choice([None, "Информатика"]),
        }

    def _legal_create_competition(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        announced = rand_date(rng)
        return "create_competition", {
            "announced_on": announced.isoformat(),
            "speciality": "Информатика",
            "form": rng.choice(list(DoctorateForm)).value,
            "deadline": (announced + timedelta(days=rng.randrange(120))).isoformat(),
        }

    def _legal_close_competition(self, store: Store) -> tuple[str, dict]:
        return "close_competition", {"competition_id": self.rng.choice(self._open_competitions(store))}

    def _legal_enroll(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        d = rng.choice(self._by_status(store, LifecycleStatus.APPLIED))
        return "enroll", {
            "id": d.id,
            "form": rng.choice(list(DoctorateForm)).value,
            "enrollment_date": rand_date(rng, 2019, 2024).isoformat(),
            "term_months": rng.choice([24, 36, 48]),
            "basis": "чл. 21",
            "initial_topic_title": rng.choice(TOPICS),
        }

    def _legal_dismiss(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        d = rng.choice(self._by_status(store, LifecycleStatus.ENROLLED))
        when = d.enrollment.enrollment_date + timedelta(days=rng.randrange(1500))
        return "dismiss", {
            "id": d.id,
            "date": when.isoformat(),
            "right_of_defense": rng.random() < 0.6,
            "note": None,
        }

    def _legal_record_defense(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        pool = self._by_status(
            store, LifecycleStatus.ENROLLED, LifecycleStatus.DISMISSED_WITH_RIGHT
        )
        d = rng.choice(pool)
        when = d.enrollment.enrollment_date + timedelta(days=rng.randrange(2000))
        return "record_defense", {
            "id": d.id,
            "date": when.isoformat(),
            "outcome": rng.choice(list(DefenseOutcome)).value,
            "note": None,
        }

    def _legal_change_topic(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        pool = self._by_status(
            store, LifecycleStatus.ENROLLED, LifecycleStatus.DISMISSED_WITH_RIGHT
        )
        d = rng.choice(pool)
        when = d.topics[-1].effective_date + timedelta(days=rng.randrange(365))
        return "change_topic", {
            "id": d.id,
            "new_title": rng.choice(TOPICS),
            "effective_date": when.isoformat(),
        }

    def _legal_assign_supervisor(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        candidates = []
        for d in self._by_status(store, LifecycleStatus.ENROLLED):
            busy = {s.supervisor_id for s in d.supervisions if s.is_open}
            free = [sid for sid in self._habilitated(store) if sid not in busy]
            if free:
                candidates.append((d, free))
        if not candidates:
            return self._legal_register_supervisor(store)
        d, free = rng.choice(candidates)
        return "assign_supervisor", {
            "doctorant_id": d.id,
            "supervisor_id": rng.choice(free),
            "start_date": rand_date(rng, 2019, 2025).isoformat(),
        }

    def _legal_end_supervision(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        open_links = [
            (d.id, s)
            for d in store.doctorants.values()
            for s in d.supervisions
            if s.is_open
        ]
        did, link = rng.choice(open_links)
        when = link.start_date + timedelta(days=rng.randrange(900))
        return "end_supervision", {
            "doctorant_id": did,
            "supervisor_id": link.supervisor_id,
            "end_date": when.isoformat(),
        }

    def _legal_record_exam(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        pool = self._by_status(
            store,
            LifecycleStatus.ENROLLED,
            LifecycleStatus.DISMISSED_WITH_RIGHT,
            LifecycleStatus.DISMISSED_WITHOUT_RIGHT,
            LifecycleStatus.DEFENDED,
        )
        d = rng.choice(pool)
        return "record_exam", {
            "id": d.id,
            "subject": rng.choice(SUBJECTS),
            "date": rand_date(rng, 2020, 2025).isoformat(),
            "grade": str(rand_grade(rng)),
        }

    def _legal_add_activity(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        pool = self._by_status(
            store,
            LifecycleStatus.ENROLLED,
            LifecycleStatus.DISMISSED_WITH_RIGHT,
            LifecycleStatus.DISMISSED_WITHOUT_RIGHT,
            LifecycleStatus.DEFENDED,
        )
        d = rng.choice(pool)
        return "add_activity", {
            "id": d.id,
            "academic_year": AcademicYear(rng.randrange(2019, 2026)).label,
            "kind": rng.choice(list(ActivityKind)).value,
            "description": f"дейност {rng.randrange(1000)}",
            "detail": rng.choice([None, "зала 101"]),
        }

    def _legal_attach_document(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        d = rng.choice(list(store.doctorants.values()))
        return "attach_document", {
            "id": d.id,
            "kind": "заповед",
            "date": rand_date(rng).isoformat(),
            "note": None,
        }

    def _propose_illegal(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        makers = [self._illegal_empty_name, self._illegal_unknown_doctorant]
        if store.doctorants:
            makers += [
                self._illegal_grade,
                self._illegal_bad_year,
                self._illegal_empty_topic_title,
                self._illegal_unknown_supervisor,
            ]
            if self._by_status(store, LifecycleStatus.APPLIED):
                makers += [self._illegal_term, self._illegal_dismiss_applied,
                           self._illegal_activity_applied]
            if self._by_status(store, LifecycleStatus.ENROLLED):
                makers += [self._illegal_double_enroll, self._illegal_dismiss_before_enrollment]
            if self._by_status(store, LifecycleStatus.DISMISSED_WITHOUT_RIGHT):
                makers.append(self._illegal_defend_without_right)
        non_hab = [s.id for s in store.supervisors.values() if not s.habilitated]
        if non_hab and self._by_status(store, LifecycleStatus.ENROLLED):
            makers.append(self._illegal_not_habilitated)
        closed = [c.id for c in store.competitions.values() if c.state is CompetitionState.CLOSED]
        if closed:
            makers += [self._illegal_register_closed_competition, self._illegal_close_closed]
        return rng.choice(makers)(store)

    def _illegal_empty_name(self, store: Store) -> tuple[str, dict]:
        return "register_doctorant", {
            "family_name": "",
            "given_name": "X",
            "national_id": None,
            "competition_id": None,
        }

    def _illegal_unknown_doctorant(self, store: Store) -> tuple[str, dict]:
        return "attach_document", {
            "id": "D99999999",
            "kind": "заповед",
            "date": "2023-01-01",
            "note": None,
        }

    def _illegal_term(self, store: Store) -> tuple[str, dict]:
        d = self.rng.choice(self._by_status(store, LifecycleStatus.APPLIED))
        return "enroll", {
            "id": d.id,
            "form": "FullTime",
            "enrollment_date": "2023-02-01",
            "term_months": 0,
            "basis": "чл. 21",
            "initial_topic_title": "Тема",
        }

    def _illegal_double_enroll(self, store: Store) -> tuple[str, dict]:
        d = self.rng.choice(self._by_status(store, LifecycleStatus.ENROLLED))
        return "enroll", {
            "id": d.id,
            "form": "FullTime",
            "enrollment_date": "2023-02-01",
            "term_months": 36,
            "basis": "чл. 21",
            "initial_topic_title": "Тема",
        }

    def _illegal_dismiss_applied(self, store: Store) -> tuple[str, dict]:
        d = self.rng.choice(self._by_status(store, LifecycleStatus.APPLIED))
        return "dismiss", {"id": d.id, "date": "2024-01-01", "right_of_defense": True, "note": None}

    def _illegal_dismiss_before_enrollment(self, store: Store) -> tuple[str, dict]:
        d = self.rng.choice(self._by_status(store, LifecycleStatus.ENROLLED))
        before = d.enrollment.enrollment_date - timedelta(days=1)
        return "dismiss", {
            "id": d.id,
            "date": before.isoformat(),
            "right_of_defense": True,
            "note": None,
        }

    def _illegal_defend_without_right(self, store: Store) -> tuple[str, dict]:
        d = self.rng.choice(self._by_status(store, LifecycleStatus.DISMISSED_WITHOUT_RIGHT))
        return "record_defense", {
            "id": d.id,
            "date": (d.enrollment.enrollment_date + timedelta(days=600)).isoformat(),
            "outcome": "Successful",
            "note": None,
        }

    def _illegal_grade(self, store: Store) -> tuple[str, dict]:
        d = self.rng.choice(list(store.doctorants.values()))
        return "record_exam", {
            "id": d.id,
            "subject": "Специалност",
            "date": "2024-03-01",
            "grade": self.rng.choice(["6.01", "1.99", "7.00"]),
        }

    def _illegal_bad_year(self, store: Store) -> tuple[str, dict]:
        d = self.rng.choice(list(store.doctorants.values()))
        return "add_activity", {
            "id": d.id,
            "academic_year": self.rng.choice(["2023/2025", "2023", "23/24"]),
            "kind": "Publication",
            "description": "Статия",
            "detail": None,
        }

    def _illegal_activity_applied(self, store: Store) -> tuple[str, dict]:
        d = self.rng.choice(self._by_status(store, LifecycleStatus.APPLIED))
        return "add_activity", {
            "id": d.id,
            "academic_year": "2023/2024",
            "kind": "Publication",
            "description": "Статия",
            "detail": None,
        }

    def _illegal_empty_topic_title(self, store: Store) -> tuple[str, dict]:
        d = self.rng.choice(list(store.doctorants.values()))
        return "change_topic", {"id": d.id, "new_title": " ", "effective_date": "2024-05-01"}

    def _illegal_unknown_supervisor(self, store: Store) -> tuple[str, dict]:
        d = self.rng.choice(list(store.doctorants.values()))
        return "assign_supervisor", {
            "doctorant_id": d.id,
            "supervisor_id": "S99999999",
            "start_date": "2023-03-01",
        }

    def _illegal_not_habilitated(self, store: Store) -> tuple[str, dict]:
        rng = self.rng
        d = rng.choice(self._by_status(store, LifecycleStatus.ENROLLED))
        non_hab = [s.id for s in store.supervisors.values() if not s.habilitated]
        return "assign_supervisor", {
            "doctorant_id": d.id,
            "supervisor_id": rng.choice(non_hab),
            "start_date": "2023-03-01",
        }

    def _illegal_register_closed_competition(self, store: Store) -> tuple[str, dict]:
        closed = [c.id for c in store.competitions.values() if c.state is CompetitionState.CLOSED]
        return "register_doctorant", {
            "family_name": "Иванова",
            "given_name": "Мария",
            "national_id": None,
            "competition_id": self.rng.choice(closed),
        }

    def _illegal_close_closed(self, store: Store) -> tuple[str, dict]:
        closed = [c.id for c in store.competitions.values() if c.state is CompetitionState.CLOSED]
        return "close_competition", {"competition_id": self.rng.choice(closed)}


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240229)


@pytest.fixture
def fuzzer(rng) -> CommandFuzzer:
    return CommandFuzzer(rng)
