"""Registry commands: happy paths, every error, atomicity, query oracle."""

from __future__ import annotations

import random
from datetime import date
from decimal import Decimal

import pytest

from doktorant import registry as R
from doktorant.codec import store_to_doc
from doktorant.domain import (
    ActivityKind,
    DefenseOutcome,
    DoctorateForm,
    LifecycleStatus,
    validate_doctorant,
)
from doktorant.errors import (
    AlreadyClosed,
    CompetitionClosed,
    DateBeforeEnrollment,
    DateBeforeStart,
    DeadlineBeforeAnnouncement,
    DomainError,
    DuplicateOpenSupervision,
    EmptyKind,
    EmptyName,
    EmptyTopic,
    GradeOutOfRange,
    InvalidTerm,
    InvalidTransition,
    MalformedPayload,
    NoOpenSupervision,
    NonMonotoneDate,
    NotEnrolled,
    NotHabilitated,
    UnknownCommand,
    UnknownCompetition,
    UnknownDoctorant,
)

from conftest import CommandFuzzer
from oracles import filter_scan_oracle


@pytest.fixture
def store():
    return R.empty_store()


@pytest.fixture
def enrolled(store):
    store, did = R.register_doctorant(store, "Иванова", "Мария")
    store = R.enroll(store, did, DoctorateForm.FULL_TIME, date(2023, 2, 1), 36, "чл. 21", "Тема А")
    return store, did


class TestRegisterDoctorant:
    def test_base_case(self, store):
        updated, did = R.register_doctorant(store, "Иванова", "Мария")
        assert len(updated.doctorants) == 1
        d = updated.doctorants[did]
        assert d.status is LifecycleStatus.APPLIED
        assert (d.topics, d.supervisions, d.exams, d.activities, d.documents) == ((),) * 5
        assert store.doctorants == {}  # input untouched

    def test_empty_name(self, store):
        with pytest.raises(EmptyName):
            R.register_doctorant(store, "", "X")

    def test_closed_competition(self, store):
        store, cid = R.create_competition(
            store, date(2023, 9, 1), "Информатика", DoctorateForm.FULL_TIME, date(2023, 10, 31)
        )
        store = R.close_competition(store, cid)
        with pytest.raises(CompetitionClosed):
            R.register_doctorant(store, "Иванова", "Мария", competition_id=cid)

    def test_unknown_competition(self, store):
        with pytest.raises(UnknownCompetition):
            R.register_doctorant(store, "Иванова", "Мария", competition_id="K00000009")

    def test_ids_fresh_and_sortable(self, store):
        ids = []
        for i in range(12):
            store, did = R.register_doctorant(store, "Иванова", f"Мария{i}")
            ids.append(did)
        assert len(set(ids)) == 12
        assert ids == sorted(ids)


class TestEnroll:
    def test_legal_transition(self, enrolled):
        store, did = enrolled
        d = store.doctorants[did]
        assert d.status is LifecycleStatus.ENROLLED
        assert d.topics[0].seq_no == 1 and d.topics[0].title == "Тема А"
        assert d.topics[0].effective_date == d.enrollment.enrollment_date

    def test_enroll_twice(self, enrolled):
        store, did = enrolled
        with pytest.raises(InvalidTransition):
            R.enroll(store, did, DoctorateForm.PART_TIME, date(2024, 1, 1), 36, "x", "Тема")

    def test_zero_term(self, store):
        store, did = R.register_doctorant(store, "Иванова", "Мария")
        with pytest.raises(InvalidTerm):
            R.enroll(store, did, DoctorateForm.FULL_TIME, date(2023, 2, 1), 0, "x", "Тема")

    def test_empty_topic(self, store):
        store, did = R.register_doctorant(store, "Иванова", "Мария")
        with pytest.raises(EmptyTopic):
            R.enroll(store, did, DoctorateForm.FULL_TIME, date(2023, 2, 1), 36, "x", "  ")

    def test_unknown(self, store):
        with pytest.raises(UnknownDoctorant):
            R.enroll(store, "D00000009", DoctorateForm.FULL_TIME, date(2023, 2, 1), 36, "x", "Т")


class TestDismiss:
    def test_with_right(self, enrolled):
        store, did = enrolled
        updated = R.dismiss(store, did, date(2026, 2, 1), True)
        assert updated.doctorants[did].status is LifecycleStatus.DISMISSED_WITH_RIGHT

    def test_without_right(self, enrolled):
        store, did = enrolled
        updated = R.dismiss(store, did, date(2026, 2, 1), False)
        assert updated.doctorants[did].status is LifecycleStatus.DISMISSED_WITHOUT_RIGHT

    def test_from_applied(self, store):
        store, did = R.register_doctorant(store, "Иванова", "Мария")
        with pytest.raises(InvalidTransition):
            R.dismiss(store, did, date(2024, 1, 1), True)

    def test_date_before_enrollment(self, enrolled):
        store, did = enrolled
        with pytest.raises(DateBeforeEnrollment):
            R.dismiss(store, did, date(2023, 1, 31), True)


class TestDefense:
    def test_after_dismissal_with_right(self, enrolled):
        store, did = enrolled
        store = R.dismiss(store, did, date(2026, 2, 1), True)
        updated = R.record_defense(store, did, date(2026, 6, 1), DefenseOutcome.SUCCESSFUL)
        assert updated.doctorants[did].status is LifecycleStatus.DEFENDED

    def test_without_right_cannot_defend(self, enrolled):
        store, did = enrolled
        store = R.dismiss(store, did, date(2026, 2, 1), False)
        with pytest.raises(InvalidTransition):
            R.record_defense(store, did, date(2026, 6, 1), DefenseOutcome.SUCCESSFUL)

    def test_unsuccessful_keeps_status(self, enrolled):
        store, did = enrolled
        updated = R.record_defense(store, did, date(2025, 6, 1), DefenseOutcome.UNSUCCESSFUL)
        d = updated.doctorants[did]
        assert d.status is LifecycleStatus.ENROLLED
        assert d.defense is not None and d.defense.outcome is DefenseOutcome.UNSUCCESSFUL

    def test_date_before_enrollment(self, enrolled):
        store, did = enrolled
        with pytest.raises(DateBeforeEnrollment):
            R.record_defense(store, did, date(2023, 1, 1), DefenseOutcome.SUCCESSFUL)


class TestChangeTopic:
    def test_append(self, enrolled):
        store, did = enrolled
        updated = R.change_topic(store, did, "Тема Б", date(2024, 1, 1))
        topics = updated.doctorants[did].topics
        assert len(topics) == 2
        assert topics[-1].title == "Тема Б" and topics[-1].seq_no == 2
        assert topics[0] == store.doctorants[did].topics[0]

    def test_fuzz_appends(self, enrolled, rng):
        store, did = enrolled
        n = 37
        when = date(2023, 3, 1)
        for i in range(n):
            when = date.fromordinal(when.toordinal() + rng.randrange(0, 60))
            store = R.change_topic(store, did, f"Тема {i}", when)
        topics = store.doctorants[did].topics
        assert len(topics) == n + 1
        assert [t.seq_no for t in topics] == list(range(1, n + 2))

    def test_nonmonotone(self, enrolled):
        store, did = enrolled
        store = R.change_topic(store, did, "Тема Б", date(2024, 1, 1))
        with pytest.raises(NonMonotoneDate):
            R.change_topic(store, did, "Тема В", date(2023, 12, 31))

    def test_not_enrolled(self, store):
        store, did = R.register_doctorant(store, "Иванова", "Мария")
        with pytest.raises(NotEnrolled):
            R.change_topic(store, did, "Тема", date(2024, 1, 1))

    def test_allowed_after_dismissal_with_right(self, enrolled):
        store, did = enrolled
        store = R.dismiss(store, did, date(2026, 2, 1), True)
        updated = R.change_topic(store, did, "Тема Б", date(2026, 3, 1))
        assert len(updated.doctorants[did].topics) == 2


class TestSupervision:
    @pytest.fixture
    def with_supervisors(self, enrolled):
        store, did = enrolled
        store, s1 = R.register_supervisor(store, "Петров", "Георги", True, "доц.")
        store, s2 = R.register_supervisor(store, "Николова", "Елена", True, "проф.")
        store, s3 = R.register_supervisor(store, "Димов", "Иван", False)
        return store, did, s1, s2, s3

    def test_two_concurrent_supervisors(self, with_supervisors):
        store, did, s1, s2, _ = with_supervisors
        store = R.assign_supervisor(store, did, s1, date(2023, 2, 10))
        store = R.assign_supervisor(store, did, s2, date(2023, 3, 10))
        open_links = store.doctorants[did].open_supervisions()
        assert {s.supervisor_id for s in open_links} == {s1, s2}

    def test_not_habilitated(self, with_supervisors):
        store, did, _, _, s3 = with_supervisors
        with pytest.raises(NotHabilitated):
            R.assign_supervisor(store, did, s3, date(2023, 2, 10))

    def test_duplicate_open(self, with_supervisors):
        store, did, s1, _, _ = with_supervisors
        store = R.assign_supervisor(store, did, s1, date(2023, 2, 10))
        with pytest.raises(DuplicateOpenSupervision):
            R.assign_supervisor(store, did, s1, date(2023, 4, 10))

    def test_end_supervision_retained(self, with_supervisors):
        store, did, s1, _, _ = with_supervisors
        store = R.assign_supervisor(store, did, s1, date(2023, 2, 10))
        store = R.end_supervision(store, did, s1, date(2024, 2, 10))
        links = store.doctorants[did].supervisions
        assert len(links) == 1 and links[0].end_date == date(2024, 2, 10)

    def test_end_twice(self, with_supervisors):
        store, did, s1, _, _ = with_supervisors
        store = R.assign_supervisor(store, did, s1, date(2023, 2, 10))
        store = R.end_supervision(store, did, s1, date(2024, 2, 10))
        with pytest.raises(NoOpenSupervision):
            R.end_supervision(store, did, s1, date(2024, 3, 10))

    def test_end_before_start(self, with_supervisors):
        store, did, s1, _, _ = with_supervisors
        store = R.assign_supervisor(store, did, s1, date(2023, 2, 10))
        with pytest.raises(DateBeforeStart):
            R.end_supervision(store, did, s1, date(2023, 1, 10))

    def test_reassign_after_end(self, with_supervisors):
        store, did, s1, _, _ = with_supervisors
        store = R.assign_supervisor(store, did, s1, date(2023, 2, 10))
        store = R.end_supervision(store, did, s1, date(2024, 2, 10))
        store = R.assign_supervisor(store, did, s1, date(2024, 6, 1))
        assert len(store.doctorants[did].supervisions) == 2


class TestExamsActivitiesDocuments:
    def test_exam_appended_with_pass(self, enrolled):
        store, did = enrolled
        store = R.record_exam(store, did, "Специалност", date(2024, 3, 10), Decimal("5.50"))
        exam = store.doctorants[did].exams[0]
        assert exam.passes(Decimal("4.50"))

    def test_grade_out_of_range(self, enrolled):
        store, did = enrolled
        with pytest.raises(GradeOutOfRange):
            R.record_exam(store, did, "Специалност", date(2024, 3, 10), Decimal("6.01"))

    def test_boundary_grade_fails_threshold(self, enrolled):
        store, did = enrolled
        store = R.record_exam(store, did, "Специалност", date(2024, 3, 10), Decimal("4.49"))
        assert not store.doctorants[did].exams[0].passes(Decimal("4.50"))

    def test_exam_on_applied(self, store):
        store, did = R.register_doctorant(store, "Иванова", "Мария")
        with pytest.raises(NotEnrolled):
            R.record_exam(store, did, "Специалност", date(2024, 3, 10), Decimal("5.00"))

    def test_activity_appended(self, enrolled):
        store, did = enrolled
        store = R.add_activity(store, did, "2023/2024", ActivityKind.PUBLICATION, "Статия в списание X")
        act = store.doctorants[did].activities[0]
        assert act.kind is ActivityKind.PUBLICATION
        assert act.academic_year.label == "2023/2024"

    def test_activity_bad_year(self, enrolled):
        store, did = enrolled
        from doktorant.errors import BadAcademicYear

        with pytest.raises(BadAcademicYear):
            R.add_activity(store, did, "2023/2025", ActivityKind.PUBLICATION, "Статия")

    def test_activity_on_applied(self, store):
        store, did = R.register_doctorant(store, "Иванова", "Мария")
        with pytest.raises(NotEnrolled):
            R.add_activity(store, did, "2023/2024", ActivityKind.PUBLICATION, "Статия")

    def test_document_attach_and_empty_kind(self, enrolled):
        store, did = enrolled
        store = R.attach_document(store, did, "заповед за зачисляване", date(2023, 2, 1))
        assert store.doctorants[did].documents[0].kind == "заповед за зачисляване"
        with pytest.raises(EmptyKind):
            R.attach_document(store, did, " ", date(2023, 2, 1))

    def test_document_unknown_dossier(self, store):
        with pytest.raises(UnknownDoctorant):
            R.attach_document(store, "D00000009", "заповед", date(2023, 2, 1))


class TestSupervisorsAndCompetitions:
    def test_register_supervisor(self, store):
        updated, sid = R.register_supervisor(store, "Петров", "Георги", True, "доц.")
        assert updated.supervisors[sid].habilitated

    def test_register_supervisor_empty_name(self, store):
        with pytest.raises(EmptyName):
            R.register_supervisor(store, "", "X", True)

    def test_non_habilitated_stored_but_gated(self, enrolled):
        store, did = enrolled
        store, sid = R.register_supervisor(store, "Димов", "Иван", False)
        assert sid in store.supervisors
        with pytest.raises(NotHabilitated):
            R.assign_supervisor(store, did, sid, date(2023, 3, 1))

    def test_create_competition(self, store):
        updated, cid = R.create_competition(
            store, date(2023, 9, 1), "Информатика", DoctorateForm.FULL_TIME, date(2023, 10, 31)
        )
        assert updated.competitions[cid].state.value == "Open"

    def test_deadline_before_announcement(self, store):
        with pytest.raises(DeadlineBeforeAnnouncement):
            R.create_competition(
                store, date(2023, 9, 1), "Информатика", DoctorateForm.FULL_TIME, date(2023, 8, 31)
            )

    def test_close_then_close_again(self, store):
        store, cid = R.create_competition(
            store, date(2023, 9, 1), "Информатика", DoctorateForm.FULL_TIME, date(2023, 10, 31)
        )
        store = R.close_competition(store, cid)
        with pytest.raises(AlreadyClosed):
            R.close_competition(store, cid)

    def test_close_unknown(self, store):
        with pytest.raises(UnknownCompetition):
            R.close_competition(store, "K00000042")


class TestQuery:
    def test_empty(self, store):
        assert R.query_doctorants(store, R.DoctorantFilter()) == []

    def _mixed_store(self, rng):
        from conftest import build_random_store

        return build_random_store(rng, 120)

    def test_status_filter_matches_oracle(self, rng):
        store = self._mixed_store(rng)
        got = R.query_doctorants(store, R.DoctorantFilter(status=LifecycleStatus.ENROLLED))
        assert [d.id for d in got] == filter_scan_oracle(store, status="Enrolled")
        assert all(d.status is LifecycleStatus.ENROLLED for d in got)

    def test_supervisor_filter_matches_oracle(self, rng):
        store = self._mixed_store(rng)
        sid = next(iter(store.supervisors))
        got = R.query_doctorants(store, R.DoctorantFilter(supervisor_id=sid))
        assert [d.id for d in got] == filter_scan_oracle(store, supervisor_id=sid)

    def test_name_and_year_filter_matches_oracle(self, rng):
        from doktorant.domain import AcademicYear

        store = self._mixed_store(rng)
        got = R.query_doctorants(
            store,
            R.DoctorantFilter(name="иван", academic_year=AcademicYear(2022)),
        )
        assert [d.id for d in got] == filter_scan_oracle(
            store, name="иван", year_label="2022/2023"
        )

    def test_deterministic_ordering(self, rng):
        store = self._mixed_store(rng)
        first = [d.id for d in R.query_doctorants(store)]
        second = [d.id for d in R.query_doctorants(store)]
        assert first == second
        keys = [(d.family_name, d.given_name, d.id) for d in R.query_doctorants(store)]
        assert keys == sorted(keys)


class TestPayloadCodec:
    def test_round_trip(self):
        payload = {
            "id": "D00000001",
            "form": "FullTime",
            "enrollment_date": "2023-02-01",
            "term_months": 36,
            "basis": "чл. 21",
            "initial_topic_title": "Тема А",
        }
        assert R.canonical_payload("enroll", payload) == payload

    def test_optional_keys_filled_in(self):
        canonical = R.canonical_payload(
            "register_doctorant", {"family_name": "Иванова", "given_name": "Мария"}
        )
        assert canonical == {
            "family_name": "Иванова",
            "given_name": "Мария",
            "national_id": None,
            "competition_id": None,
        }

    def test_unknown_key_rejected(self):
        with pytest.raises(MalformedPayload):
            R.parse_payload("close_competition", {"competition_id": "K1", "extra": 1})

    def test_missing_key_rejected(self):
        with pytest.raises(MalformedPayload):
            R.parse_payload("enroll", {"id": "D1"})

    def test_unknown_command(self):
        with pytest.raises(UnknownCommand):
            R.apply_command(R.empty_store(), "drop_everything", {})

    def test_grade_normalized(self):
        payload = R.canonical_payload(
            "record_exam",
            {"id": "D1", "subject": "X", "date": "2024-01-01", "grade": 5.5},
        )
        assert payload["grade"] == "5.50"


class TestStoreInvariants:
    def test_rejected_commands_leave_store_bit_identical(self, rng):
        fuzzer = CommandFuzzer(rng, max_doctorants=40)
        store = R.empty_store()
        for _ in range(120):
            store = R.apply_command(store, *fuzzer.propose(store, legal=True)).store
        rejected = 0
        for _ in range(300):
            cmd, payload = fuzzer.propose(store, legal=False)
            before = store_to_doc(store)
            with pytest.raises(DomainError):
                R.apply_command(store, cmd, payload)
            rejected += 1
            assert store_to_doc(store) == before
        assert rejected == 300

    def test_event_seq_counts_accepted_commands(self, rng):
        fuzzer = CommandFuzzer(rng)
        store = R.empty_store()
        initial = store.next_event_seq
        accepted = 0
        for _ in range(400):
            legal = rng.random() < 0.7
            cmd, payload = fuzzer.propose(store, legal=legal)
            try:
                store = R.apply_command(store, cmd, payload).store
                accepted += 1
            except DomainError:
                assert not legal, f"legal proposal {cmd} rejected"
        assert store.next_event_seq == initial + accepted

    def test_fuzzed_stores_stay_valid(self, rng):
        fuzzer = CommandFuzzer(rng, max_doctorants=60)
        store = R.empty_store()
        snapshots = {}
        for step in range(800):
            legal = rng.random() < 0.75
            cmd, payload = fuzzer.propose(store, legal=legal)
            try:
                outcome = R.apply_command(store, cmd, payload)
            except DomainError:
                continue
            if outcome.entity == "doctorant":
                prev = snapshots.get(outcome.entity_id, ())
                topics = outcome.store.doctorants[outcome.entity_id].topics
                assert topics[: len(prev)] == prev, "topic history must be prefix-stable"
                snapshots[outcome.entity_id] = topics
            store = outcome.store
        for d in store.doctorants.values():
            assert validate_doctorant(d) == []
        assert R.referential_integrity(store) == []
