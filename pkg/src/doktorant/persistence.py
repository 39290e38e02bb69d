"""Durable storage: append-only command journal plus snapshots.

Layout inside a data directory:

    journal.jsonl   one JSON object per line: {"seq":…, "ts":"…", "cmd":"…", "payload":{…}}
    snapshot.json   {"format_version":1, "as_of_seq":…, "store":{…}}
    lock            pid of the single writer process

The journal is the authority; a snapshot only shortcuts replay. Appends are
flushed and fsynced before they are acknowledged, so a crash can only ever
cost the entry that was never acknowledged. A torn final line (no terminating
newline) is treated as that crash remnant: readers skip it, the writer
truncates it on open. Interior damage is corruption and refuses to load.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Optional, Union

from .codec import DocError, store_from_doc, store_to_doc
from .domain import validate_doctorant
from .errors import (
    CorruptJournal,
    CorruptSnapshot,
    DomainError,
    IoFailure,
    LockHeld,
    MalformedPayload,
    SequenceConflict,
    VersionMismatch,
)
from .registry import (
    CommandOutcome,
    Store,
    apply_command,
    canonical_payload,
    empty_store,
    referential_integrity,
)

JOURNAL_FILE = "journal.jsonl"
SNAPSHOT_FILE = "snapshot.json"
LOCK_FILE = "lock"
FORMAT_VERSION = 1

_ENTRY_KEYS = {"seq", "ts", "cmd", "payload"}


@dataclass(frozen=True)
class JournalEntry:
    seq: int
    ts: str
    cmd: str
    payload: dict[str, Any]


@dataclass(frozen=True)
class Snapshot:
    as_of_seq: int
    store: Store
    format_version: int = FORMAT_VERSION


@dataclass(frozen=True)
class Finding:
    """One integrity-check observation; an empty findings list means healthy."""

    code: str
    detail: str
    line_no: Optional[int] = None
    entity_id: Optional[str] = None

    def __str__(self) -> str:
        where = f" line {self.line_no}" if self.line_no is not None else ""
        who = f" [{self.entity_id}]" if self.entity_id else ""
        return f"{self.code}{where}{who}: {self.detail}"


def now_utc() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def encode_entry(entry: JournalEntry) -> bytes:
    doc = {"seq": entry.seq, "ts": entry.ts, "cmd": entry.cmd, "payload": entry.payload}
    return (json.dumps(doc, ensure_ascii=False) + "\n").encode("utf-8")


def decode_entry(raw: bytes, line_no: int) -> JournalEntry:
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptJournal(line_no, f"unparseable entry: {exc}") from None
    if not isinstance(doc, dict) or set(doc) != _ENTRY_KEYS:
        raise CorruptJournal(line_no, "entry must have exactly seq/ts/cmd/payload")
    seq, ts, cmd, payload = doc["seq"], doc["ts"], doc["cmd"], doc["payload"]
    if not isinstance(seq, int) or isinstance(seq, bool) or seq < 1:
        raise CorruptJournal(line_no, f"bad seq {seq!r}")
    if not isinstance(ts, str) or not isinstance(cmd, str) or not isinstance(payload, dict):
        raise CorruptJournal(line_no, "bad field types")
    return JournalEntry(seq, ts, cmd, payload)


@dataclass
class _ScanResult:
    entries: list[JournalEntry] = field(default_factory=list)
    clean_bytes: int = 0          # prefix covered by newline-terminated entries
    tail_entry: Optional[JournalEntry] = None  # complete entry missing its newline
    torn_bytes: int = 0           # unusable crash remnant after clean_bytes


def _scan_journal(path: Path) -> _ScanResult:
    """Parse the journal strictly, tolerating only an unterminated tail."""
    result = _ScanResult()
    data = path.read_bytes()
    offset = 0
    line_no = 0
    last_seq: Optional[int] = None
    while offset < len(data):
        nl = data.find(b"\n", offset)
        line_no += 1
        if nl == -1:
            fragment = data[offset:]
            try:
                entry = decode_entry(fragment, line_no)
            except CorruptJournal:
                result.torn_bytes = len(fragment)
                return result
            if last_seq is not None and entry.seq != last_seq + 1:
                result.torn_bytes = len(fragment)
                return result
            result.tail_entry = entry
            return result
        entry = decode_entry(data[offset:nl], line_no)
        if last_seq is not None and entry.seq != last_seq + 1:
            raise CorruptJournal(line_no, f"sequence gap: {last_seq} then {entry.seq}")
        last_seq = entry.seq
        result.entries.append(entry)
        offset = nl + 1
        result.clean_bytes = offset
    return result


def _all_entries(scan: _ScanResult) -> list[JournalEntry]:
    if scan.tail_entry is not None:
        return scan.entries + [scan.tail_entry]
    return scan.entries


def _fsync_dir(path: Path) -> None:
    fd = os.open(path, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


def read_snapshot(data_dir: Union[str, Path]) -> Optional[Snapshot]:
    path = Path(data_dir) / SNAPSHOT_FILE
    if not path.exists():
        return None
    try:
        doc = json.loads(path.read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CorruptSnapshot(str(exc)) from None
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise CorruptSnapshot("snapshot must carry format_version")
    version = doc["format_version"]
    if version != FORMAT_VERSION:
        raise VersionMismatch(version, FORMAT_VERSION)
    try:
        as_of = int(doc["as_of_seq"])
        store = store_from_doc(doc["store"])
    except (KeyError, TypeError, ValueError, DocError) as exc:
        raise CorruptSnapshot(str(exc)) from None
    if store.next_event_seq != as_of + 1:
        raise CorruptSnapshot(
            f"store next_event_seq {store.next_event_seq} inconsistent with as_of_seq {as_of}"
        )
    return Snapshot(as_of, store, version)


def open_store(data_dir: Union[str, Path]) -> Store:
    """Load the current store: snapshot (if any) plus replayed journal tail.

    Pure function of the directory's bytes. On a fresh directory returns the
    empty store and creates an empty journal.
    """
    base_dir = Path(data_dir)
    if not base_dir.is_dir():
        raise IoFailure(f"not a directory: {base_dir}")
    snapshot = read_snapshot(base_dir)
    journal = base_dir / JOURNAL_FILE
    if not journal.exists():
        journal.touch()
        _fsync_dir(base_dir)
    scan = _scan_journal(journal)
    entries = _all_entries(scan)

    store = snapshot.store if snapshot else empty_store()
    as_of = snapshot.as_of_seq if snapshot else 0
    if entries and entries[0].seq > as_of + 1:
        raise CorruptJournal(1, f"journal begins at seq {entries[0].seq}, need {as_of + 1}")
    for line_no, entry in enumerate(entries, start=1):
        if entry.seq <= as_of:
            continue
        if entry.seq != store.next_event_seq:
            raise CorruptJournal(line_no, f"entry seq {entry.seq} != expected {store.next_event_seq}")
        try:
            store = apply_command(store, entry.cmd, entry.payload).store
        except DomainError as exc:
            raise CorruptJournal(line_no, f"replay rejected: {exc.code}: {exc}") from None
    return store


def last_journal_seq(data_dir: Union[str, Path]) -> int:
    journal = Path(data_dir) / JOURNAL_FILE
    if not journal.exists():
        return 0
    entries = _all_entries(_scan_journal(journal))
    return entries[-1].seq if entries else 0


class JournalWriter:
    """Exclusive append handle; repairs a torn tail on open, fsyncs per entry."""

    def __init__(self, path: Path, last_seq: int, fh):
        self._path = path
        self._fh = fh
        self.last_seq = last_seq

    @classmethod
    def open(cls, data_dir: Union[str, Path]) -> "JournalWriter":
        path = Path(data_dir) / JOURNAL_FILE
        if not path.exists():
            path.touch()
            _fsync_dir(path.parent)
        scan = _scan_journal(path)
        fh = open(path, "r+b")
        fh.truncate(scan.clean_bytes)
        fh.seek(scan.clean_bytes)
        last_seq = scan.entries[-1].seq if scan.entries else 0
        writer = cls(path, last_seq, fh)
        if scan.tail_entry is not None:
            # Complete entry that lost only its newline: rewrite it terminated.
            writer._write(scan.tail_entry)
        return writer

    def _write(self, entry: JournalEntry) -> None:
        try:
            self._fh.write(encode_entry(entry))
            self._fh.flush()
            os.fsync(self._fh.fileno())
        except OSError as exc:
            raise IoFailure(f"journal append failed: {exc}") from exc
        self.last_seq = entry.seq

    def append(self, entry: JournalEntry) -> None:
        if entry.seq != self.last_seq + 1:
            raise SequenceConflict(f"entry seq {entry.seq}, journal tail {self.last_seq}")
        self._write(entry)

    def close(self) -> None:
        self._fh.close()


def append_command(data_dir: Union[str, Path], entry: JournalEntry) -> None:
    """One-shot durable append; returns only once the entry is fsynced."""
    writer = JournalWriter.open(data_dir)
    try:
        writer.append(entry)
    finally:
        writer.close()


def write_snapshot(data_dir: Union[str, Path], snapshot: Snapshot) -> None:
    """Atomically replace the snapshot (write-temp-then-rename)."""
    base_dir = Path(data_dir)
    tail = last_journal_seq(base_dir)
    if snapshot.as_of_seq > tail:
        raise SequenceConflict(f"snapshot as_of_seq {snapshot.as_of_seq} beyond journal tail {tail}")
    if snapshot.store.next_event_seq != snapshot.as_of_seq + 1:
        raise SequenceConflict(
            f"snapshot store next_event_seq {snapshot.store.next_event_seq} "
            f"inconsistent with as_of_seq {snapshot.as_of_seq}"
        )
    doc = {
        "format_version": snapshot.format_version,
        "as_of_seq": snapshot.as_of_seq,
        "store": store_to_doc(snapshot.store),
    }
    final = base_dir / SNAPSHOT_FILE
    tmp = base_dir / (SNAPSHOT_FILE + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, ensure_ascii=False)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, final)
        _fsync_dir(base_dir)
    except OSError as exc:
        raise IoFailure(f"snapshot write failed: {exc}") from exc


def integrity_check(data_dir: Union[str, Path]) -> list[Finding]:
    """Verify journal continuity, snapshot consistency and replayed domain state.

    Never raises for bad data: every problem becomes a finding.
    """
    findings: list[Finding] = []
    base_dir = Path(data_dir)
    if not base_dir.is_dir():
        return [Finding("MissingDataDir", str(base_dir))]

    snapshot: Optional[Snapshot] = None
    try:
        snapshot = read_snapshot(base_dir)
    except VersionMismatch as exc:
        findings.append(Finding("VersionMismatch", str(exc)))
    except CorruptSnapshot as exc:
        findings.append(Finding("CorruptSnapshot", str(exc)))

    journal = base_dir / JOURNAL_FILE
    entries: list[JournalEntry] = []
    if journal.exists():
        entries, findings_j = _lenient_journal_read(journal)
        findings.extend(findings_j)
    else:
        findings.append(Finding("MissingJournal", str(journal)))

    store = snapshot.store if snapshot else empty_store()
    as_of = snapshot.as_of_seq if snapshot else 0
    if entries:
        if entries[0].seq > as_of + 1:
            findings.append(
                Finding("MissingEntries", f"journal begins at {entries[0].seq}, need {as_of + 1}", line_no=1)
            )
            return findings
        if entries[-1].seq < as_of:
            findings.append(
                Finding("SnapshotAheadOfJournal", f"as_of_seq {as_of} beyond tail {entries[-1].seq}")
            )
            return findings
    elif snapshot is None:
        return findings  # empty journal, no snapshot: healthy fresh directory

    for line_no, entry in enumerate(entries, start=1):
        if entry.seq <= as_of:
            continue
        try:
            store = apply_command(store, entry.cmd, entry.payload).store
        except MalformedPayload as exc:
            findings.append(Finding("CorruptEntry", f"bad payload: {exc}", line_no=line_no))
            return findings
        except DomainError as exc:
            findings.append(
                Finding(
                    "DomainViolation",
                    f"replay rejected: {exc.code}: {exc}",
                    line_no=line_no,
                    entity_id=_payload_subject(entry.payload),
                )
            )
            return findings

    for dossier in store.doctorants.values():
        for violation in validate_doctorant(dossier):
            findings.append(
                Finding("DomainViolation", f"{violation.code} at {violation.path}", entity_id=dossier.id)
            )
    for violation in referential_integrity(store):
        findings.append(Finding("ReferentialIntegrity", f"{violation.code} at {violation.path}"))
    return findings


def _payload_subject(payload: dict[str, Any]) -> Optional[str]:
    for key in ("id", "doctorant_id"):
        value = payload.get(key)
        if isinstance(value, str):
            return value
    return None


def _lenient_journal_read(path: Path) -> tuple[list[JournalEntry], list[Finding]]:
    """Line-by-line read for the integrity checker: collect, don't raise."""
    findings: list[Finding] = []
    entries: list[JournalEntry] = []
    data = path.read_bytes()
    offset = 0
    line_no = 0
    last_seq: Optional[int] = None
    while offset < len(data):
        nl = data.find(b"\n", offset)
        terminated = nl != -1
        end = nl if terminated else len(data)
        line_no += 1
        raw = data[offset:end]
        offset = end + 1
        try:
            entry = decode_entry(raw, line_no)
        except CorruptJournal as exc:
            if terminated:
                findings.append(Finding("CorruptEntry", str(exc), line_no=line_no))
            else:
                findings.append(Finding("TornTail", "unterminated final line", line_no=line_no))
            continue
        if last_seq is not None and entry.seq != last_seq + 1:
            findings.append(
                Finding("SequenceGap", f"{last_seq} then {entry.seq}", line_no=line_no)
            )
        last_seq = entry.seq
        entries.append(entry)
    return entries, findings


# -- writer lock ---------------------------------------------------------------

class DataDirLock:
    """Pid-stamped exclusive lock; stale locks of dead processes are reclaimed."""

    def __init__(self, data_dir: Union[str, Path]):
        self._path = Path(data_dir) / LOCK_FILE
        self._held = False

    def acquire(self) -> "DataDirLock":
        for _ in range(2):
            try:
                fd = os.open(self._path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            except FileExistsError:
                holder = _lock_holder(self._path)
                if holder is not None and _pid_alive(holder):
                    raise LockHeld(f"{self._path} held by pid {holder}") from None
                # stale: owner is gone, reclaim
                try:
                    self._path.unlink()
                except FileNotFoundError:
                    pass
                continue
            with os.fdopen(fd, "w") as fh:
                fh.write(str(os.getpid()))
            self._held = True
            return self
        raise LockHeld(str(self._path))

    def release(self) -> None:
        if self._held:
            try:
                self._path.unlink()
            except FileNotFoundError:
                pass
            self._held = False

    def __enter__(self) -> "DataDirLock":
        return self.acquire()

    def __exit__(self, *exc_info) -> None:
        self.release()


def _lock_holder(path: Path) -> Optional[int]:
    try:
        return int(path.read_text().strip())
    except (OSError, ValueError):
        return None


def _pid_alive(pid: int) -> bool:
    try:
        os.kill(pid, 0)
    except ProcessLookupError:
        return False
    except PermissionError:
        return True
    return True


def is_write_locked(data_dir: Union[str, Path]) -> bool:
    path = Path(data_dir) / LOCK_FILE
    if not path.exists():
        return False
    holder = _lock_holder(path)
    return holder is not None and _pid_alive(holder) and holder != os.getpid()


# -- journaled engine ------------------------------------------------------------

class StoreEngine:
    """Single-writer store handle: apply a command, journal it, then publish.

    A command is acknowledged only after its journal entry is fsynced, so an
    acknowledged command survives a hard kill. Thread serialization is the
    caller's job (the HTTP facade wraps `execute` in one writer lock); `store`
    reads are safe from any thread because the value is immutable.
    """

    def __init__(self, data_dir: Union[str, Path]):
        self._data_dir = Path(data_dir)
        self._lock = DataDirLock(self._data_dir).acquire()
        try:
            self._store = open_store(self._data_dir)
            self._writer = JournalWriter.open(self._data_dir)
        except BaseException:
            self._lock.release()
            raise

    @property
    def store(self) -> Store:
        return self._store

    @property
    def data_dir(self) -> Path:
        return self._data_dir

    def execute(self, cmd: str, payload: dict[str, Any]) -> CommandOutcome:
        outcome = apply_command(self._store, cmd, payload)
        entry = JournalEntry(
            seq=self._store.next_event_seq,
            ts=now_utc(),
            cmd=cmd,
            payload=canonical_payload(cmd, payload),
        )
        self._writer.append(entry)
        self._store = outcome.store
        return outcome

    def write_snapshot(self) -> None:
        write_snapshot(
            self._data_dir,
            Snapshot(as_of_seq=self._store.next_event_seq - 1, store=self._store),
        )

    def close(self, snapshot: bool = True) -> None:
        try:
            if snapshot:
                self.write_snapshot()
            self._writer.close()
        finally:
            self._lock.release()
