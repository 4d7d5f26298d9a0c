"""Append-only persistence for gate events and access lists.

Two line-delimited JSON logs live in the storage directory:

    events.jsonl   one GateEvent per line, event_id strictly increasing
    lists.jsonl    list mutations: {"op":"upsert",...} / {"op":"remove",...}

State is log replay: reopening a store reproduces the exact event list
and list table, so reports and occupancy are restart-safe. Frame images
are stored content-addressed under ``frames/``.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

WHITE = "WHITE"
BLACK = "BLACK"
LIST_KINDS = (WHITE, BLACK)

IN = "IN"
OUT = "OUT"
DIRECTIONS = (IN, OUT)

OPEN = "OPEN"
DENY = "DENY"
DENY_ALARM = "DENY_ALARM"
MANUAL_REVIEW = "MANUAL_REVIEW"
MANUAL_OPEN = "MANUAL_OPEN"
DECISIONS = (OPEN, DENY, DENY_ALARM, MANUAL_REVIEW, MANUAL_OPEN)

WEEKDAYS = ("MON", "TUE", "WED", "THU", "FRI", "SAT", "SUN")

_FRAME_EXT = {b"BM": ".bmp", b"P5": ".pgm", b"P6": ".ppm", b"\xff\xd8": ".jpg"}


class StoreCorrupt(ValueError):
    """A log line failed to parse or violated ordering."""


@dataclass(frozen=True)
class AccessEntry:
    """White/black-list membership with optional validity constraints."""

    plate: str
    list_kind: str
    valid_from: int | None = None       # ms since epoch
    valid_to: int | None = None
    allowed_days: tuple[str, ...] | None = None
    allowed_hours: tuple[str, str] | None = None   # ("HH:MM", "HH:MM")
    note: str = ""

    def __post_init__(self):
        if self.list_kind not in LIST_KINDS:
            raise ValueError(f"list_kind must be one of {LIST_KINDS}, got {self.list_kind!r}")
        if self.valid_from is not None and self.valid_to is not None \
                and self.valid_from > self.valid_to:
            raise ValueError("valid_from must not exceed valid_to")
        if self.allowed_days is not None:
            bad = [d for d in self.allowed_days if d not in WEEKDAYS]
            if bad:
                raise ValueError(f"unknown weekday names {bad}; use {WEEKDAYS}")
            object.__setattr__(self, "allowed_days", tuple(self.allowed_days))
        if self.allowed_hours is not None:
            start, end = self.allowed_hours
            for hhmm in (start, end):
                _parse_hhmm(hhmm)
            object.__setattr__(self, "allowed_hours", (start, end))


@dataclass(frozen=True)
class GateEvent:
    """One immutable audit record of a gate transaction."""

    event_id: int
    ts: int                              # ms since epoch
    gate_id: str
    direction: str
    plate: str
    decision: str
    confidence: float
    frame_ref: str = ""
    operator_id: str | None = None
    reason: str | None = None

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"direction must be IN or OUT, got {self.direction!r}")
        if self.decision not in DECISIONS:
            raise ValueError(f"unknown decision {self.decision!r}")
        if self.decision == MANUAL_OPEN and not self.operator_id:
            raise ValueError("MANUAL_OPEN events require operator_id")


@dataclass
class OccupancyState:
    """Plates currently inside plus the count of unmatched OUT events."""

    inside: set[str] = field(default_factory=set)
    anomalies: int = 0

    @property
    def count(self) -> int:
        return len(self.inside)


def _parse_hhmm(text: str) -> int:
    """'HH:MM' -> minutes past midnight, validating the format."""
    parts = text.split(":")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ValueError(f"expected HH:MM, got {text!r}")
    hh, mm = int(parts[0]), int(parts[1])
    if not (0 <= hh <= 23 and 0 <= mm <= 59):
        raise ValueError(f"hour range out of bounds: {text!r}")
    return hh * 60 + mm


class EventStore:
    """Replayed append-only store; thread-safe appends with change signaling."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "frames").mkdir(exist_ok=True)
        self._events_path = self.root / "events.jsonl"
        self._lists_path = self.root / "lists.jsonl"
        self._lock = threading.Lock()
        self._changed = threading.Condition(self._lock)
        self.events: list[GateEvent] = []
        self.entries: dict[tuple[str, str], AccessEntry] = {}
        self._replay()

    # -- replay ------------------------------------------------------------

    def _replay(self) -> None:
        last_id = 0
        if self._events_path.exists():
            for line_no, line in enumerate(
                    self._events_path.read_text(encoding="utf-8").splitlines(), start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    event = GateEvent(**rec)
                except (json.JSONDecodeError, TypeError, ValueError) as exc:
                    raise StoreCorrupt(f"{self._events_path}:{line_no}: {exc}") from exc
                if event.event_id <= last_id:
                    raise StoreCorrupt(
                        f"{self._events_path}:{line_no}: event_id {event.event_id} not increasing")
                last_id = event.event_id
                self.events.append(event)
        if self._lists_path.exists():
            for line_no, line in enumerate(
                    self._lists_path.read_text(encoding="utf-8").splitlines(), start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    op = rec.pop("op")
                    if op == "upsert":
                        entry = AccessEntry(**{k: _detuple(k, v) for k, v in rec.items()})
                        self.entries[(entry.list_kind, entry.plate)] = entry
                    elif op == "remove":
                        self.entries.pop((rec["list_kind"], rec["plate"]), None)
                    else:
                        raise ValueError(f"unknown op {op!r}")
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise StoreCorrupt(f"{self._lists_path}:{line_no}: {exc}") from exc

    # -- events ------------------------------------------------------------

    def next_event_id(self) -> int:
        with self._lock:
            return (self.events[-1].event_id if self.events else 0) + 1

    def append_event(self, *, ts: int, gate_id: str, direction: str, plate: str,
                     decision: str, confidence: float, frame_ref: str = "",
                     operator_id: str | None = None, reason: str | None = None) -> GateEvent:
        with self._changed:
            event = GateEvent(
                event_id=(self.events[-1].event_id if self.events else 0) + 1,
                ts=ts, gate_id=gate_id, direction=direction, plate=plate,
                decision=decision, confidence=confidence, frame_ref=frame_ref,
                operator_id=operator_id, reason=reason,
            )
            self._append_line(self._events_path, asdict(event))
            self.events.append(event)
            self._changed.notify_all()
            return event

    def events_since(self, since_id: int) -> list[GateEvent]:
        with self._lock:
            return [e for e in self.events if e.event_id > since_id]

    def wait_events(self, since_id: int, timeout_s: float) -> list[GateEvent]:
        """Long-poll: block until an event newer than since_id exists or timeout."""
        deadline = time.monotonic() + timeout_s
        with self._changed:
            while True:
                fresh = [e for e in self.events if e.event_id > since_id]
                remaining = deadline - time.monotonic()
                if fresh or remaining <= 0:
                    return fresh
                self._changed.wait(timeout=remaining)

    # -- lists -------------------------------------------------------------

    def upsert_entry(self, entry: AccessEntry) -> AccessEntry:
        with self._changed:
            self._append_line(self._lists_path, {"op": "upsert", **asdict(entry)})
            self.entries[(entry.list_kind, entry.plate)] = entry
            return entry

    def remove_entry(self, list_kind: str, plate: str) -> bool:
        with self._changed:
            if (list_kind, plate) not in self.entries:
                return False
            self._append_line(self._lists_path, {"op": "remove", "list_kind": list_kind,
                                                 "plate": plate})
            del self.entries[(list_kind, plate)]
            return True

    def list_entries(self) -> list[AccessEntry]:
        with self._lock:
            return sorted(self.entries.values(), key=lambda e: (e.list_kind, e.plate))

    def find_entry(self, list_kind: str, plate: str) -> AccessEntry | None:
        with self._lock:
            return self.entries.get((list_kind, plate))

    # -- frames ------------------------------------------------------------

    def save_frame(self, data: bytes) -> str:
        """Store frame bytes content-addressed; returns a path relative to root."""
        digest = hashlib.sha256(data).hexdigest()[:16]
        ext = _FRAME_EXT.get(data[:2], ".bin")
        rel = f"frames/{digest}{ext}"
        path = self.root / rel
        if not path.exists():
            path.write_bytes(data)
        return rel

    # -- plumbing ----------------------------------------------------------

    @staticmethod
    def _append_line(path: Path, record: dict) -> None:
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")
            fh.flush()


def _detuple(key: str, value):
    """JSON arrays back to the tuple fields AccessEntry expects."""
    if value is None:
        return None
    if key == "allowed_days":
        return tuple(value)
    if key == "allowed_hours":
        return tuple(value)
    return value


def replay_occupancy(events: list[GateEvent]) -> OccupancyState:
    """Fold the event log into who-is-inside.

    IN events that opened the gate (OPEN or MANUAL_OPEN) add the plate;
    any OUT event removes it when present and otherwise counts as an
    anomaly. Events with an empty plate cannot be tracked and are skipped.
    """
    state = OccupancyState()
    for event in events:
        if not event.plate:
            continue
        if event.direction == IN and event.decision in (OPEN, MANUAL_OPEN):
            state.inside.add(event.plate)
        elif event.direction == OUT:
            if event.plate in state.inside:
                state.inside.discard(event.plate)
            else:
                state.anomalies += 1
    return state
