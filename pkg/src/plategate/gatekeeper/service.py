"""Gate access control: frame sessions, the decision table, and reports.

A GateService owns one session per gate. Frames stream in, validated
reads accumulate in the session window, and once the window is ready the
reads are fused and judged against the white/black lists. Every decision
is appended to the event store; occupancy and traffic reports are pure
folds over that log. The clock is injected so every time-window rule is
testable with fixed timestamps.
"""

from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .. import imgio
from ..consensus import (
    ConsensusResult,
    FrameObservation,
    InsufficientFrames,
    LengthMismatch,
    fuse,
    window_ready,
)
from ..glyphs import GlyphTemplate, default_templates, load_templates
from ..grammar import ConfusionTable, PlateGrammar, default_grammar, load_grammar
from ..ocr import PlateRead
from ..pipeline import recognize_frame
from .config import DEFAULT_MIN_CONFIDENCE, ServiceConfig
from .store import (
    BLACK,
    DENY,
    DENY_ALARM,
    DIRECTIONS,
    IN,
    MANUAL_OPEN,
    MANUAL_REVIEW,
    OPEN,
    WEEKDAYS,
    WHITE,
    AccessEntry,
    EventStore,
    GateEvent,
    OccupancyState,
    replay_occupancy,
)

LOG = logging.getLogger("plategate.gatekeeper")

ACCUMULATING = "ACCUMULATING"
DECIDED = "DECIDED"


class UnknownGate(KeyError):
    """Gate id is not configured."""


class MissingOperator(ValueError):
    """Manual open requires a non-empty operator id."""


class InvalidPlate(ValueError):
    """List entry plate does not satisfy the active grammar."""


class BadRange(ValueError):
    """Report range has from > to."""


class BadDirection(ValueError):
    """Direction is neither IN nor OUT."""


# ---------------------------------------------------------------------------
# Validity windows
# ---------------------------------------------------------------------------

def _minutes_of(hhmm: str) -> int:
    hh, mm = hhmm.split(":")
    return int(hh) * 60 + int(mm)


def within_validity(entry: AccessEntry, now_ms: int) -> bool:
    """True when now falls inside every constraint the entry carries.

    Absent constraints pass. Day names and hour ranges are evaluated in
    UTC; an allowed_hours pair with start after end wraps across
    midnight (22:00-06:00 admits 23:30 and 05:00 but not noon).
    """
    if entry.valid_from is not None and now_ms < entry.valid_from:
        return False
    if entry.valid_to is not None and now_ms > entry.valid_to:
        return False
    if entry.allowed_days is not None or entry.allowed_hours is not None:
        moment = datetime.fromtimestamp(now_ms / 1000.0, tz=timezone.utc)
        if entry.allowed_days is not None and WEEKDAYS[moment.weekday()] not in entry.allowed_days:
            return False
        if entry.allowed_hours is not None:
            minute = moment.hour * 60 + moment.minute
            start, end = (_minutes_of(h) for h in entry.allowed_hours)
            inside = start <= minute <= end if start <= end else minute >= start or minute <= end
            if not inside:
                return False
    return True


# ---------------------------------------------------------------------------
# The decision table
# ---------------------------------------------------------------------------

def decide(result: ConsensusResult, entries: list[AccessEntry], now_ms: int,
           min_confidence: float = DEFAULT_MIN_CONFIDENCE) -> str:
    """Pure five-rule access decision, applied strictly in order:

    1. overall confidence below min_confidence  -> MANUAL_REVIEW
    2. plate on the black list                  -> DENY_ALARM
    3. on the white list, inside its window     -> OPEN
    4. on the white list, outside its window    -> DENY
    5. otherwise                                -> MANUAL_REVIEW

    Black-list membership ignores validity windows: a banned plate stays
    banned at any hour, and bans take precedence over white entries.
    """
    if result.overall_confidence < min_confidence:
        return MANUAL_REVIEW
    plate = result.plate
    if any(e.list_kind == BLACK and e.plate == plate for e in entries):
        return DENY_ALARM
    white = next((e for e in entries if e.list_kind == WHITE and e.plate == plate), None)
    if white is not None:
        return OPEN if within_validity(white, now_ms) else DENY
    return MANUAL_REVIEW


# ---------------------------------------------------------------------------
# Sessions
# ---------------------------------------------------------------------------

@dataclass
class GateSession:
    """Frame window for one vehicle at one gate."""

    gate_id: str
    direction: str
    opened_at: int                       # ms, first frame of the session
    observations: list[FrameObservation] = field(default_factory=list)
    frames_seen: int = 0
    last_frame_ref: str = ""


def _corrected_read(read: PlateRead, corrections: list[tuple[int, str, str]]) -> PlateRead:
    """Apply grammar corrections to a read so fusion votes on legal chars."""
    if not corrections:
        return read
    chars = list(read.chars)
    for pos, _was, now in corrections:
        chars[pos] = dataclasses.replace(chars[pos], best=now)
    return PlateRead(chars=chars)


# ---------------------------------------------------------------------------
# Service
# ---------------------------------------------------------------------------

class GateService:
    """Single-process access-control core behind the HTTP API."""

    def __init__(
        self,
        config: ServiceConfig,
        store: EventStore | None = None,
        *,
        clock=None,
        templates: list[GlyphTemplate] | None = None,
        grammar: PlateGrammar | None = None,
        confusion: ConfusionTable | None = None,
        actuator=None,
    ):
        self.config = config
        self.store = store if store is not None else EventStore(config.storage_dir)
        self.clock = clock if clock is not None else (lambda: int(time.time() * 1000))
        if templates is not None:
            self.templates = templates
        elif config.template_file is not None:
            self.templates = load_templates(config.template_file)
        else:
            self.templates = default_templates()
        if grammar is not None:
            self.grammar = grammar
        elif config.grammar_file is not None:
            self.grammar = load_grammar(config.grammar_file.read_text(encoding="utf-8"))
        else:
            self.grammar = default_grammar()
        self.confusion = confusion if confusion is not None else ConfusionTable()
        self.actuator = actuator if actuator is not None else self._log_actuation
        self.sessions: dict[str, GateSession] = {}

    @staticmethod
    def _log_actuation(gate_id: str, event: GateEvent) -> None:
        LOG.info("gate %s actuated: %s %s (%s)", gate_id, event.decision,
                 event.plate or "<no plate>", event.direction)

    def _check_gate(self, gate_id: str) -> None:
        if gate_id not in self.config.gates:
            raise UnknownGate(gate_id)

    # -- ingestion ---------------------------------------------------------

    def ingest_frame(self, gate_id: str, direction: str, data: bytes,
                     now: int | None = None) -> tuple[str, GateEvent | None]:
        """Feed one camera frame into the gate's session.

        Returns (ACCUMULATING, None) while the window is still filling,
        or (DECIDED, event) once fusion and the decision table have run.
        Frames that yield no grammar-valid read still advance the session
        clock, so a vehicle the reader cannot see eventually times out
        into MANUAL_REVIEW with an empty plate.
        """
        self._check_gate(gate_id)
        if direction not in DIRECTIONS:
            raise BadDirection(f"direction must be IN or OUT, got {direction!r}")
        ts = self.clock() if now is None else now

        image = imgio.decode_image(data)
        frame_ref = self.store.save_frame(data)
        result = recognize_frame(
            image,
            templates=self.templates,
            grammar=self.grammar,
            confusion=self.confusion,
            max_candidates=1,
        )

        session = self.sessions.get(gate_id)
        if session is None:
            session = GateSession(gate_id=gate_id, direction=direction, opened_at=ts)
            self.sessions[gate_id] = session
        session.frames_seen += 1
        session.last_frame_ref = frame_ref

        best = result.best
        if best is not None and best.report.valid:
            read = _corrected_read(best.read, best.report.applied_corrections)
            session.observations.append(FrameObservation(
                read=read,
                frame_id=f"{gate_id}:{session.frames_seen}",
                timestamp=ts,
            ))

        if self._session_ready(session, ts):
            event = self._conclude(session, ts)
            return DECIDED, event
        return ACCUMULATING, None

    def _session_ready(self, session: GateSession, now: int) -> bool:
        if window_ready(session.observations, now,
                        self.config.window_ms, self.config.stable_k):
            return True
        # No readable frames yet: the timeout runs from the session open.
        return now - session.opened_at >= self.config.window_ms

    def _conclude(self, session: GateSession, now: int) -> GateEvent:
        """Fuse the window, decide, log, actuate, and clear the session."""
        obs = session.observations
        try:
            fused = fuse(obs, self.config.min_frames)
            decision = decide(fused, self.store.list_entries(), now, self.config.min_confidence)
            plate, confidence = fused.plate, fused.overall_confidence
        except InsufficientFrames:
            # Timed out before enough readable frames arrived: surface the
            # best-effort string (or nothing) for the operator to act on.
            if obs:
                fused = fuse(obs, min_frames=1)
                plate, confidence = fused.plate, fused.overall_confidence
            else:
                plate, confidence = "", 0.0
            decision = MANUAL_REVIEW
        except LengthMismatch:
            # Mixed-length reads cannot be fused positionally; punt to a human.
            longest = max(obs, key=lambda o: (len(o.read.chars), o.read.plate_confidence))
            plate, confidence = longest.read.raw_string, longest.read.plate_confidence
            decision = MANUAL_REVIEW

        event = self.store.append_event(
            ts=now, gate_id=session.gate_id, direction=session.direction,
            plate=plate, decision=decision, confidence=confidence,
            frame_ref=session.last_frame_ref,
        )
        if decision in (OPEN, MANUAL_OPEN):
            self.actuator(session.gate_id, event)
        del self.sessions[session.gate_id]
        return event

    # -- operator actions --------------------------------------------------

    def manual_open(self, gate_id: str, operator_id: str, reason: str = "",
                    direction: str = IN, now: int | None = None) -> GateEvent:
        """Guard override: open the gate and log who did it and why."""
        self._check_gate(gate_id)
        if not operator_id:
            raise MissingOperator("operator_id must be non-empty")
        if direction not in DIRECTIONS:
            raise BadDirection(f"direction must be IN or OUT, got {direction!r}")
        ts = self.clock() if now is None else now
        event = self.store.append_event(
            ts=ts, gate_id=gate_id, direction=direction, plate="",
            decision=MANUAL_OPEN, confidence=0.0,
            operator_id=operator_id, reason=reason or None,
        )
        self.actuator(gate_id, event)
        return event

    def upsert_entry(self, entry: AccessEntry) -> AccessEntry:
        if not self.grammar.matches_string(entry.plate):
            raise InvalidPlate(f"{entry.plate!r} does not satisfy grammar "
                               f"{self.grammar.name!r}")
        return self.store.upsert_entry(entry)

    def remove_entry(self, list_kind: str, plate: str) -> bool:
        return self.store.remove_entry(list_kind, plate)

    def list_entries(self) -> list[AccessEntry]:
        return self.store.list_entries()

    # -- queries -----------------------------------------------------------

    def occupancy(self, now: int | None = None) -> OccupancyState:
        return replay_occupancy(self.store.events)

    def events_since(self, since_id: int) -> list[GateEvent]:
        return self.store.events_since(since_id)

    def wait_events(self, since_id: int, timeout_s: float) -> list[GateEvent]:
        return self.store.wait_events(since_id, timeout_s)

    def report(self, from_ms: int, to_ms: int, gate_id: str | None = None,
               plate: str | None = None, decision: str | None = None) -> list[ReportRow]:
        if from_ms > to_ms:
            raise BadRange(f"from {from_ms} exceeds to {to_ms}")
        rows = build_report(self.store.events, self.store.list_entries())
        out = []
        for row in rows:
            if not (from_ms <= row.in_ts <= to_ms):
                continue
            if gate_id is not None and row.gate_in != gate_id:
                continue
            if plate is not None and row.plate != plate:
                continue
            if decision is not None and row.decision != decision:
                continue
            out.append(row)
        return out


# ---------------------------------------------------------------------------
# Traffic report
# ---------------------------------------------------------------------------

@dataclass
class ReportRow:
    """One vehicle visit: the IN event, paired with its OUT when one exists."""

    plate: str
    note: str
    in_ts: int
    gate_in: str
    decision: str
    out_ts: int | None = None
    duration: int | None = None
    gate_out: str | None = None


def build_report(events: list[GateEvent], entries: list[AccessEntry]) -> list[ReportRow]:
    """Fold the event log into visit rows.

    Every IN event becomes a row. IN events that opened the gate are
    paired first-in-first-out with the next OUT event of the same plate;
    denied entries never pair (the vehicle did not enter). Notes come
    from the plate's white-list entry when one exists.
    """
    notes = {e.plate: e.note for e in entries if e.list_kind == WHITE and e.note}
    rows: list[ReportRow] = []
    open_rows: dict[str, list[ReportRow]] = {}
    for event in events:
        if event.direction == IN:
            row = ReportRow(
                plate=event.plate,
                note=notes.get(event.plate, ""),
                in_ts=event.ts,
                gate_in=event.gate_id,
                decision=event.decision,
            )
            rows.append(row)
            if event.plate and event.decision in (OPEN, MANUAL_OPEN):
                open_rows.setdefault(event.plate, []).append(row)
        else:
            pending = open_rows.get(event.plate)
            if pending:
                row = pending.pop(0)
                row.out_ts = event.ts
                row.duration = event.ts - row.in_ts
                row.gate_out = event.gate_id
    return rows
