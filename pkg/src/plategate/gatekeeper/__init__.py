"""Access-control service: config, persistence, decisions, and HTTP API."""

from .config import ConfigError, ServiceConfig, load_config, load_config_text
from .service import (
    ACCUMULATING,
    DECIDED,
    BadDirection,
    BadRange,
    GateService,
    GateSession,
    InvalidPlate,
    MissingOperator,
    ReportRow,
    UnknownGate,
    build_report,
    decide,
    within_validity,
)
from .store import (
    BLACK,
    DECISIONS,
    DENY,
    DENY_ALARM,
    DIRECTIONS,
    IN,
    LIST_KINDS,
    MANUAL_OPEN,
    MANUAL_REVIEW,
    OPEN,
    OUT,
    WEEKDAYS,
    WHITE,
    AccessEntry,
    EventStore,
    GateEvent,
    OccupancyState,
    StoreCorrupt,
    replay_occupancy,
)

__all__ = [
    "ACCUMULATING", "DECIDED", "BLACK", "WHITE", "IN", "OUT",
    "OPEN", "DENY", "DENY_ALARM", "MANUAL_REVIEW", "MANUAL_OPEN",
    "DECISIONS", "DIRECTIONS", "LIST_KINDS", "WEEKDAYS",
    "AccessEntry", "GateEvent", "OccupancyState", "EventStore", "StoreCorrupt",
    "ServiceConfig", "ConfigError", "load_config", "load_config_text",
    "GateService", "GateSession", "ReportRow",
    "UnknownGate", "MissingOperator", "InvalidPlate", "BadRange", "BadDirection",
    "decide", "within_validity", "build_report", "replay_occupancy",
]
