"""Service configuration: UTF-8 ``key=value`` text, one key per line.

``#`` at column 0 starts a comment. Recognized keys:

    gates=G1,G2               # gate identifiers (comma-separated)
    window_ms=1500            # frame-collection window per vehicle
    stable_k=3                # consecutive identical reads that close a window
    min_frames=1              # observations required for a confident decision
    min_confidence=0.7        # below this the decision is MANUAL_REVIEW
    grammar_file=PATH         # plate grammar config (built-in default when absent)
    template_file=PATH        # glyph template archive (built-in default when absent)
    storage_dir=PATH          # event/list logs and stored frames
    listen=127.0.0.1:8080     # HTTP bind address
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_WINDOW_MS = 1500
DEFAULT_STABLE_K = 3
DEFAULT_MIN_FRAMES = 1
DEFAULT_MIN_CONFIDENCE = 0.7
DEFAULT_LISTEN = "127.0.0.1:8080"


class ConfigError(ValueError):
    """Malformed service config; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class ServiceConfig:
    """Parsed gate-service settings with defaults applied."""

    gates: tuple[str, ...] = ("G1",)
    window_ms: int = DEFAULT_WINDOW_MS
    stable_k: int = DEFAULT_STABLE_K
    min_frames: int = DEFAULT_MIN_FRAMES
    min_confidence: float = DEFAULT_MIN_CONFIDENCE
    grammar_file: Path | None = None
    template_file: Path | None = None
    storage_dir: Path = field(default_factory=lambda: Path("gatedata"))
    listen: str = DEFAULT_LISTEN

    @property
    def listen_host(self) -> str:
        return self.listen.rsplit(":", 1)[0]

    @property
    def listen_port(self) -> int:
        return int(self.listen.rsplit(":", 1)[1])


def _positive_int(value: str, key: str, line_no: int) -> int:
    try:
        out = int(value)
    except ValueError as exc:
        raise ConfigError(line_no, f"{key} must be an integer, got {value!r}") from exc
    if out < 1:
        raise ConfigError(line_no, f"{key} must be >= 1, got {out}")
    return out


def load_config_text(text: str) -> ServiceConfig:
    """Parse config text into a ServiceConfig; unknown keys are errors."""
    cfg = ServiceConfig()
    seen: set[str] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("#") or not raw.strip():
            continue
        if "=" not in raw:
            raise ConfigError(line_no, f"expected key=value, got {raw!r}")
        key, value = raw.split("=", 1)
        key, value = key.strip(), value.strip()
        if key in seen:
            raise ConfigError(line_no, f"duplicate key {key!r}")
        seen.add(key)
        if key == "gates":
            gates = tuple(g.strip() for g in value.split(",") if g.strip())
            if not gates:
                raise ConfigError(line_no, "gates must list at least one identifier")
            cfg.gates = gates
        elif key == "window_ms":
            cfg.window_ms = _positive_int(value, key, line_no)
        elif key == "stable_k":
            cfg.stable_k = _positive_int(value, key, line_no)
        elif key == "min_frames":
            cfg.min_frames = _positive_int(value, key, line_no)
        elif key == "min_confidence":
            try:
                cfg.min_confidence = float(value)
            except ValueError as exc:
                raise ConfigError(line_no, f"min_confidence must be a number, got {value!r}") from exc
            if not 0.0 <= cfg.min_confidence <= 1.0:
                raise ConfigError(line_no, f"min_confidence must be in [0,1], got {value}")
        elif key == "grammar_file":
            cfg.grammar_file = Path(value)
        elif key == "template_file":
            cfg.template_file = Path(value)
        elif key == "storage_dir":
            cfg.storage_dir = Path(value)
        elif key == "listen":
            if ":" not in value:
                raise ConfigError(line_no, f"listen must be host:port, got {value!r}")
            host, port = value.rsplit(":", 1)
            if not host or not port.isdigit():
                raise ConfigError(line_no, f"listen must be host:port, got {value!r}")
            cfg.listen = value
        else:
            raise ConfigError(line_no, f"unknown key {key!r}")
    return cfg


def load_config(path: str | Path) -> ServiceConfig:
    """Parse a config file; relative storage/grammar/template paths stay relative."""
    return load_config_text(Path(path).read_text(encoding="utf-8"))
