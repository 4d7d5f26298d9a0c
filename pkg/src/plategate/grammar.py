"""Plate grammars: per-position class constraints, confusion-pair
correction, and geometric sanity checks.

Grammar config is UTF-8 ``key=value`` text; ``#`` at column 0 starts a
comment. Keys:

    name=ir-standard
    pattern=DDLDDDDD          # D digit, L letter, [XY] one-of set
    display=## @ ### ##       # '#' digit slot, '@' letter slot, rest literal

Every shipped grammar has a fixed position count; variable-length patterns
are rejected at load so multi-frame fusion can align positions directly.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

from .ocr import CharRead, PlateRead

DIGITS = frozenset("0123456789")
LETTERS = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZ")

DEFAULT_CONFUSION_PAIRS = (("O", "0"), ("I", "1"), ("B", "8"), ("S", "5"), ("Z", "2"))
DEFAULT_CONFUSION_DELTA = 0.15

LENGTH = "LENGTH"
CLASS_MISMATCH = "CLASS_MISMATCH"
HEIGHT_OUTLIER = "HEIGHT_OUTLIER"
BASELINE_OUTLIER = "BASELINE_OUTLIER"

HEIGHT_TOLERANCE = 0.20        # fraction of median glyph height
BASELINE_TOLERANCE = 0.10      # fraction of plate height

IR_STANDARD_CONFIG = """\
# Single-row plate: two digits, series letter, three digits, two-digit region.
name=ir-standard
pattern=DDLDDDDD
display=## @ ### ##
"""


class GrammarParseError(ValueError):
    """Malformed grammar config; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class MismatchedTemplate(ValueError):
    """Display template placeholder count differs from the pattern length."""


class EmptyRead(ValueError):
    """Geometric checks need at least one character."""


@dataclass(frozen=True)
class PlateGrammar:
    """Fixed-length per-position character constraints plus display layout."""

    name: str
    positions: tuple[frozenset[str], ...]
    display_template: str

    def __len__(self) -> int:
        return len(self.positions)

    def allows(self, position: int, ch: str) -> bool:
        return ch in self.positions[position]

    def matches_string(self, plate: str) -> bool:
        """Whole-string membership check, used to vet list entries."""
        if len(plate) != len(self.positions):
            return False
        return all(ch in allowed for ch, allowed in zip(plate, self.positions))

    def format_display(self, plate: str) -> str:
        """Render a plate string through the display template."""
        out = []
        it = iter(plate)
        for ch in self.display_template:
            out.append(next(it, "?") if ch in "#@" else ch)
        return "".join(out)


@dataclass
class ConfusionTable:
    """Visually confusable letter/digit pairs and the correction margin."""

    pairs: tuple[tuple[str, str], ...] = DEFAULT_CONFUSION_PAIRS
    delta: float = DEFAULT_CONFUSION_DELTA

    def __post_init__(self):
        for a, b in self.pairs:
            if not ((a in LETTERS and b in DIGITS) or (a in DIGITS and b in LETTERS)):
                raise ValueError(f"confusion pair must be one letter and one digit: {(a, b)}")

    def partners(self, ch: str) -> list[str]:
        found = set()
        for a, b in self.pairs:
            if ch == a:
                found.add(b)
            elif ch == b:
                found.add(a)
        return sorted(found)


@dataclass
class ValidationReport:
    valid: bool
    corrected: str | None = None
    violations: list[tuple[int, str]] = field(default_factory=list)
    applied_corrections: list[tuple[int, str, str]] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def _parse_pattern(pattern: str, line_no: int) -> tuple[frozenset[str], ...]:
    positions = []
    i = 0
    while i < len(pattern):
        ch = pattern[i]
        if ch == "D":
            positions.append(DIGITS)
            i += 1
        elif ch == "L":
            positions.append(LETTERS)
            i += 1
        elif ch == "[":
            end = pattern.find("]", i)
            if end < 0:
                raise GrammarParseError(line_no, f"unterminated one-of set in pattern {pattern!r}")
            members = pattern[i + 1:end]
            if not members or any(c not in DIGITS | LETTERS for c in members):
                raise GrammarParseError(line_no, f"bad one-of set {pattern[i:end + 1]!r}")
            positions.append(frozenset(members))
            i = end + 1
        else:
            raise GrammarParseError(line_no, f"unknown pattern token {ch!r}")
    if not positions:
        raise GrammarParseError(line_no, "pattern defines no positions")
    return tuple(positions)


def load_grammar(source: str) -> PlateGrammar:
    """Parse grammar config text into a PlateGrammar."""
    fields: dict[str, str] = {}
    field_lines: dict[str, int] = {}
    for line_no, raw in enumerate(source.splitlines(), start=1):
        if raw.startswith("#") or not raw.strip():
            continue
        if "=" not in raw:
            raise GrammarParseError(line_no, f"expected key=value, got {raw!r}")
        key, value = raw.split("=", 1)
        fields[key.strip()] = value.rstrip()
        field_lines[key.strip()] = line_no
    for required in ("name", "pattern", "display"):
        if required not in fields:
            raise GrammarParseError(len(source.splitlines()) or 1, f"missing key {required!r}")

    positions = _parse_pattern(fields["pattern"].strip(), field_lines["pattern"])
    display = fields["display"].strip()
    slots = sum(1 for c in display if c in "#@")
    if slots != len(positions):
        raise MismatchedTemplate(
            f"display template has {slots} position slots, pattern has {len(positions)}")
    return PlateGrammar(name=fields["name"].strip(), positions=positions, display_template=display)


def default_grammar() -> PlateGrammar:
    return load_grammar(IR_STANDARD_CONFIG)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _alternative_confidence(char: CharRead, partner: str) -> float:
    for cls, conf in char.alternatives:
        if cls == partner:
            return conf
    return -1.0


def validate(read: PlateRead, grammar: PlateGrammar,
             confusions: ConfusionTable | None = None) -> ValidationReport:
    """Check a read against the grammar, correcting confusable characters.

    A failing position may be replaced by a confusion partner when the
    evidence gap is small: best confidence minus the partner's scored
    alternative must not exceed delta. A partner with no score (absent
    from the template set) is never substituted.
    """
    confusions = confusions or ConfusionTable()
    if len(read.chars) != len(grammar):
        return ValidationReport(
            valid=False,
            violations=[(len(read.chars), LENGTH)],
        )

    out_chars: list[str] = []
    violations: list[tuple[int, str]] = []
    corrections: list[tuple[int, str, str]] = []
    for pos, char in enumerate(read.chars):
        if grammar.allows(pos, char.best):
            out_chars.append(char.best)
            continue
        corrected = None
        for partner in confusions.partners(char.best):
            if not grammar.allows(pos, partner):
                continue
            listed = _alternative_confidence(char, partner)
            if listed >= 0 and char.confidence - listed <= confusions.delta:
                corrected = partner
                break
        if corrected is None:
            violations.append((pos, CLASS_MISMATCH))
            out_chars.append(char.best)
        else:
            corrections.append((pos, char.best, corrected))
            out_chars.append(corrected)

    if violations:
        return ValidationReport(valid=False, violations=violations,
                                applied_corrections=corrections)
    return ValidationReport(valid=True, corrected="".join(out_chars),
                            applied_corrections=corrections)


def geometric_check(read: PlateRead, plate_height: int = 48) -> list[tuple[int, str]]:
    """Flag glyphs whose height or baseline strays from the plate's median."""
    if not read.chars:
        raise EmptyRead("no characters to check")
    heights = [c.box.height for c in read.chars]
    baselines = [c.box.y1 for c in read.chars]
    med_h = statistics.median(heights)
    med_b = statistics.median(baselines)
    violations = []
    for pos, char in enumerate(read.chars):
        if abs(char.box.height - med_h) > HEIGHT_TOLERANCE * med_h:
            violations.append((pos, HEIGHT_OUTLIER))
        elif abs(char.box.y1 - med_b) > BASELINE_TOLERANCE * plate_height:
            violations.append((pos, BASELINE_OUTLIER))
    return violations
