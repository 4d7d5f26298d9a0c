"""Grammar loading, confusion-pair correction, geometric checks."""

from __future__ import annotations

import numpy as np
import pytest

from plategate.grammar import (
    BASELINE_OUTLIER,
    CLASS_MISMATCH,
    DIGITS,
    HEIGHT_OUTLIER,
    LENGTH,
    LETTERS,
    ConfusionTable,
    EmptyRead,
    GrammarParseError,
    MismatchedTemplate,
    PlateGrammar,
    default_grammar,
    geometric_check,
    load_grammar,
    validate,
)
from plategate.ocr import CharRead, PlateRead, SegmentBox


def _read(chars, heights=None, y1s=None) -> PlateRead:
    out = PlateRead()
    for i, (best, conf, alts) in enumerate(chars):
        h = heights[i] if heights else 32
        y1 = y1s[i] if y1s else 40
        box = SegmentBox(x0=i * 28, x1=i * 28 + 20, y0=y1 - h, y1=y1)
        out.chars.append(CharRead(best=best, confidence=conf,
                                  alternatives=list(alts), box=box))
    return out


def _plain(string: str, conf: float = 0.95) -> PlateRead:
    return _read([(ch, conf, []) for ch in string])


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

def test_default_grammar_shape(grammar):
    assert len(grammar) == 8
    assert grammar.positions[0] == DIGITS
    assert grammar.positions[1] == DIGITS
    assert grammar.positions[2] == LETTERS
    for pos in range(3, 8):
        assert grammar.positions[pos] == DIGITS
    assert grammar.name == "ir-standard"


def test_load_one_of_set():
    g = load_grammar("name=t\npattern=[AB]D\ndisplay=@#\n")
    assert g.positions[0] == frozenset("AB")
    assert g.positions[1] == DIGITS
    assert g.matches_string("A7") and g.matches_string("B0")
    assert not g.matches_string("C7")


def test_load_skips_comments_and_blanks():
    g = load_grammar("# top comment\n\nname=t\n# mid\npattern=DD\ndisplay=##\n")
    assert len(g) == 2


def test_load_errors_carry_line_numbers():
    with pytest.raises(GrammarParseError) as err:
        load_grammar("name=t\npattern=[AB\ndisplay=@#\n")
    assert err.value.line_no == 2
    with pytest.raises(GrammarParseError) as err:
        load_grammar("name=t\nnot a pair\npattern=DD\ndisplay=##\n")
    assert err.value.line_no == 2


def test_load_rejects_bad_patterns():
    for pattern in ("Dx", "[]D", "[a]", ""):
        with pytest.raises(GrammarParseError):
            load_grammar(f"name=t\npattern={pattern}\ndisplay=##\n")


def test_load_requires_all_keys():
    with pytest.raises(GrammarParseError):
        load_grammar("name=t\npattern=DD\n")


def test_load_rejects_slot_count_mismatch():
    with pytest.raises(MismatchedTemplate):
        load_grammar("name=t\npattern=DDD\ndisplay=##\n")


def test_format_display(grammar):
    assert grammar.format_display("12A34567") == "12 A 345 67"


def test_matches_string(grammar):
    assert grammar.matches_string("12A34567")
    assert not grammar.matches_string("12834567")   # digit in the letter slot
    assert not grammar.matches_string("1BA34567")   # letter in a digit slot
    assert not grammar.matches_string("12A3456")    # short
    assert not grammar.matches_string("12a34567")   # lowercase


# ---------------------------------------------------------------------------
# ConfusionTable
# ---------------------------------------------------------------------------

def test_confusion_partners(confusion):
    assert confusion.partners("O") == ["0"]
    assert confusion.partners("0") == ["O"]
    assert confusion.partners("B") == ["8"]
    assert confusion.partners("A") == []


def test_confusion_rejects_same_class_pair():
    with pytest.raises(ValueError):
        ConfusionTable(pairs=(("A", "B"),))
    with pytest.raises(ValueError):
        ConfusionTable(pairs=(("3", "7"),))


def test_confusion_custom_pairs():
    table = ConfusionTable(pairs=(("Q", "7"),), delta=0.3)
    assert table.partners("Q") == ["7"]
    assert table.partners("O") == []


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def test_validate_clean_read(grammar):
    report = validate(_plain("12A34567"), grammar)
    assert report.valid
    assert report.corrected == "12A34567"
    assert report.applied_corrections == []
    assert report.violations == []


def test_validate_corrects_o_to_zero(grammar, confusion):
    chars = [(c, 0.95, []) for c in "12A34"] + \
            [("O", 0.80, [("0", 0.70), ("Q", 0.60)])] + \
            [(c, 0.95, []) for c in "67"]
    report = validate(_read(chars), grammar, confusion)
    assert report.valid
    assert report.corrected == "12A34067"
    assert report.applied_corrections == [(5, "O", "0")]


def test_validate_gap_beyond_delta_blocks_correction(grammar, confusion):
    chars = [(c, 0.95, []) for c in "12A34"] + \
            [("O", 0.90, [("0", 0.70)])] + \
            [(c, 0.95, []) for c in "67"]
    report = validate(_read(chars), grammar, confusion)
    assert not report.valid
    assert report.violations == [(5, CLASS_MISMATCH)]
    assert report.corrected is None


def test_validate_gap_exactly_delta_corrects(grammar):
    # Dyadic confidences so the boundary comparison is float-exact.
    table = ConfusionTable(delta=0.25)
    chars = [(c, 0.95, []) for c in "12A34"] + \
            [("O", 1.0, [("0", 0.75)])] + \
            [(c, 0.95, []) for c in "67"]
    report = validate(_read(chars), grammar, table)
    assert report.valid
    assert report.applied_corrections == [(5, "O", "0")]


def test_validate_unscored_partner_never_substituted(grammar, confusion):
    # 'O' in a digit slot whose alternatives do not score '0' at all.
    chars = [(c, 0.95, []) for c in "12A34"] + \
            [("O", 0.80, [("Q", 0.79), ("D", 0.75)])] + \
            [(c, 0.95, []) for c in "67"]
    report = validate(_read(chars), grammar, confusion)
    assert not report.valid
    assert report.violations == [(5, CLASS_MISMATCH)]


def test_validate_no_partner_for_class(grammar, confusion):
    chars = [("G", 0.80, [("0", 0.79)])] + [(c, 0.95, []) for c in "2A34567"]
    report = validate(_read(chars), grammar, confusion)
    assert not report.valid
    assert report.violations == [(0, CLASS_MISMATCH)]


def test_validate_letter_slot_correction(grammar, confusion):
    chars = [(c, 0.95, []) for c in "12"] + \
            [("8", 0.82, [("B", 0.75)])] + \
            [(c, 0.95, []) for c in "34567"]
    report = validate(_read(chars), grammar, confusion)
    assert report.valid
    assert report.corrected == "12B34567"
    assert report.applied_corrections == [(2, "8", "B")]


def test_validate_multiple_corrections(grammar, confusion):
    chars = [("I", 0.80, [("1", 0.72)]),
             ("2", 0.95, []),
             ("A", 0.95, []),
             ("S", 0.78, [("5", 0.70)])] + [(c, 0.95, []) for c in "4567"]
    report = validate(_read(chars), grammar, confusion)
    assert report.valid
    assert report.corrected == "12A54567"
    assert report.applied_corrections == [(0, "I", "1"), (3, "S", "5")]


def test_validate_length_mismatch(grammar):
    report = validate(_plain("12A3456"), grammar)
    assert not report.valid
    assert report.violations == [(7, LENGTH)]


def test_validate_empty_read(grammar):
    report = validate(PlateRead(), grammar)
    assert not report.valid
    assert report.violations == [(0, LENGTH)]


def test_validate_correct_reads_need_no_second_pass(grammar, confusion):
    """A corrected string always re-validates cleanly; 500 randomized reads."""
    rng = np.random.RandomState(99)
    digits = sorted(DIGITS)
    letters = sorted(LETTERS)
    reverse = {}
    for a, b in confusion.pairs:
        reverse[a] = b
        reverse[b] = a
    for _ in range(500):
        truth = "".join(
            rng.choice(letters) if pos == 2 else rng.choice(digits)
            for pos in range(8)
        )
        chars = []
        for pos, ch in enumerate(truth):
            partner = reverse.get(ch)
            if partner is not None and rng.rand() < 0.4:
                # Misread as the cross-class partner, truth close behind.
                gap = rng.rand() * confusion.delta
                chars.append((partner, 0.8, [(ch, 0.8 - gap)]))
            else:
                chars.append((ch, 0.9, []))
        first = validate(_read(chars), grammar, confusion)
        assert first.valid
        assert first.corrected == truth
        second = validate(_plain(first.corrected), grammar, confusion)
        assert second.valid
        assert second.corrected == first.corrected
        assert second.applied_corrections == []


# ---------------------------------------------------------------------------
# geometric_check
# ---------------------------------------------------------------------------

def test_geometric_uniform_row_passes():
    assert geometric_check(_plain("12A34567")) == []


def test_geometric_flags_height_outlier():
    heights = [20, 21, 20, 19, 35]
    read = _read([(c, 0.9, []) for c in "12345"], heights=heights)
    assert geometric_check(read) == [(4, HEIGHT_OUTLIER)]


def test_geometric_flags_baseline_outlier():
    y1s = [40, 40, 40, 40, 32]   # last glyph floats 8 px above the row
    read = _read([(c, 0.9, []) for c in "12345"], y1s=y1s)
    assert geometric_check(read) == [(4, BASELINE_OUTLIER)]


def test_geometric_empty_read_raises():
    with pytest.raises(EmptyRead):
        geometric_check(PlateRead())


def test_grammar_is_frozen(grammar):
    with pytest.raises(AttributeError):
        grammar.name = "other"
