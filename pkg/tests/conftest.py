"""Shared fixtures: seeded corpora, template sets, and the criteria log."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from plategate.corpus import generate_corpus, load_manifest
from plategate.glyphs import default_templates
from plategate.grammar import ConfusionTable, default_grammar

CLEAN_SEED = 20240501
PERTURB_SEED = 20240502
ACCEPTANCE_N = 200


@pytest.fixture(scope="session")
def templates():
    return default_templates()


@pytest.fixture(scope="session")
def grammar():
    return default_grammar()


@pytest.fixture(scope="session")
def confusion():
    return ConfusionTable()


@pytest.fixture(scope="session")
def clean_corpus(tmp_path_factory):
    """200 seed-fixed clean frames plus parsed manifest records."""
    out = tmp_path_factory.mktemp("corpus_clean")
    manifest = generate_corpus(out, ACCEPTANCE_N, CLEAN_SEED, perturb=False)
    return load_manifest(manifest)


@pytest.fixture(scope="session")
def perturbed_corpus(tmp_path_factory):
    """200 seed-fixed frames under the skew/noise/brightness/rails sweep."""
    out = tmp_path_factory.mktemp("corpus_perturbed")
    manifest = generate_corpus(out, ACCEPTANCE_N, PERTURB_SEED, perturb=True)
    return load_manifest(manifest)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A handful of clean frames for cheap cross-module checks."""
    out = tmp_path_factory.mktemp("corpus_small")
    manifest = generate_corpus(out, 6, 4242, perturb=False)
    return manifest, load_manifest(manifest)


# ---------------------------------------------------------------------------
# Acceptance criteria reporting
# ---------------------------------------------------------------------------

CRITERIA = (
    "latency: bench over 100 clean frames, mean <= 150 ms with stage breakdown",
    "clean corpus: exact >= 0.98, chars >= 0.995, IoU mean >= 0.7 on 200 frames",
    "perturbed corpus: exact >= 0.90 on the 200-frame sweep",
    "otsu equals exhaustive brute force on 50 random + 3 degenerate histograms",
    "sobel matches hand-convolved 5x5 fixtures exactly",
    "skew recovery within 1.0 degree across the seven-angle sweep",
    "consensus equals exhaustive vote enumeration; permutation-invariant",
    "decision table: all five rules with injected clocks",
    "occupancy: 1000 random sequences non-negative; restart replay identical",
    "grammar: corrected reads re-validate with zero further corrections (500x)",
)

_passed: set[str] = set()
_acceptance_collected = False


@pytest.fixture
def criterion_pass():
    """Tests call this with their criterion string after their asserts."""
    def record(name: str) -> None:
        assert name in CRITERIA, f"unknown criterion: {name}"
        _passed.add(name)
    return record


def pytest_collection_modifyitems(items):
    global _acceptance_collected
    if any("test_acceptance" in item.nodeid for item in items):
        _acceptance_collected = True


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_collected:
        return
    terminalreporter.section("acceptance criteria")
    for name in CRITERIA:
        status = "PASS" if name in _passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {name}")
