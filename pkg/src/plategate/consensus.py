"""Multi-frame fusion: confidence-weighted per-position voting.

Strings cannot be averaged, so "averaging over frames" is realized as a
plurality vote where each frame's character contributes its confidence as
weight. Fixed-length grammars guarantee positional alignment, so no
sequence alignment is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ocr import PlateRead

DEFAULT_WINDOW_MS = 1500
DEFAULT_STABLE_K = 3
DEFAULT_MIN_FRAMES = 1


class InsufficientFrames(ValueError):
    """Fewer observations than the configured minimum."""


class LengthMismatch(ValueError):
    """Observations disagree on read length; fusion is positional."""


@dataclass
class FrameObservation:
    """One grammar-validated read of the vehicle, tagged with its frame."""

    read: PlateRead
    frame_id: str
    timestamp: int  # ms since epoch


@dataclass
class ConsensusResult:
    plate: str
    per_position_confidence: list[float]
    support: int

    @property
    def overall_confidence(self) -> float:
        if not self.per_position_confidence:
            return 0.0
        return sum(self.per_position_confidence) / len(self.per_position_confidence)


def fuse(observations: list[FrameObservation], min_frames: int = DEFAULT_MIN_FRAMES) -> ConsensusResult:
    """Fuse per-frame reads into one string by weighted plurality voting.

    At each position every candidate class accumulates the sum of its
    confidences across frames; the heaviest class wins (ties to the
    lexicographically smallest) and its weight share is the position's
    confidence.
    """
    if len(observations) < max(min_frames, 1):
        raise InsufficientFrames(f"got {len(observations)} observations, need {min_frames}")
    length = len(observations[0].read.chars)
    for obs in observations[1:]:
        if len(obs.read.chars) != length:
            raise LengthMismatch(
                f"read lengths differ: {length} vs {len(obs.read.chars)} ({obs.frame_id})")

    plate_chars: list[str] = []
    confidences: list[float] = []
    for pos in range(length):
        weights: dict[str, float] = {}
        for obs in observations:
            char = obs.read.chars[pos]
            weights[char.best] = weights.get(char.best, 0.0) + char.confidence
        winner = min(weights, key=lambda cls: (-weights[cls], cls))
        total = sum(weights.values())
        plate_chars.append(winner)
        confidences.append(weights[winner] / total if total > 0 else 0.0)

    return ConsensusResult(
        plate="".join(plate_chars),
        per_position_confidence=confidences,
        support=len(observations),
    )


def window_ready(observations: list[FrameObservation], now: int,
                 window_ms: int = DEFAULT_WINDOW_MS, stable_k: int = DEFAULT_STABLE_K) -> bool:
    """Stop collecting frames once the last stable_k reads agree on the
    whole string, or once window_ms has elapsed since the first one."""
    if not observations:
        return False
    if now - observations[0].timestamp >= window_ms:
        return True
    if len(observations) >= stable_k:
        tail = [obs.read.raw_string for obs in observations[-stable_k:]]
        if len(set(tail)) == 1:
            return True
    return False
