"""Monophonic step tracks and their token encoding.

A track is a sequence of 16th-note steps (16 per 4/4 bar). Each step either
rests or sounds exactly one pitch, and a sounding step is marked as an onset
(the note starts here) or a continuation of the previous step's note.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..alphabet import HOLD_TOKEN, PITCH_MAX, PITCH_MIN, REST_TOKEN
from ..errors import InvalidInput, OutOfRange

# A step is None (rest) or (pitch, onset).
Step = tuple[int, bool] | None

TRANSPOSE_RANGE = range(-11, 12)


@dataclass(frozen=True)
class QuantizedTrack:
    """Monophonic track on the 16th-note grid."""

    steps: tuple[Step, ...]

    def __post_init__(self):
        prev: Step = None
        for i, step in enumerate(self.steps):
            if step is None:
                prev = None
                continue
            pitch, onset = step
            if not onset:
                if prev is None or prev[0] != pitch:
                    raise InvalidInput(
                        f"step {i}: continuation without a matching preceding note"
                    )
            prev = step

    def __len__(self) -> int:
        return len(self.steps)

    def pitch_range(self) -> tuple[int, int] | None:
        """(min, max) sounding pitch, or None for an all-rest track."""
        pitches = [s[0] for s in self.steps if s is not None]
        if not pitches:
            return None
        return min(pitches), max(pitches)

    def transpose(self, semitones: int) -> "QuantizedTrack":
        steps = tuple(
            None if s is None else (s[0] + semitones, s[1]) for s in self.steps
        )
        return QuantizedTrack(steps)

    def in_range(self) -> bool:
        rng = self.pitch_range()
        if rng is None:
            return True
        return rng[0] >= PITCH_MIN and rng[1] <= PITCH_MAX


def encode_track(track: QuantizedTrack) -> list[str]:
    """Encode a track, one token per step.

    Note onsets emit the pitch token, continuations emit the hold token,
    silent steps emit the rest token.
    """
    tokens: list[str] = []
    for i, step in enumerate(track.steps):
        if step is None:
            tokens.append(REST_TOKEN)
            continue
        pitch, onset = step
        if not PITCH_MIN <= pitch <= PITCH_MAX:
            raise OutOfRange(f"step {i}: pitch {pitch} outside [{PITCH_MIN}, {PITCH_MAX}]")
        tokens.append(str(pitch) if onset else HOLD_TOKEN)
    return tokens


def decode_track(tokens: list[str]) -> QuantizedTrack:
    """Inverse of :func:`encode_track`.

    Rejects a hold token that has no note to continue (sequence start or
    right after a rest).
    """
    steps: list[Step] = []
    sounding: int | None = None
    for i, tok in enumerate(tokens):
        if tok == REST_TOKEN:
            steps.append(None)
            sounding = None
        elif tok == HOLD_TOKEN:
            if sounding is None:
                raise InvalidInput(f"token {i}: hold continues nothing")
            steps.append((sounding, False))
        else:
            try:
                pitch = int(tok)
            except ValueError:
                raise InvalidInput(f"token {i}: unknown token {tok!r}") from None
            if not PITCH_MIN <= pitch <= PITCH_MAX:
                raise OutOfRange(f"token {i}: pitch {pitch} outside range")
            steps.append((pitch, True))
            sounding = pitch
    return QuantizedTrack(tuple(steps))


def augment_transpose(track: QuantizedTrack) -> list[QuantizedTrack]:
    """All semitone transpositions of ``track`` that stay within pitch range.

    The original (shift 0) is always included. An all-rest track yields a
    single copy, since shifted duplicates carry no information.
    """
    if track.pitch_range() is None:
        return [track]
    out = []
    for shift in TRANSPOSE_RANGE:
        shifted = track if shift == 0 else track.transpose(shift)
        if shifted.in_range():
            out.append(shifted)
    return out
