"""Synthetic scale-and-arpeggio corpus for tests and demos.

Each identity is a short repeating motif (scale run, arpeggio, zigzag and
the like) written out as token text, after transposition to every key that
fits the pitch range. Identities differ in scale, contour, rhythm, and
register, so a corpus of a couple thousand windows builds in seconds.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .manifest import write_token_file
from .tracks import QuantizedTrack, Step, augment_transpose, encode_track
from .windows import make_windows

SCALES = {
    "major": (0, 2, 4, 5, 7, 9, 11),
    "minor": (0, 2, 3, 5, 7, 8, 10),
    "pentatonic": (0, 2, 4, 7, 9),
    "triad": (0, 4, 7),
    "seventh": (0, 4, 7, 10),
}

CONTOURS = ("up", "down", "updown", "zigzag")
MOTIF_STEPS = 32  # 2 bars


def _contour_indices(contour: str, n: int) -> list[int]:
    if contour == "up":
        return list(range(n))
    if contour == "down":
        return list(range(n - 1, -1, -1))
    if contour == "updown":
        half = (n + 1) // 2
        return list(range(half)) + list(range(n - half - 1, -1, -1))[: n - half]
    # zigzag: 0 2 1 3 2 4 ...
    return [i // 2 + (i % 2) * 2 for i in range(n)]


def _degree_to_pitch(degree: int, scale: tuple[int, ...], root: int) -> int:
    octave, step = divmod(degree, len(scale))
    pitch = root + 12 * octave + scale[step]
    while pitch > root + 24:
        pitch -= 12
    return pitch


def build_motif(
    scale: tuple[int, ...],
    contour: str,
    root: int,
    dur: int,
    rest_last_slot: bool,
    degree_offset: int = 0,
) -> list[Step]:
    """One 2-bar motif as track steps."""
    n_slots = MOTIF_STEPS // dur
    slots_per_bar = 16 // dur
    degrees = _contour_indices(contour, n_slots)
    steps: list[Step] = []
    for slot, degree in enumerate(degrees):
        if rest_last_slot and (slot + 1) % slots_per_bar == 0:
            steps.extend([None] * dur)
            continue
        pitch = _degree_to_pitch(degree + degree_offset, scale, root)
        steps.append((pitch, True))
        steps.extend([(pitch, False)] * (dur - 1))
    return steps


def toy_track(identity_seed, bars: int = 16) -> QuantizedTrack:
    """A repeating-motif track, deterministic in its seed."""
    rng = np.random.default_rng(identity_seed)
    scale = SCALES[list(SCALES)[rng.integers(len(SCALES))]]
    contour = CONTOURS[rng.integers(len(CONTOURS))]
    root = int(rng.integers(56, 61))
    dur = int(rng.choice([2, 4]))
    rest_last = bool(rng.integers(2))
    alt_offset = int(rng.integers(0, 3))

    steps: list[Step] = []
    for rep in range(bars * 16 // MOTIF_STEPS):
        offset = alt_offset if rep % 2 else 0
        steps.extend(build_motif(scale, contour, root, dur, rest_last, offset))
    return QuantizedTrack(tuple(steps))


def write_toy_corpus(
    out_dir: str | Path, n_identities: int = 24, bars: int = 16, seed: int = 0
) -> dict[str, int]:
    """Write one token file per identity; returns window counts per identity."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    counts = {}
    for i in range(n_identities):
        track = toy_track([seed, i], bars=bars)
        windows = []
        for aug in augment_transpose(track):
            windows.extend(make_windows(encode_track(aug)))
        name = f"toy{i:03d}"
        write_token_file(out_dir / f"{name}.tokens", windows)
        counts[name] = len(windows)
    return counts
