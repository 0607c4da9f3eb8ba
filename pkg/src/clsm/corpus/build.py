"""End-to-end corpus construction.

MIDI inputs run through the full pipeline (melody extraction, transposition
augmentation, windowing). Token text inputs are treated as ready-made
windows and only pass the silence filter. One input file is one identity.
"""

from __future__ import annotations

from pathlib import Path

from ..errors import InsufficientData
from . import midi
from .manifest import Corpus, read_token_file
from .split import split_corpus
from .tracks import augment_transpose, encode_track
from .windows import make_windows, window_ok

MIDI_SUFFIXES = {".mid", ".midi"}
TOKEN_SUFFIXES = {".tokens", ".txt"}


def windows_for_file(path: Path) -> list[list[str]]:
    if path.suffix.lower() in MIDI_SUFFIXES:
        windows = []
        for track in midi.melody_tracks(path):
            for aug in augment_transpose(track):
                windows.extend(make_windows(encode_track(aug)))
        return windows
    return [w for w in read_token_file(path) if window_ok(w)]


def build_corpus(in_dir: str | Path, out_dir: str | Path, seed: int) -> Corpus:
    in_dir = Path(in_dir)
    files = sorted(
        p
        for p in in_dir.iterdir()
        if p.suffix.lower() in MIDI_SUFFIXES | TOKEN_SUFFIXES
    )
    per_identity = {}
    for path in files:
        windows = windows_for_file(path)
        if windows:
            per_identity[path.stem] = windows
    if len(per_identity) < 20:
        raise InsufficientData(
            f"{in_dir}: only {len(per_identity)} identities with usable windows"
        )

    split = split_corpus(sorted(per_identity), seed)
    corpus = Corpus()
    for name, identities in split.as_dict().items():
        for identity in identities:
            for tokens in per_identity[identity]:
                corpus.add(name, identity, tokens)
    corpus.save(out_dir)
    return corpus
