"""Minimal Standard MIDI File (format 0/1) front-end.

Reads note events straight from the binary format, keeps only 4/4 files,
snaps notes to the 16th-note grid, and yields monophonic melody tracks in
the supported pitch range. Drum-channel and bass-like tracks are dropped.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

from ..alphabet import PITCH_MAX, PITCH_MIN
from ..errors import InvalidInput
from .tracks import QuantizedTrack

DRUM_CHANNEL = 9  # channel 10 in 1-based MIDI terms


@dataclass(frozen=True)
class RawNote:
    start_tick: int
    end_tick: int
    pitch: int
    channel: int


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def read(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise InvalidInput("truncated MIDI chunk")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def byte(self) -> int:
        return self.read(1)[0]

    def varint(self) -> int:
        value = 0
        for _ in range(4):
            b = self.byte()
            value = (value << 7) | (b & 0x7F)
            if not b & 0x80:
                return value
        raise InvalidInput("varint longer than 4 bytes")

    @property
    def done(self) -> bool:
        return self.pos >= len(self.data)


def _parse_track_chunk(payload: bytes):
    """Yield (tick, kind, data) events from one MTrk payload.

    kind is "on"/"off" with (channel, pitch), or "timesig" with (num, denom).
    """
    r = _Reader(payload)
    tick = 0
    status = 0
    while not r.done:
        tick += r.varint()
        first = r.byte()
        if first & 0x80:
            status = first
        else:
            r.pos -= 1  # running status: data byte belongs to previous status
            if status == 0:
                raise InvalidInput("data byte before any status byte")
        if status == 0xFF:
            meta = r.byte()
            length = r.varint()
            data = r.read(length)
            if meta == 0x58 and length >= 2:
                yield tick, "timesig", (data[0], 1 << data[1])
            status = 0  # meta events cancel running status
        elif status in (0xF0, 0xF7):
            r.read(r.varint())
            status = 0
        else:
            kind = status & 0xF0
            channel = status & 0x0F
            if kind in (0x80, 0x90, 0xA0, 0xB0, 0xE0):
                d1, d2 = r.byte(), r.byte()
                if kind == 0x90 and d2 > 0:
                    yield tick, "on", (channel, d1)
                elif kind == 0x80 or (kind == 0x90 and d2 == 0):
                    yield tick, "off", (channel, d1)
            elif kind in (0xC0, 0xD0):
                r.byte()
            else:
                raise InvalidInput(f"unexpected status byte 0x{status:02x}")


def read_midi_notes(path: bytes | str | Path) -> tuple[int, list[list[RawNote]], bool]:
    """Parse an SMF file (a path, or the raw bytes directly).

    Returns (ticks_per_beat, per-chunk note lists, is_44). ``is_44`` is False
    when any time-signature event is not 4/4; files with no such event count
    as 4/4, the format default.
    """
    if isinstance(path, (bytes, bytearray)):
        data = bytes(path)
        path = "<bytes>"
    else:
        data = Path(path).read_bytes()
    if len(data) < 14 or data[:4] != b"MThd":
        raise InvalidInput(f"{path}: not a MIDI file")
    header_len, fmt, ntrks, division = struct.unpack(">IHHH", data[4:14])
    if fmt not in (0, 1):
        raise InvalidInput(f"{path}: unsupported MIDI format {fmt}")
    if division & 0x8000:
        raise InvalidInput(f"{path}: SMPTE time division not supported")

    pos = 8 + header_len
    chunks: list[list[RawNote]] = []
    is_44 = True
    for _ in range(ntrks):
        if pos + 8 > len(data):
            break
        tag = data[pos : pos + 4]
        (length,) = struct.unpack(">I", data[pos + 4 : pos + 8])
        payload = data[pos + 8 : pos + 8 + length]
        pos += 8 + length
        if tag != b"MTrk":
            continue
        notes: list[RawNote] = []
        open_notes: dict[tuple[int, int], int] = {}
        for tick, kind, info in _parse_track_chunk(payload):
            if kind == "timesig":
                num, denom = info
                if (num, denom) != (4, 4):
                    is_44 = False
            elif kind == "on":
                open_notes.setdefault(info, tick)
            elif kind == "off" and info in open_notes:
                start = open_notes.pop(info)
                if tick > start:
                    notes.append(RawNote(start, tick, info[1], info[0]))
        chunks.append(notes)
    return division, chunks, is_44


def quantize_notes(notes: list[RawNote], ticks_per_beat: int) -> QuantizedTrack | None:
    """Snap notes to the 16th grid; None when the result is not monophonic.

    Notes snapped to zero length are dropped. Two notes occupying the same
    step make the track polyphonic and reject it.
    """
    step_ticks = ticks_per_beat / 4.0
    snapped = []
    for n in notes:
        a = round(n.start_tick / step_ticks)
        b = round(n.end_tick / step_ticks)
        if b > a:
            snapped.append((a, b, n.pitch))
    if not snapped:
        return None
    snapped.sort()
    prev_end = -1
    for a, b, _ in snapped:
        if a < prev_end:
            return None
        prev_end = b
    steps: list = [None] * snapped[-1][1]
    for a, b, pitch in snapped:
        steps[a] = (pitch, True)
        for i in range(a + 1, b):
            steps[i] = (pitch, False)
    return QuantizedTrack(tuple(steps))


def melody_tracks(path: bytes | str | Path) -> list[QuantizedTrack]:
    """Usable melody tracks of one MIDI file.

    Applies, in order: the 4/4 filter, drum-channel exclusion, monophony,
    the [55, 84] pitch-range filter, and a mean-pitch >= 55 heuristic that
    drops bass lines.
    """
    division, chunks, is_44 = read_midi_notes(path)
    if not is_44:
        return []
    out = []
    for chunk in chunks:
        by_channel: dict[int, list[RawNote]] = {}
        for n in chunk:
            by_channel.setdefault(n.channel, []).append(n)
        for channel, notes in sorted(by_channel.items()):
            if channel == DRUM_CHANNEL:
                continue
            pitches = [n.pitch for n in notes]
            if sum(pitches) / len(pitches) < PITCH_MIN:
                continue
            if min(pitches) < PITCH_MIN or max(pitches) > PITCH_MAX:
                continue
            track = quantize_notes(notes, division)
            if track is not None:
                out.append(track)
    return out
